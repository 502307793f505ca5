#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "geoaudit/dataset.hpp"
#include "geoaudit/matrix.hpp"

namespace geoaudit {

// Zero-hidden-layer logistic probe: p = sigmoid(w . x + b).
struct LinearProbe {
    std::vector<double> weights;
    double bias = 0.0;

    std::size_t dims() const noexcept { return weights.size(); }
    friend bool operator==(const LinearProbe&, const LinearProbe&) = default;
};

// One-hidden-layer ReLU network: p = sigmoid(w2 . max(0, W1 x + b1) + b2).
struct MlpModel {
    Matrix w1;               // hidden_width x d
    std::vector<double> b1;  // hidden_width
    std::vector<double> w2;  // hidden_width
    double b2 = 0.0;

    std::size_t hidden_width() const noexcept { return w1.rows(); }
    std::size_t dims() const noexcept { return w1.cols(); }
    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

using Model = std::variant<LinearProbe, MlpModel>;

// Mini-batch SGD settings.
//
// Weights are initialized uniformly in +-init_scale/sqrt(fan_in) (fan_in = d for
// the probe and W1, hidden_width for w2); biases start at zero. The L1 term
// l1_lambda * sum|w| applies to weights only, as a proximal (soft-threshold)
// step after each gradient step, so weights can settle at exactly zero.
struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    double l1_lambda = 0.0;
    double init_scale = 1.0;

    static TrainConfig probe_defaults() { return {}; }
    static TrainConfig mlp_defaults() {
        TrainConfig cfg;
        cfg.learning_rate = 0.05;
        return cfg;
    }

    // Throws Argument on out-of-range fields.
    void validate() const;
};

struct TrainStats {
    double initial_loss = 0.0;
    std::vector<double> epoch_losses;  // mean batch loss seen during each epoch, plus the L1 term
    std::size_t parameters = 0;

    std::size_t epochs_run() const noexcept { return epoch_losses.size(); }
    double final_loss() const { return epoch_losses.empty() ? initial_loss : epoch_losses.back(); }
};

template <class M>
struct Trained {
    M model;
    TrainStats stats;
};

double sigmoid(double z);

double predict_linear(const LinearProbe& probe, std::span<const double> x);
double predict_mlp(const MlpModel& model, std::span<const double> x);
double predict(const Model& model, std::span<const double> x);

std::size_t input_dims(const Model& model);
std::size_t parameter_count(const Model& model);

// Probabilities for every row of `data`.
std::vector<double> predict_all(const Model& model, const DatasetMatrix& data);
double accuracy(const Model& model, const DatasetMatrix& data, double threshold = 0.5);

// Clip bound applied to predictions inside bce_loss.
inline constexpr double kBceEpsilon = 1e-7;

// Mean binary cross-entropy with predictions clipped to [eps, 1 - eps].
double bce_loss(std::span<const double> preds, std::span<const std::uint8_t> targets);

Trained<LinearProbe> train_linear(const DatasetMatrix& data, const TrainConfig& cfg);
Trained<MlpModel> train_mlp(const DatasetMatrix& data, std::size_t hidden_width, const TrainConfig& cfg);

// Randomly initialized (not trained) models, using the same scheme as training.
LinearProbe init_linear(std::size_t dims, const TrainConfig& cfg);
MlpModel init_mlp(std::size_t dims, std::size_t hidden_width, const TrainConfig& cfg);

enum class ModelKind { Linear, Mlp };

// Max relative error between the analytic BCE gradient and central finite
// differences over every parameter of a randomly initialized model:
//   max_k |g_a - g_n| / max(|g_a|, |g_n|, 1e-8)
double check_gradients(ModelKind kind, const DatasetMatrix& data, double epsilon,
                       std::size_t hidden_width = 8, std::uint64_t seed = 0);

} // namespace geoaudit
