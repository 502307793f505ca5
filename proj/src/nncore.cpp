#include "geoaudit/nncore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace geoaudit {

namespace {

constexpr double kSigmoidMax = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kSigmoidMin = std::numeric_limits<double>::denorm_min();

void check_dims(std::size_t expected, std::size_t got) {
    if (expected != got)
        fail(ErrorKind::Argument, "dimension mismatch: model expects " + std::to_string(expected) +
                                      " features, got " + std::to_string(got));
}

void check_trainable(const DatasetMatrix& data) {
    validate(data);
    if (data.rows() == 0) fail(ErrorKind::Data, "empty dataset");
    if (data.dims() == 0) fail(ErrorKind::Data, "dataset has no feature columns");
}

double row_bce(double p, std::uint8_t y) {
    p = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
    return y ? -std::log(p) : -std::log(1.0 - p);
}

double l1_norm(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += std::abs(v);
    return s;
}

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Visits (parameter, gradient, is_weight) triples in a fixed order.
template <class F>
void visit_params(LinearProbe& m, LinearProbe& g, F&& f) {
    for (std::size_t i = 0; i < m.weights.size(); ++i) f(m.weights[i], g.weights[i], true);
    f(m.bias, g.bias, false);
}

template <class F>
void visit_params(MlpModel& m, MlpModel& g, F&& f) {
    auto& w1 = m.w1.values();
    auto& gw1 = g.w1.values();
    for (std::size_t i = 0; i < w1.size(); ++i) f(w1[i], gw1[i], true);
    for (std::size_t i = 0; i < m.b1.size(); ++i) f(m.b1[i], g.b1[i], false);
    for (std::size_t i = 0; i < m.w2.size(); ++i) f(m.w2[i], g.w2[i], true);
    f(m.b2, g.b2, false);
}

double weight_l1(const LinearProbe& m) { return l1_norm(m.weights); }
double weight_l1(const MlpModel& m) { return l1_norm(m.w1.values()) + l1_norm(m.w2); }

LinearProbe zeros_like(const LinearProbe& m) { return {std::vector<double>(m.dims(), 0.0), 0.0}; }
MlpModel zeros_like(const MlpModel& m) {
    return {Matrix(m.hidden_width(), m.dims()), std::vector<double>(m.hidden_width(), 0.0),
            std::vector<double>(m.hidden_width(), 0.0), 0.0};
}

void zero(LinearProbe& g) {
    std::fill(g.weights.begin(), g.weights.end(), 0.0);
    g.bias = 0.0;
}
void zero(MlpModel& g) {
    std::fill(g.w1.values().begin(), g.w1.values().end(), 0.0);
    std::fill(g.b1.begin(), g.b1.end(), 0.0);
    std::fill(g.w2.begin(), g.w2.end(), 0.0);
    g.b2 = 0.0;
}

// Gradient accumulators: add the summed (not averaged) BCE gradient of `rows`
// into `grad`, in row order. Returns the summed loss.
struct LinearGrad {
    double operator()(const LinearProbe& m, const DatasetMatrix& data,
                      std::span<const std::size_t> rows, LinearProbe& grad) const {
        double loss = 0.0;
        const std::size_t d = m.dims();
        for (std::size_t r : rows) {
            auto x = data.features.row(r);
            double z = m.bias;
            for (std::size_t j = 0; j < d; ++j) z += m.weights[j] * x[j];
            double p = sigmoid(z);
            std::uint8_t y = data.targets[r];
            loss += row_bce(p, y);
            double dz = p - static_cast<double>(y);
            for (std::size_t j = 0; j < d; ++j) grad.weights[j] += dz * x[j];
            grad.bias += dz;
        }
        return loss;
    }
};

struct MlpGrad {
    mutable std::vector<double> pre;
    mutable std::vector<double> hidden;

    double operator()(const MlpModel& m, const DatasetMatrix& data,
                      std::span<const std::size_t> rows, MlpModel& grad) const {
        const std::size_t n_hidden = m.hidden_width();
        const std::size_t d = m.dims();
        pre.resize(n_hidden);
        hidden.resize(n_hidden);
        double loss = 0.0;
        for (std::size_t r : rows) {
            auto x = data.features.row(r);
            double z = m.b2;
            for (std::size_t k = 0; k < n_hidden; ++k) {
                auto wk = m.w1.row(k);
                double a = m.b1[k];
                for (std::size_t j = 0; j < d; ++j) a += wk[j] * x[j];
                pre[k] = a;
                hidden[k] = a > 0.0 ? a : 0.0;
                z += m.w2[k] * hidden[k];
            }
            double p = sigmoid(z);
            std::uint8_t y = data.targets[r];
            loss += row_bce(p, y);
            double dz = p - static_cast<double>(y);
            grad.b2 += dz;
            for (std::size_t k = 0; k < n_hidden; ++k) {
                grad.w2[k] += dz * hidden[k];
                if (pre[k] <= 0.0) continue;
                double dh = dz * m.w2[k];
                grad.b1[k] += dh;
                auto gk = grad.w1.row(k);
                for (std::size_t j = 0; j < d; ++j) gk[j] += dh * x[j];
            }
        }
        return loss;
    }
};

double uniform_bound(double init_scale, std::size_t fan_in) {
    return init_scale / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
}

LinearProbe init_linear(std::size_t dims, const TrainConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double bound = uniform_bound(cfg.init_scale, dims);
    LinearProbe probe{std::vector<double>(dims), 0.0};
    for (double& w : probe.weights) w = bound * dist(rng);
    return probe;
}

MlpModel init_mlp(std::size_t dims, std::size_t hidden_width, const TrainConfig& cfg,
                  std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    MlpModel m{Matrix(hidden_width, dims), std::vector<double>(hidden_width, 0.0),
               std::vector<double>(hidden_width, 0.0), 0.0};
    const double b1 = uniform_bound(cfg.init_scale, dims);
    for (double& w : m.w1.values()) w = b1 * dist(rng);
    const double b2 = uniform_bound(cfg.init_scale, hidden_width);
    for (double& w : m.w2) w = b2 * dist(rng);
    return m;
}

template <class M, class Grad>
TrainStats run_sgd(M& model, const DatasetMatrix& data, const TrainConfig& cfg, Grad grad_fn,
                   std::mt19937_64& rng) {
    const std::size_t n = data.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainStats stats;
    stats.parameters = parameter_count(Model{model});
    {
        M scratch = zeros_like(model);
        double total = grad_fn(model, data, order, scratch);
        stats.initial_loss = total / static_cast<double>(n) + cfg.l1_lambda * weight_l1(model);
    }
    if (!std::isfinite(stats.initial_loss))
        fail(ErrorKind::Numeric, "non-finite loss before training");

    M grad = zeros_like(model);
    stats.epoch_losses.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            std::span<const std::size_t> batch(order.data() + start, stop - start);
            zero(grad);
            epoch_loss += grad_fn(model, data, batch, grad);
            const double scale = 1.0 / static_cast<double>(batch.size());
            const double shrink = cfg.learning_rate * cfg.l1_lambda;
            visit_params(model, grad, [&](double& p, double& g, bool is_weight) {
                p -= cfg.learning_rate * g * scale;
                // L1 as a soft-threshold: move toward zero by lr * lambda, never across it.
                if (is_weight && shrink > 0.0) p = sign_or_zero(p) * std::max(std::abs(p) - shrink, 0.0);
            });
        }
        double recorded = epoch_loss / static_cast<double>(n) + cfg.l1_lambda * weight_l1(model);
        if (!std::isfinite(recorded))
            fail(ErrorKind::Numeric, "non-finite training loss at epoch " + std::to_string(epoch + 1));
        stats.epoch_losses.push_back(recorded);
    }
    return stats;
}

template <class M, class Grad>
double max_relative_gradient_error(M model, const DatasetMatrix& data, double epsilon, Grad grad_fn) {
    const std::size_t n = data.rows();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    M analytic = zeros_like(model);
    grad_fn(model, data, all, analytic);

    auto mean_loss = [&](const M& m) {
        M scratch = zeros_like(m);
        return grad_fn(m, data, all, scratch) / static_cast<double>(n);
    };

    const double inv_n = 1.0 / static_cast<double>(n);
    double worst = 0.0;
    M probe = model;
    visit_params(probe, analytic, [&](double& p, double& g, bool) {
        const double saved = p;
        p = saved + epsilon;
        const double up = mean_loss(probe);
        p = saved - epsilon;
        const double down = mean_loss(probe);
        p = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double exact = g * inv_n;
        const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(exact - numeric) / denom);
    });
    return worst;
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        fail(ErrorKind::Argument, "learning_rate must be > 0");
    if (epochs < 1) fail(ErrorKind::Argument, "epochs must be >= 1");
    if (batch_size < 1) fail(ErrorKind::Argument, "batch_size must be >= 1");
    if (!(l1_lambda >= 0.0) || !std::isfinite(l1_lambda))
        fail(ErrorKind::Argument, "l1_lambda must be >= 0");
    if (!(init_scale > 0.0) || !std::isfinite(init_scale))
        fail(ErrorKind::Argument, "init_scale must be > 0");
}

double sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    // Keep the result inside the open interval even when exp saturates.
    return std::clamp(p, kSigmoidMin, kSigmoidMax);
}

double predict_linear(const LinearProbe& probe, std::span<const double> x) {
    check_dims(probe.dims(), x.size());
    double z = probe.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += probe.weights[j] * x[j];
    return sigmoid(z);
}

double predict_mlp(const MlpModel& model, std::span<const double> x) {
    check_dims(model.dims(), x.size());
    double z = model.b2;
    for (std::size_t k = 0; k < model.hidden_width(); ++k) {
        auto wk = model.w1.row(k);
        double a = model.b1[k];
        for (std::size_t j = 0; j < x.size(); ++j) a += wk[j] * x[j];
        if (a > 0.0) z += model.w2[k] * a;
    }
    return sigmoid(z);
}

double predict(const Model& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearProbe>)
                return predict_linear(m, x);
            else
                return predict_mlp(m, x);
        },
        model);
}

std::size_t input_dims(const Model& model) {
    return std::visit([](const auto& m) { return m.dims(); }, model);
}

std::size_t parameter_count(const Model& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearProbe>)
                return m.dims() + 1;
            else
                return m.hidden_width() * m.dims() + 2 * m.hidden_width() + 1;
        },
        model);
}

std::vector<double> predict_all(const Model& model, const DatasetMatrix& data) {
    check_dims(input_dims(model), data.dims());
    std::vector<double> out(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) out[r] = predict(model, data.features.row(r));
    return out;
}

double accuracy(const Model& model, const DatasetMatrix& data, double threshold) {
    if (data.rows() == 0) fail(ErrorKind::Data, "accuracy of an empty dataset");
    auto preds = predict_all(model, data);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < preds.size(); ++r)
        correct += static_cast<std::uint8_t>(preds[r] >= threshold) == data.targets[r];
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double bce_loss(std::span<const double> preds, std::span<const std::uint8_t> targets) {
    if (preds.size() != targets.size())
        fail(ErrorKind::Argument, "bce_loss: predictions and targets differ in length");
    if (preds.empty()) fail(ErrorKind::Argument, "bce_loss: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (targets[i] > 1) fail(ErrorKind::Argument, "bce_loss: non-binary target");
        total += row_bce(preds[i], targets[i]);
    }
    return total / static_cast<double>(preds.size());
}

LinearProbe init_linear(std::size_t dims, const TrainConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    return init_linear(dims, cfg, rng);
}

MlpModel init_mlp(std::size_t dims, std::size_t hidden_width, const TrainConfig& cfg) {
    if (hidden_width < 1) fail(ErrorKind::Argument, "hidden_width must be >= 1");
    std::mt19937_64 rng(cfg.seed);
    return init_mlp(dims, hidden_width, cfg, rng);
}

Trained<LinearProbe> train_linear(const DatasetMatrix& data, const TrainConfig& cfg) {
    cfg.validate();
    check_trainable(data);
    std::mt19937_64 rng(cfg.seed);
    Trained<LinearProbe> out{init_linear(data.dims(), cfg, rng), {}};
    out.stats = run_sgd(out.model, data, cfg, LinearGrad{}, rng);
    return out;
}

Trained<MlpModel> train_mlp(const DatasetMatrix& data, std::size_t hidden_width, const TrainConfig& cfg) {
    cfg.validate();
    check_trainable(data);
    if (hidden_width < 1) fail(ErrorKind::Argument, "hidden_width must be >= 1");
    std::mt19937_64 rng(cfg.seed);
    Trained<MlpModel> out{init_mlp(data.dims(), hidden_width, cfg, rng), {}};
    out.stats = run_sgd(out.model, data, cfg, MlpGrad{}, rng);
    return out;
}

double check_gradients(ModelKind kind, const DatasetMatrix& data, double epsilon,
                       std::size_t hidden_width, std::uint64_t seed) {
    check_trainable(data);
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
        fail(ErrorKind::Argument, "check_gradients: epsilon must lie in [1e-7, 1e-3]");
    TrainConfig cfg;
    cfg.seed = seed;
    if (kind == ModelKind::Linear)
        return max_relative_gradient_error(init_linear(data.dims(), cfg), data, epsilon, LinearGrad{});
    return max_relative_gradient_error(init_mlp(data.dims(), hidden_width, cfg), data, epsilon, MlpGrad{});
}

} // namespace geoaudit
