#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geoaudit/dataset.hpp"
#include "geoaudit/nncore.hpp"

namespace geoaudit {

enum class Aggregation { Mean, Best };

struct CapacityPoint {
    std::size_t hidden_width = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

// Accuracy as a function of hidden width for one data variant.
struct CapacityCurve {
    std::string variant_label;
    std::vector<CapacityPoint> points;  // strictly increasing widths
    std::size_t seeds_per_point = 1;
    Aggregation aggregation = Aggregation::Mean;
};

struct TransitionResult {
    std::optional<std::size_t> critical_width;
    double delta = 0.0;
    double plateau_accuracy = 0.0;
};

struct SweepOptions {
    std::vector<std::size_t> widths = {1, 2, 4, 8, 16, 32, 64};
    std::size_t seeds_per_point = 3;
    Aggregation aggregation = Aggregation::Mean;
    std::string variant_label = "custom";
    // 0 means std::thread::hardware_concurrency().
    std::size_t threads = 0;
};

inline constexpr double kDefaultTransitionDelta = 0.01;

// Seed of replicate `replicate` at `hidden_width`. Depends on the width value,
// not its position in the grid, so shared widths of two grids train identically.
std::uint64_t sweep_seed(std::uint64_t base, std::size_t hidden_width, std::size_t replicate);

// Trains seeds_per_point MLPs per width and aggregates test accuracy (mean,
// or the best replicate). Runs may execute on several threads; results are
// merged in (width, replicate) order.
CapacityCurve sweep_capacity(const DatasetMatrix& train, const DatasetMatrix& test,
                             const TrainConfig& cfg, const SweepOptions& options);

// Smallest width whose test accuracy is within `delta` of the curve maximum.
TransitionResult detect_transition(const CapacityCurve& curve, double delta = kDefaultTransitionDelta);

const char* to_string(Aggregation a);

} // namespace geoaudit
