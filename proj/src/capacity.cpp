#include "geoaudit/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace geoaudit {

namespace {

struct RunResult {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

template <class Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

const char* to_string(Aggregation a) { return a == Aggregation::Mean ? "mean" : "best"; }

std::uint64_t sweep_seed(std::uint64_t base, std::size_t hidden_width, std::size_t replicate) {
    return base + 1000u * static_cast<std::uint64_t>(hidden_width) + replicate;
}

CapacityCurve sweep_capacity(const DatasetMatrix& train, const DatasetMatrix& test,
                             const TrainConfig& cfg, const SweepOptions& options) {
    if (options.widths.empty()) fail(ErrorKind::Argument, "sweep_capacity: empty width grid");
    for (std::size_t i = 0; i < options.widths.size(); ++i) {
        if (options.widths[i] < 1) fail(ErrorKind::Argument, "sweep_capacity: widths must be >= 1");
        if (i > 0 && options.widths[i] <= options.widths[i - 1])
            fail(ErrorKind::Argument, "sweep_capacity: widths must be strictly increasing");
    }
    if (options.seeds_per_point < 1) fail(ErrorKind::Argument, "sweep_capacity: seeds_per_point must be >= 1");
    if (train.feature_names != test.feature_names)
        fail(ErrorKind::Data, "sweep_capacity: train and test feature names differ");

    const std::size_t reps = options.seeds_per_point;
    const std::size_t jobs = options.widths.size() * reps;
    std::vector<RunResult> results(jobs);

    // Widest first keeps the thread pool busy until the end.
    std::vector<std::size_t> schedule(jobs);
    for (std::size_t i = 0; i < jobs; ++i) schedule[i] = jobs - 1 - i;

    parallel_for(jobs, options.threads, [&](std::size_t slot) {
        const std::size_t job = schedule[slot];
        const std::size_t width = options.widths[job / reps];
        TrainConfig run_cfg = cfg;
        run_cfg.seed = sweep_seed(cfg.seed, width, job % reps);
        auto trained = train_mlp(train, width, run_cfg);
        Model model{std::move(trained.model)};
        results[job] = {accuracy(model, train), accuracy(model, test)};
    });

    CapacityCurve curve;
    curve.variant_label = options.variant_label;
    curve.seeds_per_point = reps;
    curve.aggregation = options.aggregation;
    for (std::size_t w = 0; w < options.widths.size(); ++w) {
        CapacityPoint point{options.widths[w], 0.0, 0.0};
        if (options.aggregation == Aggregation::Mean) {
            for (std::size_t r = 0; r < reps; ++r) {
                point.train_accuracy += results[w * reps + r].train_accuracy;
                point.test_accuracy += results[w * reps + r].test_accuracy;
            }
            point.train_accuracy /= static_cast<double>(reps);
            point.test_accuracy /= static_cast<double>(reps);
        } else {
            std::size_t best = 0;
            for (std::size_t r = 1; r < reps; ++r)
                if (results[w * reps + r].test_accuracy > results[w * reps + best].test_accuracy) best = r;
            point.train_accuracy = results[w * reps + best].train_accuracy;
            point.test_accuracy = results[w * reps + best].test_accuracy;
        }
        curve.points.push_back(point);
    }
    return curve;
}

TransitionResult detect_transition(const CapacityCurve& curve, double delta) {
    if (curve.points.size() < 2) fail(ErrorKind::Argument, "detect_transition needs at least 2 points");
    if (!(delta >= 0.0)) fail(ErrorKind::Argument, "detect_transition: delta must be >= 0");
    TransitionResult result;
    result.delta = delta;
    result.plateau_accuracy = curve.points.front().test_accuracy;
    for (const auto& p : curve.points) result.plateau_accuracy = std::max(result.plateau_accuracy, p.test_accuracy);
    for (const auto& p : curve.points) {
        if (p.test_accuracy >= result.plateau_accuracy - delta) {
            result.critical_width = p.hidden_width;
            break;
        }
    }
    return result;
}

} // namespace geoaudit
