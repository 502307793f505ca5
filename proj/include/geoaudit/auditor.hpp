#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geoaudit/dataset.hpp"
#include "geoaudit/nncore.hpp"

namespace geoaudit {

// Outcome of one linear-probe audit.
//
// Invariants: tau == 2 * mean(abs_weights); flagged holds exactly the names
// whose |w| > tau (strict), sorted by descending |w|.
struct AuditReport {
    std::vector<std::string> feature_names;
    std::vector<double> abs_weights;
    double bias = 0.0;
    double tau = 0.0;
    std::vector<std::string> flagged;
    double probe_train_accuracy = 0.0;
    std::uint64_t seed = 0;

    bool is_flagged(const std::string& name) const;
};

// tau = 2 * (sum |w_i|) / d. The bias is not part of the mean.
double prune_threshold(std::span<const double> abs_weights);

// Names with |w_i| > tau, ordered by descending magnitude (ties keep feature order).
std::vector<std::string> flag_shortcuts(std::span<const double> abs_weights,
                                        const std::vector<std::string>& feature_names, double tau);

// Trains the unregularized probe on `train` and applies the threshold rule.
// cfg.l1_lambda is ignored.
AuditReport run_audit(const DatasetMatrix& train, const TrainConfig& cfg);

// Builds the report from an already trained probe.
AuditReport make_audit_report(const LinearProbe& probe, const DatasetMatrix& train, std::uint64_t seed);

} // namespace geoaudit
