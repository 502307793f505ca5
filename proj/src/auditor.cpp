#include "geoaudit/auditor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geoaudit {

bool AuditReport::is_flagged(const std::string& name) const {
    return std::find(flagged.begin(), flagged.end(), name) != flagged.end();
}

double prune_threshold(std::span<const double> abs_weights) {
    if (abs_weights.empty()) fail(ErrorKind::Argument, "prune_threshold: empty weight vector");
    double sum = 0.0;
    for (double w : abs_weights) {
        if (!(w >= 0.0)) fail(ErrorKind::Argument, "prune_threshold: weights must be absolute values");
        sum += w;
    }
    return 2.0 * (sum / static_cast<double>(abs_weights.size()));
}

std::vector<std::string> flag_shortcuts(std::span<const double> abs_weights,
                                        const std::vector<std::string>& feature_names, double tau) {
    if (abs_weights.size() != feature_names.size())
        fail(ErrorKind::Argument, "flag_shortcuts: weights and names differ in length");
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < abs_weights.size(); ++i)
        if (abs_weights[i] > tau) hits.push_back(i);
    std::stable_sort(hits.begin(), hits.end(),
                     [&](std::size_t a, std::size_t b) { return abs_weights[a] > abs_weights[b]; });
    std::vector<std::string> out;
    out.reserve(hits.size());
    for (std::size_t i : hits) out.push_back(feature_names[i]);
    return out;
}

AuditReport make_audit_report(const LinearProbe& probe, const DatasetMatrix& train, std::uint64_t seed) {
    if (probe.dims() != train.dims())
        fail(ErrorKind::Argument, "probe dimension does not match the audited matrix");
    AuditReport report;
    report.feature_names = train.feature_names;
    report.abs_weights.resize(probe.dims());
    std::transform(probe.weights.begin(), probe.weights.end(), report.abs_weights.begin(),
                   [](double w) { return std::abs(w); });
    report.bias = probe.bias;
    report.tau = prune_threshold(report.abs_weights);
    report.flagged = flag_shortcuts(report.abs_weights, report.feature_names, report.tau);
    report.probe_train_accuracy = accuracy(Model{probe}, train);
    report.seed = seed;
    return report;
}

AuditReport run_audit(const DatasetMatrix& train, const TrainConfig& cfg) {
    TrainConfig probe_cfg = cfg;
    probe_cfg.l1_lambda = 0.0;
    auto trained = train_linear(train, probe_cfg);
    return make_audit_report(trained.model, train, cfg.seed);
}

} // namespace geoaudit
