#include "geoaudit/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "geoaudit/dataprep.hpp"

namespace geoaudit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

} // namespace

void CostReport::add_phase(std::size_t epochs, std::size_t parameters, double seconds) {
    phase_epochs.push_back(epochs);
    epochs_total += epochs;
    trained_parameters_total += parameters;
    parameter_epochs += static_cast<double>(parameters) * static_cast<double>(epochs);
    wall_seconds += seconds;
}

void JttConfig::validate() const {
    if (!(upweight_factor >= 1.0) || !std::isfinite(upweight_factor))
        fail(ErrorKind::Argument, "upweight_factor must be >= 1");
    if (phase1_epochs < 1 || phase2_epochs < 1) fail(ErrorKind::Argument, "JTT phase budgets must be >= 1");
}

Trained<LinearProbe> train_l1_probe(const DatasetMatrix& data, double lambda, const TrainConfig& cfg) {
    TrainConfig l1_cfg = cfg;
    l1_cfg.l1_lambda = lambda;
    return train_linear(data, l1_cfg);
}

ImportanceComparison compare_importance(const AuditReport& audit, const LinearProbe& l1_probe) {
    if (audit.abs_weights.size() != l1_probe.dims() || audit.feature_names.size() != l1_probe.dims())
        fail(ErrorKind::Argument, "compare_importance: audit and L1 probe cover different feature spaces");
    if (audit.feature_names.empty()) fail(ErrorKind::Argument, "compare_importance: no features");

    ImportanceComparison out;
    out.feature_names = audit.feature_names;
    out.auditor_abs_weights = audit.abs_weights;
    out.l1_abs_weights.resize(l1_probe.dims());
    std::transform(l1_probe.weights.begin(), l1_probe.weights.end(), out.l1_abs_weights.begin(),
                   [](double w) { return std::abs(w); });
    out.auditor_top = out.feature_names[argmax(out.auditor_abs_weights)];
    out.l1_top = out.feature_names[argmax(out.l1_abs_weights)];

    const double cut = 0.1 * out.l1_abs_weights[argmax(out.l1_abs_weights)];
    std::size_t small = 0;
    for (double w : out.l1_abs_weights) small += w < cut;
    out.l1_sparsity = static_cast<double>(small) / static_cast<double>(out.l1_abs_weights.size());
    return out;
}

DatasetMatrix jtt_upweighted(const DatasetMatrix& train, const std::vector<std::size_t>& misclassified,
                             double upweight_factor) {
    const auto copies = static_cast<std::size_t>(std::llround(upweight_factor));
    std::vector<std::size_t> rows(train.rows());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    for (std::size_t r : misclassified)
        for (std::size_t k = 1; k < copies; ++k) rows.push_back(r);
    return select_rows(train, rows);
}

JttResult run_jtt(const DatasetMatrix& train, std::size_t hidden_width, const JttConfig& jtt,
                  const TrainConfig& cfg) {
    jtt.validate();
    JttResult result;
    result.cost.method = "jtt";

    TrainConfig phase1_cfg = cfg;
    phase1_cfg.epochs = jtt.phase1_epochs;
    auto start = Clock::now();
    auto erm = train_mlp(train, hidden_width, phase1_cfg);
    Model erm_model{erm.model};
    auto preds = predict_all(erm_model, train);
    std::vector<std::size_t> wrong;
    for (std::size_t r = 0; r < train.rows(); ++r)
        if (static_cast<std::uint8_t>(preds[r] >= 0.5) != train.targets[r]) wrong.push_back(r);
    result.cost.add_phase(jtt.phase1_epochs, erm.stats.parameters, seconds_since(start));
    result.misclassified = wrong.size();

    start = Clock::now();
    DatasetMatrix phase2_data = jtt_upweighted(train, wrong, jtt.upweight_factor);
    result.phase2_rows = phase2_data.rows();
    TrainConfig phase2_cfg = cfg;
    phase2_cfg.epochs = jtt.phase2_epochs;
    auto robust = train_mlp(phase2_data, hidden_width, phase2_cfg);
    result.cost.add_phase(jtt.phase2_epochs, robust.stats.parameters, seconds_since(start));
    result.model = std::move(robust.model);
    return result;
}

std::vector<RelativeCost> cost_compare(const std::vector<CostReport>& reports, const std::string& reference) {
    if (reports.size() < 2) fail(ErrorKind::Argument, "cost_compare needs at least 2 reports");
    auto ref = std::find_if(reports.begin(), reports.end(), [&](const auto& r) { return r.method == reference; });
    if (ref == reports.end()) fail(ErrorKind::Argument, "cost_compare: missing reference entry '" + reference + "'");
    if (ref->epochs_total == 0 || ref->trained_parameters_total == 0)
        fail(ErrorKind::Argument, "cost_compare: reference entry has zero cost");

    std::vector<RelativeCost> out;
    for (const auto& r : reports) {
        out.push_back({r.method, static_cast<double>(r.epochs_total) / static_cast<double>(ref->epochs_total),
                       static_cast<double>(r.trained_parameters_total) /
                           static_cast<double>(ref->trained_parameters_total),
                       r.parameter_epochs / ref->parameter_epochs});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.parameter_epochs < b.parameter_epochs; });
    return out;
}

} // namespace geoaudit
