#include "geoaudit/stresstest.hpp"

#include <algorithm>

namespace geoaudit {

namespace {

std::size_t count_selected(const DatasetMatrix& data, const RowMask& selector) {
    if (selector.size() != data.rows())
        fail(ErrorKind::Argument, "row selector length " + std::to_string(selector.size()) +
                                      " does not match " + std::to_string(data.rows()) + " rows");
    std::size_t n = static_cast<std::size_t>(std::count(selector.begin(), selector.end(), true));
    if (n == 0) fail(ErrorKind::Data, "row selector matches no rows");
    return n;
}

CounterfactualReport immune_report(std::string scenario, std::string model_label, std::size_t selected) {
    CounterfactualReport r;
    r.scenario = std::move(scenario);
    r.model_label = std::move(model_label);
    r.eligible_rows = selected;
    r.structurally_immune = true;
    return r;
}

} // namespace

Mutation inject_numeric(const DatasetMatrix& data, const std::string& feature, double raw_value,
                        const RowMask& selector) {
    validate(data);
    count_selected(data, selector);
    auto stats = data.standardization.find(feature);
    auto column = data.index_of(feature);
    if (!column) {
        if (stats == data.standardization.end())
            fail(ErrorKind::Argument, "inject_numeric: unknown numeric feature '" + feature + "'");
        return {data, true};
    }
    if (stats == data.standardization.end())
        fail(ErrorKind::Argument, "inject_numeric: feature '" + feature + "' is not numeric");

    Mutation out{data, false};
    const double value = stats->second.standardize(raw_value);
    for (std::size_t r = 0; r < data.rows(); ++r)
        if (selector[r]) out.data.features(r, *column) = value;
    return out;
}

DatasetMatrix override_category(const DatasetMatrix& data, const std::string& group,
                                const std::string& category, const RowMask& selector) {
    validate(data);
    count_selected(data, selector);
    const std::string target_name = group + "=" + category;
    auto target = data.index_of(target_name);
    if (!target) fail(ErrorKind::Argument, "override_category: column '" + target_name + "' is absent");

    std::vector<std::size_t> siblings;
    for (std::size_t c = 0; c < data.dims(); ++c)
        if (c != *target && onehot_group(data.feature_names[c]) == group) siblings.push_back(c);

    DatasetMatrix out = data;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        if (!selector[r]) continue;
        out.features(r, *target) = 1.0;
        for (std::size_t c : siblings) out.features(r, c) = 0.0;
    }
    return out;
}

CounterfactualReport flip_rate(const Model& model, const DatasetMatrix& original,
                               const DatasetMatrix& modified, double threshold) {
    if (original.rows() != modified.rows() || original.dims() != modified.dims())
        fail(ErrorKind::Argument, "flip_rate: original and modified shapes differ");
    if (input_dims(model) != original.dims())
        fail(ErrorKind::Argument, "flip_rate: model dimension does not match the data");

    CounterfactualReport report;
    for (std::size_t r = 0; r < original.rows(); ++r) {
        auto a = original.features.row(r);
        auto b = modified.features.row(r);
        if (std::equal(a.begin(), a.end(), b.begin())) continue;
        ++report.eligible_rows;
        const bool before = predict(model, a) >= threshold;
        const bool after = predict(model, b) >= threshold;
        if (before != after) ++report.flipped;
    }
    if (report.eligible_rows == 0) fail(ErrorKind::Data, "flip_rate: no row was modified");
    report.flip_rate = 100.0 * static_cast<double>(report.flipped) / static_cast<double>(report.eligible_rows);
    return report;
}

RowMask low_income_rows(const Model& model, const DatasetMatrix& data, double threshold) {
    auto preds = predict_all(model, data);
    RowMask mask(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) mask[r] = data.targets[r] == 0 && preds[r] < threshold;
    return mask;
}

RowMask not_in_category_rows(const DatasetMatrix& data, const std::string& group, const std::string& category) {
    auto column = data.index_of(group + "=" + category);
    if (!column) fail(ErrorKind::Argument, "column '" + group + "=" + category + "' is absent");
    RowMask mask(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) mask[r] = data.features(r, *column) == 0.0;
    return mask;
}

std::vector<CounterfactualReport> stress_suite(const Model& baseline_model, const DatasetMatrix& baseline_test,
                                               const Model& robust_model, const DatasetMatrix& robust_test,
                                               const StressScenarios& scenarios) {
    if (baseline_test.rows() != robust_test.rows() || baseline_test.targets != robust_test.targets)
        fail(ErrorKind::Data, "stress_suite: baseline and robust test sets hold different rows");

    const std::string leak_scenario = scenarios.leak_feature + "-injection";
    const std::string override_scenario = scenarios.override_group + "=" + scenarios.override_category + "-override";

    struct Subject {
        const char* label;
        const Model& model;
        const DatasetMatrix& test;
    };
    const Subject subjects[] = {{"baseline", baseline_model, baseline_test}, {"robust", robust_model, robust_test}};

    std::vector<CounterfactualReport> reports;
    for (const Subject& s : subjects) {
        RowMask low = low_income_rows(s.model, s.test, scenarios.threshold);
        auto injected = inject_numeric(s.test, scenarios.leak_feature, scenarios.leak_raw_value, low);
        if (injected.structurally_immune) {
            reports.push_back(immune_report(leak_scenario, s.label,
                                            static_cast<std::size_t>(std::count(low.begin(), low.end(), true))));
        } else {
            auto r = flip_rate(s.model, s.test, injected.data, scenarios.threshold);
            r.scenario = leak_scenario;
            r.model_label = s.label;
            reports.push_back(r);
        }
    }
    for (const Subject& s : subjects) {
        RowMask others = not_in_category_rows(s.test, scenarios.override_group, scenarios.override_category);
        auto modified = override_category(s.test, scenarios.override_group, scenarios.override_category, others);
        auto r = flip_rate(s.model, s.test, modified, scenarios.threshold);
        r.scenario = override_scenario;
        r.model_label = s.label;
        reports.push_back(r);
    }
    std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        return std::tie(a.scenario, a.model_label) < std::tie(b.scenario, b.model_label);
    });
    return reports;
}

} // namespace geoaudit
