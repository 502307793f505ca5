#include "geoaudit/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geoaudit {

using nlohmann::json;

ReportFormat parse_format(std::string_view name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    fail(ErrorKind::Argument, "unsupported report format '" + std::string(name) + "'");
}

std::string format6(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double round6(double v) {
    if (!std::isfinite(v)) return v;
    return std::stod(format6(v));
}

namespace {

json rounded(const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(round6(v));
    return arr;
}

} // namespace

json to_json(const AuditReport& report) {
    json features = json::array();
    for (std::size_t i = 0; i < report.feature_names.size(); ++i) {
        features.push_back({{"name", report.feature_names[i]},
                            {"abs_weight", round6(report.abs_weights[i])},
                            {"flagged", report.is_flagged(report.feature_names[i])}});
    }
    return {{"features", features},
            {"tau", round6(report.tau)},
            {"bias", round6(report.bias)},
            {"flagged", report.flagged},
            {"probe_train_accuracy", round6(report.probe_train_accuracy)},
            {"seed", report.seed}};
}

json to_json(const CapacityCurve& curve) {
    json points = json::array();
    for (const auto& p : curve.points)
        points.push_back({{"hidden_width", p.hidden_width},
                          {"train_acc", round6(p.train_accuracy)},
                          {"test_acc", round6(p.test_accuracy)}});
    return {{"variant", curve.variant_label},
            {"points", points},
            {"seeds_per_point", curve.seeds_per_point},
            {"aggregation", to_string(curve.aggregation)}};
}

json to_json(const TransitionResult& result) {
    json out{{"delta", round6(result.delta)}, {"plateau_accuracy", round6(result.plateau_accuracy)}};
    out["critical_width"] = result.critical_width ? json(*result.critical_width) : json(nullptr);
    return out;
}

json to_json(const CounterfactualReport& report) {
    return {{"scenario", report.scenario},
            {"model", report.model_label},
            {"eligible", report.eligible_rows},
            {"flipped", report.flipped},
            {"flip_rate_pct", round6(report.flip_rate)},
            {"structurally_immune", report.structurally_immune}};
}

json to_json(const std::vector<CounterfactualReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

json to_json(const ImportanceComparison& cmp) {
    return {{"feature_names", cmp.feature_names},
            {"auditor_abs_weights", rounded(cmp.auditor_abs_weights)},
            {"l1_abs_weights", rounded(cmp.l1_abs_weights)},
            {"auditor_top", cmp.auditor_top},
            {"l1_top", cmp.l1_top},
            {"l1_sparsity", round6(cmp.l1_sparsity)}};
}

json to_json(const CostReport& cost) {
    return {{"method", cost.method},
            {"phase_epochs", cost.phase_epochs},
            {"epochs_total", cost.epochs_total},
            {"trained_parameters_total", cost.trained_parameters_total},
            {"parameter_epochs", round6(cost.parameter_epochs)},
            {"wall_seconds", round6(cost.wall_seconds)}};
}

json to_json(const RelativeCost& cost) {
    return {{"method", cost.method},
            {"relative_epochs", round6(cost.epochs)},
            {"relative_parameters", round6(cost.parameters)},
            {"relative_parameter_epochs", round6(cost.parameter_epochs)}};
}

std::string to_csv(const AuditReport& report) {
    std::ostringstream out;
    out << "feature,abs_weight,flagged\n";
    for (std::size_t i = 0; i < report.feature_names.size(); ++i)
        out << report.feature_names[i] << ',' << format6(report.abs_weights[i]) << ','
            << (report.is_flagged(report.feature_names[i]) ? 1 : 0) << '\n';
    return out.str();
}

std::string to_csv(const std::vector<CapacityCurve>& curves) {
    std::ostringstream out;
    out << "variant,hidden_width,train_acc,test_acc\n";
    for (const auto& curve : curves)
        for (const auto& p : curve.points)
            out << curve.variant_label << ',' << p.hidden_width << ',' << format6(p.train_accuracy) << ','
                << format6(p.test_accuracy) << '\n';
    return out.str();
}

std::string to_csv(const CapacityCurve& curve) { return to_csv(std::vector<CapacityCurve>{curve}); }

std::string to_csv(const std::vector<CounterfactualReport>& reports) {
    std::ostringstream out;
    out << "scenario,model,eligible,flipped,flip_rate_pct\n";
    for (const auto& r : reports)
        out << r.scenario << ',' << r.model_label << ',' << r.eligible_rows << ',' << r.flipped << ','
            << format6(r.flip_rate) << '\n';
    return out.str();
}

std::string to_csv(const ImportanceComparison& cmp) {
    std::ostringstream out;
    out << "feature,auditor_weight,l1_weight\n";
    for (std::size_t i = 0; i < cmp.feature_names.size(); ++i)
        out << cmp.feature_names[i] << ',' << format6(cmp.auditor_abs_weights[i]) << ','
            << format6(cmp.l1_abs_weights[i]) << '\n';
    return out.str();
}

std::string render_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

} // namespace geoaudit
