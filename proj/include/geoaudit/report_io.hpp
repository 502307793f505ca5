#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geoaudit/auditor.hpp"
#include "geoaudit/baselines.hpp"
#include "geoaudit/capacity.hpp"
#include "geoaudit/stresstest.hpp"

namespace geoaudit {

enum class ReportFormat { Json, Csv };

// "json" | "csv"; anything else is an Argument error.
ReportFormat parse_format(std::string_view name);

// Round to 6 significant digits, the precision of every emitted number.
double round6(double v);
std::string format6(double v);

nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const CapacityCurve& curve);
nlohmann::json to_json(const TransitionResult& result);
nlohmann::json to_json(const CounterfactualReport& report);
nlohmann::json to_json(const std::vector<CounterfactualReport>& reports);
nlohmann::json to_json(const ImportanceComparison& cmp);
nlohmann::json to_json(const CostReport& cost);
nlohmann::json to_json(const RelativeCost& cost);

// Flat CSV renderings with a header row.
std::string to_csv(const AuditReport& report);
std::string to_csv(const std::vector<CapacityCurve>& curves);  // variant,hidden_width,train_acc,test_acc
std::string to_csv(const CapacityCurve& curve);
std::string to_csv(const std::vector<CounterfactualReport>& reports);  // scenario,model,eligible,flipped,flip_rate_pct
std::string to_csv(const ImportanceComparison& cmp);  // feature,auditor_weight,l1_weight

// JSON is written with sorted keys and 2-space indent, followed by a newline.
std::string render_json(const nlohmann::json& doc);

void write_text(const std::filesystem::path& path, const std::string& text);

template <class Report>
void write_report(const Report& report, const std::filesystem::path& path, ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_text(path, render_json(to_json(report)));
        return;
    }
    if constexpr (requires { to_csv(report); })
        write_text(path, to_csv(report));
    else
        fail(ErrorKind::Argument, "report type has no CSV form: " + path.string());
}

template <class Report>
void write_report(const Report& report, const std::filesystem::path& path, std::string_view format) {
    write_report(report, path, parse_format(format));
}

} // namespace geoaudit
