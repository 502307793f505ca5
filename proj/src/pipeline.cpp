#include "geoaudit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "geoaudit/auditor.hpp"

namespace geoaudit {

namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find(sep, start);
        auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!item.empty()) out.push_back(item);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

// Typed access to one INI section; records which keys were consumed so that
// leftovers can be reported as typos.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    std::optional<std::string> raw(const std::string& key) {
        consumed_.insert(key);
        if (!tree_) return std::nullopt;
        auto it = tree_->find(key);
        if (it == tree_->not_found()) return std::nullopt;
        return trim(it->second.data());
    }

    std::string text(const std::string& key, const std::string& fallback) {
        return raw(key).value_or(fallback);
    }

    double real(const std::string& key, double fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            double d = std::stod(*v, &used);
            if (used == v->size() && std::isfinite(d)) return d;
        } catch (const std::exception&) {
        }
        bad(key, *v, "a finite number");
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            if (!v->empty() && (*v)[0] != '-') {
                auto n = std::stoull(*v, &used);
                if (used == v->size()) return n;
            }
        } catch (const std::exception&) {
        }
        bad(key, *v, "a non-negative integer");
    }

    bool flag(const std::string& key, bool fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "0") return false;
        bad(key, *v, "true or false");
    }

    std::vector<std::string> list(const std::string& key, std::vector<std::string> fallback) {
        auto v = raw(key);
        return v ? split_list(*v, ',') : fallback;
    }

    // Keys present in the file that were never read.
    std::vector<std::string> unknown_keys() const {
        std::vector<std::string> out;
        if (!tree_) return out;
        for (const auto& [key, _] : *tree_)
            if (!consumed_.contains(key)) out.push_back(key);
        return out;
    }

    const pt::ptree* tree() const { return tree_; }
    const std::string& name() const { return name_; }

private:
    [[noreturn]] void bad(const std::string& key, const std::string& value, const char* expected) const {
        fail(ErrorKind::Config, "[" + name_ + "] " + key + " = '" + value + "' is not " + expected);
    }

    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> consumed_;
};

ColumnSpec parse_column(const std::string& name, const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = trim(spec.substr(0, colon));
    if (kind == "numeric") {
        if (colon != std::string::npos) fail(ErrorKind::Config, "numeric column '" + name + "' takes no categories");
        return {name, ColumnKind::Numeric, {}};
    }
    if (kind == "categorical") {
        if (colon == std::string::npos)
            fail(ErrorKind::Config, "categorical column '" + name + "' lists no categories");
        return {name, ColumnKind::Categorical, split_list(std::string_view(spec).substr(colon + 1), '|')};
    }
    fail(ErrorKind::Config, "column '" + name + "': kind must be numeric or categorical, got '" + kind + "'");
}

FeatureSchema parse_schema(Section& s) {
    const std::string preset = s.text("preset", "adult");
    FeatureSchema schema;
    if (preset == "adult") {
        schema = FeatureSchema::adult();
    } else if (preset != "none") {
        fail(ErrorKind::Config, "[schema] preset must be 'adult' or 'none'");
    }
    if (auto order = s.raw("columns")) {
        schema.columns.clear();
        for (const auto& name : split_list(*order, ',')) {
            auto spec = s.raw(name);
            if (!spec) fail(ErrorKind::Config, "[schema] column '" + name + "' has no kind entry");
            schema.columns.push_back(parse_column(name, *spec));
        }
    }
    schema.target_column = s.text("target", schema.target_column);
    schema.positive_label = s.text("positive_label", schema.positive_label);
    return schema;
}

std::vector<std::size_t> parse_widths(const std::vector<std::string>& items) {
    std::vector<std::size_t> out;
    for (const auto& item : items) {
        try {
            std::size_t used = 0;
            auto w = std::stoull(item, &used);
            if (used == item.size() && item[0] != '-') {
                out.push_back(w);
                continue;
            }
        } catch (const std::exception&) {
        }
        fail(ErrorKind::Config, "[sweep] widths: '" + item + "' is not a width");
    }
    return out;
}

void read_train(Section& s, TrainConfig& cfg) {
    cfg.learning_rate = s.real("learning_rate", cfg.learning_rate);
    cfg.epochs = s.count("epochs", cfg.epochs);
    cfg.batch_size = s.count("batch_size", cfg.batch_size);
    cfg.init_scale = s.real("init_scale", cfg.init_scale);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::vector<std::string> kArtifacts = {"audit.json",  "capacity.csv",   "transition.json",
                                             "stress.json", "stress.csv",     "comparison.json",
                                             "importance.csv", "manifest.json"};

template <class Fn>
void in_stage(Stage stage, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage '") + to_string(stage) + "': " + e.what());
    }
}

double sum_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

} // namespace

void ExperimentConfig::validate() const {
    if (source.kind == SourceKind::Csv) {
        schema.validate();
        if (source.path.empty()) fail(ErrorKind::Config, "[data] path is required for csv sources");
        if (features.empty()) fail(ErrorKind::Config, "[features] list is empty");
        for (const auto& f : features)
            if (!schema.find(base_column(f))) fail(ErrorKind::Config, "feature '" + f + "' is not in the schema");
    } else {
        if (source.xor_rows < 4) fail(ErrorKind::Config, "[data] xor_rows must be >= 4");
        if (!(source.xor_leak_rate >= 0.5 && source.xor_leak_rate <= 1.0))
            fail(ErrorKind::Config, "[data] xor_leak_rate must lie in [0.5, 1]");
        if (!(source.xor_noise_std >= 0.0)) fail(ErrorKind::Config, "[data] xor_noise_std must be >= 0");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        fail(ErrorKind::Config, "[data] train_fraction must lie in (0, 1)");
    try {
        probe.validate();
        mlp.validate();
        jtt.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Config, e.what());
    }
    if (final_width < 1) fail(ErrorKind::Config, "[mlp] final_width must be >= 1");
    if (sweep.widths.empty()) fail(ErrorKind::Config, "[sweep] widths is empty");
    for (std::size_t i = 0; i < sweep.widths.size(); ++i)
        if (sweep.widths[i] < 1 || (i > 0 && sweep.widths[i] <= sweep.widths[i - 1]))
            fail(ErrorKind::Config, "[sweep] widths must be positive and strictly increasing");
    if (sweep.seeds_per_point < 1) fail(ErrorKind::Config, "[sweep] seeds_per_point must be >= 1");
    if (!(transition_delta >= 0.0)) fail(ErrorKind::Config, "[sweep] transition_delta must be >= 0");
    if (!(l1_lambda >= 0.0)) fail(ErrorKind::Config, "[baselines] l1_lambda must be >= 0");
    if (stress_enabled && source.kind == SourceKind::Csv) {
        const ColumnSpec* leak = schema.find(stress.leak_feature);
        if (!leak || leak->kind != ColumnKind::Numeric ||
            std::find(features.begin(), features.end(), stress.leak_feature) == features.end())
            fail(ErrorKind::Config, "[stress] leak_feature '" + stress.leak_feature +
                                        "' must be a numeric column in the feature list");
        const std::string column = stress.override_group + "=" + stress.override_category;
        const ColumnSpec* group = schema.find(stress.override_group);
        bool listed = std::find(features.begin(), features.end(), column) != features.end() ||
                      std::find(features.begin(), features.end(), stress.override_group) != features.end();
        if (!group || group->kind != ColumnKind::Categorical || !listed)
            fail(ErrorKind::Config, "[stress] override column '" + column + "' is not in the feature list");
    }
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "source=" << (source.kind == SourceKind::Csv ? "csv" : "xor") << '\n';
    if (source.kind == SourceKind::Csv) {
        out << "path=" << source.path.string() << '\n';
        for (const auto& c : schema.columns)
            out << "column=" << c.name << ':' << (c.kind == ColumnKind::Numeric ? "numeric" : "categorical") << ':'
                << join(c.categories, "|") << '\n';
        out << "target=" << schema.target_column << "\npositive_label=" << schema.positive_label << '\n';
        out << "features=" << join(features, ",") << '\n';
    } else {
        out << "xor=" << source.xor_rows << ',' << format6(source.xor_leak_rate) << ','
            << format6(source.xor_noise_std) << '\n';
    }
    auto train = [&](const char* name, const TrainConfig& t) {
        out << name << '=' << format6(t.learning_rate) << ',' << t.epochs << ',' << t.batch_size << ','
            << format6(t.init_scale) << '\n';
    };
    train("probe", probe);
    train("mlp", mlp);
    out << "train_fraction=" << format6(train_fraction) << "\nfinal_width=" << final_width << '\n';
    out << "widths=";
    for (std::size_t w : sweep.widths) out << w << ' ';
    out << "\nseeds_per_point=" << sweep.seeds_per_point << "\naggregation=" << to_string(sweep.aggregation)
        << "\ntransition_delta=" << format6(transition_delta) << '\n';
    out << "stress=" << stress_enabled << ',' << stress.leak_feature << ',' << format6(stress.leak_raw_value) << ','
        << stress.override_group << ',' << stress.override_category << ',' << format6(stress.threshold) << '\n';
    out << "l1_lambda=" << format6(l1_lambda) << "\nprotected=" << join(protected_features, ",") << '\n';
    out << "jtt=" << jtt_enabled << ',' << format6(jtt.upweight_factor) << ',' << jtt.phase1_epochs << ','
        << jtt.phase2_epochs << '\n';
    out << "seed=" << seed << "\noutput_dir=" << output_dir.string() << '\n';
    return out.str();
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::Config, std::string("malformed config: ") + e.what());
    }
    static const std::set<std::string> known = {"experiment", "data",   "schema",   "features",
                                                "probe",      "mlp",    "sweep",    "stress", "baselines"};
    for (const auto& [name, section] : tree) {
        if (section.empty() && !section.data().empty())
            fail(ErrorKind::Config, "config key '" + name + "' must live inside a [section]");
        if (!known.contains(name)) fail(ErrorKind::Config, "unknown config section [" + name + "]");
    }

    auto section = [&](const std::string& name) {
        auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name);
    };
    std::vector<Section> sections;

    ExperimentConfig cfg;
    {
        Section s = section("experiment");
        cfg.seed = s.count("seed", cfg.seed);
        std::filesystem::path out = s.text("output_dir", cfg.output_dir.string());
        cfg.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
        sections.push_back(std::move(s));
    }
    {
        Section s = section("data");
        const std::string kind = s.text("source", "csv");
        if (kind == "csv")
            cfg.source.kind = SourceKind::Csv;
        else if (kind == "xor")
            cfg.source.kind = SourceKind::Xor;
        else
            fail(ErrorKind::Config, "[data] source must be csv or xor");
        if (auto p = s.raw("path")) {
            std::filesystem::path path = *p;
            cfg.source.path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
        }
        cfg.train_fraction = s.real("train_fraction", cfg.train_fraction);
        cfg.source.xor_rows = s.count("xor_rows", cfg.source.xor_rows);
        cfg.source.xor_leak_rate = s.real("xor_leak_rate", cfg.source.xor_leak_rate);
        cfg.source.xor_noise_std = s.real("xor_noise_std", cfg.source.xor_noise_std);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("schema");
        cfg.schema = parse_schema(s);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("features");
        cfg.features = s.list("list", cfg.features);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("probe");
        read_train(s, cfg.probe);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("mlp");
        read_train(s, cfg.mlp);
        cfg.final_width = s.count("final_width", cfg.final_width);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("sweep");
        if (auto w = s.raw("widths")) cfg.sweep.widths = parse_widths(split_list(*w, ','));
        cfg.sweep.seeds_per_point = s.count("seeds_per_point", cfg.sweep.seeds_per_point);
        const std::string agg = s.text("aggregation", "mean");
        if (agg == "mean")
            cfg.sweep.aggregation = Aggregation::Mean;
        else if (agg == "best")
            cfg.sweep.aggregation = Aggregation::Best;
        else
            fail(ErrorKind::Config, "[sweep] aggregation must be mean or best");
        cfg.transition_delta = s.real("transition_delta", cfg.transition_delta);
        cfg.sweep.threads = s.count("threads", cfg.sweep.threads);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("stress");
        cfg.stress_enabled = s.flag("enabled", cfg.source.kind == SourceKind::Csv);
        cfg.stress.leak_feature = s.text("leak_feature", cfg.stress.leak_feature);
        cfg.stress.leak_raw_value = s.real("leak_raw_value", cfg.stress.leak_raw_value);
        cfg.stress.override_group = s.text("override_group", cfg.stress.override_group);
        cfg.stress.override_category = s.text("override_category", cfg.stress.override_category);
        cfg.stress.threshold = s.real("threshold", cfg.stress.threshold);
        sections.push_back(std::move(s));
    }
    {
        Section s = section("baselines");
        cfg.l1_lambda = s.real("l1_lambda", cfg.l1_lambda);
        cfg.protected_features = s.list("protected", cfg.protected_features);
        cfg.jtt_enabled = s.flag("jtt", cfg.jtt_enabled);
        cfg.jtt.upweight_factor = s.real("jtt_upweight", cfg.jtt.upweight_factor);
        cfg.jtt.phase1_epochs = s.count("jtt_phase1_epochs", cfg.mlp.epochs);
        cfg.jtt.phase2_epochs = s.count("jtt_phase2_epochs", cfg.mlp.epochs);
        sections.push_back(std::move(s));
    }
    for (const auto& s : sections) {
        auto extra = s.unknown_keys();
        if (!extra.empty()) fail(ErrorKind::Config, "unknown key '" + extra.front() + "' in [" + s.name() + "]");
    }
    if (cfg.source.kind == SourceKind::Xor) cfg.features = {"x1", "x2", "shortcut"};
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char* to_string(Stage s) {
    switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Audit: return "audit";
    case Stage::Sweep: return "sweep";
    case Stage::Stress: return "stress";
    case Stage::Baselines: return "baselines";
    }
    return "?";
}

std::vector<Stage> all_stages() {
    return {Stage::Ingest, Stage::Audit, Stage::Sweep, Stage::Stress, Stage::Baselines};
}

std::set<Stage> parse_stages(std::string_view list) {
    std::set<Stage> out;
    for (const auto& item : split_list(list, ',')) {
        if (item == "all") {
            for (Stage s : all_stages()) out.insert(s);
            continue;
        }
        bool found = false;
        for (Stage s : all_stages())
            if (item == to_string(s)) out.insert(s), found = true;
        if (!found) fail(ErrorKind::Config, "unknown stage '" + item + "'");
    }
    if (out.empty()) fail(ErrorKind::Config, "no stages selected");
    return out;
}

IngestResult ingest(const ExperimentConfig& config) {
    IngestResult out;
    if (config.source.kind == SourceKind::Xor) {
        auto data = gen_xor_shortcut(config.source.xor_rows, config.source.xor_leak_rate,
                                     config.source.xor_noise_std, config.seed);
        out.rows_read = data.rows();
        auto parts = split(data, config.train_fraction, config.seed);
        out.train = std::move(parts.train);
        out.test = std::move(parts.test);
        return out;
    }
    RawTable raw = load_table(config.source.path, config.schema);
    out.rows_read = raw.lines_read;
    out.rows_dropped = raw.dropped_missing;
    auto [train_raw, test_raw] = split_raw(raw, config.train_fraction, config.seed);
    out.train = encode_standardize(train_raw, config.schema, config.features);
    out.test = encode_with_stats(test_raw, config.schema, config.features, out.train.standardization);
    return out;
}

json to_json(const RunManifest& manifest) {
    json stages = json::array();
    for (const auto& s : manifest.stages)
        stages.push_back({{"name", s.name}, {"status", s.status}, {"seconds", round6(s.seconds)}});
    return {{"config_digest", manifest.config_digest},
            {"files", manifest.files},
            {"stages", stages},
            {"tool_version", manifest.tool_version}};
}

RunManifest run_pipeline(const ExperimentConfig& config, const std::set<Stage>& stages) {
    config.validate();
    const auto& out_dir = config.output_dir;
    {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec || !std::filesystem::is_directory(out_dir))
            fail(ErrorKind::Config, "output directory '" + out_dir.string() + "' is not writable");
        for (const auto& name : kArtifacts) std::filesystem::remove(out_dir / name, ec);
    }

    RunManifest manifest;
    manifest.config_digest = fnv1a_hex(config.canonical());
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_text(out_dir / name, text);
        written.push_back(name);
    };
    auto record = [&](Stage stage, Clock::time_point start, bool ran) {
        manifest.stages.push_back({to_string(stage), ran ? "ok" : "skipped", ran ? seconds_since(start) : 0.0});
    };
    auto wanted = [&](Stage s) { return stages.contains(s); };

    TrainConfig probe_cfg = config.probe;
    probe_cfg.seed = config.seed;
    TrainConfig mlp_cfg = config.mlp;
    mlp_cfg.seed = config.seed;

    // ingest
    auto start = Clock::now();
    IngestResult data;
    in_stage(Stage::Ingest, [&] { data = ingest(config); });
    record(Stage::Ingest, start, true);

    // audit + prune
    start = Clock::now();
    AuditReport audit;
    TrainStats probe_stats;
    double probe_seconds = 0.0;
    DatasetMatrix pruned_train;
    DatasetMatrix pruned_test;
    in_stage(Stage::Audit, [&] {
        auto probe_start = Clock::now();
        TrainConfig audit_cfg = probe_cfg;
        audit_cfg.l1_lambda = 0.0;
        auto probe = train_linear(data.train, audit_cfg);
        probe_seconds = seconds_since(probe_start);
        probe_stats = probe.stats;
        audit = make_audit_report(probe.model, data.train, config.seed);
        std::set<std::string> flagged(audit.flagged.begin(), audit.flagged.end());
        pruned_train = drop_features(data.train, flagged);
        pruned_test = drop_features(data.test, flagged);
        if (wanted(Stage::Audit)) emit("audit.json", render_json(to_json(audit)));
    });
    record(Stage::Audit, start, true);

    // capacity sweep
    start = Clock::now();
    if (wanted(Stage::Sweep)) {
        in_stage(Stage::Sweep, [&] {
            SweepOptions opts = config.sweep;
            opts.variant_label = "baseline";
            auto baseline = sweep_capacity(data.train, data.test, mlp_cfg, opts);
            opts.variant_label = "pruned";
            auto pruned = sweep_capacity(pruned_train, pruned_test, mlp_cfg, opts);
            json transitions{{"baseline", to_json(detect_transition(baseline, config.transition_delta))},
                             {"pruned", to_json(detect_transition(pruned, config.transition_delta))},
                             {"baseline_dims", data.train.dims()},
                             {"pruned_dims", pruned_train.dims()}};
            emit("capacity.csv", to_csv(std::vector<CapacityCurve>{baseline, pruned}));
            emit("transition.json", render_json(transitions));
        });
    }
    record(Stage::Sweep, start, wanted(Stage::Sweep));

    // Final width-N models on both variants, shared by stress and baselines.
    struct FinalModels {
        Trained<MlpModel> baseline;
        Trained<MlpModel> robust;
        double baseline_seconds = 0.0;
        double robust_seconds = 0.0;
    };
    std::optional<FinalModels> finals;
    auto final_models = [&]() -> FinalModels& {
        if (!finals) {
            auto t0 = Clock::now();
            auto baseline = train_mlp(data.train, config.final_width, mlp_cfg);
            double s0 = seconds_since(t0);
            auto t1 = Clock::now();
            auto robust = train_mlp(pruned_train, config.final_width, mlp_cfg);
            finals = FinalModels{std::move(baseline), std::move(robust), s0, seconds_since(t1)};
        }
        return *finals;
    };

    // stress
    start = Clock::now();
    const bool run_stress = wanted(Stage::Stress) && config.stress_enabled;
    if (run_stress) {
        in_stage(Stage::Stress, [&] {
            auto& models = final_models();
            Model baseline{models.baseline.model};
            Model robust{models.robust.model};
            auto reports = stress_suite(baseline, data.test, robust, pruned_test, config.stress);
            json doc{{"reports", to_json(reports)},
                     {"hidden_width", config.final_width},
                     {"baseline_dims", data.test.dims()},
                     {"robust_dims", pruned_test.dims()},
                     {"baseline_test_accuracy", round6(accuracy(baseline, data.test))},
                     {"robust_test_accuracy", round6(accuracy(robust, pruned_test))}};
            emit("stress.json", render_json(doc));
            emit("stress.csv", to_csv(reports));
        });
    }
    record(Stage::Stress, start, run_stress);

    // baselines
    start = Clock::now();
    if (wanted(Stage::Baselines)) {
        in_stage(Stage::Baselines, [&] {
            auto l1 = train_l1_probe(data.train, config.l1_lambda, probe_cfg);
            auto cmp = compare_importance(audit, l1.model);
            std::vector<double> unreg(audit.abs_weights);
            const bool l1_top_protected = std::find(config.protected_features.begin(), config.protected_features.end(),
                                                    cmp.l1_top) != config.protected_features.end();
            json doc{{"importance", to_json(cmp)},
                     {"l1",
                      {{"lambda", round6(config.l1_lambda)},
                       {"sum_abs_weights", round6(sum_abs(l1.model.weights))},
                       {"unregularized_sum_abs_weights", round6(sum_abs(unreg))},
                       {"l1_top_is_protected", l1_top_protected},
                       {"auditor_top_flagged", audit.is_flagged(cmp.auditor_top)}}}};

            auto& models = final_models();
            std::vector<CostReport> costs;
            CostReport erm;
            erm.method = "erm";
            erm.add_phase(models.baseline.stats.epochs_run(), models.baseline.stats.parameters,
                          models.baseline_seconds);
            costs.push_back(erm);
            CostReport auditor;
            auditor.method = "auditor";
            auditor.add_phase(probe_stats.epochs_run(), probe_stats.parameters, probe_seconds);
            auditor.add_phase(models.robust.stats.epochs_run(), models.robust.stats.parameters,
                              models.robust_seconds);
            costs.push_back(auditor);
            if (config.jtt_enabled) {
                auto jtt = run_jtt(data.train, config.final_width, config.jtt, mlp_cfg);
                doc["jtt"] = {{"misclassified", jtt.misclassified},
                              {"phase2_rows", jtt.phase2_rows},
                              {"upweight_factor", round6(config.jtt.upweight_factor)},
                              {"test_accuracy", round6(accuracy(Model{jtt.model}, data.test))}};
                costs.push_back(jtt.cost);
            }
            json cost_docs = json::array();
            for (const auto& c : costs) cost_docs.push_back(to_json(c));
            doc["costs"] = cost_docs;
            json relative = json::array();
            for (const auto& r : cost_compare(costs, "erm")) relative.push_back(to_json(r));
            doc["relative_costs"] = relative;
            emit("comparison.json", render_json(doc));
            emit("importance.csv", to_csv(cmp));
        });
    }
    record(Stage::Baselines, start, wanted(Stage::Baselines));

    written.push_back("manifest.json");
    std::sort(written.begin(), written.end());
    manifest.files = written;
    write_text(out_dir / "manifest.json", render_json(to_json(manifest)));
    return manifest;
}

} // namespace geoaudit
