#include "geoaudit/dataprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace geoaudit {

namespace {

std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return cells;
}

double parse_number(const std::string& cell, const std::string& column, std::size_t row) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed != cell.size() || !std::isfinite(v))
        fail(ErrorKind::Data, "row " + std::to_string(row) + ": column '" + column +
                                  "' is not a finite number: '" + cell + "'");
    return v;
}

// One encoded output column.
struct Plan {
    std::string name;
    std::size_t source = 0;       // schema column index
    bool numeric = true;
    std::string category;         // one-hot only
};

std::vector<Plan> plan_columns(const FeatureSchema& schema, const std::vector<std::string>& feature_list) {
    if (feature_list.empty()) fail(ErrorKind::Config, "empty feature list");
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) index[schema.columns[i].name] = i;

    std::vector<Plan> plan;
    for (const auto& entry : feature_list) {
        const std::string base = base_column(entry);
        auto it = index.find(base);
        if (it == index.end()) fail(ErrorKind::Config, "feature '" + entry + "' is not a schema column");
        const ColumnSpec& col = schema.columns[it->second];
        if (base == entry) {
            if (col.kind == ColumnKind::Numeric) {
                plan.push_back({col.name, it->second, true, {}});
            } else {
                for (const auto& cat : col.categories)
                    plan.push_back({col.name + "=" + cat, it->second, false, cat});
            }
        } else {
            if (col.kind != ColumnKind::Categorical)
                fail(ErrorKind::Config, "feature '" + entry + "' selects a category of numeric column '" + base + "'");
            std::string cat = entry.substr(base.size() + 1);
            if (std::find(col.categories.begin(), col.categories.end(), cat) == col.categories.end())
                fail(ErrorKind::Config, "feature '" + entry + "' names an unknown category");
            plan.push_back({entry, it->second, false, cat});
        }
    }
    std::vector<std::string> names;
    for (const auto& p : plan) names.push_back(p.name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail(ErrorKind::Config, "feature list produces duplicate columns");
    return plan;
}

DatasetMatrix encode(const RawTable& raw, const FeatureSchema& schema,
                     const std::vector<std::string>& feature_list,
                     const std::map<std::string, ColumnStats>* fixed_stats) {
    schema.validate();
    const auto plan = plan_columns(schema, feature_list);
    if (raw.rows.empty()) fail(ErrorKind::Data, "no rows left to encode (all rows dropped?)");

    const std::size_t n = raw.rows.size();
    const std::size_t d = plan.size();
    DatasetMatrix out;
    out.features = Matrix(n, d);
    out.targets.resize(n);
    for (const auto& p : plan) out.feature_names.push_back(p.name);

    const std::size_t target_idx = schema.columns.size();
    for (std::size_t r = 0; r < n; ++r) {
        if (raw.rows[r].size() != schema.columns.size() + 1)
            fail(ErrorKind::Data, "raw row " + std::to_string(r) + " does not match the schema width");
        out.targets[r] = raw.rows[r][target_idx] == schema.positive_label ? 1 : 0;
    }

    for (std::size_t c = 0; c < d; ++c) {
        const Plan& p = plan[c];
        if (!p.numeric) {
            for (std::size_t r = 0; r < n; ++r)
                out.features(r, c) = raw.rows[r][p.source] == p.category ? 1.0 : 0.0;
            continue;
        }
        std::vector<double> values(n);
        for (std::size_t r = 0; r < n; ++r) values[r] = parse_number(raw.rows[r][p.source], p.name, r);

        ColumnStats stats;
        if (fixed_stats) {
            auto it = fixed_stats->find(p.name);
            if (it == fixed_stats->end())
                fail(ErrorKind::Data, "no standardization statistics for column '" + p.name + "'");
            stats = it->second;
        } else {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(n);
            stats = {mean, std::max(std::sqrt(var), kStdFloor)};
        }
        for (std::size_t r = 0; r < n; ++r) out.features(r, c) = stats.standardize(values[r]);
        out.standardization[p.name] = stats;
    }
    return out;
}

} // namespace

void FeatureSchema::validate() const {
    if (columns.empty()) fail(ErrorKind::Config, "schema has no columns");
    std::vector<std::string> names;
    for (const auto& c : columns) {
        if (c.name.empty()) fail(ErrorKind::Config, "schema column with empty name");
        if (c.name.find('=') != std::string::npos)
            fail(ErrorKind::Config, "schema column name '" + c.name + "' contains '='");
        if (c.kind == ColumnKind::Categorical && c.categories.size() < 2)
            fail(ErrorKind::Config, "categorical column '" + c.name + "' needs at least 2 categories");
        names.push_back(c.name);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail(ErrorKind::Config, "schema column names are not unique");
    if (target_column.empty()) fail(ErrorKind::Config, "schema has no target column");
    if (std::binary_search(names.begin(), names.end(), target_column))
        fail(ErrorKind::Config, "target column '" + target_column + "' is also a feature column");
    if (positive_label.empty()) fail(ErrorKind::Config, "schema has no positive label");
}

const ColumnSpec* FeatureSchema::find(std::string_view name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

FeatureSchema FeatureSchema::adult() {
    using K = ColumnKind;
    FeatureSchema s;
    s.columns = {
        {"age", K::Numeric, {}},
        {"workclass", K::Categorical,
         {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov", "Local-gov", "State-gov",
          "Without-pay", "Never-worked"}},
        {"fnlwgt", K::Numeric, {}},
        {"education", K::Categorical,
         {"Bachelors", "Some-college", "11th", "HS-grad", "Prof-school", "Assoc-acdm", "Assoc-voc", "9th",
          "7th-8th", "12th", "Masters", "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"}},
        {"education-num", K::Numeric, {}},
        {"marital-status", K::Categorical,
         {"Married-civ-spouse", "Divorced", "Never-married", "Separated", "Widowed",
          "Married-spouse-absent", "Married-AF-spouse"}},
        {"occupation", K::Categorical,
         {"Tech-support", "Craft-repair", "Other-service", "Sales", "Exec-managerial", "Prof-specialty",
          "Handlers-cleaners", "Machine-op-inspct", "Adm-clerical", "Farming-fishing", "Transport-moving",
          "Priv-house-serv", "Protective-serv", "Armed-Forces"}},
        {"relationship", K::Categorical,
         {"Wife", "Own-child", "Husband", "Not-in-family", "Other-relative", "Unmarried"}},
        {"race", K::Categorical, {"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"}},
        {"sex", K::Categorical, {"Female", "Male"}},
        {"capital-gain", K::Numeric, {}},
        {"capital-loss", K::Numeric, {}},
        {"hours-per-week", K::Numeric, {}},
        {"native-country", K::Categorical,
         {"United-States", "Cambodia", "England", "Puerto-Rico", "Canada", "Germany",
          "Outlying-US(Guam-USVI-etc)", "India", "Japan", "Greece", "South", "China", "Cuba", "Iran",
          "Honduras", "Philippines", "Italy", "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal",
          "Ireland", "France", "Dominican-Republic", "Laos", "Ecuador", "Taiwan", "Haiti", "Columbia",
          "Hungary", "Guatemala", "Nicaragua", "Scotland", "Thailand", "Yugoslavia", "El-Salvador",
          "Trinadad&Tobago", "Peru", "Hong", "Holand-Netherlands"}},
    };
    s.target_column = "income";
    s.positive_label = ">50K";
    return s;
}

std::vector<std::string> default_adult_features() {
    return {"age",          "education-num",  "hours-per-week",
            "capital-gain", "capital-loss",   "sex=Male",
            "relationship=Husband", "marital-status=Married-civ-spouse", "workclass=Private"};
}

RawTable parse_table(std::istream& in, const FeatureSchema& schema,
                     const std::vector<std::string>& used_columns, const std::string& source_name) {
    schema.validate();
    const std::size_t width = schema.columns.size() + 1;

    std::vector<bool> used(width, used_columns.empty());
    used[width - 1] = true;
    for (const auto& name : used_columns) {
        const std::string base = base_column(name);
        bool found = false;
        for (std::size_t i = 0; i < schema.columns.size(); ++i)
            if (schema.columns[i].name == base) used[i] = found = true;
        if (!found && base != schema.target_column)
            fail(ErrorKind::Config, "used column '" + name + "' is not in the schema");
    }

    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++table.lines_read;
        auto cells = split_csv_line(line);
        if (cells.size() != width)
            fail(ErrorKind::Data, source_name + ":" + std::to_string(line_no) + ": expected " +
                                      std::to_string(width) + " fields, found " + std::to_string(cells.size()));
        // adult.test writes labels with a trailing period
        if (!cells.back().empty() && cells.back().back() == '.') cells.back().pop_back();

        bool missing = false;
        for (std::size_t i = 0; i < width; ++i)
            if (used[i] && cells[i] == kMissingMarker) missing = true;
        if (missing) {
            ++table.dropped_missing;
            continue;
        }
        for (std::size_t i = 0; i < schema.columns.size(); ++i) {
            const ColumnSpec& col = schema.columns[i];
            if (!used[i] || col.kind != ColumnKind::Categorical) continue;
            if (std::find(col.categories.begin(), col.categories.end(), cells[i]) == col.categories.end())
                fail(ErrorKind::Data, source_name + ":" + std::to_string(line_no) + ": unknown category '" +
                                          cells[i] + "' for column '" + col.name + "'");
        }
        table.rows.push_back(std::move(cells));
    }
    if (in.bad()) fail(ErrorKind::Io, "read error on " + source_name);
    return table;
}

RawTable load_table(const std::filesystem::path& path, const FeatureSchema& schema,
                    const std::vector<std::string>& used_columns) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open data file '" + path.string() + "'");
    return parse_table(in, schema, used_columns, path.string());
}

std::string base_column(const std::string& feature) {
    return std::string(feature.substr(0, feature.find('=')));
}

DatasetMatrix encode_standardize(const RawTable& raw, const FeatureSchema& schema,
                                 const std::vector<std::string>& feature_list) {
    return encode(raw, schema, feature_list, nullptr);
}

DatasetMatrix encode_with_stats(const RawTable& raw, const FeatureSchema& schema,
                                const std::vector<std::string>& feature_list,
                                const std::map<std::string, ColumnStats>& stats) {
    return encode(raw, schema, feature_list, &stats);
}

std::vector<std::size_t> split_order(std::size_t n, double train_fraction, std::uint64_t seed,
                                     std::size_t& train_rows) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        fail(ErrorKind::Argument, "train_fraction must lie in (0, 1)");
    if (n < 2) fail(ErrorKind::Data, "split needs at least 2 rows");
    train_rows = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (train_rows == 0 || train_rows == n)
        fail(ErrorKind::Data, "degenerate split: train " + std::to_string(train_rows) + " of " +
                                  std::to_string(n) + " rows");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

DatasetMatrix select_rows(const DatasetMatrix& data, const std::vector<std::size_t>& rows) {
    DatasetMatrix out;
    out.feature_names = data.feature_names;
    out.standardization = data.standardization;
    out.features = Matrix(rows.size(), data.dims());
    out.targets.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= data.rows()) fail(ErrorKind::Argument, "row index out of range");
        auto src = data.features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.targets[i] = data.targets[rows[i]];
    }
    return out;
}

SplitPair split(const DatasetMatrix& data, double train_fraction, std::uint64_t seed) {
    validate(data);
    std::size_t n_train = 0;
    auto order = split_order(data.rows(), train_fraction, seed, n_train);
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return {select_rows(data, train), select_rows(data, test)};
}

std::pair<RawTable, RawTable> split_raw(const RawTable& raw, double train_fraction, std::uint64_t seed) {
    std::size_t n_train = 0;
    auto order = split_order(raw.rows.size(), train_fraction, seed, n_train);
    RawTable train;
    RawTable test;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? train : test).rows.push_back(raw.rows[order[i]]);
    train.lines_read = train.rows.size();
    test.lines_read = test.rows.size();
    return {std::move(train), std::move(test)};
}

DatasetMatrix drop_features(const DatasetMatrix& data, const std::set<std::string>& names) {
    validate(data);
    for (const auto& name : names)
        if (!data.index_of(name)) fail(ErrorKind::Argument, "cannot drop unknown feature '" + name + "'");
    if (names.size() == data.dims()) fail(ErrorKind::Argument, "cannot drop every feature");

    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < data.dims(); ++c)
        if (!names.contains(data.feature_names[c])) keep.push_back(c);

    DatasetMatrix out;
    out.targets = data.targets;
    out.standardization = data.standardization;
    out.features = Matrix(data.rows(), keep.size());
    for (std::size_t c : keep) out.feature_names.push_back(data.feature_names[c]);
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t k = 0; k < keep.size(); ++k) out.features(r, k) = data.features(r, keep[k]);
    return out;
}

DatasetMatrix gen_xor_shortcut(std::size_t n, double leak_rate, double noise_std, std::uint64_t seed) {
    if (n < 4) fail(ErrorKind::Argument, "gen_xor_shortcut needs n >= 4");
    if (!(leak_rate >= 0.5 && leak_rate <= 1.0))
        fail(ErrorKind::Argument, "leak_rate must lie in [0.5, 1.0]");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        fail(ErrorKind::Argument, "noise_std must be >= 0");

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution leak(leak_rate);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto jitter = [&] { return noise_std > 0.0 ? noise_std * noise(rng) : 0.0; };

    DatasetMatrix out;
    out.features = Matrix(n, 3);
    out.targets.resize(n);
    out.feature_names = {"x1", "x2", "shortcut"};
    for (std::size_t r = 0; r < n; ++r) {
        // Separate statements fix the order of RNG draws.
        double x1 = coin(rng) ? 1.0 : -1.0;
        x1 += jitter();
        double x2 = coin(rng) ? 1.0 : -1.0;
        x2 += jitter();
        const bool positive = (x1 < 0.0) != (x2 < 0.0);
        const double label_sign = positive ? 1.0 : -1.0;
        double shortcut = leak(rng) ? label_sign : -label_sign;
        shortcut += jitter();
        out.features(r, 0) = x1;
        out.features(r, 1) = x2;
        out.features(r, 2) = shortcut;
        out.targets[r] = positive ? 1 : 0;
    }
    for (std::size_t c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += out.features(r, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) var += (out.features(r, c) - mean) * (out.features(r, c) - mean);
        ColumnStats stats{mean, std::max(std::sqrt(var / static_cast<double>(n)), kStdFloor)};
        for (std::size_t r = 0; r < n; ++r) out.features(r, c) = stats.standardize(out.features(r, c));
        out.standardization[out.feature_names[c]] = stats;
    }
    return out;
}

} // namespace geoaudit
