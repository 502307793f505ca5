#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geoaudit/dataset.hpp"

namespace geoaudit {

enum class ColumnKind { Numeric, Categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> categories;  // categorical only
};

// Layout of a comma-separated file: the feature columns in file order,
// followed by the target column as the last field of every row.
struct FeatureSchema {
    std::vector<ColumnSpec> columns;
    std::string target_column;
    std::string positive_label;

    void validate() const;
    const ColumnSpec* find(std::string_view name) const;

    // UCI Adult Census Income (adult.data) layout, 14 attributes + income.
    static FeatureSchema adult();
};

// Default 9-feature Adult encoding used by the audit experiments.
std::vector<std::string> default_adult_features();

// The missing-value marker; rows carrying it in a used column are dropped.
inline constexpr std::string_view kMissingMarker = "?";

// Trimmed string cells, one vector per kept row, in schema column order with
// the target value last.
struct RawTable {
    std::vector<std::vector<std::string>> rows;
    std::size_t lines_read = 0;
    std::size_t dropped_missing = 0;

    std::size_t size() const noexcept { return rows.size(); }
};

// `used_columns` limits the missing-value filter and the category check to the
// named columns (the target is always used). Empty means every schema column.
RawTable load_table(const std::filesystem::path& path, const FeatureSchema& schema,
                    const std::vector<std::string>& used_columns = {});
RawTable parse_table(std::istream& in, const FeatureSchema& schema,
                     const std::vector<std::string>& used_columns = {},
                     const std::string& source_name = "<stream>");

// Base schema column for a feature-list entry ("sex=Male" -> "sex").
std::string base_column(const std::string& feature);

// Encodes `feature_list` entries: a numeric column name, a categorical column
// name (expands to its whole one-hot group), or a single "column=value"
// indicator. Numeric columns are z-scored with population statistics of
// `raw`; one-hot columns stay in {0,1}.
DatasetMatrix encode_standardize(const RawTable& raw, const FeatureSchema& schema,
                                 const std::vector<std::string>& feature_list);

// Same as encode_standardize but z-scores with precomputed statistics (e.g. a
// test split reusing the training means/stds).
DatasetMatrix encode_with_stats(const RawTable& raw, const FeatureSchema& schema,
                                const std::vector<std::string>& feature_list,
                                const std::map<std::string, ColumnStats>& stats);

// Floor applied to the population std of every numeric column.
inline constexpr double kStdFloor = 1e-8;

struct SplitPair {
    DatasetMatrix train;
    DatasetMatrix test;
};

// Shuffled row order for a split: the first floor(fraction * n) indices go to
// the train side.
std::vector<std::size_t> split_order(std::size_t n, double train_fraction, std::uint64_t seed,
                                     std::size_t& train_rows);

SplitPair split(const DatasetMatrix& data, double train_fraction, std::uint64_t seed);
std::pair<RawTable, RawTable> split_raw(const RawTable& raw, double train_fraction, std::uint64_t seed);

DatasetMatrix drop_features(const DatasetMatrix& data, const std::set<std::string>& names);

// Rows subset in the given order.
DatasetMatrix select_rows(const DatasetMatrix& data, const std::vector<std::size_t>& rows);

// Synthetic XOR environment with a leaky shortcut column. Features are
// [x1, x2, shortcut], standardized over the generated sample.
DatasetMatrix gen_xor_shortcut(std::size_t n, double leak_rate, double noise_std, std::uint64_t seed);

} // namespace geoaudit
