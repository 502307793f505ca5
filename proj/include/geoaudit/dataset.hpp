#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoaudit/matrix.hpp"

namespace geoaudit {

// Population mean / std used to z-score one numeric column.
struct ColumnStats {
    double mean = 0.0;
    double std = 1.0;

    double standardize(double raw) const { return (raw - mean) / std; }
    friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

// Standardized feature matrix + binary targets + aligned feature names.
//
// One-hot columns are named "column=value". `standardization` keeps the stats
// of every numeric column that was ever encoded, including columns that were
// later dropped, so an injection can tell "pruned" apart from "unknown".
struct DatasetMatrix {
    Matrix features;
    std::vector<std::uint8_t> targets;
    std::vector<std::string> feature_names;
    std::map<std::string, ColumnStats> standardization;

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t dims() const noexcept { return features.cols(); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < feature_names.size(); ++i)
            if (feature_names[i] == name) return i;
        return std::nullopt;
    }

    friend bool operator==(const DatasetMatrix&, const DatasetMatrix&) = default;
};

// Throws Data errors when shapes disagree or a target is not 0/1.
void validate(const DatasetMatrix& data);

// Group prefix of a one-hot column name ("relationship=Husband" -> "relationship");
// empty for plain numeric columns.
std::string_view onehot_group(std::string_view feature_name);

} // namespace geoaudit
