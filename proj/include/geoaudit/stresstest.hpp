#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geoaudit/dataset.hpp"
#include "geoaudit/nncore.hpp"

namespace geoaudit {

// One flag per row; true rows are mutated.
using RowMask = std::vector<bool>;

struct CounterfactualReport {
    std::string scenario;
    std::string model_label;
    std::size_t eligible_rows = 0;
    std::size_t flipped = 0;
    double flip_rate = 0.0;  // percent
    bool structurally_immune = false;
};

struct Mutation {
    DatasetMatrix data;
    // The mutated feature is absent from the matrix (it was pruned), so the
    // output equals the input.
    bool structurally_immune = false;
};

// Sets `feature` on selected rows to the standardized image of raw_value.
Mutation inject_numeric(const DatasetMatrix& data, const std::string& feature, double raw_value,
                        const RowMask& selector);

// Sets "group=category" to 1 and every surviving sibling "group=*" column to 0
// on selected rows.
DatasetMatrix override_category(const DatasetMatrix& data, const std::string& group,
                                const std::string& category, const RowMask& selector);

// Hard-decision flips between `original` and `modified`, counted over rows
// that differ in at least one cell.
CounterfactualReport flip_rate(const Model& model, const DatasetMatrix& original,
                               const DatasetMatrix& modified, double threshold = 0.5);

struct StressScenarios {
    std::string leak_feature = "capital-gain";
    double leak_raw_value = 99999.0;
    std::string override_group = "relationship";
    std::string override_category = "Husband";
    double threshold = 0.5;
};

// Rows with true label 0 that `model` also predicts as 0.
RowMask low_income_rows(const Model& model, const DatasetMatrix& data, double threshold = 0.5);

// Rows whose "group=category" indicator is not set.
RowMask not_in_category_rows(const DatasetMatrix& data, const std::string& group, const std::string& category);

// Runs the leakage injection and the category override against both models.
// The two test matrices hold the same rows in the same order, encoded with
// each model's feature set. Reports are ordered by (scenario, model_label).
std::vector<CounterfactualReport> stress_suite(const Model& baseline_model, const DatasetMatrix& baseline_test,
                                               const Model& robust_model, const DatasetMatrix& robust_test,
                                               const StressScenarios& scenarios);

} // namespace geoaudit
