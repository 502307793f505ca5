#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geoaudit/auditor.hpp"
#include "geoaudit/dataset.hpp"
#include "geoaudit/nncore.hpp"

namespace geoaudit {

struct ImportanceComparison {
    std::vector<std::string> feature_names;
    std::vector<double> auditor_abs_weights;
    std::vector<double> l1_abs_weights;
    std::string auditor_top;
    std::string l1_top;
    // Fraction of L1 weights with |w| < 0.1 * max|w|.
    double l1_sparsity = 0.0;
};

// Training cost of one method, summed over every model it trains.
struct CostReport {
    std::string method;
    std::vector<std::size_t> phase_epochs;
    std::size_t epochs_total = 0;
    std::size_t trained_parameters_total = 0;
    // sum over models of parameters * epochs
    double parameter_epochs = 0.0;
    double wall_seconds = 0.0;

    void add_phase(std::size_t epochs, std::size_t parameters, double seconds);
};

struct JttConfig {
    double upweight_factor = 5.0;
    std::size_t phase1_epochs = 200;
    std::size_t phase2_epochs = 200;

    void validate() const;
};

struct JttResult {
    MlpModel model;
    CostReport cost;
    std::size_t misclassified = 0;
    std::size_t phase2_rows = 0;
};

// L1-regularized probe; lambda == 0 is plain train_linear.
Trained<LinearProbe> train_l1_probe(const DatasetMatrix& data, double lambda, const TrainConfig& cfg);

ImportanceComparison compare_importance(const AuditReport& audit, const LinearProbe& l1_probe);

// Phase 2 training set: every row once, misclassified rows repeated so they
// appear round(upweight_factor) times in total.
DatasetMatrix jtt_upweighted(const DatasetMatrix& train, const std::vector<std::size_t>& misclassified,
                             double upweight_factor);

// Two-phase Just-Train-Twice: ERM for phase1_epochs, then a fresh model
// (same seed) trained on the upweighted set for phase2_epochs.
JttResult run_jtt(const DatasetMatrix& train, std::size_t hidden_width, const JttConfig& jtt,
                  const TrainConfig& cfg);

struct RelativeCost {
    std::string method;
    double epochs = 0.0;
    double parameters = 0.0;
    double parameter_epochs = 0.0;
};

// Costs relative to the entry named `reference` (default "erm"), ascending by
// relative parameter-epochs.
std::vector<RelativeCost> cost_compare(const std::vector<CostReport>& reports,
                                       const std::string& reference = "erm");

} // namespace geoaudit
