#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geoaudit/dataset.hpp"

namespace testing_helpers {

// Gaussian features, labels from a noisy linear rule (or coin flips when
// `random_labels`).
inline geoaudit::DatasetMatrix random_data(std::size_t n, std::size_t d, std::uint64_t seed,
                                           bool random_labels = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    geoaudit::DatasetMatrix m;
    m.features = geoaudit::Matrix(n, d);
    m.targets.resize(n);
    for (std::size_t j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            m.features(i, j) = z(rng);
            s += (j % 2 ? -1.0 : 1.0) * m.features(i, j);
        }
        const double noise = z(rng);
        const bool c = coin(rng);
        m.targets[i] = random_labels ? c : (s + 0.5 * noise > 0.0);
    }
    return m;
}

inline geoaudit::DatasetMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                         const std::vector<std::uint8_t>& y,
                                         const std::vector<std::string>& names) {
    geoaudit::DatasetMatrix m;
    m.features = geoaudit::Matrix(rows.size(), names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) m.features(i, j) = rows[i][j];
    m.targets = y;
    m.feature_names = names;
    return m;
}

} // namespace testing_helpers
