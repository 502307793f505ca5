#pragma once

// Test-only reference computations. Nothing here calls into geoaudit; each
// oracle recomputes its quantity from first principles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

// sigmoid evaluated in long double.
inline long double sigmoid(long double z) { return 1.0L / (1.0L + std::exp(-z)); }

inline long double bce(long double p, int y) { return y ? -std::log(p) : -std::log(1.0L - p); }

struct Moments {
    double mean = 0.0;
    double pop_std = 0.0;
};

inline Moments population_moments(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    long double mean = s / static_cast<long double>(v.size());
    long double ss = 0.0L;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size())))};
}

// Splits a raw CSV line into trimmed fields.
inline std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

struct AdultCounts {
    std::size_t rows = 0;
    std::size_t any_missing = 0;
    std::size_t workclass_or_occupation_missing = 0;
    std::vector<double> capital_gain;  // every row, including rows with '?'
};

// Counts '?' rows in adult.data by plain text processing.
inline AdultCounts count_adult(const std::string& path) {
    AdultCounts c;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = fields(line);
        ++c.rows;
        if (std::find(f.begin(), f.end(), "?") != f.end()) ++c.any_missing;
        if (f[1] == "?" || f[6] == "?") ++c.workclass_or_occupation_missing;
        c.capital_gain.push_back(std::stod(f[10]));
    }
    return c;
}

// Best accuracy of any halfspace classifier on points in the plane, found by
// exhaustive search over the dichotomies a line can induce: every candidate
// direction normal to a difference of two points (plus small rotations) and
// every threshold between consecutive projections.
inline double best_linear_accuracy_2d(const std::vector<std::array<double, 2>>& pts, const std::vector<int>& y) {
    const std::size_t n = pts.size();
    std::vector<double> angles;
    for (int k = 0; k < 720; ++k) angles.push_back(M_PI * k / 360.0);
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 40); ++i)
        for (std::size_t j = i + 1; j < std::min<std::size_t>(n, 40); ++j) {
            double a = std::atan2(pts[j][1] - pts[i][1], pts[j][0] - pts[i][0]) + M_PI / 2;
            for (double eps : {-1e-6, 0.0, 1e-6}) angles.push_back(a + eps);
        }
    double best = 0.0;
    std::vector<std::pair<double, int>> proj(n);
    for (double a : angles) {
        const double ux = std::cos(a), uy = std::sin(a);
        for (std::size_t i = 0; i < n; ++i) proj[i] = {ux * pts[i][0] + uy * pts[i][1], y[i]};
        std::sort(proj.begin(), proj.end());
        std::size_t pos_total = 0;
        for (auto& p : proj) pos_total += p.second;
        // Threshold before index k: left side predicted 0, right side 1 (and the flip).
        std::size_t pos_left = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == 0 || k == n || proj[k].first != proj[k - 1].first) {
                const std::size_t neg_left = k - pos_left;
                const std::size_t pos_right = pos_total - pos_left;
                const std::size_t correct = neg_left + pos_right;
                best = std::max(best, static_cast<double>(std::max(correct, n - correct)) / static_cast<double>(n));
            }
            if (k < n) pos_left += proj[k].second;
        }
    }
    return best;
}

// A single-hidden-unit ReLU network predicts sign(w2 * max(0, a.x + b) + b2).
// phi(t) = w2 * max(0, t) + b2 is monotone in t, so the decision set
// {x : phi(a.x + b) > 0} is a halfspace, the empty set or the whole plane.
// Enumerates all 16 labelings of the four XOR corners, keeps those a line
// can induce, and returns the best agreement with the XOR labels.
inline double single_relu_unit_xor_bound() {
    const std::array<std::array<double, 2>, 4> corners{{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
    const std::array<int, 4> xor_label{0, 1, 1, 0};
    double best = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        bool realizable = false;
        for (int k = 0; k < 3600 && !realizable; ++k) {
            const double a = 2 * M_PI * k / 3600.0;
            const double ux = std::cos(a), uy = std::sin(a);
            std::array<double, 4> t{};
            for (int i = 0; i < 4; ++i) t[i] = ux * corners[i][0] + uy * corners[i][1];
            for (double c = -2.0; c <= 2.0 && !realizable; c += 0.01) {
                bool ok = true;
                for (int i = 0; i < 4; ++i) ok = ok && ((t[i] > c) == bool(mask >> i & 1));
                realizable = ok;
            }
        }
        if (!realizable) continue;
        int agree = 0;
        for (int i = 0; i < 4; ++i) agree += (mask >> i & 1) == xor_label[i];
        best = std::max(best, agree / 4.0);
    }
    return best;
}

// P(max_i |z_i| <= 2 * mean_i |z_i|) for d iid standard normals, Monte Carlo.
inline double prob_no_flag_iid_gaussian(int d, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    int empty = 0;
    for (int t = 0; t < trials; ++t) {
        double sum = 0.0, mx = 0.0;
        for (int i = 0; i < d; ++i) {
            double a = std::abs(z(rng));
            sum += a;
            mx = std::max(mx, a);
        }
        empty += mx <= 2.0 * sum / d;
    }
    return static_cast<double>(empty) / trials;
}

} // namespace oracle
