// SPDX-License-Identifier: Apache-2.0
//
// Small statistics helpers for the stationarity and concentration tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace hjhom {

struct KendallResult {
    double tau = 0.0;
    double p_one_sided = 1.0;  // P(tau <= observed) under the null (decreasing trend)
};

// Exact one-sided Kendall trend test against a decreasing alternative.
// The x-values are taken as their indices 0..n-1, so `ys` is tested for a
// monotone-decreasing trend. Exact permutation null for n <= 9.
KendallResult kendall_decreasing_trend(std::span<const double> ys);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;  // asymptotic two-sample Kolmogorov-Smirnov
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

inline double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

}  // namespace hjhom
