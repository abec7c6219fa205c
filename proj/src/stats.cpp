// SPDX-License-Identifier: Apache-2.0

#include "hjhom/stats.hpp"

#include <stdexcept>

namespace hjhom {

namespace {

// Number of concordant-minus-discordant pairs for ys against 0..n-1.
int kendall_s(std::span<const double> ys) {
    int s = 0;
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i + 1; j < ys.size(); ++j) {
            if (ys[j] > ys[i]) ++s;
            else if (ys[j] < ys[i]) --s;
        }
    return s;
}

}  // namespace

KendallResult kendall_decreasing_trend(std::span<const double> ys) {
    const std::size_t n = ys.size();
    KendallResult r;
    if (n < 3) return r;
    const int s_obs = kendall_s(ys);
    const double npairs = static_cast<double>(n * (n - 1)) / 2.0;
    r.tau = static_cast<double>(s_obs) / npairs;

    if (n <= 9) {
        // Exact permutation null over all orderings of distinct ranks.
        std::vector<double> ranks(n);
        std::iota(ranks.begin(), ranks.end(), 0.0);
        std::size_t total = 0, at_most = 0;
        std::sort(ranks.begin(), ranks.end());
        do {
            ++total;
            if (kendall_s(ranks) <= s_obs) ++at_most;
        } while (std::next_permutation(ranks.begin(), ranks.end()));
        r.p_one_sided = static_cast<double>(at_most) / static_cast<double>(total);
    } else {
        // Normal approximation.
        const double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
        const double z = (s_obs + 1.0) / std::sqrt(var);
        r.p_one_sided = 0.5 * std::erfc(-z / std::sqrt(2.0));
    }
    return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    // Kolmogorov asymptotic tail sum.
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    r.p_value = std::clamp(p, 0.0, 1.0);
    return r;
}

}  // namespace hjhom
