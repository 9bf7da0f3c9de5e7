#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace filterlab {

/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct MeanEstimate {
    double mean = 0.0;
    double halfwidth = 0.0;  ///< 95% normal-approximation half-width
    double variance = 0.0;   ///< unbiased sample variance
    std::size_t count = 0;
};

/// Sample mean with a 95% half-width (two-pass variance). A sample of
/// identical values reports that value and exactly zero variance.
inline MeanEstimate estimate_mean(std::span<const double> xs)
{
    MeanEstimate e;
    e.count = xs.size();
    if (xs.empty()) return e;
    double sum = 0.0;
    for (double x : xs) sum += x;
    e.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return e;
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
        e.mean = xs.front();
        return e;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.variance = ss / static_cast<double>(xs.size() - 1);
    e.halfwidth = kZ95 * std::sqrt(e.variance / static_cast<double>(xs.size()));
    return e;
}

/// Proportion of successes with a 95% Wald half-width.
inline MeanEstimate estimate_proportion(std::size_t successes, std::size_t trials)
{
    MeanEstimate e;
    e.count = trials;
    if (trials == 0) return e;
    const double n = static_cast<double>(trials);
    e.mean = static_cast<double>(successes) / n;
    e.variance = e.mean * (1.0 - e.mean);
    e.halfwidth = kZ95 * std::sqrt(e.variance / n);
    return e;
}

}  // namespace filterlab
