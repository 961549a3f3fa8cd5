#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "seqseed/errors.hpp"

namespace seqseed::stats {

namespace detail {

inline void check_sample(std::span<const double> d, const char* who)
{
    if (d.empty()) throw ParameterError(std::string(who) + ": sample is empty");
    for (double x : d)
        if (!std::isfinite(x)) throw ParameterError(std::string(who) + ": non-finite value");
}

}  // namespace detail

/// Median of a sample; the midpoint of the two central values for even sizes.
inline double median(std::vector<double> v)
{
    if (v.empty()) throw ParameterError("median: sample is empty");
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return lower + (upper - lower) / 2;
}

/**
 * Hodges–Lehmann location shift: the median of all Walsh averages
 * (d_i + d_j) / 2, i <= j. Quadratic in the sample size, which is fine for
 * per-configuration samples of a few thousand.
 */
inline double hodges_lehmann(std::span<const double> d)
{
    detail::check_sample(d, "hodges_lehmann");
    std::vector<double> walsh;
    walsh.reserve(d.size() * (d.size() + 1) / 2);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i; j < d.size(); ++j) walsh.push_back((d[i] + d[j]) / 2);
    return median(std::move(walsh));
}

/// Average ranks (1-based) of `x`, ties sharing the mean of their positions.
inline std::vector<double> midranks(std::span<const double> x)
{
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = static_cast<double>(i + j + 2) / 2;
        for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
        i = j + 1;
    }
    return rank;
}

enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonResult {
    double statistic = 0.0;  // W+, sum of ranks of the positive differences
    double p_value = 1.0;    // two-sided
    std::size_t n_effective = 0;
    bool exact = false;
    bool degenerate = false;  // every difference was zero
};

inline constexpr std::size_t wilcoxon_exact_limit = 25;

/**
 * Wilcoxon signed-rank test on paired differences.
 *
 * Zeros are dropped. Tied |d| get midranks. Up to 25 non-zero differences the
 * null distribution of W+ is computed exactly: midranks are multiples of 1/2,
 * so doubled ranks are integers and the distribution is a subset-sum count.
 * Beyond that a normal approximation with tie-corrected variance and a 0.5
 * continuity correction is used.
 */
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> d,
                                           WilcoxonMethod method = WilcoxonMethod::Auto)
{
    detail::check_sample(d, "wilcoxon_signed_rank");
    std::vector<double> nonzero;
    for (double x : d)
        if (x != 0.0) nonzero.push_back(x);

    WilcoxonResult res;
    res.n_effective = nonzero.size();
    if (nonzero.empty()) {
        res.degenerate = true;
        return res;
    }

    std::vector<double> magnitude(nonzero.size());
    std::transform(nonzero.begin(), nonzero.end(), magnitude.begin(),
                   [](double x) { return std::abs(x); });
    const auto rank = midranks(magnitude);
    for (std::size_t i = 0; i < nonzero.size(); ++i)
        if (nonzero[i] > 0) res.statistic += rank[i];

    const std::size_t n = nonzero.size();
    res.exact = method == WilcoxonMethod::Exact ||
                (method == WilcoxonMethod::Auto && n <= wilcoxon_exact_limit);

    if (res.exact) {
        std::vector<std::size_t> doubled(n);
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<std::size_t>(std::llround(2 * rank[i]));
            total += doubled[i];
        }
        // ways[s] = number of sign patterns whose doubled W+ equals s
        std::vector<double> ways(total + 1, 0.0);
        ways[0] = 1.0;
        std::size_t reach = 0;
        for (std::size_t r : doubled) {
            for (std::size_t s = reach + 1; s-- > 0;)
                if (ways[s] != 0.0) ways[s + r] += ways[s];
            reach += r;
        }
        const auto observed = static_cast<std::size_t>(std::llround(2 * res.statistic));
        const double patterns = std::ldexp(1.0, static_cast<int>(n));
        double lower = 0.0, upper = 0.0;
        for (std::size_t s = 0; s <= total; ++s) {
            if (s <= observed) lower += ways[s];
            if (s >= observed) upper += ways[s];
        }
        res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
        return res;
    }

    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4;
    double tie_term = 0.0;
    auto sorted = magnitude;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double variance = nn * (nn + 1) * (2 * nn + 1) / 24 - tie_term / 48;
    if (variance <= 0.0) return res;
    const double z = std::max(0.0, std::abs(res.statistic - mean) - 0.5) / std::sqrt(variance);
    res.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)),
                             std::numeric_limits<double>::denorm_min(), 1.0);
    return res;
}

}  // namespace seqseed::stats
