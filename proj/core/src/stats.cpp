#include "treeglass/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <cmath>

#include "treeglass/error.hpp"

namespace treeglass {

double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const double> xs, double z) {
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (xs[i] - mean);
    }
    s.mean = mean;
    s.stddev = xs.size() > 1 ? std::sqrt(m2 / static_cast<double>(xs.size() - 1)) : 0.0;
    s.std_error = s.stddev / std::sqrt(static_cast<double>(xs.size()));
    s.ci_low = mean - z * s.std_error;
    s.ci_high = mean + z * s.std_error;

    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q05 = sorted_quantile(sorted, 0.05);
    s.q25 = sorted_quantile(sorted, 0.25);
    s.median = sorted_quantile(sorted, 0.5);
    s.q75 = sorted_quantile(sorted, 0.75);
    s.q95 = sorted_quantile(sorted, 0.95);
    return s;
}

Proportion clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (trials == 0) throw RangeError("proportion needs at least one trial");
    if (successes > trials) throw RangeError("more successes than trials");
    if (!(confidence > 0.0 && confidence < 1.0)) throw RangeError("confidence must lie in (0, 1)");
    Proportion p;
    p.successes = successes;
    p.trials = trials;
    p.confidence = confidence;
    p.estimate = static_cast<double>(successes) / static_cast<double>(trials);
    const double alpha = 1.0 - confidence;
    const auto k = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    using boost::math::beta_distribution;
    using boost::math::quantile;
    p.low = successes == 0 ? 0.0 : quantile(beta_distribution<>(k, n - k + 1.0), alpha / 2.0);
    p.high = successes == trials ? 1.0 : quantile(beta_distribution<>(k + 1.0, n - k), 1.0 - alpha / 2.0);
    return p;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return 0.0;
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

}  // namespace treeglass
