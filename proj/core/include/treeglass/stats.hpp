#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace treeglass {

/// Sample summary with a normal interval mean ± z·SE (z = 3 by default).
struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double min = 0.0;
    double q05 = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;
    double max = 0.0;
};

[[nodiscard]] Summary summarize(std::span<const double> xs, double z = 3.0);

/// Linear-interpolation quantile (type 7) of an ascending sample.
[[nodiscard]] double sorted_quantile(std::span<const double> sorted, double q);

struct Proportion {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double low = 0.0;
    double high = 1.0;
    double confidence = 0.0;
};

/// Exact (Clopper-Pearson) binomial interval. The default level matches a
/// two-sided 3σ normal interval.
[[nodiscard]] Proportion clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                                         double confidence = 0.9973002039367398);

/// Least-squares slope of log(y) against log(x); pairs with y <= 0 are skipped.
[[nodiscard]] double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace treeglass
