#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treeglass/rng.hpp"
#include "treeglass/tree.hpp"

namespace treeglass {

enum class DistFamily { exponential, uniform, cube_root };

/// Coupling law. A signed variant flips the sign of a nonnegative base law
/// with probability 1/2, so it never puts mass on 0.
struct DistributionSpec {
    DistFamily family = DistFamily::exponential;
    double a = 1.0;  // exponential: mean; uniform: lower end
    double b = 0.0;  // uniform: upper end
    bool is_signed = false;

    static DistributionSpec exponential(double mean = 1.0);
    static DistributionSpec uniform(double lo, double hi);
    /// Law on [0,1] with CDF x^(1/3).
    static DistributionSpec cube_root();
    static DistributionSpec signed_variant(DistributionSpec base);

    /// Throws ParseError on invalid parameters.
    void validate() const;
    /// Literal form accepted by parse_distribution (e.g. "signed:unif:0,1").
    [[nodiscard]] std::string literal() const;
    /// The law of |X|.
    [[nodiscard]] DistributionSpec magnitude() const;

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

/// Generalized inverse of the CDF, Q(p) = inf{x : p <= F(x)}, with optional
/// linear sandwich constants lambda_lo * s <= Q(s) <= lambda_hi * s.
class QuantileFn {
public:
    explicit QuantileFn(DistributionSpec dist) : dist_(dist) {}

    [[nodiscard]] double operator()(double p) const;
    [[nodiscard]] const DistributionSpec& distribution() const noexcept { return dist_; }

    void set_sandwich(double lambda_lo, double lambda_hi) {
        lambda_lo_ = lambda_lo;
        lambda_hi_ = lambda_hi;
    }
    [[nodiscard]] std::optional<double> lambda_lo() const noexcept { return lambda_lo_; }
    [[nodiscard]] std::optional<double> lambda_hi() const noexcept { return lambda_hi_; }

    struct SandwichCheck {
        bool lower_holds = true;  // lambda_lo * s <= Q(s) everywhere on the grid
        bool upper_holds = true;  // Q(s) <= lambda_hi * s everywhere on the grid
        std::optional<double> first_lower_failure;
        std::optional<double> first_upper_failure;
        [[nodiscard]] bool holds() const noexcept { return lower_holds && upper_holds; }
    };
    /// Checks the sandwich on `points` evenly spaced s in (0, s_max].
    /// Unset constants are treated as satisfied.
    [[nodiscard]] SandwichCheck check_sandwich(std::size_t points = 10'000, double s_max = 1.0) const;

    /// True when Q is nondecreasing on `points` evenly spaced p in (0,1).
    [[nodiscard]] bool monotone_on_grid(std::size_t points = 10'000) const;

private:
    DistributionSpec dist_;
    std::optional<double> lambda_lo_;
    std::optional<double> lambda_hi_;
};

[[nodiscard]] QuantileFn quantile(const DistributionSpec& dist);

/// nu((-eps, eps)), exact for every supported family.
[[nodiscard]] double mass_near_zero(const DistributionSpec& dist, double eps);

/// One draw: the value is a pure function of (rng key, counter).
[[nodiscard]] double sample_one(const DistributionSpec& dist, const CounterRng& rng, std::uint64_t counter);

/// I.i.d. couplings, one per edge; the value on edge e depends only on (seed, e).
[[nodiscard]] EdgeWeights sample_couplings(const Tree& t, const DistributionSpec& dist, std::uint64_t seed);
[[nodiscard]] EdgeWeights sample_couplings(const Tree& t, const DistributionSpec& dist, const CounterRng& rng);
/// Same draws as sample_couplings, written into an existing buffer.
void sample_couplings_into(const DistributionSpec& dist, const CounterRng& rng, EdgeWeights& out);

struct LinearGrowthRow {
    double eps = 0.0;
    double ratio = 0.0;  // nu((-eps,eps)) / eps
};

struct LinearGrowthReport {
    std::vector<LinearGrowthRow> rows;
    double lower_bound = 0.1;
    double upper_bound = 10.0;
    bool lower_ok = true;  // every ratio >= lower_bound
    bool upper_ok = true;  // every ratio <= upper_bound
    [[nodiscard]] bool linear_growth() const noexcept { return lower_ok && upper_ok; }
};

/// Tabulates nu((-eps,eps))/eps and flags whether it stays inside
/// [lower_bound, upper_bound]. The grid must be decreasing and inside (0,1].
[[nodiscard]] LinearGrowthReport linear_growth_diagnostic(const DistributionSpec& dist,
                                                          const std::vector<double>& eps_grid,
                                                          double lower_bound = 0.1, double upper_bound = 10.0);

/// Point estimate with its standard error; `exact` estimates have zero error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = false;
    std::uint64_t samples = 0;
};

/// E[min of m i.i.d. draws of |X|]. Closed forms for the exponential law
/// (mean/m) and the cube-root law (6 Gamma(m+1) / Gamma(m+4)); Monte Carlo
/// with `mc_samples` draws otherwise.
[[nodiscard]] Estimate expected_path_minimum(const DistributionSpec& dist, unsigned m,
                                             std::uint64_t mc_samples = 200'000, std::uint64_t seed = 1);

/// Plain Monte Carlo estimate of E[min of m draws of |X|].
[[nodiscard]] Estimate monte_carlo_path_minimum(const DistributionSpec& dist, unsigned m, std::uint64_t samples,
                                                std::uint64_t seed);

}  // namespace treeglass
