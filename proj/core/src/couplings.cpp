#include "treeglass/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treeglass/error.hpp"

namespace treeglass {

DistributionSpec DistributionSpec::exponential(double mean) {
    DistributionSpec d;
    d.family = DistFamily::exponential;
    d.a = mean;
    return d;
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
    DistributionSpec d;
    d.family = DistFamily::uniform;
    d.a = lo;
    d.b = hi;
    return d;
}

DistributionSpec DistributionSpec::cube_root() {
    DistributionSpec d;
    d.family = DistFamily::cube_root;
    d.a = 0.0;
    d.b = 1.0;
    return d;
}

DistributionSpec DistributionSpec::signed_variant(DistributionSpec base) {
    base.is_signed = true;
    return base;
}

void DistributionSpec::validate() const {
    switch (family) {
        case DistFamily::exponential:
            if (!(a > 0.0) || !std::isfinite(a)) throw ParseError("exponential mean must be positive");
            break;
        case DistFamily::uniform:
            if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ParseError("uniform needs a < b");
            if (is_signed && a < 0.0) throw ParseError("signed variant needs a nonnegative base law");
            break;
        case DistFamily::cube_root:
            break;
    }
}

std::string DistributionSpec::literal() const {
    std::ostringstream os;
    os.precision(17);
    if (is_signed) os << "signed:";
    switch (family) {
        case DistFamily::exponential:
            os << "exp:" << a;
            break;
        case DistFamily::uniform:
            os << "unif:" << a << ',' << b;
            break;
        case DistFamily::cube_root:
            os << "cuberoot";
            break;
    }
    return os.str();
}

DistributionSpec DistributionSpec::magnitude() const {
    DistributionSpec m = *this;
    m.is_signed = false;
    if (m.family == DistFamily::uniform && m.a < 0.0) {
        // |U(a,b)| with a < 0 is not uniform; only used where a >= 0 or via Monte Carlo.
        return *this;
    }
    return m;
}

namespace {

double base_quantile(const DistributionSpec& d, double p) {
    switch (d.family) {
        case DistFamily::exponential:
            return -d.a * std::log1p(-p);
        case DistFamily::uniform:
            return d.a + (d.b - d.a) * p;
        case DistFamily::cube_root:
            return p * p * p;
    }
    return 0.0;
}

// P(X < x) for the unsigned base law.
double base_cdf(const DistributionSpec& d, double x) {
    switch (d.family) {
        case DistFamily::exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-x / d.a);
        case DistFamily::uniform:
            return std::clamp((x - d.a) / (d.b - d.a), 0.0, 1.0);
        case DistFamily::cube_root:
            return x <= 0.0 ? 0.0 : std::cbrt(std::min(x, 1.0));
    }
    return 0.0;
}

}  // namespace

double QuantileFn::operator()(double p) const {
    if (!dist_.is_signed) return base_quantile(dist_, p);
    if (p < 0.5) return -base_quantile(dist_, 1.0 - 2.0 * p);
    return base_quantile(dist_, 2.0 * p - 1.0);
}

QuantileFn::SandwichCheck QuantileFn::check_sandwich(std::size_t points, double s_max) const {
    SandwichCheck out;
    for (std::size_t i = 1; i <= points; ++i) {
        double s = s_max * static_cast<double>(i) / static_cast<double>(points);
        if (s >= 1.0) s = std::nextafter(1.0, 0.0);
        const double q = (*this)(s);
        if (lambda_lo_ && *lambda_lo_ * s > q && out.lower_holds) {
            out.lower_holds = false;
            out.first_lower_failure = s;
        }
        if (lambda_hi_ && q > *lambda_hi_ * s && out.upper_holds) {
            out.upper_holds = false;
            out.first_upper_failure = s;
        }
    }
    return out;
}

bool QuantileFn::monotone_on_grid(std::size_t points) const {
    double prev = -INFINITY;
    for (std::size_t i = 1; i < points; ++i) {
        const double q = (*this)(static_cast<double>(i) / static_cast<double>(points));
        if (q < prev) return false;
        prev = q;
    }
    return true;
}

QuantileFn quantile(const DistributionSpec& dist) {
    dist.validate();
    return QuantileFn(dist);
}

double mass_near_zero(const DistributionSpec& dist, double eps) {
    dist.validate();
    if (dist.is_signed) return base_cdf(dist, eps);  // base law is nonnegative
    switch (dist.family) {
        case DistFamily::uniform: {
            const double lo = std::max(dist.a, -eps);
            const double hi = std::min(dist.b, eps);
            return hi > lo ? (hi - lo) / (dist.b - dist.a) : 0.0;
        }
        default:
            return base_cdf(dist, eps);
    }
}

double sample_one(const DistributionSpec& dist, const CounterRng& rng, std::uint64_t counter) {
    const double x = base_quantile(dist, rng.uniform(rng_stream::kMagnitude, counter));
    if (!dist.is_signed) return x;
    return (rng.bits(rng_stream::kSign, counter) & 1U) ? -x : x;
}

void sample_couplings_into(const DistributionSpec& dist, const CounterRng& rng, EdgeWeights& out) {
    for (std::size_t e = 1; e < out.size(); ++e) out[static_cast<EdgeId>(e)] = sample_one(dist, rng, e);
}

EdgeWeights sample_couplings(const Tree& t, const DistributionSpec& dist, const CounterRng& rng) {
    dist.validate();
    EdgeWeights w(t);
    sample_couplings_into(dist, rng, w);
    return w;
}

EdgeWeights sample_couplings(const Tree& t, const DistributionSpec& dist, std::uint64_t seed) {
    return sample_couplings(t, dist, CounterRng(seed));
}

LinearGrowthReport linear_growth_diagnostic(const DistributionSpec& dist, const std::vector<double>& eps_grid,
                                            double lower_bound, double upper_bound) {
    dist.validate();
    LinearGrowthReport r;
    r.lower_bound = lower_bound;
    r.upper_bound = upper_bound;
    double prev = INFINITY;
    for (double eps : eps_grid) {
        if (!(eps > 0.0 && eps <= 1.0)) throw RangeError("eps must lie in (0, 1]");
        if (!(eps < prev)) throw RangeError("eps grid must be strictly decreasing");
        prev = eps;
        const double ratio = mass_near_zero(dist, eps) / eps;
        r.rows.push_back({eps, ratio});
        r.lower_ok = r.lower_ok && ratio >= lower_bound;
        r.upper_ok = r.upper_ok && ratio <= upper_bound;
    }
    return r;
}

Estimate monte_carlo_path_minimum(const DistributionSpec& dist, unsigned m, std::uint64_t samples,
                                  std::uint64_t seed) {
    if (m < 1) throw RangeError("path length must be >= 1");
    if (samples < 2) throw RangeError("Monte Carlo needs at least 2 samples");
    dist.validate();
    const CounterRng rng(seed);
    // Welford accumulation keeps the variance stable for tiny minima.
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double lo = INFINITY;
        for (unsigned k = 0; k < m; ++k) lo = std::min(lo, std::fabs(sample_one(dist, rng, i * m + k)));
        const double delta = lo - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (lo - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples)), false, samples};
}

Estimate expected_path_minimum(const DistributionSpec& dist, unsigned m, std::uint64_t mc_samples,
                               std::uint64_t seed) {
    if (m < 1) throw RangeError("path length must be >= 1");
    dist.validate();
    switch (dist.family) {
        case DistFamily::exponential:
            return {dist.a / static_cast<double>(m), 0.0, true, 0};
        case DistFamily::cube_root: {
            const double v = 6.0 * std::exp(std::lgamma(m + 1.0) - std::lgamma(m + 4.0));
            return {v, 0.0, true, 0};
        }
        case DistFamily::uniform:
            break;
    }
    return monte_carlo_path_minimum(dist, m, mc_samples, seed);
}

}  // namespace treeglass
