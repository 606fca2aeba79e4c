#include <doctest.h>

#include <cmath>
#include <vector>

#include "treeglass/error.hpp"
#include "treeglass/stats.hpp"

using namespace treeglass;

TEST_CASE("summary statistics") {
    const std::vector<double> xs{4, 1, 3, 2, 5};
    const Summary s = summarize(xs);
    CHECK(s.n == 5);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.stddev == doctest::Approx(std::sqrt(2.5)));
    CHECK(s.std_error == doctest::Approx(std::sqrt(0.5)));
    CHECK(s.ci_low == doctest::Approx(3.0 - 3.0 * std::sqrt(0.5)));
    CHECK(s.median == 3.0);
    CHECK(s.q25 == 2.0);
    CHECK(s.min == 1.0);
    CHECK(s.max == 5.0);
    CHECK(summarize(xs, 2.0).ci_high == doctest::Approx(3.0 + 2.0 * std::sqrt(0.5)));
    CHECK(summarize(std::vector<double>{}).n == 0);

    const std::vector<double> sorted{0, 10};
    CHECK(sorted_quantile(sorted, 0.3) == doctest::Approx(3.0));
}

TEST_CASE("Clopper-Pearson interval") {
    // Closed forms at the ends: (alpha/2)^(1/n) and 1 - (alpha/2)^(1/n).
    const auto none = clopper_pearson(0, 10, 0.95);
    CHECK(none.low == 0.0);
    CHECK(none.high == doctest::Approx(1.0 - std::pow(0.025, 0.1)));
    const auto all = clopper_pearson(10, 10, 0.95);
    CHECK(all.high == 1.0);
    CHECK(all.low == doctest::Approx(std::pow(0.025, 0.1)));

    const auto half = clopper_pearson(5000, 10000);
    CHECK(half.estimate == 0.5);
    CHECK(half.low < 0.5);
    CHECK(half.high > 0.5);
    CHECK(half.high - 0.5 == doctest::Approx(0.5 - half.low));
    CHECK(half.high - half.low == doctest::Approx(6.0 * 0.005).epsilon(0.01));

    CHECK_THROWS_AS((void)clopper_pearson(3, 2), RangeError);
    CHECK_THROWS_AS((void)clopper_pearson(0, 0), RangeError);
}

TEST_CASE("log-log slope") {
    const std::vector<double> x{1, 2, 4, 8};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 / std::sqrt(v));
    CHECK(log_log_slope(x, y) == doctest::Approx(-0.5));
    y[0] = 0.0;  // skipped
    CHECK(log_log_slope(x, y) == doctest::Approx(-0.5));
}
