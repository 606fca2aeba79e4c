#include <doctest.h>

#include <cmath>

#include "treeglass/couplings.hpp"
#include "treeglass/error.hpp"
#include "treeglass/io.hpp"

using namespace treeglass;

TEST_CASE("quantile functions") {
    const auto u = quantile(DistributionSpec::uniform(0, 1));
    const auto c = quantile(DistributionSpec::cube_root());
    const auto e = quantile(DistributionSpec::exponential(1));
    for (double s : {0.01, 0.2, 0.5, 0.9}) {
        CHECK(u(s) == doctest::Approx(s));
        CHECK(c(s) == doctest::Approx(s * s * s));
    }
    CHECK(e(0.5) == doctest::Approx(std::log(2.0)));
    CHECK(quantile(DistributionSpec::uniform(1, 3))(0.25) == doctest::Approx(1.5));
    CHECK(e.monotone_on_grid());
    CHECK(quantile(DistributionSpec::signed_variant(DistributionSpec::uniform(0, 1))).monotone_on_grid());
}

TEST_CASE("quantile sandwich") {
    auto u = quantile(DistributionSpec::uniform(0, 2));
    u.set_sandwich(1.0, 3.0);
    CHECK(u.check_sandwich().holds());
    auto c = quantile(DistributionSpec::cube_root());
    c.set_sandwich(0.5, 2.0);
    const auto r = c.check_sandwich();
    CHECK_FALSE(r.lower_holds);  // s^3 falls below s/2 near zero
    CHECK(r.upper_holds);
    CHECK(r.first_lower_failure.has_value());
}

TEST_CASE("samplers") {
    const CounterRng rng(17);
    const int n = 100'000;
    double mean = 0.0;
    int below = 0;
    bool in_range = true;
    int negative = 0;
    for (int i = 0; i < n; ++i) {
        mean += sample_one(DistributionSpec::exponential(1), rng, i) / n;
        below += sample_one(DistributionSpec::cube_root(), rng, i) <= 0.125;
        const double x = sample_one(DistributionSpec::uniform(1, 3), rng, i);
        in_range = in_range && x > 1.0 && x < 3.0;
        negative += sample_one(DistributionSpec::signed_variant(DistributionSpec::uniform(1, 3)), rng, i) < 0.0;
    }
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(below / double(n) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(in_range);
    CHECK(negative / double(n) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("coupling draws depend only on (seed, edge)") {
    const Tree small = generate(TreeSpec::b_ary(2, 3));
    const Tree big = generate(TreeSpec::b_ary(2, 5));
    const auto d = DistributionSpec::signed_variant(DistributionSpec::exponential(2));
    const auto a = sample_couplings(small, d, 99);
    const auto b = sample_couplings(big, d, 99);
    for (EdgeId e : small.edges()) CHECK(a[e] == b[e]);
    const auto c = sample_couplings(small, d, 100);
    CHECK(a != c);
    EdgeWeights into(small);
    sample_couplings_into(d, CounterRng(99), into);
    CHECK(into == a);
}

TEST_CASE("mass near zero and the linear growth diagnostic") {
    CHECK(mass_near_zero(DistributionSpec::uniform(-1, 1), 0.5) == doctest::Approx(0.5));
    CHECK(mass_near_zero(DistributionSpec::cube_root(), 0.001) == doctest::Approx(0.1));
    CHECK(mass_near_zero(DistributionSpec::uniform(1, 3), 0.5) == 0.0);
    const std::vector<double> grid{1.0, 0.1, 0.01, 0.001, 1e-4};

    const auto lin = linear_growth_diagnostic(DistributionSpec::uniform(-1, 1), grid);
    CHECK(lin.linear_growth());
    for (const auto& row : lin.rows) CHECK(row.ratio == doctest::Approx(1.0));

    const auto cube = linear_growth_diagnostic(DistributionSpec::cube_root(), grid);
    CHECK_FALSE(cube.upper_ok);
    CHECK(cube.rows.back().ratio == doctest::Approx(std::pow(1e-4, -2.0 / 3.0)));

    const auto gap = linear_growth_diagnostic(DistributionSpec::uniform(1, 3), {0.5, 0.1});
    CHECK_FALSE(gap.lower_ok);

    CHECK(linear_growth_diagnostic(DistributionSpec::exponential(1), grid).linear_growth());
}

TEST_CASE("expected path minimum") {
    CHECK(expected_path_minimum(DistributionSpec::exponential(1), 2).value == doctest::Approx(0.5));
    CHECK(expected_path_minimum(DistributionSpec::cube_root(), 1).value == doctest::Approx(0.25));
    CHECK(expected_path_minimum(DistributionSpec::cube_root(), 5).value == doctest::Approx(1.0 / 56.0));
    const auto u = expected_path_minimum(DistributionSpec::uniform(0, 1), 1, 400'000);
    CHECK_FALSE(u.exact);
    CHECK(std::abs(u.value - 0.5) < 4 * u.std_error);
    // min of m uniforms has mean 1/(m+1)
    const auto u4 = monte_carlo_path_minimum(DistributionSpec::uniform(0, 1), 4, 400'000, 3);
    CHECK(std::abs(u4.value - 0.2) < 4 * u4.std_error);
}

TEST_CASE("distribution literals") {
    CHECK(parse_distribution("exp:2.5") == DistributionSpec::exponential(2.5));
    CHECK(parse_distribution("unif:1,3") == DistributionSpec::uniform(1, 3));
    CHECK(parse_distribution("cuberoot") == DistributionSpec::cube_root());
    CHECK(parse_distribution("signed:unif:0,1") ==
          DistributionSpec::signed_variant(DistributionSpec::uniform(0, 1)));
    const auto d = DistributionSpec::signed_variant(DistributionSpec::exponential(1));
    CHECK(parse_distribution(d.literal()) == d);
    CHECK_THROWS_AS((void)parse_distribution("unif:3,1"), ParseError);
    CHECK_THROWS_AS((void)parse_distribution("gauss:0,1"), ParseError);
    CHECK_THROWS_AS((void)parse_distribution("signed:unif:-1,1"), ParseError);
}
