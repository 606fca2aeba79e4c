#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "treeglass/error.hpp"
#include "treeglass/flow_cut.hpp"

using namespace treeglass;

namespace {

EdgeWeights weights(const Tree& t, std::vector<double> values) {
    values.insert(values.begin(), 0.0);
    REQUIRE(values.size() == t.size());
    return EdgeWeights(std::move(values));
}

Tree path(unsigned n) { return generate(TreeSpec::half_line(n)); }

}  // namespace

TEST_CASE("max flow on small instances") {
    const Tree p = path(3);
    CHECK(max_flow(p, weights(p, {2.0, 0.5, 1.0}), 3) == doctest::Approx(0.5));
    const Tree b = generate(TreeSpec::b_ary(2, 2));
    CHECK(max_flow(b, EdgeWeights(b, 1.0), 2) == doctest::Approx(2.0));
    const Tree s = generate(TreeSpec::star(3));
    CHECK(max_flow(s, weights(s, {0.3, 0.4, 0.5}), 1) == doctest::Approx(1.2));
}

TEST_CASE("max flow equals the exhaustive cutset minimum") {
    std::mt19937_64 gen(21);
    for (int rep = 0; rep < 150; ++rep) {
        const Tree t = oracle::random_tree(gen, 1 + rep % 12);
        const EdgeWeights cap = oracle::random_weights(gen, t);
        for (unsigned n = 1; n <= t.depth_limit(); ++n) {
            const double brute = oracle::min_cut_exhaustive(t, cap, n);
            CHECK(max_flow(t, cap, n) == doctest::Approx(brute).epsilon(1e-12));
            const Cutset c = min_cut(t, cap, n);
            CHECK(validate_cutset(t, c));
            CHECK(cutset_sum(c, cap) == doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

TEST_CASE("min cut tie breaking prefers the shallow edge") {
    const Tree p = path(3);
    CHECK(min_cut(p, weights(p, {2.0, 0.5, 1.0}), 3).edges == std::vector<EdgeId>{2});
    const Tree q = path(2);
    CHECK(min_cut(q, weights(q, {1.0, 1.0}), 2).edges == std::vector<EdgeId>{1});
    const Tree b = generate(TreeSpec::b_ary(2, 2));
    CHECK(min_cut(b, EdgeWeights(b, 1.0), 2).edges == std::vector<EdgeId>{1, 2});
}

TEST_CASE("witness flows and decomposition") {
    std::mt19937_64 gen(4);
    for (int rep = 0; rep < 60; ++rep) {
        const Tree t = oracle::random_tree(gen, 2 + rep % 14);
        const EdgeWeights cap = oracle::random_weights(gen, t, 0.1, 2.0);
        const unsigned n = t.depth_limit();
        const Flow f = max_flow_witness(t, cap, n);
        check_conservation(t, f);
        CHECK(f.strength(t) == doctest::Approx(max_flow(t, cap, n)));
        for (EdgeId e : t.edges()) {
            CHECK(f.theta[e] <= cap[e] * (1 + 1e-12));
            CHECK(f.theta[e] <= f.strength(t) * (1 + 1e-12));
        }
        const PathMeasure pm = decompose_flow(t, f);
        const EdgeWeights sums = pm.edge_sums(t);
        for (EdgeId e : t.edges()) CHECK(sums[e] == doctest::Approx(f.theta[e]).epsilon(1e-9));
        for (const auto& path : pm.paths) {
            CHECK(path.weight > 0.0);
            CHECK(t.depth(path.edges.back()) == n);
        }
    }

    SUBCASE("hand examples") {
        const Tree p = path(3);
        const Flow unit{EdgeWeights(p, 1.0), 3};
        const auto pm = decompose_flow(p, unit);
        REQUIRE(pm.paths.size() == 1);
        CHECK(pm.paths[0].weight == doctest::Approx(1.0));

        const Tree b = generate(TreeSpec::b_ary(2, 1));
        const auto two = decompose_flow(b, {EdgeWeights(b, 1.0), 1});
        CHECK(two.paths.size() == 2);
    }
    SUBCASE("non-conserving flow is rejected") {
        const Tree p = path(2);
        CHECK_THROWS_AS(check_conservation(p, {weights(p, {1.0, 0.5}), 2}), FlowError);
        CHECK_THROWS_AS((void)decompose_flow(p, {weights(p, {1.0, 0.5}), 2}), FlowError);
    }
}

TEST_CASE("kappa-min transform") {
    const Tree p = path(3);
    CHECK(kappa_min_transform(p, weights(p, {2, 0.5, 1})) == weights(p, {2, 0.5, 0.5}));
    const Tree b = generate(TreeSpec::b_ary(2, 4));
    CHECK(kappa_min_transform(b, EdgeWeights(b, 3.0)) == EdgeWeights(b, 3.0));
    std::mt19937_64 gen(8);
    for (int rep = 0; rep < 20; ++rep) {
        const EdgeWeights cap = oracle::random_weights(gen, b);
        const EdgeWeights km = kappa_min_transform(b, cap);
        for (unsigned n = 1; n <= 4; ++n) CHECK(max_flow(b, km, n) == doctest::Approx(max_flow(b, cap, n)));
    }
}

TEST_CASE("forced edges") {
    const Tree p = path(3);
    const EdgeWeights cap = weights(p, {0.5, 2, 1});
    const std::vector<EdgeId> first{1};
    CHECK(max_flow_forced(p, cap, first, 3) == doctest::Approx(1.0));
    CHECK(max_flow_forced(p, cap, {}, 3) == doctest::Approx(0.5));
    const std::vector<EdgeId> all{1, 2, 3};
    CHECK(max_flow_forced(p, cap, all, 3) == kUnbounded);
    EdgeWeights inf = cap;
    for (EdgeId e : all) inf[e] = kUnbounded;
    CHECK_THROWS_AS((void)max_flow_witness(p, inf, 3), FlowError);
}

TEST_CASE("window cuts match exhaustive search") {
    std::mt19937_64 gen(13);
    int checked = 0;
    for (int rep = 0; rep < 200 && checked < 80; ++rep) {
        const Tree t = oracle::random_tree(gen, 3 + rep % 10);
        if (t.depth_limit() < 3) continue;
        const EdgeWeights cap = oracle::random_weights(gen, t);
        for (unsigned m = 1; m + 1 < t.depth_limit(); ++m) {
            for (unsigned n = m; n + 1 <= t.depth_limit(); ++n) {
                CHECK(window_cut_min(t, cap, m, n) ==
                      doctest::Approx(oracle::window_cut_exhaustive(t, cap, m, n)).epsilon(1e-12));
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("cutset functionals") {
    const Tree b = generate(TreeSpec::b_ary(2, 8));
    for (unsigned n = 1; n < 7; ++n) {
        CHECK(cutset_functional_min(b, CutFunctionalSpec::lambda_power(2.0), n, n) == doctest::Approx(2.0));
    }
    const Tree s = generate(TreeSpec::square_profile(12));
    for (unsigned n = 1; n < 11; ++n) {
        const double level = (n + 1.0) * (n + 1.0) / n;
        CHECK(cutset_functional_min(s, CutFunctionalSpec::inverse_depth(), n, n) == doctest::Approx(level));
        CHECK(cutset_functional_min(s, CutFunctionalSpec::inverse_depth(), 1, n) <= level + 1e-12);
        std::vector<double> omega(12, 0.0);
        for (unsigned k = 1; k < 12; ++k) omega[k] = 6.0 / (k * k * k);
        CHECK(cutset_functional_min(s, CutFunctionalSpec::weight_seq(omega), n, n) ==
              doctest::Approx(6.0 * (n + 1) * (n + 1) / (n * n * n)));
    }
    CHECK_THROWS_AS((void)cutset_functional_min(b, CutFunctionalSpec::inverse_depth(), 0, 3), RangeError);
    CHECK_THROWS_AS((void)cutset_functional_min(b, CutFunctionalSpec::inverse_depth(), 2, 8), RangeError);
}

TEST_CASE("branching number estimates") {
    const std::vector<double> lambdas{1.05, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 3.0};
    const auto bin = branching_number_estimate(generate(TreeSpec::b_ary(2, 13)), lambdas, {6, 12});
    CHECK(bin.estimate == doctest::Approx(2.0).epsilon(0.05));
    REQUIRE(bin.threshold_crossing);
    CHECK(*bin.threshold_crossing >= 2.0);
    CHECK(*bin.threshold_crossing <= 2.25);

    const auto line = branching_number_estimate(generate(TreeSpec::half_line(65)), lambdas, {32, 64});
    CHECK(line.estimate == doctest::Approx(1.0).epsilon(0.02));

    const auto sq = branching_number_estimate(generate(TreeSpec::square_profile(65)), lambdas, {32, 64});
    CHECK(sq.estimate < 1.15);
}

TEST_CASE("xi map") {
    const Tree p = path(3);
    const EdgeWeights cap = weights(p, {2, 0.5, 1});
    CHECK(xi_map(p, cap, {{3}, 3}).edges == std::vector<EdgeId>{2});

    const Tree b = generate(TreeSpec::b_ary(2, 3));
    const Cutset lvl = level_cutset(b, 2);
    CHECK(xi_map(b, EdgeWeights(b, 1.0), lvl).edges == lvl.edges);

    std::mt19937_64 gen(31);
    for (int rep = 0; rep < 30; ++rep) {
        const Tree t = oracle::random_tree(gen, 3 + rep % 8);
        const EdgeWeights c = oracle::random_weights(gen, t);
        const EdgeWeights km = kappa_min_transform(t, c);
        enumerate_min_cutsets(t, t.depth_limit(), [&](const Cutset& pi) {
            const Cutset image = xi_map(t, c, pi);
            CHECK(validate_cutset(t, image));
            CHECK(cutset_sum(image, c) <= cutset_sum(pi, km) + 1e-12);
        });
    }
}
