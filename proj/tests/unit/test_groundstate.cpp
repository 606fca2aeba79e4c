#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "treeglass/couplings.hpp"
#include "treeglass/error.hpp"
#include "treeglass/flow_cut.hpp"
#include "treeglass/groundstate.hpp"

using namespace treeglass;

namespace {

EdgeWeights weights(const Tree& t, std::vector<double> values) {
    values.insert(values.begin(), 0.0);
    REQUIRE(values.size() == t.size());
    return EdgeWeights(std::move(values));
}

EdgeWeights random_signed(std::mt19937_64& gen, const Tree& t) {
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::bernoulli_distribution coin(0.5);
    EdgeWeights j(t);
    for (EdgeId e : t.edges()) j[e] = coin(gen) ? u(gen) : -u(gen);
    return j;
}

SpinConfig random_spins(std::mt19937_64& gen, const Tree& t) {
    std::bernoulli_distribution coin(0.5);
    SpinConfig s(t.size());
    for (auto& x : s.spin) x = coin(gen) ? 1 : -1;
    return s;
}

// The edges of each half-line hanging from v, top edge first.
std::vector<std::vector<EdgeId>> lines_below(const Tree& t, NodeId v, NodeId skip) {
    std::vector<std::vector<EdgeId>> out;
    for (NodeId c : t.children(v)) {
        if (c == skip) continue;
        std::vector<EdgeId> line{c};
        while (t.child_count(line.back()) == 1) line.push_back(*t.children(line.back()).begin());
        out.push_back(line);
    }
    return out;
}

// Double half-line with J_f at the center edge, 3.0 elsewhere, and one small
// coupling on the third edge of each of the four half-lines.
EdgeWeights dhl_couplings(const Tree& t, double jf, double root_a, double root_b, double far_a, double far_b) {
    const EdgeId f = double_halfline_center_edge();
    EdgeWeights j(t, 3.0);
    j[f] = jf;
    const auto root_lines = lines_below(t, Tree::root(), f);
    const auto far_lines = lines_below(t, f, kNoNode);
    REQUIRE(root_lines.size() == 2);
    REQUIRE(far_lines.size() == 2);
    j[root_lines[0][2]] = root_a;
    j[root_lines[1][2]] = root_b;
    j[far_lines[0][2]] = far_a;
    j[far_lines[1][2]] = far_b;
    return j;
}

}  // namespace

TEST_CASE("bond, Hamiltonian and boundary energies") {
    const Tree one = generate(TreeSpec::half_line(1));
    const EdgeWeights j1(one, 1.0);
    const SpinConfig up(one.size(), 1);
    const std::vector<NodeId> root{0};
    const std::vector<NodeId> leaf{1};
    CHECK(hamiltonian(one, j1, up, root) == -1.0);
    CHECK(hamiltonian(one, j1, up, leaf) == -1.0);
    CHECK(hamiltonian(one, j1, up, {}) == 0.0);

    const Tree star = generate(TreeSpec::star(3));
    const EdgeWeights js = weights(star, {1.0, -2.0, 0.5});
    const SpinConfig all(star.size(), 1);
    CHECK(hamiltonian(star, js, all, root) == doctest::Approx(0.5));
    CHECK(boundary_energy(star, js, all, root) == doctest::Approx(-0.5));

    const SpinConfig nat = natural_ground_state(star, js);
    std::mt19937_64 gen(2);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<NodeId> b;
        for (NodeId v = 0; v < star.size(); ++v) {
            if (gen() % 2) b.push_back(v);
        }
        CHECK(boundary_energy(star, js, nat, b) >= 0.0);
    }

    // The whole truncated tree has an empty boundary.
    const Tree bin = generate(TreeSpec::b_ary(2, 3));
    std::vector<NodeId> everything(bin.size());
    for (NodeId v = 0; v < bin.size(); ++v) everything[v] = v;
    CHECK(boundary_energy(bin, EdgeWeights(bin, 1.0), SpinConfig(bin.size(), 1), everything) == 0.0);
}

TEST_CASE("flip identity and additivity over components") {
    std::mt19937_64 gen(77);
    for (int rep = 0; rep < 200; ++rep) {
        const Tree t = oracle::random_tree(gen, 2 + rep % 25);
        const EdgeWeights j = random_signed(gen, t);
        const SpinConfig s = random_spins(gen, t);
        std::vector<bool> in(t.size(), false);
        std::vector<NodeId> b;
        for (NodeId v = 0; v < t.size(); ++v) {
            if (gen() % 3 == 0) {
                in[v] = true;
                b.push_back(v);
            }
        }
        const double flipped = hamiltonian(t, j, s.flipped_on(b), b);
        CHECK(flipped - hamiltonian(t, j, s, b) == doctest::Approx(2.0 * boundary_energy(t, j, s, b)));

        // Components of B: group members by their topmost ancestor inside B.
        std::vector<NodeId> top(t.size(), kNoNode);
        for (NodeId v : b) top[v] = (v != 0 && in[t.parent(v)]) ? top[t.parent(v)] : v;
        std::set<NodeId> tops;
        for (NodeId v : b) tops.insert(top[v]);
        double sum = 0.0;
        for (NodeId r : tops) {
            std::vector<NodeId> comp;
            for (NodeId v : b) {
                if (top[v] == r) comp.push_back(v);
            }
            sum += boundary_energy(t, j, s, comp);
        }
        CHECK(sum == doctest::Approx(boundary_energy(t, j, s, b)));
    }
}

TEST_CASE("natural and defect configurations") {
    const Tree p = generate(TreeSpec::half_line(2));
    CHECK(natural_ground_state(p, weights(p, {1.0, -1.0})).spin == std::vector<std::int8_t>{1, 1, -1});
    const Tree q = generate(TreeSpec::half_line(3));
    CHECK(defect_config(q, EdgeWeights(q, 1.0), 2).spin == std::vector<std::int8_t>{1, 1, -1, -1});
    CHECK_THROWS_AS((void)natural_ground_state(p, weights(p, {1.0, 0.0})), ZeroCouplingError);
    CHECK_THROWS_AS((void)defect_config(p, EdgeWeights(p, 1.0), 7), RangeError);

    std::mt19937_64 gen(5);
    for (int rep = 0; rep < 30; ++rep) {
        const Tree t = oracle::random_tree(gen, 3 + rep);
        const EdgeWeights j = random_signed(gen, t);
        const SpinConfig nat = natural_ground_state(t, j);
        CHECK(nat[0] == 1);
        CHECK(unsatisfied_edges(t, j, nat).empty());
        CHECK(verify_ground_state(t, j, nat).pass);
        CHECK(verify_ground_state(t, j, nat.flipped()).pass);
        for (EdgeId h : t.edges()) {
            CHECK(unsatisfied_edges(t, j, defect_config(t, j, h)) == std::vector<EdgeId>{h});
        }
    }
}

TEST_CASE("star with a frustrated hub") {
    const Tree star = generate(TreeSpec::star(3));
    const EdgeWeights js = weights(star, {1.0, -2.0, 0.5});
    VerifyOptions k1;
    k1.k = 1;
    const auto v = verify_ground_state(star, js, SpinConfig(star.size(), 1), k1);
    CHECK_FALSE(v.pass);
    CHECK(v.witness == std::vector<NodeId>{0});
    CHECK(v.witness_energy == doctest::Approx(-0.5));
    CHECK(v.k == 1);
    VerifyOptions k0;
    k0.k = 0;
    CHECK_THROWS_AS((void)verify_ground_state(star, js, SpinConfig(star.size(), 1), k0), RangeError);
}

TEST_CASE("connected-set verification agrees with all vertex subsets") {
    std::mt19937_64 gen(123);
    int failures = 0;
    for (int rep = 0; rep < 150; ++rep) {
        const Tree t = oracle::random_tree(gen, 2 + rep % 12);  // at most 14 vertices
        const EdgeWeights j = random_signed(gen, t);
        // Mostly-satisfied configurations so both verdicts occur.
        SpinConfig s = natural_ground_state(t, j);
        if (rep % 2) s = defect_config(t, j, 1 + gen() % t.edge_count());
        if (rep % 5 == 0) s = random_spins(gen, t);
        const double best = oracle::min_boundary_energy_all_subsets(t, j, s);
        VerifyOptions all;
        all.k = t.size();
        const auto enumerated = verify_ground_state(t, j, s, all);
        const auto exact = verify_ground_state_exact(t, j, s);
        CHECK(enumerated.pass == (best >= 0.0));
        CHECK(exact.pass == (best >= 0.0));
        if (!exact.pass) {
            ++failures;
            // The exact search returns the best connected set.
            const double connected = oracle::min_boundary_energy_all_subsets(t, j, s, true);
            CHECK(exact.witness_energy == doctest::Approx(connected));
            CHECK(boundary_energy(t, j, s, exact.witness) == doctest::Approx(connected));
            CHECK(boundary_energy(t, j, s, enumerated.witness) < 0.0);
        }
    }
    CHECK(failures > 10);
}

TEST_CASE("single-defect counts on the double half-line") {
    const Tree t = generate(TreeSpec::double_halfline(6));
    CountOptions exact;
    exact.core_depth = 1;
    CountOptions enumerative = exact;
    enumerative.k = 8;

    SUBCASE("both side sums exceed J_f") {
        const EdgeWeights j = dhl_couplings(t, 1.5, 1.0, 1.1, 1.1, 1.1);
        const auto c = count_single_defect_ground_states(t, j, exact);
        CHECK(c.count == 4);
        CHECK(c.defect_edges == std::vector<EdgeId>{double_halfline_center_edge()});
        CHECK(c.k == 0);
        CHECK(count_single_defect_ground_states(t, j, enumerative).count == 4);
    }
    SUBCASE("one side sum below J_f") {
        const EdgeWeights j = dhl_couplings(t, 2.5, 1.0, 1.05, 1.1, 1.1);
        CHECK(count_single_defect_ground_states(t, j, exact).count == 2);
        CHECK(count_single_defect_ground_states(t, j, enumerative).count == 2);
        const auto v = verify_ground_state_exact(t, j, defect_config(t, j, double_halfline_center_edge()));
        CHECK(v.witness_energy == doctest::Approx(2.05 - 2.5));
    }
    SUBCASE("a tie still counts") {
        const EdgeWeights j = dhl_couplings(t, 2.25, 1.0, 1.25, 1.25, 1.25);
        CHECK(count_single_defect_ground_states(t, j, exact).count == 4);
        CHECK(count_single_defect_ground_states(t, j, enumerative).count == 4);
    }
    CountOptions tiny;
    tiny.cap = 3;
    CHECK_THROWS_AS((void)count_single_defect_ground_states(t, EdgeWeights(t, 1.0), tiny), OverflowError);
}

TEST_CASE("exact defect test agrees with enumeration") {
    std::mt19937_64 gen(64);
    for (int rep = 0; rep < 60; ++rep) {
        const Tree t = oracle::random_tree(gen, 3 + rep % 11);
        const EdgeWeights j = random_signed(gen, t);
        const auto pass = defect_edges_passing(t, j);
        for (EdgeId h : t.edges()) {
            const double best = oracle::min_boundary_energy_all_subsets(t, j, defect_config(t, j, h));
            CHECK(pass[h] == (best >= 0.0));
        }
    }
}

TEST_CASE("critical edge on a hand example") {
    // Root children: 1 heads a strong path, 2 heads the path |J| = 0.5, 2, 1.
    TreeBuilder b;
    b.add_root();
    b.add_child(0);
    b.add_child(0);
    b.add_child(1);
    b.add_child(2);
    b.add_child(3);
    b.add_child(4);
    const Tree t = b.build();
    const EdgeWeights j = weights(t, {5.0, -0.5, 5.0, 2.0, 5.0, 1.0});
    const CriticalEdge ce = find_critical_edge(t, j, 3);
    CHECK(ce.h == 2);
    CHECK(ce.n_tilde == 1);
    CHECK(ce.new_root == 0);
    CHECK(ce.split_vertex == 0);
    CHECK(ce.t1_children == std::vector<NodeId>{1});
    CHECK(ce.t2_children == std::vector<NodeId>{2});
    CHECK(ce.mf0 == doctest::Approx(0.5));
    CHECK(ce.mf_n_tilde == doctest::Approx(1.0));
    CHECK(verify_ground_state_exact(t, j, defect_config(t, j, ce.h)).pass);

    const Tree line = generate(TreeSpec::half_line(4));
    CHECK_THROWS_AS((void)find_critical_edge(line, EdgeWeights(line, 1.0), 4), NoCriticalEdge);
    // The T2 side has no edge above the horizon.
    const Tree star = generate(TreeSpec::star(2));
    CHECK_THROWS_AS((void)find_critical_edge(star, EdgeWeights(star, 1.0), 1), NoCriticalEdge);
}

TEST_CASE("critical edges on random binary trees") {
    const Tree t = generate(TreeSpec::b_ary(2, 10));
    const auto dist = DistributionSpec::uniform(0, 1);
    VerifyOptions k6;
    k6.k = 6;
    int found = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const EdgeWeights j = sample_couplings(t, dist, seed);
        try {
            const auto edges = find_critical_edges(t, j, 10, 3);
            REQUIRE(edges.size() == 3);
            std::set<EdgeId> distinct;
            for (const auto& ce : edges) {
                distinct.insert(ce.h);
                // Path-minimum property on the T2 side of the split vertex.
                for (EdgeId e : path_to_root(t, ce.h)) {
                    if (t.depth(e) > t.depth(ce.split_vertex)) CHECK(std::abs(j[ce.h]) <= std::abs(j[e]));
                }
                CHECK(verify_ground_state(t, j, defect_config(t, j, ce.h), k6).pass);
            }
            CHECK(distinct.size() == 3);
            ++found;
        } catch (const NoCriticalEdge&) {
        }
    }
    CHECK(found >= 20);
}
