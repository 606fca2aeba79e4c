// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "treeglass/couplings.hpp"
#include "treeglass/electrical.hpp"
#include "treeglass/error.hpp"
#include "treeglass/flow_cut.hpp"
#include "treeglass/groundstate.hpp"
#include "treeglass/lab.hpp"

using namespace treeglass;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

std::string failed_flags(const ExperimentReport& rep) {
    std::string out;
    for (const auto& f : rep.flags) {
        if (!f.passed) out += (out.empty() ? "" : ",") + f.name;
    }
    for (const auto& [name, child] : rep.children) {
        if (!child.passed()) out += (out.empty() ? "" : ",") + name;
    }
    return out;
}

Outcome mfmc_oracle() {
    std::mt19937_64 gen(2024);
    int mismatches = 0, checks = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const Tree t = oracle::random_tree(gen, 1 + rep % 12);
        const EdgeWeights cap = oracle::random_weights(gen, t);
        for (unsigned n = 1; n <= t.depth_limit(); ++n) {
            ++checks;
            if (!rel_close(max_flow(t, cap, n), oracle::min_cut_exhaustive(t, cap, n), 1e-9)) ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(checks) + " (tree, horizon) pairs, " + std::to_string(mismatches) +
                                 " mismatches"};
}

Outcome property_suite() {
    std::mt19937_64 gen(99);
    int bad_scale = 0, bad_mono = 0, bad_trunc = 0, bad_kappa = 0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 500; ++rep) {
        const Tree t = oracle::random_tree(gen, 1 + rep % 60);
        const EdgeWeights cap = oracle::random_weights(gen, t, 0.0, 3.0);
        const unsigned n = 1 + static_cast<unsigned>(gen() % t.depth_limit());
        const double mf = max_flow(t, cap, n);

        const double lambda = 0.1 + 10.0 * u(gen);
        EdgeWeights scaled = cap;
        for (EdgeId e : t.edges()) scaled[e] *= lambda;
        if (!rel_close(max_flow(t, scaled, n), lambda * mf, 1e-12)) ++bad_scale;

        EdgeWeights bigger = cap;
        for (EdgeId e : t.edges()) bigger[e] += u(gen) < 0.3 ? u(gen) : 0.0;
        if (max_flow(t, bigger, n) < mf) ++bad_mono;

        EdgeWeights capped = cap;
        for (EdgeId e : t.edges()) capped[e] = std::min(cap[e], 1.0);
        if (max_flow(t, capped, n) < std::min(mf, 1.0) * (1 - 1e-12)) ++bad_trunc;

        if (!rel_close(max_flow(t, kappa_min_transform(t, cap), n), mf, 1e-12)) ++bad_kappa;
    }
    const bool ok = bad_scale + bad_mono + bad_trunc + bad_kappa == 0;
    return {ok, "500 instances; violations scaling=" + std::to_string(bad_scale) + " monotone=" +
                    std::to_string(bad_mono) + " truncation=" + std::to_string(bad_trunc) +
                    " kappa_min=" + std::to_string(bad_kappa)};
}

Outcome thm4_sandwich() {
    const auto rep = run_thm4_sandwich(default_config(ExperimentTag::thm4_sandwich));
    const auto& row = rep.results["horizons"][0];
    const double c = row["conductance"];
    const bool closed_form = rel_close(c, 256.0 / 255.0, 1e-12);
    const bool inside = row["ci_strictly_inside"];
    return {rep.passed() && closed_form && inside,
            "C_8=" + num(c) + " CI=[" + num(row["max_flow"]["ci_low"]) + ", " + num(row["max_flow"]["ci_high"]) +
                "] bracket=[" + num(c) + ", " + num(2 * c) + "]"};
}

Outcome halfline_exactness() {
    ExperimentConfig cfg = default_config(ExperimentTag::thm4_sandwich);
    cfg.tree = "halfline:10";
    cfg.horizons = {2, 5, 10};
    cfg.replicas = 100'000;
    const auto rep = run_thm4_sandwich(cfg);
    bool ok = true;
    std::string detail;
    for (const auto& row : rep.results["horizons"]) {
        const unsigned n = row["horizon"];
        const double mean = row["max_flow"]["mean"];
        const double se = row["max_flow"]["std_error"];
        const bool hit = std::abs(mean - 1.0 / n) <= 3.0 * se;
        ok = ok && hit;
        if (!detail.empty()) detail += ", ";
        detail += "n=" + std::to_string(n) + ": " + num(mean) + " vs " + num(1.0 / n) + (hit ? " ok" : " off");
    }
    return {ok, detail};
}

Outcome sec31() {
    const auto rep = run_sec31_count(default_config(ExperimentTag::sec31_count));
    const Flag* p = rep.find_flag("p_count_4");
    if (!p) return {false, "p_count_4 flag missing"};
    const bool ok = p->value >= 0.47 && p->value <= 0.53;
    return {ok, "P(|G|=4)=" + num(p->value) + " over 10^4 replicas at depth 200"};
}

Outcome sec32() {
    const auto rep = run_sec32_vanishing(default_config(ExperimentTag::sec32_vanishing));
    std::string detail = "flags " + std::to_string(rep.flags.size());
    const std::string bad = failed_flags(rep);
    if (!bad.empty()) detail += ", failing: " + bad;
    return {rep.passed(), detail};
}

Outcome ground_states() {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> dyadic(1, 4096);
    std::bernoulli_distribution coin(0.5);

    // (a) Dyadic couplings keep every partial sum exact, so equality is exact.
    int flip_bad = 0;
    for (int rep = 0; rep < 10'000; ++rep) {
        const Tree t = oracle::random_tree(gen, 1 + rep % 40);
        EdgeWeights j(t);
        for (EdgeId e : t.edges()) j[e] = (coin(gen) ? 1 : -1) * dyadic(gen) / 1024.0;
        SpinConfig s(t.size());
        for (auto& x : s.spin) x = coin(gen) ? 1 : -1;
        std::vector<NodeId> b;
        for (NodeId v = 0; v < t.size(); ++v) {
            if (coin(gen)) b.push_back(v);
        }
        const double lhs = hamiltonian(t, j, s.flipped_on(b), b) - hamiltonian(t, j, s, b);
        if (lhs != 2.0 * boundary_energy(t, j, s, b)) ++flip_bad;
    }

    // (b) Connected sets against every vertex subset.
    int subset_bad = 0;
    std::uniform_real_distribution<double> mag(0.1, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Tree t = oracle::random_tree(gen, 4 + rep % 10);
        EdgeWeights j(t);
        for (EdgeId e : t.edges()) j[e] = (coin(gen) ? 1 : -1) * mag(gen);
        SpinConfig s = natural_ground_state(t, j);
        if (rep % 2) s = defect_config(t, j, 1 + static_cast<EdgeId>(gen() % t.edge_count()));
        const bool truth = oracle::min_boundary_energy_all_subsets(t, j, s) >= 0.0;
        VerifyOptions all;
        all.k = t.size();
        if (verify_ground_state(t, j, s, all).pass != truth) ++subset_bad;
        if (verify_ground_state_exact(t, j, s).pass != truth) ++subset_bad;
    }

    // (c) Critical edges on transient binary trees.
    const Tree bin = generate(TreeSpec::b_ary(2, 10));
    VerifyOptions k6;
    k6.k = 6;
    int verified = 0, failed_verify = 0, not_distinct = 0, no_edge = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const EdgeWeights j = sample_couplings(bin, DistributionSpec::uniform(0, 1), seed);
        try {
            const auto edges = find_critical_edges(bin, j, 10, 3);
            std::set<EdgeId> distinct;
            for (const auto& ce : edges) {
                distinct.insert(ce.h);
                if (verify_ground_state(bin, j, defect_config(bin, j, ce.h), k6).pass) {
                    ++verified;
                } else {
                    ++failed_verify;
                }
            }
            if (distinct.size() != 3) ++not_distinct;
        } catch (const NoCriticalEdge&) {
            ++no_edge;
        }
    }
    const bool ok = flip_bad == 0 && subset_bad == 0 && failed_verify == 0 && not_distinct == 0 && no_edge == 0;
    return {ok, "flip mismatches=" + std::to_string(flip_bad) + " subset mismatches=" + std::to_string(subset_bad) +
                    " defects verified=" + std::to_string(verified) + " failed=" + std::to_string(failed_verify) +
                    " non-distinct=" + std::to_string(not_distinct) + " no-edge=" + std::to_string(no_edge)};
}

Outcome equivalence() {
    const auto rep = run_equivalence_scan(default_config(ExperimentTag::equivalence_scan));
    std::string detail = std::to_string(rep.children.size()) + " cells";
    const std::string bad = failed_flags(rep);
    if (!bad.empty()) detail += ", inconsistent: " + bad;
    return {rep.passed(), detail};
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "max-flow equals exhaustive min cut", 10, mfmc_oracle},
        {2, "flow property suite", 30, property_suite},
        {3, "conductance sandwich on the binary tree", 120, thm4_sandwich},
        {4, "half-line mean flow 1/n", 60, halfline_exactness},
        {5, "double half-line ground-state count", 120, sec31},
        {6, "cube-root law on the (n+1)^2 tree", 180, sec32},
        {7, "ground-state machinery", 300, ground_states},
        {8, "equivalence scan consistency", 600, equivalence},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs <= c.budget_s;
        const bool ok = out.passed && in_budget;
        all = all && ok;
        std::printf("criterion %d %s: %s (%s; %.1fs of %.0fs budget)\n", c.id, c.name.c_str(), ok ? "PASS" : "FAIL",
                    out.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
