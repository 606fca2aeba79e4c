#include "treeglass/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "treeglass/error.hpp"
#include "treeglass/flow_cut.hpp"

namespace treeglass {

// ---------------------------------------------------------------- configurations

SpinConfig SpinConfig::flipped() const {
    SpinConfig out = *this;
    for (auto& s : out.spin) s = static_cast<std::int8_t>(-s);
    return out;
}

SpinConfig SpinConfig::flipped_on(std::span<const NodeId> b) const {
    SpinConfig out = *this;
    for (NodeId v : b) out.spin[v] = static_cast<std::int8_t>(-out.spin[v]);
    return out;
}

double bond_energy(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma, EdgeId e) {
    return j[e] * sigma[e] * sigma[t.parent(e)];
}

double hamiltonian(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma, std::span<const NodeId> b) {
    std::vector<bool> in(t.size(), false);
    for (NodeId v : b) in[v] = true;
    double h = 0.0;
    for (EdgeId e : t.edges()) {
        if (in[e] || in[t.parent(e)]) h -= bond_energy(t, j, sigma, e);
    }
    return h;
}

double boundary_energy(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma, std::span<const NodeId> b) {
    double s = 0.0;
    for (EdgeId e : boundary_edges(t, b)) s += bond_energy(t, j, sigma, e);
    return s;
}

std::vector<EdgeId> unsatisfied_edges(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma) {
    std::vector<EdgeId> out;
    for (EdgeId e : t.edges()) {
        if (!(bond_energy(t, j, sigma, e) > 0.0)) out.push_back(e);
    }
    return out;
}

void check_nonzero_couplings(const Tree& t, const EdgeWeights& j) {
    if (j.size() != t.size()) throw RangeError("coupling vector has the wrong size");
    for (EdgeId e : t.edges()) {
        if (j[e] == 0.0) throw ZeroCouplingError("coupling on edge " + std::to_string(e) + " is zero");
    }
}

SpinConfig natural_ground_state(const Tree& t, const EdgeWeights& j) {
    check_nonzero_couplings(t, j);
    SpinConfig s(t.size(), 1);
    for (EdgeId e : t.edges()) {
        s.spin[e] = static_cast<std::int8_t>(j[e] > 0.0 ? s.spin[t.parent(e)] : -s.spin[t.parent(e)]);
    }
    return s;
}

SpinConfig defect_config(const Tree& t, const EdgeWeights& j, EdgeId h) {
    if (h == 0 || h >= t.size()) throw RangeError("unknown edge " + std::to_string(h));
    SpinConfig s = natural_ground_state(t, j);
    // Children follow parents in id order, so one sweep flips the subtree of h.
    std::vector<bool> below(t.size(), false);
    below[h] = true;
    s.spin[h] = static_cast<std::int8_t>(-s.spin[h]);
    for (NodeId v = h + 1; v < t.size(); ++v) {
        if (below[t.parent(v)]) {
            below[v] = true;
            s.spin[v] = static_cast<std::int8_t>(-s.spin[v]);
        }
    }
    return s;
}

// ---------------------------------------------------------------- verification

namespace {

std::vector<double> bond_energies(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma) {
    if (sigma.size() != t.size()) throw RangeError("spin configuration has the wrong size");
    std::vector<double> a(t.size(), 0.0);
    for (EdgeId e : t.edges()) a[e] = bond_energy(t, j, sigma, e);
    return a;
}

std::vector<bool> flippable(const Tree& t, bool fix_horizon) {
    std::vector<bool> ok(t.size(), true);
    if (fix_horizon) {
        for (NodeId v = 0; v < t.size(); ++v) ok[v] = t.depth(v) < t.depth_limit();
    }
    return ok;
}

// Same traversal as enumerate_connected_sets, carrying the boundary energy
// along: adding c turns its parent edge internal and its child edges into
// boundary edges.
struct FlipSetSearch {
    const Tree& t;
    const std::vector<double>& a;
    const std::vector<bool>& ok;
    std::size_t k;
    std::uint64_t cap;
    std::uint64_t checked = 0;
    std::vector<NodeId> set;
    double found_energy = 0.0;

    double children_sum(NodeId v) const {
        double s = 0.0;
        for (NodeId d : t.children(v)) s += a[d];
        return s;
    }

    bool grow(const std::vector<NodeId>& candidates, double energy) {
        if (++checked > cap) throw OverflowError("flip-set enumeration exceeds cap " + std::to_string(cap));
        if (energy < 0.0) {
            found_energy = energy;
            return true;
        }
        if (set.size() == k) return false;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const NodeId c = candidates[i];
            std::vector<NodeId> next(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end());
            for (NodeId d : t.children(c)) {
                if (ok[d]) next.push_back(d);
            }
            set.push_back(c);
            if (grow(next, energy - a[c] + children_sum(c))) return true;
            set.pop_back();
        }
        return false;
    }
};

}  // namespace

GroundStateVerdict verify_ground_state(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma,
                                       const VerifyOptions& opts) {
    if (opts.k < 1) throw RangeError("verification bound k must be >= 1");
    const auto a = bond_energies(t, j, sigma);
    const auto ok = flippable(t, opts.fix_horizon);
    FlipSetSearch search{t, a, ok, opts.k, opts.cap, 0, {}, 0.0};
    GroundStateVerdict v;
    v.k = opts.k;
    v.horizon = t.depth_limit();
    for (NodeId top = 0; top < t.size(); ++top) {
        if (!ok[top]) continue;
        std::vector<NodeId> candidates;
        for (NodeId d : t.children(top)) {
            if (ok[d]) candidates.push_back(d);
        }
        search.set.assign(1, top);
        const double e0 = (top == Tree::root() ? 0.0 : a[top]) + search.children_sum(top);
        if (search.grow(candidates, e0)) {
            v.pass = false;
            v.witness = search.set;
            v.witness_energy = search.found_energy;
            break;
        }
    }
    v.sets_checked = search.checked;
    return v;
}

GroundStateVerdict verify_ground_state_exact(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma,
                                             bool fix_horizon) {
    const auto a = bond_energies(t, j, sigma);
    const auto ok = flippable(t, fix_horizon);
    // down[v]: least boundary energy below v of a connected set with top v,
    // not counting the parent edge of v.
    std::vector<double> down(t.size(), 0.0);
    for (NodeId v = static_cast<NodeId>(t.size()); v-- > 0;) {
        if (!ok[v]) continue;
        double s = 0.0;
        for (NodeId c : t.children(v)) s += ok[c] ? std::min(a[c], down[c]) : a[c];
        down[v] = s;
    }
    GroundStateVerdict verdict;
    verdict.k = 0;
    verdict.horizon = t.depth_limit();
    NodeId best = kNoNode;
    double best_energy = 0.0;
    for (NodeId v = 0; v < t.size(); ++v) {
        if (!ok[v]) continue;
        const double e = down[v] + (v == Tree::root() ? 0.0 : a[v]);
        if (e < best_energy) {
            best_energy = e;
            best = v;
        }
    }
    if (best == kNoNode) return verdict;
    verdict.pass = false;
    verdict.witness_energy = best_energy;
    std::vector<NodeId> stack{best};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        verdict.witness.push_back(v);
        for (NodeId c : t.children(v)) {
            if (ok[c] && down[c] < a[c]) stack.push_back(c);
        }
    }
    std::sort(verdict.witness.begin(), verdict.witness.end());
    return verdict;
}

// ---------------------------------------------------------------- defect counting

std::vector<bool> defect_edges_passing(const Tree& t, const EdgeWeights& j) {
    check_nonzero_couplings(t, j);
    const auto ok = flippable(t, true);
    std::vector<double> w(t.size(), 0.0);
    for (EdgeId e : t.edges()) w[e] = std::fabs(j[e]);

    // contrib[c]: cheapest way to handle edge c from a set containing parent(c):
    // cut it, or extend the set into the subtree of c.
    std::vector<double> down(t.size(), 0.0);
    std::vector<double> contrib(t.size(), 0.0);
    for (NodeId v = static_cast<NodeId>(t.size()); v-- > 0;) {
        if (ok[v]) {
            double s = 0.0;
            for (NodeId c : t.children(v)) s += contrib[c];
            down[v] = s;
        }
        if (v != Tree::root()) contrib[v] = ok[v] ? std::min(w[v], down[v]) : w[v];
    }
    // sib[v]: Σ contrib over the siblings of v. up[v]: cheapest handling of
    // the parent edge of v from a set containing v but not its subtree's complement.
    std::vector<double> sib(t.size(), 0.0);
    std::vector<double> up(t.size(), 0.0);
    for (NodeId p = 0; p < t.size(); ++p) {
        for (NodeId v : t.children(p)) {
            double s = 0.0;
            for (NodeId c : t.children(p)) {
                if (c != v) s += contrib[c];
            }
            sib[v] = s;
            up[v] = std::min(w[v], s + up[p]);
        }
    }
    std::vector<bool> pass(t.size(), false);
    for (EdgeId h : t.edges()) {
        // Sets containing the lower end only pay at least down[h]; sets
        // containing the upper end only pay at least sib[h] + up[parent].
        const bool lower_ok = !ok[h] || w[h] <= down[h];
        const bool upper_ok = w[h] <= sib[h] + up[t.parent(h)];
        pass[h] = lower_ok && upper_ok;
    }
    return pass;
}

GroundStateCount count_single_defect_ground_states(const Tree& t, const EdgeWeights& j, const CountOptions& opts) {
    if (t.edge_count() > opts.cap) {
        throw OverflowError("tree has " + std::to_string(t.edge_count()) + " edges, cap is " + std::to_string(opts.cap));
    }
    check_nonzero_couplings(t, j);
    auto candidate = [&](EdgeId e) { return !opts.core_depth || t.edge_depth(e) < *opts.core_depth; };
    GroundStateCount out;
    if (!opts.k) {
        const auto pass = defect_edges_passing(t, j);
        for (EdgeId e : t.edges()) {
            if (candidate(e) && pass[e]) out.defect_edges.push_back(e);
        }
    } else {
        out.k = *opts.k;
        VerifyOptions vo;
        vo.k = *opts.k;
        vo.cap = opts.cap;
        for (EdgeId e : t.edges()) {
            if (!candidate(e)) continue;
            if (verify_ground_state(t, j, defect_config(t, j, e), vo).pass) out.defect_edges.push_back(e);
        }
    }
    out.count = 2 + 2 * static_cast<std::uint64_t>(out.defect_edges.size());
    return out;
}

// ---------------------------------------------------------------- critical edge

namespace {

CriticalEdge search_critical(const Tree& t, const EdgeWeights& cap, unsigned n, const std::vector<double>& F,
                             NodeId start, std::vector<NodeId> candidates) {
    auto share = [&](NodeId c) { return std::min(cap[c], F[c]); };
    NodeId x = start;
    std::vector<NodeId> positive;
    while (true) {
        positive.clear();
        for (NodeId c : candidates) {
            if (t.depth(c) <= n && share(c) > 0.0) positive.push_back(c);
        }
        if (positive.size() >= 2) break;
        if (positive.empty()) throw NoCriticalEdge("no vertex splits into two subtrees with positive flow");
        x = positive.front();
        if (t.depth(x) >= n) throw NoCriticalEdge("no branching before the horizon");
        candidates.assign(t.children(x).begin(), t.children(x).end());
    }

    // Greedy balancing by descending flow; the heavier group becomes T̃1.
    std::stable_sort(positive.begin(), positive.end(), [&](NodeId a, NodeId b) { return share(a) > share(b); });
    std::vector<NodeId> g1, g2;
    double s1 = 0.0, s2 = 0.0;
    for (NodeId c : positive) {
        if (s1 <= s2) {
            g1.push_back(c);
            s1 += share(c);
        } else {
            g2.push_back(c);
            s2 += share(c);
        }
    }
    if (s2 > s1) {
        std::swap(g1, g2);
        std::swap(s1, s2);
    }
    std::sort(g1.begin(), g1.end());
    std::sort(g2.begin(), g2.end());

    // φ: edges of T̃2 above the horizon layer, ordered by depth (node ids are
    // breadth-first). Dead edges never raise MF and are left out.
    std::vector<EdgeId> phi;
    std::vector<NodeId> stack(g2.begin(), g2.end());
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (t.depth(v) >= n || !t.reaches(v, n)) continue;
        phi.push_back(v);
        for (NodeId c : t.children(v)) stack.push_back(c);
    }
    std::sort(phi.begin(), phi.end());
    if (phi.empty()) throw NoCriticalEdge("the T2 side has no edge above the horizon");

    std::vector<double> scratch;
    auto mf = [&](std::size_t k) {
        EdgeWeights forced = cap;
        for (std::size_t i = 0; i < k; ++i) forced[phi[i]] = kUnbounded;
        subtree_flows(t, forced, n, scratch);
        double s = 0.0;
        for (NodeId c : g2) s += std::min(forced[c], scratch[c]);
        return s;
    };
    const double mf0 = s2;
    if (!(mf(phi.size()) > mf0)) {
        throw NoCriticalEdge("MF(n) does not exceed MF(0) = " + std::to_string(mf0) + " within the horizon");
    }
    // MF is nondecreasing in the number of forced edges: binary search for ñ.
    std::size_t lo = 1, hi = phi.size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (mf(mid) > mf0) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    CriticalEdge ce;
    ce.h = phi[lo - 1];
    ce.new_root = t.parent(ce.h);
    ce.split_vertex = x;
    for (NodeId c : candidates) {
        if (std::find(g2.begin(), g2.end(), c) == g2.end()) ce.t1_children.push_back(c);
    }
    ce.t2_children = g2;
    ce.n_tilde = lo;
    ce.mf0 = mf0;
    ce.mf_n_tilde = mf(lo);
    ce.horizon = n;
    return ce;
}

}  // namespace

std::vector<CriticalEdge> find_critical_edges(const Tree& t, const EdgeWeights& j, unsigned horizon, unsigned count) {
    if (horizon < 1 || horizon > t.depth_limit()) throw RangeError("horizon out of range");
    if (j.size() != t.size()) throw RangeError("coupling vector has the wrong size");
    const EdgeWeights cap = j.abs();
    const auto F = subtree_flows(t, cap, horizon);
    std::vector<CriticalEdge> out;
    NodeId start = Tree::root();
    std::vector<NodeId> candidates(t.children(start).begin(), t.children(start).end());
    for (unsigned i = 0; i < count; ++i) {
        out.push_back(search_critical(t, cap, horizon, F, start, candidates));
        start = out.back().split_vertex;
        candidates = out.back().t1_children;
    }
    return out;
}

CriticalEdge find_critical_edge(const Tree& t, const EdgeWeights& j, unsigned horizon) {
    return find_critical_edges(t, j, horizon, 1).front();
}

}  // namespace treeglass
