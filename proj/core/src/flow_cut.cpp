#include "treeglass/flow_cut.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treeglass/error.hpp"

namespace treeglass {

namespace {

void check_horizon(const Tree& t, unsigned n) {
    if (n < 1 || n > t.depth_limit()) {
        throw RangeError("horizon " + std::to_string(n) + " outside [1, " + std::to_string(t.depth_limit()) + "]");
    }
}

}  // namespace

bool approx_equal(double a, double b, double rel_tol) noexcept {
    if (a == b) return true;  // also covers matching infinities
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::fabs(a - b) <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

double cutset_sum(const Cutset& c, const EdgeWeights& w) {
    double s = 0.0;
    for (EdgeId e : c.edges) s += w[e];
    return s;
}

// ---------------------------------------------------------------- max flow

void subtree_flows(const Tree& t, const EdgeWeights& cap, unsigned n, std::vector<double>& out) {
    check_horizon(t, n);
    out.assign(t.size(), kUnbounded);
    const NodeId end = *t.level(n).begin();
    for (NodeId v = end; v-- > 0;) {
        double f = 0.0;
        for (NodeId c : t.children(v)) f += std::min(cap[c], out[c]);
        out[v] = f;
    }
}

std::vector<double> subtree_flows(const Tree& t, const EdgeWeights& cap, unsigned n) {
    std::vector<double> out;
    subtree_flows(t, cap, n, out);
    return out;
}

double max_flow(const Tree& t, const EdgeWeights& cap, unsigned n, std::vector<double>& scratch) {
    subtree_flows(t, cap, n, scratch);
    return scratch[Tree::root()];
}

double max_flow(const Tree& t, const EdgeWeights& cap, unsigned n) {
    std::vector<double> scratch;
    return max_flow(t, cap, n, scratch);
}

double Flow::strength(const Tree& t) const {
    double s = 0.0;
    if (t.size() == 0) return s;
    for (NodeId c : t.children(Tree::root())) s += theta[c];
    return s;
}

Flow max_flow_witness(const Tree& t, const EdgeWeights& cap, unsigned n) {
    const auto F = subtree_flows(t, cap, n);
    if (!std::isfinite(F[Tree::root()])) throw FlowError("max flow is unbounded; no finite witness");
    Flow f{EdgeWeights(t), n};
    // inflow[v]: flow entering v, split over the children in proportion to
    // min(cap, F(child)) so no edge exceeds its capacity.
    std::vector<double> inflow(t.size(), 0.0);
    inflow[Tree::root()] = F[Tree::root()];
    const NodeId end = *t.level(n).begin();
    for (NodeId v = 0; v < end; ++v) {
        const double in = inflow[v];
        if (in <= 0.0 || F[v] <= 0.0) continue;
        if (std::isfinite(F[v])) {
            for (NodeId c : t.children(v)) {
                const double share = std::min(cap[c], F[c]);
                f.theta[c] = in * (share / F[v]);
                inflow[c] = f.theta[c];
            }
        } else {
            // Some child has an unbounded share; route everything through those.
            std::size_t k = 0;
            for (NodeId c : t.children(v)) k += std::isinf(std::min(cap[c], F[c])) ? 1 : 0;
            for (NodeId c : t.children(v)) {
                if (std::isinf(std::min(cap[c], F[c]))) {
                    f.theta[c] = in / static_cast<double>(k);
                    inflow[c] = f.theta[c];
                }
            }
        }
    }
    return f;
}

Cutset min_cut(const Tree& t, const EdgeWeights& cap, unsigned n) {
    const auto F = subtree_flows(t, cap, n);
    Cutset cut;
    cut.horizon = n;
    std::vector<NodeId> stack{Tree::root()};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId c : t.children(v)) {
            if (!t.reaches(c, n)) continue;
            if (cap[c] <= F[c]) {
                cut.edges.push_back(c);
            } else {
                stack.push_back(c);
            }
        }
    }
    std::sort(cut.edges.begin(), cut.edges.end());
    return cut;
}

EdgeWeights kappa_min_transform(const Tree& t, const EdgeWeights& cap) {
    EdgeWeights out = cap;
    for (EdgeId e : t.edges()) {
        const NodeId p = t.parent(e);
        if (p != Tree::root()) out[e] = std::min(out[e], out[p]);
    }
    return out;
}

double max_flow_forced(const Tree& t, const EdgeWeights& cap, std::span<const EdgeId> forced, unsigned n) {
    EdgeWeights c = cap;
    for (EdgeId e : forced) {
        if (e == 0 || e >= t.size()) throw RangeError("forced edge " + std::to_string(e) + " does not exist");
        c[e] = kUnbounded;
    }
    return max_flow(t, c, n);
}

// ---------------------------------------------------------------- decomposition

void check_conservation(const Tree& t, const Flow& f, double rel_tol) {
    check_horizon(t, f.horizon);
    if (f.theta.size() != t.size()) throw FlowError("flow has the wrong number of edges");
    for (EdgeId e : t.edges()) {
        if (!(f.theta[e] >= 0.0) || !std::isfinite(f.theta[e])) {
            throw FlowError("flow on edge " + std::to_string(e) + " is not a finite nonnegative number");
        }
        if (t.depth(e) > f.horizon && f.theta[e] != 0.0) {
            throw FlowError("flow on edge " + std::to_string(e) + " lies below the horizon");
        }
    }
    for (NodeId v = 1; v < t.size() && t.depth(v) < f.horizon; ++v) {
        double out = 0.0;
        for (NodeId c : t.children(v)) out += f.theta[c];
        const double in = f.theta[v];
        if (std::fabs(in - out) > rel_tol * std::max({1.0, in, out})) {
            throw FlowError("conservation fails at node " + std::to_string(v) + ": in " + std::to_string(in) +
                            ", out " + std::to_string(out));
        }
    }
}

PathMeasure decompose_flow(const Tree& t, const Flow& f) {
    check_conservation(t, f);
    double scale = 0.0;
    for (EdgeId e : t.edges()) scale = std::max(scale, f.theta[e]);
    // Residuals at or below this level are rounding debris from earlier peels.
    const double dust = 1e-14 * std::max(1.0, scale);

    std::vector<double> r(f.theta.values().begin(), f.theta.values().end());
    PathMeasure pm;
    std::vector<EdgeId> path;
    for (NodeId start : t.children(Tree::root())) {
        while (r[start] > dust) {
            path.assign(1, start);
            NodeId v = start;
            bool dead_end = false;
            while (t.depth(v) < f.horizon) {
                NodeId next = kNoNode;
                for (NodeId c : t.children(v)) {
                    if (r[c] > dust) {
                        next = c;
                        break;
                    }
                }
                if (next == kNoNode) {
                    dead_end = true;
                    break;
                }
                path.push_back(next);
                v = next;
            }
            if (dead_end) {
                // Only debris is left at v; drop it from v and its ancestors.
                const double debris = r[v];
                for (EdgeId e : path) r[e] = std::max(0.0, r[e] - debris);
                r[v] = 0.0;
                continue;
            }
            std::size_t arg = 0;
            for (std::size_t i = 1; i < path.size(); ++i) {
                if (r[path[i]] <= r[path[arg]]) arg = i;
            }
            const double alpha = r[path[arg]];
            for (EdgeId e : path) r[e] -= alpha;
            r[path[arg]] = 0.0;
            pm.paths.push_back({path, alpha});
        }
    }
    return pm;
}

EdgeWeights PathMeasure::edge_sums(const Tree& t) const {
    EdgeWeights s(t);
    for (const auto& p : paths) {
        for (EdgeId e : p.edges) s[e] += p.weight;
    }
    return s;
}

// ---------------------------------------------------------------- cutset functionals

CutFunctionalSpec CutFunctionalSpec::lambda_power(double lambda) {
    CutFunctionalSpec s;
    s.kind = Kind::lambda_power;
    s.lambda = lambda;
    return s;
}

CutFunctionalSpec CutFunctionalSpec::weight_seq(std::vector<double> omega) {
    CutFunctionalSpec s;
    s.kind = Kind::weight_seq;
    s.omega = std::move(omega);
    return s;
}

void CutFunctionalSpec::validate() const {
    switch (kind) {
        case Kind::lambda_power:
            if (!(lambda >= 1.0) || !std::isfinite(lambda)) throw RangeError("lambda must be >= 1");
            break;
        case Kind::inverse_depth:
            break;
        case Kind::weight_seq:
            for (double w : omega) {
                if (!(w >= 0.0)) throw RangeError("weight sequence must be nonnegative");
            }
            break;
    }
}

double CutFunctionalSpec::operator()(unsigned edge_depth) const {
    switch (kind) {
        case Kind::lambda_power:
            return std::pow(lambda, -static_cast<double>(edge_depth));
        case Kind::inverse_depth:
            return edge_depth == 0 ? kUnbounded : 1.0 / edge_depth;
        case Kind::weight_seq:
            if (edge_depth >= omega.size()) {
                throw RangeError("weight sequence has no entry for depth " + std::to_string(edge_depth));
            }
            return omega[edge_depth];
    }
    return 0.0;
}

namespace {

void check_window(const Tree& t, unsigned m, unsigned n) {
    if (m < 1 || m > n || n + 1 > t.depth_limit()) {
        throw RangeError("window [" + std::to_string(m) + ", " + std::to_string(n) + "] outside [1, " +
                         std::to_string(t.depth_limit() == 0 ? 0 : t.depth_limit() - 1) + "]");
    }
}

}  // namespace

double window_cut_min(const Tree& t, const EdgeWeights& cap, unsigned m, unsigned n) {
    check_window(t, m, n);
    EdgeWeights c(t, kUnbounded);
    for (EdgeId e : t.edges()) {
        const unsigned d = t.edge_depth(e);
        if (d >= m && d <= n) c[e] = cap[e];
    }
    return max_flow(t, c, n + 1);
}

double cutset_functional_min(const Tree& t, const CutFunctionalSpec& spec, unsigned m, unsigned n) {
    spec.validate();
    check_window(t, m, n);
    EdgeWeights cap(t, kUnbounded);
    for (EdgeId e : t.edges()) {
        const unsigned d = t.edge_depth(e);
        if (d >= m && d <= n) cap[e] = spec(d);
    }
    return max_flow(t, cap, n + 1);
}

BranchingEstimate branching_number_estimate(const Tree& t, const std::vector<double>& lambdas,
                                            const std::vector<unsigned>& horizons) {
    if (horizons.size() < 2) throw RangeError("branching estimate needs at least two horizons");
    for (std::size_t i = 1; i < horizons.size(); ++i) {
        if (horizons[i] <= horizons[i - 1]) throw RangeError("horizons must increase");
    }
    BranchingEstimate est;
    est.horizons = horizons;
    est.estimate = 0.0;
    for (double lambda : lambdas) {
        const auto spec = CutFunctionalSpec::lambda_power(lambda);
        BranchingRow row;
        row.lambda = lambda;
        for (unsigned h : horizons) row.values.push_back(cutset_functional_min(t, spec, 1, h));
        const double last = row.values.back();
        const double prev = row.values[row.values.size() - 2];
        const double span = horizons.back() - horizons[horizons.size() - 2];
        row.decay_rate = (prev > 0.0 && last > 0.0) ? std::pow(last / prev, 1.0 / span) : 0.0;
        row.decays = row.decay_rate < 1.0 - 1e-12;
        if (row.decays && !est.threshold_crossing) est.threshold_crossing = lambda;
        est.estimate = std::max(est.estimate, lambda * row.decay_rate);
        est.rows.push_back(std::move(row));
    }
    return est;
}

Cutset xi_map(const Tree& t, const EdgeWeights& cap, const Cutset& pi) {
    std::vector<bool> image(t.size(), false);
    for (EdgeId e : pi.edges) {
        // Walk up from e and keep the first strict improvement, so ties
        // resolve to the minimizer closest to e.
        EdgeId best = e;
        for (NodeId v = t.parent(e); v != Tree::root(); v = t.parent(v)) {
            if (cap[v] < cap[best]) best = v;
        }
        image[best] = true;
    }
    Cutset out;
    out.horizon = pi.horizon;
    std::vector<bool> covered(t.size(), false);
    for (NodeId v = 1; v < t.size(); ++v) {
        const bool above = covered[t.parent(v)];
        if (image[v] && !above) out.edges.push_back(v);
        covered[v] = above || image[v];
    }
    return out;
}

}  // namespace treeglass
