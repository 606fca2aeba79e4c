#include "treeglass/electrical.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>

#include "treeglass/error.hpp"

namespace treeglass {

namespace {

void check_horizon(const Tree& t, unsigned n) {
    if (n < 1 || n > t.depth_limit()) {
        throw RangeError("horizon " + std::to_string(n) + " outside [1, " + std::to_string(t.depth_limit()) + "]");
    }
}

void check_conductances(const Tree& t, const EdgeWeights& cond) {
    if (cond.size() != t.size()) throw RangeError("conductance vector has the wrong size");
    for (EdgeId e : t.edges()) {
        if (!(cond[e] >= 0.0)) throw RangeError("conductance on edge " + std::to_string(e) + " is negative");
    }
}

// Series combination of an edge and the subtree below it. Works with
// infinite subtree conductance (1/inf = 0) and zero edge conductance.
double series(double c_edge, double c_below) {
    if (c_edge <= 0.0 || c_below <= 0.0) return 0.0;
    return 1.0 / (1.0 / c_edge + 1.0 / c_below);
}

}  // namespace

std::vector<double> subtree_conductances(const Tree& t, const EdgeWeights& cond, unsigned n) {
    check_horizon(t, n);
    check_conductances(t, cond);
    std::vector<double> C(t.size(), kUnbounded);
    const NodeId end = *t.level(n).begin();
    for (NodeId v = end; v-- > 0;) {
        double s = 0.0;
        for (NodeId c : t.children(v)) s += series(cond[c], C[c]);
        C[v] = s;
    }
    return C;
}

double effective_conductance(const Tree& t, const EdgeWeights& cond, unsigned n) {
    return subtree_conductances(t, cond, n)[Tree::root()];
}

double conductance_oracle(const Tree& t, const EdgeWeights& cond, unsigned n, std::size_t max_nodes) {
    check_horizon(t, n);
    check_conductances(t, cond);
    if (t.size() > max_nodes) {
        throw OverflowError("conductance oracle limited to " + std::to_string(max_nodes) + " nodes");
    }
    // Unknowns: nodes strictly between the root and V_n that the root reaches
    // through positive conductances.
    std::vector<int> index(t.size(), -1);
    std::vector<bool> connected(t.size(), false);
    connected[Tree::root()] = true;
    int unknowns = 0;
    for (NodeId v = 1; v < t.size() && t.depth(v) <= n; ++v) {
        connected[v] = connected[t.parent(v)] && cond[v] > 0.0;
        if (connected[v] && t.depth(v) < n) index[v] = unknowns++;
    }
    if (unknowns == 0) {
        double current = 0.0;
        for (NodeId c : t.children(Tree::root())) {
            if (connected[c] && t.depth(c) == n) current += cond[c];
        }
        return current;
    }

    // L V = b with the root at voltage 1 moved to the right-hand side.
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(unknowns);
    for (NodeId v = 1; v < t.size() && t.depth(v) <= n; ++v) {
        if (!connected[v]) continue;
        const double c = cond[v];
        const NodeId p = t.parent(v);
        const int iv = index[v];
        const int ip = index[p];
        if (iv >= 0) entries.emplace_back(iv, iv, c);
        if (ip >= 0) entries.emplace_back(ip, ip, c);
        if (iv >= 0 && ip >= 0) {
            entries.emplace_back(iv, ip, -c);
            entries.emplace_back(ip, iv, -c);
        }
        if (p == Tree::root() && iv >= 0) b[iv] += c;
    }
    Eigen::SparseMatrix<double> L(unknowns, unknowns);
    L.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
    if (solver.info() != Eigen::Success) throw Error("conductance oracle: factorization failed");
    const Eigen::VectorXd V = solver.solve(b);

    double current = 0.0;
    for (NodeId c : t.children(Tree::root())) {
        if (!connected[c]) continue;
        const double vc = index[c] >= 0 ? V[index[c]] : 0.0;
        current += cond[c] * (1.0 - vc);
    }
    return current;
}

double flow_energy(const Tree& t, const Flow& f, const EdgeWeights& cond) {
    check_conservation(t, f);
    double energy = 0.0;
    for (EdgeId e : t.edges()) {
        const double th = f.theta[e];
        if (th == 0.0) continue;
        if (!(cond[e] > 0.0)) throw FlowError("flow on zero-conductance edge " + std::to_string(e));
        energy += th * th / cond[e];
    }
    return energy;
}

Flow unit_current_flow(const Tree& t, const EdgeWeights& cond, unsigned n) {
    const auto C = subtree_conductances(t, cond, n);
    if (!(C[Tree::root()] > 0.0)) throw FlowError("no conducting path to the horizon");
    Flow f{EdgeWeights(t), n};
    std::vector<double> inflow(t.size(), 0.0);
    inflow[Tree::root()] = 1.0;
    const NodeId end = *t.level(n).begin();
    for (NodeId v = 0; v < end; ++v) {
        if (inflow[v] == 0.0 || !(C[v] > 0.0)) continue;
        for (NodeId c : t.children(v)) {
            f.theta[c] = inflow[v] * (series(cond[c], C[c]) / C[v]);
            inflow[c] = f.theta[c];
        }
    }
    return f;
}

std::string to_string(Recurrence r) {
    switch (r) {
        case Recurrence::recurrent:
            return "recurrent";
        case Recurrence::transient:
            return "transient";
        case Recurrence::inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

ConductanceReport classify_recurrence(const Tree& t, const std::vector<unsigned>& horizons,
                                      const ClassifierThresholds& thresholds) {
    if (horizons.empty()) throw RangeError("classifier needs at least one horizon");
    for (std::size_t i = 1; i < horizons.size(); ++i) {
        if (horizons[i] <= horizons[i - 1]) throw RangeError("horizons must increase");
    }
    ConductanceReport rep;
    rep.thresholds = thresholds;
    const EdgeWeights unit(t, 1.0);
    for (unsigned h : horizons) rep.rows.push_back({h, effective_conductance(t, unit, h)});

    const double last = rep.rows.back().conductance;
    rep.limit_estimate = last;
    if (rep.rows.size() >= 2) {
        const auto& a = rep.rows[rep.rows.size() - 2];
        const auto& b = rep.rows.back();
        const double doublings = std::log2(static_cast<double>(b.horizon) / a.horizon);
        rep.decrease_per_doubling =
            a.conductance > 0.0 ? 1.0 - std::pow(b.conductance / a.conductance, 1.0 / doublings) : 0.0;
    }
    if (rep.rows.size() >= 3) {
        // Aitken extrapolation when the tail looks geometric.
        const double x0 = rep.rows[rep.rows.size() - 3].conductance;
        const double x1 = rep.rows[rep.rows.size() - 2].conductance;
        const double x2 = last;
        const double denom = x2 - 2.0 * x1 + x0;
        if (denom > 0.0 && x1 >= x2) rep.limit_estimate = std::clamp(x2 - (x2 - x1) * (x2 - x1) / denom, 0.0, x2);
    }

    if (last < thresholds.recurrent_below) {
        rep.classification = Recurrence::recurrent;
    } else if (last > thresholds.transient_above && rep.rows.size() >= 2 &&
               rep.decrease_per_doubling < thresholds.max_decrease) {
        rep.classification = Recurrence::transient;
    } else {
        rep.classification = Recurrence::inconclusive;
    }
    return rep;
}

}  // namespace treeglass
