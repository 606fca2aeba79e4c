#pragma once

#include <string>
#include <vector>

#include "treeglass/flow_cut.hpp"
#include "treeglass/tree.hpp"

namespace treeglass {

/// Effective conductance between the root and V_n by the series/parallel
/// recursion C(v) = Σ 1/(1/c_e + 1/C(child)), C = +inf on V_n. Branches that
/// die before depth n contribute 0.
[[nodiscard]] double effective_conductance(const Tree& t, const EdgeWeights& cond, unsigned n);

/// Per-node subtree conductances C(v) towards V_n (kUnbounded on and below V_n).
[[nodiscard]] std::vector<double> subtree_conductances(const Tree& t, const EdgeWeights& cond, unsigned n);

/// Independent check: solves the Dirichlet problem V(root) = 1, V = 0 on V_n
/// with a sparse Cholesky factorization and returns the current leaving the
/// root. Throws OverflowError above `max_nodes`.
[[nodiscard]] double conductance_oracle(const Tree& t, const EdgeWeights& cond, unsigned n,
                                        std::size_t max_nodes = 10'000);

/// Σ θ(e)^2 / c_e. Throws FlowError for a non-conserving flow or θ > 0 on a
/// zero-conductance edge.
[[nodiscard]] double flow_energy(const Tree& t, const Flow& f, const EdgeWeights& cond);

/// The unit current flow from the root to V_n (the energy minimizer).
[[nodiscard]] Flow unit_current_flow(const Tree& t, const EdgeWeights& cond, unsigned n);

enum class Recurrence { recurrent, transient, inconclusive };
[[nodiscard]] std::string to_string(Recurrence r);

struct ClassifierThresholds {
    double recurrent_below = 1e-4;  // θ_r
    double transient_above = 1e-2;  // θ_t
    double max_decrease = 0.01;     // δ, relative decrease of C per doubling of n
};

struct ConductanceRow {
    unsigned horizon = 0;
    double conductance = 0.0;
};

struct ConductanceReport {
    std::vector<ConductanceRow> rows;
    double limit_estimate = 0.0;
    /// Relative decrease of C per doubling of the horizon, from the last two rows.
    double decrease_per_doubling = 0.0;
    Recurrence classification = Recurrence::inconclusive;
    ClassifierThresholds thresholds;
};

/// Unit-conductance C_n over the given increasing horizons, classified as
/// recurrent (last C_n < θ_r), transient (last C_n > θ_t and decrease per
/// doubling < δ) or inconclusive.
[[nodiscard]] ConductanceReport classify_recurrence(const Tree& t, const std::vector<unsigned>& horizons,
                                                    const ClassifierThresholds& thresholds = {});

}  // namespace treeglass
