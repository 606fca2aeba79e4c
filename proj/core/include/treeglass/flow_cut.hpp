#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "treeglass/tree.hpp"

namespace treeglass {

/// Capacity and flow value standing for +infinity. It propagates through the
/// min/sum recursions without overflow; an infinite max-flow means unbounded.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Default relative tolerance for comparing flow values.
inline constexpr double kRelTol = 1e-9;

[[nodiscard]] bool approx_equal(double a, double b, double rel_tol = kRelTol) noexcept;

/// Edge flow from the root to level `horizon`.
struct Flow {
    EdgeWeights theta;
    unsigned horizon = 0;

    /// Net flow out of the root.
    [[nodiscard]] double strength(const Tree& t) const;
};

/// Throws FlowError when θ is negative somewhere or inflow != outflow (up to
/// rel_tol) at a vertex strictly between the root and the horizon.
void check_conservation(const Tree& t, const Flow& f, double rel_tol = kRelTol);

struct PathMeasure {
    struct Path {
        std::vector<EdgeId> edges;  // root edge first
        double weight = 0.0;
    };
    std::vector<Path> paths;

    /// Σ over paths through e of their weight, for every edge.
    [[nodiscard]] EdgeWeights edge_sums(const Tree& t) const;
};

/// F(v): max flow from v into level n inside the subtree of v, for every node
/// of depth <= n (deeper nodes hold kUnbounded). F = +inf on level n and 0 at
/// leaves above it.
[[nodiscard]] std::vector<double> subtree_flows(const Tree& t, const EdgeWeights& cap, unsigned n);
/// Same, reusing `out` as storage.
void subtree_flows(const Tree& t, const EdgeWeights& cap, unsigned n, std::vector<double>& out);

/// Max flow from the root to V_n; kUnbounded when no finite cutset exists.
[[nodiscard]] double max_flow(const Tree& t, const EdgeWeights& cap, unsigned n);
/// Allocation-free variant for Monte Carlo loops.
[[nodiscard]] double max_flow(const Tree& t, const EdgeWeights& cap, unsigned n, std::vector<double>& scratch);

/// A flow of maximal strength. Throws FlowError when the max flow is unbounded.
[[nodiscard]] Flow max_flow_witness(const Tree& t, const EdgeWeights& cap, unsigned n);

/// Minimum cutset; on ties the shallower edge is cut.
[[nodiscard]] Cutset min_cut(const Tree& t, const EdgeWeights& cap, unsigned n);

/// κ^min_e = min of cap over the root path of e.
[[nodiscard]] EdgeWeights kappa_min_transform(const Tree& t, const EdgeWeights& cap);

/// Splits a conserving flow into weighted root-to-horizon paths by repeated
/// peeling of the bottleneck. Throws FlowError on non-conserving input.
[[nodiscard]] PathMeasure decompose_flow(const Tree& t, const Flow& f);

/// Max flow with the capacities of `forced` raised to +inf.
[[nodiscard]] double max_flow_forced(const Tree& t, const EdgeWeights& cap, std::span<const EdgeId> forced, unsigned n);

/// min Σ cap over cutsets made of edges with m <= |e| <= n (horizon n + 1).
[[nodiscard]] double window_cut_min(const Tree& t, const EdgeWeights& cap, unsigned m, unsigned n);

/// Per-edge value of a cutset functional, as a function of the edge depth.
struct CutFunctionalSpec {
    enum class Kind { lambda_power, inverse_depth, weight_seq };
    Kind kind = Kind::lambda_power;
    double lambda = 2.0;
    std::vector<double> omega;  // omega[k] for |e| = k

    static CutFunctionalSpec lambda_power(double lambda);
    static CutFunctionalSpec inverse_depth() { return {Kind::inverse_depth, 0.0, {}}; }
    static CutFunctionalSpec weight_seq(std::vector<double> omega);

    void validate() const;
    [[nodiscard]] double operator()(unsigned edge_depth) const;
};

/// min Σ_{e∈Π} spec(|e|) over cutsets Π made of edges with m <= |e| <= n,
/// i.e. cutsets of horizon n + 1 inside E_{>=m}. Needs 1 <= m <= n < depth_limit.
[[nodiscard]] double cutset_functional_min(const Tree& t, const CutFunctionalSpec& spec, unsigned m, unsigned n);

struct BranchingRow {
    double lambda = 1.0;
    std::vector<double> values;  // cutset_functional_min(lambda_power, [1, h]) per horizon
    double decay_rate = 1.0;     // per-level factor between the last two horizons
    bool decays = false;         // decay_rate < 1
};

struct BranchingEstimate {
    std::vector<unsigned> horizons;
    std::vector<BranchingRow> rows;
    /// max over λ of λ · decay_rate(λ): the λ at which the fitted decay
    /// factor would cross 1.
    double estimate = 1.0;
    /// Smallest grid λ whose sequence decays; empty when none does.
    std::optional<double> threshold_crossing;
};

/// Needs at least two increasing horizons h with 1 <= h < depth_limit and λ >= 1.
[[nodiscard]] BranchingEstimate branching_number_estimate(const Tree& t, const std::vector<double>& lambdas,
                                                          const std::vector<unsigned>& horizons);

/// Maps every cutset edge to the deepest minimizer of cap along its root
/// path, then drops edges that have an ancestor in the image.
[[nodiscard]] Cutset xi_map(const Tree& t, const EdgeWeights& cap, const Cutset& pi);

[[nodiscard]] double cutset_sum(const Cutset& c, const EdgeWeights& w);

}  // namespace treeglass
