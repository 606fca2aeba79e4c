#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treeglass/tree.hpp"

namespace treeglass {

/// Vertex-indexed ±1 spins.
struct SpinConfig {
    std::vector<std::int8_t> spin;

    SpinConfig() = default;
    explicit SpinConfig(std::size_t n, std::int8_t value = 1) : spin(n, value) {}

    [[nodiscard]] int operator[](NodeId v) const { return spin[v]; }
    [[nodiscard]] std::size_t size() const noexcept { return spin.size(); }
    /// Global flip -σ.
    [[nodiscard]] SpinConfig flipped() const;
    /// σ with the spins of `b` reversed.
    [[nodiscard]] SpinConfig flipped_on(std::span<const NodeId> b) const;

    friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
};

/// J_e σ_x σ_y for the edge e = (x, y).
[[nodiscard]] double bond_energy(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma, EdgeId e);

/// H_B = -Σ J σσ over edges with at least one end in B.
[[nodiscard]] double hamiltonian(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma,
                                 std::span<const NodeId> b);

/// Σ J σσ over edges with exactly one end in B. Only edges of the stored
/// tree are seen, so edges leaving the truncation are not counted.
[[nodiscard]] double boundary_energy(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma,
                                     std::span<const NodeId> b);

/// Edges with J σσ <= 0.
[[nodiscard]] std::vector<EdgeId> unsatisfied_edges(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma);

/// σ_root = +1 and σ_child = σ_parent · sign(J). Throws ZeroCouplingError.
[[nodiscard]] SpinConfig natural_ground_state(const Tree& t, const EdgeWeights& j);

/// The natural ground state with the subtree below h flipped, so h is the
/// only unsatisfied edge.
[[nodiscard]] SpinConfig defect_config(const Tree& t, const EdgeWeights& j, EdgeId h);

/// Throws ZeroCouplingError when some edge has J = 0.
void check_nonzero_couplings(const Tree& t, const EdgeWeights& j);

struct VerifyOptions {
    std::size_t k = 8;              // largest flip set searched
    std::uint64_t cap = 1'000'000;  // enumerated sets before OverflowError
    /// Keep the vertices on the truncation level fixed: their outgoing edges
    /// are not part of the stored tree, so flipping them cannot be scored.
    bool fix_horizon = true;
};

struct GroundStateVerdict {
    bool pass = true;
    std::vector<NodeId> witness;  // first violating set (empty on pass)
    double witness_energy = 0.0;
    std::size_t k = 0;            // 0 means every finite set was covered
    unsigned horizon = 0;
    std::uint64_t sets_checked = 0;
};

/// Checks Σ_{∂B} J σσ >= 0 for every connected B with |B| <= k, in the order
/// of enumerate_connected_sets; the first violation is returned.
[[nodiscard]] GroundStateVerdict verify_ground_state(const Tree& t, const EdgeWeights& j, const SpinConfig& sigma,
                                                     const VerifyOptions& opts = {});

/// Unbounded variant: a tree dynamic program finds the connected set of least
/// boundary energy, so the verdict covers all finite B of the truncated tree.
[[nodiscard]] GroundStateVerdict verify_ground_state_exact(const Tree& t, const EdgeWeights& j,
                                                           const SpinConfig& sigma, bool fix_horizon = true);

struct CountOptions {
    /// nullopt: exact dynamic program; otherwise enumerative check up to k.
    std::optional<std::size_t> k;
    std::uint64_t cap = 1'000'000;  // edge budget, and enumeration cap when k is set
    /// Only edges with |e| < core_depth are defect candidates.
    std::optional<unsigned> core_depth;
};

struct GroundStateCount {
    std::uint64_t count = 2;
    std::vector<EdgeId> defect_edges;
    std::size_t k = 0;  // 0 when exact
};

/// 2 (the natural pair) + 2 · #{h : defect_config(h) is a ground state}.
[[nodiscard]] GroundStateCount count_single_defect_ground_states(const Tree& t, const EdgeWeights& j,
                                                                 const CountOptions& opts = {});

/// Single-defect ground states in the exact sense: for every edge, whether
/// its defect configuration passes every finite flip set.
[[nodiscard]] std::vector<bool> defect_edges_passing(const Tree& t, const EdgeWeights& j);

struct CriticalEdge {
    EdgeId h = 0;
    NodeId new_root = 0;      // upper endpoint of h
    NodeId split_vertex = 0;  // where T̃1 and T̃2 separate
    std::vector<NodeId> t1_children;  // children of split_vertex on the T̃1 side
    std::vector<NodeId> t2_children;  // children of split_vertex on the T̃2 side
    std::size_t n_tilde = 0;  // 1-based position of h in the enumeration of T̃2
    double mf0 = 0.0;         // MF(0)
    double mf_n_tilde = 0.0;  // MF(ñ)
    unsigned horizon = 0;

    /// True when v lies in T2 = the subtree below h.
    [[nodiscard]] bool in_t2(const Tree& t, NodeId v) const { return t.is_ancestor(h, v); }
};

/// Critical-edge search at the given horizon. Throws NoCriticalEdge when no
/// split with positive flow on both sides exists or MF never increases.
[[nodiscard]] CriticalEdge find_critical_edge(const Tree& t, const EdgeWeights& j, unsigned horizon);

/// Repeats the search inside the T̃1 side `count` times, giving distinct edges.
[[nodiscard]] std::vector<CriticalEdge> find_critical_edges(const Tree& t, const EdgeWeights& j, unsigned horizon,
                                                            unsigned count);

}  // namespace treeglass
