#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace treeglass {

using NodeId = std::uint32_t;

/// An edge is named by its endpoint farther from the root, so edge ids are
/// the non-root node ids and `parent(e)` is the other endpoint.
using EdgeId = NodeId;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

using NodeRange = std::ranges::iota_view<NodeId, NodeId>;

/// Rooted, depth-truncated, locally finite tree.
///
/// Nodes are stored in breadth-first order: the root is node 0, depths are
/// nondecreasing in the node id, and the children of every node occupy a
/// contiguous id range. Consequently the nodes of depth <= d form a prefix,
/// and a reverse sweep over ids visits children before parents.
///
/// Edge depth follows the root-distance convention |e| = depth(parent(e)),
/// so E_n (the edges with |e| = n) are exactly the parent edges of the
/// nodes at depth n + 1.
class Tree {
public:
    Tree() = default;

    [[nodiscard]] std::size_t size() const noexcept { return parent_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return size() == 0 ? 0 : size() - 1; }
    [[nodiscard]] static constexpr NodeId root() noexcept { return 0; }
    [[nodiscard]] unsigned depth_limit() const noexcept { return depth_limit_; }

    [[nodiscard]] NodeId parent(NodeId v) const { return parent_[v]; }
    [[nodiscard]] unsigned depth(NodeId v) const { return depth_[v]; }
    [[nodiscard]] unsigned edge_depth(EdgeId e) const { return depth_[e] - 1; }
    [[nodiscard]] NodeRange children(NodeId v) const {
        return NodeRange(first_child_[v], first_child_[v] + child_count_[v]);
    }
    [[nodiscard]] std::size_t child_count(NodeId v) const { return child_count_[v]; }
    [[nodiscard]] bool is_leaf(NodeId v) const { return child_count_[v] == 0; }

    /// All edges, i.e. node ids 1..size()-1.
    [[nodiscard]] NodeRange edges() const {
        return NodeRange(size() == 0 ? 0 : 1, static_cast<NodeId>(size()));
    }
    /// Nodes at depth d (empty when d exceeds the deepest level present).
    [[nodiscard]] NodeRange level(unsigned d) const;
    /// Edges with |e| = n, i.e. the parent edges of level n + 1.
    [[nodiscard]] NodeRange edge_level(unsigned n) const { return level(n + 1); }
    /// Deepest level actually populated (<= depth_limit).
    [[nodiscard]] unsigned max_depth() const noexcept {
        return level_begin_.empty() ? 0 : static_cast<unsigned>(level_begin_.size() - 2);
    }

    /// Maximal node depth found in the subtree of v.
    [[nodiscard]] unsigned reach(NodeId v) const { return reach_[v]; }
    /// True when some descendant of v (or v itself) sits at depth >= n.
    [[nodiscard]] bool reaches(NodeId v, unsigned n) const { return reach_[v] >= n; }

    /// True when a is on the root path of b (a == b included).
    [[nodiscard]] bool is_ancestor(NodeId a, NodeId b) const;

    [[nodiscard]] std::uint64_t label(NodeId v) const { return labels_[v]; }
    [[nodiscard]] std::optional<NodeId> find_label(std::uint64_t label) const;

    /// Nodes of depth <= d. Because of breadth-first storage the node ids are
    /// unchanged, so edge-indexed data of this tree applies to the result.
    [[nodiscard]] Tree truncated(unsigned d) const;

    /// Subtree induced by a parent-closed node mask; `origin[i]` is the id in
    /// this tree of node i of the result.
    struct Induced;
    [[nodiscard]] Induced induced(const std::vector<bool>& keep) const;

private:
    friend class TreeBuilder;

    std::vector<NodeId> parent_;
    std::vector<unsigned> depth_;
    std::vector<NodeId> first_child_;
    std::vector<std::uint32_t> child_count_;
    std::vector<NodeId> level_begin_;  // size max_depth + 2
    std::vector<unsigned> reach_;
    std::vector<std::uint64_t> labels_;
    bool identity_labels_ = true;
    std::unordered_map<std::uint64_t, NodeId> label_index_;
    unsigned depth_limit_ = 0;
};

struct Tree::Induced {
    Tree tree;
    std::vector<NodeId> origin;
};

/// Incremental construction. Nodes may be added in any order in which a
/// parent precedes its children; `build` reorders them breadth-first while
/// keeping the insertion order among siblings.
class TreeBuilder {
public:
    /// Adds the root and returns its builder handle (always 0).
    std::size_t add_root(std::uint64_t label = 0);
    /// Adds a child of the node with builder handle `parent`.
    std::size_t add_child(std::size_t parent, std::uint64_t label);
    /// Adds a child labelled with its builder handle.
    std::size_t add_child(std::size_t parent);

    [[nodiscard]] std::size_t size() const noexcept { return parent_.size(); }

    /// Builds the tree. The depth limit defaults to the deepest node; an
    /// explicit limit must be at least that deep.
    [[nodiscard]] Tree build(std::optional<unsigned> depth_limit = std::nullopt) const;
    /// Same as build, also reporting for every builder handle its node id.
    [[nodiscard]] Tree build(std::vector<NodeId>& handle_to_node,
                             std::optional<unsigned> depth_limit = std::nullopt) const;

private:
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::uint64_t> labels_;
    bool identity_labels_ = true;
};

/// Edge-indexed real values (couplings J, capacities, conductances). Storage
/// is indexed by node id; slot 0 (the root, which has no parent edge) is
/// unused and kept at zero.
class EdgeWeights {
public:
    EdgeWeights() = default;
    explicit EdgeWeights(const Tree& t, double fill = 0.0);
    explicit EdgeWeights(std::vector<double> values);

    [[nodiscard]] double operator[](EdgeId e) const { return values_[e]; }
    [[nodiscard]] double& operator[](EdgeId e) { return values_[e]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] EdgeWeights abs() const;
    [[nodiscard]] EdgeWeights scaled(double factor) const;
    /// Pointwise min(w, cap).
    [[nodiscard]] EdgeWeights clamped(double cap) const;
    /// The first n slots (weights of a prefix-truncated tree).
    [[nodiscard]] EdgeWeights prefix(std::size_t n) const;
    /// Weights pulled back along an `Induced::origin` map.
    [[nodiscard]] EdgeWeights pulled_back(const std::vector<NodeId>& origin) const;

    friend bool operator==(const EdgeWeights&, const EdgeWeights&) = default;

private:
    std::vector<double> values_;
};

/// Antichain of edges separating the root from level `horizon`.
struct Cutset {
    std::vector<EdgeId> edges;  // sorted ascending
    unsigned horizon = 0;
};

struct CutsetCheck {
    bool ok = true;
    std::string reason;
    explicit operator bool() const noexcept { return ok; }
};

/// Cutset validator: every edge lies on some root-to-level-horizon path,
/// no edge is an ancestor of another, and every root-to-level-horizon path
/// meets the set. Non-minimal separating sets are rejected.
[[nodiscard]] CutsetCheck validate_cutset(const Tree& t, const Cutset& c);

/// Offspring laws for Galton-Watson trees.
struct PoissonOffspring {
    double mean = 1.0;
};
struct PmfOffspring {
    std::vector<double> probabilities;  // P(k children), k = 0, 1, ...
};
using OffspringLaw = std::variant<PoissonOffspring, PmfOffspring>;

enum class TreeFamily { b_ary, spherically_symmetric, galton_watson, double_halfline, from_file };

/// Description of a tree family member at a fixed truncation depth.
struct TreeSpec {
    TreeFamily family = TreeFamily::b_ary;
    unsigned branching = 2;                    // b_ary
    std::vector<std::uint64_t> profile;        // spherically_symmetric: |E_n|, n = 0..depth_limit-1
    OffspringLaw offspring = PoissonOffspring{};  // galton_watson
    std::string path;                          // from_file
    unsigned depth_limit = 0;
    unsigned max_degree = 4096;
    std::size_t max_nodes = 50'000'000;

    static TreeSpec b_ary(unsigned b, unsigned depth);
    static TreeSpec half_line(unsigned depth) { return b_ary(1, depth); }
    static TreeSpec star(unsigned leaves) { return b_ary(leaves, 1); }
    static TreeSpec spherical(std::vector<std::uint64_t> profile);
    /// Profile |E_n| = (n+1)^2 for n < depth.
    static TreeSpec square_profile(unsigned depth);
    static TreeSpec galton_watson(OffspringLaw law, unsigned depth);
    static TreeSpec double_halfline(unsigned depth);
    static TreeSpec file(std::string path, unsigned depth = 0);
};

/// Builds the tree described by `spec`. Deterministic in (spec, seed); only
/// Galton-Watson trees consume the seed.
[[nodiscard]] Tree generate(const TreeSpec& spec, std::uint64_t seed = 0);

/// The edge f joining the two centers of a double half-line tree.
[[nodiscard]] constexpr EdgeId double_halfline_center_edge() noexcept { return 1; }

/// Subtree of nodes whose own subtree reaches depth_limit (finite-depth
/// surrogate for "has an infinite line of descent"). Labels are kept.
[[nodiscard]] Tree backbone(const Tree& t);
[[nodiscard]] Tree::Induced backbone_with_origin(const Tree& t);

/// E_{n-1}: the edges entering level n. Valid for 1 <= n <= depth_limit.
[[nodiscard]] Cutset level_cutset(const Tree& t, unsigned n);

/// P_e: edges from the root edge down to e (length |e| + 1).
[[nodiscard]] std::vector<EdgeId> path_to_root(const Tree& t, EdgeId e);

/// Number of minimal cutsets separating the root from level `horizon`,
/// saturating at `std::numeric_limits<std::uint64_t>::max()`.
[[nodiscard]] std::uint64_t count_min_cutsets(const Tree& t, unsigned horizon);

/// Calls `visit` once for every minimal cutset of the given horizon.
/// Throws OverflowError before visiting anything when the count exceeds `cap`.
void enumerate_min_cutsets(const Tree& t, unsigned horizon,
                           const std::function<void(const Cutset&)>& visit,
                           std::uint64_t cap = 1'000'000);

/// Calls `visit` once for every connected node set of size <= max_size whose
/// nodes all satisfy `allowed` (all nodes when empty). Sets are produced
/// grouped by their top node in ascending id order. Throws OverflowError as
/// soon as more than `cap` sets would be produced.
void enumerate_connected_sets(const Tree& t, std::size_t max_size,
                              const std::function<void(std::span<const NodeId>)>& visit,
                              std::uint64_t cap = 1'000'000,
                              const std::function<bool(NodeId)>& allowed = {});

/// Edges with exactly one endpoint in the node set (membership mask).
[[nodiscard]] std::vector<EdgeId> boundary_edges(const Tree& t, const std::vector<bool>& in_set);
[[nodiscard]] std::vector<EdgeId> boundary_edges(const Tree& t, std::span<const NodeId> set);

}  // namespace treeglass
