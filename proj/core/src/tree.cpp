#include "treeglass/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "treeglass/error.hpp"
#include "treeglass/io.hpp"
#include "treeglass/rng.hpp"

namespace treeglass {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return (a > kSaturated - b) ? kSaturated : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return (a > kSaturated / b) ? kSaturated : a * b;
}

void check_node_budget(std::size_t nodes, const TreeSpec& spec) {
    if (nodes > spec.max_nodes) {
        throw OverflowError("tree generation exceeds max_nodes = " + std::to_string(spec.max_nodes));
    }
}

}  // namespace

// ---------------------------------------------------------------- Tree

NodeRange Tree::level(unsigned d) const {
    if (level_begin_.empty() || d > max_depth()) {
        const auto n = static_cast<NodeId>(size());
        return NodeRange(n, n);
    }
    return NodeRange(level_begin_[d], level_begin_[d + 1]);
}

bool Tree::is_ancestor(NodeId a, NodeId b) const {
    if (depth_[a] > depth_[b]) return false;
    while (depth_[b] > depth_[a]) b = parent_[b];
    return a == b;
}

std::optional<NodeId> Tree::find_label(std::uint64_t label) const {
    if (identity_labels_) {
        if (label < size()) return static_cast<NodeId>(label);
        return std::nullopt;
    }
    auto it = label_index_.find(label);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
}

Tree Tree::truncated(unsigned d) const {
    if (size() == 0) return *this;
    Tree out;
    const unsigned keep_depth = std::min(d, max_depth());
    const NodeId n = level_begin_[keep_depth + 1];
    out.parent_.assign(parent_.begin(), parent_.begin() + n);
    out.depth_.assign(depth_.begin(), depth_.begin() + n);
    out.first_child_.assign(first_child_.begin(), first_child_.begin() + n);
    out.child_count_.assign(child_count_.begin(), child_count_.begin() + n);
    for (NodeId v : level(keep_depth)) {
        out.child_count_[v] = 0;
        out.first_child_[v] = n;
    }
    out.level_begin_.assign(level_begin_.begin(), level_begin_.begin() + keep_depth + 2);
    out.labels_.assign(labels_.begin(), labels_.begin() + n);
    out.identity_labels_ = identity_labels_;
    if (!identity_labels_) {
        for (NodeId v = 0; v < n; ++v) out.label_index_.emplace(out.labels_[v], v);
    }
    out.reach_.assign(n, 0);
    for (NodeId v = n; v-- > 0;) {
        out.reach_[v] = std::max(out.reach_[v], out.depth_[v]);
        if (v != 0) out.reach_[out.parent_[v]] = std::max(out.reach_[out.parent_[v]], out.reach_[v]);
    }
    out.depth_limit_ = d;
    return out;
}

Tree::Induced Tree::induced(const std::vector<bool>& keep) const {
    TreeBuilder b;
    std::vector<std::size_t> handle(size(), 0);
    std::vector<NodeId> order;
    if (size() > 0) {
        handle[0] = b.add_root(labels_[0]);
        order.push_back(0);
    }
    for (NodeId v = 1; v < size(); ++v) {
        if (!keep[v]) continue;
        if (!keep[parent_[v]]) throw RangeError("induced subtree mask is not closed under parents");
        handle[v] = b.add_child(handle[parent_[v]], labels_[v]);
        order.push_back(v);
    }
    std::vector<NodeId> to_node;
    Induced res{b.build(to_node, depth_limit_), {}};
    res.origin.assign(res.tree.size(), 0);
    for (std::size_t h = 0; h < order.size(); ++h) res.origin[to_node[h]] = order[h];
    return res;
}

// ---------------------------------------------------------------- TreeBuilder

std::size_t TreeBuilder::add_root(std::uint64_t label) {
    if (!parent_.empty()) throw RangeError("tree already has a root");
    parent_.push_back(static_cast<std::size_t>(-1));
    children_.emplace_back();
    labels_.push_back(label);
    identity_labels_ = identity_labels_ && label == 0;
    return 0;
}

std::size_t TreeBuilder::add_child(std::size_t parent, std::uint64_t label) {
    if (parent >= parent_.size()) throw RangeError("parent handle does not exist");
    const std::size_t h = parent_.size();
    if (h >= static_cast<std::size_t>(kNoNode)) throw OverflowError("too many nodes for 32-bit node ids");
    parent_.push_back(parent);
    children_.emplace_back();
    children_[parent].push_back(h);
    labels_.push_back(label);
    identity_labels_ = identity_labels_ && label == h;
    return h;
}

std::size_t TreeBuilder::add_child(std::size_t parent) { return add_child(parent, parent_.size()); }

Tree TreeBuilder::build(std::optional<unsigned> depth_limit) const {
    std::vector<NodeId> unused;
    return build(unused, depth_limit);
}

Tree TreeBuilder::build(std::vector<NodeId>& handle_to_node, std::optional<unsigned> depth_limit) const {
    Tree t;
    const std::size_t n = parent_.size();
    handle_to_node.assign(n, kNoNode);
    if (n == 0) {
        t.depth_limit_ = depth_limit.value_or(0);
        return t;
    }
    t.parent_.resize(n);
    t.depth_.resize(n);
    t.first_child_.resize(n);
    t.child_count_.resize(n);
    t.labels_.resize(n);
    t.reach_.resize(n);

    std::vector<std::size_t> order;
    order.reserve(n);
    order.push_back(0);
    handle_to_node[0] = 0;
    t.parent_[0] = kNoNode;
    t.depth_[0] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t h = order[i];
        const auto v = static_cast<NodeId>(i);
        t.first_child_[v] = static_cast<NodeId>(order.size());
        t.child_count_[v] = static_cast<std::uint32_t>(children_[h].size());
        for (std::size_t c : children_[h]) {
            const auto cv = static_cast<NodeId>(order.size());
            handle_to_node[c] = cv;
            t.parent_[cv] = v;
            t.depth_[cv] = t.depth_[v] + 1;
            order.push_back(c);
        }
    }
    unsigned deepest = 0;
    for (std::size_t i = 0; i < n; ++i) {
        t.labels_[i] = identity_labels_ ? i : labels_[order[i]];
        deepest = std::max(deepest, t.depth_[i]);
    }
    t.identity_labels_ = true;
    for (std::size_t i = 0; i < n && t.identity_labels_; ++i) t.identity_labels_ = t.labels_[i] == i;
    if (!t.identity_labels_) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!t.label_index_.emplace(t.labels_[i], static_cast<NodeId>(i)).second) {
                throw ParseError("duplicate node label " + std::to_string(t.labels_[i]));
            }
        }
    }
    t.level_begin_.assign(deepest + 2, static_cast<NodeId>(n));
    for (std::size_t i = n; i-- > 0;) t.level_begin_[t.depth_[i]] = static_cast<NodeId>(i);
    for (std::size_t i = n; i-- > 0;) {
        t.reach_[i] = std::max(t.reach_[i], t.depth_[i]);
        if (i != 0) t.reach_[t.parent_[i]] = std::max(t.reach_[t.parent_[i]], t.reach_[i]);
    }
    if (depth_limit && *depth_limit < deepest) {
        throw RangeError("depth limit " + std::to_string(*depth_limit) + " is shallower than the deepest node (" +
                         std::to_string(deepest) + ")");
    }
    t.depth_limit_ = depth_limit.value_or(deepest);
    return t;
}

// ---------------------------------------------------------------- EdgeWeights

EdgeWeights::EdgeWeights(const Tree& t, double fill) : values_(t.size(), fill) {
    if (!values_.empty()) values_[0] = 0.0;
}

EdgeWeights::EdgeWeights(std::vector<double> values) : values_(std::move(values)) {}

EdgeWeights EdgeWeights::abs() const {
    EdgeWeights out = *this;
    for (double& x : out.values_) x = std::fabs(x);
    return out;
}

EdgeWeights EdgeWeights::scaled(double factor) const {
    EdgeWeights out = *this;
    for (double& x : out.values_) x *= factor;
    return out;
}

EdgeWeights EdgeWeights::clamped(double cap) const {
    EdgeWeights out = *this;
    for (double& x : out.values_) x = std::min(x, cap);
    return out;
}

EdgeWeights EdgeWeights::prefix(std::size_t n) const {
    return EdgeWeights(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)));
}

EdgeWeights EdgeWeights::pulled_back(const std::vector<NodeId>& origin) const {
    std::vector<double> out(origin.size(), 0.0);
    for (std::size_t i = 1; i < origin.size(); ++i) out[i] = values_[origin[i]];
    return EdgeWeights(std::move(out));
}

// ---------------------------------------------------------------- cutsets

CutsetCheck validate_cutset(const Tree& t, const Cutset& c) {
    const unsigned h = c.horizon;
    if (h < 1 || h > t.depth_limit()) {
        return {false, "horizon " + std::to_string(h) + " outside [1, depth_limit]"};
    }
    std::vector<bool> marked(t.size(), false);
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
        const EdgeId e = c.edges[i];
        if (e == 0 || e >= t.size()) return {false, "unknown edge " + std::to_string(e)};
        if (i > 0 && c.edges[i - 1] >= e) return {false, "edges not sorted and unique"};
        if (t.depth(e) > h) return {false, "edge " + std::to_string(e) + " lies below the horizon"};
        if (!t.reaches(e, h)) return {false, "edge " + std::to_string(e) + " is not on any path to the horizon"};
        marked[e] = true;
    }
    std::vector<bool> covered(t.size(), false);
    for (NodeId v = 1; v < t.size() && t.depth(v) <= h; ++v) {
        const bool above = covered[t.parent(v)];
        if (marked[v] && above) {
            return {false, "edge " + std::to_string(v) + " has an ancestor edge in the set"};
        }
        covered[v] = above || marked[v];
    }
    for (NodeId v : t.level(h)) {
        if (!covered[v]) return {false, "path to node " + std::to_string(v) + " is not separated"};
    }
    return {};
}

Cutset level_cutset(const Tree& t, unsigned n) {
    if (n < 1 || n > t.depth_limit()) {
        throw RangeError("level cutset horizon " + std::to_string(n) + " outside [1, " +
                         std::to_string(t.depth_limit()) + "]");
    }
    Cutset c;
    c.horizon = n;
    for (NodeId v : t.level(n)) c.edges.push_back(v);
    return c;
}

std::vector<EdgeId> path_to_root(const Tree& t, EdgeId e) {
    if (e == 0 || e >= t.size()) throw RangeError("unknown edge " + std::to_string(e));
    std::vector<EdgeId> path;
    path.reserve(t.depth(e));
    for (NodeId v = e; v != Tree::root(); v = t.parent(v)) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

std::uint64_t count_min_cutsets(const Tree& t, unsigned horizon) {
    if (horizon < 1 || horizon > t.depth_limit()) throw RangeError("horizon out of range");
    if (t.size() == 0) return 1;
    // ways[v]: cutsets of the subtree hanging from edge v (v live).
    std::vector<std::uint64_t> ways(t.size(), 1);
    std::uint64_t total = 1;
    for (NodeId v = static_cast<NodeId>(t.size()); v-- > 1;) {
        if (!t.reaches(v, horizon) || t.depth(v) > horizon) continue;
        std::uint64_t below = 1;
        if (t.depth(v) < horizon) {
            for (NodeId c : t.children(v)) {
                if (t.reaches(c, horizon)) below = sat_mul(below, ways[c]);
            }
            ways[v] = sat_add(1, below);
        } else {
            ways[v] = 1;
        }
    }
    for (NodeId c : t.children(Tree::root())) {
        if (t.reaches(c, horizon)) total = sat_mul(total, ways[c]);
    }
    return total;
}

namespace {

struct CutsetWalker {
    const Tree& t;
    unsigned horizon;
    const std::function<void(const Cutset&)>& visit;
    std::vector<EdgeId> chosen;
    Cutset scratch;

    void run(std::vector<EdgeId>& pending) {
        if (pending.empty()) {
            scratch.edges = chosen;
            std::sort(scratch.edges.begin(), scratch.edges.end());
            visit(scratch);
            return;
        }
        const EdgeId e = pending.back();
        pending.pop_back();

        chosen.push_back(e);
        run(pending);
        chosen.pop_back();

        if (t.depth(e) < horizon) {
            const std::size_t mark = pending.size();
            for (NodeId c : t.children(e)) {
                if (t.reaches(c, horizon)) pending.push_back(c);
            }
            run(pending);
            pending.resize(mark);
        }
        pending.push_back(e);
    }
};

}  // namespace

void enumerate_min_cutsets(const Tree& t, unsigned horizon, const std::function<void(const Cutset&)>& visit,
                           std::uint64_t cap) {
    const std::uint64_t count = count_min_cutsets(t, horizon);
    if (count > cap) {
        throw OverflowError("minimal cutset count " +
                            (count == kSaturated ? std::string(">= 2^64") : std::to_string(count)) +
                            " exceeds cap " + std::to_string(cap));
    }
    CutsetWalker w{t, horizon, visit, {}, {}};
    w.scratch.horizon = horizon;
    std::vector<EdgeId> pending;
    for (NodeId c : t.children(Tree::root())) {
        if (t.reaches(c, horizon)) pending.push_back(c);
    }
    std::reverse(pending.begin(), pending.end());
    w.run(pending);
}

namespace {

struct ConnectedWalker {
    const Tree& t;
    std::size_t max_size;
    const std::function<void(std::span<const NodeId>)>& visit;
    std::uint64_t cap;
    const std::function<bool(NodeId)>& allowed;
    std::uint64_t produced = 0;
    std::vector<NodeId> set;

    void emit() {
        if (++produced > cap) {
            throw OverflowError("connected set enumeration exceeds cap " + std::to_string(cap));
        }
        visit(set);
    }

    // Every connected set with a fixed top node is produced exactly once:
    // candidates are taken in list order, and a skipped candidate is never
    // reconsidered further down the same branch.
    void grow(const std::vector<NodeId>& candidates, std::size_t from) {
        emit();
        if (set.size() == max_size) return;
        for (std::size_t i = from; i < candidates.size(); ++i) {
            const NodeId c = candidates[i];
            std::vector<NodeId> next(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end());
            for (NodeId d : t.children(c)) {
                if (!allowed || allowed(d)) next.push_back(d);
            }
            set.push_back(c);
            grow(next, 0);
            set.pop_back();
        }
    }
};

}  // namespace

void enumerate_connected_sets(const Tree& t, std::size_t max_size,
                              const std::function<void(std::span<const NodeId>)>& visit, std::uint64_t cap,
                              const std::function<bool(NodeId)>& allowed) {
    if (max_size < 1) throw RangeError("max_size must be at least 1");
    ConnectedWalker w{t, max_size, visit, cap, allowed, 0, {}};
    for (NodeId top = 0; top < t.size(); ++top) {
        if (allowed && !allowed(top)) continue;
        std::vector<NodeId> candidates;
        for (NodeId d : t.children(top)) {
            if (!allowed || allowed(d)) candidates.push_back(d);
        }
        w.set.assign(1, top);
        w.grow(candidates, 0);
    }
}

std::vector<EdgeId> boundary_edges(const Tree& t, const std::vector<bool>& in_set) {
    std::vector<EdgeId> out;
    for (EdgeId e : t.edges()) {
        if (in_set[e] != in_set[t.parent(e)]) out.push_back(e);
    }
    return out;
}

std::vector<EdgeId> boundary_edges(const Tree& t, std::span<const NodeId> set) {
    std::vector<bool> mask(t.size(), false);
    for (NodeId v : set) mask[v] = true;
    return boundary_edges(t, mask);
}

// ---------------------------------------------------------------- generation

TreeSpec TreeSpec::b_ary(unsigned b, unsigned depth) {
    TreeSpec s;
    s.family = TreeFamily::b_ary;
    s.branching = b;
    s.depth_limit = depth;
    return s;
}

TreeSpec TreeSpec::spherical(std::vector<std::uint64_t> profile) {
    TreeSpec s;
    s.family = TreeFamily::spherically_symmetric;
    s.depth_limit = static_cast<unsigned>(profile.size());
    s.profile = std::move(profile);
    return s;
}

TreeSpec TreeSpec::square_profile(unsigned depth) {
    std::vector<std::uint64_t> p(depth);
    for (unsigned n = 0; n < depth; ++n) p[n] = static_cast<std::uint64_t>(n + 1) * (n + 1);
    return spherical(std::move(p));
}

TreeSpec TreeSpec::galton_watson(OffspringLaw law, unsigned depth) {
    TreeSpec s;
    s.family = TreeFamily::galton_watson;
    s.offspring = std::move(law);
    s.depth_limit = depth;
    return s;
}

TreeSpec TreeSpec::double_halfline(unsigned depth) {
    TreeSpec s;
    s.family = TreeFamily::double_halfline;
    s.depth_limit = depth;
    return s;
}

TreeSpec TreeSpec::file(std::string path, unsigned depth) {
    TreeSpec s;
    s.family = TreeFamily::from_file;
    s.path = std::move(path);
    s.depth_limit = depth;
    return s;
}

namespace {

Tree generate_b_ary(const TreeSpec& spec) {
    if (spec.branching < 1) throw ProfileError("b-ary tree needs branching >= 1");
    if (spec.branching > spec.max_degree) throw ProfileError("branching exceeds max_degree");
    std::size_t total = 1;
    std::size_t level = 1;
    for (unsigned d = 0; d < spec.depth_limit; ++d) {
        if (level > spec.max_nodes / spec.branching) check_node_budget(spec.max_nodes + 1, spec);
        level *= spec.branching;
        total += level;
        check_node_budget(total, spec);
    }
    TreeBuilder b;
    b.add_root();
    std::size_t begin = 0, end = 1;
    for (unsigned d = 0; d < spec.depth_limit; ++d) {
        for (std::size_t v = begin; v < end; ++v) {
            for (unsigned k = 0; k < spec.branching; ++k) b.add_child(v);
        }
        begin = end;
        end = b.size();
    }
    return b.build(spec.depth_limit);
}

Tree generate_spherical(const TreeSpec& spec) {
    if (spec.profile.size() < spec.depth_limit) {
        throw ProfileError("profile has " + std::to_string(spec.profile.size()) + " levels, depth limit is " +
                           std::to_string(spec.depth_limit));
    }
    std::size_t total = 1;
    std::uint64_t nodes_at_level = 1;
    for (unsigned n = 0; n < spec.depth_limit; ++n) {
        const std::uint64_t e = spec.profile[n];
        if (e < nodes_at_level) {
            throw ProfileError("profile level " + std::to_string(n) + " has " + std::to_string(e) +
                               " edges for " + std::to_string(nodes_at_level) +
                               " nodes; every node needs a child");
        }
        if (e > nodes_at_level * spec.max_degree) {
            throw ProfileError("profile level " + std::to_string(n) + " needs more than max_degree children");
        }
        total += e;
        check_node_budget(total, spec);
        nodes_at_level = e;
    }
    TreeBuilder b;
    b.add_root();
    // share[v]: fraction of a unit flow that reaches v when every node splits
    // its inflow equally among its children. Each level hands the extra
    // children to the nodes with the largest share, which keeps the equal-split
    // flow close to uniform on every level.
    std::vector<double> share{1.0}, next_share;
    std::vector<std::size_t> order;
    std::vector<std::uint64_t> kids;
    std::size_t begin = 0, end = 1;
    for (unsigned n = 0; n < spec.depth_limit; ++n) {
        const std::size_t nodes = end - begin;
        const std::uint64_t e = spec.profile[n];
        order.resize(nodes);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return share[x] > share[y]; });
        kids.assign(nodes, e / nodes);
        for (std::size_t i = 0; i < e % nodes; ++i) ++kids[order[i]];
        next_share.clear();
        for (std::size_t i = 0; i < nodes; ++i) {
            for (std::uint64_t k = 0; k < kids[i]; ++k) {
                b.add_child(begin + i);
                next_share.push_back(share[i] / static_cast<double>(kids[i]));
            }
        }
        share.swap(next_share);
        begin = end;
        end = b.size();
    }
    return b.build(spec.depth_limit);
}

unsigned sample_offspring(const OffspringLaw& law, double u, unsigned max_degree) {
    if (const auto* p = std::get_if<PoissonOffspring>(&law)) {
        if (!(p->mean >= 0.0)) throw ProfileError("Poisson offspring mean must be >= 0");
        double term = std::exp(-p->mean);
        double cdf = term;
        unsigned k = 0;
        while (u > cdf) {
            ++k;
            term *= p->mean / k;
            cdf += term;
            if (k > max_degree || term == 0.0) break;
        }
        if (k > max_degree) throw ProfileError("offspring count exceeds max_degree");
        return k;
    }
    const auto& pmf = std::get<PmfOffspring>(law).probabilities;
    double cdf = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        cdf += pmf[k];
        if (u <= cdf) {
            if (k > max_degree) throw ProfileError("offspring count exceeds max_degree");
            return static_cast<unsigned>(k);
        }
    }
    return static_cast<unsigned>(pmf.size() - 1);
}

Tree generate_galton_watson(const TreeSpec& spec, std::uint64_t seed) {
    if (const auto* pmf = std::get_if<PmfOffspring>(&spec.offspring)) {
        double s = 0.0;
        for (double p : pmf->probabilities) {
            if (!(p >= 0.0)) throw ProfileError("offspring probabilities must be nonnegative");
            s += p;
        }
        if (pmf->probabilities.empty() || std::fabs(s - 1.0) > 1e-9) {
            throw ProfileError("offspring probabilities must sum to 1");
        }
    }
    const CounterRng rng(seed);
    TreeBuilder b;
    b.add_root();
    std::size_t begin = 0, end = 1;
    for (unsigned d = 0; d < spec.depth_limit && begin < end; ++d) {
        for (std::size_t v = begin; v < end; ++v) {
            const unsigned kids = sample_offspring(spec.offspring, rng.uniform(rng_stream::kOffspring, v),
                                                   spec.max_degree);
            check_node_budget(b.size() + kids, spec);
            for (unsigned k = 0; k < kids; ++k) b.add_child(v);
        }
        begin = end;
        end = b.size();
    }
    return b.build(spec.depth_limit);
}

Tree generate_double_halfline(const TreeSpec& spec) {
    const unsigned L = spec.depth_limit;
    if (L < 2) throw ProfileError("double half-line needs depth >= 2");
    TreeBuilder b;
    const std::size_t a = b.add_root();
    const std::size_t c = b.add_child(a);  // far end of the center edge f
    auto halfline = [&b](std::size_t from, unsigned length) {
        std::size_t v = from;
        for (unsigned i = 0; i < length; ++i) v = b.add_child(v);
    };
    halfline(a, L);
    halfline(a, L);
    halfline(c, L - 1);
    halfline(c, L - 1);
    return b.build(L);
}

}  // namespace

Tree generate(const TreeSpec& spec, std::uint64_t seed) {
    switch (spec.family) {
        case TreeFamily::b_ary:
            return generate_b_ary(spec);
        case TreeFamily::spherically_symmetric:
            return generate_spherical(spec);
        case TreeFamily::galton_watson:
            return generate_galton_watson(spec, seed);
        case TreeFamily::double_halfline:
            return generate_double_halfline(spec);
        case TreeFamily::from_file: {
            Tree t = read_tree_file(spec.path).tree;
            if (spec.depth_limit != 0 && spec.depth_limit < t.depth_limit()) return t.truncated(spec.depth_limit);
            return t;
        }
    }
    throw ProfileError("unknown tree family");
}

Tree::Induced backbone_with_origin(const Tree& t) {
    std::vector<bool> keep(t.size(), false);
    for (NodeId v = 0; v < t.size(); ++v) keep[v] = t.reaches(v, t.depth_limit());
    if (t.size() > 0) keep[0] = true;
    return t.induced(keep);
}

Tree backbone(const Tree& t) { return backbone_with_origin(t).tree; }

}  // namespace treeglass
