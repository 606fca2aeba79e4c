#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treeglass/couplings.hpp"
#include "treeglass/tree.hpp"

namespace treeglass {

/// Contents of a `TREE v1` file. Couplings are present only when every
/// non-root line carries one.
struct TreeFile {
    Tree tree;
    std::optional<EdgeWeights> couplings;
};

/// Parses the line format
///
///     TREE v1
///     <node_id> -
///     <node_id> <parent_id> [coupling]
///
/// Blank lines and `#` comments are ignored. A parent must appear before its
/// children; duplicate ids and zero couplings are rejected.
[[nodiscard]] TreeFile read_tree(std::istream& in);
[[nodiscard]] TreeFile read_tree_file(const std::string& path);

/// Writes `t` in `TREE v1` form using node labels as ids.
void write_tree(std::ostream& out, const Tree& t, const EdgeWeights* couplings = nullptr);

/// `edge_id,value` rows, one per edge, with an optional header line.
[[nodiscard]] EdgeWeights read_edge_weights_csv(std::istream& in, const Tree& t);
void write_edge_weights_csv(std::ostream& out, const Tree& t, const EdgeWeights& w);

/// `exp:MEAN`, `unif:A,B`, `cuberoot`, `signed:<base>`.
[[nodiscard]] DistributionSpec parse_distribution(std::string_view literal);

/// `bary:B:N`, `halfline:N`, `star:M`, `sphere:square:N`,
/// `sphere:n0,n1,...`, `gw:poisson:MEAN:N`, `gw:pmf:p0,p1,...:N`, `dhl:N`;
/// anything else names a tree file.
[[nodiscard]] TreeSpec parse_tree_spec(std::string_view literal);

/// Comma-separated nonnegative integers, e.g. "2,4,8".
[[nodiscard]] std::vector<unsigned> parse_uint_list(std::string_view text);
/// Comma-separated reals.
[[nodiscard]] std::vector<double> parse_double_list(std::string_view text);

[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] unsigned parse_uint(std::string_view text);

}  // namespace treeglass
