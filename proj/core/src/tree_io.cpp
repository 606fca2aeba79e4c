#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "treeglass/error.hpp"
#include "treeglass/io.hpp"

namespace treeglass {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("expected a nonnegative integer for " + what + ", got '" + std::string(text) + "'");
    return v;
}

}  // namespace

double parse_double(std::string_view text) {
    const std::string s(trim(text));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ParseError("expected a finite number, got '" + s + "'");
    return v;
}

unsigned parse_uint(std::string_view text) {
    const auto v = parse_u64(text, "value");
    if (v > std::numeric_limits<unsigned>::max()) throw ParseError("integer too large: " + std::string(text));
    return static_cast<unsigned>(v);
}

std::vector<unsigned> parse_uint_list(std::string_view text) {
    std::vector<unsigned> out;
    for (auto part : split(trim(text), ',')) out.push_back(parse_uint(part));
    return out;
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    for (auto part : split(trim(text), ',')) out.push_back(parse_double(part));
    return out;
}

TreeFile read_tree(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    TreeBuilder builder;
    std::unordered_map<std::uint64_t, std::size_t> handle_of;
    std::vector<double> coupling_by_handle;
    std::size_t with_coupling = 0;

    auto fail = [&](const std::string& msg) { throw ParseError("line " + std::to_string(lineno) + ": " + msg); };

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (!header) {
            if (s != "TREE v1") fail("missing 'TREE v1' header");
            header = true;
            continue;
        }
        std::istringstream fields{std::string(s)};
        std::string id_tok, parent_tok, coupling_tok, extra;
        fields >> id_tok >> parent_tok;
        if (parent_tok.empty()) fail("expected 'node_id parent_id [coupling]'");
        fields >> coupling_tok >> extra;
        if (!extra.empty()) fail("too many fields");

        const auto id = parse_u64(id_tok, "node id");
        if (handle_of.count(id)) fail("duplicate node id " + std::to_string(id));

        std::size_t h = 0;
        if (parent_tok == "-") {
            if (builder.size() != 0) fail("second root " + std::to_string(id));
            if (!coupling_tok.empty()) fail("root line cannot carry a coupling");
            h = builder.add_root(id);
            coupling_by_handle.push_back(0.0);
        } else {
            const auto pid = parse_u64(parent_tok, "parent id");
            const auto it = handle_of.find(pid);
            if (it == handle_of.end()) fail("parent " + std::to_string(pid) + " not defined before node " + std::to_string(id));
            h = builder.add_child(it->second, id);
            double j = 0.0;
            if (!coupling_tok.empty()) {
                try {
                    j = parse_double(coupling_tok);
                } catch (const ParseError& e) {
                    fail(e.what());
                }
                if (j == 0.0) throw ZeroCouplingError("line " + std::to_string(lineno) + ": zero coupling");
                ++with_coupling;
            }
            coupling_by_handle.push_back(j);
        }
        handle_of.emplace(id, h);
    }
    if (!header) throw ParseError("empty tree file");
    if (builder.size() == 0) throw ParseError("tree file has no root");

    const std::size_t edges = builder.size() - 1;
    if (with_coupling != 0 && with_coupling != edges)
        throw ParseError("couplings given on " + std::to_string(with_coupling) + " of " + std::to_string(edges) + " edges");

    std::vector<NodeId> node_of;
    TreeFile out;
    out.tree = builder.build(node_of);
    if (with_coupling != 0 && edges != 0) {
        EdgeWeights w(out.tree);
        for (std::size_t h = 1; h < node_of.size(); ++h) w[node_of[h]] = coupling_by_handle[h];
        out.couplings = std::move(w);
    }
    return out;
}

TreeFile read_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open tree file '" + path + "'");
    return read_tree(in);
}

void write_tree(std::ostream& out, const Tree& t, const EdgeWeights* couplings) {
    const auto old = out.precision(17);
    out << "TREE v1\n";
    if (t.size() != 0) out << t.label(Tree::root()) << " -\n";
    for (EdgeId e : t.edges()) {
        out << t.label(e) << ' ' << t.label(t.parent(e));
        if (couplings) out << ' ' << (*couplings)[e];
        out << '\n';
    }
    out.precision(old);
}

EdgeWeights read_edge_weights_csv(std::istream& in, const Tree& t) {
    EdgeWeights w(t);
    std::vector<bool> seen(t.size(), false);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = trim(line);
        if (s.empty()) continue;
        if (lineno == 1 && s.find_first_of("0123456789") != 0) continue;  // header
        const auto parts = split(s, ',');
        if (parts.size() != 2) throw ParseError("line " + std::to_string(lineno) + ": expected 'edge_id,value'");
        const auto e = parse_u64(parts[0], "edge id");
        if (e == 0 || e >= t.size()) throw RangeError("line " + std::to_string(lineno) + ": unknown edge " + std::to_string(e));
        if (seen[e]) throw ParseError("line " + std::to_string(lineno) + ": duplicate edge " + std::to_string(e));
        seen[e] = true;
        w[static_cast<EdgeId>(e)] = parse_double(parts[1]);
    }
    for (EdgeId e : t.edges())
        if (!seen[e]) throw ParseError("edge " + std::to_string(e) + " missing from weights file");
    return w;
}

void write_edge_weights_csv(std::ostream& out, const Tree& t, const EdgeWeights& w) {
    const auto old = out.precision(17);
    out << "edge_id,value\n";
    for (EdgeId e : t.edges()) out << e << ',' << w[e] << '\n';
    out.precision(old);
}

DistributionSpec parse_distribution(std::string_view literal) {
    auto s = trim(literal);
    bool is_signed = false;
    if (s.substr(0, 7) == "signed:") {
        is_signed = true;
        s = s.substr(7);
    }
    DistributionSpec d;
    if (s == "cuberoot") {
        d = DistributionSpec::cube_root();
    } else if (s.substr(0, 4) == "exp:") {
        d = DistributionSpec::exponential(parse_double(s.substr(4)));
    } else if (s == "exp") {
        d = DistributionSpec::exponential(1.0);
    } else if (s.substr(0, 5) == "unif:") {
        const auto ab = parse_double_list(s.substr(5));
        if (ab.size() != 2) throw ParseError("uniform literal needs two bounds: '" + std::string(literal) + "'");
        d = DistributionSpec::uniform(ab[0], ab[1]);
    } else {
        throw ParseError("unknown distribution literal '" + std::string(literal) + "'");
    }
    d.is_signed = is_signed;
    d.validate();
    return d;
}

TreeSpec parse_tree_spec(std::string_view literal) {
    const auto s = trim(literal);
    const auto parts = split(s, ':');
    const auto& tag = parts[0];
    auto need = [&](std::size_t n) {
        if (parts.size() != n) throw ParseError("malformed tree spec '" + std::string(s) + "'");
    };
    if (tag == "bary") {
        need(3);
        return TreeSpec::b_ary(parse_uint(parts[1]), parse_uint(parts[2]));
    }
    if (tag == "halfline") {
        need(2);
        return TreeSpec::half_line(parse_uint(parts[1]));
    }
    if (tag == "star") {
        need(2);
        return TreeSpec::star(parse_uint(parts[1]));
    }
    if (tag == "dhl") {
        need(2);
        return TreeSpec::double_halfline(parse_uint(parts[1]));
    }
    if (tag == "sphere") {
        if (parts.size() == 3 && parts[1] == "square") return TreeSpec::square_profile(parse_uint(parts[2]));
        need(2);
        std::vector<std::uint64_t> profile;
        for (auto p : split(parts[1], ',')) profile.push_back(parse_u64(p, "profile level"));
        return TreeSpec::spherical(std::move(profile));
    }
    if (tag == "gw") {
        need(4);
        if (parts[1] == "poisson") return TreeSpec::galton_watson(PoissonOffspring{parse_double(parts[2])}, parse_uint(parts[3]));
        if (parts[1] == "pmf") return TreeSpec::galton_watson(PmfOffspring{parse_double_list(parts[2])}, parse_uint(parts[3]));
        throw ParseError("unknown offspring law '" + std::string(parts[1]) + "'");
    }
    return TreeSpec::file(std::string(s));
}

}  // namespace treeglass
