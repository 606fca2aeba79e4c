#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "treeglass/couplings.hpp"
#include "treeglass/electrical.hpp"
#include "treeglass/error.hpp"
#include "treeglass/flow_cut.hpp"
#include "treeglass/groundstate.hpp"
#include "treeglass/io.hpp"
#include "treeglass/lab.hpp"
#include "treeglass/tree.hpp"

using nlohmann::json;
using namespace treeglass;

namespace {

struct InstanceArgs {
    std::string tree;
    std::string dist;
    std::uint64_t seed = 1;
};

struct Instance {
    Tree tree;
    EdgeWeights couplings;
};

void add_instance_options(CLI::App* app, InstanceArgs& args, bool need_dist = true) {
    app->add_option("--tree", args.tree, "Tree spec (bary:B:N, halfline:N, sphere:square:N, dhl:N, ...) or file")
        ->required();
    if (need_dist) {
        app->add_option("--dist", args.dist,
                        "Coupling law (exp:M, unif:A,B, cuberoot, signed:...); optional when the tree file "
                        "carries couplings");
    }
    app->add_option("--seed", args.seed, "Random seed")->capture_default_str();
}

Instance load_instance(const InstanceArgs& args) {
    const TreeSpec spec = parse_tree_spec(args.tree);
    Instance inst;
    if (spec.family == TreeFamily::from_file && args.dist.empty()) {
        TreeFile f = read_tree_file(spec.path);
        if (!f.couplings) throw ParseError(spec.path + " has no couplings; pass --dist");
        inst.tree = spec.depth_limit != 0 && spec.depth_limit < f.tree.depth_limit() ? f.tree.truncated(spec.depth_limit)
                                                                                     : std::move(f.tree);
        inst.couplings = f.couplings->prefix(inst.tree.size());
        return inst;
    }
    if (args.dist.empty()) throw ParseError("--dist is required for generated trees");
    inst.tree = generate(spec, args.seed);
    inst.couplings = sample_couplings(inst.tree, parse_distribution(args.dist), args.seed);
    return inst;
}

EdgeId edge_by_label(const Tree& t, std::uint64_t label) {
    const auto v = t.find_label(label);
    if (!v || *v == Tree::root()) throw RangeError("no edge with id " + std::to_string(label));
    return *v;
}

json labels(const Tree& t, const std::vector<NodeId>& ids) {
    json out = json::array();
    for (NodeId v : ids) out.push_back(t.label(v));
    return out;
}

unsigned resolve_horizon(const Tree& t, std::optional<unsigned> h) {
    const unsigned n = h.value_or(t.depth_limit());
    if (n < 1 || n > t.depth_limit()) {
        throw RangeError("horizon must lie in [1, " + std::to_string(t.depth_limit()) + "]");
    }
    return n;
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << j.dump(2) << '\n';
}

json verdict_json(const Tree& t, const GroundStateVerdict& v) {
    return {{"status", v.pass ? "pass" : "fail"},
            {"k", v.k},
            {"exact", v.k == 0},
            {"horizon", v.horizon},
            {"sets_checked", v.sets_checked},
            {"witness", labels(t, v.witness)},
            {"witness_energy", v.witness_energy}};
}

GroundStateVerdict verify(const Tree& t, const EdgeWeights& j, const SpinConfig& s, std::size_t k) {
    if (k == 0) return verify_ground_state_exact(t, j, s);
    VerifyOptions o;
    o.k = k;
    return verify_ground_state(t, j, s, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-flow, conductance and ground-state tools for spin glasses on trees"};
    app.require_subcommand(1);

    // tree
    InstanceArgs tree_args;
    std::string tree_out;
    auto* tree_cmd = app.add_subcommand("tree", "Generate a tree and write it in TREE v1 form");
    add_instance_options(tree_cmd, tree_args);
    tree_cmd->add_option("--out", tree_out, "Output file (stdout when omitted)");

    // maxflow
    InstanceArgs mf_args;
    std::optional<unsigned> mf_horizon;
    std::vector<std::uint64_t> mf_forced;
    bool emit_cut = false, emit_flow = false;
    auto* mf_cmd = app.add_subcommand("maxflow", "Max flow from the root to level n with capacities |J|");
    add_instance_options(mf_cmd, mf_args);
    mf_cmd->add_option("--horizon", mf_horizon, "Level n (default: tree depth)");
    mf_cmd->add_option("--forced", mf_forced, "Edges whose capacity is raised to infinity")->delimiter(',');
    mf_cmd->add_flag("--emit-cut", emit_cut, "Include a minimum cutset");
    mf_cmd->add_flag("--emit-flow", emit_flow, "Include a maximum flow");

    // cutfun
    InstanceArgs cf_args;
    std::string functional = "invdepth";
    std::vector<unsigned> window;
    auto* cf_cmd = app.add_subcommand("cutfun", "Minimum of a depth functional over cutsets inside a window");
    add_instance_options(cf_cmd, cf_args, false);
    cf_cmd->add_option("--functional", functional, "lambda:X, invdepth or omega:<file>")->capture_default_str();
    cf_cmd->add_option("--window", window, "m,n")->delimiter(',')->expected(2)->required();

    // conductance
    InstanceArgs cond_args;
    std::vector<unsigned> cond_horizons;
    std::string cond_out;
    auto* cond_cmd = app.add_subcommand("conductance", "Unit-conductance sequence and recurrence classification");
    add_instance_options(cond_cmd, cond_args, false);
    cond_cmd->add_option("--horizons", cond_horizons, "Increasing levels")->delimiter(',')->required();
    cond_cmd->add_option("--out", cond_out, "Report file (stdout when omitted)");

    // groundstate
    InstanceArgs gs_args;
    std::size_t gs_k = 8;
    unsigned gs_iterate = 1;
    std::optional<std::uint64_t> gs_defect;
    std::optional<unsigned> gs_horizon, gs_core;
    std::string gs_mode;
    auto* gs_cmd = app.add_subcommand("groundstate", "Ground-state verification, construction and counting");
    gs_cmd->add_option("mode", gs_mode, "verify | construct | count")
        ->required()
        ->check(CLI::IsMember({"verify", "construct", "count"}));
    add_instance_options(gs_cmd, gs_args);
    gs_cmd->add_option("--k", gs_k, "Largest flip set searched; 0 checks every finite set")->capture_default_str();
    gs_cmd->add_option("--iterate", gs_iterate, "construct: number of nested critical edges")->capture_default_str();
    gs_cmd->add_option("--defect", gs_defect, "verify: the defect configuration of this edge (default: natural)");
    gs_cmd->add_option("--horizon", gs_horizon, "construct: flow horizon (default: tree depth)");
    gs_cmd->add_option("--core-depth", gs_core, "count: only edges with |e| below this are candidates");

    // experiment
    std::string exp_tag;
    std::string exp_tree, exp_dist, exp_out, exp_cond_tree;
    std::vector<unsigned> exp_horizons, exp_cond_horizons;
    std::vector<double> exp_t_grid;
    std::optional<std::uint64_t> exp_replicas, exp_seed, exp_max_written;
    std::optional<double> exp_forced_jf, exp_boost, exp_expected, exp_tolerance;
    std::optional<unsigned> exp_boost_levels, exp_core_depth, exp_threads;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment and write its report");
    exp_cmd->add_option("tag", exp_tag, "thm4_sandwich | equivalence_scan | sec31_count | sec32_vanishing | "
                                        "l12_support_probe | l14_kappamin")
        ->required();
    exp_cmd->add_option("--tree", exp_tree, "Tree spec");
    exp_cmd->add_option("--dist", exp_dist, "Coupling law");
    exp_cmd->add_option("--horizons", exp_horizons, "Levels (window starts for l14_kappamin)")->delimiter(',');
    exp_cmd->add_option("--replicas", exp_replicas, "Monte Carlo replicas");
    exp_cmd->add_option("--seed", exp_seed, "Random seed");
    exp_cmd->add_option("--out", exp_out, "Output directory for report.json and samples.csv");
    exp_cmd->add_option("--threads", exp_threads, "Worker threads (default: TREEGLASS_THREADS or all cores)");
    exp_cmd->add_option("--max-written", exp_max_written, "Write at most this many replicas to samples.csv");
    exp_cmd->add_option("--forced-jf", exp_forced_jf, "sec31_count: fix |J_f|");
    exp_cmd->add_option("--core-depth", exp_core_depth, "sec31_count: defect candidates have |e| below this");
    exp_cmd->add_option("--expected", exp_expected, "sec31_count: expected P(count = 4)");
    exp_cmd->add_option("--tolerance", exp_tolerance, "sec31_count: allowed deviation from --expected");
    exp_cmd->add_option("--conductance-tree", exp_cond_tree, "Tree used by the recurrence classifier");
    exp_cmd->add_option("--conductance-horizons", exp_cond_horizons, "Classifier levels")->delimiter(',');
    exp_cmd->add_option("--t-grid", exp_t_grid, "l12_support_probe: tail thresholds")->delimiter(',');
    exp_cmd->add_option("--boost", exp_boost, "l12_support_probe: mean multiplier on the top levels");
    exp_cmd->add_option("--boost-levels", exp_boost_levels, "l12_support_probe: number of boosted levels");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*tree_cmd) {
            const Instance inst = load_instance(tree_args);
            std::ostringstream os;
            write_tree(os, inst.tree, &inst.couplings);
            if (tree_out.empty()) {
                std::cout << os.str();
            } else {
                std::ofstream f(tree_out);
                if (!f) throw Error("cannot write " + tree_out);
                f << os.str();
            }
            return 0;
        }
        if (*mf_cmd) {
            const Instance inst = load_instance(mf_args);
            const Tree& t = inst.tree;
            const unsigned n = resolve_horizon(t, mf_horizon);
            EdgeWeights cap = inst.couplings.abs();
            std::vector<EdgeId> forced;
            for (auto label : mf_forced) forced.push_back(edge_by_label(t, label));
            for (EdgeId e : forced) cap[e] = kUnbounded;
            const double value = max_flow(t, cap, n);
            json out = {{"value", std::isinf(value) ? json("inf") : json(value)}, {"horizon", n}};
            if (emit_cut) {
                if (std::isinf(value)) {
                    out["cut"] = nullptr;
                } else {
                    out["cut"] = labels(t, min_cut(t, cap, n).edges);
                }
            }
            if (emit_flow && !std::isinf(value)) {
                const Flow f = max_flow_witness(t, cap, n);
                json flow = json::array();
                for (EdgeId e : t.edges()) {
                    if (f.theta[e] > 0.0) flow.push_back({{"edge", t.label(e)}, {"theta", f.theta[e]}});
                }
                out["flow"] = flow;
            }
            emit(out, "");
            return 0;
        }
        if (*cf_cmd) {
            const Tree t = generate(parse_tree_spec(cf_args.tree), cf_args.seed);
            CutFunctionalSpec spec;
            if (functional == "invdepth") {
                spec = CutFunctionalSpec::inverse_depth();
            } else if (functional.rfind("lambda:", 0) == 0) {
                spec = CutFunctionalSpec::lambda_power(parse_double(functional.substr(7)));
            } else if (functional.rfind("omega:", 0) == 0) {
                std::ifstream f(functional.substr(6));
                if (!f) throw ParseError("cannot open " + functional.substr(6));
                std::vector<double> omega;
                std::string tok;
                while (f >> tok) {
                    for (double x : parse_double_list(tok)) omega.push_back(x);
                }
                spec = CutFunctionalSpec::weight_seq(std::move(omega));
            } else {
                throw ParseError("unknown functional '" + functional + "'");
            }
            const double v = cutset_functional_min(t, spec, window[0], window[1]);
            emit({{"value", v}, {"window", window}, {"functional", functional}}, "");
            return 0;
        }
        if (*cond_cmd) {
            const Tree t = generate(parse_tree_spec(cond_args.tree), cond_args.seed);
            const ConductanceReport r = classify_recurrence(t, cond_horizons);
            json rows = json::array();
            for (const auto& row : r.rows) rows.push_back({{"horizon", row.horizon}, {"conductance", row.conductance}});
            emit({{"rows", rows},
                  {"classification",
                   {{"result", to_string(r.classification)},
                    {"limit_estimate", r.limit_estimate},
                    {"decrease_per_doubling", r.decrease_per_doubling},
                    {"recurrent_below", r.thresholds.recurrent_below},
                    {"transient_above", r.thresholds.transient_above},
                    {"max_decrease", r.thresholds.max_decrease}}}},
                 cond_out);
            return 0;
        }
        if (*gs_cmd) {
            const Instance inst = load_instance(gs_args);
            const Tree& t = inst.tree;
            const EdgeWeights& j = inst.couplings;
            if (gs_mode == "verify") {
                SpinConfig s = gs_defect ? defect_config(t, j, edge_by_label(t, *gs_defect)) : natural_ground_state(t, j);
                json out = verdict_json(t, verify(t, j, s, gs_k));
                out["configuration"] = gs_defect ? "defect:" + std::to_string(*gs_defect) : std::string("natural");
                emit(out, "");
                return out["status"] == "pass" ? 0 : 1;
            }
            if (gs_mode == "construct") {
                const unsigned n = resolve_horizon(t, gs_horizon);
                const auto edges = find_critical_edges(t, j, n, gs_iterate);
                json list = json::array();
                bool all_pass = true;
                for (const auto& c : edges) {
                    const auto v = verify(t, j, defect_config(t, j, c.h), gs_k);
                    all_pass = all_pass && v.pass;
                    list.push_back({{"h", t.label(c.h)},
                                    {"new_root", t.label(c.new_root)},
                                    {"split_vertex", t.label(c.split_vertex)},
                                    {"n_tilde", c.n_tilde},
                                    {"mf0", c.mf0},
                                    {"mf_n_tilde", c.mf_n_tilde},
                                    {"horizon", c.horizon},
                                    {"verdict", verdict_json(t, v)}});
                }
                emit({{"critical_edges", list}}, "");
                return all_pass ? 0 : 1;
            }
            CountOptions o;
            if (gs_k > 0) o.k = gs_k;
            o.core_depth = gs_core;
            const GroundStateCount c = count_single_defect_ground_states(t, j, o);
            emit({{"count", c.count}, {"defect_edges", labels(t, c.defect_edges)}, {"k", c.k}, {"exact", c.k == 0},
                  {"horizon", t.depth_limit()}},
                 "");
            return 0;
        }
        if (*exp_cmd) {
            const ExperimentTag tag = parse_experiment_tag(exp_tag);
            ExperimentConfig cfg = default_config(tag);
            if (!exp_tree.empty()) {
                cfg.tree = exp_tree;
                cfg.cells.clear();
            }
            if (!exp_dist.empty()) {
                cfg.dist = exp_dist;
                cfg.cells.clear();
            }
            if (!exp_horizons.empty()) cfg.horizons = exp_horizons;
            if (exp_replicas) cfg.replicas = *exp_replicas;
            if (exp_seed) cfg.seed = *exp_seed;
            if (!exp_out.empty()) cfg.out_dir = exp_out;
            if (exp_threads) cfg.threads = *exp_threads;
            if (exp_max_written) cfg.max_written_replicas = *exp_max_written;
            if (exp_forced_jf) cfg.forced_jf = *exp_forced_jf;
            if (exp_core_depth) cfg.core_depth = *exp_core_depth;
            if (exp_expected) cfg.expected_probability = *exp_expected;
            if (exp_tolerance) cfg.probability_tolerance = *exp_tolerance;
            if (!exp_cond_tree.empty()) cfg.conductance_tree = exp_cond_tree;
            if (!exp_cond_horizons.empty()) cfg.conductance_horizons = exp_cond_horizons;
            if (!exp_t_grid.empty()) cfg.t_grid = exp_t_grid;
            if (exp_boost) cfg.boost = *exp_boost;
            if (exp_boost_levels) cfg.boost_levels = *exp_boost_levels;
            if (tag == ExperimentTag::equivalence_scan && cfg.cells.empty() && (cfg.tree.empty() || cfg.dist.empty())) {
                throw ParseError("equivalence_scan needs both --tree and --dist for a single cell");
            }

            const ExperimentReport rep = run_experiment(cfg);
            for (const auto& f : rep.flags) {
                std::printf("%-4s %-44s value=%.6g\n", f.passed ? "ok" : "FAIL", f.name.c_str(), f.value);
            }
            if (cfg.out_dir) std::printf("report written to %s\n", cfg.out_dir->string().c_str());
            std::printf("%s\n", rep.passed() ? "PASSED" : "FAILED");
            return rep.passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "treeglass: %s\n", e.what());
        return 2;
    }
    return 0;
}
