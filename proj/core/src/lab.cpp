#include "treeglass/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "treeglass/couplings.hpp"
#include "treeglass/electrical.hpp"
#include "treeglass/error.hpp"
#include "treeglass/flow_cut.hpp"
#include "treeglass/groundstate.hpp"
#include "treeglass/io.hpp"
#include "treeglass/rng.hpp"
#include "treeglass/stats.hpp"
#include "treeglass/tree.hpp"

namespace treeglass {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentTag, std::string>>& tag_names() {
    static const std::vector<std::pair<ExperimentTag, std::string>> names = {
        {ExperimentTag::thm4_sandwich, "thm4_sandwich"},
        {ExperimentTag::equivalence_scan, "equivalence_scan"},
        {ExperimentTag::sec31_count, "sec31_count"},
        {ExperimentTag::sec32_vanishing, "sec32_vanishing"},
        {ExperimentTag::l12_support_probe, "l12_support_probe"},
        {ExperimentTag::l14_kappamin, "l14_kappamin"},
    };
    return names;
}

constexpr const char* kPolicyNote =
    "Tolerances and classification thresholds in the flags are fixed policy of this tool; "
    "finite-horizon statistics carry no analytic error bars.";

json summary_json(const Summary& s) {
    return {{"n", s.n},         {"mean", s.mean},       {"stddev", s.stddev}, {"std_error", s.std_error},
            {"ci_low", s.ci_low}, {"ci_high", s.ci_high}, {"min", s.min},       {"q05", s.q05},
            {"q25", s.q25},     {"median", s.median},   {"q75", s.q75},       {"q95", s.q95},
            {"max", s.max}};
}

json proportion_json(const Proportion& p) {
    return {{"successes", p.successes}, {"trials", p.trials}, {"estimate", p.estimate},
            {"low", p.low},             {"high", p.high},     {"confidence", p.confidence}};
}

std::string horizon_label(const std::string& base, unsigned n) { return base + "[n=" + std::to_string(n) + "]"; }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

Tree make_tree(const std::string& literal, std::uint64_t seed) {
    if (literal.empty()) throw ParseError("experiment needs a tree spec");
    return generate(parse_tree_spec(literal), seed);
}

void check_horizons(const std::vector<unsigned>& hs, const Tree& t, std::size_t min_count = 1) {
    if (hs.size() < min_count) {
        throw RangeError("experiment needs at least " + std::to_string(min_count) + " horizon(s)");
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (hs[i] < 1 || hs[i] > t.depth_limit()) {
            throw RangeError("horizon " + std::to_string(hs[i]) + " outside [1, " + std::to_string(t.depth_limit()) +
                             "]");
        }
        if (i > 0 && hs[i] <= hs[i - 1]) throw RangeError("horizons must increase");
    }
}

// Capacities |J_e| of replica r, reusing `cap`.
void replica_capacities(const DistributionSpec& d, std::uint64_t seed, std::uint64_t r, EdgeWeights& cap) {
    sample_couplings_into(d, CounterRng(seed).child(r), cap);
    for (std::size_t e = 1; e < cap.size(); ++e) cap[static_cast<EdgeId>(e)] = std::abs(cap[static_cast<EdgeId>(e)]);
}

std::vector<double> column(const std::vector<double>& values, std::size_t stride, std::size_t col) {
    std::vector<double> out;
    out.reserve(values.size() / stride);
    for (std::size_t i = col; i < values.size(); i += stride) out.push_back(values[i]);
    return out;
}

ExperimentReport new_report(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.tag = cfg.tag;
    rep.config = cfg.to_json();
    rep.max_written_replicas = cfg.max_written_replicas;
    return rep;
}

void push_samples(ExperimentReport& rep, const std::vector<double>& values, const std::vector<unsigned>& hs) {
    const std::size_t h = hs.size();
    rep.samples.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        rep.samples.push_back({i / h, hs[i % h], values[i]});
    }
}

enum class Trend { vanishing, persistent, inconclusive };

std::string to_string(Trend t) {
    switch (t) {
        case Trend::vanishing:
            return "vanishing";
        case Trend::persistent:
            return "persistent";
        case Trend::inconclusive:
            break;
    }
    return "inconclusive";
}

// Equivalence-scan thresholds.
constexpr double kFlowDecaySlope = -0.5;    // log-log slope of the median at or below: vanishing
constexpr double kFlowBoundedSlope = -0.15;  // at or above: persistent
constexpr double kHitVanishing = 0.05;
constexpr double kHitPersistent = 0.5;

}  // namespace

std::string to_string(ExperimentTag tag) {
    for (const auto& [t, name] : tag_names()) {
        if (t == tag) return name;
    }
    return "unknown";
}

ExperimentTag parse_experiment_tag(std::string_view name) {
    for (const auto& [t, n] : tag_names()) {
        if (n == name) return t;
    }
    throw ParseError("unknown experiment '" + std::string(name) + "'");
}

const std::vector<ExperimentTag>& all_experiment_tags() {
    static const std::vector<ExperimentTag> tags = [] {
        std::vector<ExperimentTag> v;
        for (const auto& [t, n] : tag_names()) v.push_back(t);
        return v;
    }();
    return tags;
}

void ExperimentConfig::validate() const {
    if (replicas < 1) throw RangeError("replicas must be >= 1");
    for (std::size_t i = 1; i < horizons.size(); ++i) {
        if (horizons[i] <= horizons[i - 1]) throw RangeError("horizons must increase");
    }
    if (!dist.empty()) parse_distribution(dist).validate();
    if (!(probability_tolerance >= 0.0)) throw RangeError("probability tolerance must be >= 0");
    if (!(boost > 0.0)) throw RangeError("boost factor must be > 0");
    for (double t : t_grid) {
        if (!std::isfinite(t)) throw RangeError("t grid must be finite");
    }
}

json ExperimentConfig::to_json() const {
    json j = {
        {"experiment", to_string(tag)},
        {"tree", tree},
        {"dist", dist},
        {"horizons", horizons},
        {"replicas", replicas},
        {"seed", seed},
        {"threads", resolve_threads(threads)},
        {"max_written_replicas", max_written_replicas},
    };
    if (out_dir) j["out_dir"] = out_dir->string();
    switch (tag) {
        case ExperimentTag::sec31_count:
            j["forced_jf"] = forced_jf ? json(*forced_jf) : json(nullptr);
            j["core_depth"] = core_depth ? json(*core_depth) : json(nullptr);
            j["expected_probability"] = expected_probability ? json(*expected_probability) : json(nullptr);
            j["probability_tolerance"] = probability_tolerance;
            break;
        case ExperimentTag::sec32_vanishing:
            j["conductance_tree"] = conductance_tree;
            j["conductance_horizons"] = conductance_horizons;
            j["path_minimum_orders"] = path_minimum_orders;
            j["path_minimum_samples"] = path_minimum_samples;
            j["path_minimum_tolerance"] = path_minimum_tolerance;
            break;
        case ExperimentTag::l12_support_probe:
            j["t_grid"] = t_grid;
            j["boost"] = boost;
            j["boost_levels"] = boost_levels;
            break;
        case ExperimentTag::equivalence_scan: {
            json cs = json::array();
            for (const auto& c : cells) {
                cs.push_back({{"name", c.name},
                              {"tree", c.tree},
                              {"dist", c.dist},
                              {"horizons", c.horizons},
                              {"conductance_tree", c.conductance_tree},
                              {"conductance_horizons", c.conductance_horizons},
                              {"expect_exception", c.expect_exception}});
            }
            j["cells"] = cs;
            break;
        }
        default:
            break;
    }
    return j;
}

std::vector<ScanCell> default_scan_grid() {
    std::vector<ScanCell> cells;
    const std::vector<std::pair<std::string, std::string>> dists = {{"unif01", "unif:0,1"}, {"exp1", "exp:1"}};
    for (const auto& [dname, dlit] : dists) {
        cells.push_back({"halfline-" + dname, "halfline:256", dlit, {32, 64, 128, 256}, "halfline:16384",
                         {1024, 16384}, false});
        cells.push_back({"binary-" + dname, "bary:2:12", dlit, {4, 8, 12}, "bary:2:16", {8, 16}, false});
        cells.push_back({"square-" + dname, "sphere:square:32", dlit, {8, 16, 32}, "sphere:square:128",
                         {64, 128}, false});
    }
    cells.push_back({"square-cuberoot", "sphere:square:32", "cuberoot", {8, 16, 32}, "sphere:square:128",
                     {64, 128}, true});
    return cells;
}

ExperimentConfig default_config(ExperimentTag tag) {
    ExperimentConfig c;
    c.tag = tag;
    switch (tag) {
        case ExperimentTag::thm4_sandwich:
            c.tree = "bary:2:8";
            c.dist = "exp:1";
            c.horizons = {8};
            c.replicas = 100'000;
            break;
        case ExperimentTag::equivalence_scan:
            c.replicas = 400;
            c.cells = default_scan_grid();
            break;
        case ExperimentTag::sec31_count:
            c.tree = "dhl:200";
            c.dist = "unif:1,3";
            c.replicas = 10'000;
            break;
        case ExperimentTag::sec32_vanishing:
            c.tree = "sphere:square:40";
            c.dist = "cuberoot";
            c.horizons = {10, 20, 40};
            c.replicas = 2000;
            c.conductance_tree = "sphere:square:128";
            c.conductance_horizons = {64, 128};
            break;
        case ExperimentTag::l12_support_probe:
            c.tree = "bary:2:8";
            c.dist = "exp:1";
            c.horizons = {8};
            c.replicas = 100'000;
            c.t_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
            break;
        case ExperimentTag::l14_kappamin:
            c.tree = "dhl:64";
            c.dist = "exp:1";
            c.horizons = {2, 4, 8, 16, 31};
            c.replicas = 2000;
            break;
    }
    return c;
}

Flag Flag::check(std::string name, double value, std::optional<double> lower, std::optional<double> upper,
                 std::string rule) {
    Flag f;
    f.name = std::move(name);
    f.value = value;
    f.lower = lower;
    f.upper = upper;
    f.rule = std::move(rule);
    f.passed = !std::isnan(value) && (!lower || value >= *lower) && (!upper || value <= *upper);
    return f;
}

json Flag::to_json() const {
    return {{"name", name},
            {"passed", passed},
            {"value", value},
            {"lower", lower ? json(*lower) : json(nullptr)},
            {"upper", upper ? json(*upper) : json(nullptr)},
            {"rule", rule}};
}

bool ExperimentReport::passed() const {
    for (const auto& f : flags) {
        if (!f.passed) return false;
    }
    for (const auto& [name, child] : children) {
        if (!child.passed()) return false;
    }
    return true;
}

const Flag* ExperimentReport::find_flag(std::string_view name) const {
    for (const auto& f : flags) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

namespace {

std::uint64_t sample_stride(std::uint64_t replicas, std::uint64_t max_written) {
    if (max_written == 0 || replicas <= max_written) return 1;
    return (replicas + max_written - 1) / max_written;
}

std::uint64_t replica_count(const std::vector<Sample>& samples) {
    std::uint64_t n = 0;
    for (const auto& s : samples) n = std::max(n, s.replica + 1);
    return n;
}

}  // namespace

json ExperimentReport::to_json() const {
    json flags_json = json::array();
    for (const auto& f : flags) flags_json.push_back(f.to_json());
    const std::uint64_t stride = sample_stride(replica_count(samples), max_written_replicas);
    json j = {
        {"schema", kReportSchema},
        {"experiment", treeglass::to_string(tag)},
        {"config", config},
        {"rng",
         {{"generator", "splitmix64 counter hash"},
          {"seed", config.value("seed", std::uint64_t{0})},
          {"replica_key", "CounterRng(seed).child(replica)"},
          {"streams", {{"magnitude", rng_stream::kMagnitude}, {"sign", rng_stream::kSign},
                       {"offspring", rng_stream::kOffspring}, {"auxiliary", rng_stream::kAuxiliary}}}}},
        {"results", results},
        {"flags", flags_json},
        {"passed", passed()},
        {"policy", kPolicyNote},
        {"samples", {{"file", "samples.csv"}, {"rows", samples.size()}, {"replica_stride", stride},
                     {"downsampled", stride > 1}}},
    };
    if (!tables.empty()) {
        json t = json::array();
        for (const auto& tab : tables) t.push_back({{"file", tab.name}, {"rows", tab.rows.size()}});
        j["tables"] = t;
    }
    if (!children.empty()) {
        json c = json::array();
        for (const auto& [name, child] : children) c.push_back({{"name", name}, {"passed", child.passed()}});
        j["children"] = c;
    }
    return j;
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        if (!out) throw Error("cannot write " + (dir / "report.json").string());
        out << to_json().dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "samples.csv");
        if (!out) throw Error("cannot write " + (dir / "samples.csv").string());
        out << "replica,horizon,value\n";
        const std::uint64_t stride = sample_stride(replica_count(samples), max_written_replicas);
        for (const auto& s : samples) {
            if (s.replica % stride != 0) continue;
            out << s.replica << ',' << s.horizon << ',' << fmt(s.value) << '\n';
        }
    }
    for (const auto& tab : tables) {
        std::ofstream out(dir / tab.name);
        if (!out) throw Error("cannot write " + (dir / tab.name).string());
        out << tab.header << '\n';
        for (const auto& row : tab.rows) out << row << '\n';
    }
    for (const auto& [name, child] : children) child.write(dir / name);
}

std::vector<Sample> read_samples_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::vector<Sample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (lineno == 1 && line.rfind("replica", 0) == 0)) continue;
        std::istringstream row(line);
        Sample s;
        char c1 = 0, c2 = 0;
        if (!(row >> s.replica >> c1 >> s.horizon >> c2 >> s.value) || c1 != ',' || c2 != ',') {
            throw ParseError(file.string() + ":" + std::to_string(lineno) + ": malformed sample row");
        }
        out.push_back(s);
    }
    return out;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TREEGLASS_THREADS")) {
        try {
            const unsigned n = parse_uint(env);
            if (n > 0) return n;
        } catch (const ParseError&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t, std::uint64_t)>& body) {
    if (count == 0) return;
    const std::uint64_t workers = std::min<std::uint64_t>(std::max(1u, threads), count);
    if (workers == 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::uint64_t chunk = (count + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

ExperimentReport run_thm4_sandwich(const ExperimentConfig& cfg) {
    cfg.validate();
    const DistributionSpec d = parse_distribution(cfg.dist);
    if (d.family != DistFamily::exponential) throw RangeError("thm4_sandwich needs an exponential law");
    const Tree t = make_tree(cfg.tree, cfg.seed);
    check_horizons(cfg.horizons, t);
    const auto& hs = cfg.horizons;
    const std::size_t H = hs.size();
    const double mean = d.a;

    std::vector<double> values(cfg.replicas * H);
    parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::uint64_t b, std::uint64_t e) {
        EdgeWeights cap(t);
        std::vector<double> scratch;
        for (std::uint64_t r = b; r < e; ++r) {
            replica_capacities(d, cfg.seed, r, cap);
            for (std::size_t i = 0; i < H; ++i) values[r * H + i] = max_flow(t, cap, hs[i], scratch);
        }
    });

    bool is_path = true;
    for (NodeId v = 0; v < t.size(); ++v) is_path = is_path && t.child_count(v) <= 1;

    ExperimentReport rep = new_report(cfg);
    json rows = json::array();
    const EdgeWeights cond(t, mean);
    for (std::size_t i = 0; i < H; ++i) {
        const unsigned n = hs[i];
        const Summary s = summarize(column(values, H, i));
        const double c = effective_conductance(t, cond, n);
        json row = {{"horizon", n},
                    {"max_flow", summary_json(s)},
                    {"conductance", c},
                    {"ratio", s.mean / c},
                    {"ci_strictly_inside", s.ci_low > c && s.ci_high < 2.0 * c}};
        rep.flags.push_back(Flag::check(horizon_label("conductance_below_mean", n), s.ci_high, c, std::nullopt,
                                        "3-sigma upper end of E[MF] >= C_n"));
        rep.flags.push_back(Flag::check(horizon_label("mean_below_twice_conductance", n), s.ci_low, std::nullopt,
                                        2.0 * c, "3-sigma lower end of E[MF] <= 2 C_n"));
        if (is_path) {
            const double ref = expected_path_minimum(d.magnitude(), n).value;
            row["path_minimum"] = ref;
            rep.flags.push_back(Flag::check(horizon_label("path_minimum", n), ref, s.ci_low, s.ci_high,
                                            "E[min of n draws] inside the 3-sigma interval of E[MF]"));
        }
        rows.push_back(row);
    }
    rep.results = {{"tree_nodes", t.size()}, {"mean", mean}, {"horizons", rows}};
    push_samples(rep, values, hs);
    return rep;
}

ExperimentReport run_sec31_count(const ExperimentConfig& cfg) {
    cfg.validate();
    const TreeSpec spec = parse_tree_spec(cfg.tree);
    if (spec.family != TreeFamily::double_halfline) throw RangeError("sec31_count needs a dhl:N tree");
    const DistributionSpec d = parse_distribution(cfg.dist);
    if (d.magnitude() != DistributionSpec::uniform(1.0, 3.0)) {
        throw RangeError("sec31_count needs the uniform law on (1, 3)");
    }
    const Tree t = generate(spec, cfg.seed);
    const EdgeId f = double_halfline_center_edge();
    CountOptions opts;
    opts.core_depth = cfg.core_depth;

    std::vector<double> counts(cfg.replicas);
    std::vector<double> jf(cfg.replicas);
    parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::uint64_t b, std::uint64_t e) {
        EdgeWeights j(t);
        for (std::uint64_t r = b; r < e; ++r) {
            sample_couplings_into(d, CounterRng(cfg.seed).child(r), j);
            if (cfg.forced_jf) j[f] = std::copysign(*cfg.forced_jf, j[f]);
            jf[r] = j[f];
            counts[r] = static_cast<double>(count_single_defect_ground_states(t, j, opts).count);
        }
    });

    std::map<std::uint64_t, std::uint64_t> histogram;
    std::uint64_t fours = 0;
    for (double c : counts) {
        ++histogram[static_cast<std::uint64_t>(c)];
        fours += c == 4.0;
    }
    const Proportion p = clopper_pearson(fours, cfg.replicas);
    const double expected = cfg.expected_probability.value_or(!cfg.forced_jf ? 0.5 : (*cfg.forced_jf <= 2.0 ? 1.0 : 0.0));

    ExperimentReport rep = new_report(cfg);
    json hist = json::object();
    for (const auto& [k, v] : histogram) hist[std::to_string(k)] = v;
    rep.results = {
        {"depth", t.depth_limit()},
        {"center_edge", f},
        {"p_count_4", proportion_json(p)},
        {"expected", expected},
        {"histogram", hist},
        {"truncation_note",
         "Counts use the finite-depth criterion: a defect on edge h is kept when no finite flip set of the "
         "depth-" + std::to_string(t.depth_limit()) +
             " tree lowers its energy. Candidate edges are those with |e| < core_depth. A root-adjacent "
             "half-line edge that is the smallest coupling on its truncated half-line also passes, which "
             "happens with probability about 2/depth and vanishes as the depth grows."},
    };
    rep.flags.push_back(Flag::check("p_count_4", p.estimate, expected - cfg.probability_tolerance,
                                    expected + cfg.probability_tolerance,
                                    "|P(count = 4) - expected| <= tolerance"));
    for (std::uint64_t r = 0; r < cfg.replicas; ++r) rep.samples.push_back({r, t.depth_limit(), counts[r]});
    ExperimentReport::Table tab{"center_coupling.csv", "replica,j_f", {}};
    tab.rows.reserve(cfg.replicas);
    for (std::uint64_t r = 0; r < cfg.replicas; ++r) tab.rows.push_back(std::to_string(r) + "," + fmt(jf[r]));
    rep.tables.push_back(std::move(tab));
    return rep;
}

ExperimentReport run_sec32_vanishing(const ExperimentConfig& cfg) {
    cfg.validate();
    const DistributionSpec d = parse_distribution(cfg.dist);
    const Tree t = make_tree(cfg.tree, cfg.seed);
    check_horizons(cfg.horizons, t);
    const auto& hs = cfg.horizons;
    const std::size_t H = hs.size();

    std::vector<double> values(cfg.replicas * H);
    parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::uint64_t b, std::uint64_t e) {
        EdgeWeights cap(t);
        std::vector<double> scratch;
        for (std::uint64_t r = b; r < e; ++r) {
            replica_capacities(d, cfg.seed, r, cap);
            for (std::size_t i = 0; i < H; ++i) values[r * H + i] = max_flow(t, cap, hs[i], scratch);
        }
    });

    ExperimentReport rep = new_report(cfg);
    const double limit = std::numbers::pi * std::numbers::pi / 6.0;
    const EdgeWeights unit(t, 1.0);
    json rows = json::array();
    for (std::size_t i = 0; i < H; ++i) {
        const unsigned n = hs[i];
        const Summary s = summarize(column(values, H, i));
        const auto nd = static_cast<double>(n);
        const double paper_bound = 6.0 * (nd + 1.0) * (nd + 1.0) / (nd * nd * nd);
        const double level_bound =
            static_cast<double>(t.edge_level(n - 1).size()) * expected_path_minimum(d.magnitude(), n).value;
        // Energy of the level-uniform unit flow theta(e) = 1/|E_|e||.
        double partial = 0.0;
        for (unsigned k = 0; k < n; ++k) partial += 1.0 / static_cast<double>(t.edge_level(k).size());
        const double resistance = 1.0 / effective_conductance(t, unit, n);
        rows.push_back({{"horizon", n},
                        {"max_flow", summary_json(s)},
                        {"paper_bound", paper_bound},
                        {"level_cutset_bound", level_bound},
                        {"level_uniform_energy", partial},
                        {"effective_resistance", resistance}});
        rep.flags.push_back(Flag::check(horizon_label("mean_below_paper_bound", n), s.ci_high, std::nullopt,
                                        paper_bound, "3-sigma upper end of E[MF] <= 6(n+1)^2/n^3"));
        rep.flags.push_back(Flag::check(horizon_label("mean_below_level_cutset_bound", n), s.ci_high,
                                        std::nullopt, level_bound,
                                        "3-sigma upper end of E[MF] <= |E_(n-1)| E[min of n draws]"));
        rep.flags.push_back(Flag::check(horizon_label("unit_flow_energy", n), partial, std::nullopt, limit,
                                        "sum over k < n of 1/|E_k| <= pi^2/6"));
    }

    const Tree ct = cfg.conductance_tree.empty() ? t : make_tree(cfg.conductance_tree, cfg.seed);
    std::vector<unsigned> chs = cfg.conductance_horizons;
    if (chs.empty()) chs = H >= 2 ? std::vector<unsigned>{hs[H - 2], hs[H - 1]} : hs;
    check_horizons(chs, ct);
    const ConductanceReport cr = classify_recurrence(ct, chs);
    json crows = json::array();
    for (const auto& row : cr.rows) crows.push_back({{"horizon", row.horizon}, {"conductance", row.conductance}});
    rep.flags.push_back(Flag::check("classified_transient", cr.classification == Recurrence::transient ? 1.0 : 0.0,
                                    1.0, std::nullopt, "unit-conductance classifier reports transient"));

    json pm = json::array();
    for (unsigned m : cfg.path_minimum_orders) {
        const Estimate exact = expected_path_minimum(d.magnitude(), m);
        const Estimate mc = monte_carlo_path_minimum(d.magnitude(), m, cfg.path_minimum_samples, cfg.seed + m);
        const double rel = std::abs(mc.value - exact.value) / exact.value;
        pm.push_back({{"m", m},
                      {"reference", exact.value},
                      {"reference_exact", exact.exact},
                      {"monte_carlo", mc.value},
                      {"std_error", mc.std_error},
                      {"relative_error", rel}});
        rep.flags.push_back(Flag::check("path_minimum[m=" + std::to_string(m) + "]", rel, std::nullopt,
                                        cfg.path_minimum_tolerance,
                                        "|MC - reference| / reference <= tolerance"));
    }

    rep.results = {
        {"tree_nodes", t.size()},
        {"horizons", rows},
        {"pi2_over_6", limit},
        {"classifier",
         {{"tree", cfg.conductance_tree.empty() ? cfg.tree : cfg.conductance_tree},
          {"rows", crows},
          {"decrease_per_doubling", cr.decrease_per_doubling},
          {"limit_estimate", cr.limit_estimate},
          {"classification", to_string(cr.classification)}}},
        {"path_minimum", pm},
    };
    push_samples(rep, values, hs);
    return rep;
}

ExperimentReport run_l12_support_probe(const ExperimentConfig& cfg) {
    cfg.validate();
    const DistributionSpec d = parse_distribution(cfg.dist);
    if (d.family != DistFamily::exponential) throw RangeError("l12_support_probe needs an exponential law");
    const Tree t = make_tree(cfg.tree, cfg.seed);
    check_horizons(cfg.horizons, t);
    if (cfg.t_grid.empty()) throw RangeError("l12_support_probe needs a t grid");
    const auto& hs = cfg.horizons;
    const std::size_t H = hs.size();
    const bool boosted = cfg.boost_levels > 0 && cfg.boost != 1.0;

    std::vector<double> values(cfg.replicas * H);
    std::vector<double> boosted_values(boosted ? cfg.replicas * H : 0);
    parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::uint64_t b, std::uint64_t e) {
        EdgeWeights cap(t);
        std::vector<double> scratch;
        for (std::uint64_t r = b; r < e; ++r) {
            replica_capacities(d, cfg.seed, r, cap);
            for (std::size_t i = 0; i < H; ++i) values[r * H + i] = max_flow(t, cap, hs[i], scratch);
            if (!boosted) continue;
            // Same uniforms, mean scaled by `boost` on the top levels.
            for (EdgeId x : t.edges()) {
                if (t.edge_depth(x) < cfg.boost_levels) cap[x] *= cfg.boost;
            }
            for (std::size_t i = 0; i < H; ++i) boosted_values[r * H + i] = max_flow(t, cap, hs[i], scratch);
        }
    });

    ExperimentReport rep = new_report(cfg);
    json rows = json::array();
    const double t_max = *std::max_element(cfg.t_grid.begin(), cfg.t_grid.end());
    for (std::size_t i = 0; i < H; ++i) {
        const unsigned n = hs[i];
        const auto col = column(values, H, i);
        json tail = json::array();
        std::vector<double> bcol;
        if (boosted) bcol = column(boosted_values, H, i);
        bool dominates = true;
        for (double x : cfg.t_grid) {
            const auto k = static_cast<std::uint64_t>(std::count_if(col.begin(), col.end(), [&](double v) { return v > x; }));
            json row = {{"t", x}, {"tail", proportion_json(clopper_pearson(k, col.size()))}};
            if (boosted) {
                const auto kb = static_cast<std::uint64_t>(
                    std::count_if(bcol.begin(), bcol.end(), [&](double v) { return v > x; }));
                row["boosted_tail"] = proportion_json(clopper_pearson(kb, bcol.size()));
                dominates = dominates && kb >= k;
            }
            tail.push_back(row);
            if (x == t_max) {
                rep.flags.push_back(Flag::check(horizon_label("tail_positive", n), static_cast<double>(k), 1.0,
                                                std::nullopt, "at least one replica with MF > largest t"));
            }
        }
        json row = {{"horizon", n}, {"max_flow", summary_json(summarize(col))}, {"tail", tail}};
        if (boosted) {
            std::uint64_t pathwise = 0;
            for (std::size_t r = 0; r < col.size(); ++r) pathwise += bcol[r] >= col[r];
            row["boosted_max_flow"] = summary_json(summarize(bcol));
            rep.flags.push_back(Flag::check(horizon_label("boost_dominates", n),
                                            static_cast<double>(pathwise) / static_cast<double>(col.size()), 1.0,
                                            std::nullopt, "boosted MF >= unboosted MF in every paired replica"));
            rep.flags.push_back(Flag::check(horizon_label("boost_tail_dominates", n), dominates ? 1.0 : 0.0, 1.0,
                                            std::nullopt, "boosted tail count >= unboosted at every t"));
        }
        rows.push_back(row);
    }
    rep.results = {{"tree_nodes", t.size()}, {"horizons", rows}, {"boost", cfg.boost}, {"boost_levels", cfg.boost_levels}};
    push_samples(rep, values, hs);
    if (boosted) {
        ExperimentReport::Table tab{"samples_boosted.csv", "replica,horizon,value", {}};
        for (std::size_t i = 0; i < boosted_values.size(); ++i) {
            tab.rows.push_back(std::to_string(i / H) + "," + std::to_string(hs[i % H]) + "," + fmt(boosted_values[i]));
        }
        rep.tables.push_back(std::move(tab));
    }
    return rep;
}

ExperimentReport run_l14_kappamin(const ExperimentConfig& cfg) {
    cfg.validate();
    const DistributionSpec d = parse_distribution(cfg.dist);
    const Tree t = make_tree(cfg.tree, cfg.seed);
    const auto& ms = cfg.horizons;
    if (ms.empty()) throw RangeError("l14_kappamin needs window starts");
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (ms[i] < 1 || 2 * ms[i] + 1 > t.depth_limit()) {
            throw RangeError("window [" + std::to_string(ms[i]) + ", " + std::to_string(2 * ms[i]) +
                             "] needs depth " + std::to_string(2 * ms[i] + 1));
        }
        if (i > 0 && ms[i] <= ms[i - 1]) throw RangeError("window starts must increase");
    }
    const std::size_t W = ms.size();
    std::vector<double> plain(cfg.replicas * W), kmin(cfg.replicas * W);
    parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::uint64_t b, std::uint64_t e) {
        EdgeWeights cap(t);
        for (std::uint64_t r = b; r < e; ++r) {
            replica_capacities(d, cfg.seed, r, cap);
            const EdgeWeights km = kappa_min_transform(t, cap);
            for (std::size_t i = 0; i < W; ++i) {
                plain[r * W + i] = window_cut_min(t, cap, ms[i], 2 * ms[i]);
                kmin[r * W + i] = window_cut_min(t, km, ms[i], 2 * ms[i]);
            }
        }
    });

    ExperimentReport rep = new_report(cfg);
    std::vector<double> gaps(plain.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = plain[i] - kmin[i];
    json rows = json::array();
    double min_rel_gap = kUnbounded;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        min_rel_gap = std::min(min_rel_gap, gaps[i] / std::max(1.0, plain[i]));
    }
    for (std::size_t i = 0; i < W; ++i) {
        const unsigned m = ms[i];
        rows.push_back({{"window", {m, 2 * m}},
                        {"min_cut_kappa", summary_json(summarize(column(plain, W, i)))},
                        {"min_cut_kappa_min", summary_json(summarize(column(kmin, W, i)))},
                        {"gap", summary_json(summarize(column(gaps, W, i)))},
                        {"inverse_depth_functional",
                         cutset_functional_min(t, CutFunctionalSpec::inverse_depth(), m, 2 * m)}});
    }
    rep.flags.push_back(Flag::check("gap_nonnegative", min_rel_gap, -kRelTol, std::nullopt,
                                    "min cut of kappa >= min cut of kappa_min in every replica and window"));
    rep.results = {{"tree_nodes", t.size()}, {"windows", rows}};
    push_samples(rep, gaps, ms);
    ExperimentReport::Table tab{"window_sums.csv", "replica,window_start,kappa,kappa_min", {}};
    for (std::size_t i = 0; i < plain.size(); ++i) {
        tab.rows.push_back(std::to_string(i / W) + "," + std::to_string(ms[i % W]) + "," + fmt(plain[i]) + "," +
                           fmt(kmin[i]));
    }
    rep.tables.push_back(std::move(tab));
    return rep;
}

namespace {

ExperimentReport run_scan_cell(const ExperimentConfig& cfg, const ScanCell& cell) {
    const DistributionSpec d = parse_distribution(cell.dist);
    const DistributionSpec law = d.is_signed ? d : DistributionSpec::signed_variant(d);
    const Tree t = make_tree(cell.tree, cfg.seed);
    check_horizons(cell.horizons, t, 2);
    const auto& hs = cell.horizons;
    const std::size_t H = hs.size();
    const std::size_t P = H - 1;

    std::vector<Tree> verify_trees;
    for (std::size_t i = 0; i < P; ++i) verify_trees.push_back(t.truncated(hs[i + 1]));

    std::vector<double> flows(cfg.replicas * H);
    // Per pair: 0 none found, 1 found but rejected at the deeper horizon, 2 hit.
    std::vector<int> outcome(cfg.replicas * P);
    parallel_for(cfg.replicas, resolve_threads(cfg.threads), [&](std::uint64_t b, std::uint64_t e) {
        EdgeWeights j(t);
        std::vector<double> scratch;
        for (std::uint64_t r = b; r < e; ++r) {
            sample_couplings_into(law, CounterRng(cfg.seed).child(r), j);
            const EdgeWeights cap = j.abs();
            for (std::size_t i = 0; i < H; ++i) flows[r * H + i] = max_flow(t, cap, hs[i], scratch);
            for (std::size_t i = 0; i < P; ++i) {
                const Tree& tv = verify_trees[i];
                const EdgeWeights jv = j.prefix(tv.size());
                int res = 0;
                try {
                    const CriticalEdge c = find_critical_edge(tv, jv, hs[i]);
                    res = verify_ground_state_exact(tv, jv, defect_config(tv, jv, c.h)).pass ? 2 : 1;
                } catch (const NoCriticalEdge&) {
                }
                outcome[r * P + i] = res;
            }
        }
    });

    ExperimentConfig sub = cfg;
    sub.cells = {cell};
    sub.tree = cell.tree;
    sub.dist = cell.dist;
    sub.horizons = cell.horizons;
    ExperimentReport rep = new_report(sub);

    json flow_rows = json::array();
    std::vector<double> medians;
    for (std::size_t i = 0; i < H; ++i) {
        const Summary s = summarize(column(flows, H, i));
        medians.push_back(s.median);
        flow_rows.push_back({{"horizon", hs[i]}, {"max_flow", summary_json(s)}});
    }
    const double m0 = medians[H - 2], m1 = medians[H - 1];
    const double slope = m1 <= 0.0 ? -kUnbounded
                         : m0 <= 0.0 ? 0.0
                                     : std::log(m1 / m0) / std::log(static_cast<double>(hs[H - 1]) / hs[H - 2]);
    const Trend flow_trend = slope <= kFlowDecaySlope    ? Trend::vanishing
                             : slope >= kFlowBoundedSlope ? Trend::persistent
                                                          : Trend::inconclusive;

    json hit_rows = json::array();
    double last_rate = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        std::uint64_t found = 0, hits = 0;
        for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
            found += outcome[r * P + i] >= 1;
            hits += outcome[r * P + i] == 2;
        }
        const Proportion p = clopper_pearson(hits, cfg.replicas);
        last_rate = p.estimate;
        hit_rows.push_back({{"find_horizon", hs[i]},
                            {"verify_horizon", hs[i + 1]},
                            {"found_rate", static_cast<double>(found) / static_cast<double>(cfg.replicas)},
                            {"hit_rate", proportion_json(p)}});
    }
    const Trend hit_trend = last_rate <= kHitVanishing    ? Trend::vanishing
                            : last_rate >= kHitPersistent ? Trend::persistent
                                                          : Trend::inconclusive;

    const Tree ct = cell.conductance_tree.empty() ? t : make_tree(cell.conductance_tree, cfg.seed);
    std::vector<unsigned> chs = cell.conductance_horizons;
    if (chs.empty()) chs = {hs[H - 2], hs[H - 1]};
    check_horizons(chs, ct);
    const ConductanceReport cr = classify_recurrence(ct, chs);
    const Trend cond_trend = cr.classification == Recurrence::recurrent   ? Trend::vanishing
                             : cr.classification == Recurrence::transient ? Trend::persistent
                                                                          : Trend::inconclusive;
    json crows = json::array();
    for (const auto& row : cr.rows) crows.push_back({{"horizon", row.horizon}, {"conductance", row.conductance}});

    const LinearGrowthReport lg = linear_growth_diagnostic(d.magnitude(), {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    json lg_rows = json::array();
    for (const auto& row : lg.rows) lg_rows.push_back({{"eps", row.eps}, {"ratio", row.ratio}});

    const bool agree = flow_trend != Trend::inconclusive && flow_trend == cond_trend && flow_trend == hit_trend;
    const bool exception = cond_trend == Trend::persistent && flow_trend == Trend::vanishing;
    std::string rule;
    double verdict = 0.0;
    if (cell.expect_exception) {
        verdict = exception ? 1.0 : 0.0;
        rule = "transient with vanishing flow";
    } else if (lg.linear_growth()) {
        verdict = agree ? 1.0 : 0.0;
        rule = "flow, conductance and hit-rate indicators agree and are conclusive";
    } else {
        verdict = agree || exception ? 1.0 : 0.0;
        rule = "indicators agree, or the tree is transient with vanishing flow";
    }
    rep.flags.push_back(Flag::check("consistent", verdict, 1.0, std::nullopt, rule));

    rep.results = {
        {"cell", cell.name},
        {"tree_nodes", t.size()},
        {"flows", flow_rows},
        {"median_slope", slope},
        {"hits", hit_rows},
        {"conductance",
         {{"tree", cell.conductance_tree.empty() ? cell.tree : cell.conductance_tree},
          {"rows", crows},
          {"decrease_per_doubling", cr.decrease_per_doubling},
          {"classification", to_string(cr.classification)}}},
        {"linear_growth", {{"rows", lg_rows}, {"holds", lg.linear_growth()}}},
        {"indicators",
         {{"flow", to_string(flow_trend)}, {"conductance", to_string(cond_trend)}, {"hit_rate", to_string(hit_trend)}}},
        {"expect_exception", cell.expect_exception},
        {"thresholds",
         {{"flow_vanishing_slope", kFlowDecaySlope},
          {"flow_persistent_slope", kFlowBoundedSlope},
          {"hit_vanishing", kHitVanishing},
          {"hit_persistent", kHitPersistent},
          {"conductance_recurrent_below", cr.thresholds.recurrent_below},
          {"conductance_transient_above", cr.thresholds.transient_above},
          {"conductance_max_decrease", cr.thresholds.max_decrease}}},
    };
    push_samples(rep, flows, hs);
    ExperimentReport::Table tab{"hits.csv", "replica,find_horizon,verify_horizon,outcome", {}};
    for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
        for (std::size_t i = 0; i < P; ++i) {
            tab.rows.push_back(std::to_string(r) + "," + std::to_string(hs[i]) + "," + std::to_string(hs[i + 1]) +
                               "," + std::to_string(outcome[r * P + i]));
        }
    }
    rep.tables.push_back(std::move(tab));
    return rep;
}

}  // namespace

ExperimentReport run_equivalence_scan(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ScanCell> cells = cfg.cells;
    if (cells.empty()) {
        if (!cfg.tree.empty() && !cfg.dist.empty()) {
            cells.push_back({"cell", cfg.tree, cfg.dist, cfg.horizons, cfg.conductance_tree, cfg.conductance_horizons,
                             false});
        } else {
            cells = default_scan_grid();
        }
    }
    ExperimentConfig echo = cfg;
    echo.cells = cells;
    ExperimentReport rep = new_report(echo);
    json table = json::array();
    for (const auto& cell : cells) {
        ExperimentReport child = run_scan_cell(cfg, cell);
        const auto& ind = child.results["indicators"];
        table.push_back({{"cell", cell.name},
                         {"flow", ind["flow"]},
                         {"conductance", ind["conductance"]},
                         {"hit_rate", ind["hit_rate"]},
                         {"linear_growth", child.results["linear_growth"]["holds"]},
                         {"expect_exception", cell.expect_exception},
                         {"consistent", child.passed()}});
        const Flag* f = child.find_flag("consistent");
        rep.flags.push_back(Flag::check("consistent[" + cell.name + "]", f ? f->value : 0.0, 1.0, std::nullopt,
                                        f ? f->rule : "cell flag"));
        rep.children.emplace_back(cell.name, std::move(child));
    }
    rep.results = {{"cells", table}};
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    switch (cfg.tag) {
        case ExperimentTag::thm4_sandwich:
            rep = run_thm4_sandwich(cfg);
            break;
        case ExperimentTag::equivalence_scan:
            rep = run_equivalence_scan(cfg);
            break;
        case ExperimentTag::sec31_count:
            rep = run_sec31_count(cfg);
            break;
        case ExperimentTag::sec32_vanishing:
            rep = run_sec32_vanishing(cfg);
            break;
        case ExperimentTag::l12_support_probe:
            rep = run_l12_support_probe(cfg);
            break;
        case ExperimentTag::l14_kappamin:
            rep = run_l14_kappamin(cfg);
            break;
    }
    if (cfg.out_dir) rep.write(*cfg.out_dir);
    return rep;
}

}  // namespace treeglass
