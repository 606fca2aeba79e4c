#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "treeglass/error.hpp"
#include "treeglass/lab.hpp"
#include "treeglass/stats.hpp"

using namespace treeglass;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_thm4(unsigned threads) {
    ExperimentConfig cfg = default_config(ExperimentTag::thm4_sandwich);
    cfg.tree = "bary:2:6";
    cfg.horizons = {3, 6};
    cfg.replicas = 2000;
    cfg.seed = 11;
    cfg.threads = threads;
    return cfg;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("treeglass-test-" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("experiment tags") {
    for (ExperimentTag tag : all_experiment_tags()) CHECK(parse_experiment_tag(to_string(tag)) == tag);
    CHECK(to_string(ExperimentTag::sec31_count) == "sec31_count");
    CHECK_THROWS_AS((void)parse_experiment_tag("thm5"), ParseError);
    CHECK(all_experiment_tags().size() == 6);
}

TEST_CASE("flags") {
    CHECK(Flag::check("a", 1.0, 0.0, 2.0, "").passed);
    CHECK(Flag::check("a", 2.0, 0.0, 2.0, "").passed);
    CHECK_FALSE(Flag::check("a", 2.5, std::nullopt, 2.0, "").passed);
    CHECK(Flag::check("a", -9.0, std::nullopt, 2.0, "").passed);
    CHECK_FALSE(Flag::check("a", std::nan(""), 0.0, std::nullopt, "").passed);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_thm4(1);
    CHECK_NOTHROW(cfg.validate());
    cfg.replicas = 0;
    CHECK_THROWS((void)cfg.validate());
    cfg = small_thm4(1);
    cfg.horizons = {6, 3};
    CHECK_THROWS((void)cfg.validate());
    CHECK(default_scan_grid().size() == 7);
}

TEST_CASE("results do not depend on the worker count") {
    const auto one = run_thm4_sandwich(small_thm4(1));
    const auto three = run_thm4_sandwich(small_thm4(3));
    REQUIRE(one.samples.size() == three.samples.size());
    for (std::size_t i = 0; i < one.samples.size(); ++i) {
        CHECK(one.samples[i].replica == three.samples[i].replica);
        CHECK(one.samples[i].value == three.samples[i].value);
    }
    CHECK(one.results == three.results);
    CHECK(one.passed());
}

TEST_CASE("written reports can be re-evaluated from samples.csv") {
    const fs::path dir = scratch_dir("thm4");
    ExperimentConfig cfg = small_thm4(2);
    cfg.out_dir = dir;
    const auto rep = run_experiment(cfg);
    REQUIRE(fs::exists(dir / "report.json"));
    std::ifstream in(dir / "report.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["experiment"] == "thm4_sandwich");
    CHECK(j["passed"] == rep.passed());
    CHECK(j["config"]["replicas"] == 2000);

    const auto samples = read_samples_csv(dir / "samples.csv");
    CHECK(samples.size() == 2000 * 2);
    std::map<unsigned, std::vector<double>> by_horizon;
    for (const auto& s : samples) by_horizon[s.horizon].push_back(s.value);
    for (const auto& row : j["results"]["horizons"]) {
        const unsigned n = row["horizon"];
        const Summary s = summarize(by_horizon.at(n));
        CHECK(s.mean == doctest::Approx(row["max_flow"]["mean"].get<double>()).epsilon(1e-12));
        const double c = row["conductance"];
        const Flag* lower = rep.find_flag("conductance_below_mean[n=" + std::to_string(n) + "]");
        REQUIRE(lower);
        CHECK(lower->passed == (s.ci_high >= c));
        const Flag* upper = rep.find_flag("mean_below_twice_conductance[n=" + std::to_string(n) + "]");
        REQUIRE(upper);
        CHECK(upper->passed == (s.ci_low <= 2.0 * c));
    }
    fs::remove_all(dir);
}

TEST_CASE("written replica cap") {
    const fs::path dir = scratch_dir("cap");
    ExperimentConfig cfg = small_thm4(1);
    cfg.max_written_replicas = 10;
    cfg.out_dir = dir;
    (void)run_experiment(cfg);
    CHECK(read_samples_csv(dir / "samples.csv").size() == 10 * 2);
    fs::remove_all(dir);
}

TEST_CASE("small sec31 and l14 runs") {
    ExperimentConfig s31 = default_config(ExperimentTag::sec31_count);
    s31.tree = "dhl:40";
    s31.replicas = 200;
    s31.forced_jf = 1.0;
    // At depth 40 a root-side top edge is the minimum of its half-line with
    // probability 1/40, adding a second defect pair, so the count is not always 4.
    const auto low = run_sec31_count(s31);
    const Flag* p = low.find_flag("p_count_4");
    REQUIRE(p);
    CHECK(p->value > 0.9);
    for (const auto& s : low.samples) CHECK(s.value >= 4.0);
    s31.forced_jf = 3.0;
    const auto high = run_sec31_count(s31);
    const Flag* q = high.find_flag("p_count_4");
    REQUIRE(q);
    CHECK(q->value < 0.1);

    ExperimentConfig l14 = default_config(ExperimentTag::l14_kappamin);
    l14.replicas = 100;
    CHECK(run_l14_kappamin(l14).passed());

    ExperimentConfig bad = default_config(ExperimentTag::sec31_count);
    bad.tree = "bary:2:3";
    CHECK_THROWS_AS((void)run_sec31_count(bad), RangeError);
}
