#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace treeglass {

enum class ExperimentTag {
    thm4_sandwich,
    equivalence_scan,
    sec31_count,
    sec32_vanishing,
    l12_support_probe,
    l14_kappamin,
};

[[nodiscard]] std::string to_string(ExperimentTag tag);
/// Throws ParseError for unknown names.
[[nodiscard]] ExperimentTag parse_experiment_tag(std::string_view name);
[[nodiscard]] const std::vector<ExperimentTag>& all_experiment_tags();

/// One cell of the equivalence grid.
struct ScanCell {
    std::string name;
    std::string tree;                    // tree used for flows and critical edges
    std::string dist;
    std::vector<unsigned> horizons;      // flow horizons, increasing
    std::string conductance_tree;        // empty: same as `tree`
    std::vector<unsigned> conductance_horizons;  // empty: last two flow horizons
    /// The cell is expected to be transient with vanishing flow even though
    /// the three indicators disagree.
    bool expect_exception = false;
};

struct ExperimentConfig {
    ExperimentTag tag = ExperimentTag::thm4_sandwich;
    std::string tree;  // parse_tree_spec literal
    std::string dist;  // parse_distribution literal
    std::vector<unsigned> horizons;
    std::uint64_t replicas = 1000;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> out_dir;
    unsigned threads = 0;  // 0: TREEGLASS_THREADS, else hardware concurrency

    /// samples.csv keeps every replica when 0, otherwise at most this many.
    std::uint64_t max_written_replicas = 0;

    // sec31_count
    std::optional<double> forced_jf;
    std::optional<unsigned> core_depth = 1;
    std::optional<double> expected_probability;  // default from forced_jf
    double probability_tolerance = 0.03;

    // sec32_vanishing
    std::string conductance_tree;
    std::vector<unsigned> conductance_horizons;
    std::vector<unsigned> path_minimum_orders{1, 5, 20};
    std::uint64_t path_minimum_samples = 4'000'000;
    double path_minimum_tolerance = 0.01;

    // l12_support_probe
    std::vector<double> t_grid;
    double boost = 1.0;
    unsigned boost_levels = 0;

    // equivalence_scan; empty means the default grid unless tree/dist are set
    std::vector<ScanCell> cells;

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Defaults reproducing the reference settings of each experiment.
[[nodiscard]] ExperimentConfig default_config(ExperimentTag tag);

/// The reference grid: {half-line, binary, (n+1)^2 profile} x {unif(0,1),
/// exp(1)} plus the (n+1)^2 profile with the cube-root law.
[[nodiscard]] std::vector<ScanCell> default_scan_grid();

struct Sample {
    std::uint64_t replica = 0;
    unsigned horizon = 0;
    double value = 0.0;
};

/// Pass/fail check of a value against a closed interval. Unset ends are open.
struct Flag {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::string rule;

    [[nodiscard]] static Flag check(std::string name, double value, std::optional<double> lower,
                                    std::optional<double> upper, std::string rule);
    [[nodiscard]] nlohmann::json to_json() const;
};

struct ExperimentReport {
    ExperimentTag tag = ExperimentTag::thm4_sandwich;
    nlohmann::json config;
    nlohmann::json results;
    std::vector<Flag> flags;
    std::vector<Sample> samples;
    /// Extra CSV files written next to samples.csv: name -> (header, rows).
    struct Table {
        std::string name;
        std::string header;
        std::vector<std::string> rows;
    };
    std::vector<Table> tables;
    /// Sub-reports written to `<dir>/<name>/` (used by the equivalence grid).
    std::vector<std::pair<std::string, ExperimentReport>> children;
    std::uint64_t max_written_replicas = 0;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] const Flag* find_flag(std::string_view name) const;
    [[nodiscard]] nlohmann::json to_json() const;
    /// Writes report.json and samples.csv (and child directories) into `dir`.
    void write(const std::filesystem::path& dir) const;
};

inline constexpr const char* kReportSchema = "treeglass-report/1";

/// Worker count: `requested` if nonzero, else TREEGLASS_THREADS, else the
/// hardware concurrency (at least 1).
[[nodiscard]] unsigned resolve_threads(unsigned requested);

/// Runs body(begin, end) over contiguous chunks of [0, count) on up to
/// `threads` workers. Results must be written to per-index slots.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t, std::uint64_t)>& body);

[[nodiscard]] ExperimentReport run_thm4_sandwich(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_equivalence_scan(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_sec31_count(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_sec32_vanishing(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_l12_support_probe(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentReport run_l14_kappamin(const ExperimentConfig& cfg);

/// Dispatches on cfg.tag and writes the report when cfg.out_dir is set.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Reads samples.csv rows (`replica,horizon,value`).
[[nodiscard]] std::vector<Sample> read_samples_csv(const std::filesystem::path& file);

}  // namespace treeglass
