#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imin/diffusion.hpp"
#include "imin/graph.hpp"
#include "imin/selectors.hpp"
#include "imin/surrogate.hpp"

namespace imin {

/// One method column of a benchmark, e.g. "greedy-100" or "diffim++".
struct MethodSpec {
  std::string label;
  /// random, odc, pr, bc, ked, mds, bpm, mbpm, greedy, ris, diffim, diffim+, diffim++
  std::string kind;
  std::uint64_t samples = 100;  // greedy MC samples, MBPM/BPM samplings
  double epsilon = 0.2;         // RIS
  std::size_t hops = 3;         // MDS
  std::uint64_t mds_samples = 1000;
  SelectorConfig selector;      // DiffIM family

  bool needs_surrogate() const;
  /// Output independent of the seed set (run once per graph and budget).
  bool seed_independent() const;
};

/// Parses "random", "greedy-100", "mbpm-50", "ris-0.4", "diffim+", "diffim++-all", ...
MethodSpec parse_method(const std::string& text);

/// Runs one method on one instance. `rng_seed` feeds every random choice.
Selection run_method(const MethodSpec& spec, const ProblemInstance& instance, const DiffusionModel& model,
                     const SurrogateModel* surrogate, std::uint64_t rng_seed,
                     std::optional<Clock::time_point> deadline = std::nullopt);

struct BenchConfig {
  std::string train_graph;
  std::string test_graph;  // defaults to train_graph
  std::optional<double> default_prob;
  bool weighted_cascade = false;
  DiffusionModel diffusion = DiffusionModel::ic();
  std::vector<std::size_t> budgets;
  std::vector<MethodSpec> methods;
  std::size_t train_seed_sets = 800;
  std::size_t val_seed_sets = 200;
  std::size_t test_seed_sets = 30;
  std::optional<std::pair<std::size_t, std::size_t>> seed_size;
  std::uint64_t mc_samples = 10000;
  std::uint64_t train_mc_samples = 1000;
  double time_limit = 3600.0;
  std::uint64_t rng_seed = 0;
  std::string output = "results.csv";
  std::optional<std::string> checkpoint;
  std::optional<std::string> save_checkpoint;
  TrainConfig train;
  bool record_timing = true;

  /// Throws PreconditionError for invalid combinations.
  void validate() const;
};

/// Reads the JSON form. Relative graph/checkpoint paths resolve against
/// the config file's directory.
BenchConfig load_bench_config(const std::string& path);
BenchConfig parse_bench_config(const std::string& json_text, const std::string& base_dir = ".");

struct EvalRow {
  std::string method;
  std::size_t budget = 0;
  std::size_t seed_set_id = 0;
  std::optional<double> reduced_ratio;
  double time_ms = 0.0;
  bool oot = false;
};

struct EvalSummary {
  std::string method;
  std::size_t budget = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean_time_ms = 0.0;
  bool oot = false;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<EvalSummary> summaries;
  std::optional<double> surrogate_pearson;
  std::string test_graph_hash;
  std::string checkpoint_graph_hash;
  bool record_timing = true;
};

EvalReport run_benchmark(const BenchConfig& config);

/// Per-(method, budget) aggregates over the non-OOT rows.
std::vector<EvalSummary> summarize(const std::vector<EvalRow>& rows);

/// Writes `path` (one row per cell), `<stem>_summary.csv` and `<stem>_meta.json`.
void emit_results(const EvalReport& report, const std::string& path);

/// Companion file names used by emit_results.
std::string summary_path(const std::string& results_path);
std::string meta_path(const std::string& results_path);

}  // namespace imin
