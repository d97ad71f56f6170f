#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "imin/diffusion.hpp"
#include "imin/graph.hpp"
#include "imin/surrogate.hpp"

namespace imin {

using Clock = std::chrono::steady_clock;

enum class BatchMode { OneByOne, AllAtOnce };

struct SelectorConfig {
  std::size_t n_ep = 100;
  double alpha = 0.1;
  double beta = 1.0;
  double step_size = 0.05;
  BatchMode batch_mode = BatchMode::OneByOne;
  /// Monte-Carlo samples per influence estimate (greedy only).
  std::uint64_t mc_samples = 100;
  std::uint64_t rng_seed = 0;
  /// Selection aborts with TimeLimitExceeded once this passes.
  std::optional<Clock::time_point> deadline;
};

struct SelectionTrace {
  std::vector<EdgeId> edges;
  /// Per-round score: estimated influence, keep probability or gradient.
  std::vector<double> scores;
  std::vector<double> seconds;
  std::uint64_t forward_passes = 0;
  std::uint64_t backward_passes = 0;
};

struct Selection {
  EdgeRemovalSet removal;
  SelectionTrace trace;

  void add(EdgeId e, double score, double seconds) {
    removal.edges.push_back(e);
    trace.edges.push_back(e);
    trace.scores.push_back(score);
    trace.seconds.push_back(seconds);
  }
};

/// Influence of the instance's seeds on the graph restricted to `alive`.
using InfluenceOracle = std::function<double(EdgeMaskView alive)>;

/// Incremental greedy: each round removes the edge whose deletion gives the
/// smallest oracle value; ties go to the lowest edge id.
Selection naive_greedy(const ProblemInstance& instance, const InfluenceOracle& oracle,
                       std::optional<Clock::time_point> deadline = std::nullopt);

/// Greedy with Monte-Carlo estimates (config.mc_samples, config.rng_seed).
/// Every candidate is scored with the same random streams.
Selection naive_greedy_mc(const ProblemInstance& instance, const DiffusionModel& model,
                          const SelectorConfig& config = {});

/// Greedy with the exact enumerators (tiny graphs only).
Selection naive_greedy_exact(const ProblemInstance& instance, const DiffusionModel& model);

/// DiffIM: surrogate greedy, one forward evaluation per remaining edge per round.
Selection diffim_select(const ProblemInstance& instance, const SurrogateModel& surrogate,
                        const SelectorConfig& config = {});

/// DiffIM+: relaxed optimisation of the keep probabilities, n_ep steps per round.
Selection diffim_plus_select(const ProblemInstance& instance, const SurrogateModel& surrogate,
                             const SelectorConfig& config = {});

/// DiffIM++: one backward pass per round, removes the largest gradient.
Selection diffim_plus_plus_select(const ProblemInstance& instance, const SurrogateModel& surrogate,
                                  const SelectorConfig& config = {});

/// Throws TimeLimitExceeded when the deadline has passed.
void check_deadline(const std::optional<Clock::time_point>& deadline);

}  // namespace imin
