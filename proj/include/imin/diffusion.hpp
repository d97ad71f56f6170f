#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imin/graph.hpp"
#include "imin/rng.hpp"

namespace imin {

enum class DiffusionKind { IC, LT, GSIR };

std::string to_string(DiffusionKind kind);
/// Accepts "ic", "lt", "gsir" (any case, "g-sir" too).
DiffusionKind parse_diffusion_kind(const std::string& name);

struct DiffusionModel {
  DiffusionKind kind = DiffusionKind::IC;
  /// Only meaningful for G-SIR.
  double recovery_prob = 0.5;

  static DiffusionModel ic() { return {DiffusionKind::IC, 0.0}; }
  static DiffusionModel lt() { return {DiffusionKind::LT, 0.0}; }
  static DiffusionModel gsir(double recovery_prob = 0.5);

  friend bool operator==(const DiffusionModel&, const DiffusionModel&) = default;
};

struct InfluenceEstimate {
  /// Expected number of influenced nodes, seeds included.
  double sigma = 0.0;
  std::vector<double> per_node;
  std::uint64_t samples = 0;
  /// Standard error of sigma; 0 for exact results.
  double std_err = 0.0;
};

/// Random keys for one diffusion run. Every edge attempt and every node's
/// threshold or recovery draw is a keyed_uniform of its own identity, so
/// runs that differ only in a removed edge share all other outcomes, and an
/// IC run and a G-SIR run with recovery 1 see identical attempt outcomes.
struct SampleStreams {
  std::uint64_t attempts;
  std::uint64_t aux;

  static SampleStreams for_sample(std::uint64_t rng_seed, std::uint64_t sample_index) {
    return {make_stream(rng_seed, sample_index, 10)(), make_stream(rng_seed, sample_index, 11)()};
  }
};

/// Reusable single-run simulator holding scratch buffers for one graph.
class Simulator {
 public:
  Simulator(const ProbGraph& graph, DiffusionModel model, EdgeMaskView alive = {});

  /// Influenced node set (for G-SIR: active or recovered) at termination,
  /// in activation order.
  const std::vector<NodeId>& run(const SeedSet& seeds, SampleStreams& streams);

  /// Number of edge attempts (IC/G-SIR) in the last run.
  std::size_t last_attempts() const { return attempts_; }

 private:
  void run_cascade(const SeedSet& seeds, SampleStreams& streams);
  void run_threshold(const SeedSet& seeds, SampleStreams& streams);
  bool alive(EdgeId e) const { return alive_.empty() || alive_[e] != 0; }

  const ProbGraph& graph_;
  DiffusionModel model_;
  EdgeMask alive_;
  std::vector<std::uint32_t> live_in_degree_;

  enum : std::uint8_t { kSusceptible = 0, kActive = 1, kDone = 2 };
  std::vector<std::uint8_t> state_;
  std::vector<NodeId> influenced_;
  std::vector<NodeId> active_;
  std::vector<NodeId> next_;
  std::vector<EdgeId> pending_;
  std::vector<std::uint32_t> hits_;
  std::vector<std::uint8_t> marked_;
  std::vector<std::uint32_t> edge_tries_;
  std::vector<EdgeId> tried_;
  std::vector<std::uint32_t> node_rounds_;
  std::size_t attempts_ = 0;
};

/// One stochastic run. IC: each newly activated node attempts each inactive
/// out-neighbour once, one round after its activation, in ascending edge id
/// order within a round. LT: uniform thresholds, activation when the share
/// of active in-neighbours reaches the threshold. G-SIR: active nodes attempt
/// every round and recover with `recovery_prob` after attempting.
std::vector<NodeId> simulate_once(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                                  SampleStreams& streams, EdgeMaskView alive = {});

/// Monte-Carlo estimate; sample i uses SampleStreams::for_sample(rng_seed, i).
InfluenceEstimate estimate_influence_mc(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                                        std::uint64_t n_samples, std::uint64_t rng_seed, EdgeMaskView alive = {});

/// Maximum edge count accepted by the exact enumerators.
inline constexpr std::size_t kExactEdgeCap = 20;

/// Exact IC influence by enumerating all 2^|E| live-edge realisations.
InfluenceEstimate exact_influence_ic(const ProbGraph& graph, const SeedSet& seeds, EdgeMaskView alive = {});

/// Exact influence for any model: IC as above; LT via its one-in-edge
/// live-edge equivalent; G-SIR via per-node geometric infectious periods.
InfluenceEstimate exact_influence(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                                  EdgeMaskView alive = {});

/// Draws a live-edge realisation whose reachability set from any seed set is
/// distributed like the model's final influenced set. Writes 0/1 per edge.
void sample_live_edges(const ProbGraph& graph, const DiffusionModel& model, Rng& rng, EdgeMaskView alive,
                       EdgeMask& live);

/// Nodes reachable from `sources` over edges with live[e] != 0. `visited`
/// is scratch of size node_count and is left set for the reached nodes.
std::size_t count_reachable(const ProbGraph& graph, std::span<const NodeId> sources, const EdgeMask& live,
                            std::vector<std::uint8_t>& visited, std::vector<NodeId>& queue);

/// (sigma_before - sigma_after) / (sigma_before - |S|), both by MC with the
/// same samples and streams. Throws DegenerateDenominator when
/// sigma_before <= |S| + 1e-9.
double reduced_ratio(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                     const EdgeRemovalSet& removal, std::uint64_t n_samples, std::uint64_t rng_seed);

/// Same ratio with the exact enumerators.
double reduced_ratio_exact(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                           const EdgeRemovalSet& removal);

/// Ratio from two precomputed influence values.
double reduction_ratio(double sigma_before, double sigma_after, std::size_t seed_count);

}  // namespace imin
