#pragma once

#include <cstdint>
#include <vector>

#include "imin/diffusion.hpp"
#include "imin/graph.hpp"
#include "imin/selectors.hpp"

namespace imin {

// ---- edge and node centralities (probabilities ignored) -----------------

/// out-degree(src) + out-degree(dst) per edge.
std::vector<double> outdegree_edge_scores(const ProbGraph& graph);

/// PageRank with uniform teleport; dangling nodes spread their mass
/// uniformly. Stops when the L1 change drops below `tol`.
std::vector<double> pagerank(const ProbGraph& graph, double damping = 0.85, double tol = 1e-8,
                             std::size_t max_iters = 10000);

/// pagerank(src) + pagerank(dst) per edge.
std::vector<double> pagerank_edge_scores(const ProbGraph& graph, double damping = 0.85, double tol = 1e-8);

/// Edge betweenness over shortest directed paths (unweighted), summed over
/// all ordered source/target pairs.
std::vector<double> edge_betweenness(const ProbGraph& graph);

struct Eigenpair {
  double value = 0.0;
  std::vector<double> left;
  std::vector<double> right;
};

/// Leading eigenvalue and left/right eigenvectors of the 0/1 adjacency
/// matrix by power iteration on A + I. Vectors are non-negative with unit
/// L2 norm. Throws NotConverged when `max_iters` is not enough.
Eigenpair leading_eigenpair(const ProbGraph& graph, std::size_t max_iters = 1000000, double tol = 1e-10);

/// left(src) * right(dst) per edge.
std::vector<double> eigen_drop_edge_scores(const ProbGraph& graph, std::size_t max_iters = 1000000,
                                           double tol = 1e-10);

// ---- selection baselines ------------------------------------------------

Selection select_random(const ProblemInstance& instance, std::uint64_t rng_seed);

enum class EdgeScorer { OutDegree, PageRank, Betweenness };

/// Top-b edges by the chosen score, ties to the lowest edge id.
Selection select_score_topb(const ProblemInstance& instance, EdgeScorer scorer);

Selection select_ked(const ProblemInstance& instance, std::size_t power_iters = 1000000, double tol = 1e-10);

struct MdsConfig {
  std::size_t hops = 3;
  std::uint64_t mc_samples = 1000;
  std::uint64_t rng_seed = 0;
};

/// Hop-limited spread ability of every node: sum_{i<=h} A^i 1 on alive edges.
std::vector<double> spread_ability(const ProbGraph& graph, std::size_t hops, const EdgeMask& alive);

/// Incremental updates used by MDS after removing `e`, which is still alive
/// in `alive` when these are called.
void mds_update_prob(const ProbGraph& graph, EdgeId e, const EdgeMask& alive, std::vector<double>& prob);
void mds_update_rsa(const ProbGraph& graph, EdgeId e, const EdgeMask& alive, std::vector<double>& rsa);

/// MDS with an explicit initial influenced-probability vector.
Selection select_mds(const ProblemInstance& instance, std::vector<double> prob, std::size_t hops = 3);
/// MDS with the initial probabilities estimated by Monte-Carlo.
Selection select_mds(const ProblemInstance& instance, const DiffusionModel& model, const MdsConfig& config = {});

struct BpmConfig {
  std::size_t samplings = 100;
  /// BPM: average reach over every single-node seed instead of the seeds.
  bool seed_agnostic = false;
  std::uint64_t rng_seed = 0;
  std::optional<Clock::time_point> deadline;
};

/// MBPM (or BPM when seed_agnostic) with live-edge samples of `model`.
Selection select_mbpm(const ProblemInstance& instance, const DiffusionModel& model, const BpmConfig& config = {});

Selection select_greedy_mc(const ProblemInstance& instance, const DiffusionModel& model, std::uint64_t samples,
                           std::uint64_t rng_seed, std::optional<Clock::time_point> deadline = std::nullopt);

/// ceil(0.1 * eps^-2 * n * ln n).
std::uint64_t ris_rounds(std::size_t node_count, double epsilon);

Selection select_ris(const ProblemInstance& instance, const DiffusionModel& model, double epsilon = 0.2,
                     std::uint64_t rng_seed = 0, std::optional<Clock::time_point> deadline = std::nullopt);

}  // namespace imin
