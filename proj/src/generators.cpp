#include <algorithm>
#include <numeric>

#include "imin/errors.hpp"
#include "imin/graph.hpp"
#include "imin/rng.hpp"

namespace imin {

ProbGraph weighted_cascade_probs(const ProbGraph& graph) {
  if (graph.edge_count() == 0) {
    throw PreconditionError("weighted cascade needs at least one edge");
  }
  std::vector<double> probs(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    probs[e] = 1.0 / static_cast<double>(graph.in_degree(graph.dst(e)));
  }
  return graph.with_probs(std::move(probs));
}

ProbGraph gen_er_graph(std::size_t n, double p_edge, std::pair<double, double> prob_range,
                       std::uint64_t rng_seed) {
  if (n < 2) throw PreconditionError("Erdos-Renyi graph needs at least two nodes");
  if (!(p_edge > 0.0 && p_edge <= 1.0)) throw PreconditionError("edge probability must lie in (0,1]");
  const auto [lo, hi] = prob_range;
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw PreconditionError("activation probability range must lie in [0,1]");

  Rng structure = make_stream(rng_seed, 0, 0);
  Rng weights = make_stream(rng_seed, 0, 1);
  std::vector<Edge> edges;
  std::vector<double> probs;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      if (bernoulli(structure, p_edge)) {
        edges.push_back({u, v});
        probs.push_back(lo == hi ? lo : uniform_real(weights, lo, hi));
      }
    }
  }
  return ProbGraph(n, std::move(edges), std::move(probs));
}

std::pair<std::size_t, std::size_t> default_seed_size_range(std::size_t node_count) {
  const std::size_t hundredth_floor = node_count / 100;
  const std::size_t hundredth_ceil = (node_count + 99) / 100;
  const std::size_t hi = std::max<std::size_t>(1, hundredth_floor);
  const std::size_t lo = std::min<std::size_t>(std::min<std::size_t>(10, hundredth_ceil), hi);
  return {std::max<std::size_t>(lo, 1), hi};
}

std::vector<SeedSet> gen_seed_sets(const ProbGraph& graph, std::size_t count,
                                   std::optional<std::pair<std::size_t, std::size_t>> size_range,
                                   std::uint64_t rng_seed) {
  const std::size_t n = graph.node_count();
  const auto [lo, hi] = size_range.value_or(default_seed_size_range(n));
  if (lo < 1 || lo > hi || hi > n) {
    throw PreconditionError("empty feasible seed-size range [" + std::to_string(lo) + "," + std::to_string(hi) +
                            "] for " + std::to_string(n) + " nodes");
  }
  std::vector<SeedSet> sets;
  sets.reserve(count);
  std::vector<NodeId> pool(n);
  for (std::size_t i = 0; i < count; ++i) {
    // one stream per set so that a prefix of the output does not depend on count
    Rng rng = make_stream(rng_seed, i, 2);
    const std::size_t size = lo + uniform_below(rng, hi - lo + 1);
    std::iota(pool.begin(), pool.end(), NodeId{0});
    for (std::size_t k = 0; k < size; ++k) {
      const std::size_t j = k + uniform_below(rng, n - k);
      std::swap(pool[k], pool[j]);
    }
    sets.emplace_back(std::vector<NodeId>(pool.begin(), pool.begin() + size), n);
  }
  return sets;
}

}  // namespace imin
