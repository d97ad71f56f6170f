#include <algorithm>
#include <cmath>

#include "imin/diffusion.hpp"
#include "imin/errors.hpp"

namespace imin {

namespace {

// One independent random choice of the live-edge world: exactly one option
// is taken, and each option switches on a set of edges.
struct Choice {
  std::vector<double> weight;
  std::vector<std::vector<EdgeId>> edges;
};

InfluenceEstimate enumerate_worlds(const ProbGraph& graph, const SeedSet& seeds, EdgeMask base_live,
                                   const std::vector<Choice>& choices) {
  const std::size_t n = graph.node_count();
  InfluenceEstimate est;
  est.per_node.assign(n, 0.0);

  std::vector<std::size_t> pick(choices.size(), 0);
  std::vector<double> prefix(choices.size() + 1, 1.0);
  EdgeMask live = base_live;
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<NodeId> queue;
  std::uint64_t worlds = 0;

  // odometer over all choices; prefix[i] is the weight of choices [0, i)
  auto apply = [&](std::size_t i, std::uint8_t on) {
    for (auto e : choices[i].edges[pick[i]]) live[e] = on;
  };
  for (std::size_t i = 0; i < choices.size(); ++i) {
    prefix[i + 1] = prefix[i] * choices[i].weight[0];
    apply(i, 1);
  }
  while (true) {
    ++worlds;
    const double w = prefix[choices.size()];
    if (w > 0.0) {
      std::fill(visited.begin(), visited.end(), 0);
      count_reachable(graph, seeds.members(), live, visited, queue);
      for (auto v : queue) est.per_node[v] += w;
    }
    std::size_t i = choices.size();
    while (i > 0) {
      --i;
      apply(i, 0);
      if (++pick[i] < choices[i].weight.size()) break;
      pick[i] = 0;
      if (i == 0) {
        i = choices.size() + 1;
        break;
      }
    }
    if (i > choices.size() || choices.empty()) break;
    for (std::size_t j = i; j < choices.size(); ++j) {
      prefix[j + 1] = prefix[j] * choices[j].weight[pick[j]];
      apply(j, 1);
    }
  }

  for (auto s : seeds.members()) est.per_node[s] = 1.0;
  for (auto& p : est.per_node) p = std::clamp(p, 0.0, 1.0);
  for (auto p : est.per_node) est.sigma += p;
  est.samples = worlds;
  est.std_err = 0.0;
  return est;
}

std::vector<EdgeId> alive_edges(const ProbGraph& graph, EdgeMaskView alive) {
  if (!alive.empty() && alive.size() != graph.edge_count()) {
    throw PreconditionError("edge mask length does not match edge count");
  }
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    if (alive.empty() || alive[e]) out.push_back(e);
  }
  if (out.size() > kExactEdgeCap) {
    throw PreconditionError("exact enumeration is limited to " + std::to_string(kExactEdgeCap) + " edges, got " +
                            std::to_string(out.size()));
  }
  return out;
}

void check_seeds(const ProbGraph& graph, const SeedSet& seeds) {
  if (seeds.size() == 0 || seeds.members().back() >= graph.node_count()) {
    throw PreconditionError("seed set is not valid for the graph");
  }
}

InfluenceEstimate exact_lt(const ProbGraph& graph, const SeedSet& seeds, EdgeMaskView alive) {
  const auto edges = alive_edges(graph, alive);
  EdgeMask is_alive(graph.edge_count(), 0);
  for (auto e : edges) is_alive[e] = 1;
  std::vector<Choice> choices;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (seeds.contains(v)) continue;
    Choice c;
    for (auto e : graph.in_edges(v)) {
      if (is_alive[e]) c.edges.push_back({e});
    }
    if (c.edges.size() < 2) {
      if (c.edges.size() == 1) {
        c.weight.push_back(1.0);
        choices.push_back(std::move(c));
      }
      continue;
    }
    c.weight.assign(c.edges.size(), 1.0 / static_cast<double>(c.edges.size()));
    choices.push_back(std::move(c));
  }
  return enumerate_worlds(graph, seeds, EdgeMask(graph.edge_count(), 0), choices);
}

InfluenceEstimate exact_gsir(const ProbGraph& graph, const SeedSet& seeds, double r, EdgeMaskView alive) {
  const auto edges = alive_edges(graph, alive);
  EdgeMask is_alive(graph.edge_count(), 0);
  for (auto e : edges) is_alive[e] = 1;
  EdgeMask base(graph.edge_count(), 0);
  std::vector<Choice> choices;
  // g(x) = E[x^T] for T ~ Geometric(r) on {1,2,...}
  auto g = [r](double x) { return r * x / (1.0 - (1.0 - r) * x); };
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    std::vector<EdgeId> out;
    for (auto e : graph.out_edges(u)) {
      if (is_alive[e] && graph.prob(e) > 0.0) out.push_back(e);
    }
    if (out.empty()) continue;
    if (r <= 0.0) {
      // never recovers: every edge with p > 0 eventually fires
      for (auto e : out) base[e] = 1;
      continue;
    }
    const std::size_t k = out.size();
    Choice c;
    for (std::uint32_t a = 0; a < (1u << k); ++a) {
      // P(live set == a) = sum over b subset of a of (-1)^|b| g(Q_b * Q_{not a})
      double q_rest = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (!(a >> j & 1u)) q_rest *= 1.0 - graph.prob(out[j]);
      }
      double p = 0.0;
      for (std::uint32_t b = a;; b = (b - 1) & a) {
        double x = q_rest;
        int bits = 0;
        for (std::size_t j = 0; j < k; ++j) {
          if (b >> j & 1u) {
            x *= 1.0 - graph.prob(out[j]);
            ++bits;
          }
        }
        p += (bits % 2 ? -1.0 : 1.0) * g(x);
        if (b == 0) break;
      }
      if (p <= 0.0) continue;
      std::vector<EdgeId> on;
      for (std::size_t j = 0; j < k; ++j) {
        if (a >> j & 1u) on.push_back(out[j]);
      }
      c.weight.push_back(p);
      c.edges.push_back(std::move(on));
    }
    if (c.weight.empty()) continue;
    choices.push_back(std::move(c));
  }
  return enumerate_worlds(graph, seeds, std::move(base), choices);
}

}  // namespace

InfluenceEstimate exact_influence_ic(const ProbGraph& graph, const SeedSet& seeds, EdgeMaskView alive) {
  check_seeds(graph, seeds);
  const auto edges = alive_edges(graph, alive);
  EdgeMask base(graph.edge_count(), 0);
  std::vector<Choice> choices;
  for (auto e : edges) {
    const double p = graph.prob(e);
    if (p >= 1.0) {
      base[e] = 1;
    } else if (p > 0.0) {
      choices.push_back(Choice{{1.0 - p, p}, {{}, {e}}});
    }
  }
  auto est = enumerate_worlds(graph, seeds, std::move(base), choices);
  est.samples = std::uint64_t{1} << edges.size();
  return est;
}

InfluenceEstimate exact_influence(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                                  EdgeMaskView alive) {
  check_seeds(graph, seeds);
  switch (model.kind) {
    case DiffusionKind::IC:
      return exact_influence_ic(graph, seeds, alive);
    case DiffusionKind::LT:
      return exact_lt(graph, seeds, alive);
    case DiffusionKind::GSIR:
      return exact_gsir(graph, seeds, model.recovery_prob, alive);
  }
  throw PreconditionError("unknown diffusion model");
}

}  // namespace imin
