#include "imin/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "imin/errors.hpp"
#include "imin/rng.hpp"

namespace imin {

namespace {

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Highest scores first. Scores within `tie` (relative to the largest
// magnitude) of the best remaining one count as equal and go to the lowest id.
Selection top_b(const std::vector<double>& scores, std::size_t b, Clock::time_point t0, double tie = 1e-12) {
  double scale = 0.0;
  for (double s : scores) scale = std::max(scale, std::fabs(s));
  const double slack = tie * scale;
  std::vector<std::uint8_t> taken(scores.size(), 0);
  Selection sel;
  const double elapsed = seconds_since(t0);
  for (std::size_t k = 0; k < b; ++k) {
    EdgeId best = kNoEdge;
    for (EdgeId e = 0; e < scores.size(); ++e) {
      if (!taken[e] && (best == kNoEdge || scores[e] > scores[best])) best = e;
    }
    for (EdgeId e = 0; e < best; ++e) {
      if (!taken[e] && scores[e] >= scores[best] - slack) {
        best = e;
        break;
      }
    }
    taken[best] = 1;
    sel.add(best, scores[best], k == 0 ? elapsed : 0.0);
  }
  return sel;
}

// Eigenvector entries carry the power-iteration tolerance.
constexpr double kEigenTie = 1e-8;

}  // namespace

Selection select_random(const ProblemInstance& instance, std::uint64_t rng_seed) {
  const auto t0 = Clock::now();
  const std::size_t m = instance.graph().edge_count();
  std::vector<EdgeId> ids(m);
  std::iota(ids.begin(), ids.end(), EdgeId{0});
  Rng rng = make_stream(rng_seed, 0, 30);
  Selection sel;
  for (std::size_t k = 0; k < instance.budget(); ++k) {
    const std::size_t j = k + uniform_below(rng, m - k);
    std::swap(ids[k], ids[j]);
    sel.add(ids[k], 0.0, k == 0 ? seconds_since(t0) : 0.0);
  }
  return sel;
}

Selection select_score_topb(const ProblemInstance& instance, EdgeScorer scorer) {
  const auto t0 = Clock::now();
  const auto& graph = instance.graph();
  std::vector<double> scores;
  switch (scorer) {
    case EdgeScorer::OutDegree:
      scores = outdegree_edge_scores(graph);
      break;
    case EdgeScorer::PageRank:
      scores = pagerank_edge_scores(graph);
      break;
    case EdgeScorer::Betweenness:
      scores = edge_betweenness(graph);
      break;
  }
  return top_b(scores, instance.budget(), t0);
}

Selection select_ked(const ProblemInstance& instance, std::size_t power_iters, double tol) {
  const auto t0 = Clock::now();
  return top_b(eigen_drop_edge_scores(instance.graph(), power_iters, tol), instance.budget(), t0, kEigenTie);
}

// ---- MDS ------------------------------------------------------------------

std::vector<double> spread_ability(const ProbGraph& graph, std::size_t hops, const EdgeMask& alive) {
  const std::size_t n = graph.node_count();
  std::vector<double> walks(n, 1.0), rsa(n, 1.0), next(n);
  for (std::size_t i = 0; i < hops; ++i) {
    std::fill(next.begin(), next.end(), 0.0);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (alive[e]) next[graph.src(e)] += walks[graph.dst(e)];
    }
    walks.swap(next);
    for (std::size_t v = 0; v < n; ++v) rsa[v] += walks[v];
  }
  return rsa;
}

void mds_update_prob(const ProbGraph& graph, EdgeId e, const EdgeMask& alive, std::vector<double>& prob) {
  const std::size_t n = graph.node_count();
  // 0/0 arises when an edge fires with certainty from a certain source; the
  // change is then undetermined and taken as 0
  auto ratio = [](double num, double den) { return den > 1e-12 ? num / den : 0.0; };
  std::vector<double> delta(n, 0.0);
  std::vector<std::uint8_t> visited(n, 0);
  const NodeId s = graph.src(e), t = graph.dst(e);
  const double p = graph.prob(e);
  delta[t] = ratio(p * prob[s] * (1.0 - prob[t]), 1.0 - p * prob[s]);
  std::vector<NodeId> frontier{t}, next, touched{t};
  visited[t] = 1;
  while (!frontier.empty()) {
    next.clear();
    for (auto u : frontier) {
      for (auto f : graph.out_edges(u)) {
        if (!alive[f]) continue;
        const NodeId v = graph.dst(f);
        const double q = graph.prob(f);
        delta[v] += ratio(q * delta[u] * (1.0 - prob[v]), 1.0 - q * prob[u]);
        if (!visited[v]) {
          visited[v] = 1;
          next.push_back(v);
          touched.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  for (auto v : touched) prob[v] -= delta[v];
}

void mds_update_rsa(const ProbGraph& graph, EdgeId e, const EdgeMask& alive, std::vector<double>& rsa) {
  const std::size_t n = graph.node_count();
  std::vector<double> delta(n, 0.0);
  std::vector<std::uint8_t> visited(n, 0);
  const NodeId s = graph.src(e), t = graph.dst(e);
  delta[s] = graph.prob(e) * rsa[t];
  std::vector<NodeId> frontier{s}, next, touched{s};
  visited[s] = 1;
  while (!frontier.empty()) {
    next.clear();
    for (auto u : frontier) {
      for (auto f : graph.in_edges(u)) {
        if (!alive[f]) continue;
        const NodeId v = graph.src(f);
        delta[v] += graph.prob(f) * delta[u];
        if (!visited[v]) {
          visited[v] = 1;
          next.push_back(v);
          touched.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  for (auto v : touched) rsa[v] -= delta[v];
}

Selection select_mds(const ProblemInstance& instance, std::vector<double> prob, std::size_t hops) {
  const auto& graph = instance.graph();
  if (prob.size() != graph.node_count()) throw PreconditionError("MDS probability vector length mismatch");
  EdgeMask alive(graph.edge_count(), 1);
  auto rsa = spread_ability(graph, hops, alive);
  Selection sel;
  for (std::size_t round = 0; round < instance.budget(); ++round) {
    const auto t0 = Clock::now();
    EdgeId best = kNoEdge;
    double best_score = 0.0;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (!alive[e]) continue;
      const NodeId v = graph.src(e), u = graph.dst(e);
      const double score = (1.0 - prob[u]) * (rsa[v] + rsa[u]);
      if (best == kNoEdge || score > best_score) {
        best = e;
        best_score = score;
      }
    }
    if (best == kNoEdge) throw NoCandidate("no edge left to remove");
    mds_update_rsa(graph, best, alive, rsa);
    mds_update_prob(graph, best, alive, prob);
    alive[best] = 0;
    sel.add(best, best_score, seconds_since(t0));
  }
  return sel;
}

Selection select_mds(const ProblemInstance& instance, const DiffusionModel& model, const MdsConfig& config) {
  const auto t0 = Clock::now();
  auto est = estimate_influence_mc(instance.graph(), model, instance.seeds(), config.mc_samples, config.rng_seed);
  const double setup = seconds_since(t0);
  auto sel = select_mds(instance, std::move(est.per_node), config.hops);
  if (!sel.trace.seconds.empty()) sel.trace.seconds[0] += setup;
  return sel;
}

// ---- bond percolation -----------------------------------------------------

Selection select_mbpm(const ProblemInstance& instance, const DiffusionModel& model, const BpmConfig& config) {
  if (config.samplings < 1) throw PreconditionError("samplings must be at least 1");
  const auto& graph = instance.graph();
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();
  EdgeMask alive(m, 1), live;
  std::vector<double> sum(m);
  std::vector<std::uint64_t> absent(m);
  std::vector<std::uint8_t> visited(n);
  std::vector<NodeId> queue;
  Selection sel;
  for (std::size_t round = 0; round < instance.budget(); ++round) {
    const auto t0 = Clock::now();
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(absent.begin(), absent.end(), 0);
    for (std::size_t j = 0; j < config.samplings; ++j) {
      check_deadline(config.deadline);
      Rng rng = make_stream(config.rng_seed, round * config.samplings + j, 31);
      sample_live_edges(graph, model, rng, alive, live);
      double reach = 0.0;
      if (config.seed_agnostic) {
        for (NodeId v = 0; v < n; ++v) {
          std::fill(visited.begin(), visited.end(), 0);
          const NodeId src[] = {v};
          reach += static_cast<double>(count_reachable(graph, src, live, visited, queue));
        }
        reach /= static_cast<double>(n);
      } else {
        std::fill(visited.begin(), visited.end(), 0);
        reach = static_cast<double>(count_reachable(graph, instance.seeds().members(), live, visited, queue));
      }
      for (EdgeId e = 0; e < m; ++e) {
        if (alive[e] && !live[e]) {
          sum[e] += reach;
          absent[e]++;
        }
      }
    }
    EdgeId best = kNoEdge;
    double best_score = std::numeric_limits<double>::infinity();
    for (EdgeId e = 0; e < m; ++e) {
      if (!alive[e] || absent[e] == 0) continue;
      const double score = sum[e] / static_cast<double>(absent[e]);
      if (best == kNoEdge || score < best_score) {
        best = e;
        best_score = score;
      }
    }
    if (best == kNoEdge) throw NoCandidate("no candidate: every remaining edge was live in every sample");
    alive[best] = 0;
    sel.add(best, best_score, seconds_since(t0));
  }
  return sel;
}

Selection select_greedy_mc(const ProblemInstance& instance, const DiffusionModel& model, std::uint64_t samples,
                           std::uint64_t rng_seed, std::optional<Clock::time_point> deadline) {
  SelectorConfig config;
  config.mc_samples = samples;
  config.rng_seed = rng_seed;
  config.deadline = deadline;
  return naive_greedy_mc(instance, model, config);
}

// ---- reverse influence sampling -------------------------------------------

std::uint64_t ris_rounds(std::size_t node_count, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("RIS epsilon must lie in (0,1)");
  const double n = static_cast<double>(node_count);
  return static_cast<std::uint64_t>(std::ceil(0.1 / (epsilon * epsilon) * n * std::log(n)));
}

Selection select_ris(const ProblemInstance& instance, const DiffusionModel& model, double epsilon,
                     std::uint64_t rng_seed, std::optional<Clock::time_point> deadline) {
  const auto t0 = Clock::now();
  const auto& graph = instance.graph();
  const auto& seeds = instance.seeds();
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();
  const std::uint64_t rounds = ris_rounds(n, epsilon);
  std::vector<NodeId> targets;
  for (NodeId v = 0; v < n; ++v) {
    if (!seeds.contains(v)) targets.push_back(v);
  }
  if (targets.empty()) throw NoCandidate("RIS needs at least one non-seed node");

  // success[e] counts rounds where t stays reachable without e
  std::vector<std::uint64_t> critical(m, 0);
  std::uint64_t reached_rounds = 0;
  EdgeMask live;
  std::vector<std::uint8_t> visited(n);
  std::vector<NodeId> queue;
  std::vector<EdgeId> parent(n);
  for (std::uint64_t round = 0; round < rounds; ++round) {
    if (round % 64 == 0) check_deadline(deadline);
    Rng rng = make_stream(rng_seed, round, 32);
    const NodeId t = targets[uniform_below(rng, targets.size())];
    sample_live_edges(graph, model, rng, {}, live);
    // BFS tree from S; only edges on the tree path to t can be critical
    std::fill(visited.begin(), visited.end(), 0);
    queue.clear();
    for (auto s : seeds.members()) {
      visited[s] = 1;
      parent[s] = kNoEdge;
      queue.push_back(s);
    }
    for (std::size_t head = 0; head < queue.size() && !visited[t]; ++head) {
      for (auto e : graph.out_edges(queue[head])) {
        const NodeId v = graph.dst(e);
        if (!live[e] || visited[v]) continue;
        visited[v] = 1;
        parent[v] = e;
        queue.push_back(v);
      }
    }
    if (!visited[t]) continue;
    ++reached_rounds;
    std::vector<EdgeId> path;
    for (NodeId v = t; parent[v] != kNoEdge; v = graph.src(parent[v])) path.push_back(parent[v]);
    for (auto cut : path) {
      live[cut] = 0;
      std::fill(visited.begin(), visited.end(), 0);
      count_reachable(graph, seeds.members(), live, visited, queue);
      if (!visited[t]) critical[cut]++;
      live[cut] = 1;
    }
  }
  std::vector<double> success(m);
  for (EdgeId e = 0; e < m; ++e) {
    success[e] = static_cast<double>(reached_rounds - critical[e]) / static_cast<double>(rounds);
  }
  std::vector<EdgeId> order(m);
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::stable_sort(order.begin(), order.end(), [&](EdgeId x, EdgeId y) { return success[x] < success[y]; });
  Selection sel;
  const double elapsed = seconds_since(t0);
  for (std::size_t k = 0; k < instance.budget(); ++k) sel.add(order[k], success[order[k]], k == 0 ? elapsed : 0.0);
  return sel;
}

}  // namespace imin
