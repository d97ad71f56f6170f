#include "imin/diffusion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "imin/errors.hpp"

namespace imin {

std::string to_string(DiffusionKind kind) {
  switch (kind) {
    case DiffusionKind::IC:
      return "IC";
    case DiffusionKind::LT:
      return "LT";
    case DiffusionKind::GSIR:
      return "GSIR";
  }
  return "?";
}

DiffusionKind parse_diffusion_kind(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "ic") return DiffusionKind::IC;
  if (s == "lt") return DiffusionKind::LT;
  if (s == "gsir") return DiffusionKind::GSIR;
  throw PreconditionError("unknown diffusion model '" + name + "'");
}

DiffusionModel DiffusionModel::gsir(double recovery_prob) {
  if (!(recovery_prob >= 0.0 && recovery_prob <= 1.0)) {
    throw PreconditionError("recovery probability must lie in [0,1]");
  }
  return {DiffusionKind::GSIR, recovery_prob};
}

Simulator::Simulator(const ProbGraph& graph, DiffusionModel model, EdgeMaskView alive)
    : graph_(graph), model_(model), alive_(alive.begin(), alive.end()) {
  if (!alive_.empty() && alive_.size() != graph.edge_count()) {
    throw PreconditionError("edge mask length does not match edge count");
  }
  const std::size_t n = graph.node_count();
  state_.assign(n, kSusceptible);
  if (model_.kind == DiffusionKind::LT) {
    live_in_degree_.assign(n, 0);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (this->alive(e)) live_in_degree_[graph.dst(e)]++;
    }
    hits_.assign(n, 0);
    marked_.assign(n, 0);
  }
  if (model_.kind == DiffusionKind::GSIR) {
    edge_tries_.assign(graph.edge_count(), 0);
    node_rounds_.assign(n, 0);
  }
}

const std::vector<NodeId>& Simulator::run(const SeedSet& seeds, SampleStreams& streams) {
  if (!seeds.members().empty() && seeds.members().back() >= graph_.node_count()) {
    throw PreconditionError("seed set is not valid for the graph");
  }
  for (auto v : influenced_) state_[v] = kSusceptible;
  if (!node_rounds_.empty()) {
    for (auto v : influenced_) node_rounds_[v] = 0;
    for (auto e : tried_) edge_tries_[e] = 0;
    tried_.clear();
  }
  influenced_.clear();
  attempts_ = 0;
  if (model_.kind == DiffusionKind::LT) {
    run_threshold(seeds, streams);
  } else {
    run_cascade(seeds, streams);
  }
  return influenced_;
}

void Simulator::run_cascade(const SeedSet& seeds, SampleStreams& streams) {
  active_.clear();
  for (auto s : seeds.members()) {
    state_[s] = kActive;
    influenced_.push_back(s);
    active_.push_back(s);
  }
  const bool recovers = model_.kind == DiffusionKind::GSIR;
  while (!active_.empty()) {
    pending_.clear();
    for (auto u : active_) {
      for (auto e : graph_.out_edges(u)) {
        if (alive(e)) pending_.push_back(e);
      }
    }
    std::sort(pending_.begin(), pending_.end());
    next_.clear();
    std::size_t round_attempts = 0;
    for (auto e : pending_) {
      const NodeId v = graph_.dst(e);
      if (state_[v] != kSusceptible) continue;
      ++round_attempts;
      std::uint32_t k = 0;
      if (recovers) {
        k = edge_tries_[e]++;
        if (k == 0) tried_.push_back(e);
      }
      if (keyed_uniform(streams.attempts, e, k) < graph_.prob(e)) {
        state_[v] = kActive;
        influenced_.push_back(v);
        next_.push_back(v);
      }
    }
    attempts_ += round_attempts;
    if (!recovers) {
      for (auto u : active_) state_[u] = kDone;
      active_.swap(next_);
      continue;
    }
    if (round_attempts == 0) {
      // nobody left to infect; later rounds cannot change the outcome
      break;
    }
    std::size_t kept = 0;
    for (auto u : active_) {
      if (keyed_uniform(streams.aux, u, node_rounds_[u]++) < model_.recovery_prob) {
        state_[u] = kDone;
      } else {
        active_[kept++] = u;
      }
    }
    active_.resize(kept);
    active_.insert(active_.end(), next_.begin(), next_.end());
  }
}

void Simulator::run_threshold(const SeedSet& seeds, SampleStreams& streams) {
  // hits_ was reset for every touched node at the end of the last run
  std::vector<NodeId>& frontier = active_;
  std::vector<NodeId>& touched = next_;
  frontier.clear();
  touched.clear();
  for (auto s : seeds.members()) {
    state_[s] = kActive;
    influenced_.push_back(s);
    frontier.push_back(s);
  }
  std::vector<NodeId> candidates;
  std::vector<NodeId> newly;
  while (!frontier.empty()) {
    candidates.clear();
    for (auto u : frontier) {
      for (auto e : graph_.out_edges(u)) {
        if (!alive(e)) continue;
        const NodeId v = graph_.dst(e);
        if (state_[v] != kSusceptible) continue;
        if (hits_[v]++ == 0) touched.push_back(v);
        if (!marked_[v]) {
          marked_[v] = 1;
          candidates.push_back(v);
        }
      }
    }
    newly.clear();
    for (auto v : candidates) {
      marked_[v] = 0;
      const double share = static_cast<double>(hits_[v]) / static_cast<double>(live_in_degree_[v]);
      if (share >= keyed_uniform(streams.aux, v, 0)) newly.push_back(v);
    }
    for (auto v : newly) {
      state_[v] = kActive;
      influenced_.push_back(v);
    }
    frontier.swap(newly);
  }
  for (auto v : touched) hits_[v] = 0;
  touched.clear();
  frontier.clear();
}

std::vector<NodeId> simulate_once(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                                  SampleStreams& streams, EdgeMaskView alive) {
  Simulator sim(graph, model, alive);
  return sim.run(seeds, streams);
}

InfluenceEstimate estimate_influence_mc(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                                        std::uint64_t n_samples, std::uint64_t rng_seed, EdgeMaskView alive) {
  if (n_samples == 0) throw PreconditionError("at least one Monte-Carlo sample is required");
  Simulator sim(graph, model, alive);
  std::vector<std::uint64_t> counts(graph.node_count(), 0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    auto streams = SampleStreams::for_sample(rng_seed, i);
    const auto& influenced = sim.run(seeds, streams);
    for (auto v : influenced) counts[v]++;
    const double k = static_cast<double>(influenced.size());
    sum += k;
    sum_sq += k * k;
  }
  InfluenceEstimate est;
  est.samples = n_samples;
  est.per_node.resize(counts.size());
  const double n = static_cast<double>(n_samples);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    est.per_node[v] = static_cast<double>(counts[v]) / n;
  }
  est.sigma = sum / n;
  if (n_samples > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    est.std_err = std::sqrt(var / n);
  }
  return est;
}

void sample_live_edges(const ProbGraph& graph, const DiffusionModel& model, Rng& rng, EdgeMaskView alive,
                       EdgeMask& live) {
  const std::size_t m = graph.edge_count();
  live.assign(m, 0);
  auto is_alive = [&](EdgeId e) { return alive.empty() || alive[e] != 0; };
  switch (model.kind) {
    case DiffusionKind::IC:
      for (EdgeId e = 0; e < m; ++e) {
        if (is_alive(e) && bernoulli(rng, graph.prob(e))) live[e] = 1;
      }
      break;
    case DiffusionKind::LT: {
      std::vector<EdgeId> incoming;
      for (NodeId v = 0; v < graph.node_count(); ++v) {
        incoming.clear();
        for (auto e : graph.in_edges(v)) {
          if (is_alive(e)) incoming.push_back(e);
        }
        if (!incoming.empty()) live[incoming[uniform_below(rng, incoming.size())]] = 1;
      }
      break;
    }
    case DiffusionKind::GSIR: {
      const double r = model.recovery_prob;
      for (NodeId u = 0; u < graph.node_count(); ++u) {
        auto out = graph.out_edges(u);
        if (out.empty()) continue;
        if (r <= 0.0) {
          for (auto e : out) {
            if (is_alive(e) && graph.prob(e) > 0.0) live[e] = 1;
          }
          continue;
        }
        double periods = 1.0;
        while (!bernoulli(rng, r)) periods += 1.0;
        for (auto e : out) {
          if (!is_alive(e)) continue;
          const double transmit = 1.0 - std::pow(1.0 - graph.prob(e), periods);
          if (bernoulli(rng, transmit)) live[e] = 1;
        }
      }
      break;
    }
  }
}

std::size_t count_reachable(const ProbGraph& graph, std::span<const NodeId> sources, const EdgeMask& live,
                            std::vector<std::uint8_t>& visited, std::vector<NodeId>& queue) {
  queue.clear();
  for (auto s : sources) {
    if (!visited[s]) {
      visited[s] = 1;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (auto e : graph.out_edges(queue[head])) {
      if (!live[e]) continue;
      const NodeId v = graph.dst(e);
      if (!visited[v]) {
        visited[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return queue.size();
}

double reduction_ratio(double sigma_before, double sigma_after, std::size_t seed_count) {
  const double denom = sigma_before - static_cast<double>(seed_count);
  if (!(denom > 1e-9)) {
    throw DegenerateDenominator("expected influence does not exceed the seed count; reduced ratio undefined");
  }
  return (sigma_before - sigma_after) / denom;
}

double reduced_ratio(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                     const EdgeRemovalSet& removal, std::uint64_t n_samples, std::uint64_t rng_seed) {
  const auto mask = alive_mask(graph, removal.edges);
  const auto before = estimate_influence_mc(graph, model, seeds, n_samples, rng_seed);
  const auto after = estimate_influence_mc(graph, model, seeds, n_samples, rng_seed, mask);
  return reduction_ratio(before.sigma, after.sigma, seeds.size());
}

double reduced_ratio_exact(const ProbGraph& graph, const DiffusionModel& model, const SeedSet& seeds,
                           const EdgeRemovalSet& removal) {
  const auto mask = alive_mask(graph, removal.edges);
  const auto before = exact_influence(graph, model, seeds);
  const auto after = exact_influence(graph, model, seeds, mask);
  return reduction_ratio(before.sigma, after.sigma, seeds.size());
}

}  // namespace imin
