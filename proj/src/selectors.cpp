#include "imin/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imin/errors.hpp"
#include "imin/optim.hpp"
#include "imin/relaxation.hpp"

namespace imin {

namespace {

// Scores within this relative distance count as tied, so that ties go to the
// lowest edge id even when rounding differs between candidates.
constexpr double kTieTolerance = 1e-12;

bool strictly_below(double value, double best) {
  return value < best - kTieTolerance * std::max(1.0, std::fabs(best));
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::vector<double> alive_weights(const ProbGraph& graph, const EdgeMask& alive) {
  std::vector<double> w(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) w[e] = alive[e] ? graph.prob(e) : 0.0;
  return w;
}

std::size_t alive_count(const EdgeMask& alive) {
  return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), std::uint8_t{1}));
}

// Runs `steps` Adam steps on the relaxed loss, returns the final keep probabilities.
std::vector<double> optimise_decisions(RelaxedObjective& objective, const EdgeMask& alive, std::size_t budget,
                                       std::size_t steps, const SelectorConfig& config) {
  const std::size_t m = alive.size();
  const std::size_t edges = alive_count(alive);
  const double keep = 1.0 - static_cast<double>(budget) / static_cast<double>(edges);
  DecisionVector decisions{std::vector<double>(m, std::log(keep / (1.0 - keep)))};
  Adam adam(static_cast<Eigen::Index>(m));
  std::vector<double> grad;
  for (std::size_t step = 0; step < steps; ++step) {
    check_deadline(config.deadline);
    const auto loss = objective.gradient(decisions, budget, config.alpha, config.beta, grad);
    if (!std::isfinite(loss.total)) {
      throw Diverged("relaxed loss is not finite at step " + std::to_string(step));
    }
    Eigen::Map<Eigen::VectorXd> x(decisions.logits.data(), static_cast<Eigen::Index>(m));
    Eigen::Map<const Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(m));
    adam.step(x, g, config.step_size);
  }
  return decisions.keep_probs();
}

}  // namespace

void check_deadline(const std::optional<Clock::time_point>& deadline) {
  if (deadline && Clock::now() > *deadline) throw TimeLimitExceeded("selection exceeded its time limit");
}

Selection naive_greedy(const ProblemInstance& instance, const InfluenceOracle& oracle,
                       std::optional<Clock::time_point> deadline) {
  const auto& graph = instance.graph();
  EdgeMask alive(graph.edge_count(), 1);
  Selection sel;
  for (std::size_t round = 0; round < instance.budget(); ++round) {
    const auto t0 = Clock::now();
    EdgeId best = kNoEdge;
    double best_value = 0.0;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (!alive[e]) continue;
      check_deadline(deadline);
      alive[e] = 0;
      const double value = oracle(alive);
      alive[e] = 1;
      ++sel.trace.forward_passes;
      if (best == kNoEdge || strictly_below(value, best_value)) {
        best = e;
        best_value = value;
      }
    }
    if (best == kNoEdge) throw NoCandidate("no edge left to remove");
    alive[best] = 0;
    sel.add(best, best_value, seconds_since(t0));
  }
  return sel;
}

Selection naive_greedy_mc(const ProblemInstance& instance, const DiffusionModel& model,
                          const SelectorConfig& config) {
  const auto& graph = instance.graph();
  const auto& seeds = instance.seeds();
  InfluenceOracle oracle = [&](EdgeMaskView alive) {
    return estimate_influence_mc(graph, model, seeds, config.mc_samples, config.rng_seed, alive).sigma;
  };
  return naive_greedy(instance, oracle, config.deadline);
}

Selection naive_greedy_exact(const ProblemInstance& instance, const DiffusionModel& model) {
  const auto& graph = instance.graph();
  const auto& seeds = instance.seeds();
  InfluenceOracle oracle = [&](EdgeMaskView alive) { return exact_influence(graph, model, seeds, alive).sigma; };
  return naive_greedy(instance, oracle);
}

Selection diffim_select(const ProblemInstance& instance, const SurrogateModel& surrogate,
                        const SelectorConfig& config) {
  constexpr std::size_t kChunk = 64;
  const auto& graph = instance.graph();
  GnnWorkspace ws(surrogate, graph);
  EdgeMask alive(graph.edge_count(), 1);
  Selection sel;
  std::vector<const SeedSet*> batch;
  std::vector<EdgeId> candidates, chunk;
  for (std::size_t round = 0; round < instance.budget(); ++round) {
    const auto t0 = Clock::now();
    const auto weights = alive_weights(graph, alive);
    candidates.clear();
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (alive[e]) candidates.push_back(e);
    }
    if (candidates.empty()) throw NoCandidate("no edge left to remove");
    EdgeId best = kNoEdge;
    double best_value = 0.0;
    for (std::size_t start = 0; start < candidates.size(); start += kChunk) {
      check_deadline(config.deadline);
      const std::size_t end = std::min(candidates.size(), start + kChunk);
      chunk.assign(candidates.begin() + static_cast<std::ptrdiff_t>(start),
                   candidates.begin() + static_cast<std::ptrdiff_t>(end));
      batch.assign(chunk.size(), &instance.seeds());
      ws.forward(weights, batch, chunk);
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        const double value = ws.sigma_hat(i);
        if (best == kNoEdge || strictly_below(value, best_value)) {
          best = chunk[i];
          best_value = value;
        }
      }
      sel.trace.forward_passes += chunk.size();
    }
    alive[best] = 0;
    sel.add(best, best_value, seconds_since(t0));
  }
  return sel;
}

Selection diffim_plus_select(const ProblemInstance& instance, const SurrogateModel& surrogate,
                             const SelectorConfig& config) {
  if (config.n_ep < 1) throw PreconditionError("n_ep must be at least 1");
  const auto& graph = instance.graph();
  const std::size_t b = instance.budget();
  EdgeMask alive(graph.edge_count(), 1);
  Selection sel;

  auto take_all_remaining = [&](Clock::time_point t0) {
    for (EdgeId e = 0; e < graph.edge_count() && sel.removal.size() < b; ++e) {
      if (!alive[e]) continue;
      alive[e] = 0;
      sel.add(e, 0.0, seconds_since(t0));
    }
  };

  if (config.batch_mode == BatchMode::AllAtOnce) {
    const auto t0 = Clock::now();
    if (b >= graph.edge_count()) {
      take_all_remaining(t0);
      return sel;
    }
    RelaxedObjective objective(surrogate, graph, instance.seeds());
    const auto keep = optimise_decisions(objective, alive, b, b * config.n_ep, config);
    sel.trace.forward_passes += objective.forward_passes();
    sel.trace.backward_passes += objective.backward_passes();
    std::vector<EdgeId> order(graph.edge_count());
    std::iota(order.begin(), order.end(), EdgeId{0});
    std::stable_sort(order.begin(), order.end(), [&](EdgeId x, EdgeId y) { return keep[x] < keep[y]; });
    const double elapsed = seconds_since(t0);
    for (std::size_t k = 0; k < b; ++k) sel.add(order[k], keep[order[k]], k == 0 ? elapsed : 0.0);
    return sel;
  }

  for (std::size_t round = 0; round < b; ++round) {
    const auto t0 = Clock::now();
    const std::size_t remaining_budget = b - round;
    if (remaining_budget >= alive_count(alive)) {
      take_all_remaining(t0);
      break;
    }
    RelaxedObjective objective(surrogate, graph, instance.seeds(), alive);
    const auto keep = optimise_decisions(objective, alive, remaining_budget, config.n_ep, config);
    sel.trace.forward_passes += objective.forward_passes();
    sel.trace.backward_passes += objective.backward_passes();
    EdgeId best = kNoEdge;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      if (alive[e] && (best == kNoEdge || keep[e] < keep[best])) best = e;
    }
    alive[best] = 0;
    sel.add(best, keep[best], seconds_since(t0));
  }
  return sel;
}

Selection diffim_plus_plus_select(const ProblemInstance& instance, const SurrogateModel& surrogate,
                                  const SelectorConfig& config) {
  const auto& graph = instance.graph();
  const std::size_t b = instance.budget();
  GnnWorkspace ws(surrogate, graph);
  EdgeMask alive(graph.edge_count(), 1);
  const SeedSet* one[] = {&instance.seeds()};
  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(graph.node_count()), 1);
  Selection sel;
  std::vector<double> grad;

  // d sigma_hat / d keep(e) at keep == 1, i.e. p(e) * d sigma_hat / d weight(e)
  auto scores = [&]() {
    check_deadline(config.deadline);
    ws.forward(alive_weights(graph, alive), one);
    grad.clear();
    ws.backward(upstream, nullptr, &grad);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) grad[e] *= graph.prob(e);
  };

  if (config.batch_mode == BatchMode::AllAtOnce) {
    const auto t0 = Clock::now();
    scores();
    std::vector<EdgeId> order(graph.edge_count());
    std::iota(order.begin(), order.end(), EdgeId{0});
    std::stable_sort(order.begin(), order.end(), [&](EdgeId x, EdgeId y) { return grad[x] > grad[y]; });
    const double elapsed = seconds_since(t0);
    for (std::size_t k = 0; k < b; ++k) sel.add(order[k], grad[order[k]], k == 0 ? elapsed : 0.0);
  } else {
    for (std::size_t round = 0; round < b; ++round) {
      const auto t0 = Clock::now();
      scores();
      EdgeId best = kNoEdge;
      for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        if (alive[e] && (best == kNoEdge || grad[e] > grad[best])) best = e;
      }
      if (best == kNoEdge) throw NoCandidate("no edge left to remove");
      alive[best] = 0;
      sel.add(best, grad[best], seconds_since(t0));
    }
  }
  sel.trace.forward_passes = ws.forward_passes();
  sel.trace.backward_passes = ws.backward_passes();
  return sel;
}

}  // namespace imin
