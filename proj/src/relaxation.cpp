#include "imin/relaxation.hpp"

#include <algorithm>
#include <cmath>

#include "imin/errors.hpp"

namespace imin {

namespace {

constexpr double kLogClamp = 1e-7;

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// |E| - sum r - b, computed as the removed mass sum (1 - r) - b with
// compensated summation so that it stays at rounding level for large |E|.
template <class Alive>
double budget_gap(const DecisionVector& decisions, std::size_t budget, Alive&& alive) {
  double sum = -static_cast<double>(budget), carry = 0.0;
  for (EdgeId e = 0; e < decisions.size(); ++e) {
    if (!alive(e)) continue;
    const double x = logistic(-decisions.logits[e]);
    const double t = sum + x;
    carry += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

inline bool is_alive(EdgeMaskView alive, EdgeId e) { return alive.empty() || alive[e] != 0; }

inline double clamp_log(double r) { return std::log(std::clamp(r, kLogClamp, 1.0 - kLogClamp)); }

double entropy(double r) { return -(r * clamp_log(r) + (1.0 - r) * clamp_log(1.0 - r)); }

// derivative of entropy() as implemented, clamp included
double entropy_slope(double r) {
  const bool r_in = r > kLogClamp && r < 1.0 - kLogClamp;
  const double s = 1.0 - r;
  const bool s_in = s > kLogClamp && s < 1.0 - kLogClamp;
  double d = -clamp_log(r) - (r_in ? 1.0 : 0.0);
  d += clamp_log(s) + (s_in ? 1.0 : 0.0);
  return d;
}

void check_mask(EdgeMaskView alive, std::size_t n) {
  if (!alive.empty() && alive.size() != n) throw PreconditionError("edge mask length does not match decisions");
}

}  // namespace

double DecisionVector::keep_prob(EdgeId e) const { return logistic(logits[e]); }

std::vector<double> DecisionVector::keep_probs() const {
  std::vector<double> out(logits.size());
  for (std::size_t e = 0; e < logits.size(); ++e) out[e] = logistic(logits[e]);
  return out;
}

DecisionVector init_decisions(std::size_t edge_count, std::size_t budget) {
  if (budget == 0) throw PreconditionError("budget must be positive");
  if (budget >= edge_count) throw PreconditionError("relaxation needs budget < edge count");
  const double keep = 1.0 - static_cast<double>(budget) / static_cast<double>(edge_count);
  return DecisionVector{std::vector<double>(edge_count, std::log(keep / (1.0 - keep)))};
}

std::vector<double> modified_probs(std::span<const double> probs, const DecisionVector& decisions) {
  if (probs.size() != decisions.size()) throw PreconditionError("probabilities and decisions differ in length");
  std::vector<double> out(probs.size());
  for (std::size_t e = 0; e < probs.size(); ++e) out[e] = probs[e] * decisions.keep_prob(static_cast<EdgeId>(e));
  return out;
}

double loss_budget(const DecisionVector& decisions, std::size_t budget, EdgeMaskView alive) {
  check_mask(alive, decisions.size());
  const double gap = budget_gap(decisions, budget, [&](EdgeId e) { return is_alive(alive, e); });
  return gap * gap;
}

double loss_certainty(const DecisionVector& decisions, EdgeMaskView alive) {
  check_mask(alive, decisions.size());
  double sum = 0.0;
  std::size_t count = 0;
  for (EdgeId e = 0; e < decisions.size(); ++e) {
    if (!is_alive(alive, e)) continue;
    sum += entropy(decisions.keep_prob(e));
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

RelaxedObjective::RelaxedObjective(const SurrogateModel& model, const ProbGraph& graph, const SeedSet& seeds,
                                   EdgeMaskView alive)
    : graph_(graph), seeds_(seeds), alive_(alive.begin(), alive.end()), ws_(model, graph) {
  check_mask(alive, graph.edge_count());
  if (alive_.empty()) alive_.assign(graph.edge_count(), 1);
  std::vector<double> w(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) w[e] = alive_[e] ? graph.prob(e) : 0.0;
  const SeedSet* one[] = {&seeds_};
  ws_.forward(w, one);
  baseline_ = ws_.sigma_hat(0);
  if (!(baseline_ - static_cast<double>(seeds.size()) > 1e-9)) {
    throw DegenerateDenominator("surrogate influence does not exceed the seed count");
  }
}

void RelaxedObjective::check(const DecisionVector& decisions) const {
  if (decisions.size() != graph_.edge_count()) throw PreconditionError("decision vector length mismatch");
}

std::vector<double> RelaxedObjective::weights_for(const DecisionVector& decisions) const {
  std::vector<double> w(graph_.edge_count());
  for (EdgeId e = 0; e < graph_.edge_count(); ++e) {
    w[e] = alive_[e] ? graph_.prob(e) * decisions.keep_prob(e) : 0.0;
  }
  return w;
}

double RelaxedObjective::loss_obj(const DecisionVector& decisions) {
  check(decisions);
  const SeedSet* one[] = {&seeds_};
  ws_.forward(weights_for(decisions), one);
  return (ws_.sigma_hat(0) - baseline_) / (baseline_ - static_cast<double>(seeds_.size()));
}

LossBreakdown RelaxedObjective::loss_total(const DecisionVector& decisions, std::size_t budget, double alpha,
                                           double beta) {
  LossBreakdown out;
  out.alpha = alpha;
  out.beta = beta;
  out.obj = loss_obj(decisions);
  out.budget = loss_budget(decisions, budget, alive_);
  out.certainty = loss_certainty(decisions, alive_);
  out.total = out.obj + alpha * out.budget + beta * out.certainty;
  return out;
}

LossBreakdown RelaxedObjective::gradient(const DecisionVector& decisions, std::size_t budget, double alpha,
                                         double beta, std::vector<double>& grad_logits) {
  const auto out = loss_total(decisions, budget, alpha, beta);
  const std::size_t m = graph_.edge_count();
  std::vector<double> dsigma;
  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(graph_.node_count()), 1);
  ws_.backward(upstream, nullptr, &dsigma);

  double edges = 0.0;
  for (EdgeId e = 0; e < m; ++e) edges += alive_[e] ? 1.0 : 0.0;
  const double gap = budget_gap(decisions, budget, [&](EdgeId e) { return alive_[e] != 0; });
  const double denom = baseline_ - static_cast<double>(seeds_.size());
  grad_logits.assign(m, 0.0);
  for (EdgeId e = 0; e < m; ++e) {
    if (!alive_[e]) continue;
    const double r = decisions.keep_prob(e);
    const double dr = r * (1.0 - r);
    const double d_obj = dsigma[e] * graph_.prob(e) / denom;
    const double d_budget = -2.0 * gap;
    const double d_cert = entropy_slope(r) / edges;
    grad_logits[e] = (d_obj + alpha * d_budget + beta * d_cert) * dr;
  }
  return out;
}

double loss_obj(const SurrogateModel& model, const ProbGraph& graph, const DecisionVector& decisions,
                const SeedSet& seeds) {
  RelaxedObjective objective(model, graph, seeds);
  return objective.loss_obj(decisions);
}

LossBreakdown loss_total(const SurrogateModel& model, const ProbGraph& graph, const DecisionVector& decisions,
                         const SeedSet& seeds, std::size_t budget, double alpha, double beta) {
  RelaxedObjective objective(model, graph, seeds);
  return objective.loss_total(decisions, budget, alpha, beta);
}

std::vector<double> grad_decisions(const SurrogateModel& model, const ProbGraph& graph,
                                   const DecisionVector& decisions, const SeedSet& seeds, std::size_t budget,
                                   double alpha, double beta) {
  RelaxedObjective objective(model, graph, seeds);
  std::vector<double> grad;
  objective.gradient(decisions, budget, alpha, beta, grad);
  return grad;
}

}  // namespace imin
