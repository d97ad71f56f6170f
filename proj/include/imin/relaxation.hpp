#pragma once

#include <span>
#include <vector>

#include "imin/graph.hpp"
#include "imin/surrogate.hpp"

namespace imin {

/// Per-edge keep probabilities stored as pre-sigmoid logits.
struct DecisionVector {
  std::vector<double> logits;

  std::size_t size() const { return logits.size(); }
  double keep_prob(EdgeId e) const;
  std::vector<double> keep_probs() const;
};

/// Every keep probability equals 1 - budget/edge_count, so the budget loss
/// starts at zero. Requires 1 <= budget < edge_count.
DecisionVector init_decisions(std::size_t edge_count, std::size_t budget);

/// p(e) * keep_prob(e).
std::vector<double> modified_probs(std::span<const double> probs, const DecisionVector& decisions);

/// (|E| - sum keep_prob - b)^2 over the edges with alive[e] set.
double loss_budget(const DecisionVector& decisions, std::size_t budget, EdgeMaskView alive = {});

/// Mean binary entropy of the keep probabilities of alive edges, with the
/// probabilities clamped to [1e-7, 1 - 1e-7] inside the logarithms.
double loss_certainty(const DecisionVector& decisions, EdgeMaskView alive = {});

struct LossBreakdown {
  double total = 0.0;
  double obj = 0.0;
  double budget = 0.0;
  double certainty = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// The relaxed removal objective for one (graph, seeds) pair. Edges cleared
/// in `alive` are treated as already removed: they carry zero weight in the
/// surrogate and take no part in the budget or certainty terms.
class RelaxedObjective {
 public:
  RelaxedObjective(const SurrogateModel& model, const ProbGraph& graph, const SeedSet& seeds,
                   EdgeMaskView alive = {});

  /// Surrogate influence on the current graph with no relaxation applied.
  double baseline_sigma() const { return baseline_; }

  /// (sigma_hat(p * keep) - sigma_hat(p)) / (sigma_hat(p) - |S|).
  double loss_obj(const DecisionVector& decisions);

  LossBreakdown loss_total(const DecisionVector& decisions, std::size_t budget, double alpha, double beta);

  /// Loss plus its gradient w.r.t. every logit (zero for removed edges).
  LossBreakdown gradient(const DecisionVector& decisions, std::size_t budget, double alpha, double beta,
                         std::vector<double>& grad_logits);

  std::uint64_t forward_passes() const { return ws_.forward_passes(); }
  std::uint64_t backward_passes() const { return ws_.backward_passes(); }

 private:
  std::vector<double> weights_for(const DecisionVector& decisions) const;
  void check(const DecisionVector& decisions) const;

  const ProbGraph& graph_;
  const SeedSet& seeds_;
  EdgeMask alive_;
  GnnWorkspace ws_;
  double baseline_ = 0.0;
};

/// Free-function forms over the whole graph.
double loss_obj(const SurrogateModel& model, const ProbGraph& graph, const DecisionVector& decisions,
                const SeedSet& seeds);
LossBreakdown loss_total(const SurrogateModel& model, const ProbGraph& graph, const DecisionVector& decisions,
                         const SeedSet& seeds, std::size_t budget, double alpha = 0.1, double beta = 1.0);
std::vector<double> grad_decisions(const SurrogateModel& model, const ProbGraph& graph,
                                   const DecisionVector& decisions, const SeedSet& seeds, std::size_t budget,
                                   double alpha = 0.1, double beta = 1.0);

}  // namespace imin
