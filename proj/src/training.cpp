#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "imin/errors.hpp"
#include "imin/optim.hpp"
#include "imin/rng.hpp"
#include "imin/stats.hpp"
#include "imin/surrogate.hpp"

namespace imin {

TrainingData TrainingData::from_graph(const ProbGraph& graph, std::vector<SeedSet> seeds,
                                      std::vector<std::vector<double>> targets) {
  TrainingData data;
  data.weight_sets.emplace_back(graph.probs().begin(), graph.probs().end());
  data.weight_id.assign(seeds.size(), 0);
  data.seeds = std::move(seeds);
  data.targets = std::move(targets);
  return data;
}

namespace {

void check_data(const ProbGraph& graph, const TrainingData& data) {
  if (data.targets.size() != data.seeds.size() || data.weight_id.size() != data.seeds.size()) {
    throw PreconditionError("training data: seed sets, targets and weight ids differ in length");
  }
  for (const auto& t : data.targets) {
    if (t.size() != graph.node_count()) throw PreconditionError("training data: target length mismatch");
  }
  for (auto id : data.weight_id) {
    if (id >= data.weight_sets.size()) throw PreconditionError("training data: weight id out of range");
  }
  for (const auto& w : data.weight_sets) {
    if (w.size() != graph.edge_count()) throw PreconditionError("training data: weight vector length mismatch");
  }
}

}  // namespace

double surrogate_loss(const SurrogateModel& model, const ProbGraph& graph, const TrainingData& data,
                      std::span<const std::size_t> samples, std::size_t batch_size, SurrogateModel* grad) {
  if (samples.empty()) throw PreconditionError("surrogate loss over an empty sample set");
  if (batch_size == 0) batch_size = 1;
  // group by weight vector, keeping sample order inside a group
  std::vector<std::size_t> order(samples.begin(), samples.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data.weight_id[a] < data.weight_id[b]; });

  GnnWorkspace ws(model, graph);
  const double scale = 1.0 / static_cast<double>(samples.size());
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  double total = 0.0;
  std::vector<const SeedSet*> batch;
  Eigen::MatrixXd upstream;
  std::size_t start = 0;
  while (start < order.size()) {
    const std::size_t wid = data.weight_id[order[start]];
    std::size_t end = start;
    while (end < order.size() && end - start < batch_size && data.weight_id[order[end]] == wid) ++end;
    batch.clear();
    for (std::size_t k = start; k < end; ++k) batch.push_back(&data.seeds[order[k]]);
    ws.forward(data.weight_sets[wid], batch);
    const auto& out = ws.outputs();
    if (grad) upstream.setZero(n, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t k = start; k < end; ++k) {
      const auto i = static_cast<Eigen::Index>(k - start);
      const auto& target = data.targets[order[k]];
      double rss = 0.0;
      for (Eigen::Index v = 0; v < n; ++v) {
        const double diff = out(v, i) - target[v];
        rss += diff * diff;
      }
      const double norm = std::sqrt(rss);
      total += norm;
      if (grad && norm > 0.0) {
        for (Eigen::Index v = 0; v < n; ++v) upstream(v, i) = scale * (out(v, i) - target[v]) / norm;
      }
    }
    if (grad) ws.backward(upstream, grad, nullptr);
    start = end;
  }
  return total * scale;
}

double surrogate_loss(const SurrogateModel& model, const ProbGraph& graph, std::span<const SeedSet> seed_sets,
                      std::span<const std::vector<double>> targets) {
  if (seed_sets.size() != targets.size()) throw PreconditionError("seed sets and targets differ in length");
  auto data = TrainingData::from_graph(graph, std::vector<SeedSet>(seed_sets.begin(), seed_sets.end()),
                                       std::vector<std::vector<double>>(targets.begin(), targets.end()));
  check_data(graph, data);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return surrogate_loss(model, graph, data, all, 64, nullptr);
}

std::pair<SurrogateModel, TrainReport> train_surrogate(const ProbGraph& graph, const TrainingData& data,
                                                       const TrainConfig& config) {
  if (config.epochs < 1) throw PreconditionError("training needs at least one epoch");
  if (!(config.learning_rate > 0.0)) throw PreconditionError("learning rate must be positive");
  if (!(config.lr_decay > 0.0 && config.lr_decay <= 1.0)) throw PreconditionError("lr decay must lie in (0,1]");
  if (data.size() < 2) throw PreconditionError("training needs at least two seed sets");
  check_data(graph, data);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_stream(config.rng_seed, 0, 21);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  if (!(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0)) {
    throw PreconditionError("validation fraction must lie in [0,1)");
  }
  std::vector<std::size_t> val, train;
  if (config.validation_fraction == 0.0) {
    val = train = perm;
  } else {
    auto n_val =
        static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(data.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);
    val.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
    train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
  }
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());

  auto model = SurrogateModel::glorot(config.layer_count, config.hidden_dim, config.rng_seed);
  if (config.init_head_bias) {
    double sum = 0.0;
    std::size_t count = 0;
    for (auto i : train) {
      for (NodeId v = 0; v < graph.node_count(); ++v) {
        if (data.seeds[i].contains(v)) continue;
        sum += data.targets[i][v];
        ++count;
      }
    }
    const double m = std::clamp(count ? sum / static_cast<double>(count) : 0.5, 1e-4, 1.0 - 1e-4);
    model.head_b = std::log(m / (1.0 - m));
  }

  TrainReport report;
  report.initial_val_loss = surrogate_loss(model, graph, data, val, config.batch_size, nullptr);
  report.best_val_loss = report.initial_val_loss;
  Eigen::VectorXd params = model.flatten();
  Eigen::VectorXd best = params;
  Adam adam(params.size());
  auto grad = model.zeros_like();
  double lr = config.learning_rate;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    grad = model.zeros_like();
    const double loss = surrogate_loss(model, graph, data, train, config.batch_size, &grad);
    const Eigen::VectorXd g = grad.flatten();
    if (!std::isfinite(loss) || !g.allFinite()) {
      throw Diverged("surrogate training diverged at epoch " + std::to_string(epoch) + " (loss " +
                     std::to_string(loss) + ")");
    }
    adam.step(params, g, lr);
    lr *= config.lr_decay;
    model.assign(params);
    const double vloss = surrogate_loss(model, graph, data, val, config.batch_size, nullptr);
    if (!std::isfinite(vloss)) {
      throw Diverged("surrogate validation loss is not finite at epoch " + std::to_string(epoch));
    }
    report.train_loss.push_back(loss);
    report.val_loss.push_back(vloss);
    if (vloss < report.best_val_loss) {
      report.best_val_loss = vloss;
      report.best_epoch = epoch + 1;
      best = params;
    }
  }
  model.assign(best);
  model.train_graph_hash = graph.content_hash();

  // validation correlation of the kept weights
  std::vector<double> predicted, actual;
  GnnWorkspace ws(model, graph);
  for (auto i : val) {
    const SeedSet* one[] = {&data.seeds[i]};
    ws.forward(data.weight_sets[data.weight_id[i]], one);
    predicted.push_back(ws.sigma_hat(0));
    double s = 0.0;
    for (double t : data.targets[i]) s += t;
    actual.push_back(s);
  }
  try {
    report.val_pearson = pearson_r(predicted, actual);
  } catch (const PreconditionError&) {
    report.val_pearson = 0.0;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(model), report};
}

}  // namespace imin
