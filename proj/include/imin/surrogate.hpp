#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imin/graph.hpp"

namespace imin {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Edge-weighted graph convolution network. Layer l maps
///   H' = softplus(H * w_self + P(H) * w_nbr + bias),
/// where P(H)[v] sums weight(u,v) * H[u] over the in-edges of v. A linear
/// head with a logistic output gives one probability per node.
struct SurrogateModel {
  struct Layer {
    Eigen::MatrixXd w_self;
    Eigen::MatrixXd w_nbr;
    Eigen::RowVectorXd bias;
  };

  std::vector<Layer> layers;
  Eigen::VectorXd head_w;
  double head_b = 0.0;

  /// Provenance, carried through checkpoints.
  std::string train_graph_hash;
  std::string diffusion;

  /// All weights zero; the first layer takes a single input feature.
  static SurrogateModel zeros(std::size_t layer_count, std::size_t hidden_dim);
  /// Glorot-uniform weights, zero biases.
  static SurrogateModel glorot(std::size_t layer_count, std::size_t hidden_dim, std::uint64_t rng_seed);

  std::size_t layer_count() const { return layers.size(); }
  std::size_t hidden_dim() const { return head_w.size(); }
  std::size_t parameter_count() const;

  /// Parameters in a fixed order: per layer w_self, w_nbr, bias (row-major),
  /// then head_w and head_b.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  SurrogateModel zeros_like() const;
};

struct PredictedInfluence {
  std::vector<double> per_node;
  double sigma_hat = 0.0;
};

/// Sentinel for "drop no edge" in GnnWorkspace::forward.
inline constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

/// Batched forward/backward evaluation of one model on one graph. A batch
/// holds several seed sets that share the same edge weights; each sample
/// may additionally have one edge's weight treated as zero.
class GnnWorkspace {
 public:
  GnnWorkspace(const SurrogateModel& model, const ProbGraph& graph);

  void forward(std::span<const double> edge_weights, std::span<const SeedSet* const> seeds,
               std::span<const EdgeId> dropped = {});

  std::size_t batch_size() const { return batch_; }
  double output(std::size_t sample, NodeId v) const { return out_(v, sample); }
  /// n x batch matrix of predicted probabilities.
  const Eigen::MatrixXd& outputs() const { return out_; }
  double sigma_hat(std::size_t sample) const { return out_.col(sample).sum(); }
  PredictedInfluence prediction(std::size_t sample) const;

  /// Reverse pass of sum_{v,i} upstream(v,i) * output(i,v) for the last
  /// forward. Gradients are accumulated into the non-null targets.
  /// Samples with a dropped edge are not supported here.
  void backward(const Eigen::MatrixXd& upstream, SurrogateModel* weight_grad, std::vector<double>* edge_grad);

  std::uint64_t forward_passes() const { return forwards_; }
  std::uint64_t backward_passes() const { return backwards_; }

 private:
  void propagate(const RowMatrix& h, RowMatrix& p) const;

  const SurrogateModel& model_;
  const ProbGraph& graph_;
  std::vector<double> weights_;
  std::vector<EdgeId> dropped_;
  std::size_t batch_ = 0;
  bool have_cache_ = false;
  bool any_dropped_ = false;

  // cache, rows indexed v * batch + i
  std::vector<RowMatrix> h_;  // layer inputs, h_[L] is the last hidden state
  std::vector<RowMatrix> p_;  // aggregated inputs
  std::vector<RowMatrix> z_;  // pre-activations
  Eigen::MatrixXd out_;       // n x batch
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> seed_;

  std::uint64_t forwards_ = 0;
  std::uint64_t backwards_ = 0;
};

/// Single-sample convenience wrapper.
PredictedInfluence gnn_forward(const SurrogateModel& model, const ProbGraph& graph,
                               std::span<const double> edge_weights, const SeedSet& seeds);

struct GnnGradients {
  SurrogateModel weights;
  std::vector<double> edge_weights;
};

GnnGradients gnn_backward(const SurrogateModel& model, const ProbGraph& graph, std::span<const double> edge_weights,
                          const SeedSet& seeds, std::span<const double> upstream);

// ---- training -------------------------------------------------------------

struct TrainConfig {
  std::size_t epochs = 2000;
  double learning_rate = 1e-3;
  double lr_decay = 0.999;
  /// 0 trains on every sample and selects the kept weights by training loss.
  double validation_fraction = 0.2;
  std::uint64_t rng_seed = 0;
  std::size_t layer_count = 6;
  std::size_t hidden_dim = 32;
  /// Seed sets per forward/backward chunk.
  std::size_t batch_size = 64;
  /// Start the head bias at the logit of the mean non-seed target.
  bool init_head_bias = true;
};

struct TrainReport {
  double initial_val_loss = 0.0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  /// Pearson r between predicted and target sigma on the validation split.
  double val_pearson = 0.0;
  double seconds = 0.0;
};

/// Training samples. Each sample is a seed set, the per-node target
/// probabilities and the index of the edge-weight vector it was simulated
/// under (usually the graph's own probabilities).
struct TrainingData {
  std::vector<std::vector<double>> weight_sets;
  std::vector<SeedSet> seeds;
  std::vector<std::size_t> weight_id;
  std::vector<std::vector<double>> targets;

  static TrainingData from_graph(const ProbGraph& graph, std::vector<SeedSet> seeds,
                                 std::vector<std::vector<double>> targets);
  std::size_t size() const { return seeds.size(); }
};

/// Mean over seed sets of sqrt(sum_v (pred - target)^2).
double surrogate_loss(const SurrogateModel& model, const ProbGraph& graph, std::span<const SeedSet> seed_sets,
                      std::span<const std::vector<double>> targets);

/// Same loss for an arbitrary sample subset, with the gradient w.r.t.
/// every model weight accumulated into `grad` when non-null.
double surrogate_loss(const SurrogateModel& model, const ProbGraph& graph, const TrainingData& data,
                      std::span<const std::size_t> samples, std::size_t batch_size, SurrogateModel* grad);

std::pair<SurrogateModel, TrainReport> train_surrogate(const ProbGraph& graph, const TrainingData& data,
                                                       const TrainConfig& config);

// ---- persistence ----------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

void save_model(const SurrogateModel& model, const std::string& path);
SurrogateModel load_model(const std::string& path);

/// MC target cache: per seed-set id, the per-node influenced probabilities.
void save_targets(const std::vector<std::vector<double>>& targets, const std::string& graph_hash,
                  const std::string& path);
std::vector<std::vector<double>> load_targets(const std::string& path, const std::string& graph_hash);

}  // namespace imin
