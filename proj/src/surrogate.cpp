#include "imin/surrogate.hpp"

#include <cmath>

#include "imin/errors.hpp"
#include "imin/rng.hpp"

namespace imin {

namespace {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

SurrogateModel SurrogateModel::zeros(std::size_t layer_count, std::size_t hidden_dim) {
  if (layer_count == 0 || hidden_dim == 0) throw PreconditionError("surrogate needs at least one layer and unit");
  SurrogateModel m;
  const auto d = static_cast<Eigen::Index>(hidden_dim);
  for (std::size_t l = 0; l < layer_count; ++l) {
    const Eigen::Index in = l == 0 ? 1 : d;
    m.layers.push_back({Eigen::MatrixXd::Zero(in, d), Eigen::MatrixXd::Zero(in, d), Eigen::RowVectorXd::Zero(d)});
  }
  m.head_w = Eigen::VectorXd::Zero(d);
  return m;
}

SurrogateModel SurrogateModel::glorot(std::size_t layer_count, std::size_t hidden_dim, std::uint64_t rng_seed) {
  auto m = zeros(layer_count, hidden_dim);
  Rng rng = make_stream(rng_seed, 0, 20);
  auto fill = [&](auto& mat) {
    const double limit = std::sqrt(6.0 / static_cast<double>(mat.rows() + mat.cols()));
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = uniform_real(rng, -limit, limit);
    }
  };
  for (auto& layer : m.layers) {
    fill(layer.w_self);
    fill(layer.w_nbr);
  }
  fill(m.head_w);
  return m;
}

std::size_t SurrogateModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w_self.size() + l.w_nbr.size() + l.bias.size();
  return n + head_w.size() + 1;
}

Eigen::VectorXd SurrogateModel::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index k = 0;
  auto put = [&](const auto& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) flat[k++] = mat(i, j);
    }
  };
  for (const auto& l : layers) {
    put(l.w_self);
    put(l.w_nbr);
    put(l.bias);
  }
  put(head_w);
  flat[k] = head_b;
  return flat;
}

void SurrogateModel::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw PreconditionError("parameter vector has the wrong length");
  }
  Eigen::Index k = 0;
  auto take = [&](auto& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = flat[k++];
    }
  };
  for (auto& l : layers) {
    take(l.w_self);
    take(l.w_nbr);
    take(l.bias);
  }
  take(head_w);
  head_b = flat[k];
}

SurrogateModel SurrogateModel::zeros_like() const {
  auto m = zeros(layer_count(), hidden_dim());
  return m;
}

GnnWorkspace::GnnWorkspace(const SurrogateModel& model, const ProbGraph& graph) : model_(model), graph_(graph) {
  if (model.layers.empty() || model.layers[0].w_self.rows() != 1) {
    throw PreconditionError("surrogate input dimension must be 1");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const Eigen::Index in = l == 0 ? 1 : static_cast<Eigen::Index>(model.hidden_dim());
    if (layer.w_self.rows() != in || layer.w_nbr.rows() != in || layer.w_self.cols() != model.head_w.size() ||
        layer.w_nbr.cols() != model.head_w.size() || layer.bias.size() != model.head_w.size()) {
      throw PreconditionError("surrogate layer " + std::to_string(l) + " has inconsistent dimensions");
    }
  }
  const std::size_t layers = model.layers.size();
  h_.resize(layers + 1);
  p_.resize(layers);
  z_.resize(layers);
}

void GnnWorkspace::propagate(const RowMatrix& h, RowMatrix& p) const {
  const Eigen::Index b = static_cast<Eigen::Index>(batch_);
  p.setZero(h.rows(), h.cols());
  const Eigen::Index stride = b * h.cols();
  for (EdgeId e = 0; e < graph_.edge_count(); ++e) {
    const double w = weights_[e];
    if (w == 0.0) continue;
    Eigen::Map<Eigen::RowVectorXd> dst(p.data() + graph_.dst(e) * stride, stride);
    Eigen::Map<const Eigen::RowVectorXd> src(h.data() + graph_.src(e) * stride, stride);
    dst.noalias() += w * src;
  }
  if (!any_dropped_) return;
  const Eigen::Index d = h.cols();
  for (std::size_t i = 0; i < batch_; ++i) {
    const EdgeId e = dropped_[i];
    if (e == kNoEdge || weights_[e] == 0.0) continue;
    const Eigen::Index dst_row = graph_.dst(e) * b + static_cast<Eigen::Index>(i);
    const Eigen::Index src_row = graph_.src(e) * b + static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < d; ++k) p(dst_row, k) -= weights_[e] * h(src_row, k);
  }
}

void GnnWorkspace::forward(std::span<const double> edge_weights, std::span<const SeedSet* const> seeds,
                           std::span<const EdgeId> dropped) {
  const std::size_t n = graph_.node_count();
  if (edge_weights.size() != graph_.edge_count()) {
    throw PreconditionError("edge weight vector length " + std::to_string(edge_weights.size()) +
                            " does not match edge count " + std::to_string(graph_.edge_count()));
  }
  if (seeds.empty()) throw PreconditionError("empty batch");
  if (!dropped.empty() && dropped.size() != seeds.size()) {
    throw PreconditionError("dropped-edge list must match the batch size");
  }
  weights_.assign(edge_weights.begin(), edge_weights.end());
  batch_ = seeds.size();
  dropped_.assign(dropped.begin(), dropped.end());
  any_dropped_ = false;
  for (auto e : dropped_) {
    if (e == kNoEdge) continue;
    if (e >= graph_.edge_count()) throw PreconditionError("dropped edge id out of range");
    any_dropped_ = true;
  }

  const Eigen::Index b = static_cast<Eigen::Index>(batch_);
  const Eigen::Index rows = static_cast<Eigen::Index>(n) * b;
  seed_.setZero(static_cast<Eigen::Index>(n), b);
  for (std::size_t i = 0; i < batch_; ++i) {
    for (auto s : seeds[i]->members()) {
      if (s >= n) throw PreconditionError("seed set is not valid for the graph");
      seed_(s, static_cast<Eigen::Index>(i)) = 1;
    }
  }
  h_[0].resize(rows, 1);
  for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(n); ++v) {
    for (Eigen::Index i = 0; i < b; ++i) h_[0](v * b + i, 0) = seed_(v, i);
  }
  for (std::size_t l = 0; l < model_.layers.size(); ++l) {
    const auto& layer = model_.layers[l];
    propagate(h_[l], p_[l]);
    z_[l].noalias() = h_[l] * layer.w_self;
    z_[l].noalias() += p_[l] * layer.w_nbr;
    z_[l].rowwise() += layer.bias;
    h_[l + 1] = z_[l].unaryExpr([](double z) { return softplus(z); });
  }
  const Eigen::VectorXd logits = h_.back() * model_.head_w;
  out_.resize(static_cast<Eigen::Index>(n), b);
  for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(n); ++v) {
    for (Eigen::Index i = 0; i < b; ++i) {
      out_(v, i) = seed_(v, i) ? 1.0 : sigmoid(logits[v * b + i] + model_.head_b);
    }
  }
  have_cache_ = true;
  ++forwards_;
}

PredictedInfluence GnnWorkspace::prediction(std::size_t sample) const {
  PredictedInfluence p;
  p.per_node.resize(graph_.node_count());
  for (NodeId v = 0; v < graph_.node_count(); ++v) p.per_node[v] = out_(v, static_cast<Eigen::Index>(sample));
  for (double x : p.per_node) p.sigma_hat += x;
  return p;
}

void GnnWorkspace::backward(const Eigen::MatrixXd& upstream, SurrogateModel* weight_grad,
                            std::vector<double>* edge_grad) {
  if (!have_cache_) throw PreconditionError("backward called without a forward pass");
  if (any_dropped_) throw PreconditionError("backward does not support dropped edges");
  const Eigen::Index n = static_cast<Eigen::Index>(graph_.node_count());
  const Eigen::Index b = static_cast<Eigen::Index>(batch_);
  if (upstream.rows() != n || upstream.cols() != b) throw PreconditionError("upstream gradient has the wrong shape");
  if (weight_grad && weight_grad->parameter_count() != model_.parameter_count()) {
    throw PreconditionError("gradient model has the wrong shape");
  }
  if (edge_grad) edge_grad->resize(graph_.edge_count(), 0.0);
  ++backwards_;

  Eigen::VectorXd g(n * b);
  for (Eigen::Index v = 0; v < n; ++v) {
    for (Eigen::Index i = 0; i < b; ++i) {
      const double y = out_(v, i);
      g[v * b + i] = seed_(v, i) ? 0.0 : upstream(v, i) * y * (1.0 - y);
    }
  }
  if (weight_grad) {
    weight_grad->head_w.noalias() += h_.back().transpose() * g;
    weight_grad->head_b += g.sum();
  }
  RowMatrix dh = g * model_.head_w.transpose();
  RowMatrix gz;
  RowMatrix dp;
  for (std::size_t l = model_.layers.size(); l-- > 0;) {
    const auto& layer = model_.layers[l];
    gz = dh.cwiseProduct(z_[l].unaryExpr([](double z) { return sigmoid(z); }));
    if (weight_grad) {
      auto& gl = weight_grad->layers[l];
      gl.w_self.noalias() += h_[l].transpose() * gz;
      gl.w_nbr.noalias() += p_[l].transpose() * gz;
      gl.bias += gz.colwise().sum();
    }
    dp.noalias() = gz * layer.w_nbr.transpose();
    const Eigen::Index stride = b * dp.cols();
    if (edge_grad) {
      for (EdgeId e = 0; e < graph_.edge_count(); ++e) {
        Eigen::Map<const Eigen::RowVectorXd> up(dp.data() + graph_.dst(e) * stride, stride);
        Eigen::Map<const Eigen::RowVectorXd> hin(h_[l].data() + graph_.src(e) * stride, stride);
        (*edge_grad)[e] += up.dot(hin);
      }
    }
    if (l == 0) break;
    dh.noalias() = gz * layer.w_self.transpose();
    for (EdgeId e = 0; e < graph_.edge_count(); ++e) {
      const double w = weights_[e];
      if (w == 0.0) continue;
      Eigen::Map<Eigen::RowVectorXd> to(dh.data() + graph_.src(e) * stride, stride);
      Eigen::Map<const Eigen::RowVectorXd> from(dp.data() + graph_.dst(e) * stride, stride);
      to.noalias() += w * from;
    }
  }
}

PredictedInfluence gnn_forward(const SurrogateModel& model, const ProbGraph& graph,
                               std::span<const double> edge_weights, const SeedSet& seeds) {
  GnnWorkspace ws(model, graph);
  const SeedSet* batch[] = {&seeds};
  ws.forward(edge_weights, batch);
  return ws.prediction(0);
}

GnnGradients gnn_backward(const SurrogateModel& model, const ProbGraph& graph, std::span<const double> edge_weights,
                          const SeedSet& seeds, std::span<const double> upstream) {
  if (upstream.size() != graph.node_count()) throw PreconditionError("upstream gradient has the wrong length");
  GnnWorkspace ws(model, graph);
  const SeedSet* batch[] = {&seeds};
  ws.forward(edge_weights, batch);
  GnnGradients grads{model.zeros_like(), std::vector<double>(graph.edge_count(), 0.0)};
  Eigen::MatrixXd up = Eigen::Map<const Eigen::VectorXd>(upstream.data(), upstream.size());
  ws.backward(up, &grads.weights, &grads.edge_weights);
  return grads;
}

}  // namespace imin
