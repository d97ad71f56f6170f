#include <cmath>
#include <numeric>

#include "imin/baselines.hpp"
#include "imin/errors.hpp"

namespace imin {

std::vector<double> outdegree_edge_scores(const ProbGraph& graph) {
  std::vector<double> s(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    s[e] = static_cast<double>(graph.out_degree(graph.src(e)) + graph.out_degree(graph.dst(e)));
  }
  return s;
}

std::vector<double> pagerank(const ProbGraph& graph, double damping, double tol, std::size_t max_iters) {
  const std::size_t n = graph.node_count();
  if (n == 0) return {};
  if (!(damping >= 0.0 && damping < 1.0)) throw PreconditionError("damping must lie in [0,1)");
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> pr(n, inv_n), next(n);
  double delta = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (graph.out_degree(v) == 0) dangling += pr[v];
    }
    const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
    std::fill(next.begin(), next.end(), base);
    for (NodeId u = 0; u < n; ++u) {
      const auto deg = graph.out_degree(u);
      if (deg == 0) continue;
      const double share = damping * pr[u] / static_cast<double>(deg);
      for (auto e : graph.out_edges(u)) next[graph.dst(e)] += share;
    }
    delta = 0.0;
    for (NodeId v = 0; v < n; ++v) delta += std::fabs(next[v] - pr[v]);
    pr.swap(next);
    if (delta < tol) return pr;
  }
  throw NotConverged("pagerank did not converge", delta);
}

std::vector<double> pagerank_edge_scores(const ProbGraph& graph, double damping, double tol) {
  const auto pr = pagerank(graph, damping, tol);
  std::vector<double> s(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) s[e] = pr[graph.src(e)] + pr[graph.dst(e)];
  return s;
}

std::vector<double> edge_betweenness(const ProbGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> eb(graph.edge_count(), 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId v = order[head];
      for (auto e : graph.out_edges(v)) {
        const NodeId w = graph.dst(e);
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (std::size_t k = order.size(); k-- > 0;) {
      const NodeId w = order[k];
      for (auto e : graph.in_edges(w)) {
        const NodeId v = graph.src(e);
        if (dist[v] < 0 || dist[v] + 1 != dist[w]) continue;
        const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        eb[e] += c;
        delta[v] += c;
      }
    }
  }
  return eb;
}

namespace {

// Power iteration of (A + I) (or its transpose) from the all-ones vector.
std::vector<double> perron_vector(const ProbGraph& graph, bool transpose, std::size_t max_iters, double tol,
                                  double& value) {
  const std::size_t n = graph.node_count();
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double change = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    y = x;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
      // right vector: y = (A + I) x gathers along out-edges
      if (transpose) {
        y[graph.dst(e)] += x[graph.src(e)];
      } else {
        y[graph.src(e)] += x[graph.dst(e)];
      }
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    value = norm - 1.0;
    change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      y[v] /= norm;
      change = std::max(change, std::fabs(y[v] - x[v]));
    }
    x.swap(y);
    if (change < tol) return x;
  }
  throw NotConverged("power iteration did not converge", change);
}

}  // namespace

Eigenpair leading_eigenpair(const ProbGraph& graph, std::size_t max_iters, double tol) {
  if (graph.node_count() == 0) throw PreconditionError("eigenvector of an empty graph");
  Eigenpair out;
  double left_value = 0.0;
  out.right = perron_vector(graph, false, max_iters, tol, out.value);
  out.left = perron_vector(graph, true, max_iters, tol, left_value);
  return out;
}

std::vector<double> eigen_drop_edge_scores(const ProbGraph& graph, std::size_t max_iters, double tol) {
  const auto pair = leading_eigenpair(graph, max_iters, tol);
  std::vector<double> s(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) s[e] = pair.left[graph.src(e)] * pair.right[graph.dst(e)];
  return s;
}

}  // namespace imin
