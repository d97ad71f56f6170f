#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace imin {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Per-edge liveness flags (1 = present). An empty view means "every edge".
using EdgeMaskView = std::span<const std::uint8_t>;
using EdgeMask = std::vector<std::uint8_t>;

/// Immutable directed graph with one activation probability per edge.
///
/// Edges keep the id they were given at construction; both adjacency
/// indexes list edge ids in ascending order.
class ProbGraph {
 public:
  ProbGraph() = default;

  /// Throws PreconditionError on out-of-range endpoints, probabilities
  /// outside [0,1], duplicate (src,dst) pairs, or a label count mismatch.
  /// Labels default to the decimal node index.
  ProbGraph(std::size_t node_count, std::vector<Edge> edges, std::vector<double> probs,
            std::vector<std::string> labels = {});

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  NodeId src(EdgeId e) const { return edges_[e].src; }
  NodeId dst(EdgeId e) const { return edges_[e].dst; }
  double prob(EdgeId e) const { return probs_[e]; }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const double> probs() const { return probs_; }

  std::span<const EdgeId> out_edges(NodeId v) const {
    return {out_ids_.data() + out_offsets_[v], out_ids_.data() + out_offsets_[v + 1]};
  }
  std::span<const EdgeId> in_edges(NodeId v) const {
    return {in_ids_.data() + in_offsets_[v], in_ids_.data() + in_offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }

  const std::string& label(NodeId v) const { return labels_[v]; }
  std::span<const std::string> labels() const { return labels_; }
  std::optional<NodeId> find_node(const std::string& label) const;
  std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const;

  /// Same structure and labels, new probabilities.
  ProbGraph with_probs(std::vector<double> probs) const;

  /// Stable 64-bit content hash (structure, probabilities, labels) as hex.
  std::string content_hash() const;

  friend bool operator==(const ProbGraph& a, const ProbGraph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_ && a.probs_ == b.probs_ &&
           a.labels_ == b.labels_;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> probs_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<EdgeId> out_ids_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<EdgeId> in_ids_;
};

/// Non-empty set of distinct node indexes, stored sorted.
class SeedSet {
 public:
  SeedSet() = default;
  /// Throws PreconditionError when empty, out of range, or duplicated.
  SeedSet(std::vector<NodeId> members, std::size_t node_count);

  std::span<const NodeId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(NodeId v) const;
  /// 0/1 indicator over all nodes.
  std::vector<std::uint8_t> indicator(std::size_t node_count) const;

  friend bool operator==(const SeedSet&, const SeedSet&) = default;

 private:
  std::vector<NodeId> members_;
};

/// Problem 1 input: graph (with its probabilities), seeds and an edge budget.
class ProblemInstance {
 public:
  /// Requires 1 <= budget <= edge count and seeds valid for the graph.
  ProblemInstance(const ProbGraph& graph, SeedSet seeds, std::size_t budget);

  const ProbGraph& graph() const { return *graph_; }
  const SeedSet& seeds() const { return seeds_; }
  std::size_t budget() const { return budget_; }

 private:
  const ProbGraph* graph_;
  SeedSet seeds_;
  std::size_t budget_;
};

/// Edges chosen for removal, in selection order.
struct EdgeRemovalSet {
  std::vector<EdgeId> edges;
  std::size_t size() const { return edges.size(); }
  friend bool operator==(const EdgeRemovalSet&, const EdgeRemovalSet&) = default;
};

/// Liveness mask with every edge in `removed` cleared.
EdgeMask alive_mask(const ProbGraph& graph, std::span<const EdgeId> removed);

// ---- file formats -------------------------------------------------------

struct LoadOptions {
  /// Used when a line carries no probability column.
  std::optional<double> default_prob;
  /// Keep only edges whose timestamp is < this value.
  std::optional<double> timestamp_before;
  /// Keep only edges whose timestamp is >= this value.
  std::optional<double> timestamp_from;
};

/// Parses `src dst [prob [timestamp]]` lines; '#' starts a comment.
/// Node labels become indexes in first-appearance order.
ProbGraph parse_edge_list(std::istream& in, const LoadOptions& options = {});
ProbGraph load_edge_list(const std::string& path, const LoadOptions& options = {});
void write_edge_list(const ProbGraph& graph, std::ostream& out);
void write_edge_list(const ProbGraph& graph, const std::string& path);

/// Seed-set files hold one node label per line. Several sets may share a
/// file, separated by blank lines.
std::vector<SeedSet> parse_seed_sets(std::istream& in, const ProbGraph& graph);
std::vector<SeedSet> load_seed_sets(const std::string& path, const ProbGraph& graph);
void write_seed_sets(std::span<const SeedSet> sets, const ProbGraph& graph, std::ostream& out);
void write_seed_sets(std::span<const SeedSet> sets, const ProbGraph& graph, const std::string& path);

// ---- generators ---------------------------------------------------------

/// Each edge (u,v) gets probability 1 / in-degree(v).
ProbGraph weighted_cascade_probs(const ProbGraph& graph);

/// Directed Erdos-Renyi graph; every ordered pair u != v kept with p_edge,
/// probabilities uniform in [prob_lo, prob_hi].
ProbGraph gen_er_graph(std::size_t n, double p_edge, std::pair<double, double> prob_range,
                       std::uint64_t rng_seed);

/// Default seed-size range (min(10, ceil(n/100)), max(1, floor(n/100))),
/// with the lower end clamped to the upper.
std::pair<std::size_t, std::size_t> default_seed_size_range(std::size_t node_count);

std::vector<SeedSet> gen_seed_sets(const ProbGraph& graph, std::size_t count,
                                   std::optional<std::pair<std::size_t, std::size_t>> size_range,
                                   std::uint64_t rng_seed);

}  // namespace imin
