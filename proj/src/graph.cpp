#include "imin/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "imin/errors.hpp"

namespace imin {

namespace {

void build_index(std::size_t node_count, std::span<const Edge> edges, bool by_src,
                 std::vector<std::size_t>& offsets, std::vector<EdgeId>& ids) {
  offsets.assign(node_count + 1, 0);
  for (const auto& e : edges) {
    offsets[(by_src ? e.src : e.dst) + 1]++;
  }
  for (std::size_t v = 0; v < node_count; ++v) {
    offsets[v + 1] += offsets[v];
  }
  ids.resize(edges.size());
  auto cursor = offsets;
  // ascending edge id within each slice because edges are visited in order
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const auto v = by_src ? edges[id].src : edges[id].dst;
    ids[cursor[v]++] = id;
  }
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ProbGraph::ProbGraph(std::size_t node_count, std::vector<Edge> edges, std::vector<double> probs,
                     std::vector<std::string> labels)
    : node_count_(node_count), edges_(std::move(edges)), probs_(std::move(probs)), labels_(std::move(labels)) {
  if (probs_.size() != edges_.size()) {
    throw PreconditionError("probability count does not match edge count");
  }
  if (labels_.empty()) {
    labels_.reserve(node_count_);
    for (std::size_t v = 0; v < node_count_; ++v) {
      labels_.push_back(std::to_string(v));
    }
  } else if (labels_.size() != node_count_) {
    throw PreconditionError("label count does not match node count");
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].src >= node_count_ || edges_[i].dst >= node_count_) {
      throw PreconditionError("edge " + std::to_string(i) + " has an endpoint outside the node range");
    }
    if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0)) {
      throw PreconditionError("edge " + std::to_string(i) + " has a probability outside [0,1]");
    }
  }
  label_index_.reserve(node_count_);
  for (NodeId v = 0; v < node_count_; ++v) {
    if (!label_index_.emplace(labels_[v], v).second) {
      throw PreconditionError("duplicate node label '" + labels_[v] + "'");
    }
  }
  build_index(node_count_, edges_, true, out_offsets_, out_ids_);
  build_index(node_count_, edges_, false, in_offsets_, in_ids_);
  for (NodeId v = 0; v < node_count_; ++v) {
    auto out = out_edges(v);
    std::vector<NodeId> targets;
    targets.reserve(out.size());
    for (auto e : out) {
      targets.push_back(edges_[e].dst);
    }
    std::sort(targets.begin(), targets.end());
    if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) {
      throw PreconditionError("duplicate edge out of node '" + labels_[v] + "'");
    }
  }
}

std::optional<NodeId> ProbGraph::find_node(const std::string& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<EdgeId> ProbGraph::find_edge(NodeId src, NodeId dst) const {
  for (auto e : out_edges(src)) {
    if (edges_[e].dst == dst) {
      return e;
    }
  }
  return std::nullopt;
}

ProbGraph ProbGraph::with_probs(std::vector<double> probs) const {
  return ProbGraph(node_count_, edges_, std::move(probs), labels_);
}

std::string ProbGraph::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t n = node_count_;
  h = fnv1a(h, &n, sizeof n);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    h = fnv1a(h, &edges_[i].src, sizeof(NodeId));
    h = fnv1a(h, &edges_[i].dst, sizeof(NodeId));
    h = fnv1a(h, &probs_[i], sizeof(double));
  }
  for (const auto& l : labels_) {
    h = fnv1a(h, l.data(), l.size() + 1);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SeedSet::SeedSet(std::vector<NodeId> members, std::size_t node_count) : members_(std::move(members)) {
  if (members_.empty()) {
    throw PreconditionError("seed set is empty");
  }
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw PreconditionError("seed set has duplicate members");
  }
  if (members_.back() >= node_count) {
    throw PreconditionError("seed " + std::to_string(members_.back()) + " is not a node of the graph");
  }
}

bool SeedSet::contains(NodeId v) const { return std::binary_search(members_.begin(), members_.end(), v); }

std::vector<std::uint8_t> SeedSet::indicator(std::size_t node_count) const {
  std::vector<std::uint8_t> x(node_count, 0);
  for (auto s : members_) {
    x[s] = 1;
  }
  return x;
}

ProblemInstance::ProblemInstance(const ProbGraph& graph, SeedSet seeds, std::size_t budget)
    : graph_(&graph), seeds_(std::move(seeds)), budget_(budget) {
  if (budget_ == 0) {
    throw PreconditionError("budget must be positive");
  }
  if (budget_ > graph.edge_count()) {
    throw PreconditionError("budget exceeds the edge count");
  }
  if (seeds_.size() == 0 || seeds_.members().back() >= graph.node_count()) {
    throw PreconditionError("seed set is not valid for the graph");
  }
}

EdgeMask alive_mask(const ProbGraph& graph, std::span<const EdgeId> removed) {
  EdgeMask mask(graph.edge_count(), 1);
  for (auto e : removed) {
    if (e >= graph.edge_count()) {
      throw PreconditionError("edge id " + std::to_string(e) + " out of range");
    }
    mask[e] = 0;
  }
  return mask;
}

}  // namespace imin
