#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "imin/errors.hpp"
#include "imin/graph.hpp"

namespace imin {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open '" + path + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  return out;
}

}  // namespace

ProbGraph parse_edge_list(std::istream& in, const LoadOptions& options) {
  const bool filtering = options.timestamp_before.has_value() || options.timestamp_from.has_value();
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
  std::vector<Edge> edges;
  std::vector<double> probs;
  std::set<std::pair<NodeId, NodeId>> seen;

  auto node_of = [&](std::string_view label) {
    auto [it, inserted] = index.emplace(std::string(label), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 4) {
      throw ParseError("malformed line", line_no);
    }
    double p = 0;
    if (tokens.size() >= 3) {
      auto parsed = parse_double(tokens[2]);
      if (!parsed) throw ParseError("malformed probability", line_no);
      p = *parsed;
    } else if (options.default_prob) {
      p = *options.default_prob;
    } else {
      throw ParseError("missing probability", line_no);
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ParseError("probability out of range", line_no);
    }
    if (filtering) {
      if (tokens.size() < 4) throw ParseError("missing timestamp", line_no);
      auto ts = parse_double(tokens[3]);
      if (!ts) throw ParseError("malformed timestamp", line_no);
      if (options.timestamp_before && !(*ts < *options.timestamp_before)) continue;
      if (options.timestamp_from && !(*ts >= *options.timestamp_from)) continue;
    } else if (tokens.size() == 4 && !parse_double(tokens[3])) {
      throw ParseError("malformed timestamp", line_no);
    }
    const NodeId u = node_of(tokens[0]);
    const NodeId v = node_of(tokens[1]);
    if (!seen.emplace(u, v).second) {
      throw ParseError("duplicate edge", line_no);
    }
    edges.push_back({u, v});
    probs.push_back(p);
  }
  const std::size_t n = labels.size();
  return ProbGraph(n, std::move(edges), std::move(probs), std::move(labels));
}

ProbGraph load_edge_list(const std::string& path, const LoadOptions& options) {
  auto in = open_input(path);
  return parse_edge_list(in, options);
}

void write_edge_list(const ProbGraph& graph, std::ostream& out) {
  char buf[64];
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", graph.prob(e));
    out << graph.label(graph.src(e)) << ' ' << graph.label(graph.dst(e)) << ' ' << buf << '\n';
  }
}

void write_edge_list(const ProbGraph& graph, const std::string& path) {
  auto out = open_output(path);
  write_edge_list(graph, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<SeedSet> parse_seed_sets(std::istream& in, const ProbGraph& graph) {
  std::vector<SeedSet> sets;
  std::vector<NodeId> current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (current.empty()) return;
    try {
      sets.emplace_back(std::move(current), graph.node_count());
    } catch (const PreconditionError& e) {
      throw ParseError(e.what(), line_no);
    }
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool comment_only = line.find_first_not_of(" \t") != std::string::npos &&
                              line[line.find_first_not_of(" \t")] == '#';
    if (comment_only) continue;
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      flush();
      continue;
    }
    if (tokens.size() != 1) throw ParseError("expected one node label per line", line_no);
    auto v = graph.find_node(std::string(tokens[0]));
    if (!v) throw ParseError("unknown node label '" + std::string(tokens[0]) + "'", line_no);
    current.push_back(*v);
  }
  flush();
  return sets;
}

std::vector<SeedSet> load_seed_sets(const std::string& path, const ProbGraph& graph) {
  auto in = open_input(path);
  return parse_seed_sets(in, graph);
}

void write_seed_sets(std::span<const SeedSet> sets, const ProbGraph& graph, std::ostream& out) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i > 0) out << '\n';
    for (auto v : sets[i].members()) {
      out << graph.label(v) << '\n';
    }
  }
}

void write_seed_sets(std::span<const SeedSet> sets, const ProbGraph& graph, const std::string& path) {
  auto out = open_output(path);
  write_seed_sets(sets, graph, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace imin
