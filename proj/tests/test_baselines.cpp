#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "imin/baselines.hpp"
#include "imin/errors.hpp"
#include "oracles/oracles.hpp"

using namespace imin;

namespace {

ProbGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

void check_distinct(const Selection& sel, const ProbGraph& g, std::size_t b) {
  REQUIRE(sel.removal.size() == b);
  std::set<EdgeId> distinct(sel.removal.edges.begin(), sel.removal.edges.end());
  CHECK(distinct.size() == b);
  for (auto e : sel.removal.edges) CHECK(e < g.edge_count());
}

// A random graph that is guaranteed to contain the cycle 0 -> 1 -> 2 -> 0.
ProbGraph cyclic_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
  std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 0}};
  std::set<std::pair<NodeId, NodeId>> seen{{0, 1}, {1, 2}, {2, 0}};
  auto rng = make_stream(seed, 0, 98);
  extra = std::min(extra, n * (n - 1) - 3);
  while (edges.size() < 3 + extra) {
    const auto u = static_cast<NodeId>(uniform_below(rng, n));
    const auto v = static_cast<NodeId>(uniform_below(rng, n));
    if (u == v || !seen.insert({u, v}).second) continue;
    edges.push_back({u, v});
  }
  return ProbGraph(n, edges, std::vector<double>(edges.size(), 0.5));
}

}  // namespace

TEST_CASE("random removal") {
  const auto g = oracle::random_graph(6, 10, 1);
  const ProblemInstance all(g, SeedSet({0}, 6), 10);
  const auto sel = select_random(all, 3);
  check_distinct(sel, g, 10);
  CHECK(select_random(all, 3).removal == sel.removal);

  const ProblemInstance one(g, SeedSet({0}, 6), 1);
  std::vector<int> counts(10, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) counts[select_random(one, static_cast<std::uint64_t>(i)).removal.edges[0]]++;
  const double mean = draws / 10.0;
  const double sd = std::sqrt(draws * 0.1 * 0.9);
  for (int c : counts) CHECK(std::fabs(c - mean) <= 4.0 * sd);
}

TEST_CASE("out-degree picks the hub edges first") {
  const auto g = parse("x y 0.5\nh a 0.5\nh b 0.5\nh c 0.5\nh d 0.5\nh e 0.5\n");
  const auto scores = outdegree_edge_scores(g);
  CHECK(scores[0] == 1.0);
  for (EdgeId e = 1; e < 6; ++e) CHECK(scores[e] == 5.0);
  const auto sel = select_score_topb(ProblemInstance(g, SeedSet({0}, g.node_count()), 5), EdgeScorer::OutDegree);
  CHECK(sel.removal.edges == std::vector<EdgeId>{1, 2, 3, 4, 5});
}

TEST_CASE("PageRank on a two-node cycle ties and picks the lowest id") {
  const auto g = parse("a b 0.5\nb a 0.5\n");
  const auto pr = pagerank(g);
  CHECK(pr[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(pr[1] == doctest::Approx(0.5).epsilon(1e-8));
  const auto scores = pagerank_edge_scores(g);
  CHECK(scores[0] == scores[1]);
  CHECK(select_score_topb(ProblemInstance(g, SeedSet({0}, 2), 1), EdgeScorer::PageRank).removal.edges ==
        std::vector<EdgeId>{0});
}

TEST_CASE("PageRank is a probability vector") {
  const auto g = gen_er_graph(40, 0.08, {0.1, 0.2}, 3);
  double total = 0.0;
  for (double x : pagerank(g)) {
    CHECK(x > 0.0);
    total += x;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("edge betweenness matches exhaustive path enumeration") {
  const auto path = parse("a b 0.5\nb c 0.5\n");
  const auto bc = edge_betweenness(path);
  CHECK(bc[0] == 2.0);
  CHECK(bc[1] == 2.0);
  for (std::uint64_t t = 0; t < 30; ++t) {
    const std::size_t n = 3 + t % 6;
    const auto g = oracle::random_graph(n, std::min<std::size_t>(n * (n - 1), 2 + t % 14), 200 + t);
    const auto got = edge_betweenness(g);
    const auto want = oracle::betweenness(g);
    for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(got[e] == doctest::Approx(want[e]).epsilon(1e-12));
  }
}

TEST_CASE("KED on a two-cycle") {
  const auto g = parse("a b 0.5\nb a 0.5\n");
  const auto pair = leading_eigenpair(g);
  CHECK(pair.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pair.left[0] == doctest::Approx(pair.left[1]).epsilon(1e-9));
  CHECK(pair.right[0] == doctest::Approx(pair.right[1]).epsilon(1e-9));
  CHECK(select_ked(ProblemInstance(g, SeedSet({0}, 2), 1)).removal.edges == std::vector<EdgeId>{0});
}

TEST_CASE("KED scores a pendant edge into a sink at zero") {
  const auto g = parse("d e 0.5\na b 0.5\nb c 0.5\nc a 0.5\nc d 0.5\n");
  const auto scores = eigen_drop_edge_scores(g);
  // d -> e ends at a sink and c -> d at a node whose right eigenvector entry is zero
  CHECK(scores[0] <= 1e-9);
  CHECK(scores[4] <= 1e-9);
  for (EdgeId e = 1; e <= 3; ++e) CHECK(scores[e] > 0.1);
  const auto sel = select_ked(ProblemInstance(g, SeedSet({0}, g.node_count()), 3));
  CHECK(sel.removal.edges == std::vector<EdgeId>{1, 2, 3});
}

TEST_CASE("KED eigenvalue matches a dense solve") {
  // a repeated dominant eigenvalue makes power iteration converge like 1/k,
  // which bounds the attainable accuracy
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto g = cyclic_graph(4 + t % 7, 3 + t % 9, 50 + t);
    CHECK(leading_eigenpair(g).value == doctest::Approx(oracle::leading_eigenvalue(g)).epsilon(1e-4));
  }
}

TEST_CASE("removing the top KED edge drops the eigenvalue at least as much as the bottom one") {
  for (std::uint64_t t = 0; t < 30; ++t) {
    const auto g = cyclic_graph(4 + t % 7, 3 + t % 9, 400 + t);
    const auto scores = eigen_drop_edge_scores(g);
    EdgeId top = 0, bottom = 0;
    for (EdgeId e = 1; e < g.edge_count(); ++e) {
      if (scores[e] > scores[top]) top = e;
      if (scores[e] < scores[bottom]) bottom = e;
    }
    const double full = oracle::leading_eigenvalue(g);
    EdgeMask without_top(g.edge_count(), 1), without_bottom(g.edge_count(), 1);
    without_top[top] = 0;
    without_bottom[bottom] = 0;
    CHECK(full - oracle::leading_eigenvalue(g, without_top) >=
          full - oracle::leading_eigenvalue(g, without_bottom) - 1e-9);
  }
}

TEST_CASE("KED reports non-convergence on an acyclic graph") {
  const auto g = parse("a b 0.5\nb c 0.5\n");
  CHECK_THROWS_AS(leading_eigenpair(g, 200), NotConverged);
}

TEST_CASE("spread ability counts hop-limited walks") {
  const auto g = parse("a b 0.5\nb c 0.5\na c 0.5\n");
  const EdgeMask alive(3, 1);
  for (double r : spread_ability(g, 0, alive)) CHECK(r == 1.0);
  const auto r2 = spread_ability(g, 2, alive);
  // a: itself, b, c, and a -> b -> c
  CHECK(r2[0] == 4.0);
  CHECK(r2[1] == 2.0);
  CHECK(r2[2] == 1.0);
}

TEST_CASE("MDS with zero hops scores 2(1 - prob(dst))") {
  const auto g = oracle::random_graph(6, 9, 17);
  std::vector<double> prob{1.0, 0.7, 0.2, 0.55, 0.9, 0.35};
  const auto sel = select_mds(ProblemInstance(g, SeedSet({0}, 6), 1), prob, 0);
  double best = -1.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) best = std::max(best, 2.0 * (1.0 - prob[g.dst(e)]));
  CHECK(sel.trace.scores[0] == doctest::Approx(best).epsilon(1e-14));
  CHECK(2.0 * (1.0 - prob[g.dst(sel.removal.edges[0])]) == best);
}

TEST_CASE("MDS probability update is exact on polytrees") {
  // two independent seeds merging at m, then a tail; every node has
  // independent parents so the incremental rule is exact
  const auto g = parse("s m 0.6\nt m 0.5\nm x 0.7\nx y 0.4\ns z 0.3\n");
  const SeedSet seeds({0, 2}, g.node_count());
  const auto before = oracle::ic(g, seeds);
  for (EdgeId cut : {0, 1, 2, 3}) {
    auto prob = before.per_node;
    EdgeMask alive(g.edge_count(), 1);
    mds_update_prob(g, cut, alive, prob);
    alive[cut] = 0;
    const auto after = oracle::ic(g, seeds, alive);
    for (NodeId v = 0; v < g.node_count(); ++v) CHECK(prob[v] == doctest::Approx(after.per_node[v]).epsilon(1e-12));
  }
}

TEST_CASE("MDS probability update agrees with fresh Monte-Carlo on a DAG") {
  const auto g = parse("a b 0.6\na c 0.5\nb d 0.7\nc e 0.4\nd f 0.5\ne g 0.8\n");
  const SeedSet seeds({0}, g.node_count());
  auto prob = oracle::ic(g, seeds).per_node;
  EdgeMask alive(g.edge_count(), 1);
  mds_update_prob(g, 0, alive, prob);
  alive[0] = 0;
  const auto fresh = estimate_influence_mc(g, DiffusionModel::ic(), seeds, 200000, 4, alive);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double p = fresh.per_node[v];
    const double se = std::sqrt(p * (1.0 - p) / 200000.0);
    CHECK(std::fabs(prob[v] - p) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("MDS returns distinct edges") {
  const auto g = gen_er_graph(40, 0.1, {0.1, 0.4}, 5);
  const ProblemInstance inst(g, SeedSet({0, 3}, 40), 8);
  MdsConfig c;
  c.mc_samples = 300;
  const auto sel = select_mds(inst, DiffusionModel::ic(), c);
  check_distinct(sel, g, 8);
  CHECK(select_mds(inst, DiffusionModel::ic(), c).removal == sel.removal);
}

TEST_CASE("MBPM with certain edges has no candidate") {
  const auto g = parse("a b 1\nb c 1\n");
  CHECK_THROWS_AS(select_mbpm(ProblemInstance(g, SeedSet({0}, 3), 1), DiffusionModel::ic()), NoCandidate);
}

TEST_CASE("MBPM on a half-probability path removes the first edge") {
  // E[reach | a->b absent] = 1, E[reach | b->c absent] = 1.5
  const auto g = parse("a b 0.5\nb c 0.5\n");
  BpmConfig c;
  c.samplings = 100000;
  const auto sel = select_mbpm(ProblemInstance(g, SeedSet({0}, 3), 1), DiffusionModel::ic(), c);
  CHECK(sel.removal.edges == std::vector<EdgeId>{0});
  CHECK(sel.trace.scores[0] == 1.0);
}

TEST_CASE("MBPM and BPM are deterministic and return distinct edges") {
  const auto g = gen_er_graph(40, 0.1, {0.1, 0.4}, 7);
  const ProblemInstance inst(g, SeedSet({1}, 40), 4);
  for (bool agnostic : {false, true}) {
    BpmConfig c;
    c.samplings = 30;
    c.seed_agnostic = agnostic;
    c.rng_seed = 9;
    const auto sel = select_mbpm(inst, DiffusionModel::ic(), c);
    check_distinct(sel, g, 4);
    CHECK(select_mbpm(inst, DiffusionModel::ic(), c).removal == sel.removal);
  }
  BpmConfig none;
  none.samplings = 0;
  CHECK_THROWS_AS(select_mbpm(inst, DiffusionModel::ic(), none), PreconditionError);
}

TEST_CASE("greedy baseline is the Monte-Carlo greedy selector") {
  const auto g = gen_er_graph(25, 0.12, {0.1, 0.4}, 2);
  const ProblemInstance inst(g, SeedSet({0}, 25), 3);
  SelectorConfig c;
  c.mc_samples = 10;
  c.rng_seed = 4;
  const auto sel = select_greedy_mc(inst, DiffusionModel::ic(), 10, 4);
  check_distinct(sel, g, 3);
  CHECK(sel.removal == naive_greedy_mc(inst, DiffusionModel::ic(), c).removal);
}

TEST_CASE("RIS round count") {
  CHECK(ris_rounds(100, 0.2) == 1152);
  CHECK_THROWS_AS(ris_rounds(100, 0.0), PreconditionError);
  CHECK_THROWS_AS(ris_rounds(100, 1.0), PreconditionError);
}

TEST_CASE("RIS removes a bridge first") {
  // every path from a to the rest crosses a -> b
  const auto g = parse("a b 1\nb c 0.5\nb d 0.5\nc d 0.5\nd c 0.5\n");
  const ProblemInstance inst(g, SeedSet({0}, g.node_count()), 1);
  const auto sel = select_ris(inst, DiffusionModel::ic(), 0.2, 3);
  CHECK(sel.removal.edges == std::vector<EdgeId>{0});
  CHECK(sel.trace.scores[0] == 0.0);
  CHECK(select_ris(inst, DiffusionModel::ic(), 0.2, 3).removal == sel.removal);
  check_distinct(select_ris(ProblemInstance(g, SeedSet({0}, 4), 5), DiffusionModel::ic(), 0.3, 1), g, 5);
}

TEST_CASE("seed-independent baselines ignore the seed set") {
  const auto g = gen_er_graph(30, 0.12, {0.1, 0.4}, 11);
  const ProblemInstance a(g, SeedSet({0}, 30), 4);
  const ProblemInstance b(g, SeedSet({5, 9}, 30), 4);
  CHECK(select_random(a, 2).removal == select_random(b, 2).removal);
  for (auto s : {EdgeScorer::OutDegree, EdgeScorer::PageRank, EdgeScorer::Betweenness}) {
    CHECK(select_score_topb(a, s).removal == select_score_topb(b, s).removal);
  }
  CHECK(select_ked(a).removal == select_ked(b).removal);
  BpmConfig c;
  c.samplings = 20;
  c.seed_agnostic = true;
  CHECK(select_mbpm(a, DiffusionModel::ic(), c).removal == select_mbpm(b, DiffusionModel::ic(), c).removal);
}
