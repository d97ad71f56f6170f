#include "imin/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imin/baselines.hpp"
#include "imin/bench.hpp"
#include "imin/errors.hpp"
#include "imin/graph.hpp"
#include "imin/selectors.hpp"
#include "imin/surrogate.hpp"

namespace imin {

namespace {

/// Bad argument values that CLI11 cannot see; reported like parse errors.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct GraphArgs {
  std::string path;
  std::optional<double> default_prob;
  bool weighted_cascade = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--graph", path, "Edge list: src dst [prob [timestamp]]")->required();
    cmd->add_option("--default-prob", default_prob, "Probability for lines without one");
    cmd->add_flag("--weighted-cascade", weighted_cascade, "Replace probabilities with 1/in-degree");
  }
  ProbGraph load() const {
    LoadOptions options;
    options.default_prob = default_prob;
    auto g = load_edge_list(path, options);
    return weighted_cascade ? weighted_cascade_probs(g) : g;
  }
};

struct DiffusionArgs {
  std::string kind = "ic";
  double recovery = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--diffusion", kind, "ic, lt or gsir")->capture_default_str();
    cmd->add_option("--recovery", recovery, "G-SIR recovery probability")->capture_default_str();
  }
  DiffusionModel model() const {
    DiffusionKind k;
    try {
      k = parse_diffusion_kind(kind);
    } catch (const PreconditionError& e) {
      throw UsageError(e.what());
    }
    return k == DiffusionKind::GSIR ? DiffusionModel::gsir(recovery) : DiffusionModel{k, 0.0};
  }
};

template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

EdgeRemovalSet load_removal(const std::string& path, const ProbGraph& graph) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  EdgeRemovalSet removal;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string src, dst;
    if (!(ss >> src)) continue;
    if (!(ss >> dst)) throw ParseError("removal line needs src and dst", lineno);
    const auto u = graph.find_node(src);
    const auto v = graph.find_node(dst);
    const auto e = (u && v) ? graph.find_edge(*u, *v) : std::nullopt;
    if (!e) throw ParseError("edge " + src + " -> " + dst + " is not in the graph", lineno);
    removal.edges.push_back(*e);
  }
  return removal;
}

const SeedSet& pick_seed_set(const std::vector<SeedSet>& sets, std::size_t index) {
  if (index >= sets.size()) {
    throw UsageError("--seed-set " + std::to_string(index) + " but the file holds " + std::to_string(sets.size()) +
                     " sets");
  }
  return sets[index];
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Edge-removal influence minimisation toolkit"};
  app.require_subcommand(1);
  std::uint64_t rng_seed = 0;
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--rng-seed", rng_seed, "Random seed")->capture_default_str(); };

  // gen-graph
  auto* gen_graph = app.add_subcommand("gen-graph", "Generate a directed Erdos-Renyi graph");
  std::size_t gg_nodes = 0;
  double gg_p = 0.0;
  std::vector<double> gg_range{0.05, 0.2};
  std::string gg_out;
  gen_graph->add_option("--nodes", gg_nodes, "Node count")->required();
  gen_graph->add_option("--p-edge", gg_p, "Probability of each ordered pair")->required();
  gen_graph->add_option("--prob-range", gg_range, "Activation probability range lo hi")->expected(2);
  gen_graph->add_option("--out", gg_out, "Output edge list (default stdout)");
  add_seed(gen_graph);

  // gen-seeds
  auto* gen_seeds = app.add_subcommand("gen-seeds", "Draw random seed sets");
  GraphArgs gs_graph;
  gs_graph.attach(gen_seeds);
  std::size_t gs_count = 1;
  std::vector<std::size_t> gs_size;
  std::string gs_out;
  gen_seeds->add_option("--count", gs_count, "Number of seed sets")->capture_default_str();
  gen_seeds->add_option("--size", gs_size, "Seed-set size range min max")->expected(2);
  gen_seeds->add_option("--out", gs_out, "Output file (default stdout)");
  add_seed(gen_seeds);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Estimate the influence of seed sets");
  GraphArgs sim_graph;
  sim_graph.attach(simulate);
  DiffusionArgs sim_diff;
  sim_diff.attach(simulate);
  std::string sim_seeds, sim_removal, sim_out;
  std::uint64_t sim_samples = 10000;
  bool sim_exact = false;
  simulate->add_option("--seeds", sim_seeds, "Seed-set file")->required();
  simulate->add_option("--removal", sim_removal, "Edges to delete before simulating");
  simulate->add_option("--samples", sim_samples, "Monte-Carlo samples")->capture_default_str();
  simulate->add_flag("--exact", sim_exact, "Enumerate every realisation (tiny graphs)");
  simulate->add_option("--out", sim_out, "Output CSV (default stdout)");
  add_seed(simulate);

  // train
  auto* train = app.add_subcommand("train", "Train a surrogate on Monte-Carlo targets");
  GraphArgs tr_graph;
  tr_graph.attach(train);
  DiffusionArgs tr_diff;
  tr_diff.attach(train);
  std::string tr_seeds, tr_out, tr_cache, tr_report;
  std::uint64_t tr_samples = 1000;
  TrainConfig tr_config;
  train->add_option("--seeds", tr_seeds, "Training seed-set file")->required();
  train->add_option("--out", tr_out, "Checkpoint path")->required();
  train->add_option("--samples", tr_samples, "Monte-Carlo samples per target")->capture_default_str();
  train->add_option("--targets-cache", tr_cache, "Reuse or store the simulated targets here");
  train->add_option("--report", tr_report, "Write the loss curves as JSON");
  train->add_option("--epochs", tr_config.epochs)->capture_default_str();
  train->add_option("--lr", tr_config.learning_rate)->capture_default_str();
  train->add_option("--lr-decay", tr_config.lr_decay)->capture_default_str();
  train->add_option("--val-fraction", tr_config.validation_fraction)->capture_default_str();
  train->add_option("--layers", tr_config.layer_count)->capture_default_str();
  train->add_option("--hidden", tr_config.hidden_dim)->capture_default_str();
  train->add_option("--batch", tr_config.batch_size)->capture_default_str();
  add_seed(train);

  // select
  auto* select = app.add_subcommand("select", "Choose edges to remove");
  GraphArgs sel_graph;
  sel_graph.attach(select);
  DiffusionArgs sel_diff;
  sel_diff.attach(select);
  std::string sel_method, sel_seeds, sel_model, sel_out, sel_trace;
  std::size_t sel_budget = 0, sel_index = 0;
  std::optional<double> sel_time_limit;
  std::optional<std::uint64_t> sel_samples;
  std::optional<double> sel_epsilon;
  SelectorConfig sel_config;
  select->add_option("--method", sel_method, "random, odc, pr, bc, ked, mds, bpm-N, mbpm-N, greedy-N, ris-EPS, "
                                             "diffim, diffim+, diffim++ (append -all for all-at-once)")
      ->required();
  select->add_option("--budget", sel_budget, "Number of edges to remove")->required();
  select->add_option("--seeds", sel_seeds, "Seed-set file")->required();
  select->add_option("--seed-set", sel_index, "Which set of the file to use")->capture_default_str();
  select->add_option("--model", sel_model, "Surrogate checkpoint (DiffIM methods)");
  select->add_option("--out", sel_out, "Removal file (default stdout)");
  select->add_option("--trace", sel_trace, "Per-round trace CSV");
  select->add_option("--samples", sel_samples, "Override the sample count of greedy/bpm/mbpm");
  select->add_option("--epsilon", sel_epsilon, "Override RIS epsilon");
  select->add_option("--n-ep", sel_config.n_ep)->capture_default_str();
  select->add_option("--alpha", sel_config.alpha)->capture_default_str();
  select->add_option("--beta", sel_config.beta)->capture_default_str();
  select->add_option("--step-size", sel_config.step_size)->capture_default_str();
  select->add_option("--time-limit", sel_time_limit, "Seconds before giving up");
  add_seed(select);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Reduced ratio of a removal set");
  GraphArgs ev_graph;
  ev_graph.attach(evaluate);
  DiffusionArgs ev_diff;
  ev_diff.attach(evaluate);
  std::string ev_seeds, ev_removal, ev_out;
  std::uint64_t ev_samples = 10000;
  bool ev_exact = false;
  evaluate->add_option("--seeds", ev_seeds, "Seed-set file")->required();
  evaluate->add_option("--removal", ev_removal, "Removal file")->required();
  evaluate->add_option("--samples", ev_samples, "Monte-Carlo samples")->capture_default_str();
  evaluate->add_flag("--exact", ev_exact, "Enumerate every realisation (tiny graphs)");
  evaluate->add_option("--out", ev_out, "Output CSV (default stdout)");
  add_seed(evaluate);

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark described by a JSON config");
  std::string bench_config, bench_output;
  std::optional<std::uint64_t> bench_seed;
  bool bench_no_timing = false;
  bench->add_option("--config", bench_config, "JSON config")->required();
  bench->add_option("--output", bench_output, "Override the results path");
  bench->add_option("--rng-seed", bench_seed, "Override the config's rng_seed");
  bench->add_flag("--no-timing", bench_no_timing, "Leave time columns empty");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? 0 : (code == 0 ? 0 : 2);
  }

  try {
    if (*gen_graph) {
      if (gg_range.size() != 2) throw UsageError("--prob-range takes two values");
      const auto g = gen_er_graph(gg_nodes, gg_p, {gg_range[0], gg_range[1]}, rng_seed);
      with_output(gg_out, [&](std::ostream& out) { write_edge_list(g, out); });
    } else if (*gen_seeds) {
      const auto g = gs_graph.load();
      std::optional<std::pair<std::size_t, std::size_t>> range;
      if (!gs_size.empty()) range = std::make_pair(gs_size[0], gs_size[1]);
      const auto sets = gen_seed_sets(g, gs_count, range, rng_seed);
      with_output(gs_out, [&](std::ostream& out) { write_seed_sets(sets, g, out); });
    } else if (*simulate) {
      const auto g = sim_graph.load();
      const auto model = sim_diff.model();
      const auto sets = load_seed_sets(sim_seeds, g);
      EdgeMask mask;
      if (!sim_removal.empty()) mask = alive_mask(g, load_removal(sim_removal, g).edges);
      with_output(sim_out, [&](std::ostream& out) {
        out << "seed_set,sigma,std_err,samples\n";
        for (std::size_t i = 0; i < sets.size(); ++i) {
          const auto est = sim_exact ? exact_influence(g, model, sets[i], mask)
                                     : estimate_influence_mc(g, model, sets[i], sim_samples, rng_seed, mask);
          out << i << ',' << fmt("%.6g", est.sigma) << ',' << fmt("%.6g", est.std_err) << ',' << est.samples
              << '\n';
        }
      });
    } else if (*train) {
      const auto g = tr_graph.load();
      const auto model = tr_diff.model();
      auto sets = load_seed_sets(tr_seeds, g);
      std::vector<std::vector<double>> targets;
      bool cached = false;
      if (!tr_cache.empty() && std::ifstream(tr_cache).good()) {
        targets = load_targets(tr_cache, g.content_hash());
        if (targets.size() != sets.size()) throw CorruptFile("target cache does not match the seed file");
        cached = true;
      } else {
        for (std::size_t i = 0; i < sets.size(); ++i) {
          targets.push_back(
              estimate_influence_mc(g, model, sets[i], tr_samples, make_stream(rng_seed, i, 40)()).per_node);
        }
      }
      if (!tr_cache.empty() && !cached) save_targets(targets, g.content_hash(), tr_cache);
      tr_config.rng_seed = rng_seed;
      auto [surrogate, report] =
          train_surrogate(g, TrainingData::from_graph(g, std::move(sets), std::move(targets)), tr_config);
      surrogate.diffusion = to_string(model.kind);
      save_model(surrogate, tr_out);
      std::cerr << "best epoch " << report.best_epoch << ", validation loss " << report.best_val_loss
                << ", validation pearson " << report.val_pearson << ", " << report.seconds << " s\n";
      if (!tr_report.empty()) {
        nlohmann::json j{{"initial_val_loss", report.initial_val_loss}, {"train_loss", report.train_loss},
                         {"val_loss", report.val_loss},                 {"best_epoch", report.best_epoch},
                         {"best_val_loss", report.best_val_loss},       {"val_pearson", report.val_pearson}};
        with_output(tr_report, [&](std::ostream& out) { out << j.dump(1) << '\n'; });
      }
    } else if (*select) {
      const auto g = sel_graph.load();
      const auto model = sel_diff.model();
      const auto sets = load_seed_sets(sel_seeds, g);
      MethodSpec spec;
      try {
        spec = parse_method(sel_method);
      } catch (const PreconditionError& e) {
        throw UsageError(e.what());
      }
      if (sel_samples) spec.samples = *sel_samples;
      if (sel_epsilon) spec.epsilon = *sel_epsilon;
      const auto mode = spec.selector.batch_mode;
      spec.selector = sel_config;
      spec.selector.batch_mode = mode;
      std::optional<SurrogateModel> surrogate;
      if (spec.needs_surrogate()) {
        if (sel_model.empty()) throw UsageError("--model is required for " + spec.label);
        surrogate = load_model(sel_model);
      }
      const ProblemInstance inst(g, pick_seed_set(sets, sel_index), sel_budget);
      std::optional<Clock::time_point> deadline;
      const auto t0 = Clock::now();
      if (sel_time_limit) {
        deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*sel_time_limit));
      }
      const auto sel = run_method(spec, inst, model, surrogate ? &*surrogate : nullptr, rng_seed, deadline);
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      with_output(sel_out, [&](std::ostream& out) {
        out << "# src dst round score\n";
        for (std::size_t r = 0; r < sel.removal.edges.size(); ++r) {
          const auto e = sel.removal.edges[r];
          const double score = r < sel.trace.scores.size() ? sel.trace.scores[r] : 0.0;
          out << g.label(g.src(e)) << ' ' << g.label(g.dst(e)) << ' ' << r << ' ' << fmt("%.10g", score) << '\n';
        }
      });
      if (!sel_trace.empty()) {
        with_output(sel_trace, [&](std::ostream& out) {
          out << "round,src,dst,score,forward_passes,backward_passes\n";
          for (std::size_t r = 0; r < sel.trace.edges.size(); ++r) {
            const auto e = sel.trace.edges[r];
            out << r << ',' << g.label(g.src(e)) << ',' << g.label(g.dst(e)) << ','
                << fmt("%.10g", sel.trace.scores[r]) << ',' << sel.trace.forward_passes << ','
                << sel.trace.backward_passes << '\n';
          }
        });
      }
      std::cerr << spec.label << ": " << sel.removal.size() << " edges in " << secs << " s\n";
    } else if (*evaluate) {
      const auto g = ev_graph.load();
      const auto model = ev_diff.model();
      const auto sets = load_seed_sets(ev_seeds, g);
      const auto removal = load_removal(ev_removal, g);
      const auto mask = alive_mask(g, removal.edges);
      with_output(ev_out, [&](std::ostream& out) {
        out << "seed_set,sigma_before,sigma_after,reduced_ratio\n";
        for (std::size_t i = 0; i < sets.size(); ++i) {
          const auto before = ev_exact ? exact_influence(g, model, sets[i])
                                       : estimate_influence_mc(g, model, sets[i], ev_samples, rng_seed);
          const auto after = ev_exact ? exact_influence(g, model, sets[i], mask)
                                      : estimate_influence_mc(g, model, sets[i], ev_samples, rng_seed, mask);
          out << i << ',' << fmt("%.6g", before.sigma) << ',' << fmt("%.6g", after.sigma) << ',';
          if (before.sigma - static_cast<double>(sets[i].size()) > 1e-9) {
            out << fmt("%.6g", reduction_ratio(before.sigma, after.sigma, sets[i].size()));
          }
          out << '\n';
        }
      });
    } else if (*bench) {
      auto config = load_bench_config(bench_config);
      if (!bench_output.empty()) config.output = bench_output;
      if (bench_seed) config.rng_seed = *bench_seed;
      if (bench_no_timing) config.record_timing = false;
      const auto report = run_benchmark(config);
      emit_results(report, config.output);
      std::cerr << "wrote " << config.output << ", " << summary_path(config.output) << " and "
                << meta_path(config.output) << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace imin
