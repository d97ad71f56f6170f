#include "imin/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "imin/baselines.hpp"
#include "imin/errors.hpp"
#include "imin/stats.hpp"

namespace imin {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return make_stream(seed, tag, 50)(); }

const std::set<std::string> kKinds = {"random", "odc",   "pr",  "bc",     "ked",     "mds",     "bpm",
                                      "mbpm",   "greedy", "ris", "diffim", "diffim+", "diffim++"};

void check_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) throw PreconditionError("bench config: unknown key '" + where + it.key() + "'");
  }
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

bool MethodSpec::needs_surrogate() const { return kind.rfind("diffim", 0) == 0; }

bool MethodSpec::seed_independent() const {
  return kind == "random" || kind == "odc" || kind == "pr" || kind == "bc" || kind == "ked" || kind == "bpm";
}

MethodSpec parse_method(const std::string& text) {
  MethodSpec spec;
  spec.label = lower(text);
  std::string name = spec.label;
  if (name.size() > 4 && name.ends_with("-all") && name.rfind("diffim", 0) == 0) {
    spec.selector.batch_mode = BatchMode::AllAtOnce;
    name = name.substr(0, name.size() - 4);
  }
  if (kKinds.count(name)) {
    spec.kind = name;
  } else {
    const auto dash = name.rfind('-');
    if (dash == std::string::npos) throw PreconditionError("unknown method '" + text + "'");
    const std::string base = name.substr(0, dash);
    const std::string arg = name.substr(dash + 1);
    if (base != "greedy" && base != "mbpm" && base != "bpm" && base != "ris") {
      throw PreconditionError("unknown method '" + text + "'");
    }
    spec.kind = base;
    try {
      std::size_t used = 0;
      if (base == "ris") {
        spec.epsilon = std::stod(arg, &used);
      } else {
        spec.samples = std::stoull(arg, &used);
      }
      if (used != arg.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw PreconditionError("bad parameter in method '" + text + "'");
    }
  }
  if (spec.kind == "greedy" && spec.label == "greedy") spec.label = "greedy-" + std::to_string(spec.samples);
  if (spec.kind == "mbpm" && spec.label == "mbpm") spec.label = "mbpm-" + std::to_string(spec.samples);
  if (spec.kind == "bpm" && spec.label == "bpm") spec.label = "bpm-" + std::to_string(spec.samples);
  if (spec.samples == 0) throw PreconditionError("method '" + text + "' needs a positive sample count");
  return spec;
}

Selection run_method(const MethodSpec& spec, const ProblemInstance& instance, const DiffusionModel& model,
                     const SurrogateModel* surrogate, std::uint64_t rng_seed,
                     std::optional<Clock::time_point> deadline) {
  const auto& k = spec.kind;
  if (k == "random") return select_random(instance, rng_seed);
  if (k == "odc") return select_score_topb(instance, EdgeScorer::OutDegree);
  if (k == "pr") return select_score_topb(instance, EdgeScorer::PageRank);
  if (k == "bc") return select_score_topb(instance, EdgeScorer::Betweenness);
  if (k == "ked") return select_ked(instance);
  if (k == "mds") return select_mds(instance, model, MdsConfig{spec.hops, spec.mds_samples, rng_seed});
  if (k == "bpm" || k == "mbpm") {
    return select_mbpm(instance, model, BpmConfig{spec.samples, k == "bpm", rng_seed, deadline});
  }
  if (k == "greedy") return select_greedy_mc(instance, model, spec.samples, rng_seed, deadline);
  if (k == "ris") return select_ris(instance, model, spec.epsilon, rng_seed, deadline);
  if (spec.needs_surrogate()) {
    if (!surrogate) throw PreconditionError("method '" + spec.label + "' needs a surrogate checkpoint");
    auto cfg = spec.selector;
    cfg.rng_seed = rng_seed;
    cfg.deadline = deadline;
    if (k == "diffim") return diffim_select(instance, *surrogate, cfg);
    if (k == "diffim+") return diffim_plus_select(instance, *surrogate, cfg);
    return diffim_plus_plus_select(instance, *surrogate, cfg);
  }
  throw PreconditionError("unknown method kind '" + k + "'");
}

// ---- config ---------------------------------------------------------------

void BenchConfig::validate() const {
  if (train_graph.empty()) throw PreconditionError("bench config: a graph path is required");
  if (budgets.empty()) throw PreconditionError("bench config: budgets must be non-empty");
  if (std::find(budgets.begin(), budgets.end(), std::size_t{0}) != budgets.end()) {
    throw PreconditionError("bench config: budgets must be positive");
  }
  if (methods.empty()) throw PreconditionError("bench config: methods must be non-empty");
  if (mc_samples < 1 || train_mc_samples < 1) throw PreconditionError("bench config: mc_samples must be >= 1");
  if (test_seed_sets < 1) throw PreconditionError("bench config: test_seed_sets must be >= 1");
  if (!(time_limit > 0.0)) throw PreconditionError("bench config: time_limit must be positive");
  const bool surrogate = std::any_of(methods.begin(), methods.end(), [](auto& m) { return m.needs_surrogate(); });
  if (surrogate && !checkpoint && train_seed_sets + val_seed_sets < 2) {
    throw PreconditionError("bench config: DiffIM methods need a checkpoint or at least two training seed sets");
  }
}

BenchConfig parse_bench_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("bench config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw PreconditionError("bench config must be a JSON object");
  static const std::set<std::string> known = {
      "graph",          "train_graph",      "test_graph",     "default_prob",    "weighted_cascade",
      "diffusion",      "recovery_prob",    "budgets",        "methods",         "train_seed_sets",
      "val_seed_sets",  "test_seed_sets",   "seed_size",      "mc_samples",      "train_mc_samples",
      "time_limit",     "rng_seed",         "output",         "checkpoint",      "save_checkpoint",
      "train",          "selector",         "record_timing"};
  check_keys(doc, known, "");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? p : (std::filesystem::path(base_dir) / path).lexically_normal().string();
  };
  BenchConfig c;
  try {
    if (doc.contains("graph")) c.train_graph = resolve(doc["graph"].get<std::string>());
    if (doc.contains("train_graph")) c.train_graph = resolve(doc["train_graph"].get<std::string>());
    c.test_graph = doc.contains("test_graph") ? resolve(doc["test_graph"].get<std::string>()) : c.train_graph;
    if (doc.contains("default_prob")) c.default_prob = doc["default_prob"].get<double>();
    c.weighted_cascade = doc.value("weighted_cascade", false);
    const auto kind = parse_diffusion_kind(doc.value("diffusion", std::string("ic")));
    if (kind == DiffusionKind::GSIR) {
      c.diffusion = DiffusionModel::gsir(doc.value("recovery_prob", 0.5));
    } else {
      c.diffusion = {kind, 0.0};
    }
    c.budgets = doc.at("budgets").get<std::vector<std::size_t>>();
    SelectorConfig selector;
    if (doc.contains("selector")) {
      const auto& s = doc["selector"];
      check_keys(s, {"n_ep", "alpha", "beta", "step_size", "batch_mode"}, "selector.");
      selector.n_ep = s.value("n_ep", selector.n_ep);
      selector.alpha = s.value("alpha", selector.alpha);
      selector.beta = s.value("beta", selector.beta);
      selector.step_size = s.value("step_size", selector.step_size);
      if (s.value("batch_mode", std::string("one_by_one")) == "all_at_once") {
        selector.batch_mode = BatchMode::AllAtOnce;
      }
    }
    for (const auto& m : doc.at("methods")) {
      MethodSpec spec;
      if (m.is_string()) {
        spec = parse_method(m.get<std::string>());
        const auto mode = spec.selector.batch_mode;
        spec.selector = selector;
        if (mode == BatchMode::AllAtOnce) spec.selector.batch_mode = mode;
      } else {
        check_keys(m,
                   {"name", "samples", "samplings", "epsilon", "hops", "mds_samples", "n_ep", "alpha", "beta",
                    "step_size", "batch_mode", "label"},
                   "methods[].");
        spec = parse_method(m.at("name").get<std::string>());
        const auto mode = spec.selector.batch_mode;
        spec.selector = selector;
        if (mode == BatchMode::AllAtOnce) spec.selector.batch_mode = mode;
        if (m.contains("samples")) spec.samples = m["samples"].get<std::uint64_t>();
        if (m.contains("samplings")) spec.samples = m["samplings"].get<std::uint64_t>();
        spec.epsilon = m.value("epsilon", spec.epsilon);
        spec.hops = m.value("hops", spec.hops);
        spec.mds_samples = m.value("mds_samples", spec.mds_samples);
        spec.selector.n_ep = m.value("n_ep", spec.selector.n_ep);
        spec.selector.alpha = m.value("alpha", spec.selector.alpha);
        spec.selector.beta = m.value("beta", spec.selector.beta);
        spec.selector.step_size = m.value("step_size", spec.selector.step_size);
        if (m.contains("batch_mode")) {
          spec.selector.batch_mode =
              m["batch_mode"].get<std::string>() == "all_at_once" ? BatchMode::AllAtOnce : BatchMode::OneByOne;
        }
        if (m.contains("label")) spec.label = m["label"].get<std::string>();
      }
      c.methods.push_back(std::move(spec));
    }
    c.train_seed_sets = doc.value("train_seed_sets", c.train_seed_sets);
    c.val_seed_sets = doc.value("val_seed_sets", c.val_seed_sets);
    c.test_seed_sets = doc.value("test_seed_sets", c.test_seed_sets);
    if (doc.contains("seed_size")) {
      const auto range = doc["seed_size"].get<std::vector<std::size_t>>();
      if (range.size() != 2) throw PreconditionError("bench config: seed_size must be [min, max]");
      c.seed_size = std::make_pair(range[0], range[1]);
    }
    c.mc_samples = doc.value("mc_samples", c.mc_samples);
    c.train_mc_samples = doc.value("train_mc_samples", c.train_mc_samples);
    c.time_limit = doc.value("time_limit", c.time_limit);
    c.rng_seed = doc.value("rng_seed", c.rng_seed);
    c.output = resolve(doc.value("output", c.output));
    if (doc.contains("checkpoint")) c.checkpoint = resolve(doc["checkpoint"].get<std::string>());
    if (doc.contains("save_checkpoint")) c.save_checkpoint = resolve(doc["save_checkpoint"].get<std::string>());
    if (doc.contains("train")) {
      const auto& t = doc["train"];
      check_keys(t, {"epochs", "learning_rate", "lr_decay", "layer_count", "hidden_dim", "batch_size"}, "train.");
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.lr_decay = t.value("lr_decay", c.train.lr_decay);
      c.train.layer_count = t.value("layer_count", c.train.layer_count);
      c.train.hidden_dim = t.value("hidden_dim", c.train.hidden_dim);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
    }
    c.record_timing = doc.value("record_timing", true);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("bench config: ") + e.what());
  }
  c.validate();
  return c;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_bench_config(ss.str(), dir.empty() ? "." : dir);
}

// ---- run ------------------------------------------------------------------

namespace {

ProbGraph load_bench_graph(const std::string& path, const BenchConfig& c) {
  LoadOptions options;
  options.default_prob = c.default_prob;
  auto g = load_edge_list(path, options);
  return c.weighted_cascade ? weighted_cascade_probs(g) : g;
}

SurrogateModel prepare_surrogate(const BenchConfig& c) {
  if (c.checkpoint) {
    if (!std::filesystem::exists(*c.checkpoint)) throw Error("checkpoint '" + *c.checkpoint + "' does not exist");
    return load_model(*c.checkpoint);
  }
  const auto graph = load_bench_graph(c.train_graph, c);
  const std::size_t total = c.train_seed_sets + c.val_seed_sets;
  auto seeds = gen_seed_sets(graph, total, c.seed_size, derive(c.rng_seed, 1));
  std::vector<std::vector<double>> targets;
  targets.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    targets.push_back(
        estimate_influence_mc(graph, c.diffusion, seeds[i], c.train_mc_samples, derive(c.rng_seed, 1000 + i))
            .per_node);
  }
  auto train = c.train;
  train.validation_fraction = static_cast<double>(c.val_seed_sets) / static_cast<double>(total);
  train.rng_seed = derive(c.rng_seed, 3);
  auto [model, report] =
      train_surrogate(graph, TrainingData::from_graph(graph, std::move(seeds), std::move(targets)), train);
  model.diffusion = to_string(c.diffusion.kind);
  if (c.save_checkpoint) save_model(model, *c.save_checkpoint);
  return model;
}

}  // namespace

EvalReport run_benchmark(const BenchConfig& config) {
  config.validate();
  const auto graph = load_bench_graph(config.test_graph, config);
  const auto& model = config.diffusion;
  for (auto b : config.budgets) {
    if (b > graph.edge_count()) {
      throw PreconditionError("budget " + std::to_string(b) + " exceeds the test graph's edge count");
    }
  }
  EvalReport report;
  report.record_timing = config.record_timing;
  report.test_graph_hash = graph.content_hash();

  std::optional<SurrogateModel> surrogate;
  if (std::any_of(config.methods.begin(), config.methods.end(), [](auto& m) { return m.needs_surrogate(); })) {
    surrogate = prepare_surrogate(config);
    report.checkpoint_graph_hash = surrogate->train_graph_hash;
  }

  // test seed sets, oversampled so that degenerate ones can be skipped
  const std::size_t want = config.test_seed_sets;
  const std::size_t pool = 4 * want + 16;
  const auto candidates = gen_seed_sets(graph, pool, config.seed_size, derive(config.rng_seed, 2));
  std::vector<SeedSet> tests;
  std::vector<double> sigma_before;
  std::vector<std::uint64_t> eval_seed;
  for (std::size_t i = 0; i < pool && tests.size() < want; ++i) {
    const auto seed = derive(config.rng_seed, 100000 + i);
    const auto est = estimate_influence_mc(graph, model, candidates[i], config.mc_samples, seed);
    if (!(est.sigma - static_cast<double>(candidates[i].size()) > 1e-9)) continue;
    tests.push_back(candidates[i]);
    sigma_before.push_back(est.sigma);
    eval_seed.push_back(seed);
  }
  if (tests.size() < want) {
    throw DegenerateDenominator("only " + std::to_string(tests.size()) + " of " + std::to_string(pool) +
                                " candidate seed sets spread beyond their seeds");
  }

  if (surrogate && tests.size() >= 2) {
    GnnWorkspace ws(*surrogate, graph);
    std::vector<double> predicted;
    for (const auto& s : tests) {
      const SeedSet* one[] = {&s};
      ws.forward(graph.probs(), one);
      predicted.push_back(ws.sigma_hat(0));
    }
    try {
      report.surrogate_pearson = pearson_r(predicted, sigma_before);
    } catch (const PreconditionError&) {
    }
  }

  auto evaluate = [&](std::size_t i, const EdgeRemovalSet& removal) {
    const auto mask = alive_mask(graph, removal.edges);
    const auto after = estimate_influence_mc(graph, model, tests[i], config.mc_samples, eval_seed[i], mask);
    return reduction_ratio(sigma_before[i], after.sigma, tests[i].size());
  };
  const auto limit = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.time_limit));
  const SurrogateModel* sp = surrogate ? &*surrogate : nullptr;

  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    const auto& spec = config.methods[mi];
    for (auto b : config.budgets) {
      const auto method_seed = derive(config.rng_seed, 200000 + mi);
      if (spec.seed_independent()) {
        const ProblemInstance inst(graph, tests[0], b);
        const auto t0 = Clock::now();
        std::optional<Selection> sel;
        try {
          sel = run_method(spec, inst, model, sp, method_seed, t0 + limit);
        } catch (const TimeLimitExceeded&) {
        }
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        if (!sel || ms > config.time_limit * 1000.0) {
          report.rows.push_back({spec.label, b, 0, std::nullopt, ms, true});
          continue;
        }
        for (std::size_t i = 0; i < tests.size(); ++i) {
          report.rows.push_back({spec.label, b, i, evaluate(i, sel->removal), ms / static_cast<double>(tests.size()),
                                 false});
        }
        continue;
      }
      for (std::size_t i = 0; i < tests.size(); ++i) {
        const ProblemInstance inst(graph, tests[i], b);
        const auto t0 = Clock::now();
        std::optional<Selection> sel;
        try {
          sel = run_method(spec, inst, model, sp, derive(method_seed, i), t0 + limit);
        } catch (const TimeLimitExceeded&) {
        }
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        if (!sel || ms > config.time_limit * 1000.0) {
          report.rows.push_back({spec.label, b, i, std::nullopt, ms, true});
          break;
        }
        report.rows.push_back({spec.label, b, i, evaluate(i, sel->removal), ms, false});
      }
    }
  }
  report.summaries = summarize(report.rows);
  return report;
}

std::vector<EvalSummary> summarize(const std::vector<EvalRow>& rows) {
  std::vector<EvalSummary> out;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  std::vector<std::vector<double>> ratios, times;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.method, r.budget);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      EvalSummary s;
      s.method = r.method;
      s.budget = r.budget;
      out.push_back(s);
      ratios.emplace_back();
      times.emplace_back();
    }
    auto& s = out[it->second];
    if (r.oot) s.oot = true;
    times[it->second].push_back(r.time_ms);
    if (r.reduced_ratio) ratios[it->second].push_back(*r.reduced_ratio);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& xs = ratios[k];
    out[k].count = xs.size();
    out[k].mean_time_ms = mean(times[k]);
    if (xs.empty()) continue;
    out[k].mean = mean(xs);
    out[k].stddev = stddev(xs);
    out[k].min = *std::min_element(xs.begin(), xs.end());
    out[k].max = *std::max_element(xs.begin(), xs.end());
  }
  return out;
}

std::string summary_path(const std::string& results_path) {
  std::filesystem::path p(results_path);
  return (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
}

std::string meta_path(const std::string& results_path) {
  std::filesystem::path p(results_path);
  return (p.parent_path() / (p.stem().string() + "_meta.json")).string();
}

void emit_results(const EvalReport& report, const std::string& path) {
  auto open = [](const std::string& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open '" + p + "' for writing");
    return out;
  };
  {
    auto out = open(path);
    out << "method,budget,seed_set_id,reduced_ratio,time_ms,oot\n";
    for (const auto& r : report.rows) {
      out << r.method << ',' << r.budget << ',' << r.seed_set_id << ','
          << (r.reduced_ratio ? format_g(*r.reduced_ratio) : "") << ','
          << (report.record_timing ? format_g(r.time_ms) : "") << ',' << (r.oot ? 1 : 0) << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
  }
  {
    const auto p = summary_path(path);
    auto out = open(p);
    out << "method,budget,count,mean,stddev,min,max,mean_time_ms,oot\n";
    for (const auto& s : report.summaries) {
      const bool has = s.count > 0;
      out << s.method << ',' << s.budget << ',' << s.count << ',' << (has ? format_g(s.mean) : "") << ','
          << (has ? format_g(s.stddev) : "") << ',' << (has ? format_g(s.min) : "") << ','
          << (has ? format_g(s.max) : "") << ',' << (report.record_timing ? format_g(s.mean_time_ms) : "") << ','
          << (s.oot ? 1 : 0) << '\n';
    }
    if (!out) throw Error("failed writing '" + p + "'");
  }
  {
    json meta{{"test_graph_hash", report.test_graph_hash},
              {"checkpoint_graph_hash", report.checkpoint_graph_hash},
              {"surrogate_pearson", report.surrogate_pearson ? json(*report.surrogate_pearson) : json(nullptr)},
              {"record_timing", report.record_timing},
              {"seed_independent_timing", "one run per graph and budget, divided evenly over the seed sets"}};
    const auto p = meta_path(path);
    auto out = open(p);
    out << meta.dump(1) << '\n';
    if (!out) throw Error("failed writing '" + p + "'");
  }
}

}  // namespace imin
