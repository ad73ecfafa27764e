// Copyright 2026 The pathrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stage-wise pipeline driver. Every artifact embeds the run-config hash and
// the fingerprints of its inputs; downstream stages refuse mismatches.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "pathrec/checkpoint.hpp"
#include "pathrec/config.hpp"
#include "pathrec/dataset.hpp"
#include "pathrec/eval.hpp"
#include "pathrec/synth.hpp"
#include "pathrec/trainer.hpp"

using namespace pathrec;

namespace {

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

void require_match(const std::string& what, const std::string& expected,
                   const std::string& actual) {
  if (expected != actual) {
    throw std::runtime_error(
        fmt::format("{} fingerprint mismatch: artifact carries {}, current input is {}",
                    what, expected, actual));
  }
}

ArtifactHeader base_header(const RunConfig& cfg, const KnowledgeGraph& graph) {
  return ArtifactHeader{{"config", hex64(cfg.hash())},
                        {"graph", hex64(graph.fingerprint())}};
}

Hyperparams hyperparams_of(const RunConfig& cfg) {
  Hyperparams hp;
  hp.dim = cfg.dim;
  hp.hidden1 = cfg.hidden;
  hp.hidden2 = cfg.hidden;
  hp.lambda = cfg.lambda;
  hp.learning_rate = cfg.learning_rate;
  hp.batch_size = cfg.batch_size;
  hp.epochs = cfg.epochs;
  hp.negatives_per_path = cfg.negatives;
  hp.rank_log_sigmoid = cfg.rank_log_sigmoid;
  return hp;
}

EvalConfig eval_config_of(const RunConfig& cfg) {
  EvalConfig ec;
  ec.budget = cfg.budget;
  ec.bound_cap = cfg.bound_cap;
  ec.prominence_cap = cfg.prominence_cap;
  ec.top_n = cfg.top_n;
  ec.seed = cfg.seed;
  ec.threads = cfg.threads;
  return ec;
}

SamplesByUser collect_samples(const Dataset& data, const std::vector<Pattern>& patterns,
                              const RunConfig& cfg) {
  return collect_training_paths(data.graph, patterns, data.train, cfg.per_user_cap,
                                cfg.seed, cfg.threads);
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << body;
}

ComposerVariant variant_of(const RunConfig& cfg) {
  auto v = parse_variant(cfg.variant);
  if (!v) {
    throw std::runtime_error(fmt::format(
        "unknown variant '{}' (expected composed|prior|rand)", cfg.variant));
  }
  return *v;
}

// Model + graph cross-checks shared by compose / recommend / eval / bench.
ReasonerModel load_model_for(const Dataset& data, const std::string& path) {
  ReasonerModel model = load_model(path);
  require_match("graph", hex64(model.graph_fingerprint),
                hex64(data.graph.fingerprint()));
  if (pattern_fingerprint(model.patterns) != model.pattern_fingerprint) {
    throw std::runtime_error("checkpoint pattern list does not match its fingerprint");
  }
  return model;
}

void print_stats(const KnowledgeGraph& g) {
  GraphStats s = g.stats();
  fmt::print(
      "graph: {} users, {} items, {} entities, {} relations (+{} inverses), "
      "{} interactions, {} forward triples, {} directed edges\n",
      s.users, s.items, s.entities, s.declared_relations, s.declared_relations,
      s.interactions, s.forward_triples, s.directed_edges);
}

// Deferred flag overlay implementing the flag > env > file > default order.
struct PendingFlags {
  RunConfig flag_values;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overlays;

  template <typename T>
  void add(CLI::App& app, const std::string& name, T RunConfig::*member,
           const char* help) {
    CLI::Option* opt = app.add_option("--" + name, flag_values.*member, help);
    overlays.emplace_back(opt, [this, member](RunConfig& cfg) {
      cfg.*member = flag_values.*member;
    });
  }

  void bind(CLI::App& app) {
    add(app, "dim", &RunConfig::dim, "embedding dimensionality");
    add(app, "hidden", &RunConfig::hidden, "module hidden width");
    add(app, "max-length", &RunConfig::max_length, "pattern length bound H");
    add(app, "max-patterns", &RunConfig::max_patterns, "candidate set size M");
    add(app, "budget", &RunConfig::budget, "paths per user profile K");
    add(app, "lambda", &RunConfig::lambda, "ranking loss weight");
    add(app, "learning-rate", &RunConfig::learning_rate, "optimizer step size");
    add(app, "batch-size", &RunConfig::batch_size, "training batch size");
    add(app, "epochs", &RunConfig::epochs, "training epochs");
    add(app, "negatives", &RunConfig::negatives, "negative items per path");
    add(app, "walks-per-pair", &RunConfig::walks_per_pair, "mining walks per pair");
    add(app, "per-user-cap", &RunConfig::per_user_cap,
        "training paths per (user, pattern)");
    add(app, "prominence-cap", &RunConfig::prominence_cap,
        "samples per prominence estimate");
    add(app, "bound-cap", &RunConfig::bound_cap, "per-pattern weight bound");
    add(app, "pretrain-epochs", &RunConfig::pretrain_epochs,
        "embedding pretraining epochs");
    add(app, "pretrain-lr", &RunConfig::pretrain_lr, "embedding pretraining step");
    add(app, "pretrain-margin", &RunConfig::pretrain_margin, "pretraining margin");
    add(app, "use-pretrain", &RunConfig::use_pretrain,
        "initialize from pretrained embeddings");
    add(app, "rank-log-sigmoid", &RunConfig::rank_log_sigmoid,
        "use log-sigmoid in the ranking loss");
    add(app, "top-n", &RunConfig::top_n, "recommendations per user");
    add(app, "threads", &RunConfig::threads, "worker threads (1 = deterministic)");
    add(app, "seed", &RunConfig::seed, "global seed");
    add(app, "variant", &RunConfig::variant, "profile composer: composed|prior|rand");
  }

  RunConfig resolve(const std::string& config_file) const {
    RunConfig cfg;
    if (!config_file.empty()) cfg = RunConfig::from_json_file(config_file);
    cfg.apply_env();
    for (const auto& [opt, apply] : overlays) {
      if (opt->count() > 0) apply(cfg);
    }
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph path-reasoning recommender"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "JSON config file");
  PendingFlags flags;
  flags.bind(app);

  std::string out_dir;
  SyntheticSpec synth;
  bool no_backup_plant = false;
  auto* cmd_generate = app.add_subcommand("generate", "emit a planted synthetic dataset");
  cmd_generate->add_option("--out", out_dir, "output directory")->required();
  cmd_generate->add_option("--users", synth.users, "user count");
  cmd_generate->add_option("--items", synth.items, "item count");
  cmd_generate->add_option("--interactions", synth.interactions_per_user,
                           "interactions per user");
  cmd_generate->add_option("--patterns", synth.num_patterns, "planted patterns (1-3)");
  cmd_generate->add_option("--dominant-prob", synth.dominant_prob,
                           "dominant pattern probability");
  cmd_generate->add_option("--noise", synth.noise_rate, "noise edge rate");
  cmd_generate->add_option("--test-fraction", synth.test_fraction, "test split share");
  cmd_generate->add_flag("--no-backup-plant", no_backup_plant,
                         "plant test pairs through one pattern only");

  std::string data_dir, patterns_path, model_path, init_path, profiles_path,
      out_path, sweep_param = "lambda";
  double keep_fraction = 1.0;
  bool per_user_report = false;
  std::size_t bench_users = 1000, bench_paths = 10000;
  int bench_reps = 5;

  auto* cmd_mine = app.add_subcommand("mine", "mine candidate patterns");
  cmd_mine->add_option("--data", data_dir)->required();
  cmd_mine->add_option("--out", out_path)->required();

  auto* cmd_pretrain = app.add_subcommand("pretrain", "pretrain entity embeddings");
  cmd_pretrain->add_option("--data", data_dir)->required();
  cmd_pretrain->add_option("--out", out_path)->required();

  auto* cmd_train = app.add_subcommand("train", "train the path reasoner");
  cmd_train->add_option("--data", data_dir)->required();
  cmd_train->add_option("--patterns", patterns_path)->required();
  cmd_train->add_option("--init", init_path, "pretrained embeddings");
  cmd_train->add_option("--out", out_path)->required();

  auto* cmd_compose = app.add_subcommand("compose", "compose user profiles");
  cmd_compose->add_option("--data", data_dir)->required();
  cmd_compose->add_option("--model", model_path)->required();
  cmd_compose->add_option("--out", out_path)->required();

  auto* cmd_recommend = app.add_subcommand("recommend", "emit top-N items with paths");
  cmd_recommend->add_option("--data", data_dir)->required();
  cmd_recommend->add_option("--model", model_path)->required();
  cmd_recommend->add_option("--profiles", profiles_path)->required();
  cmd_recommend->add_option("--out", out_path)->required();

  auto* cmd_eval = app.add_subcommand("eval", "evaluate on the test split");
  cmd_eval->add_option("--data", data_dir)->required();
  cmd_eval->add_option("--model", model_path)->required();
  cmd_eval->add_option("--out", out_path)->required();
  cmd_eval->add_option("--keep-fraction", keep_fraction,
                       "preserve this share of candidate patterns per user");
  cmd_eval->add_flag("--per-user", per_user_report, "include per-user metrics");

  auto* cmd_bench = app.add_subcommand("bench", "time batched vs individual reasoning");
  cmd_bench->add_option("--data", data_dir)->required();
  cmd_bench->add_option("--model", model_path)->required();
  cmd_bench->add_option("--out", out_path)->required();
  cmd_bench->add_option("--bench-users", bench_users);
  cmd_bench->add_option("--bench-paths", bench_paths);
  cmd_bench->add_option("--reps", bench_reps);

  auto* cmd_sweep = app.add_subcommand("sweep", "hyperparameter sweep table");
  cmd_sweep->add_option("--data", data_dir)->required();
  cmd_sweep->add_option("--param", sweep_param, "lambda|budget");
  cmd_sweep->add_option("--patterns", patterns_path, "patterns.tsv (lambda sweep)");
  cmd_sweep->add_option("--model", model_path, "model checkpoint (budget sweep)");
  cmd_sweep->add_option("--out", out_path)->required();

  // Global flags may appear after the subcommand name.
  for (CLI::App* sub : {cmd_generate, cmd_mine, cmd_pretrain, cmd_train, cmd_compose,
                   cmd_recommend, cmd_eval, cmd_bench, cmd_sweep}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = flags.resolve(config_file);

    if (cmd_generate->parsed()) {
      synth.seed = cfg.seed;
      synth.backup_plant_test = !no_backup_plant;
      SyntheticData data = generate_synthetic(synth);
      write_synthetic(data, synth, out_dir);
      write_text(out_dir + "/config.json", cfg.to_json());
      Dataset loaded = Dataset::load(out_dir);
      print_stats(loaded.graph);
      fmt::print("wrote dataset to {}\n", out_dir);
      return 0;
    }

    Dataset data = Dataset::load(data_dir);

    if (cmd_mine->parsed()) {
      MinerConfig mc;
      mc.max_length = cfg.max_length;
      mc.max_patterns = cfg.max_patterns;
      mc.walks_per_pair = cfg.walks_per_pair;
      mc.seed = cfg.seed;
      mc.threads = cfg.threads;
      MiningResult res = mine_patterns(data.graph, data.train, mc);
      ArtifactHeader h = base_header(cfg, data.graph);
      h["patterns"] = hex64(pattern_fingerprint(res.patterns));
      write_patterns(out_path, data.graph, res, h);
      fmt::print("mined {} candidates ({} distinct, {} successful walks)\n",
                 res.patterns.size(), res.distinct_patterns, res.successful_walks);
      for (std::size_t i = 0; i < res.patterns.size(); ++i) {
        fmt::print("  {:>2}  {:<56} {}\n", i + 1,
                   pattern_name(data.graph, res.patterns[i]),
                   res.patterns[i].frequency);
      }
      return 0;
    }

    if (cmd_pretrain->parsed()) {
      PretrainConfig pc;
      pc.epochs = cfg.pretrain_epochs;
      pc.learning_rate = cfg.pretrain_lr;
      pc.margin = cfg.pretrain_margin;
      Mat emb = pretrain_embeddings(data.graph, cfg.dim, cfg.pretrain_epochs,
                                    cfg.seed, pc);
      save_embeddings(emb, data.graph.fingerprint(), out_path);
      fmt::print("pretrained {}x{} embeddings -> {}\n", emb.rows(), emb.cols(),
                 out_path);
      return 0;
    }

    if (cmd_train->parsed()) {
      ArtifactHeader ph;
      std::vector<Pattern> patterns = read_patterns(patterns_path, data.graph, &ph);
      if (ph.count("graph")) {
        require_match("graph", ph.at("graph"), hex64(data.graph.fingerprint()));
      }
      std::optional<Mat> init;
      if (!init_path.empty()) {
        std::uint64_t fp = 0;
        init = load_embeddings(init_path, &fp);
        require_match("graph", hex64(fp), hex64(data.graph.fingerprint()));
      } else if (cfg.use_pretrain) {
        PretrainConfig pc;
        pc.epochs = cfg.pretrain_epochs;
        pc.learning_rate = cfg.pretrain_lr;
        pc.margin = cfg.pretrain_margin;
        init = pretrain_embeddings(data.graph, cfg.dim, cfg.pretrain_epochs,
                                   cfg.seed, pc);
      }
      SamplesByUser samples = collect_samples(data, patterns, cfg);
      TrainOptions topts;
      topts.seed = cfg.seed;
      topts.threads = cfg.threads;
      topts.verbose = true;
      ReasonerModel model =
          train_reasoner(data.graph, patterns, samples, hyperparams_of(cfg), topts,
                         init ? &*init : nullptr);
      save_model(model, out_path);
      fmt::print("trained model with {} modules -> {}\n", model.modules.size(),
                 out_path);
      return 0;
    }

    if (cmd_sweep->parsed() && sweep_param == "lambda") {
      if (patterns_path.empty()) {
        throw std::runtime_error("lambda sweep needs --patterns");
      }
      std::vector<Pattern> patterns = read_patterns(patterns_path, data.graph);
      SamplesByUser sweep_samples = collect_samples(data, patterns, cfg);
      TrainOptions topts;
      topts.seed = cfg.seed;
      topts.threads = cfg.threads;
      auto rows = sweep_lambda(data.graph, patterns, sweep_samples,
                               hyperparams_of(cfg), topts, eval_config_of(cfg),
                               data.test, {0.0, 5.0, 10.0, 15.0, 20.0});
      write_text(out_path, sweep_to_csv(rows));
      fmt::print("{}", sweep_to_csv(rows));
      return 0;
    }

    ReasonerModel model = load_model_for(data, model_path);
    SamplesByUser samples = collect_samples(data, model.patterns, cfg);
    EvalContext ctx{&data.graph, &model, &model.patterns, &samples,
                    eval_config_of(cfg)};

    if (cmd_compose->parsed()) {
      std::vector<UserProfile> profiles;
      for (const auto& [user, _] : samples) {
        UserProfile p = compose_for_user(ctx, user, variant_of(cfg));
        if (!p.entries.empty()) profiles.push_back(std::move(p));
      }
      ArtifactHeader h = base_header(cfg, data.graph);
      h["patterns"] = hex64(model.pattern_fingerprint);
      h["variant"] = cfg.variant;
      write_profiles(out_path, data.graph, profiles, h);
      fmt::print("composed {} profiles -> {}\n", profiles.size(), out_path);
      return 0;
    }

    if (cmd_recommend->parsed()) {
      ArtifactHeader ph;
      std::vector<UserProfile> profiles = read_profiles(profiles_path, data.graph, &ph);
      if (ph.count("patterns")) {
        require_match("pattern-set", ph.at("patterns"),
                      hex64(model.pattern_fingerprint));
      }
      for (const auto& p : profiles) {
        for (const auto& e : p.entries) {
          if (e.pattern_idx >= static_cast<int>(model.patterns.size())) {
            throw std::runtime_error(fmt::format(
                "profile references pattern {} but the checkpoint only has {}",
                e.pattern_idx + 1, model.patterns.size()));
          }
          for (RelationId r : model.patterns[e.pattern_idx].relations) {
            if (!model.has_module(r)) {
              throw std::runtime_error(fmt::format(
                  "checkpoint has no module for relation '{}' required by the profile",
                  data.graph.relation(r).name));
            }
          }
        }
      }
      std::vector<std::pair<EntityId, std::vector<Recommendation>>> recs;
      for (const auto& p : profiles) {
        LayoutTree tree = build_layout_tree(p, model.patterns);
        auto paths = tree_reason(data.graph, model, p.user, tree);
        recs.emplace_back(p.user, recommend(data.graph, model, p.user, paths,
                                            cfg.top_n, true));
      }
      ArtifactHeader h = base_header(cfg, data.graph);
      h["patterns"] = hex64(model.pattern_fingerprint);
      write_recommendations(out_path, data.graph, recs, h);
      fmt::print("wrote recommendations for {} users -> {}\n", recs.size(), out_path);
      return 0;
    }

    if (cmd_eval->parsed()) {
      ComposerVariant variant = variant_of(cfg);
      std::string body;
      if (keep_fraction < 1.0) {
        UnseenEvalResult r =
            unseen_pattern_eval(ctx, data.test, keep_fraction, cfg.seed);
        r.full.config_hash = cfg.hash();
        r.reduced.config_hash = cfg.hash();
        body = fmt::format(
            "{{\n\"full\": {},\"reduced\": {},\"relative_decrease_pct\": "
            "{{\"ndcg\": {}, \"recall\": {}, \"hit_rate\": {}, \"precision\": {}}}\n}}\n",
            report_to_json(r.full, per_user_report),
            report_to_json(r.reduced, per_user_report), r.relative_decrease_pct.ndcg,
            r.relative_decrease_pct.recall, r.relative_decrease_pct.hit_rate,
            r.relative_decrease_pct.precision);
        fmt::print("unseen-pattern eval: ndcg decrease {:.2f}%\n",
                   r.relative_decrease_pct.ndcg);
      } else {
        MetricsReport rep = evaluate(ctx, data.test, variant);
        rep.config_hash = cfg.hash();
        body = report_to_json(rep, per_user_report);
        fmt::print("{}: ndcg {:.3f}  recall {:.3f}  hr {:.3f}  prec {:.3f}  ({} users)\n",
                   rep.variant, rep.macro.ndcg, rep.macro.recall, rep.macro.hit_rate,
                   rep.macro.precision, rep.users_evaluated);
      }
      write_text(out_path, body);
      return 0;
    }

    if (cmd_bench->parsed()) {
      BenchReport rep = bench(ctx, bench_users, bench_paths, bench_reps);
      write_text(out_path, bench_to_json(rep));
      for (const auto& row : rep.rows) {
        fmt::print("{:<12} {:<12} {:>8} work  {:.4f}s +- {:.4f}s  ({} forwards)\n",
                   row.algo, row.task, row.work, row.mean_s, row.std_s,
                   row.module_forwards);
      }
      return 0;
    }

    if (cmd_sweep->parsed()) {
      if (sweep_param != "budget") {
        throw std::runtime_error("unknown sweep param (lambda|budget)");
      }
      auto rows = sweep_budget(ctx, data.test, {15, 20, 25, 30});
      write_text(out_path, sweep_to_csv(rows));
      fmt::print("{}", sweep_to_csv(rows));
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
