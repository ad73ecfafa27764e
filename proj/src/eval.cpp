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

#include "pathrec/eval.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "pathrec/rng.hpp"

namespace pathrec {

using json = nlohmann::ordered_json;

const char* variant_name(ComposerVariant v) {
  switch (v) {
    case ComposerVariant::kComposed: return "composed";
    case ComposerVariant::kPrior: return "prior";
    case ComposerVariant::kRand: return "rand";
  }
  return "?";
}

std::optional<ComposerVariant> parse_variant(const std::string& name) {
  if (name == "composed") return ComposerVariant::kComposed;
  if (name == "prior") return ComposerVariant::kPrior;
  if (name == "rand") return ComposerVariant::kRand;
  return std::nullopt;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Samples of one user grouped per pattern index (samples are stored sorted
// by pattern).
std::vector<std::span<const PathSample>> group_by_pattern(
    const std::vector<PathSample>& samples, std::size_t n_patterns) {
  std::vector<std::span<const PathSample>> groups(n_patterns);
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j].pattern_idx == samples[i].pattern_idx) {
      ++j;
    }
    groups[samples[i].pattern_idx] =
        std::span<const PathSample>(samples.data() + i, j - i);
    i = j;
  }
  return groups;
}

std::vector<char> random_keep_mask(std::size_t n, double keep_fraction,
                                   std::uint64_t seed, EntityId user) {
  std::vector<char> keep(n, 1);
  if (keep_fraction >= 1.0 || n == 0) return keep;
  auto kept = static_cast<std::size_t>(
      std::llround(keep_fraction * static_cast<double>(n)));
  if (kept < 1) kept = 1;
  if (kept >= n) return keep;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(mix_seed(seed, user, 0x533D));
  rng.shuffle(idx);
  std::fill(keep.begin(), keep.end(), 0);
  for (std::size_t i = 0; i < kept; ++i) keep[idx[i]] = 1;
  return keep;
}

}  // namespace

UserProfile compose_for_user(const EvalContext& ctx, EntityId user,
                             ComposerVariant variant,
                             const std::vector<char>* keep) {
  const auto& patterns = *ctx.patterns;
  if (variant == ComposerVariant::kPrior) {
    UserProfile p = compose_prior(patterns, ctx.cfg.budget, keep);
    p.user = user;
    return p;
  }

  if (variant == ComposerVariant::kRand) {
    // The random baseline is pattern-blind: any candidate is fair game up
    // to the configured cap, evidence or not.
    std::vector<int> bounds(patterns.size(), ctx.cfg.bound_cap);
    if (keep) {
      for (std::size_t j = 0; j < patterns.size(); ++j) {
        if (!(*keep)[j]) bounds[j] = 0;
      }
    }
    return compose_rand(user, patterns, ctx.cfg.budget, bounds, ctx.cfg.seed);
  }

  static const std::vector<PathSample> kNoSamples;
  auto it = ctx.samples->find(user);
  const auto& user_samples = it == ctx.samples->end() ? kNoSamples : it->second;
  auto groups = group_by_pattern(user_samples, patterns.size());

  // Per-pattern weight bound: twice the observed evidence plus slack,
  // capped. Must stay above the evidence count (unseen continuations need
  // expansion slots) and proportional to it (one-path patterns must not
  // absorb the budget).
  std::vector<int> bounds(patterns.size(), 0);
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (keep && !(*keep)[j]) continue;
    if (!groups[j].empty()) {
      bounds[j] = std::min<int>(ctx.cfg.bound_cap,
                                2 * static_cast<int>(groups[j].size()) + 2);
    }
  }

  std::vector<double> values(patterns.size(), kNegInf);
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (bounds[j] <= 0) continue;
    values[j] = prominence(*ctx.model, *ctx.graph, user, patterns[j], groups[j],
                           ctx.cfg.prominence_cap);
  }
  return compose_profile(user, patterns, values, ctx.cfg.budget, bounds);
}

MetricsReport evaluate(const EvalContext& ctx,
                       const std::vector<InteractionPair>& test_pairs,
                       ComposerVariant variant, double keep_fraction,
                       std::uint64_t keep_seed) {
  std::map<EntityId, std::unordered_set<EntityId>> relevant;
  for (const auto& [u, i] : test_pairs) relevant[u].insert(i);

  std::vector<EntityId> users;
  users.reserve(relevant.size());
  for (const auto& [u, items] : relevant) {
    if (!items.empty()) users.push_back(u);
  }

  MetricsReport report;
  report.k = ctx.cfg.top_n;
  report.variant = variant_name(variant);
  report.per_user.resize(users.size());

  parallel_for(users.size(), ctx.cfg.threads, [&](std::size_t idx) {
    EntityId u = users[idx];
    std::vector<char> keep_mask;
    const std::vector<char>* keep = nullptr;
    if (keep_fraction < 1.0) {
      keep_mask = random_keep_mask(ctx.patterns->size(), keep_fraction, keep_seed, u);
      keep = &keep_mask;
    }
    UserProfile profile = compose_for_user(ctx, u, variant, keep);
    MetricsAtK m;  // all-zero when nothing can be recommended
    if (!profile.entries.empty()) {
      LayoutTree tree = build_layout_tree(profile, *ctx.patterns);
      auto paths = tree_reason(*ctx.graph, *ctx.model, u, tree);
      auto recs = recommend(*ctx.graph, *ctx.model, u, paths, ctx.cfg.top_n, true);
      std::vector<EntityId> items;
      items.reserve(recs.size());
      for (const auto& r : recs) items.push_back(r.item);
      m = metrics_at_k(items, relevant.at(u), ctx.cfg.top_n);
    }
    report.per_user[idx] = PerUserMetrics{u, m};
  });

  report.users_evaluated = users.size();
  report.macro = macro_average(report.per_user);
  return report;
}

UnseenEvalResult unseen_pattern_eval(const EvalContext& ctx,
                                     const std::vector<InteractionPair>& test_pairs,
                                     double keep_fraction, std::uint64_t seed) {
  UnseenEvalResult res;
  res.full = evaluate(ctx, test_pairs, ComposerVariant::kComposed);
  res.reduced =
      evaluate(ctx, test_pairs, ComposerVariant::kComposed, keep_fraction, seed);
  auto drop = [](double full, double reduced) {
    return full == 0.0 ? 0.0 : 100.0 * (full - reduced) / full;
  };
  res.relative_decrease_pct.ndcg = drop(res.full.macro.ndcg, res.reduced.macro.ndcg);
  res.relative_decrease_pct.recall =
      drop(res.full.macro.recall, res.reduced.macro.recall);
  res.relative_decrease_pct.hit_rate =
      drop(res.full.macro.hit_rate, res.reduced.macro.hit_rate);
  res.relative_decrease_pct.precision =
      drop(res.full.macro.precision, res.reduced.macro.precision);
  return res;
}

namespace {

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string name = line.substr(colon + 1);
        if (!name.empty() && name.front() == ' ') name.erase(name.begin());
        return name;
      }
    }
  }
  return "unknown";
}

struct TimedStats {
  double mean_s = 0.0;
  double std_s = 0.0;
};

template <typename Fn>
TimedStats timed(int reps, Fn&& fn) {
  std::vector<double> secs;
  secs.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    secs.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  TimedStats s;
  for (double v : secs) s.mean_s += v;
  s.mean_s /= reps;
  double var = 0.0;
  for (double v : secs) var += (v - s.mean_s) * (v - s.mean_s);
  s.std_s = reps > 1 ? std::sqrt(var / (reps - 1)) : 0.0;
  return s;
}

}  // namespace

BenchReport bench(const EvalContext& ctx, std::size_t n_users,
                  std::size_t n_paths, int reps) {
  BenchReport report;
  report.cpu = cpu_model();
  report.compiler = __VERSION__;
  report.threads = ctx.cfg.threads;
  if (reps < 5) reps = 5;

  std::vector<EntityId> users;
  std::vector<UserProfile> profiles;
  std::vector<LayoutTree> trees;
  for (const auto& [u, _] : *ctx.samples) {
    UserProfile p = compose_for_user(ctx, u, ComposerVariant::kComposed);
    if (p.entries.empty()) continue;
    users.push_back(u);
    trees.push_back(build_layout_tree(p, *ctx.patterns));
    profiles.push_back(std::move(p));
  }
  if (users.empty() || n_users == 0) {
    if (n_users == 0) return report;  // zero-row table by contract
    throw std::runtime_error("bench: no user has a nonempty profile");
  }

  auto rec_task = [&](bool individual) {
    for (std::size_t k = 0; k < n_users; ++k) {
      EntityId u = users[k % users.size()];
      UserProfile p = compose_for_user(ctx, u, ComposerVariant::kComposed);
      if (p.entries.empty()) continue;
      std::vector<ReasoningPath> paths;
      if (individual) {
        paths = individual_reason(*ctx.graph, *ctx.model, u, p, *ctx.patterns);
      } else {
        LayoutTree tree = build_layout_tree(p, *ctx.patterns);
        paths = tree_reason(*ctx.graph, *ctx.model, u, tree);
      }
      auto recs = recommend(*ctx.graph, *ctx.model, u, paths, ctx.cfg.top_n, true);
      (void)recs;
    }
  };

  auto find_task = [&](bool individual, ReasoningStats* stats) {
    std::uint64_t produced = 0;
    std::size_t k = 0;
    while (produced < n_paths) {
      std::size_t idx = k % users.size();
      ReasoningStats local;
      std::vector<ReasoningPath> paths;
      if (individual) {
        paths = individual_reason(*ctx.graph, *ctx.model, users[idx], profiles[idx],
                                  *ctx.patterns, &local);
      } else {
        paths = tree_reason(*ctx.graph, *ctx.model, users[idx], trees[idx], &local);
      }
      produced += paths.size();
      if (paths.empty()) ++produced;  // fully pruned user still advances
      if (stats) {
        stats->module_forwards += local.module_forwards;
        stats->emitted_paths += local.emitted_paths;
      }
      ++k;
    }
  };

  for (bool individual : {false, true}) {
    const char* algo = individual ? "individual" : "tree";
    TimedStats rec = timed(reps, [&] { rec_task(individual); });
    report.rows.push_back(
        BenchRow{algo, "rec_users", n_users, reps, rec.mean_s, rec.std_s, 0, 0});

    ReasoningStats counted;
    find_task(individual, &counted);
    TimedStats find = timed(reps, [&] { find_task(individual, nullptr); });
    report.rows.push_back(BenchRow{algo, "find_paths", n_paths, reps, find.mean_s,
                                   find.std_s, counted.module_forwards,
                                   counted.emitted_paths});
  }
  return report;
}

std::vector<SweepRow> sweep_lambda(const KnowledgeGraph& graph,
                                   const std::vector<Pattern>& patterns,
                                   const SamplesByUser& samples, Hyperparams hp,
                                   const TrainOptions& topts, const EvalConfig& cfg,
                                   const std::vector<InteractionPair>& test_pairs,
                                   const std::vector<double>& lambdas) {
  std::vector<SweepRow> rows;
  for (double lambda : lambdas) {
    hp.lambda = lambda;
    ReasonerModel model = train_reasoner(graph, patterns, samples, hp, topts);
    EvalContext ctx{&graph, &model, &patterns, &samples, cfg};
    MetricsReport rep = evaluate(ctx, test_pairs, ComposerVariant::kComposed);
    rows.push_back(SweepRow{"lambda", lambda, rep.macro, rep.users_evaluated});
  }
  return rows;
}

std::vector<SweepRow> sweep_budget(const EvalContext& ctx,
                                   const std::vector<InteractionPair>& test_pairs,
                                   const std::vector<int>& budgets) {
  std::vector<SweepRow> rows;
  for (int budget : budgets) {
    EvalContext local = ctx;
    local.cfg.budget = budget;
    MetricsReport rep = evaluate(local, test_pairs, ComposerVariant::kComposed);
    rows.push_back(
        SweepRow{"budget", static_cast<double>(budget), rep.macro, rep.users_evaluated});
  }
  return rows;
}

namespace {

json metrics_to_json(const MetricsAtK& m) {
  return json{{"ndcg", m.ndcg},
              {"recall", m.recall},
              {"hit_rate", m.hit_rate},
              {"precision", m.precision}};
}

}  // namespace

std::string report_to_json(const MetricsReport& report, bool per_user) {
  json j;
  j["k"] = report.k;
  j["variant"] = report.variant;
  j["config_hash"] = fmt::format("{:016x}", report.config_hash);
  j["users_evaluated"] = report.users_evaluated;
  j["macro"] = metrics_to_json(report.macro);
  if (per_user) {
    json pu = json::array();
    for (const auto& u : report.per_user) {
      json e = metrics_to_json(u.metrics);
      e["user"] = u.user;
      pu.push_back(e);
    }
    j["per_user"] = pu;
  }
  return j.dump(2) + "\n";
}

std::string bench_to_json(const BenchReport& report) {
  json j;
  j["cpu"] = report.cpu;
  j["compiler"] = report.compiler;
  j["threads"] = report.threads;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"algo", r.algo},
                        {"task", r.task},
                        {"work", r.work},
                        {"reps", r.reps},
                        {"mean_s", r.mean_s},
                        {"std_s", r.std_s},
                        {"module_forwards", r.module_forwards},
                        {"emitted_paths", r.emitted_paths}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,value,ndcg,recall,hit_rate,precision,users\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", r.param, r.value,
                       r.macro.ndcg, r.macro.recall, r.macro.hit_rate,
                       r.macro.precision, r.users_evaluated);
  }
  return out;
}

}  // namespace pathrec
