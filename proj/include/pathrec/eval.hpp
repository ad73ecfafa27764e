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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pathrec/metrics.hpp"
#include "pathrec/reason.hpp"
#include "pathrec/trainer.hpp"

namespace pathrec {

enum class ComposerVariant { kComposed, kPrior, kRand };

const char* variant_name(ComposerVariant v);
std::optional<ComposerVariant> parse_variant(const std::string& name);

struct EvalConfig {
  int budget = 15;         // total profile weight (paths per user)
  int bound_cap = 10;      // per-pattern weight bound
  int prominence_cap = 20; // samples averaged per (user, pattern)
  int top_n = 10;
  std::uint64_t seed = 7;  // rand composer / pattern-mask seeding
  int threads = 1;
};

struct EvalContext {
  const KnowledgeGraph* graph = nullptr;
  const ReasonerModel* model = nullptr;
  const std::vector<Pattern>* patterns = nullptr;
  const SamplesByUser* samples = nullptr;
  EvalConfig cfg;
};

// Profile for one user under the chosen composer. Per-pattern bounds are
// min(bound_cap, #distinct sampled paths); prominence values come from the
// model. `keep`, when given, masks patterns out entirely.
UserProfile compose_for_user(const EvalContext& ctx, EntityId user,
                             ComposerVariant variant,
                             const std::vector<char>* keep = nullptr);

// Full per-user inference (compose -> layout -> reason -> recommend ->
// metrics), macro-averaged over test users with nonempty relevant sets.
// keep_fraction < 1 randomly preserves that share of the candidate patterns
// per user (fresh mask per user, seeded).
MetricsReport evaluate(const EvalContext& ctx,
                       const std::vector<InteractionPair>& test_pairs,
                       ComposerVariant variant, double keep_fraction = 1.0,
                       std::uint64_t keep_seed = 0);

struct UnseenEvalResult {
  MetricsReport full;
  MetricsReport reduced;
  MetricsAtK relative_decrease_pct;  // 100 * (full - reduced) / full
};

UnseenEvalResult unseen_pattern_eval(const EvalContext& ctx,
                                     const std::vector<InteractionPair>& test_pairs,
                                     double keep_fraction, std::uint64_t seed);

struct BenchRow {
  std::string algo;   // "tree" | "individual"
  std::string task;   // "rec_users" | "find_paths"
  std::size_t work;   // users or paths covered per repetition
  int reps = 0;
  double mean_s = 0.0;
  double std_s = 0.0;
  std::uint64_t module_forwards = 0;
  std::uint64_t emitted_paths = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string cpu;
  std::string compiler;
  int threads = 1;
};

// Wall-clock comparison of the batched and path-by-path executors on the
// recommendation task (composition included) and the bare path-finding task.
// Model/graph loading is outside the timed region. Users cycle when the
// graph has fewer than n_users.
BenchReport bench(const EvalContext& ctx, std::size_t n_users,
                  std::size_t n_paths, int reps = 5);

struct SweepRow {
  std::string param;
  double value = 0.0;
  MetricsAtK macro;
  std::size_t users_evaluated = 0;
};

// Retrains per lambda with a shared data seed, then evaluates the composed
// variant.
std::vector<SweepRow> sweep_lambda(const KnowledgeGraph& graph,
                                   const std::vector<Pattern>& patterns,
                                   const SamplesByUser& samples,
                                   Hyperparams hp, const TrainOptions& topts,
                                   const EvalConfig& cfg,
                                   const std::vector<InteractionPair>& test_pairs,
                                   const std::vector<double>& lambdas);

// Re-infers with different path budgets on a fixed model.
std::vector<SweepRow> sweep_budget(const EvalContext& ctx,
                                   const std::vector<InteractionPair>& test_pairs,
                                   const std::vector<int>& budgets);

std::string report_to_json(const MetricsReport& report, bool per_user = false);
std::string bench_to_json(const BenchReport& report);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace pathrec
