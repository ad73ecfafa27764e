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

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pathrec/kg.hpp"
#include "pathrec/pattern.hpp"

namespace pathrec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One per-relation reasoning module: two rectified hidden layers and a
// linear output that predicts the next-hop entity embedding,
//   out = relu(relu([u; h] W1) W2) W3.
// Row-vector convention; no biases.
struct ModuleWeights {
  Mat w1;  // 2d x h1
  Mat w2;  // h1 x h2
  Mat w3;  // h2 x d
};

struct Hyperparams {
  int dim = 100;
  int hidden1 = 256;
  int hidden2 = 256;
  double lambda = 10.0;           // ranking-loss weight
  double learning_rate = 1e-4;
  int batch_size = 128;
  int epochs = 20;
  int negatives_per_path = 5;
  // Variant switch: score pair differences with log-sigmoid instead of the
  // raw sigmoid. Off by default.
  bool rank_log_sigmoid = false;
};

// Entity embeddings plus one module per relation occurring in the candidate
// pattern set. Immutable after training; concurrent readers are safe.
class ReasonerModel {
 public:
  ReasonerModel() = default;
  // Xavier-initialized modules; embeddings uniform in +-6/sqrt(d) unless
  // `pretrained` (num_entities x dim) is supplied.
  ReasonerModel(std::size_t num_entities, const Hyperparams& hp,
                std::vector<Pattern> patterns, std::uint64_t seed,
                const Mat* pretrained = nullptr);

  Mat entity_emb;                            // |E| x d
  std::map<RelationId, ModuleWeights> modules;
  Hyperparams hp;
  std::vector<Pattern> patterns;
  std::uint64_t graph_fingerprint = 0;
  std::uint64_t pattern_fingerprint = 0;
  std::uint64_t init_seed = 0;

  bool has_module(RelationId r) const { return modules.count(r) > 0; }
  const ModuleWeights& module(RelationId r) const;
  int dim() const { return hp.dim; }
};

// Counts the work reasoning does; shared by the efficiency comparison.
struct ReasoningStats {
  std::uint64_t module_forwards = 0;
  std::uint64_t emitted_paths = 0;
};

Vec module_forward(const ReasonerModel& model, RelationId r, const Vec& user_vec,
                   const Vec& history_vec, ReasoningStats* stats = nullptr);

// Log-probabilities of `candidates` under the next-hop softmax
//   P(e' | u, h, r) = exp(<phi_r(u, h), e'>) / Z,
// where Z sums over every entity whose type is the tail type of r.
// `history` is the entity currently occupied (the walk position); for the
// first hop that is the user itself.
std::vector<double> next_hop_log_probs(const ReasonerModel& model,
                                       const KnowledgeGraph& graph, EntityId user,
                                       EntityId history, RelationId r,
                                       std::span<const EntityId> candidates);

// Sum of per-hop log-probabilities; <= 0. Throws on structurally invalid
// paths or relations without modules.
double path_log_prob(const ReasonerModel& model, const KnowledgeGraph& graph,
                     const ReasoningPath& path);

// A training item: positive path plus sampled negative items for the
// pairwise ranking term.
struct TrainingExample {
  EntityId user = kNoEntity;
  ReasoningPath path;
  std::vector<EntityId> negatives;
};

struct LossParts {
  double path = 0.0;   // mean over batch of -log P(L | u), >= 0
  double rank = 0.0;   // mean over batch of -E[sigma(<i+, e> - <i-, e>)], in (-1, 0)
  double total = 0.0;  // path + lambda * rank
  int rank_examples = 0;
};

double path_loss(const ReasonerModel& model, const KnowledgeGraph& graph,
                 std::span<const TrainingExample> batch);
double rank_loss(const ReasonerModel& model, const KnowledgeGraph& graph,
                 std::span<const TrainingExample> batch);
LossParts total_loss(const ReasonerModel& model, const KnowledgeGraph& graph,
                     std::span<const TrainingExample> batch);

// Gradient accumulator with the same shapes as the model parameters.
struct Gradients {
  Mat d_entity_emb;
  std::map<RelationId, ModuleWeights> d_modules;

  static Gradients zeros_like(const ReasonerModel& model);
  void set_zero();
  void add(const Gradients& other);
};

// Computes total_loss and accumulates d(total)/d(theta) into `grads`.
LossParts total_loss_backward(const ReasonerModel& model,
                              const KnowledgeGraph& graph,
                              std::span<const TrainingExample> batch,
                              Gradients& grads);

// Backward pass for one example with caller-fixed batch weights: the path
// term enters the objective as path_weight * (-log P), the rank term (when
// negatives exist) as rank_weight * (-mean sigma). Returns the unweighted
// values through the out-parameters. Lets the trainer split a batch into
// chunks without changing the batch-mean normalization.
void example_loss_backward(const ReasonerModel& model, const KnowledgeGraph& graph,
                           const TrainingExample& example, double path_weight,
                           double rank_weight, Gradients& grads,
                           double* path_value, double* rank_value);

}  // namespace pathrec
