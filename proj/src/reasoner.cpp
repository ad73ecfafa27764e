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

#include "pathrec/reasoner.hpp"

#include <fmt/core.h>

#include <cmath>
#include <stdexcept>

#include "pathrec/rng.hpp"

namespace pathrec {

namespace {

Mat xavier(int rows, int cols, Rng& rng) {
  double bound = std::sqrt(6.0 / (rows + cols));
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_double(-bound, bound);
  }
  return m;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Intermediate activations of one module evaluation, kept for backprop.
struct ModuleTrace {
  Vec input;  // [u; h], 2d
  Vec z1, a1, z2, a2, out;
};

ModuleTrace forward_trace(const ModuleWeights& w, const Vec& u, const Vec& h) {
  ModuleTrace t;
  t.input.resize(u.size() + h.size());
  t.input << u, h;
  t.z1 = w.w1.transpose() * t.input;
  t.a1 = t.z1.cwiseMax(0.0);
  t.z2 = w.w2.transpose() * t.a1;
  t.a2 = t.z2.cwiseMax(0.0);
  t.out = w.w3.transpose() * t.a2;
  return t;
}

// Propagates d(loss)/d(out) through the module; accumulates weight
// gradients and returns d(loss)/d(input).
Vec backward_trace(const ModuleWeights& w, const ModuleTrace& t, const Vec& g_out,
                   ModuleWeights& grad) {
  grad.w3.noalias() += t.a2 * g_out.transpose();
  Vec g_a2 = w.w3 * g_out;
  Vec g_z2 = (t.z2.array() > 0.0).select(g_a2, 0.0);
  grad.w2.noalias() += t.a1 * g_z2.transpose();
  Vec g_a1 = w.w2 * g_z2;
  Vec g_z1 = (t.z1.array() > 0.0).select(g_a1, 0.0);
  grad.w1.noalias() += t.input * g_z1.transpose();
  return w.w1 * g_z1;
}

struct SoftmaxHop {
  std::vector<EntityId> partition;  // normalization set, copied for backprop
  Vec probs;                        // softmax over partition
  double target_log_prob = 0.0;
  std::size_t target_pos = 0;
};

// Softmax over all entities of the relation's tail type. `v` is the module
// output; `target` must belong to the partition.
SoftmaxHop softmax_hop(const ReasonerModel& model, const KnowledgeGraph& graph,
                       RelationId r, const Vec& v, EntityId target) {
  const auto& part = graph.entities_of_type(graph.relation(r).tail_type);
  if (part.empty()) {
    throw std::invalid_argument(
        fmt::format("relation '{}' has an empty tail partition", graph.relation(r).name));
  }
  SoftmaxHop hop;
  hop.partition.assign(part.begin(), part.end());
  Vec scores(part.size());
  std::size_t target_pos = part.size();
  for (std::size_t i = 0; i < part.size(); ++i) {
    scores[i] = model.entity_emb.row(part[i]).dot(v);
    if (part[i] == target) target_pos = i;
  }
  if (target_pos == part.size()) {
    throw std::invalid_argument("softmax target outside the tail partition");
  }
  double mx = scores.maxCoeff();
  Vec ex = (scores.array() - mx).exp();
  double z = ex.sum();
  hop.probs = ex / z;
  hop.target_log_prob = scores[target_pos] - (mx + std::log(z));
  hop.target_pos = target_pos;
  return hop;
}

void check_path(const ReasonerModel& model, const KnowledgeGraph& graph,
                const ReasoningPath& path) {
  if (!graph.is_valid_path(path) || path.relations.empty()) {
    throw std::invalid_argument("path is not a valid stored walk");
  }
  for (RelationId r : path.relations) {
    if (!model.has_module(r)) {
      throw std::out_of_range(
          fmt::format("no module for relation '{}'", graph.relation(r).name));
    }
  }
}

}  // namespace

ReasonerModel::ReasonerModel(std::size_t num_entities, const Hyperparams& hp_in,
                             std::vector<Pattern> patterns_in, std::uint64_t seed,
                             const Mat* pretrained)
    : hp(hp_in), patterns(std::move(patterns_in)), init_seed(seed) {
  Rng rng(mix_seed(seed, 0x1417, 0xE11B));
  if (pretrained) {
    if (pretrained->rows() != static_cast<Eigen::Index>(num_entities) ||
        pretrained->cols() != hp.dim) {
      throw std::invalid_argument("pretrained embedding shape mismatch");
    }
    entity_emb = *pretrained;
  } else {
    double bound = 6.0 / std::sqrt(static_cast<double>(hp.dim));
    entity_emb.resize(num_entities, hp.dim);
    for (Eigen::Index i = 0; i < entity_emb.rows(); ++i) {
      for (int j = 0; j < hp.dim; ++j) entity_emb(i, j) = rng.next_double(-bound, bound);
    }
  }
  // One module per relation mentioned anywhere in the candidate set; module
  // creation order follows relation id so initialization is reproducible.
  std::map<RelationId, bool> wanted;
  for (const Pattern& p : patterns) {
    for (RelationId r : p.relations) wanted[r] = true;
  }
  for (const auto& [r, _] : wanted) {
    ModuleWeights w;
    w.w1 = xavier(2 * hp.dim, hp.hidden1, rng);
    w.w2 = xavier(hp.hidden1, hp.hidden2, rng);
    w.w3 = xavier(hp.hidden2, hp.dim, rng);
    modules.emplace(r, std::move(w));
  }
}

const ModuleWeights& ReasonerModel::module(RelationId r) const {
  auto it = modules.find(r);
  if (it == modules.end()) {
    throw std::out_of_range(fmt::format("no module for relation id {}", r));
  }
  return it->second;
}

Vec module_forward(const ReasonerModel& model, RelationId r, const Vec& user_vec,
                   const Vec& history_vec, ReasoningStats* stats) {
  const ModuleWeights& w = model.module(r);
  if (stats) ++stats->module_forwards;
  return forward_trace(w, user_vec, history_vec).out;
}

std::vector<double> next_hop_log_probs(const ReasonerModel& model,
                                       const KnowledgeGraph& graph, EntityId user,
                                       EntityId history, RelationId r,
                                       std::span<const EntityId> candidates) {
  const ModuleWeights& w = model.module(r);  // unknown relation throws first
  if (candidates.empty()) {
    throw std::invalid_argument("next_hop_log_probs: empty candidate set");
  }
  Vec v = forward_trace(w, model.entity_emb.row(user).transpose(),
                        model.entity_emb.row(history).transpose())
              .out;
  const auto& part = graph.entities_of_type(graph.relation(r).tail_type);
  if (part.empty()) {
    throw std::invalid_argument("next_hop_log_probs: empty tail partition");
  }
  Vec scores(part.size());
  for (std::size_t i = 0; i < part.size(); ++i) {
    scores[i] = model.entity_emb.row(part[i]).dot(v);
  }
  double mx = scores.maxCoeff();
  double log_z = mx + std::log((scores.array() - mx).exp().sum());

  std::vector<double> out;
  out.reserve(candidates.size());
  for (EntityId c : candidates) {
    out.push_back(model.entity_emb.row(c).dot(v) - log_z);
  }
  return out;
}

double path_log_prob(const ReasonerModel& model, const KnowledgeGraph& graph,
                     const ReasoningPath& path) {
  check_path(model, graph, path);
  EntityId user = path.entities.front();
  double total = 0.0;
  for (std::size_t t = 0; t < path.relations.size(); ++t) {
    const ModuleWeights& w = model.module(path.relations[t]);
    Vec v = forward_trace(w, model.entity_emb.row(user).transpose(),
                          model.entity_emb.row(path.entities[t]).transpose())
                .out;
    total += softmax_hop(model, graph, path.relations[t], v, path.entities[t + 1])
                 .target_log_prob;
  }
  return total;
}

double path_loss(const ReasonerModel& model, const KnowledgeGraph& graph,
                 std::span<const TrainingExample> batch) {
  if (batch.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& ex : batch) sum -= path_log_prob(model, graph, ex.path);
  return sum / static_cast<double>(batch.size());
}

namespace {

// Ranking term of one example: -mean over negatives of
// sigma(<i+, e_hat> - <i-, e_hat>), with e_hat the final-hop module output.
// Returns false when the example has no negatives.
bool rank_term(const ReasonerModel& model, const TrainingExample& ex,
               const Vec& e_hat, bool log_sigmoid, double* value) {
  if (ex.negatives.empty()) return false;
  EntityId pos = ex.path.entities.back();
  double pos_score = model.entity_emb.row(pos).dot(e_hat);
  double acc = 0.0;
  for (EntityId neg : ex.negatives) {
    double diff = pos_score - model.entity_emb.row(neg).dot(e_hat);
    if (log_sigmoid) {
      // log sigma(x) = -log(1 + exp(-x)), stable form
      acc += diff >= 0.0 ? -std::log1p(std::exp(-diff))
                         : diff - std::log1p(std::exp(diff));
    } else {
      acc += sigmoid(diff);
    }
  }
  *value = -acc / static_cast<double>(ex.negatives.size());
  return true;
}

Vec final_hop_output(const ReasonerModel& model, const TrainingExample& ex) {
  std::size_t last = ex.path.relations.size() - 1;
  const ModuleWeights& w = model.module(ex.path.relations[last]);
  return forward_trace(w, model.entity_emb.row(ex.path.entities.front()).transpose(),
                       model.entity_emb.row(ex.path.entities[last]).transpose())
      .out;
}

}  // namespace

double rank_loss(const ReasonerModel& model, const KnowledgeGraph& graph,
                 std::span<const TrainingExample> batch) {
  double sum = 0.0;
  int n = 0;
  for (const auto& ex : batch) {
    check_path(model, graph, ex.path);
    double value = 0.0;
    if (rank_term(model, ex, final_hop_output(model, ex), model.hp.rank_log_sigmoid,
                  &value)) {
      sum += value;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

LossParts total_loss(const ReasonerModel& model, const KnowledgeGraph& graph,
                     std::span<const TrainingExample> batch) {
  LossParts parts;
  parts.path = path_loss(model, graph, batch);
  parts.rank = rank_loss(model, graph, batch);
  for (const auto& ex : batch) {
    if (!ex.negatives.empty()) ++parts.rank_examples;
  }
  parts.total = parts.path + model.hp.lambda * parts.rank;
  return parts;
}

Gradients Gradients::zeros_like(const ReasonerModel& model) {
  Gradients g;
  g.d_entity_emb = Mat::Zero(model.entity_emb.rows(), model.entity_emb.cols());
  for (const auto& [r, w] : model.modules) {
    ModuleWeights d;
    d.w1 = Mat::Zero(w.w1.rows(), w.w1.cols());
    d.w2 = Mat::Zero(w.w2.rows(), w.w2.cols());
    d.w3 = Mat::Zero(w.w3.rows(), w.w3.cols());
    g.d_modules.emplace(r, std::move(d));
  }
  return g;
}

void Gradients::set_zero() {
  d_entity_emb.setZero();
  for (auto& [r, w] : d_modules) {
    w.w1.setZero();
    w.w2.setZero();
    w.w3.setZero();
  }
}

void Gradients::add(const Gradients& other) {
  d_entity_emb += other.d_entity_emb;
  for (auto& [r, w] : d_modules) {
    const ModuleWeights& o = other.d_modules.at(r);
    w.w1 += o.w1;
    w.w2 += o.w2;
    w.w3 += o.w3;
  }
}

void example_loss_backward(const ReasonerModel& model, const KnowledgeGraph& graph,
                           const TrainingExample& ex, double path_weight,
                           double rank_weight, Gradients& grads,
                           double* path_value, double* rank_value) {
  check_path(model, graph, ex.path);
  const int d = model.hp.dim;
  EntityId user = ex.path.entities.front();
  Vec user_vec = model.entity_emb.row(user).transpose();
  const std::size_t hops = ex.path.relations.size();
  double log_prob = 0.0;
  if (rank_value) *rank_value = 0.0;

  for (std::size_t t = 0; t < hops; ++t) {
    RelationId r = ex.path.relations[t];
    EntityId h_ent = ex.path.entities[t];
    EntityId target = ex.path.entities[t + 1];
    const ModuleWeights& w = model.module(r);
    ModuleTrace trace =
        forward_trace(w, user_vec, model.entity_emb.row(h_ent).transpose());

    SoftmaxHop hop = softmax_hop(model, graph, r, trace.out, target);
    log_prob += hop.target_log_prob;

    // d(-log p_target)/d(out) = sum_j (p_j - [j == target]) E_j, and the
    // matching embedding rows pick up (p_j - delta) * out.
    Vec g_out = Vec::Zero(d);
    for (std::size_t j = 0; j < hop.partition.size(); ++j) {
      double coeff = (hop.probs[j] - (j == hop.target_pos ? 1.0 : 0.0)) * path_weight;
      g_out.noalias() += coeff * model.entity_emb.row(hop.partition[j]).transpose();
      grads.d_entity_emb.row(hop.partition[j]) += coeff * trace.out.transpose();
    }

    // The ranking term shares the final hop's module evaluation.
    if (t + 1 == hops && !ex.negatives.empty()) {
      double value = 0.0;
      rank_term(model, ex, trace.out, model.hp.rank_log_sigmoid, &value);
      if (rank_value) *rank_value = value;

      EntityId pos = ex.path.entities.back();
      double pos_score = model.entity_emb.row(pos).dot(trace.out);
      double per_neg = rank_weight / static_cast<double>(ex.negatives.size());
      for (EntityId neg : ex.negatives) {
        double diff = pos_score - model.entity_emb.row(neg).dot(trace.out);
        double s = sigmoid(diff);
        // d(-sigma)/d(diff) = -s(1-s); d(-log sigma)/d(diff) = -(1-s)
        double g_diff = model.hp.rank_log_sigmoid ? -(1.0 - s) : -s * (1.0 - s);
        g_diff *= per_neg;
        Vec pos_minus_neg =
            (model.entity_emb.row(pos) - model.entity_emb.row(neg)).transpose();
        g_out.noalias() += g_diff * pos_minus_neg;
        grads.d_entity_emb.row(pos) += g_diff * trace.out.transpose();
        grads.d_entity_emb.row(neg) -= g_diff * trace.out.transpose();
      }
    }

    Vec g_input = backward_trace(w, trace, g_out, grads.d_modules.at(r));
    grads.d_entity_emb.row(user) += g_input.head(d).transpose();
    grads.d_entity_emb.row(h_ent) += g_input.tail(d).transpose();
  }
  if (path_value) *path_value = -log_prob;
}

LossParts total_loss_backward(const ReasonerModel& model,
                              const KnowledgeGraph& graph,
                              std::span<const TrainingExample> batch,
                              Gradients& grads) {
  LossParts parts;
  if (batch.empty()) return parts;

  int rank_count = 0;
  for (const auto& ex : batch) {
    if (!ex.negatives.empty()) ++rank_count;
  }
  parts.rank_examples = rank_count;

  const double path_w = 1.0 / static_cast<double>(batch.size());
  const double rank_w =
      rank_count == 0 ? 0.0 : model.hp.lambda / static_cast<double>(rank_count);

  for (const auto& ex : batch) {
    double pv = 0.0, rv = 0.0;
    example_loss_backward(model, graph, ex, path_w, rank_w, grads, &pv, &rv);
    parts.path += path_w * pv;
    if (rank_count > 0) parts.rank += rv / rank_count;
  }
  parts.total = parts.path + model.hp.lambda * parts.rank;
  return parts;
}

}  // namespace pathrec
