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

#include "pathrec/trainer.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "pathrec/rng.hpp"

namespace pathrec {

namespace {

constexpr std::uint64_t kShuffleSalt = 0x5AFF1E;
constexpr std::uint64_t kNegativeSalt = 0x4E6A71;

// Adam over one tensor.
struct AdamTensor {
  Mat m, v;
  explicit AdamTensor(const Mat& shape)
      : m(Mat::Zero(shape.rows(), shape.cols())),
        v(Mat::Zero(shape.rows(), shape.cols())) {}

  void step(Mat& param, const Mat& grad, double lr, double bc1, double bc2) {
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v + 0.001 * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + 1e-8);
  }
};

struct AdamState {
  AdamTensor emb;
  std::map<RelationId, std::array<AdamTensor, 3>> mods;
  std::int64_t t = 0;

  explicit AdamState(const ReasonerModel& model) : emb(model.entity_emb) {
    for (const auto& [r, w] : model.modules) {
      mods.emplace(r, std::array<AdamTensor, 3>{AdamTensor(w.w1), AdamTensor(w.w2),
                                                AdamTensor(w.w3)});
    }
  }

  void step(ReasonerModel& model, const Gradients& g, double lr) {
    ++t;
    double bc1 = 1.0 - std::pow(0.9, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(0.999, static_cast<double>(t));
    emb.step(model.entity_emb, g.d_entity_emb, lr, bc1, bc2);
    for (auto& [r, tensors] : mods) {
      ModuleWeights& w = model.modules.at(r);
      const ModuleWeights& dw = g.d_modules.at(r);
      tensors[0].step(w.w1, dw.w1, lr, bc1, bc2);
      tensors[1].step(w.w2, dw.w2, lr, bc1, bc2);
      tensors[2].step(w.w3, dw.w3, lr, bc1, bc2);
    }
  }
};

struct FlatSample {
  EntityId user;
  const ReasoningPath* path;
};

}  // namespace

ReasonerModel train_reasoner(const KnowledgeGraph& graph,
                             const std::vector<Pattern>& patterns,
                             const SamplesByUser& samples, const Hyperparams& hp,
                             const TrainOptions& opts, const Mat* pretrained,
                             std::vector<EpochLog>* log) {
  ReasonerModel model(graph.num_entities(), hp, patterns, opts.seed, pretrained);
  model.graph_fingerprint = graph.fingerprint();
  model.pattern_fingerprint = pattern_fingerprint(patterns);

  std::vector<FlatSample> flat;
  std::map<EntityId, std::vector<EntityId>> train_items;
  {
    const RelationId rui = graph.interaction_relation();
    for (const auto& [user, list] : samples) {
      auto owned = graph.neighbors(user, rui);
      train_items.emplace(user, std::vector<EntityId>(owned.begin(), owned.end()));
      for (const auto& s : list) flat.push_back(FlatSample{user, &s.path});
    }
  }
  if (flat.empty()) throw std::invalid_argument("no training samples");
  if (!model.entity_emb.allFinite()) {
    throw std::runtime_error("non-finite loss at epoch 0, batch 0");
  }

  const auto& items = graph.entities_of_type(graph.item_type());

  std::vector<std::size_t> order(flat.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  AdamState adam(model);
  const int chunk_count = std::max(1, opts.threads);
  std::vector<Gradients> chunk_grads;
  chunk_grads.reserve(chunk_count);
  for (int c = 0; c < chunk_count; ++c) {
    chunk_grads.push_back(Gradients::zeros_like(model));
  }

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(opts.seed, kShuffleSalt, epoch));
    shuffle_rng.shuffle(order);

    double ep_path = 0.0, ep_rank = 0.0;
    std::size_t n_batches = 0;

    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      std::size_t end = std::min(order.size(), start + hp.batch_size);
      std::vector<TrainingExample> batch;
      batch.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const FlatSample& fs = flat[order[k]];
        TrainingExample ex;
        ex.user = fs.user;
        ex.path = *fs.path;
        // Negatives: items the user never interacted with in training. The
        // generator is keyed by the example's stable index, not its batch
        // position, so sampling survives re-chunking.
        const auto& owned = train_items.at(fs.user);
        if (owned.size() < items.size()) {
          Rng neg_rng(mix_seed(opts.seed, kNegativeSalt + epoch, order[k]));
          for (int n = 0; n < hp.negatives_per_path; ++n) {
            EntityId cand;
            do {
              cand = items[neg_rng.next_index(items.size())];
            } while (std::binary_search(owned.begin(), owned.end(), cand));
            ex.negatives.push_back(cand);
          }
        }
        batch.push_back(std::move(ex));
      }

      int rank_count = 0;
      for (const auto& ex : batch) {
        if (!ex.negatives.empty()) ++rank_count;
      }
      const double path_w = 1.0 / static_cast<double>(batch.size());
      const double rank_w =
          rank_count == 0 ? 0.0 : hp.lambda / static_cast<double>(rank_count);

      // Contiguous chunks with per-chunk buffers, merged in chunk order:
      // bitwise-reproducible for a fixed thread count, and exactly the
      // sequential result when threads == 1.
      for (auto& g : chunk_grads) g.set_zero();
      std::vector<double> chunk_path(chunk_count, 0.0);
      std::vector<double> chunk_rank(chunk_count, 0.0);
      parallel_for(chunk_count, chunk_count, [&](std::size_t c) {
        std::size_t b0 = batch.size() * c / chunk_count;
        std::size_t b1 = batch.size() * (c + 1) / chunk_count;
        for (std::size_t k = b0; k < b1; ++k) {
          double pv = 0.0, rv = 0.0;
          example_loss_backward(model, graph, batch[k], path_w, rank_w,
                                chunk_grads[c], &pv, &rv);
          chunk_path[c] += pv;
          chunk_rank[c] += rv;
        }
      });
      Gradients& grads = chunk_grads[0];
      for (int c = 1; c < chunk_count; ++c) grads.add(chunk_grads[c]);

      double batch_path = 0.0, batch_rank = 0.0;
      for (int c = 0; c < chunk_count; ++c) {
        batch_path += chunk_path[c];
        batch_rank += chunk_rank[c];
      }
      batch_path *= path_w;
      if (rank_count > 0) batch_rank /= rank_count;
      double batch_total = batch_path + hp.lambda * batch_rank;
      if (!std::isfinite(batch_total)) {
        throw std::runtime_error(
            fmt::format("non-finite loss at epoch {}, batch {}", epoch, n_batches));
      }

      adam.step(model, grads, hp.learning_rate);
      ep_path += batch_path;
      ep_rank += batch_rank;
      ++n_batches;
    }

    EpochLog el{epoch, ep_path / n_batches, ep_rank / n_batches, 0.0};
    el.total_loss = el.path_loss + hp.lambda * el.rank_loss;
    if (log) log->push_back(el);
    if (opts.verbose) {
      fmt::print("[train] epoch {:>3}  path {:.5f}  rank {:.5f}  total {:.5f}\n",
                 epoch, el.path_loss, el.rank_loss, el.total_loss);
    }
  }
  return model;
}

Mat pretrain_embeddings(const KnowledgeGraph& graph, int dim, int epochs,
                        std::uint64_t seed, const PretrainConfig& cfg,
                        Mat* relations_out) {
  Rng rng(mix_seed(seed, 0x7E5A, 0x11));
  const std::size_t n_ent = graph.num_entities();
  double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  Mat ent(n_ent, dim);
  for (std::size_t i = 0; i < n_ent; ++i) {
    for (int j = 0; j < dim; ++j) ent(i, j) = rng.next_double(-bound, bound);
  }
  Mat rel(graph.num_relations(), dim);
  for (Eigen::Index i = 0; i < rel.rows(); ++i) {
    for (int j = 0; j < dim; ++j) rel(i, j) = rng.next_double(-bound, bound);
    rel.row(i).normalize();
  }

  auto triples = graph.forward_triples();
  if (triples.empty() || epochs <= 0) {
    if (relations_out) *relations_out = rel;
    return ent;
  }

  std::vector<std::size_t> order(triples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const double lr = cfg.learning_rate;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const auto& t = triples[idx];
      EntityId h = t[0], tail = t[2];
      RelationId r = t[1];
      // Corrupt head or tail with a random entity of the same type.
      bool corrupt_head = rng.next_u64() & 1;
      const auto& pool =
          graph.entities_of_type(graph.entity_type(corrupt_head ? h : tail));
      EntityId ch = h, ct = tail;
      if (pool.size() > 1) {
        EntityId pick;
        do {
          pick = pool[rng.next_index(pool.size())];
        } while (pick == (corrupt_head ? h : tail));
        (corrupt_head ? ch : ct) = pick;
      }

      Vec pos_diff = (ent.row(h) + rel.row(r) - ent.row(tail)).transpose();
      Vec neg_diff = (ent.row(ch) + rel.row(r) - ent.row(ct)).transpose();
      double loss = cfg.margin + pos_diff.squaredNorm() - neg_diff.squaredNorm();
      if (loss <= 0.0) continue;

      // Pull the true triple together, push the corrupted one apart.
      Vec gp = 2.0 * lr * pos_diff;
      Vec gn = 2.0 * lr * neg_diff;
      ent.row(h) -= gp.transpose();
      ent.row(tail) += gp.transpose();
      rel.row(r) -= gp.transpose();
      ent.row(ch) += gn.transpose();
      ent.row(ct) -= gn.transpose();
      rel.row(r) += gn.transpose();
    }
    if (cfg.normalize_entities) {
      for (std::size_t i = 0; i < n_ent; ++i) {
        double norm = ent.row(i).norm();
        if (norm > 1.0) ent.row(i) /= norm;
      }
    }
  }
  if (relations_out) *relations_out = rel;
  return ent;
}

}  // namespace pathrec
