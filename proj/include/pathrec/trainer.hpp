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

#include <cstdint>
#include <vector>

#include "pathrec/reasoner.hpp"

namespace pathrec {

struct TrainOptions {
  std::uint64_t seed = 7;
  int threads = 1;  // 1 => bitwise-reproducible runs
  bool verbose = false;
};

struct EpochLog {
  int epoch = 0;
  double path_loss = 0.0;
  double rank_loss = 0.0;
  double total_loss = 0.0;
};

// Behavior cloning over the collected training paths with Adam. Negatives
// are re-sampled per epoch from the items the user has not interacted with;
// their generator is keyed by (seed, epoch, example), so results do not
// depend on thread count w.r.t. sampling (gradient summation is chunked and
// reproducible for a fixed thread count). Throws when the loss goes
// non-finite, naming epoch and batch.
ReasonerModel train_reasoner(const KnowledgeGraph& graph,
                             const std::vector<Pattern>& patterns,
                             const SamplesByUser& samples, const Hyperparams& hp,
                             const TrainOptions& opts,
                             const Mat* pretrained = nullptr,
                             std::vector<EpochLog>* log = nullptr);

struct PretrainConfig {
  int epochs = 30;
  double learning_rate = 0.01;
  double margin = 1.0;
  bool normalize_entities = true;
};

// Margin-based translational embedding pretraining over the stored forward
// triples (corrupt one side per step, rank true triples above corrupted
// ones). Returns the |E| x d entity matrix used to seed the reasoner;
// relation translation vectors are written to relations_out when given.
Mat pretrain_embeddings(const KnowledgeGraph& graph, int dim, int epochs,
                        std::uint64_t seed, const PretrainConfig& cfg = {},
                        Mat* relations_out = nullptr);

}  // namespace pathrec
