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

#include <string>

#include "pathrec/reasoner.hpp"

namespace pathrec {

// Versioned binary model container: hyperparameters, candidate patterns,
// embedding matrix, per-relation module weights, and the graph / pattern-set
// fingerprints of the artifacts it was trained on. Round-trips bit-exactly.
void save_model(const ReasonerModel& model, const std::string& path);
ReasonerModel load_model(const std::string& path);

// Pretrained embedding matrix container (same guarantees).
void save_embeddings(const Mat& embeddings, std::uint64_t graph_fingerprint,
                     const std::string& path);
Mat load_embeddings(const std::string& path, std::uint64_t* graph_fingerprint);

}  // namespace pathrec
