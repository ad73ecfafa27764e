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
#include <string>

#include "pathrec/common.hpp"

namespace pathrec {

// Pipeline configuration. Defaults are the reference settings; every field
// can be overridden by (highest precedence first) command-line flag,
// PATHREC_* environment variable, --config JSON file.
struct RunConfig {
  int dim = 100;
  int hidden = 256;
  int max_length = 3;     // H: pattern length bound
  int max_patterns = 15;  // M: candidate set size
  int budget = 15;        // K: output paths per user
  double lambda = 10.0;
  double learning_rate = 1e-4;
  int batch_size = 128;
  int epochs = 20;
  int negatives = 5;
  int walks_per_pair = 10;
  int per_user_cap = 50;
  int prominence_cap = 20;
  int bound_cap = 10;
  int pretrain_epochs = 30;
  double pretrain_lr = 0.01;
  double pretrain_margin = 1.0;
  bool use_pretrain = true;
  bool rank_log_sigmoid = false;
  int top_n = 10;
  int threads = 1;
  std::uint64_t seed = 7;
  std::string variant = "composed";

  // Canonical JSON of the fields above.
  std::string to_json() const;
  static RunConfig from_json_file(const std::string& path);
  void apply_json(const std::string& json_text);
  // Overlays PATHREC_<UPPERCASE_FIELD> environment variables.
  void apply_env();

  std::uint64_t hash() const;
};

}  // namespace pathrec
