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

#include "pathrec/checkpoint.hpp"

#include <fmt/core.h>

#include <fstream>
#include <stdexcept>

namespace pathrec {

namespace {

constexpr std::uint32_t kModelMagic = 0x50524B4Du;  // "PRKM"
constexpr std::uint32_t kEmbMagic = 0x50524B45u;    // "PRKE"
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
template <typename T>
void put(std::ostream& out, T v) {
  put_bytes(out, &v, sizeof(v));
}
void put_mat(std::ostream& out, const Mat& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) put<double>(out, m(i, j));
  }
}

void get_bytes(std::istream& in, void* p, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error(fmt::format("truncated checkpoint '{}'", path));
}
template <typename T>
T get(std::istream& in, const std::string& path) {
  T v;
  get_bytes(in, &v, sizeof(v), path);
  return v;
}
Mat get_mat(std::istream& in, const std::string& path) {
  auto rows = get<std::uint64_t>(in, path);
  auto cols = get<std::uint64_t>(in, path);
  if (rows > (1ull << 32) || cols > (1ull << 32)) {
    throw std::runtime_error(fmt::format("corrupt checkpoint '{}'", path));
  }
  Mat m(rows, cols);
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) m(i, j) = get<double>(in, path);
  }
  return m;
}

}  // namespace

void save_model(const ReasonerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  put(out, kModelMagic);
  put(out, kVersion);
  put<std::uint64_t>(out, model.graph_fingerprint);
  put<std::uint64_t>(out, model.pattern_fingerprint);
  put<std::uint64_t>(out, model.init_seed);

  put<std::int32_t>(out, model.hp.dim);
  put<std::int32_t>(out, model.hp.hidden1);
  put<std::int32_t>(out, model.hp.hidden2);
  put<double>(out, model.hp.lambda);
  put<double>(out, model.hp.learning_rate);
  put<std::int32_t>(out, model.hp.batch_size);
  put<std::int32_t>(out, model.hp.epochs);
  put<std::int32_t>(out, model.hp.negatives_per_path);
  put<std::uint8_t>(out, model.hp.rank_log_sigmoid ? 1 : 0);

  put<std::uint64_t>(out, model.patterns.size());
  for (const Pattern& p : model.patterns) {
    put<std::uint64_t>(out, p.relations.size());
    for (RelationId r : p.relations) put<std::uint32_t>(out, r);
    put<std::uint64_t>(out, p.frequency);
  }

  put_mat(out, model.entity_emb);

  put<std::uint64_t>(out, model.modules.size());
  for (const auto& [r, w] : model.modules) {
    put<std::uint32_t>(out, r);
    put_mat(out, w.w1);
    put_mat(out, w.w2);
    put_mat(out, w.w3);
  }
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

ReasonerModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  if (get<std::uint32_t>(in, path) != kModelMagic) {
    throw std::runtime_error(fmt::format("'{}' is not a model checkpoint", path));
  }
  if (get<std::uint32_t>(in, path) != kVersion) {
    throw std::runtime_error(fmt::format("unsupported checkpoint version in '{}'", path));
  }
  ReasonerModel model;
  model.graph_fingerprint = get<std::uint64_t>(in, path);
  model.pattern_fingerprint = get<std::uint64_t>(in, path);
  model.init_seed = get<std::uint64_t>(in, path);

  model.hp.dim = get<std::int32_t>(in, path);
  model.hp.hidden1 = get<std::int32_t>(in, path);
  model.hp.hidden2 = get<std::int32_t>(in, path);
  model.hp.lambda = get<double>(in, path);
  model.hp.learning_rate = get<double>(in, path);
  model.hp.batch_size = get<std::int32_t>(in, path);
  model.hp.epochs = get<std::int32_t>(in, path);
  model.hp.negatives_per_path = get<std::int32_t>(in, path);
  model.hp.rank_log_sigmoid = get<std::uint8_t>(in, path) != 0;

  auto n_patterns = get<std::uint64_t>(in, path);
  model.patterns.resize(n_patterns);
  for (auto& p : model.patterns) {
    auto len = get<std::uint64_t>(in, path);
    p.relations.resize(len);
    for (auto& r : p.relations) r = get<std::uint32_t>(in, path);
    p.frequency = get<std::uint64_t>(in, path);
  }

  model.entity_emb = get_mat(in, path);

  auto n_modules = get<std::uint64_t>(in, path);
  for (std::uint64_t k = 0; k < n_modules; ++k) {
    auto r = get<std::uint32_t>(in, path);
    ModuleWeights w;
    w.w1 = get_mat(in, path);
    w.w2 = get_mat(in, path);
    w.w3 = get_mat(in, path);
    model.modules.emplace(r, std::move(w));
  }
  return model;
}

void save_embeddings(const Mat& embeddings, std::uint64_t graph_fingerprint,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  put(out, kEmbMagic);
  put(out, kVersion);
  put<std::uint64_t>(out, graph_fingerprint);
  put_mat(out, embeddings);
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

Mat load_embeddings(const std::string& path, std::uint64_t* graph_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  if (get<std::uint32_t>(in, path) != kEmbMagic) {
    throw std::runtime_error(fmt::format("'{}' is not an embedding file", path));
  }
  if (get<std::uint32_t>(in, path) != kVersion) {
    throw std::runtime_error(fmt::format("unsupported embedding version in '{}'", path));
  }
  auto fp = get<std::uint64_t>(in, path);
  if (graph_fingerprint) *graph_fingerprint = fp;
  return get_mat(in, path);
}

}  // namespace pathrec
