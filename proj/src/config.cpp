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

#include "pathrec/config.hpp"

#include <fmt/core.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pathrec {

using json = nlohmann::ordered_json;

namespace {

struct Field {
  const char* name;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
#define PATHREC_FIELD(member)                                        \
  Field{#member, [](const RunConfig& c) { return json(c.member); },  \
        [](RunConfig& c, const json& v) { v.get_to(c.member); }}
      PATHREC_FIELD(dim),
      PATHREC_FIELD(hidden),
      PATHREC_FIELD(max_length),
      PATHREC_FIELD(max_patterns),
      PATHREC_FIELD(budget),
      PATHREC_FIELD(lambda),
      PATHREC_FIELD(learning_rate),
      PATHREC_FIELD(batch_size),
      PATHREC_FIELD(epochs),
      PATHREC_FIELD(negatives),
      PATHREC_FIELD(walks_per_pair),
      PATHREC_FIELD(per_user_cap),
      PATHREC_FIELD(prominence_cap),
      PATHREC_FIELD(bound_cap),
      PATHREC_FIELD(pretrain_epochs),
      PATHREC_FIELD(pretrain_lr),
      PATHREC_FIELD(pretrain_margin),
      PATHREC_FIELD(use_pretrain),
      PATHREC_FIELD(rank_log_sigmoid),
      PATHREC_FIELD(top_n),
      PATHREC_FIELD(threads),
      PATHREC_FIELD(seed),
      PATHREC_FIELD(variant),
#undef PATHREC_FIELD
  };
  return f;
}

json parse_env_value(const std::string& text) {
  // Numbers and booleans parse as JSON scalars; anything else is a string.
  json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded() &&
      (parsed.is_number() || parsed.is_boolean())) {
    return parsed;
  }
  return json(text);
}

}  // namespace

std::string RunConfig::to_json() const {
  json j;
  for (const Field& f : fields()) j[f.name] = f.get(*this);
  return j.dump(2) + "\n";
}

void RunConfig::apply_json(const std::string& json_text) {
  json j = json::parse(json_text);
  for (const Field& f : fields()) {
    if (j.contains(f.name)) {
      try {
        f.set(*this, j.at(f.name));
      } catch (const json::exception& e) {
        throw std::runtime_error(
            fmt::format("config field '{}': {}", f.name, e.what()));
      }
    }
  }
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  c.apply_json(ss.str());
  return c;
}

void RunConfig::apply_env() {
  for (const Field& f : fields()) {
    std::string var = "PATHREC_";
    for (const char* p = f.name; *p; ++p) {
      var += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    }
    if (const char* value = std::getenv(var.c_str())) {
      try {
        f.set(*this, parse_env_value(value));
      } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("env {}: {}", var, e.what()));
      }
    }
  }
}

std::uint64_t RunConfig::hash() const {
  Fnv1a f;
  f.add_string(to_json());
  return f.value();
}

}  // namespace pathrec
