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

#include "pathrec/synth.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <tuple>

#include "pathrec/rng.hpp"

namespace pathrec {

namespace {

// File relation ids, fixed by emission order in relations.tsv.
enum FileRelation : int {
  kPurchase = 0,
  kMention = 1,
  kDescribe = 2,
  kLikes = 3,
  kProducedBy = 4,
  kAlsoBought = 5,
  kBrowsed = 6,
};

struct Builder {
  SyntheticData data;
  std::set<std::tuple<std::string, int, std::string>> edge_set;
  int next_word = 0;
  int next_brand = 0;
  int next_related = 0;

  std::string fresh(const char* prefix, int& counter, const std::string& type) {
    std::string token = fmt::format("{}{}", prefix, counter++);
    data.entities.emplace_back(token, type);
    return token;
  }

  bool add_edge(const std::string& h, int r, const std::string& t) {
    auto key = std::make_tuple(h, r, t);
    if (!edge_set.insert(key).second) return false;
    data.triples.emplace_back(h, r, t);
    return true;
  }
};

std::string pattern_string(int pattern) {
  switch (pattern) {
    case 0: return "mention,describe_inv";
    case 1: return "browsed,also_bought_inv";
    case 2: return "likes,produced_by_inv";
  }
  throw std::invalid_argument("unknown planted pattern");
}

}  // namespace

std::vector<std::vector<std::string>> planted_pattern_names(int num_patterns) {
  static const std::vector<std::vector<std::string>> all = {
      {"mention", "describe_inv"},
      {"browsed", "also_bought_inv"},
      {"likes", "produced_by_inv"},
  };
  if (num_patterns < 1 || num_patterns > 3) {
    throw std::invalid_argument("num_patterns must be in [1, 3]");
  }
  return {all.begin(), all.begin() + num_patterns};
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.users < 1 || spec.items < 2) {
    throw std::invalid_argument("need at least 1 user and 2 items");
  }
  if (spec.interactions_per_user < 2 ||
      spec.interactions_per_user > spec.items) {
    throw std::invalid_argument("interactions_per_user out of range");
  }
  if (spec.num_patterns < 1 || spec.num_patterns > 3) {
    throw std::invalid_argument("num_patterns must be in [1, 3]");
  }

  Rng rng(mix_seed(spec.seed, 0x5E17, 0x6E4));
  Builder b;

  std::vector<std::string> user_tok(spec.users), item_tok(spec.items);
  for (int u = 0; u < spec.users; ++u) {
    user_tok[u] = fmt::format("u{}", u);
    b.data.entities.emplace_back(user_tok[u], "user");
  }
  for (int i = 0; i < spec.items; ++i) {
    item_tok[i] = fmt::format("i{}", i);
    b.data.entities.emplace_back(item_tok[i], "item");
  }

  struct Plant {
    int user;
    int item;
    int pattern;
    bool is_test;
    bool backup;
  };

  for (int u = 0; u < spec.users; ++u) {
    // The user's interacted items, then a 70/30 train/test split.
    std::vector<int> pool(spec.items);
    for (int i = 0; i < spec.items; ++i) pool[i] = i;
    rng.shuffle(pool);
    int n = spec.interactions_per_user;
    int n_test = std::max(1, static_cast<int>(std::llround(spec.test_fraction * n)));
    if (n_test >= n) n_test = n - 1;
    int n_train = n - n_test;
    std::vector<int> train_items(pool.begin(), pool.begin() + n_train);
    std::vector<int> test_items(pool.begin() + n_train, pool.begin() + n);

    int dominant = u % spec.num_patterns;
    auto draw_pattern = [&]() {
      if (spec.num_patterns == 1 || rng.next_double() < spec.dominant_prob) {
        return dominant;
      }
      int other = static_cast<int>(rng.next_index(spec.num_patterns - 1));
      return other >= dominant ? other + 1 : other;
    };

    std::vector<Plant> plants;
    std::vector<int> train_pattern_count(spec.num_patterns, 0);
    for (int item : train_items) {
      int pattern = draw_pattern();
      ++train_pattern_count[pattern];
      plants.push_back(Plant{u, item, pattern, false, false});
    }
    // Backups go through the user's best-evidenced other pattern, so the
    // composed profile can actually fund the fallback route.
    auto backup_for = [&](int primary) {
      int best = (primary + 1) % spec.num_patterns;
      int best_count = -1;
      for (int j = 0; j < spec.num_patterns; ++j) {
        if (j == primary) continue;
        if (train_pattern_count[j] > best_count) {
          best_count = train_pattern_count[j];
          best = j;
        }
      }
      return best;
    };
    for (int item : test_items) {
      int primary = draw_pattern();
      plants.push_back(Plant{u, item, primary, true, false});
      if (spec.backup_plant_test && spec.num_patterns > 1 &&
          rng.next_double() < spec.backup_fraction) {
        plants.push_back(Plant{u, item, backup_for(primary), true, true});
      }
    }

    for (const Plant& plant : plants) {
      const std::string& iu = user_tok[plant.user];
      const std::string& ii = item_tok[plant.item];
      // One fresh connecting entity per pair: the planted route stays
      // unambiguous at its forced hop.
      if (plant.pattern == 0) {
        std::string w = b.fresh("w", b.next_word, "word");
        b.add_edge(iu, kMention, w);
        b.add_edge(ii, kDescribe, w);
      } else if (plant.pattern == 1) {
        std::string x = b.fresh("x", b.next_related, "related");
        b.add_edge(iu, kBrowsed, x);
        b.add_edge(ii, kAlsoBought, x);
      } else {
        std::string br = b.fresh("b", b.next_brand, "brand");
        b.add_edge(iu, kLikes, br);
        b.add_edge(ii, kProducedBy, br);
      }
      b.data.ground_truth.push_back(GroundTruthEntry{
          iu, ii, pattern_string(plant.pattern), plant.is_test ? "test" : "train",
          plant.backup ? "backup" : "primary"});
    }

    for (int item : train_items) b.data.train.emplace_back(user_tok[u], item_tok[item]);
    for (int item : test_items) b.data.test.emplace_back(user_tok[u], item_tok[item]);
  }

  b.data.planted_triples = b.data.triples.size();

  // Noise: exactly round(noise_rate * planted) distractor edges, each to a
  // fresh connecting entity. They compete for expansion slots without
  // fabricating cross-user shortcut patterns.
  struct NoiseRel {
    int rel;
    const std::vector<std::string>* heads;
    const char* prefix;
    int* counter;
    const char* type;
  };
  std::vector<NoiseRel> noise_rels = {
      {kMention, &user_tok, "w", &b.next_word, "word"},
      {kDescribe, &item_tok, "w", &b.next_word, "word"},
      {kLikes, &user_tok, "b", &b.next_brand, "brand"},
      {kProducedBy, &item_tok, "b", &b.next_brand, "brand"},
      {kAlsoBought, &item_tok, "x", &b.next_related, "related"},
      {kBrowsed, &user_tok, "x", &b.next_related, "related"},
  };
  std::size_t wanted = static_cast<std::size_t>(
      std::llround(spec.noise_rate * static_cast<double>(b.data.planted_triples)));
  for (std::size_t added = 0; added < wanted; ++added) {
    const NoiseRel& nr = noise_rels[rng.next_index(noise_rels.size())];
    const std::string& h = (*nr.heads)[rng.next_index(nr.heads->size())];
    b.add_edge(h, nr.rel, b.fresh(nr.prefix, *nr.counter, nr.type));
  }

  return b.data;
}

void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec,
                     const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir + "/" + name);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}/{}'", dir, name));
    return out;
  };

  {
    auto out = open("entities.tsv");
    for (const auto& [token, type] : data.entities) {
      out << token << '\t' << type << '\n';
    }
  }
  {
    auto out = open("relations.tsv");
    out << "0\tpurchase\tuser\titem\n"
        << "1\tmention\tuser\tword\n"
        << "2\tdescribe\titem\tword\n"
        << "3\tlikes\tuser\tbrand\n"
        << "4\tproduced_by\titem\tbrand\n"
        << "5\talso_bought\titem\trelated\n"
        << "6\tbrowsed\tuser\trelated\n";
  }
  {
    auto out = open("triples.tsv");
    for (const auto& [h, r, t] : data.triples) {
      out << h << '\t' << r << '\t' << t << '\n';
    }
  }
  {
    auto out = open("train.tsv");
    for (const auto& [u, i] : data.train) out << u << '\t' << i << '\n';
  }
  {
    auto out = open("test.tsv");
    for (const auto& [u, i] : data.test) out << u << '\t' << i << '\n';
  }
  {
    auto out = open("ground_truth.tsv");
    for (const auto& g : data.ground_truth) {
      out << g.user << '\t' << g.item << '\t' << g.pattern << '\t' << g.split
          << '\t' << g.role << '\n';
    }
  }
  {
    nlohmann::ordered_json j;
    j["users"] = spec.users;
    j["items"] = spec.items;
    j["interactions_per_user"] = spec.interactions_per_user;
    j["test_fraction"] = spec.test_fraction;
    j["num_patterns"] = spec.num_patterns;
    j["dominant_prob"] = spec.dominant_prob;
    j["noise_rate"] = spec.noise_rate;
    j["backup_plant_test"] = spec.backup_plant_test;
    j["backup_fraction"] = spec.backup_fraction;
    j["seed"] = spec.seed;
    auto out = open("synthetic.json");
    out << j.dump(2) << '\n';
  }
}

}  // namespace pathrec
