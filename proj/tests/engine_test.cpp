// Copyright 2026 The metaphor-forge Authors.
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

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "mf/engine.hpp"
#include "testing/oracles.hpp"

namespace mf {
namespace {

using testing::Row;
using testing::store_of;

constexpr double kTol = 1e-9;

const std::vector<Row> kFightRows{
    {"VN", {"fight", "poverty"}, 3},
    {"VN", {"fight", "terrorism"}, 6},
    {"VN", {"fight", "enemy"}, 1},
};

const std::vector<Row> kSourceRows{
    {"VN", {"fight", "poverty"}, 3},      {"VN", {"fight", "terrorism"}, 6},
    {"VN", {"fight", "crime"}, 1},        {"NPN", {"lift", "out_of", "poverty"}, 2},
    {"NPN", {"lift", "out_of", "slump"}, 2},
};

std::map<std::string, double> as_map(const std::vector<WeightedSource> &sources) {
  std::map<std::string, double> out;
  for (const auto &s : sources) out[s.lexeme] = s.weight;
  return out;
}

TEST(TupleWeight, SingleTuple) {
  Store s = store_of({{"VN", {"fight", "poverty"}, 7}});
  EXPECT_DOUBLE_EQ(tuple_weight("poverty", Tuple{"VN", {"fight", "poverty"}}, 1, s), 1.0);
}

TEST(TupleWeight, SharesOfThePattern) {
  Store s = store_of(kFightRows);
  // Oracle values, then the frozen expectations 3/10 and 6/10.
  EXPECT_NEAR(testing::oracle_tuple_weight(kFightRows, kFightRows[0], 1), 0.3, kTol);
  EXPECT_NEAR(testing::oracle_tuple_weight(kFightRows, kFightRows[1], 1), 0.6, kTol);
  EXPECT_NEAR(tuple_weight("poverty", Tuple{"VN", {"fight", "poverty"}}, 1, s), 0.3, kTol);
  EXPECT_NEAR(tuple_weight("terrorism", Tuple{"VN", {"fight", "terrorism"}}, 1, s), 0.6, kTol);
}

TEST(TupleWeight, ContractViolations) {
  Store s = store_of(kFightRows);
  EXPECT_THROW(tuple_weight("poverty", Tuple{"VN", {"fight", "wealth"}}, 1, s), ContractError);
  EXPECT_THROW(tuple_weight("poverty", Tuple{"VN", {"fight", "poverty"}}, 0, s), ContractError);
  EXPECT_THROW(tuple_weight("poverty", Tuple{"VN", {"fight", "poverty"}}, 5, s), ContractError);
}

TEST(SalientProperties, OrderAndTruncation) {
  Store s = store_of({{"VN", {"fight", "poverty"}, 3},
                      {"VN", {"fight", "crime"}, 3},
                      {"NV", {"poverty", "affect"}, 1},
                      {"AN", {"chronic", "poverty"}, 2},
                      {"AN", {"chronic", "disease"}, 2}});
  auto props = salient_properties("poverty", s, 10);
  ASSERT_EQ(props.size(), 3u);
  EXPECT_EQ(props[0].tuple.to_string(), "(NV poverty affect)");
  EXPECT_DOUBLE_EQ(props[0].weight, 1.0);
  // 0.5 each; the more frequent tuple first.
  EXPECT_EQ(props[1].tuple.to_string(), "(VN fight poverty)");
  EXPECT_EQ(props[2].tuple.to_string(), "(AN chronic poverty)");
  EXPECT_EQ(salient_properties("poverty", s, 1).size(), 1u);
  EXPECT_TRUE(salient_properties("wealth", s, 5).empty());
  EXPECT_THROW(salient_properties("poverty", s, 0), ContractError);
}

TEST(SalientProperties, SingleTupleHasWeightOne) {
  Store s = store_of(kFightRows);
  auto props = salient_properties("enemy", s, 5);
  ASSERT_EQ(props.size(), 1u);
  EXPECT_NEAR(props[0].weight, 0.1, kTol);
  Store t = store_of({{"NV", {"poverty", "affect"}, 4}});
  EXPECT_DOUBLE_EQ(salient_properties("poverty", t, 5).at(0).weight, 1.0);
}

TEST(GenerateSources, WorkedExample) {
  const auto oracle = testing::oracle_sources(kSourceRows, "poverty");
  ASSERT_EQ(oracle.size(), 3u);
  EXPECT_NEAR(oracle.at("terrorism"), 0.3, kTol);
  EXPECT_NEAR(oracle.at("crime"), 0.3, kTol);
  EXPECT_NEAR(oracle.at("slump"), 0.5, kTol);

  auto got = generate_sources("poverty", store_of(kSourceRows));
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].lexeme, "slump");
  EXPECT_NEAR(got[0].weight, 0.5, kTol);
  // Equal weights: terrorism has more support.
  EXPECT_EQ(got[1].lexeme, "terrorism");
  EXPECT_NEAR(got[1].weight, 0.3, kTol);
  EXPECT_EQ(got[2].lexeme, "crime");
  EXPECT_NEAR(got[2].weight, 0.3, kTol);
}

TEST(GenerateSources, TwoSharedPatternsAdd) {
  const std::vector<Row> rows{{"VN", {"fight", "poverty"}, 1}, {"VN", {"fight", "enemy"}, 3},
                              {"VN", {"defeat", "poverty"}, 1}, {"VN", {"defeat", "enemy"}, 1}};
  const auto oracle = testing::oracle_sources(rows, "poverty");
  EXPECT_NEAR(oracle.at("enemy"), 0.25 + 0.5, kTol);
  auto got = generate_sources("poverty", store_of(rows));
  ASSERT_EQ(got.size(), 1u);
  EXPECT_NEAR(got[0].weight, 0.75, kTol);
  ASSERT_EQ(got[0].evidence.size(), 2u);
  double sum = 0;
  for (const auto &e : got[0].evidence) sum += e.contribution;
  EXPECT_NEAR(sum, got[0].weight, kTol);
}

TEST(GenerateSources, NoSharedPatterns) {
  Store s = store_of({{"VN", {"fight", "poverty"}, 2}, {"VN", {"eat", "bread"}, 2}});
  EXPECT_TRUE(generate_sources("poverty", s).empty());
  EXPECT_TRUE(generate_sources("wealth", s).empty());
}

TEST(GenerateSources, OccupancyVariantScalesBySourceShare) {
  SourceOptions opts;
  opts.weight_by_source_occupancy = true;
  auto got = as_map(generate_sources("poverty", store_of(kSourceRows), opts));
  EXPECT_NEAR(got.at("terrorism"), 0.3 * 0.6, kTol);
  EXPECT_NEAR(got.at("crime"), 0.3 * 0.1, kTol);
  EXPECT_NEAR(got.at("slump"), 0.5 * 0.5, kTol);
}

TEST(EngineProperty, WeightsNormalizePerPattern) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 100; ++round) {
    auto rows = testing::random_rows(rng, 100, 30);
    Store s = store_of(rows);
    std::map<std::string, double> sums;
    for (const auto &r : rows) {
      Tuple t{r.label, r.slots};
      for (std::size_t i = 0; i < r.slots.size(); ++i) {
        sums[PatternKey::of(t, i).to_string() + "#" + std::to_string(i)] +=
            tuple_weight(r.slots[i], t, i, s);
      }
    }
    for (const auto &[key, sum] : sums) ASSERT_NEAR(sum, 1.0, kTol) << key;
  }
}

TEST(EngineProperty, SourcesMatchOracle) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 60; ++round) {
    auto rows = testing::random_rows(rng, 100, 30);
    Store s = store_of(rows);
    for (int w = 0; w < 30; w += 7) {
      const std::string target = "w" + std::to_string(w);
      auto oracle = testing::oracle_sources(rows, target);
      auto got = as_map(generate_sources(target, s));
      ASSERT_EQ(got.size(), oracle.size()) << target;
      for (const auto &[lex, weight] : oracle) {
        ASSERT_TRUE(got.count(lex)) << lex;
        ASSERT_NEAR(got[lex], weight, kTol) << lex;
      }
    }
  }
}

TEST(EngineProperty, ScaleInvariance) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 40; ++round) {
    auto rows = testing::random_rows(rng, 80, 12);
    auto scaled = rows;
    for (auto &r : scaled) r.freq *= 7;
    Store a = store_of(rows);
    Store b = store_of(scaled);
    for (int w = 0; w < 12; ++w) {
      const std::string target = "w" + std::to_string(w);
      auto pa = salient_properties(target, a, 1000);
      auto pb = salient_properties(target, b, 1000);
      ASSERT_EQ(pa.size(), pb.size());
      for (std::size_t i = 0; i < pa.size(); ++i) {
        ASSERT_EQ(pa[i].tuple, pb[i].tuple);
        ASSERT_NEAR(pa[i].weight, pb[i].weight, kTol);
      }
      auto sa = generate_sources(target, a);
      auto sb = generate_sources(target, b);
      ASSERT_EQ(sa.size(), sb.size());
      for (std::size_t i = 0; i < sa.size(); ++i) {
        ASSERT_EQ(sa[i].lexeme, sb[i].lexeme);
        ASSERT_NEAR(sa[i].weight, sb[i].weight, kTol);
      }
    }
  }
}

TopicMatrix matrix(std::size_t topics, const std::map<std::string, std::vector<double>> &rows) {
  TopicMatrix tm(topics);
  for (const auto &[w, p] : rows) tm.set(w, p);
  return tm;
}

TEST(Relatedness, HandMatrices) {
  TopicMatrix tm = matrix(2, {{"a", {1, 0}}, {"b", {0, 1}}, {"c", {0.5, 0.5}}, {"d", {0.2, 0.8}}});
  EXPECT_EQ(relatedness("a", "b", tm).value, 0.0);
  EXPECT_EQ(relatedness("c", "d", tm).value, 0.5 * 0.2 + 0.5 * 0.8);
  EXPECT_DOUBLE_EQ(relatedness("c", "d", tm).value, 0.5);
  EXPECT_EQ(relatedness("a", "a", tm).value, 1.0);
  auto oov = relatedness("a", "zzz", tm);
  EXPECT_TRUE(oov.out_of_vocabulary);
  EXPECT_EQ(oov.value, 0.0);
}

TEST(Relatedness, RandomMatrixProperties) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 20; ++round) {
    const std::size_t topics = 1 + rng() % 50;
    const std::size_t vocab = 2 + rng() % 99;
    std::vector<std::vector<double>> phi(vocab, std::vector<double>(topics));
    for (std::size_t t = 0; t < topics; ++t) {
      double sum = 0;
      for (auto &row : phi) sum += (row[t] = u(rng));
      for (auto &row : phi) row[t] /= sum;
    }
    TopicMatrix tm(topics);
    for (std::size_t w = 0; w < vocab; ++w) tm.set("w" + std::to_string(w), phi[w]);
    tm.check_normalized();
    for (std::size_t i = 0; i < vocab; i += 3) {
      for (std::size_t j = 0; j < vocab; j += 5) {
        const std::string a = "w" + std::to_string(i);
        const std::string b = "w" + std::to_string(j);
        double ab = relatedness(a, b, tm).value;
        EXPECT_NEAR(ab, relatedness(b, a, tm).value, kTol);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab * ab, relatedness(a, a, tm).value * relatedness(b, b, tm).value + kTol);
      }
    }
  }
}

TEST(TopicMatrixFile, LoadAndValidate) {
  std::istringstream good("T=2\na\t0.5\t1\nb\t0.5\t0\n");
  EXPECT_EQ(TopicMatrix::load(good).vocabulary_size(), 2u);
  std::istringstream unnormalized("T=2\na\t0.4\t1\nb\t0.5\t0\n");
  EXPECT_THROW(TopicMatrix::load(unnormalized), StructureError);
  std::istringstream negative("T=1\na\t-1\nb\t2\n");
  EXPECT_THROW(TopicMatrix::load(negative), FormatError);
  std::istringstream width("T=2\na\t1\n");
  EXPECT_THROW(TopicMatrix::load(width), FormatError);
  std::istringstream header("a\t1\n");
  EXPECT_THROW(TopicMatrix::load(header), FormatError);
}

std::vector<WeightedSource> sources(std::initializer_list<std::pair<const char *, double>> s) {
  std::vector<WeightedSource> out;
  for (auto [lex, w] : s) out.push_back({lex, w, 1, {}});
  return out;
}

TEST(FilterSources, Thresholds) {
  TopicMatrix tm = matrix(2, {{"poverty", {0.3, 0.0}},
                              {"corruption", {0.3, 0.0}},
                              {"enemy", {0.1, 0.5}},
                              {"trap", {0.3, 0.5}}});
  auto in = sources({{"corruption", 3}, {"enemy", 2}, {"oov", 1.5}, {"trap", 1}});
  auto names = [](const std::vector<WeightedSource> &v) {
    std::vector<std::string> out;
    for (const auto &s : v) out.push_back(s.lexeme);
    return out;
  };
  EXPECT_EQ(names(filter_sources(in, "poverty", tm, std::numeric_limits<double>::infinity())),
            (std::vector<std::string>{"corruption", "enemy", "oov", "trap"}));
  EXPECT_EQ(names(filter_sources(in, "poverty", tm, 0.0)), std::vector<std::string>{"oov"});
  // rel(poverty, corruption) = 0.09, rel(poverty, enemy) = 0.03.
  EXPECT_EQ(names(filter_sources(in, "poverty", tm, 0.04)),
            (std::vector<std::string>{"enemy", "oov"}));
  // Equality keeps the source.
  EXPECT_EQ(names(filter_sources(in, "poverty", tm, 0.09)),
            (std::vector<std::string>{"corruption", "enemy", "oov", "trap"}));
  EXPECT_THROW(filter_sources(in, "poverty", tm, -1.0), ContractError);
}

Taxonomy location_taxonomy() {
  std::istringstream in(R"([NODES]
wordnet_entity	class
wordnet_location	class
wordnet_enemy	class
[EDGES]
wordnet_location	wordnet_entity
wordnet_enemy	wordnet_entity
[LEXICON]
area	wordnet_location
room	wordnet_location
apartment	wordnet_location
city	wordnet_location
region	wordnet_location
enemy	wordnet_enemy
)");
  return Taxonomy::load(in);
}

std::vector<Row> location_rows() {
  std::vector<Row> rows;
  const std::vector<std::string> places{"area", "room", "apartment", "city", "region"};
  const std::vector<std::pair<std::string, std::string>> frames{
      {"live", "in"}, {"reside", "in"}, {"stay", "in"}, {"move", "to"}, {"sleep", "in"}};
  for (const auto &[v, p] : frames) {
    rows.push_back({"VPN", {v, p, "poverty"}, 2});
  }
  for (std::size_t i = 0; i < places.size(); ++i) {
    // Each place shares three of the five frames.
    for (std::size_t f = i; f < i + 3; ++f) {
      const auto &[v, p] = frames[f % frames.size()];
      rows.push_back({"VPN", {v, p, places[i]}, 1});
    }
  }
  rows.push_back({"VN", {"fight", "poverty"}, 1});
  rows.push_back({"VN", {"fight", "enemy"}, 1});
  return rows;
}

TEST(ClusterSources, LocationsFormOneConcept) {
  Store s = store_of(location_rows());
  auto srcs = generate_sources("poverty", s);
  auto concepts = cluster_sources(srcs, location_taxonomy(), "poverty", s, 5);
  // The root also covers the enemy, so its member set differs.
  ASSERT_EQ(concepts.size(), 2u);
  EXPECT_EQ(concepts[0].node, "wordnet_entity");
  EXPECT_EQ(concepts[0].members.size(), 6u);
  EXPECT_EQ(concepts[1].node, "wordnet_location");
  EXPECT_EQ(concepts[1].members.size(), 5u);
  EXPECT_EQ(concepts[1].shared_patterns.size(), 5u);
  // The enemy alone shares one pattern.
  EXPECT_EQ(cluster_sources(srcs, location_taxonomy(), "poverty", s, 6).size(), 1u);
}

TEST(ClusterSources, MostSpecificNodeForEqualMembers) {
  auto rows = location_rows();
  rows.pop_back();  // drop the enemy; entity and location now have equal members
  Store s = store_of(rows);
  auto concepts =
      cluster_sources(generate_sources("poverty", s), location_taxonomy(), "poverty", s, 5);
  ASSERT_EQ(concepts.size(), 1u);
  EXPECT_EQ(concepts[0].node, "wordnet_location");
}

TEST(ClusterSources, WeightIsMemberSum) {
  Store s = store_of(location_rows());
  auto srcs = generate_sources("poverty", s);
  for (std::size_t k = 1; k <= 6; ++k) {
    for (const auto &c : cluster_sources(srcs, location_taxonomy(), "poverty", s, k)) {
      double sum = 0;
      for (const auto &m : c.members) sum += m.weight;
      EXPECT_EQ(c.weight, sum);
      EXPECT_GE(c.shared_patterns.size(), k);
    }
  }
  auto pair = sources({{"area", 0.3}, {"room", 0.5}});
  pair[0].evidence = {{parse_pattern("(VPN live in _)"), 0.3, 1}};
  pair[1].evidence = {{parse_pattern("(VPN stay in _)"), 0.5, 1}};
  auto concepts = cluster_sources(pair, location_taxonomy(), "poverty", s, 2);
  ASSERT_EQ(concepts.size(), 1u);
  EXPECT_NEAR(concepts[0].weight, 0.8, kTol);
}

TEST(ClusterSources, UnclassifiedSourcesNeverCluster) {
  Store s = store_of({{"VN", {"fight", "poverty"}, 1}, {"VN", {"fight", "zeppelin"}, 1}});
  EXPECT_TRUE(
      cluster_sources(generate_sources("poverty", s), location_taxonomy(), "poverty", s, 1)
          .empty());
  EXPECT_THROW(cluster_sources({}, location_taxonomy(), "poverty", s, 0), ContractError);
}

TEST(BuildCms, Truncation) {
  EXPECT_TRUE(build_cms({"poverty"}, {}, 10).empty());
  SourceConcept a{"a", {}, {parse_pattern("(VN fight _)")}, 0.8, 1};
  SourceConcept b{"b", {}, {parse_pattern("(VN defeat _)")}, 0.5, 1};
  auto cms = build_cms({"poverty"}, {a, b}, 1);
  ASSERT_EQ(cms.size(), 1u);
  EXPECT_EQ(cms[0].source.node, "a");
  EXPECT_EQ(cms[0].weight, 0.8);
  EXPECT_EQ(cms[0].properties.size(), 1u);
}

TEST(Patterns, ParseRoundTrip) {
  for (std::string text : {"(VN fight _)", "(NVPN majority live in _)", "(AN _ poverty)"}) {
    EXPECT_EQ(parse_pattern(text).to_string(), text);
  }
  EXPECT_THROW(parse_pattern("(VN fight poverty)"), FormatError);
  EXPECT_THROW(parse_pattern("VN fight _"), FormatError);
  EXPECT_THROW(parse_pattern("(VN _ _)"), FormatError);
}

}  // namespace
}  // namespace mf
