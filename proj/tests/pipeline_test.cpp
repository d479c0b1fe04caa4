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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <unistd.h>

#include "mf/pipeline.hpp"
#include "testing/sentences.hpp"

namespace mf {
namespace {

namespace fs = std::filesystem;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("mf_pipeline_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string &name) const { return (dir_ / name).string(); }

  // The poverty fixture config with every artifact redirected into dir_.
  PipelineConfig poverty() const {
    PipelineConfig cfg = load_config_file(testing::data_path("poverty/pipeline.conf"));
    cfg.store = out("store.tsv");
    cfg.generalized_store = out("store.generalized.tsv");
    cfg.properties_out = out("properties.tsv");
    cfg.sources_out = out("sources.tsv");
    cfg.cms_out = out("cms.jsonl");
    cfg.hits_out = out("hits.jsonl");
    cfg.report_out = out("report.txt");
    return cfg;
  }

  static std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::size_t lines(const std::string &path) {
    std::ifstream in(path);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) n += !line.empty();
    return n;
  }

  fs::path dir_;
};

TEST(Config, ParsesAndResolvesPaths) {
  std::istringstream in(
      "# comment\ncorpus = c.conllu\nthreshold = 0.1\nk=3\ntargets = Poverty, wealth\n"
      "generalize = off\nambiguity = split\n");
  PipelineConfig cfg = parse_config(in, "/base");
  EXPECT_EQ(cfg.corpus, "/base/c.conllu");
  EXPECT_DOUBLE_EQ(cfg.threshold, 0.1);
  EXPECT_EQ(cfg.k, 3u);
  EXPECT_EQ(cfg.targets, (std::vector<Lexeme>{"poverty", "wealth"}));
  EXPECT_FALSE(cfg.generalize);
  EXPECT_EQ(cfg.ambiguity, AmbiguityMode::kSplit);
}

TEST(Config, Defaults) {
  PipelineConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.threshold, 0.04);
  EXPECT_EQ(cfg.k, 5u);
  EXPECT_EQ(cfg.topic_count, 50u);
  EXPECT_EQ(cfg.top_sources, 100u);
  EXPECT_EQ(cfg.top_cms, 10u);
  EXPECT_EQ(cfg.per_pair, 10u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ViolationsNameTheField) {
  auto field_of = [](const std::string &text) -> std::string {
    try {
      std::istringstream in(text);
      parse_config(in).validate();
    } catch (const ConfigError &e) {
      return e.field();
    }
    return "";
  };
  EXPECT_EQ(field_of("k = 0\n"), "k");
  EXPECT_EQ(field_of("top_cms = 0\n"), "top_cms");
  EXPECT_EQ(field_of("per_pair = -3\n"), "per_pair");
  EXPECT_EQ(field_of("threshold = -0.5\n"), "threshold");
  EXPECT_EQ(field_of("threshold = abc\n"), "threshold");
  EXPECT_EQ(field_of("generalize = maybe\n"), "generalize");
  EXPECT_EQ(field_of("colour = blue\n"), "colour");
  std::istringstream no_eq("just words\n");
  EXPECT_THROW(parse_config(no_eq), FormatError);
}

TEST_F(PipelineTest, MissingInputNamesThePath) {
  PipelineConfig cfg = poverty();
  cfg.corpus = out("nope.conllu");
  try {
    run_extract(cfg);
    FAIL() << "expected MissingFileError";
  } catch (const MissingFileError &e) {
    EXPECT_NE(std::string(e.what()).find("nope.conllu"), std::string::npos);
  }
}

TEST_F(PipelineTest, ExtractJohnGivesSixEntries) {
  PipelineConfig cfg;
  cfg.corpus = testing::data_path("john.conllu");
  cfg.store = out("john.tsv");
  auto summary = run_extract(cfg);
  EXPECT_EQ(summary.tuples, 6u);
  EXPECT_EQ(lines(cfg.store), 6u);
}

TEST_F(PipelineTest, StagesAreByteIdenticalOnRerun) {
  PipelineConfig cfg = poverty();
  std::ostringstream log;
  run_extract(cfg);
  run_generalize(cfg);
  run_properties(cfg, log);
  run_sources(cfg, log);
  run_cms(cfg, log);
  run_find_lms(cfg, log);
  std::map<std::string, std::string> first;
  for (const auto &p : fs::directory_iterator(dir_)) first[p.path().string()] = slurp(p.path());
  ASSERT_EQ(first.size(), 6u);

  cfg.threads = 3;
  run_extract(cfg);
  run_generalize(cfg);
  run_properties(cfg, log);
  run_sources(cfg, log);
  run_cms(cfg, log);
  run_find_lms(cfg, log);
  for (const auto &[path, bytes] : first) EXPECT_EQ(slurp(path), bytes) << path;
}

TEST_F(PipelineTest, CmsRespectTopCms) {
  PipelineConfig cfg = poverty();
  std::ostringstream log;
  run_extract(cfg);
  EXPECT_LE(run_cms(cfg, log), 10u);
  EXPECT_LE(lines(cfg.cms_out), 10u);
  cfg.top_cms = 2;
  EXPECT_EQ(run_cms(cfg, log), 2u);
  EXPECT_EQ(lines(cfg.cms_out), 2u);
}

TEST_F(PipelineTest, UnknownSeedWarns) {
  PipelineConfig cfg = poverty();
  std::ostringstream log;
  run_extract(cfg);
  cfg.targets = {"zeppelin"};
  EXPECT_EQ(run_properties(cfg, log), 0u);
  EXPECT_NE(log.str().find("zeppelin"), std::string::npos);
  EXPECT_EQ(lines(cfg.properties_out), 0u);
}

TEST_F(PipelineTest, TopicCountMustMatchMatrix) {
  PipelineConfig cfg = poverty();
  cfg.topic_count = 20;
  EXPECT_THROW(load_topics(cfg), ConfigError);
}

TEST_F(PipelineTest, GeneralizedStoreIsUsedWhenEnabled) {
  PipelineConfig cfg = poverty();
  run_extract(cfg);
  cfg.generalize = true;
  EXPECT_THROW(load_query_store(cfg), MissingFileError);
  run_generalize(cfg);
  Store g = load_query_store(cfg);
  EXPECT_GT(g.frequency(Tuple{"VN", {"fight", "wordnet_enemy"}}), 0u);
}

TEST(Gold, ParseFile) {
  std::istringstream in("# c\nWar->Illness\tT\twar\nWar->Illness\tS\tDisease\nX\tT\ta\n");
  auto gold = parse_gold(in);
  ASSERT_EQ(gold.size(), 2u);
  EXPECT_EQ(gold[0].name, "War->Illness");
  EXPECT_EQ(gold[0].source_seeds, std::set<Lexeme>{"disease"});
  std::istringstream bad("a\tQ\tb\n");
  EXPECT_THROW(parse_gold(bad), FormatError);
}

TEST(Gold, ScalingAndVerdicts) {
  Store s;
  s.add(Tuple{"VN", {"heal", "attack"}}, 2);
  s.add(Tuple{"VN", {"heal", "treatment"}}, 2);
  s.add(Tuple{"VN", {"plan", "defeat"}}, 4);
  s.add(Tuple{"VN", {"plan", "disease"}}, 1);
  s.add(Tuple{"VN", {"fix", "machine"}}, 1);
  s.freeze();
  std::vector<GoldMapping> gold{
      {"War->Illness", {"attack", "defeat"}, {"treatment", "disease"}},
      {"Machines->People", {"machine"}, {"people"}},
      {"Empty", {"war"}, {}},
  };
  PipelineConfig cfg;
  std::ostringstream log;
  GoldReport r = eval_gold(gold, s, {}, nullptr, cfg, log);
  EXPECT_EQ(r.summary(), "found 1 of 2");
  EXPECT_TRUE(r.results[2].skipped);
  ASSERT_EQ(r.results[0].pairs.size(), 2u);
  double lo = 1, hi = 0;
  for (const auto &p : r.results[0].pairs) {
    lo = std::min(lo, p.scaled);
    hi = std::max(hi, p.scaled);
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
  std::ostringstream report;
  write_gold_report(r, report);
  EXPECT_NE(report.str().find("Machines->People\tnone"), std::string::npos);
  EXPECT_NE(report.str().find("attack->treatment (0.00)"), std::string::npos);
  EXPECT_NE(report.str().find("defeat->disease (1.00)"), std::string::npos);
}

TEST_F(PipelineTest, GoldFixtureFindsTenOfThirteen) {
  PipelineConfig cfg = load_config_file(testing::data_path("gold/pipeline.conf"));
  cfg.report_out = out("report.txt");
  std::ostringstream shown;
  std::ostringstream log;
  GoldReport r = run_eval_gold(cfg, shown, log);
  EXPECT_EQ(r.summary(), "found 10 of 13");
  EXPECT_EQ(slurp(cfg.report_out), shown.str());
  for (const auto &res : r.results) {
    for (const auto &p : res.pairs) {
      EXPECT_GE(p.scaled, 0.0);
      EXPECT_LE(p.scaled, 1.0);
    }
  }
}

}  // namespace
}  // namespace mf
