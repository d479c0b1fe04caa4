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

// mf: conceptual metaphor pipeline driver.
//
//   mf <subcommand> --config <path> [--threshold F] [--k N] [--top-sources N]
//      [--top-cms N] [--seed N] [--no-generalize] [--set key=value ...]
//
// Exit codes: 0 success, 1 input or runtime error, 2 usage or config error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mf/pipeline.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

int run(const std::string &subcommand, const mf::PipelineConfig &cfg) {
  if (subcommand == "extract") {
    auto s = mf::run_extract(cfg);
    std::cerr << "extract: " << s.sentences << " sentences, " << s.tuples << " tuples, "
              << s.occurrences << " occurrences -> " << cfg.store << "\n";
  } else if (subcommand == "generalize") {
    auto n = mf::run_generalize(cfg);
    std::cerr << "generalize: " << n << " tuples -> " << cfg.generalized_store << "\n";
  } else if (subcommand == "properties") {
    auto n = mf::run_properties(cfg, std::cerr);
    std::cerr << "properties: " << n << " rows -> " << cfg.properties_out << "\n";
  } else if (subcommand == "sources") {
    auto n = mf::run_sources(cfg, std::cerr);
    std::cerr << "sources: " << n << " rows -> " << cfg.sources_out << "\n";
  } else if (subcommand == "cms") {
    auto n = mf::run_cms(cfg, std::cerr);
    std::cerr << "cms: " << n << " metaphors -> " << cfg.cms_out << "\n";
  } else if (subcommand == "find-lms") {
    auto n = mf::run_find_lms(cfg, std::cerr);
    std::cerr << "find-lms: " << n << " hits -> " << cfg.hits_out << "\n";
  } else if (subcommand == "eval-gold") {
    mf::run_eval_gold(cfg, std::cout, std::cerr);
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Conceptual metaphor generation from proposition stores"};
  app.set_version_flag("--version", "mf 0.1.0");

  std::string subcommand;
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("subcommand", subcommand, "Pipeline stage")
      ->required()
      ->check(CLI::IsMember({"extract", "generalize", "properties", "sources", "cms",
                             "find-lms", "eval-gold"}));
  app.add_option("--config", config_path, "Pipeline config file (key = value)")->required();

  double threshold = 0;
  std::size_t k = 0, top_sources = 0, top_cms = 0, per_pair = 0, min_freq = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  auto *o_threshold = app.add_option("--threshold", threshold, "Relatedness filter threshold");
  auto *o_k = app.add_option("--k", k, "Minimum shared patterns per source concept");
  auto *o_top_sources = app.add_option("--top-sources", top_sources, "Sources kept per target");
  auto *o_top_cms = app.add_option("--top-cms", top_cms, "Metaphors kept per target");
  auto *o_per_pair = app.add_option("--per-pair", per_pair, "Sampled sentences per domain pair");
  auto *o_min_freq = app.add_option("--min-freq", min_freq, "Store frequency floor");
  auto *o_seed = app.add_option("--seed", seed, "Sampling seed");
  auto *o_threads = app.add_option("--threads", threads, "Worker threads");
  bool no_generalize = false;
  app.add_flag("--no-generalize", no_generalize, "Query the raw store instead of the generalized one");
  app.add_option("--set", overrides, "Override any config key (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  mf::PipelineConfig cfg;
  try {
    cfg = mf::load_config_file(config_path);
    for (const auto &kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw mf::ConfigError(kv, "expected key=value");
      mf::set_config_value(cfg, std::string(mf::trim(kv.substr(0, eq))),
                           std::string(mf::trim(kv.substr(eq + 1))));
    }
    if (*o_threshold) cfg.threshold = threshold;
    if (*o_k) cfg.k = k;
    if (*o_top_sources) cfg.top_sources = top_sources;
    if (*o_top_cms) cfg.top_cms = top_cms;
    if (*o_per_pair) cfg.per_pair = per_pair;
    if (*o_min_freq) cfg.min_freq = min_freq;
    if (*o_seed) cfg.seed = seed;
    if (*o_threads) cfg.threads = threads;
    if (no_generalize) cfg.generalize = false;
    cfg.validate();
  } catch (const mf::ConfigError &e) {
    std::cerr << "mf: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mf::FormatError &e) {
    std::cerr << "mf: " << config_path << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "mf: " << e.what() << "\n";
    return kExitError;
  }

  try {
    return run(subcommand, cfg);
  } catch (const mf::ConfigError &e) {
    std::cerr << "mf: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "mf " << subcommand << ": " << e.what() << "\n";
    return kExitError;
  }
}
