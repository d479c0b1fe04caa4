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

// Pipeline configuration: a flat "key = value" file, '#' comments. Relative
// paths are resolved against the directory holding the config file.

#ifndef MF_CONFIG_HPP_
#define MF_CONFIG_HPP_

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mf/common.hpp"
#include "mf/generalization.hpp"

namespace mf {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string &field, const std::string &what)
      : std::runtime_error(field + ": " + what), field_(field) {}

  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

struct PipelineConfig {
  // Inputs.
  std::string corpus;
  std::string taxonomy;
  std::string topics;
  std::string expansion;
  std::string rules;  // empty: built-in rule set
  std::string gold;
  std::vector<Lexeme> targets;

  // Stage artifacts.
  std::string store = "store.tsv";
  std::string generalized_store = "store.generalized.tsv";
  std::string properties_out = "properties.tsv";
  std::string sources_out = "sources.tsv";
  std::string cms_out = "cms.jsonl";
  std::string hits_out = "hits.jsonl";
  std::string report_out = "gold_report.txt";

  // Parameters.
  std::uint64_t min_freq = 1;
  double threshold = 0.04;
  std::size_t k = 5;
  std::size_t topic_count = 50;
  std::size_t top_sources = 100;
  std::size_t top_cms = 10;
  std::size_t top_properties = 20;
  std::size_t top_patterns = 3;
  std::size_t per_pair = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  bool generalize = true;
  AmbiguityMode ambiguity = AmbiguityMode::kCopy;
  bool source_occupancy = false;

  // Throws ConfigError naming the offending field.
  void validate() const {
    auto positive = [](const char *field, auto value) {
      if (value == 0) throw ConfigError(field, "must be > 0");
    };
    positive("min_freq", min_freq);
    positive("k", k);
    positive("topic_count", topic_count);
    positive("top_sources", top_sources);
    positive("top_cms", top_cms);
    positive("top_properties", top_properties);
    positive("top_patterns", top_patterns);
    positive("per_pair", per_pair);
    positive("seed", seed);
    positive("threads", threads);
    if (!(threshold >= 0.0)) throw ConfigError("threshold", "must be >= 0");
  }
};

namespace detail {

inline std::uint64_t config_uint(const std::string &key, const std::string &value) {
  char *end = nullptr;
  errno = 0;
  if (value.empty() || value[0] == '-') throw ConfigError(key, "expected a positive integer");
  unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (*end != '\0' || errno != 0) throw ConfigError(key, "expected a positive integer");
  return v;
}

inline double config_double(const std::string &key, const std::string &value) {
  char *end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0') throw ConfigError(key, "expected a number");
  return v;
}

inline bool config_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ConfigError(key, "expected true or false");
}

}  // namespace detail

// Applies one key/value pair. Unknown keys are errors.
inline void set_config_value(PipelineConfig &cfg, const std::string &key,
                             const std::string &value, const std::filesystem::path &base = {}) {
  auto path = [&](std::string &field) {
    if (value.empty()) {
      field.clear();
      return;
    }
    std::filesystem::path p(value);
    field = (p.is_relative() && !base.empty() ? base / p : p).string();
  };
  using detail::config_bool;
  using detail::config_double;
  using detail::config_uint;

  if (key == "corpus") path(cfg.corpus);
  else if (key == "taxonomy") path(cfg.taxonomy);
  else if (key == "topics") path(cfg.topics);
  else if (key == "expansion") path(cfg.expansion);
  else if (key == "rules") path(cfg.rules);
  else if (key == "gold") path(cfg.gold);
  else if (key == "store") path(cfg.store);
  else if (key == "generalized_store") path(cfg.generalized_store);
  else if (key == "properties_out") path(cfg.properties_out);
  else if (key == "sources_out") path(cfg.sources_out);
  else if (key == "cms_out") path(cfg.cms_out);
  else if (key == "hits_out") path(cfg.hits_out);
  else if (key == "report_out") path(cfg.report_out);
  else if (key == "targets") {
    cfg.targets.clear();
    for (const auto &t : split(value, ',')) {
      auto w = trim(t);
      if (!w.empty()) cfg.targets.push_back(ascii_lower(w));
    }
  } else if (key == "min_freq") cfg.min_freq = config_uint(key, value);
  else if (key == "threshold") cfg.threshold = config_double(key, value);
  else if (key == "k") cfg.k = config_uint(key, value);
  else if (key == "topic_count") cfg.topic_count = config_uint(key, value);
  else if (key == "top_sources") cfg.top_sources = config_uint(key, value);
  else if (key == "top_cms") cfg.top_cms = config_uint(key, value);
  else if (key == "top_properties") cfg.top_properties = config_uint(key, value);
  else if (key == "top_patterns") cfg.top_patterns = config_uint(key, value);
  else if (key == "per_pair") cfg.per_pair = config_uint(key, value);
  else if (key == "seed") cfg.seed = config_uint(key, value);
  else if (key == "threads") cfg.threads = static_cast<unsigned>(config_uint(key, value));
  else if (key == "generalize") cfg.generalize = config_bool(key, value);
  else if (key == "source_occupancy") cfg.source_occupancy = config_bool(key, value);
  else if (key == "ambiguity") {
    if (value == "copy") cfg.ambiguity = AmbiguityMode::kCopy;
    else if (value == "split") cfg.ambiguity = AmbiguityMode::kSplit;
    else throw ConfigError(key, "expected copy or split");
  } else {
    throw ConfigError(key, "unknown key");
  }
}

inline PipelineConfig parse_config(std::istream &in, const std::filesystem::path &base = {}) {
  PipelineConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    auto view = trim(line);
    if (view.empty() || view[0] == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) throw FormatError("expected key = value", lineno);
    std::string key(trim(view.substr(0, eq)));
    std::string value(trim(view.substr(eq + 1)));
    if (key.empty()) throw FormatError("empty key", lineno);
    set_config_value(cfg, key, value, base);
  }
  return cfg;
}

inline PipelineConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file: " + path);
  return parse_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace mf

#endif  // MF_CONFIG_HPP_
