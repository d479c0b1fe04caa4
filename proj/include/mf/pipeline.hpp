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

// Pipeline stages. Each stage reads the artifacts of its predecessors from
// disk and writes its own:
//
//   extract      corpus               -> store
//   generalize   store, taxonomy      -> generalized store
//   properties   store                -> properties TSV
//   sources      store, topics        -> sources TSV
//   cms          store, topics, tax   -> metaphors JSONL
//   find-lms     metaphors, corpus    -> hits JSONL
//   eval-gold    gold list, store     -> report
//
// Warnings go to the `log` stream; errors are thrown.

#ifndef MF_PIPELINE_HPP_
#define MF_PIPELINE_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "mf/config.hpp"
#include "mf/conllu.hpp"
#include "mf/engine.hpp"
#include "mf/extraction.hpp"
#include "mf/generalization.hpp"
#include "mf/lm_finder.hpp"
#include "mf/store.hpp"
#include "mf/taxonomy.hpp"
#include "mf/topics.hpp"

namespace mf {

class MissingFileError : public std::runtime_error {
 public:
  MissingFileError(const std::string &field, const std::string &path)
      : std::runtime_error(path.empty() ? "no path configured for " + field
                                        : "missing file: " + path + " (" + field + ")"),
        path_(path) {}

  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline void require_file(const std::string &field, const std::string &path) {
  if (path.empty() || !std::filesystem::is_regular_file(path)) {
    throw MissingFileError(field, path);
  }
}

inline std::ofstream open_output(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

inline std::string format_weight(double w) {
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed << w;
  return os.str();
}

}  // namespace detail

inline std::vector<Sentence> load_corpus(const std::string &path) {
  detail::require_file("corpus", path);
  std::ifstream in(path, std::ios::binary);
  std::istringstream text(detail::read_maybe_gzip(in));
  return parse_conllu(text);
}

inline RuleSet load_rule_set(const PipelineConfig &cfg) {
  if (cfg.rules.empty()) return default_rules();
  detail::require_file("rules", cfg.rules);
  return load_rules_file(cfg.rules);
}

// The frozen store the query stages work on: the generalized one when
// generalization is enabled, the raw one otherwise.
inline Store load_query_store(const PipelineConfig &cfg) {
  const std::string &path = cfg.generalize ? cfg.generalized_store : cfg.store;
  detail::require_file(cfg.generalize ? "generalized_store" : "store", path);
  Store store = Store::load_file(path);
  store.freeze(cfg.min_freq);
  return store;
}

inline std::optional<TopicMatrix> load_topics(const PipelineConfig &cfg) {
  if (cfg.topics.empty()) return std::nullopt;
  detail::require_file("topics", cfg.topics);
  TopicMatrix tm = TopicMatrix::load_file(cfg.topics);
  if (tm.topics() != cfg.topic_count) {
    throw ConfigError("topic_count", "configured " + std::to_string(cfg.topic_count) +
                                         " topics, matrix has " + std::to_string(tm.topics()));
  }
  return tm;
}

inline ExpansionTable load_expansion(const PipelineConfig &cfg) {
  if (cfg.expansion.empty()) return {};
  detail::require_file("expansion", cfg.expansion);
  return ExpansionTable::load_file(cfg.expansion);
}

// Generated, relatedness-filtered and truncated sources for one target.
inline std::vector<WeightedSource> ranked_sources(const Lexeme &target, const Store &store,
                                                  const TopicMatrix *tm,
                                                  const PipelineConfig &cfg) {
  SourceOptions opts;
  opts.weight_by_source_occupancy = cfg.source_occupancy;
  auto sources = generate_sources(target, store, opts);
  if (tm) sources = filter_sources(sources, target, *tm, cfg.threshold);
  if (sources.size() > cfg.top_sources) sources.resize(cfg.top_sources);
  return sources;
}

struct ExtractSummary {
  std::size_t sentences = 0;
  std::size_t tuples = 0;
  std::uint64_t occurrences = 0;
};

inline ExtractSummary run_extract(const PipelineConfig &cfg) {
  auto sentences = load_corpus(cfg.corpus);
  RuleSet rules = load_rule_set(cfg);
  Store store = build_store(sentences, rules, cfg.threads);
  store.save_file(cfg.store);
  return {sentences.size(), store.size(), store.total_frequency()};
}

inline std::size_t run_generalize(const PipelineConfig &cfg) {
  detail::require_file("store", cfg.store);
  detail::require_file("taxonomy", cfg.taxonomy);
  Store store = Store::load_file(cfg.store);
  store.freeze(cfg.min_freq);
  Taxonomy tax = Taxonomy::load_file(cfg.taxonomy);
  Store general = generalize_store(store, tax, {cfg.ambiguity});
  general.save_file(cfg.generalized_store);
  return general.size();
}

inline std::size_t run_properties(const PipelineConfig &cfg, std::ostream &log) {
  Store store = load_query_store(cfg);
  auto out = detail::open_output(cfg.properties_out);
  std::size_t rows = 0;
  for (const auto &target : cfg.targets) {
    auto props = salient_properties(target, store, cfg.top_properties);
    if (props.empty()) log << "warning: no tuples contain '" << target << "'\n";
    for (std::size_t r = 0; r < props.size(); ++r) {
      const auto &p = props[r];
      out << target << '\t' << r + 1 << '\t' << detail::format_weight(p.weight) << '\t'
          << p.frequency << '\t' << p.position << '\t' << p.tuple.to_string() << '\n';
      ++rows;
    }
  }
  return rows;
}

inline std::size_t run_sources(const PipelineConfig &cfg, std::ostream &log) {
  Store store = load_query_store(cfg);
  auto tm = load_topics(cfg);
  auto out = detail::open_output(cfg.sources_out);
  std::size_t rows = 0;
  for (const auto &target : cfg.targets) {
    auto sources = ranked_sources(target, store, tm ? &*tm : nullptr, cfg);
    if (sources.empty()) log << "warning: no sources for '" << target << "'\n";
    for (std::size_t r = 0; r < sources.size(); ++r) {
      const auto &s = sources[r];
      out << target << '\t' << r + 1 << '\t' << s.lexeme << '\t'
          << detail::format_weight(s.weight) << '\t' << s.support << '\t'
          << s.evidence.size() << '\n';
      ++rows;
    }
  }
  return rows;
}

// Metaphors for every configured target, best first within each target.
inline std::vector<ConceptualMetaphor> generate_cms(const PipelineConfig &cfg, const Store &store,
                                                    const Taxonomy &tax, const TopicMatrix *tm,
                                                    std::ostream &log) {
  std::vector<ConceptualMetaphor> all;
  for (const auto &target : cfg.targets) {
    auto sources = ranked_sources(target, store, tm, cfg);
    auto concepts = cluster_sources(sources, tax, target, store, cfg.k);
    auto cms = build_cms({target}, concepts, cfg.top_cms);
    if (cms.empty()) log << "warning: no metaphors for '" << target << "'\n";
    all.insert(all.end(), cms.begin(), cms.end());
  }
  return all;
}

inline std::size_t run_cms(const PipelineConfig &cfg, std::ostream &log) {
  Store store = load_query_store(cfg);
  auto tm = load_topics(cfg);
  detail::require_file("taxonomy", cfg.taxonomy);
  Taxonomy tax = Taxonomy::load_file(cfg.taxonomy);
  auto cms = generate_cms(cfg, store, tax, tm ? &*tm : nullptr, log);
  auto out = detail::open_output(cfg.cms_out);
  for (const auto &cm : cms) out << to_json(cm).dump() << '\n';
  return cms.size();
}

struct CmRecord {
  std::vector<Lexeme> target;
  std::string source_node;
  std::vector<Lexeme> members;
};

inline std::vector<CmRecord> load_cm_records(const std::string &path) {
  detail::require_file("cms_out", path);
  std::ifstream in(path);
  std::vector<CmRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      CmRecord r;
      j.at("target").get_to(r.target);
      j.at("source_node").get_to(r.source_node);
      j.at("members").get_to(r.members);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception &e) {
      throw FormatError(path + ": " + e.what(), lineno);
    }
  }
  return out;
}

inline CmRecord to_record(const ConceptualMetaphor &cm) {
  CmRecord r{cm.target, cm.source.node, {}};
  for (const auto &m : cm.source.members) r.members.push_back(m.lexeme);
  return r;
}

// Candidate sentences for every stored metaphor. Both sides are expanded
// before matching; hits are labelled with (target domain, source node).
inline std::vector<LMHit> retrieve_cm_hits(const std::vector<CmRecord> &cms,
                                           const std::vector<Sentence> &sentences,
                                           const ExpansionTable &table, const Store *store,
                                           const PipelineConfig &cfg) {
  std::vector<LMHit> hits;
  for (const auto &cm : cms) {
    std::set<Lexeme> target_seeds(cm.target.begin(), cm.target.end());
    std::set<Lexeme> source_seeds(cm.members.begin(), cm.members.end());
    auto targets = expand_domain(target_seeds, table, store, cfg.top_patterns);
    auto sources = expand_domain(source_seeds, table, store, cfg.top_patterns);
    // Keep the domains disjoint so a lemma is never matched against itself.
    for (const auto &t : targets) sources.erase(t);
    auto found = find_lms(sentences, targets, sources, {join(cm.target, "+"), cm.source_node},
                          cfg.threads);
    hits.insert(hits.end(), found.begin(), found.end());
  }
  return hits;
}

// retrieve_cm_hits followed by per-pair sampling.
inline std::vector<LMHit> find_cm_hits(const std::vector<CmRecord> &cms,
                                       const std::vector<Sentence> &sentences,
                                       const ExpansionTable &table, const Store *store,
                                       const PipelineConfig &cfg) {
  return sample_hits(retrieve_cm_hits(cms, sentences, table, store, cfg), cfg.per_pair,
                     cfg.seed);
}

inline std::size_t run_find_lms(const PipelineConfig &cfg, std::ostream &log) {
  auto cms = load_cm_records(cfg.cms_out);
  auto sentences = load_corpus(cfg.corpus);
  auto table = load_expansion(cfg);
  std::optional<Store> store;
  const std::string &store_path = cfg.generalize ? cfg.generalized_store : cfg.store;
  if (std::filesystem::is_regular_file(store_path)) {
    store = load_query_store(cfg);
  } else {
    log << "warning: no store at " << store_path << "; expanding from the table only\n";
  }
  auto hits = find_cm_hits(cms, sentences, table, store ? &*store : nullptr, cfg);
  auto out = detail::open_output(cfg.hits_out);
  for (const auto &h : hits) out << to_json(h).dump() << '\n';
  return hits.size();
}

// --- Gold-list evaluation ---------------------------------------------------

struct GoldMapping {
  std::string name;
  std::set<Lexeme> target_seeds;
  std::set<Lexeme> source_seeds;
};

// TSV "name <TAB> T|S <TAB> lexeme"; mappings keep first-appearance order.
inline std::vector<GoldMapping> parse_gold(std::istream &in) {
  std::vector<GoldMapping> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    auto view = trim(line);
    if (view.empty() || view[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw FormatError("expected name, T|S, lexeme", lineno);
    const std::string name(trim(cols[0]));
    const std::string side(trim(cols[1]));
    const std::string lexeme = ascii_lower(trim(cols[2]));
    if (name.empty() || lexeme.empty()) throw FormatError("empty column", lineno);
    auto [it, inserted] = index.try_emplace(name, out.size());
    if (inserted) out.push_back({name, {}, {}});
    if (side == "T") out[it->second].target_seeds.insert(lexeme);
    else if (side == "S") out[it->second].source_seeds.insert(lexeme);
    else throw FormatError("side must be T or S, got '" + side + "'", lineno);
  }
  return out;
}

struct GoldPair {
  Lexeme target;
  Lexeme source;
  double weight = 0.0;
  double scaled = 0.0;
};

struct GoldResult {
  std::string name;
  bool skipped = false;
  std::vector<GoldPair> pairs;

  bool found() const { return !pairs.empty(); }
};

struct GoldReport {
  std::vector<GoldResult> results;
  std::size_t found = 0;
  std::size_t evaluated = 0;

  std::string summary() const {
    return "found " + std::to_string(found) + " of " + std::to_string(evaluated);
  }
};

// For each mapping, expands both sides, generates the top sources of every
// target lexeme and reports the (target, source) pairs where an expanded
// source lexeme is among them. Weights are min-max scaled over all reported
// pairs.
inline GoldReport eval_gold(const std::vector<GoldMapping> &gold, const Store &store,
                            const ExpansionTable &table, const TopicMatrix *tm,
                            const PipelineConfig &cfg, std::ostream &log) {
  GoldReport report;
  std::map<Lexeme, std::vector<WeightedSource>> cache;
  for (const auto &mapping : gold) {
    GoldResult result{mapping.name, false, {}};
    auto targets = expand_domain(mapping.target_seeds, table, &store, cfg.top_patterns);
    auto sources = expand_domain(mapping.source_seeds, table, &store, cfg.top_patterns);
    if (targets.empty() || sources.empty()) {
      log << "warning: mapping '" << mapping.name << "' has an empty side; skipped\n";
      result.skipped = true;
      report.results.push_back(std::move(result));
      continue;
    }
    for (const auto &t : targets) {
      auto it = cache.find(t);
      if (it == cache.end()) it = cache.emplace(t, ranked_sources(t, store, tm, cfg)).first;
      for (const auto &s : it->second) {
        if (sources.count(s.lexeme) && !targets.count(s.lexeme)) {
          result.pairs.push_back({t, s.lexeme, s.weight, 0.0});
        }
      }
    }
    ++report.evaluated;
    if (result.found()) ++report.found;
    report.results.push_back(std::move(result));
  }

  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto &r : report.results) {
    for (const auto &p : r.pairs) {
      lo = any ? std::min(lo, p.weight) : p.weight;
      hi = any ? std::max(hi, p.weight) : p.weight;
      any = true;
    }
  }
  for (auto &r : report.results) {
    for (auto &p : r.pairs) p.scaled = hi > lo ? (p.weight - lo) / (hi - lo) : 1.0;
  }
  return report;
}

inline void write_gold_report(const GoldReport &report, std::ostream &out) {
  for (const auto &r : report.results) {
    out << r.name << '\t';
    if (r.skipped) {
      out << "skipped\n";
      continue;
    }
    if (!r.found()) {
      out << "none\n";
      continue;
    }
    auto pairs = r.pairs;
    std::sort(pairs.begin(), pairs.end(), [](const GoldPair &a, const GoldPair &b) {
      if (a.scaled != b.scaled) return a.scaled > b.scaled;
      return std::tie(a.target, a.source) < std::tie(b.target, b.source);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i > 0) out << ", ";
      std::ostringstream w;
      w << std::setprecision(2) << std::fixed << pairs[i].scaled;
      out << pairs[i].target << "->" << pairs[i].source << " (" << w.str() << ")";
    }
    out << '\n';
  }
  out << report.summary() << '\n';
}

inline GoldReport run_eval_gold(const PipelineConfig &cfg, std::ostream &report_out,
                                std::ostream &log) {
  detail::require_file("gold", cfg.gold);
  std::ifstream in(cfg.gold);
  auto gold = parse_gold(in);
  Store store = load_query_store(cfg);
  auto table = load_expansion(cfg);
  auto tm = load_topics(cfg);
  GoldReport report = eval_gold(gold, store, table, tm ? &*tm : nullptr, cfg, log);
  auto out = detail::open_output(cfg.report_out);
  write_gold_report(report, out);
  write_gold_report(report, report_out);
  return report;
}

}  // namespace mf

#endif  // MF_PIPELINE_HPP_
