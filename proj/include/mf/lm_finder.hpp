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

// Linguistic metaphor candidates: sentences in which a target-domain lemma
// and a source-domain lemma are joined by a dependency arc. No judgement of
// metaphoricity is made; the hits are meant for human review.

#ifndef MF_LM_FINDER_HPP_
#define MF_LM_FINDER_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mf/common.hpp"
#include "mf/conllu.hpp"
#include "mf/engine.hpp"
#include "mf/store.hpp"

namespace mf {

// Related lexemes per lexeme, tagged with the relation that links them.
// File format: TSV "lexeme <TAB> relation <TAB> related".
class ExpansionTable {
 public:
  void add(const Lexeme &lexeme, const std::string &relation, const Lexeme &related) {
    table_[lexeme][related].insert(relation);
  }

  // The lexeme itself plus every related lexeme.
  std::set<Lexeme> expansion(const Lexeme &lexeme) const {
    std::set<Lexeme> out{lexeme};
    auto it = table_.find(lexeme);
    if (it != table_.end()) {
      for (const auto &[related, relations] : it->second) out.insert(related);
    }
    return out;
  }

  std::set<std::string> relations(const Lexeme &lexeme, const Lexeme &related) const {
    auto it = table_.find(lexeme);
    if (it == table_.end()) return {};
    auto jt = it->second.find(related);
    return jt == it->second.end() ? std::set<std::string>{} : jt->second;
  }

  bool empty() const { return table_.empty(); }

  static ExpansionTable load(std::istream &in) {
    ExpansionTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      chomp(line);
      auto view = trim(line);
      if (view.empty() || view[0] == '#') continue;
      auto cols = split(line, '\t');
      if (cols.size() != 3) throw FormatError("expected lexeme, relation, related", lineno);
      for (auto &c : cols) c = std::string(trim(c));
      if (cols[0].empty() || cols[1].empty() || cols[2].empty()) {
        throw FormatError("empty column", lineno);
      }
      table.add(ascii_lower(cols[0]), cols[1], ascii_lower(cols[2]));
    }
    return table;
  }

  static ExpansionTable load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in);
  }

 private:
  std::map<Lexeme, std::map<Lexeme, std::set<std::string>>> table_;
};

// Seeds, their table expansions, and the content lexemes of each seed's
// top_p salient tuples. `store` may be null when top_p is 0.
inline std::set<Lexeme> expand_domain(const std::set<Lexeme> &seeds, const ExpansionTable &table,
                                      const Store *store, std::size_t top_p) {
  std::set<Lexeme> out;
  for (const auto &seed : seeds) {
    auto ex = table.expansion(seed);
    out.insert(ex.begin(), ex.end());
    if (top_p == 0 || store == nullptr) continue;
    for (const auto &wt : salient_properties(seed, *store, top_p)) {
      const auto kinds = label_components(wt.tuple.label);
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i == wt.position || kinds[i] == SlotKind::kPrep) continue;
        out.insert(wt.tuple.slots[i]);
      }
    }
  }
  return out;
}

enum class ArcDirection { kTargetHeaded, kSourceHeaded };

inline const char *to_string(ArcDirection d) {
  return d == ArcDirection::kTargetHeaded ? "target-headed" : "source-headed";
}

struct LMHit {
  std::string sentence_id;
  int target_token = 0;
  int source_token = 0;
  std::string deprel;
  ArcDirection direction = ArcDirection::kTargetHeaded;
  Lexeme matched_target;
  Lexeme matched_source;
  std::string target_domain;  // grouping labels for sampling; may be empty
  std::string source_domain;
  std::string text;

  bool operator==(const LMHit &) const = default;
};

struct DomainLabels {
  std::string target;
  std::string source;
};

namespace detail {

inline void find_in_sentence(const Sentence &s, const std::set<Lexeme> &targets,
                             const std::set<Lexeme> &sources, const DomainLabels &labels,
                             std::vector<LMHit> &out) {
  for (const Token &dep : s.tokens) {
    if (dep.head == 0) continue;
    const Token &head = s.token(dep.head);
    LMHit hit;
    if (targets.count(head.lemma) && sources.count(dep.lemma)) {
      hit.direction = ArcDirection::kTargetHeaded;
      hit.target_token = head.index;
      hit.source_token = dep.index;
      hit.matched_target = head.lemma;
      hit.matched_source = dep.lemma;
    } else if (targets.count(dep.lemma) && sources.count(head.lemma)) {
      hit.direction = ArcDirection::kSourceHeaded;
      hit.target_token = dep.index;
      hit.source_token = head.index;
      hit.matched_target = dep.lemma;
      hit.matched_source = head.lemma;
    } else {
      continue;
    }
    hit.sentence_id = s.id;
    hit.deprel = dep.deprel;
    hit.target_domain = labels.target;
    hit.source_domain = labels.source;
    hit.text = s.text;
    out.push_back(std::move(hit));
  }
}

}  // namespace detail

// One hit per dependency arc whose endpoints' lemmas fall in targets x sources
// (either direction). Hits come out in sentence order, then dependent order,
// independent of `threads`.
inline std::vector<LMHit> find_lms(const std::vector<Sentence> &sentences,
                                   const std::set<Lexeme> &targets,
                                   const std::set<Lexeme> &sources,
                                   const DomainLabels &labels = {}, unsigned threads = 1) {
  std::vector<LMHit> out;
  if (targets.empty() || sources.empty()) return out;
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<LMHit> hits;
    for (std::size_t i = begin; i < end; ++i) {
      detail::find_in_sentence(sentences[i], targets, sources, labels, hits);
    }
    return hits;
  };
  threads = std::max(1u, threads);
  if (threads == 1 || sentences.size() < 2) return work(0, sentences.size());
  const std::size_t chunk = (sentences.size() + threads - 1) / threads;
  std::vector<std::future<std::vector<LMHit>>> shards;
  for (std::size_t b = 0; b < sentences.size(); b += chunk) {
    shards.push_back(std::async(std::launch::async, work, b,
                                std::min(sentences.size(), b + chunk)));
  }
  for (auto &f : shards) {
    auto part = f.get();
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

namespace detail {

// Uniform integer in [0, n) by rejection; std::uniform_int_distribution is
// not specified bit-for-bit across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline std::pair<std::string, std::string> pair_key(const LMHit &h) {
  return {h.target_domain.empty() ? h.matched_target : h.target_domain,
          h.source_domain.empty() ? h.matched_source : h.source_domain};
}

}  // namespace detail

// Draws up to per_pair hits, from distinct sentences, for every
// (target domain, source domain) pair. Each pair has its own generator seeded
// from `seed` and the pair labels, so the sample does not depend on the order
// in which pairs are visited. Output is grouped by pair (sorted), then in
// input order.
inline std::vector<LMHit> sample_hits(const std::vector<LMHit> &hits, std::size_t per_pair,
                                      std::uint64_t seed) {
  if (per_pair == 0) throw ContractError("per_pair must be >= 1");
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> seen_sentences;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    auto key = detail::pair_key(hits[i]);
    if (seen_sentences[key].insert(hits[i].sentence_id).second) groups[key].push_back(i);
  }
  std::vector<LMHit> out;
  for (auto &[key, idx] : groups) {
    std::uint64_t pair_seed = fnv1a(key.second, fnv1a(key.first, fnv1a(std::to_string(seed))));
    std::mt19937_64 rng(pair_seed);
    const std::size_t take = std::min(per_pair, idx.size());
    // Partial Fisher-Yates over the candidate positions.
    for (std::size_t i = 0; i < take; ++i) {
      std::size_t j = i + detail::uniform_below(rng, idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + take);
    std::sort(chosen.begin(), chosen.end());
    for (auto i : chosen) out.push_back(hits[i]);
  }
  return out;
}

inline nlohmann::json to_json(const LMHit &h) {
  nlohmann::json j{{"sentence_id", h.sentence_id},
                   {"target", h.matched_target},
                   {"source", h.matched_source},
                   {"deprel", h.deprel},
                   {"direction", to_string(h.direction)},
                   {"target_token", h.target_token},
                   {"source_token", h.source_token}};
  if (!h.target_domain.empty()) j["target_domain"] = h.target_domain;
  if (!h.source_domain.empty()) j["source_domain"] = h.source_domain;
  if (!h.text.empty()) j["text"] = h.text;
  return j;
}

}  // namespace mf

#endif  // MF_LM_FINDER_HPP_
