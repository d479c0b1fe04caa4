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

// Conceptual metaphor generation over a frozen proposition store.
//
//   tuple weight      freq(t) / sum of freq(t') over t' with p_i(t') == p_i(t)
//   source weight     sum of the target's tuple weights over the patterns
//                     that the source also fills
//   relatedness       topic-vector dot product; sources too related to the
//                     target are dropped
//   source concepts   taxonomy classes over the sources, kept when the
//                     members share at least k patterns with the target
//
// Every ranking breaks ties by (weight desc, raw frequency desc, identity
// asc), so results do not depend on hash order or scheduling.

#ifndef MF_ENGINE_HPP_
#define MF_ENGINE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mf/common.hpp"
#include "mf/generalization.hpp"
#include "mf/store.hpp"
#include "mf/taxonomy.hpp"
#include "mf/topics.hpp"

namespace mf {

struct WeightedTuple {
  Tuple tuple;
  std::uint64_t frequency = 0;
  std::size_t position = 0;  // slot of the seed lexeme
  double weight = 0.0;
};

// One pattern shared by the target and a source.
struct SourceEvidence {
  PatternKey pattern;
  double contribution = 0.0;
  std::uint64_t source_frequency = 0;  // freq of the source's tuple in the pattern
};

struct WeightedSource {
  Lexeme lexeme;
  double weight = 0.0;
  std::uint64_t support = 0;  // summed source_frequency over the evidence
  std::vector<SourceEvidence> evidence;  // sorted by pattern
};

struct SourceConcept {
  std::string node;
  std::vector<WeightedSource> members;  // in ranked source order
  std::vector<PatternKey> shared_patterns;  // sorted
  double weight = 0.0;
  std::uint64_t support = 0;
};

struct ConceptualMetaphor {
  std::vector<Lexeme> target;
  SourceConcept source;
  std::vector<PatternKey> properties;
  double weight = 0.0;
};

struct SourceOptions {
  // Multiply each contribution by the source's own share of the pattern.
  // Off by default: the source weight depends only on which patterns the
  // source shares with the target.
  bool weight_by_source_occupancy = false;
};

// Weight of tuple `t` relative to the lexeme in slot `position`.
inline double tuple_weight(const Lexeme &lexeme, const Tuple &t, std::size_t position,
                           const Store &store) {
  const std::uint64_t freq = store.frequency(t);
  if (freq == 0) throw ContractError(t.to_string() + " is not in the store");
  if (position >= t.slots.size() || t.slots[position] != lexeme) {
    throw ContractError("'" + lexeme + "' is not in slot " + std::to_string(position) +
                        " of " + t.to_string());
  }
  const std::uint64_t total = store.pattern_frequency(PatternKey::of(t, position));
  return static_cast<double>(freq) / static_cast<double>(total);
}

// All tuples containing `lexeme`, by descending tuple weight.
inline std::vector<WeightedTuple> salient_properties(const Lexeme &lexeme, const Store &store,
                                                     std::size_t top_n) {
  if (top_n == 0) throw ContractError("top_n must be >= 1");
  std::vector<WeightedTuple> out;
  for (const auto &occ : store.tuples_containing(lexeme)) {
    const Proposition &p = *occ.proposition;
    out.push_back({p.tuple, p.frequency, occ.position,
                   tuple_weight(lexeme, p.tuple, occ.position, store)});
  }
  std::sort(out.begin(), out.end(), [](const WeightedTuple &a, const WeightedTuple &b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.tuple != b.tuple) return a.tuple < b.tuple;
    return a.position < b.position;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

inline void sort_sources(std::vector<WeightedSource> &sources) {
  std::sort(sources.begin(), sources.end(), [](const WeightedSource &a, const WeightedSource &b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.support != b.support) return a.support > b.support;
    return a.lexeme < b.lexeme;
  });
}

// Candidate sources for `lexeme`: every other lexeme that fills the blank of
// a pattern of one of the target's tuples.
inline std::vector<WeightedSource> generate_sources(const Lexeme &lexeme, const Store &store,
                                                    const SourceOptions &opts = {}) {
  std::map<Lexeme, std::map<PatternKey, SourceEvidence>> found;
  for (const auto &occ : store.tuples_containing(lexeme)) {
    const Proposition &p = *occ.proposition;
    PatternKey pattern = PatternKey::of(p.tuple, occ.position);
    const double total = static_cast<double>(store.pattern_frequency(pattern));
    const double weight = static_cast<double>(p.frequency) / total;
    for (const Proposition *other : store.tuples_matching(pattern)) {
      const Lexeme &filler = other->tuple.slots[occ.position];
      if (filler == lexeme) continue;
      double contribution = weight;
      if (opts.weight_by_source_occupancy) {
        contribution *= static_cast<double>(other->frequency) / total;
      }
      found[filler][pattern] = {pattern, contribution, other->frequency};
    }
  }

  std::vector<WeightedSource> out;
  out.reserve(found.size());
  for (auto &[source, by_pattern] : found) {
    WeightedSource ws{source, 0.0, 0, {}};
    for (auto &[pattern, ev] : by_pattern) {
      ws.weight += ev.contribution;
      ws.support += ev.source_frequency;
      ws.evidence.push_back(std::move(ev));
    }
    out.push_back(std::move(ws));
  }
  sort_sources(out);
  return out;
}

// Keeps sources whose relatedness to the target is at most `threshold`, and
// all out-of-vocabulary sources. Order is preserved.
inline std::vector<WeightedSource> filter_sources(const std::vector<WeightedSource> &sources,
                                                  const Lexeme &target, const TopicMatrix &tm,
                                                  double threshold) {
  if (!(threshold >= 0.0)) throw ContractError("threshold must be >= 0");
  std::vector<WeightedSource> out;
  for (const auto &s : sources) {
    Relatedness r = relatedness(target, s.lexeme, tm);
    if (r.out_of_vocabulary || r.value <= threshold) out.push_back(s);
  }
  return out;
}

namespace detail {

// Class nodes a source lexeme (or an already generalized class id) sits under.
inline std::set<std::string> source_classes(const Lexeme &lexeme, const Taxonomy &tax) {
  std::vector<std::string> direct;
  if (tax.has_node(lexeme)) {
    if (tax.is_class(lexeme)) {
      direct.push_back(lexeme);
    } else {
      auto cs = tax.classes_of_instance(lexeme);
      direct.assign(cs.begin(), cs.end());
    }
  } else {
    auto parts = split(lexeme, '_');
    direct = parts.size() > 1 ? map_compound(parts, tax) : map_noun(lexeme, tax);
  }
  std::set<std::string> out;
  for (const auto &c : direct) {
    auto up = tax.class_ancestors(c);
    out.insert(up.begin(), up.end());
  }
  return out;
}

// Target patterns that `source` also fills.
inline std::set<PatternKey> shared_patterns(const Lexeme &target, const Lexeme &source,
                                            const Store &store) {
  std::set<PatternKey> out;
  for (const auto &occ : store.tuples_containing(target)) {
    PatternKey pattern = PatternKey::of(occ.proposition->tuple, occ.position);
    for (const Proposition *other : store.tuples_matching(pattern)) {
      if (other->tuple.slots[occ.position] == source) {
        out.insert(pattern);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

// Groups sources under taxonomy classes. A class forms a concept when the
// union of its member sources' target-shared patterns has at least k
// elements. Classes with the same member set are reduced to the most
// specific ones.
inline std::vector<SourceConcept> cluster_sources(const std::vector<WeightedSource> &sources,
                                                  const Taxonomy &tax, const Lexeme &target,
                                                  const Store &store, std::size_t k) {
  if (k == 0) throw ContractError("k must be >= 1");
  std::vector<std::set<PatternKey>> patterns(sources.size());
  std::map<std::string, std::vector<std::size_t>> members_by_class;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto &s = sources[i];
    if (s.lexeme == target) continue;
    if (!s.evidence.empty()) {
      for (const auto &ev : s.evidence) patterns[i].insert(ev.pattern);
    } else {
      patterns[i] = detail::shared_patterns(target, s.lexeme, store);
    }
    if (patterns[i].empty()) continue;
    for (const auto &c : detail::source_classes(s.lexeme, tax)) members_by_class[c].push_back(i);
  }

  // member set -> qualifying classes
  std::map<std::vector<std::size_t>, std::vector<std::string>> by_members;
  for (const auto &[cls, members] : members_by_class) {
    std::set<PatternKey> pooled;
    for (auto i : members) pooled.insert(patterns[i].begin(), patterns[i].end());
    if (pooled.size() >= k) by_members[members].push_back(cls);
  }

  std::vector<SourceConcept> out;
  for (const auto &[members, classes] : by_members) {
    for (const auto &cls : classes) {
      bool dominated = false;
      for (const auto &other : classes) {
        if (other != cls && tax.class_ancestors(other).count(cls)) {
          dominated = true;
          break;
        }
      }
      if (dominated) continue;
      SourceConcept c;
      c.node = cls;
      std::set<PatternKey> pooled;
      for (auto i : members) {
        c.members.push_back(sources[i]);
        c.weight += sources[i].weight;
        c.support += sources[i].support;
        pooled.insert(patterns[i].begin(), patterns[i].end());
      }
      c.shared_patterns.assign(pooled.begin(), pooled.end());
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(), [](const SourceConcept &a, const SourceConcept &b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.support != b.support) return a.support > b.support;
    return a.node < b.node;
  });
  return out;
}

// One metaphor per concept, best first, truncated to top_m.
inline std::vector<ConceptualMetaphor> build_cms(const std::vector<Lexeme> &target,
                                                 const std::vector<SourceConcept> &concepts,
                                                 std::size_t top_m) {
  std::vector<ConceptualMetaphor> out;
  for (const auto &c : concepts) {
    if (out.size() >= top_m) break;
    if (c.shared_patterns.empty()) continue;
    out.push_back({target, c, c.shared_patterns, c.weight});
  }
  return out;
}

inline nlohmann::json to_json(const ConceptualMetaphor &cm) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto &m : cm.source.members) members.push_back(m.lexeme);
  nlohmann::json patterns = nlohmann::json::array();
  for (const auto &p : cm.properties) patterns.push_back(p.to_string());
  return {{"target", cm.target},
          {"source_node", cm.source.node},
          {"members", members},
          {"patterns", patterns},
          {"weight", cm.weight}};
}

// Inverse of PatternKey::to_string: "(VN fight _)".
inline PatternKey parse_pattern(std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') {
    throw FormatError("bad pattern '" + std::string(text) + "'", 0);
  }
  auto words = split(text.substr(1, text.size() - 2), ' ');
  if (words.size() < 2) throw FormatError("bad pattern '" + std::string(text) + "'", 0);
  PatternKey p{words.front(), {words.begin() + 1, words.end()}, 0};
  std::size_t blanks = 0;
  for (std::size_t i = 0; i < p.slots.size(); ++i) {
    if (p.slots[i] == "_") {
      p.slots[i].clear();
      p.blank = i;
      ++blanks;
    }
  }
  if (blanks != 1) throw FormatError("pattern needs exactly one blank: " + std::string(text), 0);
  return p;
}

}  // namespace mf

#endif  // MF_ENGINE_HPP_
