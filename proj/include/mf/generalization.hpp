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

// Rewriting noun slots to taxonomy classes.
//
// A noun is looked up in three steps: given names and surnames map to the
// person class; otherwise an exact lexical match is used; otherwise every
// lexical item containing the noun as a whole word contributes its nodes.
// Candidates are then filtered to class nodes: classes win over instances,
// and instance-only results are replaced by the instances' classes.
// Ambiguous nouns keep every candidate class.

#ifndef MF_GENERALIZATION_HPP_
#define MF_GENERALIZATION_HPP_

#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mf/common.hpp"
#include "mf/store.hpp"
#include "mf/taxonomy.hpp"

namespace mf {

namespace detail {

inline std::vector<std::string> lookup_words(const std::vector<std::string> &words,
                                             const Taxonomy &tax) {
  if (words.size() == 1 && tax.is_name(words[0])) return {tax.person_class()};
  auto nodes = tax.exact(words);
  if (!nodes.empty()) return nodes;
  return tax.containing(words);
}

inline std::vector<std::string> prefer_classes(const std::set<std::string> &candidates,
                                               const Taxonomy &tax) {
  std::set<std::string> classes;
  for (const auto &id : candidates) {
    if (tax.is_class(id)) classes.insert(id);
  }
  if (classes.empty()) {
    for (const auto &id : candidates) {
      for (const auto &c : tax.classes_of_instance(id)) classes.insert(c);
    }
  }
  return {classes.begin(), classes.end()};
}

}  // namespace detail

// Class nodes for a single noun, sorted. Empty when nothing matches.
inline std::vector<std::string> map_noun(const Lexeme &noun, const Taxonomy &tax) {
  auto words = lexical_words(noun);
  if (words.empty()) return {};
  auto nodes = detail::lookup_words(words, tax);
  return detail::prefer_classes({nodes.begin(), nodes.end()}, tax);
}

// Class nodes for a noun compound. The compound is segmented greedily: the
// longest matching span (leftmost on ties) is taken, then the remainders on
// either side are segmented the same way. Nodes from all segments are pooled
// and filtered as for a single noun, so a class found for one part wins over
// an instance found for another.
inline std::vector<std::string> map_compound(const std::vector<Lexeme> &tokens,
                                             const Taxonomy &tax) {
  std::vector<std::string> words;
  for (const auto &t : tokens) {
    for (auto &w : lexical_words(t)) words.push_back(std::move(w));
  }
  std::set<std::string> pooled;
  std::function<void(std::size_t, std::size_t)> segment = [&](std::size_t b, std::size_t e) {
    for (std::size_t len = e - b; len >= 1; --len) {
      for (std::size_t start = b; start + len <= e; ++start) {
        std::vector<std::string> span(words.begin() + start, words.begin() + start + len);
        auto nodes = detail::lookup_words(span, tax);
        if (nodes.empty()) continue;
        pooled.insert(nodes.begin(), nodes.end());
        if (start > b) segment(b, start);
        if (start + len < e) segment(start + len, e);
        return;
      }
    }
  };
  if (!words.empty()) segment(0, words.size());
  return detail::prefer_classes(pooled, tax);
}

// How a tuple's frequency is distributed over the k class readings of an
// ambiguous noun.
enum class AmbiguityMode {
  kCopy,   // every reading carries the full frequency
  kSplit,  // integer split; the remainder goes to the first readings
};

struct GeneralizeOptions {
  AmbiguityMode ambiguity = AmbiguityMode::kCopy;
};

// Rewrites every noun slot of a frozen store to its class ids and merges
// identical results by summing frequencies. Multiword slots ("new_york") are
// mapped as compounds. Slots with no mapping keep their lexeme.
inline Store generalize_store(const Store &store, const Taxonomy &tax,
                              const GeneralizeOptions &opts = {}) {
  std::unordered_map<Lexeme, std::vector<std::string>> memo;
  auto classes_for = [&](const Lexeme &lexeme) -> const std::vector<std::string> & {
    auto it = memo.find(lexeme);
    if (it != memo.end()) return it->second;
    auto parts = split(lexeme, '_');
    auto classes = parts.size() > 1 ? map_compound(parts, tax) : map_noun(lexeme, tax);
    return memo.emplace(lexeme, std::move(classes)).first->second;
  };

  Store out;
  for (const auto &prop : store.rows()) {
    const auto kinds = label_components(prop.tuple.label);
    std::vector<std::vector<Lexeme>> choices;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const Lexeme &slot = prop.tuple.slots[i];
      if (kinds[i] == SlotKind::kNoun) {
        const auto &classes = classes_for(slot);
        if (!classes.empty()) {
          choices.push_back(classes);
          continue;
        }
      }
      choices.push_back({slot});
    }

    std::vector<Tuple> readings;
    Tuple cur{prop.tuple.label, std::vector<Lexeme>(kinds.size())};
    std::function<void(std::size_t)> expand = [&](std::size_t i) {
      if (i == choices.size()) {
        readings.push_back(cur);
        return;
      }
      for (const auto &c : choices[i]) {
        cur.slots[i] = c;
        expand(i + 1);
      }
    };
    expand(0);

    if (opts.ambiguity == AmbiguityMode::kCopy) {
      for (const auto &t : readings) out.add(t, prop.frequency);
    } else {
      const std::uint64_t k = readings.size();
      for (std::uint64_t r = 0; r < k; ++r) {
        std::uint64_t share = prop.frequency / k + (r < prop.frequency % k ? 1 : 0);
        if (share > 0) out.add(readings[r], share);
      }
    }
  }
  out.freeze();
  return out;
}

}  // namespace mf

#endif  // MF_GENERALIZATION_HPP_
