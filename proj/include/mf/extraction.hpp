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

// Proposition extraction from dependency parses.
//
// Each extraction rule is a small tree template over dependency arcs. Node 0
// is the anchor; every other node names its parent node, the dependency
// relations allowed on the arc from that parent, and the UPOS tags allowed on
// the token. All matches of all rules are emitted, so one sentence usually
// yields overlapping tuples (NV, VPN and NVPN over the same tokens).
//
// Before matching, the parse is rewritten into an argument graph:
//  - tokens attached by a merge relation (fixed, flat) are folded into their
//    head, giving multiword lexemes such as "out_of" or "new_york";
//  - a verb without its own subject inherits the subject of the verb that
//    controls it (xcomp) or that it is coordinated with (conj).

#ifndef MF_EXTRACTION_HPP_
#define MF_EXTRACTION_HPP_

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mf/common.hpp"
#include "mf/conllu.hpp"
#include "mf/store.hpp"

namespace mf {

struct TemplateNode {
  int parent = -1;                    // -1 for the anchor
  std::vector<std::string> deprels;   // "obl:*" matches obl and its subtypes
  std::vector<std::string> upos;      // empty matches any tag
};

struct ExtractionRule {
  std::string label;
  std::vector<TemplateNode> nodes;
  std::vector<int> slots;  // slots[k] is the node filling slot k
};

struct RuleSet {
  std::vector<ExtractionRule> rules;
  std::vector<std::string> merge_relations{"fixed", "flat:*"};
  // Relations over which a verb inherits its head's subject.
  std::vector<std::string> inherit_subject{"xcomp", "conj"};
  bool bind_subjects = true;
};

namespace detail {

inline bool deprel_matches(const std::string &pattern, const std::string &deprel) {
  if (pattern.size() > 2 && pattern.compare(pattern.size() - 2, 2, ":*") == 0) {
    std::string_view base(pattern.data(), pattern.size() - 2);
    return deprel == base ||
           (deprel.size() > base.size() && deprel.compare(0, base.size(), base) == 0 &&
            deprel[base.size()] == ':');
  }
  return pattern == deprel;
}

inline bool any_deprel(const std::vector<std::string> &patterns, const std::string &deprel) {
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const std::string &p) { return deprel_matches(p, deprel); });
}

inline void validate_rule(const ExtractionRule &rule) {
  const std::string where = "rule " + rule.label;
  std::size_t arity = 0;
  try {
    arity = label_arity(rule.label);
  } catch (const ContractError &e) {
    throw ContractError(where + ": " + e.what());
  }
  if (rule.nodes.size() != arity || rule.slots.size() != arity) {
    throw ContractError(where + ": needs exactly " + std::to_string(arity) +
                        " nodes and slots");
  }
  std::vector<int> seen(arity, 0);
  for (int node : rule.slots) {
    if (node < 0 || node >= static_cast<int>(arity) || seen[node]++) {
      throw ContractError(where + ": slots must be a permutation of the nodes");
    }
  }
  if (rule.nodes[0].parent != -1) throw ContractError(where + ": node 0 must be the anchor");
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    const auto &n = rule.nodes[i];
    if (n.parent < 0 || n.parent >= static_cast<int>(i)) {
      throw ContractError(where + ": node " + std::to_string(i) +
                          " must name an earlier parent");
    }
    if (n.deprels.empty()) {
      throw ContractError(where + ": node " + std::to_string(i) + " needs a relation");
    }
  }
}

// Dependency graph after multiword folding and subject binding.
struct ArgumentGraph {
  struct Arc {
    int child;
    std::string deprel;
  };
  std::vector<std::string> lexeme;  // by token index; "" for folded tokens
  std::vector<std::vector<Arc>> children;

  static ArgumentGraph build(const Sentence &s, const RuleSet &rules) {
    const int n = static_cast<int>(s.tokens.size());
    ArgumentGraph g;
    g.lexeme.assign(n + 1, "");
    g.children.assign(n + 1, {});

    std::vector<bool> folded(n + 1, false);
    std::vector<std::vector<int>> merged(n + 1);
    for (const Token &t : s.tokens) {
      if (t.head != 0 && any_deprel(rules.merge_relations, t.deprel)) {
        folded[t.index] = true;
      }
    }
    // Each token collects the folded tokens below it, in surface order.
    std::function<void(int, std::vector<int> &)> collect = [&](int head,
                                                                std::vector<int> &out) {
      for (const Token &t : s.tokens) {
        if (t.head == head && folded[t.index]) {
          out.push_back(t.index);
          collect(t.index, out);
        }
      }
    };
    for (const Token &t : s.tokens) {
      if (folded[t.index]) continue;
      std::vector<int> parts{t.index};
      collect(t.index, parts);
      std::sort(parts.begin(), parts.end());
      std::vector<std::string> lemmas;
      for (int p : parts) lemmas.push_back(s.token(p).lemma);
      g.lexeme[t.index] = join(lemmas, "_");
    }

    for (const Token &t : s.tokens) {
      if (t.head == 0 || folded[t.index]) continue;
      g.children[t.head].push_back({t.index, t.deprel});
    }

    if (rules.bind_subjects) {
      auto own_subjects = [&](int v) {
        std::vector<int> subj;
        for (const auto &arc : g.children[v]) {
          if (deprel_matches("nsubj:*", arc.deprel)) subj.push_back(arc.child);
        }
        return subj;
      };
      // Only active subjects are inherited.
      std::function<std::vector<int>(int, int)> subjects = [&](int v, int depth) {
        std::vector<int> subj;
        for (const auto &arc : g.children[v]) {
          if (arc.deprel == "nsubj") subj.push_back(arc.child);
        }
        if (!own_subjects(v).empty() || depth > n) return subj;
        const Token &t = s.token(v);
        if (t.head != 0 && any_deprel(rules.inherit_subject, t.deprel)) {
          return subjects(t.head, depth + 1);
        }
        return subj;
      };
      std::vector<std::pair<int, int>> bound;
      for (const Token &t : s.tokens) {
        if (folded[t.index] || t.upos != "VERB" || t.head == 0) continue;
        if (!own_subjects(t.index).empty()) continue;
        if (!any_deprel(rules.inherit_subject, t.deprel)) continue;
        for (int subj : subjects(t.head, 0)) bound.emplace_back(t.index, subj);
      }
      for (auto [verb, subj] : bound) g.children[verb].push_back({subj, "nsubj"});
    }
    return g;
  }
};

inline bool upos_matches(const TemplateNode &node, const Token &t) {
  return node.upos.empty() ||
         std::find(node.upos.begin(), node.upos.end(), t.upos) != node.upos.end();
}

}  // namespace detail

// The shipped English rule inventory over Universal Dependencies relations.
inline RuleSet default_rules() {
  const std::vector<std::string> kNoun{"NOUN", "PROPN"};
  const std::vector<std::string> kVerb{"VERB"};
  const std::vector<std::string> kPrep{"ADP"};
  const std::vector<std::string> kAdj{"ADJ"};
  const std::vector<std::string> kAdv{"ADV"};
  const std::vector<std::string> kSubj{"nsubj"};
  const std::vector<std::string> kObj{"obj", "nsubj:pass"};
  const std::vector<std::string> kComp{"xcomp", "ccomp"};
  const std::vector<std::string> kOblique{"obl:*", "nmod:*"};
  const std::vector<std::string> kCase{"case"};

  RuleSet rs;
  rs.rules = {
      {"NV", {{-1, {}, kVerb}, {0, kSubj, kNoun}}, {1, 0}},
      {"VN", {{-1, {}, kVerb}, {0, kObj, kNoun}}, {0, 1}},
      {"NVV", {{-1, {}, kVerb}, {0, kSubj, kNoun}, {0, kComp, kVerb}}, {1, 0, 2}},
      {"VPN", {{-1, {}, kVerb}, {0, kOblique, kNoun}, {1, kCase, kPrep}}, {0, 2, 1}},
      {"NPN", {{-1, {}, kNoun}, {0, {"nmod:*"}, kNoun}, {1, kCase, kPrep}}, {0, 2, 1}},
      {"NVPN",
       {{-1, {}, kVerb}, {0, kSubj, kNoun}, {0, kOblique, kNoun}, {2, kCase, kPrep}},
       {1, 0, 3, 2}},
      {"NVVPN",
       {{-1, {}, kVerb},
        {0, kSubj, kNoun},
        {0, kComp, kVerb},
        {2, kOblique, kNoun},
        {3, kCase, kPrep}},
       {1, 0, 2, 4, 3}},
      {"NN", {{-1, {}, kNoun}, {0, {"compound"}, kNoun}}, {1, 0}},
      {"AN", {{-1, {}, kNoun}, {0, {"amod"}, kAdj}}, {1, 0}},
      {"AdvPN", {{-1, {}, kAdv}, {0, kOblique, kNoun}, {1, kCase, kPrep}}, {0, 2, 1}},
      {"NVAdv", {{-1, {}, kVerb}, {0, kSubj, kNoun}, {0, {"advmod"}, kAdv}}, {1, 0, 2}},
  };
  return rs;
}

inline nlohmann::json rules_to_json(const RuleSet &rs) {
  nlohmann::json j;
  j["merge_relations"] = rs.merge_relations;
  j["inherit_subject"] = rs.inherit_subject;
  j["bind_subjects"] = rs.bind_subjects;
  j["rules"] = nlohmann::json::array();
  for (const auto &r : rs.rules) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto &n : r.nodes) {
      nlohmann::json jn;
      if (n.parent >= 0) {
        jn["parent"] = n.parent;
        jn["deprel"] = n.deprels;
      }
      jn["upos"] = n.upos;
      nodes.push_back(jn);
    }
    j["rules"].push_back({{"label", r.label}, {"nodes", nodes}, {"slots", r.slots}});
  }
  return j;
}

// Parses a rule file. Missing top-level keys keep the RuleSet defaults.
inline RuleSet rules_from_json(const nlohmann::json &j) {
  RuleSet rs;
  try {
    if (j.contains("merge_relations")) j.at("merge_relations").get_to(rs.merge_relations);
    if (j.contains("inherit_subject")) j.at("inherit_subject").get_to(rs.inherit_subject);
    if (j.contains("bind_subjects")) j.at("bind_subjects").get_to(rs.bind_subjects);
    for (const auto &jr : j.at("rules")) {
      ExtractionRule r;
      jr.at("label").get_to(r.label);
      for (const auto &jn : jr.at("nodes")) {
        TemplateNode n;
        n.parent = jn.value("parent", -1);
        if (jn.contains("deprel")) jn.at("deprel").get_to(n.deprels);
        if (jn.contains("upos")) jn.at("upos").get_to(n.upos);
        r.nodes.push_back(std::move(n));
      }
      jr.at("slots").get_to(r.slots);
      rs.rules.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("bad rule file: ") + e.what(), 0);
  }
  for (const auto &r : rs.rules) detail::validate_rule(r);
  return rs;
}

inline RuleSet load_rules_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(path + ": " + e.what(), 0);
  }
  return rules_from_json(j);
}

// Emits one occurrence (frequency 1) per distinct match of each rule, in rule
// order, then anchor order.
inline std::vector<Occurrence> extract_propositions(const Sentence &s, const RuleSet &rs) {
  std::vector<Occurrence> out;
  if (s.tokens.empty()) return out;
  const auto graph = detail::ArgumentGraph::build(s, rs);
  const int n = static_cast<int>(s.tokens.size());

  for (const auto &rule : rs.rules) {
    detail::validate_rule(rule);
    std::set<std::vector<int>> emitted;
    std::vector<int> match(rule.nodes.size(), 0);

    std::function<void(std::size_t)> extend = [&](std::size_t node) {
      if (node == rule.nodes.size()) {
        std::vector<int> indices;
        Tuple t{rule.label, {}};
        for (int k : rule.slots) {
          indices.push_back(match[k]);
          t.slots.push_back(graph.lexeme[match[k]]);
        }
        if (emitted.insert(indices).second) {
          out.push_back({std::move(t), 1, s.id, std::move(indices)});
        }
        return;
      }
      const TemplateNode &tn = rule.nodes[node];
      for (const auto &arc : graph.children[match[tn.parent]]) {
        if (!detail::any_deprel(tn.deprels, arc.deprel)) continue;
        if (!detail::upos_matches(tn, s.token(arc.child))) continue;
        if (std::find(match.begin(), match.begin() + node, arc.child) !=
            match.begin() + node) {
          continue;
        }
        match[node] = arc.child;
        extend(node + 1);
      }
    };

    for (int anchor = 1; anchor <= n; ++anchor) {
      if (graph.lexeme[anchor].empty()) continue;
      if (!detail::upos_matches(rule.nodes[0], s.token(anchor))) continue;
      match[0] = anchor;
      extend(1);
    }
  }
  return out;
}

// Extracts every sentence into a fresh (unfrozen) store. Sentences are split
// into `threads` contiguous shards whose stores are merged in shard order.
inline Store build_store(const std::vector<Sentence> &sentences, const RuleSet &rs,
                         unsigned threads = 1) {
  for (const auto &r : rs.rules) detail::validate_rule(r);
  threads = std::max(1u, std::min<unsigned>(threads, sentences.size() ? sentences.size() : 1));
  auto work = [&](std::size_t begin, std::size_t end) {
    Store shard;
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto &occ : extract_propositions(sentences[i], rs)) shard.add(occ);
    }
    return shard;
  };
  if (threads == 1) return work(0, sentences.size());
  std::vector<std::future<Store>> shards;
  const std::size_t chunk = (sentences.size() + threads - 1) / threads;
  for (std::size_t b = 0; b < sentences.size(); b += chunk) {
    shards.push_back(std::async(std::launch::async, work, b,
                                std::min(sentences.size(), b + chunk)));
  }
  Store merged;
  for (auto &f : shards) merged.merge(f.get());
  return merged;
}

}  // namespace mf

#endif  // MF_EXTRACTION_HPP_
