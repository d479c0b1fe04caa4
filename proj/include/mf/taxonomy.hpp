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

// Hypernym taxonomy with class and instance nodes, a lexicon attaching
// lexical items to nodes, and given-name/surname lists.
//
// File format (TSV, '#' comments, sections introduced by a bracketed name):
//
//   [META]     key <TAB> value          (person_class)
//   [NODES]    id <TAB> class|instance
//   [EDGES]    child <TAB> parent
//   [LEXICON]  lexical item <TAB> node id
//   [NAMES]    name <TAB> given|surname
//
// Lexical items are normalized to lower-case words joined by '_', so
// "The_New_York_Times" and "the new york times" are the same item.

#ifndef MF_TAXONOMY_HPP_
#define MF_TAXONOMY_HPP_

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mf/common.hpp"

namespace mf {

enum class NodeKind { kClass, kInstance };

struct TaxonomyNode {
  std::string id;
  NodeKind kind = NodeKind::kClass;
  std::vector<std::string> parents;
};

// Lower-case words of a lexical item, split on spaces and underscores.
inline std::vector<std::string> lexical_words(std::string_view item) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : item) {
    if (c == ' ' || c == '_' || c == '\t') {
      if (!cur.empty()) words.push_back(ascii_lower(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(ascii_lower(cur));
  return words;
}

class Taxonomy {
 public:
  void add_node(const std::string &id, NodeKind kind) {
    auto [it, inserted] = nodes_.try_emplace(id, TaxonomyNode{id, kind, {}});
    if (!inserted && it->second.kind != kind) {
      throw StructureError("node declared with two kinds", id);
    }
  }

  void add_edge(const std::string &child, const std::string &parent) {
    auto it = nodes_.find(child);
    if (it == nodes_.end()) throw StructureError("edge from unknown node", child);
    if (!nodes_.count(parent)) throw StructureError("edge to unknown node " + parent, child);
    auto &ps = it->second.parents;
    if (std::find(ps.begin(), ps.end(), parent) == ps.end()) ps.push_back(parent);
  }

  void add_lexical(const std::string &item, const std::string &node) {
    if (!nodes_.count(node)) throw StructureError("lexicon entry for unknown node", node);
    auto words = lexical_words(item);
    if (words.empty()) throw StructureError("empty lexical item", node);
    std::string key = join(words, "_");
    auto &ids = lexicon_[key];
    if (std::find(ids.begin(), ids.end(), node) != ids.end()) return;
    ids.push_back(node);
    if (ids.size() == 1) {
      std::set<std::string> distinct(words.begin(), words.end());
      for (const auto &w : distinct) items_by_word_[w].push_back(key);
    }
  }

  void add_name(const std::string &name) { names_.insert(ascii_lower(name)); }

  void set_person_class(const std::string &id) { person_class_ = id; }
  const std::string &person_class() const { return person_class_; }

  bool has_node(const std::string &id) const { return nodes_.count(id) > 0; }

  const TaxonomyNode *node(const std::string &id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  bool is_class(const std::string &id) const {
    auto n = node(id);
    return n && n->kind == NodeKind::kClass;
  }

  bool is_name(const std::string &word) const { return names_.count(ascii_lower(word)) > 0; }
  bool lexicon_empty() const { return lexicon_.empty(); }
  std::size_t node_count() const { return nodes_.size(); }

  // Nodes whose lexical item equals `words` exactly.
  std::vector<std::string> exact(const std::vector<std::string> &words) const {
    auto it = lexicon_.find(join(words, "_"));
    return it == lexicon_.end() ? std::vector<std::string>{} : it->second;
  }

  // Nodes of every lexical item that contains `words` as a contiguous word
  // sequence, excluding an exact match. Sorted, deduplicated.
  std::vector<std::string> containing(const std::vector<std::string> &words) const {
    std::set<std::string> out;
    if (words.empty()) return {};
    auto it = items_by_word_.find(words.front());
    if (it == items_by_word_.end()) return {};
    const std::string exact_key = join(words, "_");
    for (const auto &key : it->second) {
      if (key == exact_key) continue;
      auto item = split(key, '_');
      if (item.size() < words.size()) continue;
      if (std::search(item.begin(), item.end(), words.begin(), words.end()) == item.end()) {
        continue;
      }
      for (const auto &id : lexicon_.at(key)) out.insert(id);
    }
    return {out.begin(), out.end()};
  }

  // Class nodes reachable from `id` over parent edges, including `id` itself
  // when it is a class.
  std::set<std::string> class_ancestors(const std::string &id) const {
    std::set<std::string> out;
    std::set<std::string> seen;
    std::vector<std::string> stack{id};
    while (!stack.empty()) {
      std::string cur = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(cur).second) continue;
      const TaxonomyNode *n = node(cur);
      if (!n) continue;
      if (n->kind == NodeKind::kClass) out.insert(cur);
      for (const auto &p : n->parents) stack.push_back(p);
    }
    return out;
  }

  // The closest class nodes above an instance. Instances under instances are
  // looked through.
  std::set<std::string> classes_of_instance(const std::string &id) const {
    std::set<std::string> out;
    std::set<std::string> seen;
    std::vector<std::string> frontier{id};
    while (!frontier.empty()) {
      std::string cur = std::move(frontier.back());
      frontier.pop_back();
      if (!seen.insert(cur).second) continue;
      const TaxonomyNode *n = node(cur);
      if (!n) continue;
      for (const auto &p : n->parents) {
        if (is_class(p)) out.insert(p);
        else frontier.push_back(p);
      }
    }
    return out;
  }

  // Checks acyclicity, instance ancestry and the person class.
  void validate() const {
    enum Mark { kNone, kActive, kDone };
    std::unordered_map<std::string, Mark> mark;
    std::function<void(const std::string &)> visit = [&](const std::string &id) {
      Mark &m = mark[id];
      if (m == kDone) return;
      if (m == kActive) throw StructureError("hypernym cycle", id);
      m = kActive;
      for (const auto &p : nodes_.at(id).parents) visit(p);
      mark[id] = kDone;
    };
    for (const auto &[id, n] : nodes_) visit(id);
    for (const auto &[id, n] : nodes_) {
      if (n.kind == NodeKind::kInstance && classes_of_instance(id).empty()) {
        throw StructureError("instance node has no class ancestor", id);
      }
    }
    if (!names_.empty() && !is_class(person_class_)) {
      throw StructureError("person class is not a declared class node", person_class_);
    }
  }

  static Taxonomy load(std::istream &in) {
    Taxonomy tax;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      chomp(line);
      std::string_view view = trim(line);
      if (view.empty() || view[0] == '#') continue;
      if (view.front() == '[' && view.back() == ']') {
        section = std::string(view.substr(1, view.size() - 2));
        if (section != "META" && section != "NODES" && section != "EDGES" &&
            section != "LEXICON" && section != "NAMES") {
          throw FormatError("unknown section [" + section + "]", lineno);
        }
        continue;
      }
      auto cols = split(line, '\t');
      if (cols.size() != 2) throw FormatError("expected two tab-separated columns", lineno);
      const std::string a(trim(cols[0]));
      const std::string b(trim(cols[1]));
      if (a.empty() || b.empty()) throw FormatError("empty column", lineno);
      try {
        if (section == "META") {
          if (a != "person_class") throw FormatError("unknown META key " + a, lineno);
          tax.set_person_class(b);
        } else if (section == "NODES") {
          if (b == "class") tax.add_node(a, NodeKind::kClass);
          else if (b == "instance") tax.add_node(a, NodeKind::kInstance);
          else throw FormatError("node kind must be class or instance", lineno);
        } else if (section == "EDGES") {
          tax.add_edge(a, b);
        } else if (section == "LEXICON") {
          tax.add_lexical(a, b);
        } else if (section == "NAMES") {
          if (b != "given" && b != "surname") {
            throw FormatError("name kind must be given or surname", lineno);
          }
          tax.add_name(a);
        } else {
          throw FormatError("row outside of a section", lineno);
        }
      } catch (const StructureError &e) {
        throw FormatError(e.what(), lineno);
      }
    }
    tax.validate();
    return tax;
  }

  static Taxonomy load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in);
  }

 private:
  std::map<std::string, TaxonomyNode> nodes_;
  std::unordered_map<std::string, std::vector<std::string>> lexicon_;
  std::unordered_map<std::string, std::vector<std::string>> items_by_word_;
  std::set<std::string> names_;
  std::string person_class_ = "wordnet_person";
};

}  // namespace mf

#endif  // MF_TAXONOMY_HPP_
