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

#ifndef MF_CONLLU_HPP_
#define MF_CONLLU_HPP_

#include <charconv>
#include <istream>
#include <string>
#include <vector>

#include "mf/common.hpp"

namespace mf {

struct Token {
  int index = 0;  // 1-based
  std::string surface;
  std::string lemma;  // lower-cased; falls back to the form when '_'
  std::string upos;
  int head = 0;  // 0 is the root
  std::string deprel;
};

struct Sentence {
  std::string id;
  std::string text;  // from "# text = ..." when present
  std::vector<Token> tokens;

  // Token with 1-based index `i`; tokens are stored contiguously.
  const Token &token(int i) const { return tokens.at(static_cast<std::size_t>(i - 1)); }
};

namespace detail {

inline bool parse_int(const std::string &s, int &value) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Checks index contiguity, head range and self loops.
inline void validate_sentence(const Sentence &s) {
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Token &t = s.tokens[i];
    if (t.index != static_cast<int>(i) + 1) {
      throw StructureError("token ids must be 1..n without gaps, found " +
                               std::to_string(t.index) + " at position " +
                               std::to_string(i + 1),
                           "sentence " + s.id);
    }
    if (t.head < 0 || t.head > static_cast<int>(s.tokens.size())) {
      throw StructureError("token " + std::to_string(t.index) + " has dangling head " +
                               std::to_string(t.head),
                           "sentence " + s.id);
    }
    if (t.head == t.index) {
      throw StructureError("token " + std::to_string(t.index) + " is its own head",
                           "sentence " + s.id);
    }
  }
}

}  // namespace detail

// Reads CoNLL-U. Multiword-token ranges ("3-4") and empty nodes ("5.1") are
// skipped. Sentence ids come from "# sent_id = ..." comments, otherwise the
// 1-based ordinal of the block.
inline std::vector<Sentence> parse_conllu(std::istream &in) {
  std::vector<Sentence> sentences;
  Sentence current;
  bool open = false;
  std::size_t lineno = 0;
  std::size_t ordinal = 0;

  auto finish = [&] {
    if (!open) return;
    ++ordinal;
    if (current.id.empty()) current.id = std::to_string(ordinal);
    if (!current.tokens.empty()) {
      detail::validate_sentence(current);
      sentences.push_back(std::move(current));
    }
    current = Sentence{};
    open = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    chomp(line);
    if (trim(line).empty()) {
      finish();
      continue;
    }
    open = true;
    if (line[0] == '#') {
      std::string_view body = trim(std::string_view(line).substr(1));
      auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        std::string_view key = trim(body.substr(0, eq));
        std::string_view value = trim(body.substr(eq + 1));
        if (key == "sent_id") current.id = value;
        else if (key == "text") current.text = value;
      }
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw FormatError("expected 10 tab-separated columns, got " +
                            std::to_string(cols.size()),
                        lineno);
    }
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    Token tok;
    if (!detail::parse_int(cols[0], tok.index)) {
      throw FormatError("non-numeric ID '" + cols[0] + "'", lineno);
    }
    if (!detail::parse_int(cols[6], tok.head)) {
      throw FormatError("non-numeric HEAD '" + cols[6] + "'", lineno);
    }
    tok.surface = cols[1];
    tok.lemma = ascii_lower(cols[2] == "_" || cols[2].empty() ? cols[1] : cols[2]);
    tok.upos = cols[3];
    tok.deprel = cols[7];
    current.tokens.push_back(std::move(tok));
  }
  finish();
  return sentences;
}

}  // namespace mf

#endif  // MF_CONLLU_HPP_
