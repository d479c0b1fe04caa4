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

#ifndef MF_COMMON_HPP_
#define MF_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mf {

// A lemma or a taxonomy class id filling a proposition slot. Multiword
// lexemes join their parts with '_' (e.g. "new_york", "out_of").
using Lexeme = std::string;

// Error raised while reading any of the line-oriented input formats.
// `line` is 1-based; 0 means the position is unknown.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string &what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input is well-formed line by line but violates a structural invariant
// (dangling head index, cyclic taxonomy, ...).
class StructureError : public std::runtime_error {
 public:
  StructureError(const std::string &what, std::string where)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string &where() const { return where_; }

 private:
  std::string where_;
};

// Mutation of a frozen store, or a query against an unfrozen one.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Operation precondition violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Word classes a pattern label is built from.
enum class SlotKind { kNoun, kVerb, kPrep, kAdj, kAdv };

// Splits a pattern label such as "NVPN" or "AdvPN" into its slot kinds.
// Throws ContractError on an unknown component.
inline std::vector<SlotKind> label_components(std::string_view label) {
  std::vector<SlotKind> kinds;
  std::size_t i = 0;
  while (i < label.size()) {
    if (label.substr(i, 3) == "Adv") {
      kinds.push_back(SlotKind::kAdv);
      i += 3;
      continue;
    }
    switch (label[i]) {
      case 'N': kinds.push_back(SlotKind::kNoun); break;
      case 'V': kinds.push_back(SlotKind::kVerb); break;
      case 'P': kinds.push_back(SlotKind::kPrep); break;
      case 'A': kinds.push_back(SlotKind::kAdj); break;
      default:
        throw ContractError("unknown pattern label component in '" +
                            std::string(label) + "'");
    }
    ++i;
  }
  if (kinds.empty()) throw ContractError("empty pattern label");
  return kinds;
}

inline std::size_t label_arity(std::string_view label) {
  return label_components(label).size();
}

// ASCII lower-casing; bytes >= 0x80 pass through untouched.
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      return parts;
    }
    parts.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
}

inline std::string join(const std::vector<std::string> &parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const char *ws = " \t\r\n";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Strips a trailing '\r' so CRLF files read like LF files.
inline void chomp(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// 64-bit FNV-1a. Used where a hash must be stable across platforms and
// standard library implementations (sampling seeds).
inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline void hash_combine(std::size_t &seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace mf

#endif  // MF_COMMON_HPP_
