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

// Proposition store: pattern-labeled lemma tuples with corpus frequencies.
//
// A store is filled during ingestion and then frozen. Freezing applies the
// low-frequency floor and builds two indexes, lexeme -> (tuple, position)
// and pattern -> tuples, after which the store is read-only and may be
// shared between threads.
//
// File format: UTF-8 TSV, one tuple per row,
//
//   label <TAB> slot_1 <TAB> ... <TAB> slot_n <TAB> frequency
//
// with rows sorted by (label, slots). Gzip-compressed files are detected by
// their magic bytes and inflated transparently on load.

#ifndef MF_STORE_HPP_
#define MF_STORE_HPP_

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mf/common.hpp"

namespace mf {

// Identity of a proposition: its pattern label and ordered slot fillers.
struct Tuple {
  std::string label;
  std::vector<Lexeme> slots;

  auto operator<=>(const Tuple &) const = default;
  bool operator==(const Tuple &) const = default;

  // "(VN fight poverty)"
  std::string to_string() const {
    return "(" + label + " " + join(slots, " ") + ")";
  }
};

struct TupleHash {
  std::size_t operator()(const Tuple &t) const {
    std::size_t seed = std::hash<std::string>{}(t.label);
    for (const auto &s : t.slots) hash_combine(seed, std::hash<std::string>{}(s));
    return seed;
  }
};

struct Proposition {
  Tuple tuple;
  std::uint64_t frequency = 0;

  bool operator==(const Proposition &) const = default;
};

// One extraction event: a tuple seen in a sentence, with provenance.
struct Occurrence {
  Tuple tuple;
  std::uint64_t frequency = 1;
  std::string sentence_id;
  std::vector<int> token_indices;  // in slot order

  bool operator==(const Occurrence &) const = default;
};

// A tuple with exactly one slot blanked. Blank slots are stored as "".
struct PatternKey {
  std::string label;
  std::vector<Lexeme> slots;
  std::size_t blank = 0;

  static PatternKey of(const Tuple &t, std::size_t position) {
    if (position >= t.slots.size()) {
      throw ContractError("pattern position " + std::to_string(position) +
                          " out of range for " + t.to_string());
    }
    PatternKey p{t.label, t.slots, position};
    p.slots[position].clear();
    return p;
  }

  bool matches(const Tuple &t) const {
    if (t.label != label || t.slots.size() != slots.size()) return false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (i != blank && t.slots[i] != slots[i]) return false;
    }
    return true;
  }

  // "(VN fight _)"
  std::string to_string() const {
    std::string out = "(" + label;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      out += ' ';
      out += i == blank ? std::string("_") : slots[i];
    }
    return out + ")";
  }

  auto operator<=>(const PatternKey &) const = default;
  bool operator==(const PatternKey &) const = default;
};

struct PatternKeyHash {
  std::size_t operator()(const PatternKey &p) const {
    std::size_t seed = std::hash<std::string>{}(p.label);
    hash_combine(seed, p.blank);
    for (const auto &s : p.slots) hash_combine(seed, std::hash<std::string>{}(s));
    return seed;
  }
};

// A lexeme occurrence inside a stored tuple.
struct Occupancy {
  const Proposition *proposition = nullptr;
  std::size_t position = 0;
};

namespace detail {

inline std::string inflate_gzip(const std::string &compressed) {
  z_stream zs{};
  // 16 + MAX_WBITS selects gzip framing.
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw FormatError("cannot initialize gzip decoder", 0);
  }
  zs.next_in = reinterpret_cast<Bytef *>(const_cast<char *>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::string out;
  char buffer[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef *>(buffer);
    zs.avail_out = sizeof(buffer);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FormatError("corrupt gzip stream", 0);
    }
    out.append(buffer, sizeof(buffer) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw FormatError("truncated gzip stream", 0);
    }
  }
  inflateEnd(&zs);
  return out;
}

// Reads the whole stream, inflating it when it carries the gzip magic.
inline std::string read_maybe_gzip(std::istream &in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  if (data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
      static_cast<unsigned char>(data[1]) == 0x8b) {
    return inflate_gzip(data);
  }
  return data;
}

inline bool parse_count(std::string_view s, std::uint64_t &value) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

class Store {
 public:
  Store() = default;

  // Adds `frequency` to the count of `tuple`.
  void add(const Tuple &tuple, std::uint64_t frequency = 1) {
    if (frozen_) throw StateError("cannot add to a frozen store");
    check_tuple(tuple);
    if (frequency == 0) throw ContractError("frequency must be >= 1");
    counts_[tuple] += frequency;
  }

  void add(const Occurrence &occ) { add(occ.tuple, occ.frequency); }

  // Additive merge of another shard into this one.
  void merge(const Store &other) {
    if (frozen_) throw StateError("cannot merge into a frozen store");
    for (const auto &[tuple, freq] : other.counts_) counts_[tuple] += freq;
  }

  // Drops tuples below `min_freq` and builds the query indexes.
  void freeze(std::uint64_t min_freq = 1) {
    if (frozen_) throw StateError("store is already frozen");
    if (min_freq == 0) throw ContractError("min_freq must be >= 1");
    std::erase_if(counts_, [&](const auto &kv) { return kv.second < min_freq; });
    rows_.clear();
    rows_.reserve(counts_.size());
    for (const auto &[tuple, freq] : counts_) rows_.push_back({tuple, freq});
    for (std::uint32_t r = 0; r < rows_.size(); ++r) {
      const Tuple &t = rows_[r].tuple;
      for (std::uint32_t i = 0; i < t.slots.size(); ++i) {
        lexeme_index_[t.slots[i]].emplace_back(r, i);
        auto &entry = pattern_index_[PatternKey::of(t, i)];
        entry.rows.push_back(r);
        entry.total += rows_[r].frequency;
      }
    }
    frozen_ = true;
  }

  bool frozen() const { return frozen_; }
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }

  std::uint64_t total_frequency() const {
    std::uint64_t total = 0;
    for (const auto &[tuple, freq] : counts_) total += freq;
    return total;
  }

  // Zero when the tuple is absent.
  std::uint64_t frequency(const Tuple &tuple) const {
    auto it = counts_.find(tuple);
    return it == counts_.end() ? 0 : it->second;
  }

  // All entries in (label, slots) order. Available in any state.
  std::vector<Proposition> propositions() const {
    std::vector<Proposition> out;
    out.reserve(counts_.size());
    for (const auto &[tuple, freq] : counts_) out.push_back({tuple, freq});
    return out;
  }

  // Frozen entries in (label, slots) order.
  const std::vector<Proposition> &rows() const {
    require_frozen();
    return rows_;
  }

  // Every (tuple, position) whose slot equals `lexeme`, in row order. A tuple
  // holding the lexeme in two slots is reported twice.
  std::vector<Occupancy> tuples_containing(const Lexeme &lexeme) const {
    require_frozen();
    std::vector<Occupancy> out;
    auto it = lexeme_index_.find(lexeme);
    if (it == lexeme_index_.end()) return out;
    out.reserve(it->second.size());
    for (auto [row, pos] : it->second) out.push_back({&rows_[row], pos});
    return out;
  }

  // Tuples t with p_blank(t) == pattern, in row order.
  std::vector<const Proposition *> tuples_matching(const PatternKey &pattern) const {
    require_frozen();
    std::vector<const Proposition *> out;
    auto it = pattern_index_.find(pattern);
    if (it == pattern_index_.end()) return out;
    out.reserve(it->second.rows.size());
    for (auto row : it->second.rows) out.push_back(&rows_[row]);
    return out;
  }

  // Summed frequency of the tuples matching `pattern`.
  std::uint64_t pattern_frequency(const PatternKey &pattern) const {
    require_frozen();
    auto it = pattern_index_.find(pattern);
    return it == pattern_index_.end() ? 0 : it->second.total;
  }

  // Entry equality; the frozen flag and indexes are not compared.
  bool operator==(const Store &other) const { return counts_ == other.counts_; }

  void save(std::ostream &out) const {
    for (const auto &[tuple, freq] : counts_) {
      out << tuple.label;
      for (const auto &s : tuple.slots) out << '\t' << s;
      out << '\t' << freq << '\n';
    }
  }

  void save_file(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    save(out);
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  // Parses a (possibly gzip-compressed) store. The result is not frozen.
  static Store load(std::istream &in) {
    std::istringstream text(detail::read_maybe_gzip(in));
    Store store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(text, line)) {
      ++lineno;
      chomp(line);
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() < 3) throw FormatError("expected label, slots and frequency", lineno);
      Tuple t{cols.front(), {cols.begin() + 1, cols.end() - 1}};
      std::size_t arity = 0;
      try {
        arity = label_arity(t.label);
      } catch (const ContractError &e) {
        throw FormatError(e.what(), lineno);
      }
      if (t.slots.size() != arity) {
        throw FormatError("label " + t.label + " has arity " + std::to_string(arity) +
                              ", row has " + std::to_string(t.slots.size()) + " slots",
                          lineno);
      }
      std::uint64_t freq = 0;
      if (!detail::parse_count(cols.back(), freq) || freq == 0) {
        throw FormatError("frequency must be a positive integer, got '" + cols.back() + "'",
                          lineno);
      }
      for (const auto &s : t.slots) {
        if (s.empty()) throw FormatError("empty slot", lineno);
      }
      store.counts_[std::move(t)] += freq;
    }
    return store;
  }

  static Store load_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in);
  }

 private:
  struct PatternEntry {
    std::vector<std::uint32_t> rows;
    std::uint64_t total = 0;
  };

  static void check_tuple(const Tuple &t) {
    if (t.slots.size() != label_arity(t.label)) {
      throw ContractError(t.to_string() + " does not match the arity of " + t.label);
    }
    for (const auto &s : t.slots) {
      if (s.empty() || s.find_first_of("\t\n\r") != std::string::npos) {
        throw ContractError("invalid slot in " + t.to_string());
      }
    }
  }

  void require_frozen() const {
    if (!frozen_) throw StateError("store must be frozen before queries");
  }

  std::map<Tuple, std::uint64_t> counts_;
  bool frozen_ = false;
  std::vector<Proposition> rows_;
  std::unordered_map<Lexeme, std::vector<std::pair<std::uint32_t, std::uint32_t>>>
      lexeme_index_;
  std::unordered_map<PatternKey, PatternEntry, PatternKeyHash> pattern_index_;
};

}  // namespace mf

#endif  // MF_STORE_HPP_
