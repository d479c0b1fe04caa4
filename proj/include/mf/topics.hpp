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

#ifndef MF_TOPICS_HPP_
#define MF_TOPICS_HPP_

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "mf/common.hpp"

namespace mf {

// Per-word topic probabilities phi_t(w) of a trained topic model. Each topic
// column is a distribution over the vocabulary.
//
// File format: a header line "T=<count>", then one row per word:
//   lexeme <TAB> p_1 <TAB> ... <TAB> p_T
class TopicMatrix {
 public:
  explicit TopicMatrix(std::size_t topics) : topics_(topics) {
    if (topics == 0) throw ContractError("topic count must be >= 1");
  }

  std::size_t topics() const { return topics_; }
  std::size_t vocabulary_size() const { return phi_.size(); }

  void set(const Lexeme &word, std::vector<double> probs) {
    if (probs.size() != topics_) {
      throw ContractError("'" + word + "' has " + std::to_string(probs.size()) +
                          " topic values, expected " + std::to_string(topics_));
    }
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ContractError("topic probabilities of '" + word + "' must be finite and >= 0");
      }
    }
    phi_[word] = std::move(probs);
  }

  // nullptr for out-of-vocabulary words.
  const std::vector<double> *find(const Lexeme &word) const {
    auto it = phi_.find(word);
    return it == phi_.end() ? nullptr : &it->second;
  }

  // Throws StructureError unless every topic column sums to 1 within `tol`.
  void check_normalized(double tol = 1e-6) const {
    std::vector<double> sums(topics_, 0.0);
    for (const auto &[word, probs] : phi_) {
      for (std::size_t t = 0; t < topics_; ++t) sums[t] += probs[t];
    }
    for (std::size_t t = 0; t < topics_; ++t) {
      if (std::abs(sums[t] - 1.0) > tol) {
        throw StructureError("topic column sums to " + std::to_string(sums[t]),
                             "topic " + std::to_string(t + 1));
      }
    }
  }

  static TopicMatrix load(std::istream &in, bool require_normalized = true) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t topics = 0;
    while (std::getline(in, line)) {
      ++lineno;
      chomp(line);
      auto view = trim(line);
      if (view.empty()) continue;
      if (view.substr(0, 2) != "T=") throw FormatError("expected header T=<count>", lineno);
      std::string count(view.substr(2));
      char *end = nullptr;
      long value = std::strtol(count.c_str(), &end, 10);
      if (count.empty() || *end != '\0' || value <= 0) {
        throw FormatError("bad topic count '" + count + "'", lineno);
      }
      topics = static_cast<std::size_t>(value);
      break;
    }
    if (topics == 0) throw FormatError("missing header T=<count>", lineno);

    TopicMatrix tm(topics);
    while (std::getline(in, line)) {
      ++lineno;
      chomp(line);
      if (trim(line).empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != topics + 1) {
        throw FormatError("expected word and " + std::to_string(topics) + " values", lineno);
      }
      std::vector<double> probs;
      probs.reserve(topics);
      for (std::size_t i = 1; i < cols.size(); ++i) {
        char *end = nullptr;
        double p = std::strtod(cols[i].c_str(), &end);
        if (cols[i].empty() || *end != '\0') {
          throw FormatError("non-numeric probability '" + cols[i] + "'", lineno);
        }
        probs.push_back(p);
      }
      try {
        tm.set(cols[0], std::move(probs));
      } catch (const ContractError &e) {
        throw FormatError(e.what(), lineno);
      }
    }
    if (require_normalized) tm.check_normalized();
    return tm;
  }

  static TopicMatrix load_file(const std::string &path, bool require_normalized = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load(in, require_normalized);
  }

 private:
  std::size_t topics_;
  std::map<Lexeme, std::vector<double>> phi_;
};

struct Relatedness {
  double value = 0.0;
  bool out_of_vocabulary = false;
};

// Topic-model relatedness: the dot product of the two words' topic vectors.
// A word missing from the matrix gives 0 with the OOV flag set.
inline Relatedness relatedness(const Lexeme &w1, const Lexeme &w2, const TopicMatrix &tm) {
  const auto *a = tm.find(w1);
  const auto *b = tm.find(w2);
  if (!a || !b) return {0.0, true};
  double sum = 0.0;
  for (std::size_t t = 0; t < tm.topics(); ++t) sum += (*a)[t] * (*b)[t];
  return {sum, false};
}

}  // namespace mf

#endif  // MF_TOPICS_HPP_
