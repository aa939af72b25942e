//==============================================================================
// Copyright (c) 2026 The topisum Authors.
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
//==============================================================================
#include "topisum/synthetic.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "topisum/binary_io.hpp"

namespace topisum {

std::vector<std::string> synthetic_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Eigen::VectorXf synthetic_token_vector(std::string_view token, std::uint32_t dim, std::uint64_t seed) {
  // Entries 2j and 2j+1 come from one Box-Muller pair fed by the first 16
  // bytes of SHA-256("<seed>\x1f<token>\x1f<j>"), read as two big-endian u64.
  const std::string prefix = std::to_string(seed) + '\x1f' + std::string(token) + '\x1f';
  Eigen::VectorXf v(dim);
  for (std::uint32_t j = 0; 2 * j < dim; ++j) {
    const std::string digest = sha256_hex(prefix + std::to_string(j));
    const std::uint64_t a = std::stoull(digest.substr(0, 16), nullptr, 16);
    const std::uint64_t b = std::stoull(digest.substr(16, 16), nullptr, 16);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    v(2 * j) = static_cast<float>(radius * std::cos(angle));
    if (2 * j + 1 < dim) v(2 * j + 1) = static_cast<float>(radius * std::sin(angle));
  }
  return v;
}

EmbeddingStore synthetic_embeddings(const Corpus& corpus, std::uint32_t dim, std::uint64_t seed) {
  EmbeddingStore store(dim);
  for (const auto& entity : corpus.entities) {
    for (const Sentence* s : entity.sentences()) {
      const auto tokens = synthetic_tokens(s->text);
      EmbeddingMatrix m(static_cast<Eigen::Index>(tokens.size()), dim);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = synthetic_token_vector(tokens[i], dim, seed).transpose();
      }
      store.insert(SentKey{entity.entity_id, s->sent_id}, std::move(m));
    }
  }
  return store;
}

}  // namespace topisum
