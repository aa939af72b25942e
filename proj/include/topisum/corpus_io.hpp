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
#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace topisum {

struct Sentence {
  std::uint32_t sent_id = 0;
  std::string text;
};

struct Review {
  std::string review_id;
  std::vector<Sentence> sentences;
};

// An entity owns its reviews; sentence ids are dense over the union of the
// reviews' sentences, in document order.
struct Entity {
  std::string entity_id;
  std::vector<Review> reviews;

  std::size_t sentence_count() const noexcept;
  // All sentences in sent_id order.
  std::vector<const Sentence*> sentences() const;
  const Sentence& sentence(std::uint32_t sent_id) const;
};

struct Corpus {
  std::vector<Entity> entities;

  const Entity& entity(std::string_view entity_id) const;
  const Entity* find(std::string_view entity_id) const noexcept;
};

enum class CorpusFormat { kJsonl };

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::kJsonl);
Corpus parse_corpus_jsonl(std::istream& in);
// Canonical JSONL rendering: one review per line, entities and reviews in corpus order.
std::string corpus_to_jsonl(const Corpus& corpus);

struct AspectLexicon {
  std::string aspect_name;
  std::vector<std::string> keywords;
};

// Lowercases keywords and rejects empty or duplicate keyword lists.
AspectLexicon make_aspect_lexicon(std::string aspect_name, std::vector<std::string> keywords);
AspectLexicon load_aspect_lexicon(const std::filesystem::path& path);

struct MatchOptions {
  // Fold a trailing plural "s" ("beds" -> "bed") on both sides of the match.
  bool fold_plurals = true;
};

// Lowercase, split on Unicode whitespace, strip leading/trailing ASCII
// punctuation, optionally fold plurals. Tokens that end up empty are dropped.
std::vector<std::string> tokenize_for_matching(std::string_view text, const MatchOptions& options = {});

std::set<std::uint32_t> match_aspect_sentences(const Corpus& corpus, std::string_view entity_id,
                                               const AspectLexicon& lexicon,
                                               const MatchOptions& options = {});

struct SentKey {
  std::string entity_id;
  std::uint32_t sent_id = 0;

  auto operator<=>(const SentKey&) const = default;
  bool operator==(const SentKey&) const = default;
};

std::string to_string(const SentKey& key);

using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Frozen per-sentence token embeddings; row i of a matrix is token i.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }

  // Validates shape (L >= 1, d columns) and finiteness.
  void insert(SentKey key, EmbeddingMatrix matrix);
  const EmbeddingMatrix& at(const SentKey& key) const;
  bool contains(const SentKey& key) const { return sentences_.count(key) != 0; }
  std::size_t total_rows() const noexcept;

  const std::map<SentKey, EmbeddingMatrix>& sentences() const noexcept { return sentences_; }

  // Bit-for-bit equality of dims, keys and payloads.
  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  std::uint32_t dim_;
  std::map<SentKey, EmbeddingMatrix> sentences_;
};

inline constexpr char kEmbeddingMagic[4] = {'G', 'S', 'E', 'M'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 4 + 2 + 4 + 8;

std::string encode_embedding_store(const EmbeddingStore& store);
EmbeddingStore decode_embedding_store(std::string_view bytes);
EmbeddingStore read_embedding_file(const std::filesystem::path& path);
void write_embedding_file(const EmbeddingStore& store, const std::filesystem::path& path);

}  // namespace topisum
