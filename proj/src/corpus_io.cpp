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
#include "topisum/corpus_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "topisum/binary_io.hpp"
#include "topisum/errors.hpp"

namespace topisum {

using nlohmann::json;

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

// Byte length of a Unicode whitespace sequence starting at s[i], or 0.
std::size_t whitespace_len(std::string_view s, std::size_t i) {
  const auto at = [&](std::size_t k) -> unsigned char {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0;
  };
  const unsigned char c0 = at(0);
  if (c0 == ' ' || (c0 >= 0x09 && c0 <= 0x0D)) return 1;
  if (c0 == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
  if (c0 == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;  // U+1680
  if (c0 == 0xE2 && at(1) == 0x80) {
    const unsigned char c2 = at(2);
    if ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9 || c2 == 0xAF) return 3;
  }
  if (c0 == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;  // U+205F
  if (c0 == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;  // U+3000
  return 0;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string fold_plural(std::string token) {
  if (token.size() > 3 && token.back() == 's' && token[token.size() - 2] != 's') {
    token.pop_back();
  }
  return token;
}

}  // namespace

std::size_t Entity::sentence_count() const noexcept {
  std::size_t n = 0;
  for (const auto& r : reviews) n += r.sentences.size();
  return n;
}

std::vector<const Sentence*> Entity::sentences() const {
  std::vector<const Sentence*> out;
  out.reserve(sentence_count());
  for (const auto& r : reviews) {
    for (const auto& s : r.sentences) out.push_back(&s);
  }
  return out;
}

const Sentence& Entity::sentence(std::uint32_t sent_id) const {
  for (const auto& r : reviews) {
    if (!r.sentences.empty() && sent_id >= r.sentences.front().sent_id &&
        sent_id <= r.sentences.back().sent_id) {
      return r.sentences[sent_id - r.sentences.front().sent_id];
    }
  }
  throw LookupError("entity '" + entity_id + "' has no sentence " + std::to_string(sent_id));
}

const Entity* Corpus::find(std::string_view entity_id) const noexcept {
  for (const auto& e : entities) {
    if (e.entity_id == entity_id) return &e;
  }
  return nullptr;
}

const Entity& Corpus::entity(std::string_view entity_id) const {
  if (const Entity* e = find(entity_id)) return *e;
  throw LookupError("unknown entity '" + std::string(entity_id) + "'");
}

Corpus parse_corpus_jsonl(std::istream& in) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> entity_index;
  std::set<std::pair<std::string, std::string>> seen_reviews;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::string where = "line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": malformed JSON: " + e.what());
    }
    if (!record.is_object() || !record.contains("entity_id") || !record["entity_id"].is_string() ||
        !record.contains("review_id") || !record["review_id"].is_string() ||
        !record.contains("sentences") || !record["sentences"].is_array()) {
      throw ParseError(where + ": expected {entity_id: str, review_id: str, sentences: [str]}");
    }
    const std::string entity_id = record["entity_id"].get<std::string>();
    const std::string review_id = record["review_id"].get<std::string>();
    if (!seen_reviews.emplace(entity_id, review_id).second) {
      throw DuplicateError(where + ": duplicate review (" + entity_id + ", " + review_id + ")");
    }
    auto [it, inserted] = entity_index.try_emplace(entity_id, corpus.entities.size());
    if (inserted) corpus.entities.push_back(Entity{entity_id, {}});
    Entity& entity = corpus.entities[it->second];

    Review review{review_id, {}};
    auto next_id = static_cast<std::uint32_t>(entity.sentence_count());
    for (const auto& s : record["sentences"]) {
      if (!s.is_string()) throw ParseError(where + ": sentence is not a string");
      std::string text = s.get<std::string>();
      if (is_blank(text)) throw ParseError(where + ": empty sentence text");
      review.sentences.push_back(Sentence{next_id++, std::move(text)});
    }
    entity.reviews.push_back(std::move(review));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  if (format != CorpusFormat::kJsonl) throw ArgumentError("unsupported corpus format");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return parse_corpus_jsonl(in);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& e : corpus.entities) {
    for (const auto& r : e.reviews) {
      json sentences = json::array();
      for (const auto& s : r.sentences) sentences.push_back(s.text);
      json record = {{"entity_id", e.entity_id}, {"review_id", r.review_id}, {"sentences", sentences}};
      out += record.dump();
      out += '\n';
    }
  }
  return out;
}

AspectLexicon make_aspect_lexicon(std::string aspect_name, std::vector<std::string> keywords) {
  if (keywords.empty()) throw ValidationError("aspect '" + aspect_name + "' has no keywords");
  std::set<std::string> seen;
  for (auto& k : keywords) {
    std::transform(k.begin(), k.end(), k.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (is_blank(k)) throw ValidationError("aspect '" + aspect_name + "' has an empty keyword");
    if (!seen.insert(k).second) {
      throw ValidationError("aspect '" + aspect_name + "' repeats keyword '" + k + "'");
    }
  }
  return AspectLexicon{std::move(aspect_name), std::move(keywords)};
}

AspectLexicon load_aspect_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("aspect") || !doc["aspect"].is_string() ||
      !doc.contains("keywords") || !doc["keywords"].is_array()) {
    throw ParseError(path.string() + ": expected {aspect: str, keywords: [str]}");
  }
  std::vector<std::string> keywords;
  for (const auto& k : doc["keywords"]) {
    if (!k.is_string()) throw ParseError(path.string() + ": keyword is not a string");
    keywords.push_back(k.get<std::string>());
  }
  return make_aspect_lexicon(doc["aspect"].get<std::string>(), std::move(keywords));
}

std::vector<std::string> tokenize_for_matching(std::string_view text, const MatchOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && is_ascii_punct(current[b])) ++b;
    while (e > b && is_ascii_punct(current[e - 1])) --e;
    if (e > b) {
      std::string token = current.substr(b, e - b);
      tokens.push_back(options.fold_plurals ? fold_plural(std::move(token)) : std::move(token));
    }
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    if (std::size_t ws = whitespace_len(text, i)) {
      flush();
      i += ws;
      continue;
    }
    current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    ++i;
  }
  flush();
  return tokens;
}

std::set<std::uint32_t> match_aspect_sentences(const Corpus& corpus, std::string_view entity_id,
                                               const AspectLexicon& lexicon,
                                               const MatchOptions& options) {
  const Entity& entity = corpus.entity(entity_id);
  std::vector<std::vector<std::string>> patterns;
  for (const auto& k : lexicon.keywords) {
    auto p = tokenize_for_matching(k, options);
    if (!p.empty()) patterns.push_back(std::move(p));
  }
  std::set<std::uint32_t> matched;
  for (const Sentence* s : entity.sentences()) {
    const auto tokens = tokenize_for_matching(s->text, options);
    const bool hit = std::any_of(patterns.begin(), patterns.end(), [&](const auto& p) {
      return std::search(tokens.begin(), tokens.end(), p.begin(), p.end()) != tokens.end();
    });
    if (hit) matched.insert(s->sent_id);
  }
  return matched;
}

std::string to_string(const SentKey& key) {
  return "(" + key.entity_id + ", " + std::to_string(key.sent_id) + ")";
}

void EmbeddingStore::insert(SentKey key, EmbeddingMatrix matrix) {
  if (matrix.rows() < 1) throw ShapeError("sentence " + to_string(key) + " has no token rows");
  if (matrix.cols() != static_cast<Eigen::Index>(dim_)) {
    throw ShapeError("sentence " + to_string(key) + " has " + std::to_string(matrix.cols()) +
                     " columns, store dim is " + std::to_string(dim_));
  }
  if (!matrix.allFinite()) throw ValidationError("sentence " + to_string(key) + " has non-finite values");
  if (sentences_.count(key)) throw DuplicateError("sentence " + to_string(key) + " inserted twice");
  sentences_.emplace(std::move(key), std::move(matrix));
}

const EmbeddingMatrix& EmbeddingStore::at(const SentKey& key) const {
  auto it = sentences_.find(key);
  if (it == sentences_.end()) throw LookupError("no embeddings for sentence " + to_string(key));
  return it->second;
}

std::size_t EmbeddingStore::total_rows() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, m] : sentences_) n += static_cast<std::size_t>(m.rows());
  return n;
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  if (a.dim_ != b.dim_ || a.sentences_.size() != b.sentences_.size()) return false;
  for (auto ia = a.sentences_.begin(), ib = b.sentences_.begin(); ia != a.sentences_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const auto& ma = ia->second;
    const auto& mb = ib->second;
    if (ma.rows() != mb.rows() || ma.cols() != mb.cols()) return false;
    if (std::memcmp(ma.data(), mb.data(), sizeof(float) * static_cast<std::size_t>(ma.size())) != 0) {
      return false;
    }
  }
  return true;
}

std::string encode_embedding_store(const EmbeddingStore& store) {
  BinaryWriter w;
  w.put_bytes(std::string_view(kEmbeddingMagic, 4));
  w.put<std::uint16_t>(kEmbeddingVersion);
  w.put<std::uint32_t>(store.dim());
  w.put<std::uint64_t>(store.size());
  for (const auto& [key, m] : store.sentences()) {
    if (key.entity_id.size() > 0xFFFF) throw FormatError("entity id too long: " + to_string(key));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(key.entity_id.size()));
    w.put_bytes(key.entity_id);
    w.put<std::uint32_t>(key.sent_id);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.rows()));
    w.put_span(std::span<const float>(m.data(), static_cast<std::size_t>(m.size())));
  }
  return std::move(w).take();
}

EmbeddingStore decode_embedding_store(std::string_view bytes) {
  BinaryReader r(std::span<const char>(bytes.data(), bytes.size()));
  r.set_context("header");
  if (r.get_bytes(4) != std::string_view(kEmbeddingMagic, 4)) throw FormatError("bad magic: not a GSEM file");
  const auto version = r.get<std::uint16_t>();
  if (version != kEmbeddingVersion) {
    throw FormatError("unsupported GSEM version " + std::to_string(version));
  }
  const auto dim = r.get<std::uint32_t>();
  const auto count = r.get<std::uint64_t>();
  EmbeddingStore store(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    r.set_context("record " + std::to_string(i));
    const auto id_len = r.get<std::uint16_t>();
    SentKey key{r.get_bytes(id_len), 0};
    r.set_context("record " + std::to_string(i) + " entity '" + key.entity_id + "'");
    key.sent_id = r.get<std::uint32_t>();
    r.set_context("sent_key " + to_string(key));
    const auto rows = r.get<std::uint32_t>();
    if (dim != 0 && r.remaining() / (sizeof(float) * dim) < rows) {
      // get_into would also catch this; check first to avoid a huge allocation.
      r.get_bytes(r.remaining() + 1);
    }
    EmbeddingMatrix m(rows, dim);
    r.get_into(std::span<float>(m.data(), static_cast<std::size_t>(m.size())));
    if (store.contains(key)) throw FormatError("duplicate record for sent_key " + to_string(key));
    store.insert(std::move(key), std::move(m));
  }
  if (!r.at_end()) {
    throw FormatError(std::to_string(r.remaining()) + " trailing bytes after " + std::to_string(count) +
                      " records");
  }
  return store;
}

EmbeddingStore read_embedding_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_embedding_store(std::string_view(bytes.data(), bytes.size()));
}

void write_embedding_file(const EmbeddingStore& store, const std::filesystem::path& path) {
  write_file_bytes(path, encode_embedding_store(store));
}

}  // namespace topisum
