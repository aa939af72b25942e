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
#include "topisum/topical_repr.hpp"

#include <algorithm>
#include <cmath>

#include "topisum/binary_io.hpp"
#include "topisum/errors.hpp"

namespace topisum {

Eigen::VectorXf word_representation(const ModelState& model, const Eigen::Ref<const Eigen::VectorXf>& z) {
  const auto m = static_cast<Eigen::Index>(model.config.m);
  Eigen::VectorXf out(m * static_cast<Eigen::Index>(model.layers.size()));
  for (std::size_t j = 0; j < model.layers.size(); ++j) {
    out.segment(static_cast<Eigen::Index>(j) * m, m) = kernel_forward<float>(model.layers[j], z);
  }
  return out;
}

TopicalRep sentence_representation(const ModelState& model, const EmbeddingMatrix& words, SentKey key) {
  if (words.rows() == 0) throw ArgumentError("sentence " + to_string(key) + " has no words");
  Eigen::VectorXf pooled;
  for (Eigen::Index i = 0; i < words.rows(); ++i) {
    Eigen::VectorXf x = word_representation(model, words.row(i).transpose());
    if (i == 0) {
      pooled = std::move(x);
    } else {
      pooled = pooled.cwiseMax(x);
    }
  }
  const double l1 = pooled.cast<double>().sum();
  if (!(l1 > 0.0)) {
    throw DegenerateError("sentence " + to_string(key) + " pools to an all-zero representation");
  }
  pooled = (pooled.cast<double>() / l1).cast<float>();
  return TopicalRep{std::move(key), std::move(pooled)};
}

std::vector<TopicalRep> represent_entity(const ModelState& model, const Entity& entity,
                                         const EmbeddingStore& store) {
  std::vector<TopicalRep> reps;
  reps.reserve(entity.sentence_count());
  for (const Sentence* s : entity.sentences()) {
    SentKey key{entity.entity_id, s->sent_id};
    const auto& words = store.at(key);
    reps.push_back(sentence_representation(model, words, std::move(key)));
  }
  return reps;
}

Eigen::VectorXf mean_representation(std::span<const TopicalRep> reps) {
  if (reps.empty()) throw ArgumentError("mean_representation: empty list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(reps.front().values.size());
  for (const auto& r : reps) {
    if (r.values.size() != sum.size()) throw ShapeError("mean_representation: mixed dimensions");
    sum += r.values.cast<double>();
  }
  return (sum / static_cast<double>(reps.size())).cast<float>();
}

SparsityProfile sparsity_profile(std::span<const TopicalRep> reps) {
  if (reps.empty()) throw ArgumentError("sparsity_profile: empty list");
  const auto n = static_cast<std::size_t>(reps.front().values.size());
  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  std::vector<float> sorted(n);
  for (const auto& r : reps) {
    if (static_cast<std::size_t>(r.values.size()) != n) throw ShapeError("sparsity_profile: mixed dimensions");
    std::copy(r.values.data(), r.values.data() + n, sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) sum[i] += sorted[i];
  }
  const auto count = static_cast<double>(reps.size());
  SparsityProfile p{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) p.mean[i] = sum[i] / count;
  // Second pass keeps the variance non-negative and exact for identical reps.
  for (const auto& r : reps) {
    std::copy(r.values.data(), r.values.data() + n, sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = sorted[i] - p.mean[i];
      sum_sq[i] += dev * dev;
    }
  }
  for (std::size_t i = 0; i < n; ++i) p.stddev[i] = std::sqrt(sum_sq[i] / count);
  return p;
}

double small_entry_fraction(const Eigen::VectorXf& values, double relative) {
  if (values.size() == 0) return 0.0;
  const double threshold = relative * static_cast<double>(values.maxCoeff());
  Eigen::Index small = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) small += values(i) <= threshold ? 1 : 0;
  return static_cast<double>(small) / static_cast<double>(values.size());
}

std::vector<TopicalRep> RepDump::entity(std::string_view entity_id) const {
  std::vector<TopicalRep> out;
  for (const auto& r : reps) {
    if (r.key.entity_id == entity_id) out.push_back(r);
  }
  return out;
}

std::string encode_rep_dump(const RepDump& dump) {
  std::vector<const TopicalRep*> order;
  for (const auto& r : dump.reps) {
    if (r.values.size() != static_cast<Eigen::Index>(dump.dim)) {
      throw ShapeError("rep " + to_string(r.key) + " has length " + std::to_string(r.values.size()) +
                       ", dump dim is " + std::to_string(dump.dim));
    }
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->key < b->key; });
  BinaryWriter w;
  w.put_bytes(std::string_view(kRepMagic, 4));
  w.put<std::uint16_t>(kRepVersion);
  w.put<std::uint32_t>(dump.dim);
  w.put<std::uint64_t>(order.size());
  for (const auto* r : order) {
    if (r->key.entity_id.size() > 0xFFFF) throw FormatError("entity id too long: " + to_string(r->key));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(r->key.entity_id.size()));
    w.put_bytes(r->key.entity_id);
    w.put<std::uint32_t>(r->key.sent_id);
    w.put_span(std::span<const float>(r->values.data(), static_cast<std::size_t>(r->values.size())));
  }
  return std::move(w).take();
}

RepDump decode_rep_dump(std::string_view bytes) {
  BinaryReader r(std::span<const char>(bytes.data(), bytes.size()));
  r.set_context("header");
  if (r.get_bytes(4) != std::string_view(kRepMagic, 4)) throw FormatError("bad magic: not a GSRP file");
  const auto version = r.get<std::uint16_t>();
  if (version != kRepVersion) throw FormatError("unsupported GSRP version " + std::to_string(version));
  RepDump dump;
  dump.dim = r.get<std::uint32_t>();
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    r.set_context("record " + std::to_string(i));
    const auto id_len = r.get<std::uint16_t>();
    SentKey key{r.get_bytes(id_len), 0};
    key.sent_id = r.get<std::uint32_t>();
    r.set_context("sent_key " + to_string(key));
    if (r.remaining() / sizeof(float) < dump.dim) r.get_bytes(r.remaining() + 1);
    Eigen::VectorXf values(dump.dim);
    r.get_into(std::span<float>(values.data(), dump.dim));
    if (!values.allFinite()) throw ValidationError("rep " + to_string(key) + " has non-finite values");
    if (!dump.reps.empty() && !(dump.reps.back().key < key)) {
      throw FormatError("GSRP records not strictly sorted at " + to_string(key));
    }
    dump.reps.push_back(TopicalRep{std::move(key), std::move(values)});
  }
  if (!r.at_end()) throw FormatError("trailing bytes after GSRP records");
  return dump;
}

void write_rep_file(const RepDump& dump, const std::filesystem::path& path) {
  write_file_bytes(path, encode_rep_dump(dump));
}

RepDump read_rep_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_rep_dump(std::string_view(bytes.data(), bytes.size()));
}

}  // namespace topisum
