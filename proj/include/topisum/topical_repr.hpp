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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topisum/corpus_io.hpp"
#include "topisum/dict_learning.hpp"

namespace topisum {

// Non-negative, L1-normalized sentence vector of length m * N.
struct TopicalRep {
  SentKey key;
  Eigen::VectorXf values;
};

// Concatenation [T_1(z), ..., T_N(z)]; layer j occupies [j*m, (j+1)*m).
Eigen::VectorXf word_representation(const ModelState& model, const Eigen::Ref<const Eigen::VectorXf>& z);

// Coordinate-wise max over the token rows' word representations, then L1
// normalization. Rows are encoder tokens (subword granularity).
TopicalRep sentence_representation(const ModelState& model, const EmbeddingMatrix& words, SentKey key);

// Representations for every sentence of an entity, in sent_id order.
std::vector<TopicalRep> represent_entity(const ModelState& model, const Entity& entity,
                                         const EmbeddingStore& store);

Eigen::VectorXf mean_representation(std::span<const TopicalRep> reps);

struct SparsityProfile {
  // Per sorted rank (ascending magnitude): mean and population std across reps.
  std::vector<double> mean;
  std::vector<double> stddev;
};

SparsityProfile sparsity_profile(std::span<const TopicalRep> reps);

// Fraction of entries at or below `relative * max(values)`.
double small_entry_fraction(const Eigen::VectorXf& values, double relative);

inline constexpr char kRepMagic[4] = {'G', 'S', 'R', 'P'};
inline constexpr std::uint16_t kRepVersion = 1;

struct RepDump {
  std::uint32_t dim = 0;
  std::vector<TopicalRep> reps;  // sorted by key

  // Reps of one entity in sent_id order.
  std::vector<TopicalRep> entity(std::string_view entity_id) const;
};

std::string encode_rep_dump(const RepDump& dump);
RepDump decode_rep_dump(std::string_view bytes);
void write_rep_file(const RepDump& dump, const std::filesystem::path& path);
RepDump read_rep_file(const std::filesystem::path& path);

}  // namespace topisum
