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
// Synthetic data generators shared by unit and acceptance tests.
#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "topisum/corpus_io.hpp"
#include "topisum/dict_learning.hpp"
#include "topisum/topical_repr.hpp"

namespace topisum::fixture {

// Random point on the probability simplex (flat Dirichlet).
Eigen::VectorXf simplex_point(std::mt19937_64& rng, Eigen::Index dim);

std::vector<TopicalRep> random_reps(std::uint64_t seed, std::size_t count, Eigen::Index dim,
                                    const std::string& entity = "e");

// Layer with weights scaled so a good share of ReLUs are active.
DictionaryLayer<double> random_layer(std::uint64_t seed, Eigen::Index m, Eigen::Index d, Eigen::Index h);
RowMatrix<double> random_batch(std::uint64_t seed, Eigen::Index rows, Eigen::Index d);

struct SparseCombination {
  RowMatrix<float> atoms;  // atom_count x dim, unit rows
  RowMatrix<float> words;  // word_count x dim
  std::size_t words_per_sentence = 3;
  std::vector<EmbeddingMatrix> sentences() const;
};

// Word vectors that are non-negative combinations of two atoms, with a fresh
// atom pair for every sentence of `words_per_sentence` words.
SparseCombination sparse_combination(std::uint64_t seed, std::size_t word_count = 4000, Eigen::Index dim = 16,
                                     Eigen::Index atom_count = 8);

struct LabeledReps {
  std::vector<TopicalRep> reps;
  std::set<std::uint32_t> positive;  // sent_ids of the planted group
};

// 80% of sentences scatter tightly around one topic centroid, the rest are
// spread over the whole simplex.
LabeledReps planted_popularity(std::uint64_t seed, const std::string& entity, std::size_t count = 50,
                               Eigen::Index dim = 32, double popular_share = 0.8);

// Points on a circle of constant L2 radius around the simplex centre in the
// plane spanned by (1,-1,0,..) and (1,1,-2,0,..). Angles uniform over the full
// circle when `uniform`, otherwise a seeded, unevenly spaced partial arc.
struct Arc {
  std::vector<TopicalRep> reps;
  std::vector<double> angles;
  double radius = 0.0;
  Eigen::Index dim = 0;
  // Hop weight between two angles, 1 - <x(a), x(b)>.
  double hop(double delta) const;
};
Arc circle_arc(std::size_t count, Eigen::Index dim = 8, bool uniform = true, std::uint64_t seed = 0);

// Quarter circle (cos t, sin t) mapped onto the simplex edge as
// (cos^2 t, sin^2 t, 0, ..), sampled unevenly so the mean leans to one end.
// The L2 norm varies along the arc, which separates the two scorers.
Arc quarter_arc(std::size_t count, Eigen::Index dim = 4, std::uint64_t seed = 0);

// An aspect cluster plus a bigger general cluster. The aspect set holds every
// aspect-cluster sentence and a share of general sentences that happen to
// match the aspect keywords.
struct AspectScene {
  std::vector<TopicalRep> reps;
  std::set<std::uint32_t> aspect_cluster;
  std::set<std::uint32_t> matched;
};
AspectScene two_clusters(std::uint64_t seed);

// Two separated groups of `per_blob` points each; blob a owns dims [0, dim/2).
LabeledReps two_blobs(std::uint64_t seed, std::size_t per_blob = 10, Eigen::Index dim = 8);

// Random digraph with uniform [0, 1] weights.
struct RandomGraph {
  std::size_t nodes = 0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
};
RandomGraph random_digraph(std::uint64_t seed, std::size_t max_nodes = 50);

// Small hotel-review corpus with themed sentences for end-to-end runs.
Corpus review_corpus(std::uint64_t seed, std::size_t entities = 2, std::size_t reviews = 6,
                     std::size_t sentences_per_review = 4);

std::string random_words(std::mt19937_64& rng, std::size_t count, const std::vector<std::string>& vocab);

}  // namespace topisum::fixture
