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

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "topisum/topical_repr.hpp"

namespace topisum {

struct Edge {
  std::uint32_t target = 0;
  float weight = 0.0f;
};

struct WeightedDigraph {
  std::vector<std::vector<Edge>> adjacency;

  std::size_t node_count() const noexcept { return adjacency.size(); }
  WeightedDigraph reversed() const;
};

// kNN graph over an entity's sentences plus one synthetic mean node. Node i
// (i < sent_ids.size()) is sentence sent_ids[i]; sent_ids is ascending so node
// ids and sentence ids order identically. The mean node is the last node.
struct KnnGraph {
  WeightedDigraph graph;
  std::vector<std::uint32_t> sent_ids;
  std::uint32_t mean_node = 0;
  std::uint32_t k = 0;
};

inline constexpr float kInfiniteImportance = std::numeric_limits<float>::max();

// 1 - <x, y>, clamped to [0, 1]. Accumulates in double.
float cosine_distance(const Eigen::VectorXf& x, const Eigen::VectorXf& y);
float cosine_distance(const TopicalRep& x, const TopicalRep& y);

// Exhaustive kNN: every node links to its k nearest other nodes by
// cosine_distance, ties broken by smaller node id.
KnnGraph build_knn_graph(std::span<const TopicalRep> reps, const Eigen::VectorXf& mean, std::uint32_t k);

// Single-source Dijkstra; unreachable nodes get +infinity.
std::vector<double> shortest_paths(const WeightedDigraph& graph, std::uint32_t source);

struct SelectorOptions {
  std::uint32_t k = 10;
  // Measure sentence -> mean paths instead of mean -> sentence.
  bool reverse_edges = false;
};

// Distances per node of the kNN graph, measured from (or, with reverse_edges,
// to) the mean node.
std::vector<double> shortest_paths_from_mean(const KnnGraph& graph, bool reverse_edges = false);

struct ImportanceResult {
  std::map<std::uint32_t, float> scores;
  std::map<std::uint32_t, double> distances;
  std::set<std::uint32_t> unreachable;
};

// I(s) = 1 / geodesic distance from `mean`; distance 0 maps to kInfiniteImportance.
ImportanceResult importance_from_mean(std::span<const TopicalRep> reps, const Eigen::VectorXf& mean,
                                      const SelectorOptions& options = {});
ImportanceResult importance_scores(std::span<const TopicalRep> reps, const SelectorOptions& options = {});

struct SelectedSentence {
  std::uint32_t sent_id = 0;
  float score = 0.0f;
  double distance = 0.0;
};

struct Selection {
  std::vector<SelectedSentence> selected;
  std::vector<std::string> warnings;

  std::vector<std::uint32_t> ids() const;
};

// Top-q by score (descending, then ascending sent_id). Unreachable sentences
// rank after every reachable one, in sent_id order, with a warning.
Selection select_top(const ImportanceResult& importance, std::uint32_t q);

Selection general_selection(std::span<const TopicalRep> reps, std::uint32_t q, const SelectorOptions& options = {});
std::vector<std::uint32_t> general_summary(std::span<const TopicalRep> reps, std::uint32_t q,
                                           const SelectorOptions& options = {});
// general_summary with the mean replaced by an arbitrary node vector.
Selection selection_from_mean(std::span<const TopicalRep> reps, const Eigen::VectorXf& mean, std::uint32_t q,
                              const SelectorOptions& options = {});

// I_a(s) = 1 / SP(x_s, mean of aspect reps) - gamma * I(s), over all sentences.
ImportanceResult aspect_importance(std::span<const TopicalRep> reps, const std::set<std::uint32_t>& aspect_ids,
                                   float gamma, const SelectorOptions& options = {});
Selection aspect_selection(std::span<const TopicalRep> reps, const std::set<std::uint32_t>& aspect_ids,
                           float gamma, std::uint32_t q, const SelectorOptions& options = {});
std::vector<std::uint32_t> aspect_summary(std::span<const TopicalRep> reps,
                                          const std::set<std::uint32_t>& aspect_ids, float gamma,
                                          std::uint32_t q, const SelectorOptions& options = {});

// Ablation: I(s) = -||x_s - mean||^2. Distances hold the squared norm.
ImportanceResult euclidean_importance(std::span<const TopicalRep> reps);
std::vector<std::uint32_t> euclidean_summary(std::span<const TopicalRep> reps, std::uint32_t q);

}  // namespace topisum
