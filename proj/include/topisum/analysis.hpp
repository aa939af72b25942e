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

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "topisum/geodesic_selector.hpp"
#include "topisum/topical_repr.hpp"

namespace topisum {

// One agglomeration step. Leaves are cluster ids 0..n-1 (reps in sent_id
// order); the merge at step i creates cluster n + i.
struct Merge {
  std::uint32_t left = 0;   // smaller cluster id
  std::uint32_t right = 0;  // larger cluster id
  double cost = 0.0;        // increase in within-cluster sum of squares
  std::uint32_t size = 0;   // members of the merged cluster
};

struct ClusterAssignment {
  std::map<std::uint32_t, std::uint32_t> labels;  // sent_id -> cluster in 0..C-1
  std::vector<Merge> merge_tree;                  // the n - C merges applied
  std::vector<std::uint32_t> leaf_sent_ids;       // leaf cluster id -> sent_id
};

enum class WardGeometry {
  kEuclidean,  // raw L1-normalized reps
  kCosine,     // reps rescaled to unit L2 norm first
};

// Ward minimum-variance agglomeration via Lance-Williams updates. Ties go to
// the lexicographically smallest (left, right) cluster-id pair.
std::vector<Merge> ward_merge_tree(std::span<const TopicalRep> reps, WardGeometry geometry = WardGeometry::kEuclidean);

// Labels obtained by applying the first n - num_clusters merges. Clusters are
// numbered by their smallest member sent_id.
std::map<std::uint32_t, std::uint32_t> cut_merge_tree(const std::vector<Merge>& tree,
                                                      const std::vector<std::uint32_t>& leaf_sent_ids,
                                                      std::uint32_t num_clusters);

ClusterAssignment ward_clustering(std::span<const TopicalRep> reps, std::uint32_t num_clusters,
                                  WardGeometry geometry = WardGeometry::kEuclidean);

struct ScorerComparison {
  std::vector<std::uint32_t> geodesic;
  std::vector<std::uint32_t> euclidean;
  double overlap = 0.0;  // Jaccard of the two top-q sets
};

ScorerComparison compare_scorers(std::span<const TopicalRep> reps, std::uint32_t q,
                                 const SelectorOptions& options = {});

double jaccard(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

}  // namespace topisum
