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
#include "topisum/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include "topisum/errors.hpp"

namespace topisum {

namespace {

struct Nearest {
  std::size_t slot = 0;
  double cost = std::numeric_limits<double>::infinity();
};

}  // namespace

std::vector<Merge> ward_merge_tree(std::span<const TopicalRep> reps, WardGeometry geometry) {
  if (reps.empty()) throw ArgumentError("ward clustering needs at least one representation");
  std::vector<const TopicalRep*> order;
  for (const auto& r : reps) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->key.sent_id < b->key.sent_id; });

  const std::size_t n = order.size();
  std::vector<Eigen::VectorXd> points;
  points.reserve(n);
  for (const auto* r : order) {
    Eigen::VectorXd p = r->values.cast<double>();
    if (geometry == WardGeometry::kCosine) {
      const double norm = p.norm();
      if (norm > 0.0) p /= norm;
    }
    points.push_back(std::move(p));
  }

  // cost[i * n + j]: Ward merge cost between the clusters in slots i and j.
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = 0.5 * (points[i] - points[j]).squaredNorm();
      cost[i * n + j] = c;
      cost[j * n + i] = c;
    }
  }

  std::vector<std::uint32_t> id(n), size(n, 1);
  std::iota(id.begin(), id.end(), 0u);
  std::vector<bool> active(n, true);
  std::vector<Nearest> nearest(n);

  const auto rescan = [&](std::size_t s) {
    Nearest best;
    bool found = false;
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || !active[t]) continue;
      const double c = cost[s * n + t];
      if (!found || c < best.cost || (c == best.cost && id[t] < id[best.slot])) {
        best = Nearest{t, c};
        found = true;
      }
    }
    nearest[s] = best;
  };
  for (std::size_t s = 0; s < n; ++s) rescan(s);

  std::vector<Merge> tree;
  tree.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n;
    std::tuple<double, std::uint32_t, std::uint32_t> best_key{};
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      const std::size_t t = nearest[s].slot;
      const auto key = std::make_tuple(nearest[s].cost, std::min(id[s], id[t]), std::max(id[s], id[t]));
      if (a == n || key < best_key) {
        a = s;
        best_key = key;
      }
    }
    std::size_t b = nearest[a].slot;
    if (id[b] < id[a]) std::swap(a, b);

    const double merge_cost = cost[a * n + b];
    const std::uint32_t na = size[a], nb = size[b];
    tree.push_back(Merge{id[a], id[b], merge_cost, na + nb});

    for (std::size_t t = 0; t < n; ++t) {
      if (!active[t] || t == a || t == b) continue;
      const double nt = size[t];
      const double updated = ((na + nt) * cost[a * n + t] + (nb + nt) * cost[b * n + t] - nt * merge_cost) /
                             (na + nb + nt);
      cost[a * n + t] = updated;
      cost[t * n + a] = updated;
    }
    active[b] = false;
    id[a] = static_cast<std::uint32_t>(n + step);
    size[a] = na + nb;

    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      if (s == a || nearest[s].slot == a || nearest[s].slot == b) {
        rescan(s);
      } else if (cost[s * n + a] < nearest[s].cost) {
        // The new cluster has the largest id, so it only wins on strictly smaller cost.
        nearest[s] = Nearest{a, cost[s * n + a]};
      }
    }
  }
  return tree;
}

std::map<std::uint32_t, std::uint32_t> cut_merge_tree(const std::vector<Merge>& tree,
                                                      const std::vector<std::uint32_t>& leaf_sent_ids,
                                                      std::uint32_t num_clusters) {
  const std::size_t n = leaf_sent_ids.size();
  if (num_clusters < 1 || num_clusters > n) {
    throw ArgumentError("num_clusters=" + std::to_string(num_clusters) + " outside [1, " + std::to_string(n) + "]");
  }
  if (tree.size() + 1 != n) throw ArgumentError("merge tree does not match leaf count");
  // parent[c] for every cluster id created along the tree.
  std::vector<std::uint32_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0u);
  const std::size_t merges = n - num_clusters;
  for (std::size_t i = 0; i < merges; ++i) {
    const auto created = static_cast<std::uint32_t>(n + i);
    parent[tree[i].left] = created;
    parent[tree[i].right] = created;
  }
  const auto root = [&](std::uint32_t c) {
    while (parent[c] != c) c = parent[c];
    return c;
  };
  // Leaves are in sent_id order, so first sight of a root gives the dense label.
  std::map<std::uint32_t, std::uint32_t> label_of_root;
  std::map<std::uint32_t, std::uint32_t> labels;
  for (std::uint32_t leaf = 0; leaf < n; ++leaf) {
    const auto r = root(leaf);
    auto [it, _] = label_of_root.try_emplace(r, static_cast<std::uint32_t>(label_of_root.size()));
    labels[leaf_sent_ids[leaf]] = it->second;
  }
  return labels;
}

ClusterAssignment ward_clustering(std::span<const TopicalRep> reps, std::uint32_t num_clusters,
                                  WardGeometry geometry) {
  if (num_clusters < 1 || num_clusters > reps.size()) {
    throw ArgumentError("num_clusters=" + std::to_string(num_clusters) + " outside [1, " +
                        std::to_string(reps.size()) + "]");
  }
  ClusterAssignment out;
  for (const auto& r : reps) out.leaf_sent_ids.push_back(r.key.sent_id);
  std::sort(out.leaf_sent_ids.begin(), out.leaf_sent_ids.end());
  if (std::adjacent_find(out.leaf_sent_ids.begin(), out.leaf_sent_ids.end()) != out.leaf_sent_ids.end()) {
    throw ArgumentError("ward clustering: duplicate sent_id");
  }
  out.merge_tree = ward_merge_tree(reps, geometry);
  out.labels = cut_merge_tree(out.merge_tree, out.leaf_sent_ids, num_clusters);
  out.merge_tree.resize(reps.size() - num_clusters);
  return out;
}

double jaccard(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  const std::set<std::uint32_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (auto x : sa) inter += sb.count(x);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

ScorerComparison compare_scorers(std::span<const TopicalRep> reps, std::uint32_t q,
                                 const SelectorOptions& options) {
  ScorerComparison out;
  out.geodesic = general_summary(reps, q, options);
  out.euclidean = euclidean_summary(reps, q);
  out.overlap = jaccard(out.geodesic, out.euclidean);
  return out;
}

}  // namespace topisum
