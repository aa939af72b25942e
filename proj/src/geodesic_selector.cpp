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
#include "topisum/geodesic_selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "topisum/errors.hpp"

namespace topisum {

namespace {

double dot(const float* a, const float* b, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

float distance_from_dot(double d) {
  return static_cast<float>(std::clamp(1.0 - d, 0.0, 1.0));
}

// Reps ordered by sent_id; rejects duplicates and mixed widths.
std::vector<const TopicalRep*> sorted_reps(std::span<const TopicalRep> reps) {
  if (reps.empty()) throw ArgumentError("no sentence representations");
  std::vector<const TopicalRep*> order;
  order.reserve(reps.size());
  for (const auto& r : reps) {
    if (r.values.size() != reps.front().values.size()) throw ShapeError("representations differ in length");
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->key.sent_id < b->key.sent_id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->key.sent_id == order[i - 1]->key.sent_id) {
      throw ArgumentError("duplicate sent_id " + std::to_string(order[i]->key.sent_id));
    }
  }
  return order;
}

std::vector<TopicalRep> sorted_copy(std::span<const TopicalRep> reps) {
  std::vector<TopicalRep> out;
  for (const auto* r : sorted_reps(reps)) out.push_back(*r);
  return out;
}

float reciprocal_score(double distance) {
  if (distance <= 0.0) return kInfiniteImportance;
  const double s = 1.0 / distance;
  return s >= static_cast<double>(kInfiniteImportance) ? kInfiniteImportance : static_cast<float>(s);
}

}  // namespace

WeightedDigraph WeightedDigraph::reversed() const {
  WeightedDigraph r;
  r.adjacency.resize(adjacency.size());
  for (std::uint32_t u = 0; u < adjacency.size(); ++u) {
    for (const Edge& e : adjacency[u]) r.adjacency[e.target].push_back(Edge{u, e.weight});
  }
  return r;
}

float cosine_distance(const Eigen::VectorXf& x, const Eigen::VectorXf& y) {
  if (x.size() != y.size()) {
    throw ShapeError("cosine_distance: lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  return distance_from_dot(dot(x.data(), y.data(), x.size()));
}

float cosine_distance(const TopicalRep& x, const TopicalRep& y) { return cosine_distance(x.values, y.values); }

KnnGraph build_knn_graph(std::span<const TopicalRep> reps, const Eigen::VectorXf& mean, std::uint32_t k) {
  if (k == 0) throw ArgumentError("build_knn_graph: k must be at least 1");
  const auto order = sorted_reps(reps);
  if (mean.size() != order.front()->values.size()) throw ShapeError("mean differs in length from reps");

  const std::size_t n = order.size() + 1;
  std::vector<const float*> node(n);
  for (std::size_t i = 0; i + 1 < n; ++i) node[i] = order[i]->values.data();
  node[n - 1] = mean.data();
  const Eigen::Index width = mean.size();

  // Pairwise weights computed once per unordered pair so the table is exactly symmetric.
  std::vector<float> weight(n * n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const float w = distance_from_dot(dot(node[i], node[j], width));
      weight[i * n + j] = w;
      weight[j * n + i] = w;
    }
  }

  KnnGraph g;
  g.k = k;
  g.mean_node = static_cast<std::uint32_t>(n - 1);
  for (const auto* r : order) g.sent_ids.push_back(r->key.sent_id);
  g.graph.adjacency.resize(n);
  const std::size_t degree = std::min<std::size_t>(k, n - 1);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t u = 0; u < n; ++u) {
    candidates.clear();
    for (std::uint32_t v = 0; v < n; ++v) {
      if (v != u) candidates.push_back(v);
    }
    const auto closer = [&](std::uint32_t a, std::uint32_t b) {
      const float wa = weight[u * n + a];
      const float wb = weight[u * n + b];
      return wa < wb || (wa == wb && a < b);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(degree),
                      candidates.end(), closer);
    auto& out = g.graph.adjacency[u];
    out.reserve(degree);
    for (std::size_t i = 0; i < degree; ++i) out.push_back(Edge{candidates[i], weight[u * n + candidates[i]]});
  }
  return g;
}

std::vector<double> shortest_paths(const WeightedDigraph& graph, std::uint32_t source) {
  const std::size_t n = graph.node_count();
  if (source >= n) throw ArgumentError("shortest_paths: source out of range");
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> settled(n, false);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = true;
    for (const Edge& e : graph.adjacency[u]) {
      const double candidate = d + static_cast<double>(e.weight);
      if (candidate < dist[e.target]) {
        dist[e.target] = candidate;
        heap.emplace(candidate, e.target);
      }
    }
  }
  return dist;
}

std::vector<double> shortest_paths_from_mean(const KnnGraph& graph, bool reverse_edges) {
  if (reverse_edges) return shortest_paths(graph.graph.reversed(), graph.mean_node);
  return shortest_paths(graph.graph, graph.mean_node);
}

ImportanceResult importance_from_mean(std::span<const TopicalRep> reps, const Eigen::VectorXf& mean,
                                      const SelectorOptions& options) {
  const KnnGraph graph = build_knn_graph(reps, mean, options.k);
  const auto dist = shortest_paths_from_mean(graph, options.reverse_edges);
  ImportanceResult out;
  for (std::size_t i = 0; i < graph.sent_ids.size(); ++i) {
    const std::uint32_t id = graph.sent_ids[i];
    out.distances[id] = dist[i];
    if (std::isinf(dist[i])) {
      out.unreachable.insert(id);
      out.scores[id] = 0.0f;
    } else {
      out.scores[id] = reciprocal_score(dist[i]);
    }
  }
  return out;
}

ImportanceResult importance_scores(std::span<const TopicalRep> reps, const SelectorOptions& options) {
  const auto sorted = sorted_copy(reps);
  return importance_from_mean(sorted, mean_representation(sorted), options);
}

std::vector<std::uint32_t> Selection::ids() const {
  std::vector<std::uint32_t> out;
  out.reserve(selected.size());
  for (const auto& s : selected) out.push_back(s.sent_id);
  return out;
}

Selection select_top(const ImportanceResult& importance, std::uint32_t q) {
  if (q < 1 || q > importance.scores.size()) {
    throw ArgumentError("summary budget q=" + std::to_string(q) + " outside [1, " +
                        std::to_string(importance.scores.size()) + "]");
  }
  std::vector<SelectedSentence> reachable, stranded;
  for (const auto& [id, score] : importance.scores) {
    auto it = importance.distances.find(id);
    const double distance = it == importance.distances.end() ? 0.0 : it->second;
    (importance.unreachable.count(id) ? stranded : reachable).push_back(SelectedSentence{id, score, distance});
  }
  std::stable_sort(reachable.begin(), reachable.end(), [](const auto& a, const auto& b) {
    return a.score > b.score || (a.score == b.score && a.sent_id < b.sent_id);
  });
  Selection sel;
  for (const auto& s : reachable) {
    if (sel.selected.size() == q) break;
    sel.selected.push_back(s);
  }
  if (sel.selected.size() < q) {
    sel.warnings.push_back("q=" + std::to_string(q) + " exceeds the " + std::to_string(reachable.size()) +
                           " sentences reachable from the mean; filling with unreachable sentences by sent_id");
    for (const auto& s : stranded) {  // std::map iteration keeps these in sent_id order
      if (sel.selected.size() == q) break;
      sel.selected.push_back(s);
    }
  }
  return sel;
}

Selection general_selection(std::span<const TopicalRep> reps, std::uint32_t q, const SelectorOptions& options) {
  return select_top(importance_scores(reps, options), q);
}

std::vector<std::uint32_t> general_summary(std::span<const TopicalRep> reps, std::uint32_t q,
                                           const SelectorOptions& options) {
  return general_selection(reps, q, options).ids();
}

Selection selection_from_mean(std::span<const TopicalRep> reps, const Eigen::VectorXf& mean, std::uint32_t q,
                              const SelectorOptions& options) {
  return select_top(importance_from_mean(reps, mean, options), q);
}

ImportanceResult aspect_importance(std::span<const TopicalRep> reps, const std::set<std::uint32_t>& aspect_ids,
                                   float gamma, const SelectorOptions& options) {
  if (aspect_ids.empty()) throw ArgumentError("aspect summary needs at least one aspect sentence");
  if (!std::isfinite(gamma)) throw ArgumentError("gamma must be finite");
  const auto sorted = sorted_copy(reps);
  std::vector<TopicalRep> aspect_reps;
  for (const auto& r : sorted) {
    if (aspect_ids.count(r.key.sent_id)) aspect_reps.push_back(r);
  }
  if (aspect_reps.size() != aspect_ids.size()) {
    throw LookupError("aspect sentence ids are not all present in the representation set");
  }
  const ImportanceResult general = importance_from_mean(sorted, mean_representation(sorted), options);
  const ImportanceResult aspect = importance_from_mean(sorted, mean_representation(aspect_reps), options);

  ImportanceResult out;
  out.distances = aspect.distances;
  out.unreachable = aspect.unreachable;
  for (const auto& [id, aspect_score] : aspect.scores) {
    if (aspect.unreachable.count(id)) {
      out.scores[id] = 0.0f;
      continue;
    }
    const double combined =
        static_cast<double>(aspect_score) - static_cast<double>(gamma) * static_cast<double>(general.scores.at(id));
    out.scores[id] = static_cast<float>(
        std::clamp(combined, -static_cast<double>(kInfiniteImportance), static_cast<double>(kInfiniteImportance)));
  }
  return out;
}

Selection aspect_selection(std::span<const TopicalRep> reps, const std::set<std::uint32_t>& aspect_ids,
                           float gamma, std::uint32_t q, const SelectorOptions& options) {
  return select_top(aspect_importance(reps, aspect_ids, gamma, options), q);
}

std::vector<std::uint32_t> aspect_summary(std::span<const TopicalRep> reps,
                                          const std::set<std::uint32_t>& aspect_ids, float gamma,
                                          std::uint32_t q, const SelectorOptions& options) {
  return aspect_selection(reps, aspect_ids, gamma, q, options).ids();
}

ImportanceResult euclidean_importance(std::span<const TopicalRep> reps) {
  const auto sorted = sorted_copy(reps);
  const Eigen::VectorXd mean = mean_representation(sorted).cast<double>();
  ImportanceResult out;
  for (const auto& r : sorted) {
    const double sq = (r.values.cast<double>() - mean).squaredNorm();
    out.distances[r.key.sent_id] = sq;
    out.scores[r.key.sent_id] = static_cast<float>(-sq);
  }
  return out;
}

std::vector<std::uint32_t> euclidean_summary(std::span<const TopicalRep> reps, std::uint32_t q) {
  return select_top(euclidean_importance(reps), q).ids();
}

}  // namespace topisum
