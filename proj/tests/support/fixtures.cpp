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
#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace topisum::fixture {
namespace {

TopicalRep make_rep(const std::string& entity, std::uint32_t id, Eigen::VectorXf v) {
  v = v.cwiseMax(0.0f);
  v /= v.sum();
  return {SentKey{entity, id}, std::move(v)};
}

// Centroid concentrated on [begin, end), with flat Dirichlet weights inside.
Eigen::VectorXf block_point(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index begin, Eigen::Index end) {
  Eigen::VectorXf v = Eigen::VectorXf::Zero(dim);
  v.segment(begin, end - begin) = simplex_point(rng, end - begin);
  return v;
}

}  // namespace

Eigen::VectorXf simplex_point(std::mt19937_64& rng, Eigen::Index dim) {
  std::exponential_distribution<double> draw(1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = draw(rng) + 1e-12;
  return (v / v.sum()).cast<float>();
}

std::vector<TopicalRep> random_reps(std::uint64_t seed, std::size_t count, Eigen::Index dim,
                                    const std::string& entity) {
  std::mt19937_64 rng(seed);
  std::vector<TopicalRep> reps;
  for (std::size_t i = 0; i < count; ++i) reps.push_back(make_rep(entity, static_cast<std::uint32_t>(i), simplex_point(rng, dim)));
  return reps;
}

DictionaryLayer<double> random_layer(std::uint64_t seed, Eigen::Index m, Eigen::Index d, Eigen::Index h) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto fill = [&](auto& block, double scale) {
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = scale * normal(rng);
  };
  auto layer = DictionaryLayer<double>::zeros(m, d, h);
  fill(layer.dictionary, 1.0 / std::sqrt(static_cast<double>(d)));
  fill(layer.w1, 1.0 / std::sqrt(static_cast<double>(d)));
  fill(layer.b1, 0.3);
  fill(layer.w2, 1.0 / std::sqrt(static_cast<double>(h)));
  fill(layer.b2, 0.3);
  return layer;
}

RowMatrix<double> random_batch(std::uint64_t seed, Eigen::Index rows, Eigen::Index d) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix<double> batch(rows, d);
  for (Eigen::Index i = 0; i < batch.size(); ++i) batch.data()[i] = normal(rng);
  return batch;
}

std::vector<EmbeddingMatrix> SparseCombination::sentences() const {
  std::vector<EmbeddingMatrix> out;
  for (Eigen::Index s = 0; s + static_cast<Eigen::Index>(words_per_sentence) <= words.rows();
       s += static_cast<Eigen::Index>(words_per_sentence)) {
    out.emplace_back(words.middleRows(s, static_cast<Eigen::Index>(words_per_sentence)));
  }
  return out;
}

SparseCombination sparse_combination(std::uint64_t seed, std::size_t word_count, Eigen::Index dim,
                                     Eigen::Index atom_count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  std::uniform_real_distribution<float> coefficient(0.5f, 1.5f);
  std::uniform_int_distribution<Eigen::Index> pick(0, atom_count - 1);
  SparseCombination out;
  out.atoms.resize(atom_count, dim);
  for (Eigen::Index i = 0; i < atom_count; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) out.atoms(i, j) = normal(rng);
    out.atoms.row(i).normalize();
  }
  out.words.resize(static_cast<Eigen::Index>(word_count), dim);
  Eigen::Index a = 0, b = 1;
  for (Eigen::Index w = 0; w < out.words.rows(); ++w) {
    if (w % static_cast<Eigen::Index>(out.words_per_sentence) == 0) {
      a = pick(rng);
      do b = pick(rng);
      while (b == a);
    }
    out.words.row(w) = coefficient(rng) * out.atoms.row(a) + coefficient(rng) * out.atoms.row(b);
  }
  return out;
}

LabeledReps planted_popularity(std::uint64_t seed, const std::string& entity, std::size_t count, Eigen::Index dim,
                               double popular_share) {
  std::mt19937_64 rng(seed);
  const Eigen::VectorXf centroid = block_point(rng, dim, 0, dim / 4);
  const auto popular = static_cast<std::size_t>(std::lround(popular_share * static_cast<double>(count)));
  std::vector<std::uint32_t> order(count);
  for (std::uint32_t i = 0; i < count; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  LabeledReps out;
  out.reps.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t id = order[i];
    Eigen::VectorXf v;
    if (i < popular) {
      v = centroid + 0.15f * simplex_point(rng, dim);
      out.positive.insert(id);
    } else {
      v = simplex_point(rng, dim);
    }
    out.reps[id] = make_rep(entity, id, v);
  }
  return out;
}

double Arc::hop(double delta) const {
  return 1.0 - 1.0 / static_cast<double>(dim) - radius * radius * std::cos(delta);
}

Arc circle_arc(std::size_t count, Eigen::Index dim, bool uniform, std::uint64_t seed) {
  Arc arc;
  arc.dim = dim;
  arc.radius = 0.9 / (static_cast<double>(dim) * (1.0 / std::sqrt(2.0) + 2.0 / std::sqrt(6.0)));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim), v = Eigen::VectorXd::Zero(dim);
  u(0) = 1.0 / std::sqrt(2.0);
  u(1) = -1.0 / std::sqrt(2.0);
  v(0) = v(1) = 1.0 / std::sqrt(6.0);
  v(2) = -2.0 / std::sqrt(6.0);
  const Eigen::VectorXd centre = Eigen::VectorXd::Constant(dim, 1.0 / static_cast<double>(dim));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    double angle;
    if (uniform) {
      angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    } else {
      // Dense near one end of a half circle, sparse near the other.
      const double t = (static_cast<double>(i) + 0.3 * unit(rng)) / static_cast<double>(count);
      angle = std::numbers::pi * t * t;
    }
    arc.angles.push_back(angle);
    Eigen::VectorXd x = centre + arc.radius * (std::cos(angle) * u + std::sin(angle) * v);
    arc.reps.push_back({SentKey{"arc", static_cast<std::uint32_t>(i)}, x.cast<float>()});
  }
  return arc;
}

Arc quarter_arc(std::size_t count, Eigen::Index dim, std::uint64_t seed) {
  Arc arc;
  arc.dim = dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::sqrt(unit(rng));
    const double angle = 0.5 * std::numbers::pi * t;
    arc.angles.push_back(angle);
    Eigen::VectorXf x = Eigen::VectorXf::Zero(dim);
    x(0) = static_cast<float>(std::cos(angle) * std::cos(angle));
    x(1) = static_cast<float>(std::sin(angle) * std::sin(angle));
    arc.reps.push_back(make_rep("arc", static_cast<std::uint32_t>(i), x));
  }
  return arc;
}

AspectScene two_clusters(std::uint64_t seed) {
  constexpr Eigen::Index kDim = 24;
  constexpr std::size_t kAspect = 8, kGeneral = 30, kMatchedGeneral = 25, kScattered = 6;
  std::mt19937_64 rng(seed);
  const Eigen::VectorXf aspect_centre = block_point(rng, kDim, 0, 6);
  // The general cluster leans on the aspect dimensions and most of it matches
  // the aspect keywords, so the aspect mean sits close to the general mean.
  const Eigen::VectorXf general_centre = 0.7f * block_point(rng, kDim, 6, 14) + 0.3f * aspect_centre;
  AspectScene scene;
  std::vector<Eigen::VectorXf> vectors;
  std::vector<int> group;
  for (std::size_t i = 0; i < kAspect; ++i) {
    vectors.push_back(aspect_centre + 0.7f * simplex_point(rng, kDim));
    group.push_back(0);
  }
  for (std::size_t i = 0; i < kGeneral; ++i) {
    vectors.push_back(general_centre + 0.7f * simplex_point(rng, kDim));
    group.push_back(i < kMatchedGeneral ? 1 : 2);
  }
  for (std::size_t i = 0; i < kScattered; ++i) {
    vectors.push_back(simplex_point(rng, kDim));
    group.push_back(3);
  }
  std::vector<std::uint32_t> ids(vectors.size());
  for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  scene.reps.resize(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    scene.reps[ids[i]] = make_rep("scene", ids[i], vectors[i]);
    if (group[i] == 0) scene.aspect_cluster.insert(ids[i]);
    if (group[i] <= 1) scene.matched.insert(ids[i]);
  }
  return scene;
}

LabeledReps two_blobs(std::uint64_t seed, std::size_t per_blob, Eigen::Index dim) {
  std::mt19937_64 rng(seed);
  LabeledReps out;
  std::vector<std::uint32_t> ids(2 * per_blob);
  for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  out.reps.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const bool first = i < per_blob;
    Eigen::VectorXf v = first ? block_point(rng, dim, 0, dim / 2) : block_point(rng, dim, dim / 2, dim);
    v += 0.02f * simplex_point(rng, dim);
    out.reps[ids[i]] = make_rep("blobs", ids[i], v);
    if (first) out.positive.insert(ids[i]);
  }
  return out;
}

RandomGraph random_digraph(std::uint64_t seed, std::size_t max_nodes) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> node_count(2, max_nodes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomGraph g;
  g.nodes = node_count(rng);
  const double density = 0.05 + 0.25 * unit(rng);
  for (std::size_t u = 0; u < g.nodes; ++u)
    for (std::size_t v = 0; v < g.nodes; ++v)
      if (u != v && unit(rng) < density) g.edges.emplace_back(u, v, static_cast<double>(static_cast<float>(unit(rng))));
  return g;
}

std::string random_words(std::mt19937_64& rng, std::size_t count, const std::vector<std::string>& vocab) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += vocab[pick(rng)];
  }
  return out;
}

Corpus review_corpus(std::uint64_t seed, std::size_t entities, std::size_t reviews, std::size_t sentences_per_review) {
  static const std::vector<std::vector<std::string>> themes = {
      {"the room was clean and the bed was comfortable", "our room had fresh pillows and a quiet view",
       "spacious rooms with comfortable beds", "the bathroom was spotless and the room tidy"},
      {"the staff were friendly and helpful", "reception staff went out of their way for us",
       "friendly front desk and helpful concierge", "the staff made us feel welcome"},
      {"great location close to the station", "the hotel is a short walk from the old town",
       "perfect location near shops and restaurants", "easy walk to the beach and the harbour"},
      {"breakfast was tasty with plenty of choice", "the breakfast buffet had fresh fruit and pastries",
       "coffee at breakfast was excellent", "a rooftop bar with good drinks after breakfast"},
  };
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> theme_pick(0, themes.size() - 1);
  std::uniform_int_distribution<std::size_t> line_pick(0, 3);
  Corpus corpus;
  for (std::size_t e = 0; e < entities; ++e) {
    Entity entity{"hotel_" + std::to_string(e), {}};
    std::uint32_t next = 0;
    for (std::size_t r = 0; r < reviews; ++r) {
      Review review{"r" + std::to_string(r), {}};
      for (std::size_t s = 0; s < sentences_per_review; ++s) {
        // Skew towards the first theme so there is a popular opinion.
        const std::size_t theme = (s == 0 || line_pick(rng) == 0) ? 0 : theme_pick(rng);
        review.sentences.push_back({next++, themes[theme][line_pick(rng)]});
      }
      entity.reviews.push_back(std::move(review));
    }
    corpus.entities.push_back(std::move(entity));
  }
  return corpus;
}

}  // namespace topisum::fixture
