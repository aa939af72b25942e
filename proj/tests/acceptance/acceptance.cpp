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
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"
#include "topisum/analysis.hpp"
#include "topisum/binary_io.hpp"
#include "topisum/dict_learning.hpp"
#include "topisum/geodesic_selector.hpp"
#include "topisum/rouge_eval.hpp"
#include "topisum/synthetic.hpp"
#include "topisum/topical_repr.hpp"

using namespace topisum;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome shortest_paths_match_floyd_warshall() {
  const auto start = Clock::now();
  double worst = 0.0;
  bool unreachable_ok = true;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto rg = fixture::random_digraph(1000 + seed, 50);
    WeightedDigraph g;
    g.adjacency.resize(rg.nodes);
    for (const auto& [u, v, w] : rg.edges) g.adjacency[u].push_back({static_cast<std::uint32_t>(v), static_cast<float>(w)});
    const auto all = oracle::floyd_warshall(rg.nodes, rg.edges);
    for (std::uint32_t s = 0; s < rg.nodes; ++s) {
      const auto d = shortest_paths(g, s);
      for (std::size_t v = 0; v < rg.nodes; ++v, ++pairs) {
        if (std::isinf(all[s][v]) || std::isinf(d[v])) {
          unreachable_ok = unreachable_ok && std::isinf(all[s][v]) && std::isinf(d[v]);
        } else {
          worst = std::max(worst, std::abs(d[v] - all[s][v]));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && unreachable_ok && elapsed < 5.0,
          fmt("50 graphs, %zu source/target pairs, max |diff| %.3g, %.2f s", pairs, worst, elapsed)};
}

// Central differences of the separated objectives against analytic gradients.
Outcome gradients_match_finite_differences() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Eigen::Index> size(2, 16), rows(3, 12);
  const double step = 1e-6, floor = 1e-5;
  double worst = 0.0;
  std::size_t probed = 0, skipped = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index d = size(rng), m = size(rng), h = size(rng);
    const double l1 = 0.25 + 0.05 * static_cast<double>(seed);
    const auto layer = fixture::random_layer(500 + seed, m, d, h);
    const auto batch = fixture::random_batch(700 + seed, rows(rng), d);
    const auto analytic = dict_loss_gradients(layer, batch, l1).grads;

    oracle::Mat plain_rows;
    for (Eigen::Index i = 0; i < batch.rows(); ++i) plain_rows.emplace_back(batch.row(i).data(), batch.row(i).data() + d);
    const auto base = oracle::to_plain(layer);
    const auto base_pattern = oracle::loss(base, base, plain_rows).pattern;

    // `dict` parameters feed the D-side term only; kernel parameters feed the
    // kernel-side reconstruction plus the weighted sparsity term.
    const auto probe = [&](auto&& get, double expected, bool dict) {
      auto plus = base, minus = base;
      get(plus) += step;
      get(minus) -= step;
      const auto lp = dict ? oracle::loss(base, plus, plain_rows) : oracle::loss(plus, base, plain_rows);
      const auto lm = dict ? oracle::loss(base, minus, plain_rows) : oracle::loss(minus, base, plain_rows);
      if (lp.pattern != base_pattern || lm.pattern != base_pattern) {
        ++skipped;
        return;
      }
      const double fp = lp.recon + (dict ? 0.0 : l1 * lp.sparsity);
      const double fm = lm.recon + (dict ? 0.0 : l1 * lm.sparsity);
      const double numeric = (fp - fm) / (2 * step);
      worst = std::max(worst, std::abs(expected - numeric) / std::max({std::abs(expected), std::abs(numeric), floor}));
      ++probed;
    };
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index j = 0; j < d; ++j)
        probe([&](oracle::PlainLayer& p) -> double& { return p.dictionary[k][j]; }, analytic.dictionary(k, j), true);
    for (Eigen::Index i = 0; i < h; ++i) {
      for (Eigen::Index j = 0; j < d; ++j)
        probe([&](oracle::PlainLayer& p) -> double& { return p.w1[i][j]; }, analytic.w1(i, j), false);
      probe([&](oracle::PlainLayer& p) -> double& { return p.b1[i]; }, analytic.b1(i), false);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      for (Eigen::Index i = 0; i < h; ++i)
        probe([&](oracle::PlainLayer& p) -> double& { return p.w2[k][i]; }, analytic.w2(k, i), false);
      probe([&](oracle::PlainLayer& p) -> double& { return p.b2[k]; }, analytic.b2(k), false);
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && probed > 0 && elapsed < 10.0,
          fmt("20 layers, %zu parameters probed, %zu skipped at kinks, max rel err %.3g, %.2f s", probed, skipped,
              worst, elapsed)};
}

Outcome stop_gradient_is_exact() {
  std::size_t layers = 0, leaks = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto layer = fixture::random_layer(seed, 4 + seed % 9, 3 + seed % 7, 2 + seed % 11);
    const auto batch = fixture::random_batch(seed + 99, 2 + seed % 13, layer.d());
    const auto kernel_term = dict_loss_gradients(layer, batch, 1.0, {true, false, false}).grads;
    const auto dict_term = dict_loss_gradients(layer, batch, 1.0, {false, true, false}).grads;
    if (!kernel_term.dictionary.isZero(0.0)) ++leaks;
    if (!(dict_term.w1.isZero(0.0) && dict_term.b1.isZero(0.0) && dict_term.w2.isZero(0.0) &&
          dict_term.b2.isZero(0.0))) {
      ++leaks;
    }
    ++layers;
  }
  return {leaks == 0, fmt("%zu random layers, %zu non-zero cross gradients", layers, leaks)};
}

Outcome representations_are_normalized_and_order_free() {
  TrainConfig c;
  c.m = 12;
  c.layers = 3;
  c.dim = 10;
  c.hidden = 10;
  c.seed = 5;
  ModelState model = init_model(c);
  for (auto& l : model.layers) l.b2.setConstant(0.05f);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<Eigen::Index> len(1, 15);
  std::size_t negative = 0, off_norm = 0, order_dependent = 0;
  double worst = 0.0;
  for (std::uint32_t i = 0; i < 1000; ++i) {
    const EmbeddingMatrix words = fixture::random_batch(10000 + i, len(rng), c.dim).cast<float>();
    const auto rep = sentence_representation(model, words, {"e", i});
    if ((rep.values.array() < 0.0f).any()) ++negative;
    const double err = std::abs(rep.values.cast<double>().sum() - 1.0);
    worst = std::max(worst, err);
    if (err >= 1e-6) ++off_norm;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(words.rows()));
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
    std::shuffle(order.begin(), order.end(), rng);
    EmbeddingMatrix permuted(words.rows(), words.cols());
    for (std::size_t k = 0; k < order.size(); ++k) permuted.row(static_cast<Eigen::Index>(k)) = words.row(order[k]);
    if (sentence_representation(model, permuted, {"e", i}).values != rep.values) ++order_dependent;
  }
  return {negative == 0 && off_norm == 0 && order_dependent == 0,
          fmt("1000 sentences: %zu negative, %zu off-norm (max |sum-1| %.3g), %zu order-dependent", negative,
              off_norm, worst, order_dependent)};
}

Outcome rouge_matches_brute_force() {
  static const std::vector<std::string> vocab = {"the",  "The", "cat",  "sat",    "ran",  "mat,", "on",  "a",  "room",
                                                 "rooms", "café", "staff!", "was", "great", "bed.", "2", "x-y"};
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> len(0, 14);
  std::size_t mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string cand = fixture::random_words(rng, len(rng), vocab);
    const std::string ref = fixture::random_words(rng, len(rng), vocab);
    for (std::uint32_t n = 1; n <= 3; ++n) {
      const auto got = rouge_n(cand, std::vector<std::string>{ref}, n);
      const auto want = oracle::brute_rouge_n(cand, ref, n);
      if (got.precision != want.p || got.recall != want.r || got.f1 != want.f) ++mismatches;
    }
  }
  const std::vector<std::string> ran = {"the cat ran"};
  const auto r1 = rouge_n("the cat sat", ran, 1);
  const auto r2 = rouge_n("the cat sat", ran, 2);
  const auto rl = rouge_l("a b c d", std::vector<std::string>{"a x c d"});
  const bool hand = r1.f1 == 2.0 / 3.0 && r2.f1 == 0.5 && rl.precision == 0.75 && rl.recall == 0.75;
  return {mismatches == 0 && hand,
          fmt("200 pairs x n=1..3: %zu mismatches; hand cases R1 f1 %.17g, R2 f1 %.17g, L p/r %.17g/%.17g",
              mismatches, r1.f1, r2.f1, rl.precision, rl.recall)};
}

double summed_recon(const ModelState& model, const RowMatrix<float>& words) {
  double total = 0.0;
  for (const auto& layer : model.layers) total += dict_loss<float>(layer, words, 0.0f).recon_dict;
  return total;
}

Outcome training_reduces_error_and_sparsifies() {
  fixture::TempDir dir("sanity");
  bool all_pass = true;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto start = Clock::now();
    const auto data = fixture::sparse_combination(seed);
    TrainConfig c = cli::profile_defaults("desk");
    c.m = 8;
    c.dim = 16;
    c.hidden = 16;
    c.steps = 2000;
    c.lr = 3e-3f;
    c.batch_size = 128;
    c.l1_weight = 0.02f;
    c.seed = seed;
    TrainOptions options;
    options.checkpoint_every = 0;
    options.log_every = 0;
    const double initial = summed_recon(init_model(c), data.words);
    const auto result = train(c, data.words, dir / ("s" + std::to_string(seed)), options);
    const double final = summed_recon(result.state, data.words);

    std::vector<double> fractions;
    const auto sentences = data.sentences();
    for (std::uint32_t i = 0; i < sentences.size(); ++i) {
      try {
        fractions.push_back(small_entry_fraction(sentence_representation(result.state, sentences[i], {"e", i}).values, 1e-3));
      } catch (const DegenerateError&) {
        fractions.push_back(1.0);
      }
    }
    std::sort(fractions.begin(), fractions.end());
    const double median = fractions[fractions.size() / 2];
    const double ratio = final / initial;
    const double elapsed = seconds_since(start);
    const bool pass = ratio < 0.25 && median > 0.5 && elapsed < 60.0;
    all_pass = all_pass && pass;
    detail += fmt("%sseed %llu: recon %.3f -> %.3f (ratio %.3f), median small-entry fraction %.3f, %.1f s",
                  seed ? "; " : "", static_cast<unsigned long long>(seed), initial, final, ratio, median, elapsed);
  }
  return {all_pass, detail};
}

// Token vectors around one shared centre for popular sentences, scattered
// noise for the rest; the model is trained on the same embeddings.
struct PlantedCorpus {
  Corpus corpus;
  EmbeddingStore store{16};
  std::map<std::string, std::set<std::uint32_t>> popular;
};

PlantedCorpus planted_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::uniform_int_distribution<int> tokens(3, 8);
  PlantedCorpus pc;
  for (int e = 0; e < 3; ++e) {
    Entity entity{"entity_" + std::to_string(e), {}};
    Eigen::VectorXf centre(16);
    for (auto& x : centre) x = normal(rng);
    std::vector<bool> is_popular(50);
    for (std::size_t i = 0; i < 50; ++i) is_popular[i] = i < 40;
    std::shuffle(is_popular.begin(), is_popular.end(), rng);
    Review review{"r0", {}};
    for (std::uint32_t id = 0; id < 50; ++id) {
      review.sentences.push_back({id, "sentence " + std::to_string(id)});
      EmbeddingMatrix words(tokens(rng), 16);
      for (Eigen::Index t = 0; t < words.rows(); ++t)
        for (Eigen::Index j = 0; j < 16; ++j)
          words(t, j) = is_popular[id] ? centre(j) + 0.3f * normal(rng) : 1.5f * normal(rng);
      pc.store.insert({entity.entity_id, id}, words);
      if (is_popular[id]) pc.popular[entity.entity_id].insert(id);
    }
    entity.reviews.push_back(std::move(review));
    pc.corpus.entities.push_back(std::move(entity));
  }
  return pc;
}

Outcome popular_content_dominates() {
  fixture::TempDir dir("planted");
  const SelectorOptions options{10, false};
  double rep_share = 0.0, model_share = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (int e = 0; e < 3; ++e) {
      const auto planted = fixture::planted_popularity(seed * 3 + e, "entity_" + std::to_string(e));
      std::size_t hits = 0;
      for (auto id : general_summary(planted.reps, 10, options)) hits += planted.positive.count(id);
      rep_share += static_cast<double>(hits) / 10.0;
    }

    const auto pc = planted_corpus(300 + seed);
    TrainConfig c;
    c.m = 16;
    c.layers = 2;
    c.dim = 16;
    c.hidden = 16;
    c.steps = 300;
    c.lr = 3e-3f;
    c.batch_size = 64;
    c.l1_weight = 0.02f;
    c.seed = seed;
    TrainOptions topts;
    topts.checkpoint_every = 0;
    topts.log_every = 0;
    const auto model = train(c, pc.store, dir / std::to_string(seed), topts).state;
    for (const auto& entity : pc.corpus.entities) {
      const auto reps = represent_entity(model, entity, pc.store);
      std::size_t hits = 0;
      for (auto id : general_summary(reps, 10, options)) hits += pc.popular.at(entity.entity_id).count(id);
      model_share += static_cast<double>(hits) / 10.0;
    }
  }
  rep_share /= 60.0;
  model_share /= 60.0;

  double overlap_sum = 0.0, overlap_max = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto arc = fixture::quarter_arc(40, 4, seed);
    const double overlap = compare_scorers(arc.reps, 10, options).overlap;
    overlap_sum += overlap;
    overlap_max = std::max(overlap_max, overlap);
  }
  return {rep_share >= 0.7 && model_share >= 0.7 && overlap_max < 1.0,
          fmt("popular share %.3f on planted reps, %.3f through a trained model (20 seeds x 3 entities); "
              "geodesic vs euclidean Jaccard on the curved arc mean %.3f, max %.3f",
              rep_share, model_share, overlap_sum / 5.0, overlap_max)};
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
double sign_test(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  double p = 0.0;
  for (int x = wins; x <= n; ++x) p += std::exp(std::lgamma(n + 1) - std::lgamma(x + 1) - std::lgamma(n - x + 1) - n * std::log(2.0));
  return p;
}

Outcome penalty_steers_towards_aspect() {
  int wins = 0, losses = 0, ties = 0;
  double with_penalty = 0.0, without = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto scene = fixture::two_clusters(seed);
    const auto count = [&](float gamma) {
      int c = 0;
      for (auto id : aspect_summary(scene.reps, scene.matched, gamma, 5, {10, false})) c += scene.aspect_cluster.count(id);
      return c;
    };
    const int base = count(0.0f), steered = count(0.5f);
    without += base;
    with_penalty += steered;
    (steered > base ? wins : steered < base ? losses : ties)++;
  }
  const double p = sign_test(wins, losses);
  return {p < 0.05, fmt("20 seeds: %d more, %d fewer, %d equal; mean aspect picks %.2f -> %.2f; sign test p=%.4f",
                        wins, losses, ties, without / 20.0, with_penalty / 20.0, p)};
}

Outcome reruns_are_byte_identical() {
  fixture::TempDir dir("determinism");
  const auto corpus = (dir / "corpus.jsonl").string();
  const auto emb = (dir / "emb.gsem").string();
  write_file_bytes(corpus, corpus_to_jsonl(fixture::review_corpus(9, 3, 5, 4)));
  std::ostringstream sink;
  const auto run = [&](std::vector<std::string> args) {
    if (cli::run(args, sink, sink) != 0) throw std::runtime_error("command failed: " + args.front() + "\n" + sink.str());
  };
  const auto slurp = [](const std::string& p) {
    const auto b = read_file_bytes(p);
    return std::string(b.begin(), b.end());
  };
  run({"export-synthetic", "--corpus", corpus, "--dim", "16", "--seed", "11", "--out", emb});
  const std::string ck_dir = (dir / "ck").string(), ck = (dir / "ck" / "ckpt-000200.gsck").string();
  const std::string summary = (dir / "summary.json").string();
  const auto train_and_summarize = [&] {
    std::filesystem::remove_all(ck_dir);
    std::filesystem::remove(summary);
    run({"train", "--embeddings", emb, "--corpus", corpus, "--m", "32", "--layers", "2", "--steps", "200", "--seed",
         "7", "--out-dir", ck_dir});
    run({"summarize", "--corpus", corpus, "--embeddings", emb, "--checkpoint", ck, "--q", "4", "--out", summary});
    return std::make_pair(slurp(ck), slurp(summary));
  };
  const auto first = train_and_summarize();
  const auto second = train_and_summarize();
  return {first == second, fmt("checkpoint %zu bytes %s, summary %zu bytes %s", first.first.size(),
                               first.first == second.first ? "identical" : "DIFFERENT", first.second.size(),
                               first.second == second.second ? "identical" : "DIFFERENT")};
}

Outcome ward_matches_variance_oracle() {
  std::size_t trees = 0, mismatched = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto reps = fixture::random_reps(900 + seed, 6, 5);
    std::vector<oracle::Vec> points;
    for (const auto& r : reps) points.emplace_back(r.values.data(), r.values.data() + r.values.size());
    const auto tree = ward_merge_tree(reps);
    const auto want = oracle::brute_ward(points);
    bool same = tree.size() == want.size();
    for (std::size_t i = 0; same && i < tree.size(); ++i) {
      same = tree[i].left == want[i].left && tree[i].right == want[i].right;
      worst = std::max(worst, std::abs(tree[i].cost - want[i].cost));
    }
    if (!same || worst > 1e-9) ++mismatched;
    ++trees;
  }
  return {mismatched == 0, fmt("%zu six-point trees, %zu structural mismatches, max cost diff %.3g", trees,
                               mismatched, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"shortest-path oracle", shortest_paths_match_floyd_warshall},
      {"gradient check", gradients_match_finite_differences},
      {"stop-gradient routing", stop_gradient_is_exact},
      {"representation invariants", representations_are_normalized_and_order_free},
      {"rouge oracle", rouge_matches_brute_force},
      {"training sanity", training_reduces_error_and_sparsifies},
      {"planted popularity", popular_content_dominates},
      {"aspect steering", penalty_steers_towards_aspect},
      {"determinism", reruns_are_byte_identical},
      {"ward oracle", ward_matches_variance_oracle},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
