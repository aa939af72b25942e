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
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "topisum/corpus_io.hpp"

namespace topisum {

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using RowMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Non-deduced Ref aliases so the scalar type comes from the layer argument.
template <typename S>
using VectorIn = std::type_identity_t<Eigen::Ref<const Vector<S>>>;
template <typename S>
using MatrixIn = std::type_identity_t<Eigen::Ref<const Matrix<S>>>;
template <typename S>
using RowMatrixIn = std::type_identity_t<Eigen::Ref<const RowMatrix<S>>>;

struct TrainConfig {
  std::uint32_t m = 512;       // dictionary elements per layer
  std::uint32_t layers = 2;    // N
  std::uint32_t dim = 768;     // d, embedding width
  std::uint32_t hidden = 768;  // h, kernel hidden width
  float lr = 1e-5f;
  std::uint32_t batch_size = 256;
  std::uint32_t steps = 2000;
  float l1_weight = 1.0f;
  std::uint64_t seed = 0;

  // Throws ConfigError unless every field is positive (steps may be 0).
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// One dictionary component: D (m x d) plus the two-layer ReLU kernel
//   f(z) = ReLU(W2 ReLU(W1 z + b1) + b2).
// The same struct carries gradients and Adam moments.
template <typename S>
struct DictionaryLayer {
  Matrix<S> dictionary;  // m x d, row k is element k
  Matrix<S> w1;          // h x d
  Vector<S> b1;          // h
  Matrix<S> w2;          // m x h
  Vector<S> b2;          // m

  static DictionaryLayer zeros(Eigen::Index m, Eigen::Index d, Eigen::Index h);

  Eigen::Index m() const noexcept { return dictionary.rows(); }
  Eigen::Index d() const noexcept { return dictionary.cols(); }
  Eigen::Index h() const noexcept { return w1.rows(); }

  bool all_finite() const;

  // Visits the five parameter blocks in checkpoint order: D, W1, b1, W2, b2.
  template <typename F>
  void for_each_block(F&& f) {
    f(dictionary.data(), dictionary.size());
    f(w1.data(), w1.size());
    f(b1.data(), b1.size());
    f(w2.data(), w2.size());
    f(b2.data(), b2.size());
  }
  template <typename F>
  void for_each_block(F&& f) const {
    f(dictionary.data(), dictionary.size());
    f(w1.data(), w1.size());
    f(b1.data(), b1.size());
    f(w2.data(), w2.size());
    f(b2.data(), b2.size());
  }

  template <typename T>
  DictionaryLayer<T> cast() const {
    return {dictionary.template cast<T>(), w1.template cast<T>(), b1.template cast<T>(),
            w2.template cast<T>(), b2.template cast<T>()};
  }

  // Exact elementwise equality; differently shaped layers compare unequal.
  bool operator==(const DictionaryLayer& o) const;
};

template <typename S>
using LayerGradients = DictionaryLayer<S>;

template <typename S>
struct LossBreakdown {
  S recon_kernel = 0;  // ||z - sg(D^T) f(z)||, gradient flows to the kernel
  S recon_dict = 0;    // ||z - D^T sg(f(z))||, gradient flows to D
  S sparsity = 0;      // |f(z) - E_batch f(z)|_1
  S total = 0;         // recon_kernel + recon_dict + l1_weight * sparsity
};

// Selects which loss terms contribute gradients; all on for training.
struct TermMask {
  bool recon_kernel = true;
  bool recon_dict = true;
  bool sparsity = true;
};

template <typename S>
struct LossAndGradients {
  LossBreakdown<S> loss;
  LayerGradients<S> grads;
};

template <typename S>
Vector<S> kernel_forward(const DictionaryLayer<S>& layer, VectorIn<S> z);

// Column-batched kernel: z is d x B, result is m x B.
template <typename S>
Matrix<S> kernel_forward_batch(const DictionaryLayer<S>& layer, MatrixIn<S> z);

template <typename S>
Vector<S> reconstruct(const DictionaryLayer<S>& layer, VectorIn<S> t);

// batch is B x d with one word vector per row.
template <typename S>
LossBreakdown<S> dict_loss(const DictionaryLayer<S>& layer, RowMatrixIn<S> batch,
                           std::type_identity_t<S> l1_weight = S(1));

// Stop-gradient semantics: D receives only the recon_dict gradient, the kernel
// receives recon_kernel and sparsity gradients. Norm and L1 subgradients at 0
// are 0; the ReLU derivative at 0 is 0.
template <typename S>
LossAndGradients<S> dict_loss_gradients(const DictionaryLayer<S>& layer,
                                        RowMatrixIn<S> batch, std::type_identity_t<S> l1_weight = S(1),
                                        TermMask mask = {});

struct AdamHyper {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// In-place bias-corrected Adam over one flat parameter block. `step` is the
// 1-based step index after increment.
template <typename S>
void adam_update(std::span<S> param, std::span<const S> grad, std::span<S> first, std::span<S> second,
                 std::uint64_t step, const AdamHyper& hyper);

struct ModelState {
  TrainConfig config;
  std::vector<DictionaryLayer<float>> layers;
  std::vector<DictionaryLayer<float>> adam_first;
  std::vector<DictionaryLayer<float>> adam_second;
  std::uint64_t step = 0;

  bool operator==(const ModelState&) const = default;
};

ModelState init_model(const TrainConfig& config);

// Applies one Adam step to every layer. Throws TrainingError naming the step
// if any gradient is non-finite; the state is left untouched in that case.
void apply_adam_step(ModelState& state, const std::vector<LayerGradients<float>>& grads);
ModelState adam_step(const ModelState& state, const std::vector<LayerGradients<float>>& grads);

struct TrainOptions {
  std::uint32_t checkpoint_every = 1000;
  std::uint32_t log_every = 100;
  // Embedded verbatim in every checkpoint written.
  std::string provenance;
  // Called every log_every steps with (step, loss summed over layers, averaged over the window).
  std::function<void(std::uint64_t, const LossBreakdown<float>&)> on_log;
};

struct TrainResult {
  ModelState state;
  // Per-step loss summed over layers.
  std::vector<LossBreakdown<float>> history;
  std::vector<std::filesystem::path> checkpoints;
};

// Gathers every token row of the store into one B x d matrix, in key order.
RowMatrix<float> pool_word_vectors(const EmbeddingStore& store);

TrainResult train(const TrainConfig& config, const EmbeddingStore& embeddings,
                  const std::filesystem::path& checkpoint_dir, const TrainOptions& options = {});
// Same, over pre-pooled word vectors (B x d).
TrainResult train(const TrainConfig& config, const RowMatrix<float>& words,
                  const std::filesystem::path& checkpoint_dir, const TrainOptions& options = {});

inline constexpr char kCheckpointMagic[4] = {'G', 'S', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelState state;
  std::string provenance;
};

std::string encode_checkpoint(const ModelState& state, std::string_view provenance = {});
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const ModelState& state, const std::filesystem::path& path,
                     std::string_view provenance = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace topisum
