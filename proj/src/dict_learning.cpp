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
#include "topisum/dict_learning.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "topisum/binary_io.hpp"
#include "topisum/errors.hpp"

namespace topisum {

namespace {

template <typename S>
bool same_block(const Matrix<S>& a, const Matrix<S>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

template <typename S>
bool same_block(const Vector<S>& a, const Vector<S>& b) {
  return a.size() == b.size() && a == b;
}

template <typename S>
void check_layer_input(const DictionaryLayer<S>& layer, Eigen::Index rows, const char* what) {
  if (rows != layer.d()) {
    throw ShapeError(std::string(what) + " has length " + std::to_string(rows) + ", layer expects d=" +
                     std::to_string(layer.d()));
  }
}

template <typename S>
S sign_or_zero(S v) {
  return v > S(0) ? S(1) : (v < S(0) ? S(-1) : S(0));
}

}  // namespace

void TrainConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("train config: ") + what);
  };
  require(m > 0, "m must be positive");
  require(layers > 0, "layers must be positive");
  require(dim > 0, "dim must be positive");
  require(hidden > 0, "hidden must be positive");
  require(std::isfinite(lr) && lr > 0.0f, "lr must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(std::isfinite(l1_weight) && l1_weight >= 0.0f, "l1_weight must be non-negative");
}

template <typename S>
DictionaryLayer<S> DictionaryLayer<S>::zeros(Eigen::Index m, Eigen::Index d, Eigen::Index h) {
  return {Matrix<S>::Zero(m, d), Matrix<S>::Zero(h, d), Vector<S>::Zero(h), Matrix<S>::Zero(m, h),
          Vector<S>::Zero(m)};
}

template <typename S>
bool DictionaryLayer<S>::all_finite() const {
  return dictionary.allFinite() && w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

template <typename S>
bool DictionaryLayer<S>::operator==(const DictionaryLayer& o) const {
  return same_block(dictionary, o.dictionary) && same_block(w1, o.w1) && same_block(b1, o.b1) &&
         same_block(w2, o.w2) && same_block(b2, o.b2);
}

template <typename S>
Vector<S> kernel_forward(const DictionaryLayer<S>& layer, VectorIn<S> z) {
  check_layer_input(layer, z.size(), "kernel input");
  Vector<S> hidden = (layer.w1 * z + layer.b1).cwiseMax(S(0));
  return (layer.w2 * hidden + layer.b2).cwiseMax(S(0));
}

template <typename S>
Matrix<S> kernel_forward_batch(const DictionaryLayer<S>& layer, MatrixIn<S> z) {
  check_layer_input(layer, z.rows(), "kernel batch");
  Matrix<S> hidden = ((layer.w1 * z).colwise() + layer.b1).cwiseMax(S(0));
  return ((layer.w2 * hidden).colwise() + layer.b2).cwiseMax(S(0));
}

template <typename S>
Vector<S> reconstruct(const DictionaryLayer<S>& layer, VectorIn<S> t) {
  if (t.size() != layer.m()) {
    throw ShapeError("code has length " + std::to_string(t.size()) + ", layer expects m=" +
                     std::to_string(layer.m()));
  }
  return layer.dictionary.transpose() * t;
}

namespace {

// Forward pass shared by the loss and its gradients; columns are samples.
template <typename S>
struct Forward {
  Matrix<S> z;         // d x B
  Matrix<S> pre1;      // h x B
  Matrix<S> hidden;    // h x B
  Matrix<S> pre2;      // m x B
  Matrix<S> codes;     // m x B
  Matrix<S> residual;  // d x B
  Vector<S> norms;     // B
  Matrix<S> deviation; // m x B, codes minus batch mean
  LossBreakdown<S> loss;
};

template <typename S>
Forward<S> run_forward(const DictionaryLayer<S>& layer, RowMatrixIn<S> batch, S l1_weight) {
  if (batch.rows() == 0) throw ArgumentError("dict_loss: empty batch");
  if (batch.cols() != layer.d()) {
    throw ShapeError("batch has " + std::to_string(batch.cols()) + " columns, layer expects d=" +
                     std::to_string(layer.d()));
  }
  Forward<S> f;
  const auto count = static_cast<S>(batch.rows());
  f.z = batch.transpose();
  f.pre1 = (layer.w1 * f.z).colwise() + layer.b1;
  f.hidden = f.pre1.cwiseMax(S(0));
  f.pre2 = (layer.w2 * f.hidden).colwise() + layer.b2;
  f.codes = f.pre2.cwiseMax(S(0));
  f.residual = f.z - layer.dictionary.transpose() * f.codes;
  f.norms = f.residual.colwise().norm().transpose();
  // Running mean: exact when every code in the batch is identical.
  Vector<S> mean = f.codes.col(0);
  for (Eigen::Index b = 1; b < f.codes.cols(); ++b) mean += (f.codes.col(b) - mean) / static_cast<S>(b + 1);
  f.deviation = f.codes.colwise() - mean;

  const S recon = f.norms.sum() / count;
  f.loss.recon_kernel = recon;
  f.loss.recon_dict = recon;
  f.loss.sparsity = f.deviation.cwiseAbs().sum() / count;
  f.loss.total = f.loss.recon_kernel + f.loss.recon_dict + l1_weight * f.loss.sparsity;
  return f;
}

}  // namespace

template <typename S>
LossBreakdown<S> dict_loss(const DictionaryLayer<S>& layer, RowMatrixIn<S> batch,
                           std::type_identity_t<S> l1_weight) {
  return run_forward(layer, batch, l1_weight).loss;
}

template <typename S>
LossAndGradients<S> dict_loss_gradients(const DictionaryLayer<S>& layer, RowMatrixIn<S> batch,
                                        std::type_identity_t<S> l1_weight, TermMask mask) {
  const Forward<S> f = run_forward(layer, batch, l1_weight);
  const auto count = static_cast<S>(batch.rows());
  LossAndGradients<S> out{f.loss, LayerGradients<S>::zeros(layer.m(), layer.d(), layer.h())};

  // Unit residual directions, zero where the residual vanishes.
  Matrix<S> unit = Matrix<S>::Zero(f.residual.rows(), f.residual.cols());
  for (Eigen::Index b = 0; b < f.residual.cols(); ++b) {
    if (f.norms(b) > S(0)) unit.col(b) = f.residual.col(b) / f.norms(b);
  }

  if (mask.recon_dict) {
    out.grads.dictionary = -(f.codes * unit.transpose()) / count;
  }

  Matrix<S> code_grad = Matrix<S>::Zero(f.codes.rows(), f.codes.cols());
  if (mask.recon_kernel) {
    code_grad -= (layer.dictionary * unit) / count;
  }
  if (mask.sparsity && l1_weight != S(0)) {
    const Matrix<S> signs = f.deviation.unaryExpr([](S v) { return sign_or_zero(v); });
    const Vector<S> mean_sign = signs.rowwise().sum() / count;
    code_grad += (l1_weight / count) * (signs.colwise() - mean_sign);
  }

  if (mask.recon_kernel || mask.sparsity) {
    const Matrix<S> pre2_grad =
        code_grad.binaryExpr(f.pre2, [](S g, S p) { return p > S(0) ? g : S(0); });
    out.grads.w2 = pre2_grad * f.hidden.transpose();
    out.grads.b2 = pre2_grad.rowwise().sum();
    const Matrix<S> hidden_grad = layer.w2.transpose() * pre2_grad;
    const Matrix<S> pre1_grad =
        hidden_grad.binaryExpr(f.pre1, [](S g, S p) { return p > S(0) ? g : S(0); });
    out.grads.w1 = pre1_grad * f.z.transpose();
    out.grads.b1 = pre1_grad.rowwise().sum();
  }
  return out;
}

template <typename S>
void adam_update(std::span<S> param, std::span<const S> grad, std::span<S> first, std::span<S> second,
                 std::uint64_t step, const AdamHyper& hyper) {
  if (grad.size() != param.size() || first.size() != param.size() || second.size() != param.size()) {
    throw ShapeError("adam_update: block sizes differ");
  }
  const double correction1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = static_cast<double>(grad[i]);
    const double m = hyper.beta1 * static_cast<double>(first[i]) + (1.0 - hyper.beta1) * g;
    const double v = hyper.beta2 * static_cast<double>(second[i]) + (1.0 - hyper.beta2) * g * g;
    first[i] = static_cast<S>(m);
    second[i] = static_cast<S>(v);
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    param[i] = static_cast<S>(static_cast<double>(param[i]) - hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps));
  }
}

ModelState init_model(const TrainConfig& config) {
  config.validate();
  ModelState state;
  state.config = config;
  const auto m = static_cast<Eigen::Index>(config.m);
  const auto d = static_cast<Eigen::Index>(config.dim);
  const auto h = static_cast<Eigen::Index>(config.hidden);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<float> atom(0.0f, 1.0f / std::sqrt(static_cast<float>(d)));
  const auto glorot = [&](Matrix<float>& w) {
    const float limit = std::sqrt(6.0f / static_cast<float>(w.rows() + w.cols()));
    std::uniform_real_distribution<float> u(-limit, limit);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
    }
  };
  for (std::uint32_t j = 0; j < config.layers; ++j) {
    auto layer = DictionaryLayer<float>::zeros(m, d, h);
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < m; ++r) layer.dictionary(r, c) = atom(rng);
    }
    glorot(layer.w1);
    glorot(layer.w2);
    state.layers.push_back(std::move(layer));
    state.adam_first.push_back(DictionaryLayer<float>::zeros(m, d, h));
    state.adam_second.push_back(DictionaryLayer<float>::zeros(m, d, h));
  }
  return state;
}

void apply_adam_step(ModelState& state, const std::vector<LayerGradients<float>>& grads) {
  const std::uint64_t next = state.step + 1;
  if (grads.size() != state.layers.size()) throw ShapeError("adam_step: gradient count != layer count");
  for (std::size_t j = 0; j < grads.size(); ++j) {
    if (!grads[j].all_finite()) {
      throw TrainingError("non-finite gradient in layer " + std::to_string(j) + " at step " +
                          std::to_string(next));
    }
    if (grads[j].m() != state.layers[j].m() || grads[j].d() != state.layers[j].d() ||
        grads[j].h() != state.layers[j].h()) {
      throw ShapeError("adam_step: gradient shape mismatch in layer " + std::to_string(j));
    }
  }
  const AdamHyper hyper{static_cast<double>(state.config.lr)};
  for (std::size_t j = 0; j < grads.size(); ++j) {
    std::vector<std::span<float>> params, firsts, seconds;
    std::vector<std::span<const float>> gs;
    const auto collect = [](auto& out) {
      return [&out](auto* data, Eigen::Index n) { out.emplace_back(data, static_cast<std::size_t>(n)); };
    };
    state.layers[j].for_each_block(collect(params));
    state.adam_first[j].for_each_block(collect(firsts));
    state.adam_second[j].for_each_block(collect(seconds));
    grads[j].for_each_block(collect(gs));
    for (std::size_t b = 0; b < params.size(); ++b) {
      adam_update<float>(params[b], gs[b], firsts[b], seconds[b], next, hyper);
    }
  }
  state.step = next;
}

ModelState adam_step(const ModelState& state, const std::vector<LayerGradients<float>>& grads) {
  ModelState next = state;
  apply_adam_step(next, grads);
  return next;
}

RowMatrix<float> pool_word_vectors(const EmbeddingStore& store) {
  RowMatrix<float> words(static_cast<Eigen::Index>(store.total_rows()), store.dim());
  Eigen::Index row = 0;
  for (const auto& [_, m] : store.sentences()) {
    words.middleRows(row, m.rows()) = m;
    row += m.rows();
  }
  return words;
}

TrainResult train(const TrainConfig& config, const EmbeddingStore& embeddings,
                  const std::filesystem::path& checkpoint_dir, const TrainOptions& options) {
  if (embeddings.dim() != config.dim) {
    throw ConfigError("embedding dim " + std::to_string(embeddings.dim()) + " does not match config dim " +
                      std::to_string(config.dim));
  }
  return train(config, pool_word_vectors(embeddings), checkpoint_dir, options);
}

TrainResult train(const TrainConfig& config, const RowMatrix<float>& words,
                  const std::filesystem::path& checkpoint_dir, const TrainOptions& options) {
  config.validate();
  if (words.cols() != static_cast<Eigen::Index>(config.dim)) {
    throw ConfigError("embedding dim " + std::to_string(words.cols()) + " does not match config dim " +
                      std::to_string(config.dim));
  }
  if (config.steps > 0 && words.rows() == 0) throw ConfigError("no word vectors to train on");

  std::error_code ec;
  std::filesystem::create_directories(checkpoint_dir, ec);
  if (ec) throw IoError("cannot create checkpoint dir " + checkpoint_dir.string() + ": " + ec.message());

  TrainResult result{init_model(config), {}, {}};
  ModelState& state = result.state;
  const auto write_checkpoint = [&] {
    char name[32];
    std::snprintf(name, sizeof(name), "ckpt-%06llu.gsck", static_cast<unsigned long long>(state.step));
    const auto path = checkpoint_dir / name;
    save_checkpoint(state, path, options.provenance);
    result.checkpoints.push_back(path);
  };

  std::mt19937_64 sampler(config.seed ^ 0x9E3779B97F4A7C15ull);
  std::uniform_int_distribution<Eigen::Index> pick(0, std::max<Eigen::Index>(words.rows() - 1, 0));
  RowMatrix<float> batch(config.batch_size, config.dim);
  std::vector<LayerGradients<float>> grads(state.layers.size());
  LossBreakdown<float> window{};

  for (std::uint32_t s = 0; s < config.steps; ++s) {
    for (Eigen::Index r = 0; r < batch.rows(); ++r) batch.row(r) = words.row(pick(sampler));
    LossBreakdown<float> step_loss{};
    for (std::size_t j = 0; j < state.layers.size(); ++j) {
      auto lg = dict_loss_gradients<float>(state.layers[j], batch, config.l1_weight);
      step_loss.recon_kernel += lg.loss.recon_kernel;
      step_loss.recon_dict += lg.loss.recon_dict;
      step_loss.sparsity += lg.loss.sparsity;
      step_loss.total += lg.loss.total;
      grads[j] = std::move(lg.grads);
    }
    apply_adam_step(state, grads);
    result.history.push_back(step_loss);

    window.recon_kernel += step_loss.recon_kernel;
    window.recon_dict += step_loss.recon_dict;
    window.sparsity += step_loss.sparsity;
    window.total += step_loss.total;
    if (options.log_every > 0 && state.step % options.log_every == 0) {
      const auto n = static_cast<float>(options.log_every);
      if (options.on_log) {
        options.on_log(state.step, {window.recon_kernel / n, window.recon_dict / n, window.sparsity / n,
                                    window.total / n});
      }
      window = {};
    }
    if (options.checkpoint_every > 0 && state.step % options.checkpoint_every == 0) write_checkpoint();
  }
  if (result.checkpoints.empty() || options.checkpoint_every == 0 ||
      state.step % options.checkpoint_every != 0) {
    write_checkpoint();
  }
  return result;
}

namespace {

void put_layer(BinaryWriter& w, const DictionaryLayer<float>& layer) {
  const auto put_matrix = [&](const Matrix<float>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) w.put(m(i, j));
    }
  };
  put_matrix(layer.dictionary);
  put_matrix(layer.w1);
  for (Eigen::Index i = 0; i < layer.b1.size(); ++i) w.put(layer.b1(i));
  put_matrix(layer.w2);
  for (Eigen::Index i = 0; i < layer.b2.size(); ++i) w.put(layer.b2(i));
}

DictionaryLayer<float> get_layer(BinaryReader& r, const TrainConfig& c) {
  auto layer = DictionaryLayer<float>::zeros(c.m, c.dim, c.hidden);
  const auto get_matrix = [&](Matrix<float>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.get<float>();
    }
  };
  get_matrix(layer.dictionary);
  get_matrix(layer.w1);
  for (Eigen::Index i = 0; i < layer.b1.size(); ++i) layer.b1(i) = r.get<float>();
  get_matrix(layer.w2);
  for (Eigen::Index i = 0; i < layer.b2.size(); ++i) layer.b2(i) = r.get<float>();
  return layer;
}

}  // namespace

std::string encode_checkpoint(const ModelState& state, std::string_view provenance) {
  const TrainConfig& c = state.config;
  BinaryWriter w;
  w.put_bytes(std::string_view(kCheckpointMagic, 4));
  w.put<std::uint16_t>(kCheckpointVersion);
  w.put<std::uint32_t>(c.m);
  w.put<std::uint32_t>(c.layers);
  w.put<std::uint32_t>(c.dim);
  w.put<std::uint32_t>(c.hidden);
  w.put<float>(c.lr);
  w.put<std::uint32_t>(c.batch_size);
  w.put<std::uint32_t>(c.steps);
  w.put<float>(c.l1_weight);
  w.put<std::uint64_t>(c.seed);
  for (const auto& layer : state.layers) put_layer(w, layer);
  for (const auto& layer : state.adam_first) put_layer(w, layer);
  for (const auto& layer : state.adam_second) put_layer(w, layer);
  w.put<std::uint64_t>(state.step);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(provenance.size()));
  w.put_bytes(provenance);
  return std::move(w).take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  BinaryReader r(std::span<const char>(bytes.data(), bytes.size()));
  r.set_context("checkpoint header");
  if (r.get_bytes(4) != std::string_view(kCheckpointMagic, 4)) throw FormatError("bad magic: not a GSCK file");
  const auto version = r.get<std::uint16_t>();
  if (version != kCheckpointVersion) throw FormatError("unsupported GSCK version " + std::to_string(version));
  Checkpoint ck;
  TrainConfig& c = ck.state.config;
  c.m = r.get<std::uint32_t>();
  c.layers = r.get<std::uint32_t>();
  c.dim = r.get<std::uint32_t>();
  c.hidden = r.get<std::uint32_t>();
  c.lr = r.get<float>();
  c.batch_size = r.get<std::uint32_t>();
  c.steps = r.get<std::uint32_t>();
  c.l1_weight = r.get<float>();
  c.seed = r.get<std::uint64_t>();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint carries an invalid config: ") + e.what());
  }
  const std::uint64_t per_layer = 4ull * (static_cast<std::uint64_t>(c.m) * c.dim +
                                          static_cast<std::uint64_t>(c.hidden) * c.dim + c.hidden +
                                          static_cast<std::uint64_t>(c.m) * c.hidden + c.m);
  if (r.remaining() / 3 / c.layers < per_layer) {
    // Let the reader produce the standard truncation error.
    r.set_context("checkpoint parameters");
    r.get_bytes(r.remaining() + 1);
  }
  const auto read_all = [&](std::vector<DictionaryLayer<float>>& out, const char* what) {
    for (std::uint32_t j = 0; j < c.layers; ++j) {
      r.set_context(std::string(what) + " of layer " + std::to_string(j));
      out.push_back(get_layer(r, c));
    }
  };
  read_all(ck.state.layers, "parameters");
  read_all(ck.state.adam_first, "first moments");
  read_all(ck.state.adam_second, "second moments");
  r.set_context("checkpoint trailer");
  ck.state.step = r.get<std::uint64_t>();
  const auto prov_len = r.get<std::uint32_t>();
  ck.provenance = r.get_bytes(prov_len);
  if (!r.at_end()) throw FormatError("trailing bytes after checkpoint");
  return ck;
}

void save_checkpoint(const ModelState& state, const std::filesystem::path& path, std::string_view provenance) {
  write_file_bytes(path, encode_checkpoint(state, provenance));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_checkpoint(std::string_view(bytes.data(), bytes.size()));
}

#define TOPISUM_INSTANTIATE(S)                                                                        \
  template struct DictionaryLayer<S>;                                                                 \
  template Vector<S> kernel_forward<S>(const DictionaryLayer<S>&, VectorIn<S>);                     \
  template Matrix<S> kernel_forward_batch<S>(const DictionaryLayer<S>&, MatrixIn<S>);               \
  template Vector<S> reconstruct<S>(const DictionaryLayer<S>&, VectorIn<S>);                        \
  template LossBreakdown<S> dict_loss<S>(const DictionaryLayer<S>&, RowMatrixIn<S>,                 \
                                         std::type_identity_t<S>);                                  \
  template LossAndGradients<S> dict_loss_gradients<S>(const DictionaryLayer<S>&, RowMatrixIn<S>,    \
                                                      std::type_identity_t<S>, TermMask);           \
  template void adam_update<S>(std::span<S>, std::span<const S>, std::span<S>, std::span<S>,        \
                               std::uint64_t, const AdamHyper&);

TOPISUM_INSTANTIATE(float)
TOPISUM_INSTANTIATE(double)

#undef TOPISUM_INSTANTIATE

}  // namespace topisum
