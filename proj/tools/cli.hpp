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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "topisum/dict_learning.hpp"
#include "topisum/errors.hpp"

namespace topisum::cli {

// Process exit statuses. Library error kinds collapse onto these.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitFormat = 5,
  kExitValidation = 6,
  kExitLookup = 7,
  kExitTraining = 8,
  kExitDegenerate = 9,
};

int exit_code(ErrorKind kind) noexcept;

// Everything a command reads from flags and config files. Serialized into
// every artifact the command writes.
struct RunConfig {
  std::string command;
  std::string profile = "desk";
  std::string config_file;

  TrainConfig train;
  bool train_known = false;  // false when no model or training run is involved
  bool dim_given = false;
  bool hidden_given = false;
  std::uint32_t checkpoint_every = 1000;
  std::uint32_t log_every = 100;

  std::uint32_t k = 10;
  std::uint32_t q = 10;
  float gamma = 0.5f;
  std::string scorer = "geodesic";
  bool reverse_edges = false;
  std::vector<std::string> lexicons;
  std::vector<std::string> aspects;
  bool fold_plurals = true;
  std::vector<std::string> entities;

  std::string aggregation = "max";
  bool rouge_fold_plurals = false;
  bool remove_stopwords = false;

  std::uint32_t clusters = 0;
  std::string geometry = "euclidean";
  std::string sparsity_out;
  std::string clusters_out;
  std::string compare_out;

  std::string corpus;
  std::string embeddings;
  std::string checkpoint;
  std::string reps;
  std::string summaries;
  std::string gold;
  std::string out;
  std::string out_dir = "checkpoints";

  // Checks cross-field constraints for the current command.
  void validate() const;
  // Canonical JSON text; key order is fixed.
  std::string to_json() const;
};

// Built-in training profiles: "paper" and "desk".
TrainConfig profile_defaults(std::string_view name);

// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topisum::cli
