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
#include <string>
#include <string_view>
#include <vector>

#include "topisum/corpus_io.hpp"

namespace topisum {

// Whitespace tokens of a sentence, lowercased; never empty for a valid sentence.
std::vector<std::string> synthetic_tokens(std::string_view text);

// Deterministic N(0, 1) vector for a token string via SHA-256 and Box-Muller;
// portable across standard libraries. The same token always maps to the same vector.
Eigen::VectorXf synthetic_token_vector(std::string_view token, std::uint32_t dim, std::uint64_t seed);

// One row per whitespace token of every sentence. Runs without any encoder.
EmbeddingStore synthetic_embeddings(const Corpus& corpus, std::uint32_t dim, std::uint64_t seed);

}  // namespace topisum
