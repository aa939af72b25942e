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
#include <string>
#include <string_view>
#include <vector>

namespace topisum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean, 0 when p + r == 0.
RougeScore make_rouge_score(double precision, double recall);

enum class RefAggregation { kMax, kAverage };

struct RougeOptions {
  RefAggregation aggregation = RefAggregation::kMax;
  // Fold trailing plural "s", as in aspect keyword matching.
  bool fold_plurals = false;
  bool remove_stopwords = false;
};

// Lowercase, split on non-alphanumeric ASCII; bytes >= 0x80 count as word characters.
std::vector<std::string> rouge_tokenize(std::string_view text, const RougeOptions& options = {});

RougeScore rouge_n(std::string_view candidate, std::span<const std::string> references, std::uint32_t n,
                   const RougeOptions& options = {});
RougeScore rouge_l(std::string_view candidate, std::span<const std::string> references,
                   const RougeOptions& options = {});

struct EntityRouge {
  RougeScore r1, r2, rl;
};

struct RunReport {
  std::map<std::string, EntityRouge> per_entity;
  double mean_r1 = 0.0;
  double mean_r2 = 0.0;
  double mean_rl = 0.0;
};

// summaries: entity -> selected sentence texts in output order (joined by one
// space); gold: entity -> reference summaries.
RunReport evaluate_run(const std::map<std::string, std::vector<std::string>>& summaries,
                       const std::map<std::string, std::vector<std::string>>& gold,
                       const RougeOptions& options = {});

}  // namespace topisum
