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
#include "topisum/rouge_eval.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "topisum/errors.hpp"

namespace topisum {

namespace {

const std::set<std::string_view>& stopwords() {
  static const std::set<std::string_view> words = {
      "a",    "an",   "and",  "are",  "as",   "at",    "be",   "but",  "by",   "for",  "if",
      "in",   "into", "is",   "it",   "its",  "no",    "not",  "of",   "on",   "or",   "so",
      "such", "that", "the",  "their", "then", "there", "these", "they", "this", "to",  "was",
      "we",   "were", "will", "with", "i",    "you",   "he",   "she",  "my",   "our",  "your"};
  return words;
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

using NgramCounts = std::unordered_map<std::string, std::uint32_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::uint32_t n, std::uint32_t& total) {
  NgramCounts counts;
  total = 0;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
    ++total;
  }
  return counts;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

template <typename PerReference>
RougeScore aggregate(std::span<const std::string> references, const RougeOptions& options, PerReference&& score) {
  if (references.empty()) throw ArgumentError("ROUGE needs at least one reference");
  RougeScore best;
  RougeScore sum;
  bool first = true;
  for (const auto& ref : references) {
    const RougeScore s = score(ref);
    if (first || s.f1 > best.f1) best = s;
    first = false;
    sum.precision += s.precision;
    sum.recall += s.recall;
    sum.f1 += s.f1;
  }
  if (options.aggregation == RefAggregation::kMax) return best;
  const auto n = static_cast<double>(references.size());
  return RougeScore{sum.precision / n, sum.recall / n, sum.f1 / n};
}

}  // namespace

RougeScore make_rouge_score(double precision, double recall) {
  const double denom = precision + recall;
  return RougeScore{precision, recall, denom > 0.0 ? 2.0 * precision * recall / denom : 0.0};
}

std::vector<std::string> rouge_tokenize(std::string_view text, const RougeOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (current.empty()) return;
    if (options.fold_plurals && current.size() > 3 && current.back() == 's' && current[current.size() - 2] != 's') {
      current.pop_back();
    }
    if (!options.remove_stopwords || !stopwords().count(current)) tokens.push_back(current);
    current.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

RougeScore rouge_n(std::string_view candidate, std::span<const std::string> references, std::uint32_t n,
                   const RougeOptions& options) {
  if (n < 1) throw ArgumentError("rouge_n: n must be at least 1");
  std::uint32_t cand_total = 0;
  const NgramCounts cand = count_ngrams(rouge_tokenize(candidate, options), n, cand_total);
  return aggregate(references, options, [&](const std::string& ref) {
    std::uint32_t ref_total = 0;
    const NgramCounts ref_counts = count_ngrams(rouge_tokenize(ref, options), n, ref_total);
    std::uint64_t overlap = 0;
    for (const auto& [gram, c] : cand) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) overlap += std::min(c, it->second);
    }
    return make_rouge_score(ratio(static_cast<double>(overlap), cand_total),
                            ratio(static_cast<double>(overlap), ref_total));
  });
}

RougeScore rouge_l(std::string_view candidate, std::span<const std::string> references,
                   const RougeOptions& options) {
  const auto cand = rouge_tokenize(candidate, options);
  return aggregate(references, options, [&](const std::string& ref) {
    const auto ref_tokens = rouge_tokenize(ref, options);
    const auto lcs = static_cast<double>(lcs_length(cand, ref_tokens));
    return make_rouge_score(ratio(lcs, static_cast<double>(cand.size())),
                            ratio(lcs, static_cast<double>(ref_tokens.size())));
  });
}

RunReport evaluate_run(const std::map<std::string, std::vector<std::string>>& summaries,
                       const std::map<std::string, std::vector<std::string>>& gold,
                       const RougeOptions& options) {
  RunReport report;
  for (const auto& [entity, sentences] : summaries) {
    auto it = gold.find(entity);
    if (it == gold.end() || it->second.empty()) {
      throw LookupError("no gold reference for entity '" + entity + "'");
    }
    std::string text;
    for (const auto& s : sentences) {
      if (!text.empty()) text.push_back(' ');
      text += s;
    }
    EntityRouge scores{rouge_n(text, it->second, 1, options), rouge_n(text, it->second, 2, options),
                       rouge_l(text, it->second, options)};
    report.mean_r1 += scores.r1.f1;
    report.mean_r2 += scores.r2.f1;
    report.mean_rl += scores.rl.f1;
    report.per_entity.emplace(entity, scores);
  }
  if (!report.per_entity.empty()) {
    const auto n = static_cast<double>(report.per_entity.size());
    report.mean_r1 /= n;
    report.mean_r2 /= n;
    report.mean_rl /= n;
  }
  return report;
}

}  // namespace topisum
