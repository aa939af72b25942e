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
#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "topisum/analysis.hpp"
#include "topisum/binary_io.hpp"
#include "topisum/corpus_io.hpp"
#include "topisum/geodesic_selector.hpp"
#include "topisum/rouge_eval.hpp"
#include "topisum/synthetic.hpp"
#include "topisum/topical_repr.hpp"

namespace topisum::cli {
namespace {

using Json = nlohmann::ordered_json;

// Shortest decimal that round-trips the float, so 1e-5f prints as 1e-05.
double tidy(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  *res.ptr = '\0';
  return std::strtod(buf, nullptr);
}

Json train_json(const TrainConfig& t) {
  return Json{{"m", t.m},
              {"layers", t.layers},
              {"dim", t.dim},
              {"hidden", t.hidden},
              {"lr", tidy(t.lr)},
              {"batch_size", t.batch_size},
              {"steps", t.steps},
              {"l1_weight", tidy(t.l1_weight)},
              {"seed", t.seed}};
}

// Content hashes of every file a command read, keyed by role.
class Inputs {
 public:
  void add(const std::string& role, const std::string& path) {
    entries_[role] = Json{{"path", path}, {"sha256", sha256_file(path)}};
  }
  Json json() const {
    Json out = Json::object();
    for (const auto& [role, entry] : entries_) out[role] = entry;
    return out;
  }

 private:
  std::map<std::string, Json> entries_;
};

Json provenance(const RunConfig& cfg, const Inputs& inputs) {
  return Json{{"run_config", Json::parse(cfg.to_json())}, {"inputs", inputs.json()}};
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_bytes(path, text);
  }
}

Json load_json_file(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<const Entity*> chosen_entities(const Corpus& corpus, const RunConfig& cfg) {
  std::vector<const Entity*> out;
  if (cfg.entities.empty()) {
    for (const auto& e : corpus.entities) out.push_back(&e);
  } else {
    for (const auto& id : cfg.entities) out.push_back(&corpus.entity(id));
  }
  return out;
}

// Reps come either from a model applied to embeddings or straight from a dump.
struct RepSource {
  std::optional<ModelState> model;
  std::optional<EmbeddingStore> store;
  std::optional<RepDump> dump;

  std::vector<TopicalRep> for_entity(const Entity& entity) const {
    if (!dump) return represent_entity(*model, entity, *store);
    auto reps = dump->entity(entity.entity_id);
    std::set<std::uint32_t> have;
    for (const auto& r : reps) have.insert(r.key.sent_id);
    for (std::uint32_t id = 0; id < entity.sentence_count(); ++id) {
      if (!have.count(id)) {
        throw LookupError("rep dump has no entry for " + to_string(SentKey{entity.entity_id, id}));
      }
    }
    if (have.size() != entity.sentence_count()) {
      throw ValidationError("rep dump holds " + std::to_string(have.size()) + " reps for entity '" +
                            entity.entity_id + "', corpus has " + std::to_string(entity.sentence_count()) +
                            " sentences");
    }
    return reps;
  }
};

void check_model_dim(const ModelState& model, const EmbeddingStore& store) {
  if (model.config.dim != store.dim()) {
    throw ConfigError("checkpoint expects embedding dim " + std::to_string(model.config.dim) +
                      " but the embedding file has dim " + std::to_string(store.dim()));
  }
}

RepSource open_reps(RunConfig& cfg, Inputs& inputs) {
  RepSource src;
  if (!cfg.reps.empty()) {
    inputs.add("reps", cfg.reps);
    src.dump = read_rep_file(cfg.reps);
    return src;
  }
  inputs.add("checkpoint", cfg.checkpoint);
  inputs.add("embeddings", cfg.embeddings);
  src.model = load_checkpoint(cfg.checkpoint).state;
  src.store = read_embedding_file(cfg.embeddings);
  check_model_dim(*src.model, *src.store);
  cfg.train = src.model->config;
  cfg.train_known = true;
  return src;
}

Corpus open_corpus(const RunConfig& cfg, Inputs& inputs) {
  inputs.add("corpus", cfg.corpus);
  return load_corpus(cfg.corpus);
}

// Budget clamped to the entity size; the clamp is reported, not fatal.
std::uint32_t budget(std::uint32_t q, std::size_t available, std::vector<std::string>& warnings) {
  if (q <= available) return q;
  warnings.push_back("q=" + std::to_string(q) + " exceeds the entity's " + std::to_string(available) +
                     " sentences; using q=" + std::to_string(available));
  return static_cast<std::uint32_t>(available);
}

Json selection_json(const Entity& entity, const ImportanceResult& importance, const Selection& sel) {
  Json rows = Json::array();
  for (const auto& s : sel.selected) {
    Json distance = nullptr;
    if (auto it = importance.distances.find(s.sent_id); it != importance.distances.end() && std::isfinite(it->second)) {
      distance = it->second;
    }
    rows.push_back(Json{{"sent_id", s.sent_id},
                        {"score", tidy(s.score)},
                        {"distance", distance},
                        {"text", entity.sentence(s.sent_id).text}});
  }
  return rows;
}

Json summary_record(const Entity& entity, const RunConfig& cfg, const std::string& mode, Json aspect,
                    Json gamma, std::uint32_t q, const ImportanceResult& importance, Selection sel,
                    std::vector<std::string> warnings) {
  warnings.insert(warnings.end(), sel.warnings.begin(), sel.warnings.end());
  return Json{{"entity_id", entity.entity_id},
              {"mode", mode},
              {"aspect", std::move(aspect)},
              {"scorer", cfg.scorer},
              {"k", cfg.k},
              {"q", q},
              {"gamma", std::move(gamma)},
              {"selected", selection_json(entity, importance, sel)},
              {"warnings", warnings}};
}

SelectorOptions selector(const RunConfig& cfg) { return SelectorOptions{cfg.k, cfg.reverse_edges}; }

// ---------------------------------------------------------------------------

int cmd_train(RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Inputs inputs;
  inputs.add("embeddings", cfg.embeddings);
  const auto store = read_embedding_file(cfg.embeddings);
  if (!cfg.dim_given) {
    cfg.train.dim = store.dim();
  } else if (cfg.train.dim != store.dim()) {
    throw ConfigError("--dim " + std::to_string(cfg.train.dim) + " does not match the embedding dim " +
                      std::to_string(store.dim()) + " of " + cfg.embeddings);
  }
  if (!cfg.hidden_given) cfg.train.hidden = cfg.train.dim;
  cfg.train.validate();

  if (!cfg.corpus.empty()) {
    const auto corpus = open_corpus(cfg, inputs);
    std::set<SentKey> keys;
    for (const auto& e : corpus.entities) {
      for (std::uint32_t id = 0; id < e.sentence_count(); ++id) keys.insert(SentKey{e.entity_id, id});
    }
    for (const auto& key : keys) {
      if (!store.contains(key)) throw ValidationError("corpus sentence " + to_string(key) + " has no embedding");
    }
    for (const auto& [key, matrix] : store.sentences()) {
      if (!keys.count(key)) throw ValidationError("embedded sentence " + to_string(key) + " is not in the corpus");
    }
  }

  TrainOptions options;
  options.checkpoint_every = cfg.checkpoint_every;
  options.log_every = cfg.log_every;
  options.provenance = provenance(cfg, inputs).dump();
  if (cfg.log_every > 0) err << "step\trecon_kernel\trecon_dict\tsparsity\ttotal\n";
  options.on_log = [&err](std::uint64_t step, const LossBreakdown<float>& loss) {
    err << step << '\t' << tidy(loss.recon_kernel) << '\t' << tidy(loss.recon_dict) << '\t'
        << tidy(loss.sparsity) << '\t' << tidy(loss.total) << '\n';
  };
  const auto result = train(cfg.train, store, cfg.out_dir, options);

  out << "trained steps=" << result.state.step;
  if (!result.history.empty()) {
    const std::size_t window = std::min<std::size_t>(result.history.size(), 100);
    double recon = 0.0, sparsity = 0.0, total = 0.0;
    for (std::size_t i = result.history.size() - window; i < result.history.size(); ++i) {
      recon += result.history[i].recon_dict;
      sparsity += result.history[i].sparsity;
      total += result.history[i].total;
    }
    out << " final_recon=" << recon / window << " final_sparsity=" << sparsity / window
        << " final_total=" << total / window;
  }
  out << " checkpoint=" << result.checkpoints.back().string() << '\n';
  return kExitOk;
}

int cmd_summarize(RunConfig& cfg, std::ostream& out) {
  Inputs inputs;
  const auto corpus = open_corpus(cfg, inputs);
  const auto source = open_reps(cfg, inputs);
  Json records = Json::array();
  for (const Entity* entity : chosen_entities(corpus, cfg)) {
    const auto reps = source.for_entity(*entity);
    std::vector<std::string> warnings;
    const auto q = budget(cfg.q, reps.size(), warnings);
    const auto importance =
        cfg.scorer == "euclidean" ? euclidean_importance(reps) : importance_scores(reps, selector(cfg));
    records.push_back(summary_record(*entity, cfg, "general", nullptr, nullptr, q, importance,
                                     select_top(importance, q), std::move(warnings)));
  }
  Json doc = provenance(cfg, inputs);
  doc["summaries"] = std::move(records);
  emit(cfg.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_aspect(RunConfig& cfg, std::ostream& out) {
  Inputs inputs;
  std::map<std::string, AspectLexicon> lexicons;
  for (std::size_t i = 0; i < cfg.lexicons.size(); ++i) {
    inputs.add("lexicon[" + std::to_string(i) + "]", cfg.lexicons[i]);
    auto lex = load_aspect_lexicon(cfg.lexicons[i]);
    const std::string name = lex.aspect_name;
    if (!lexicons.emplace(name, std::move(lex)).second) {
      throw DuplicateError("aspect '" + name + "' is defined by more than one lexicon");
    }
  }
  std::vector<std::string> aspects = cfg.aspects;
  if (aspects.empty()) {
    for (const auto& [name, lex] : lexicons) aspects.push_back(name);
  }
  for (const auto& name : aspects) {
    if (lexicons.count(name)) continue;
    std::string available;
    for (const auto& [known, lex] : lexicons) available += (available.empty() ? "" : ", ") + known;
    throw LookupError("unknown aspect '" + name + "'; available: " + (available.empty() ? "(none)" : available));
  }

  const auto corpus = open_corpus(cfg, inputs);
  const auto source = open_reps(cfg, inputs);
  const MatchOptions match{cfg.fold_plurals};
  Json records = Json::array();
  for (const Entity* entity : chosen_entities(corpus, cfg)) {
    const auto reps = source.for_entity(*entity);
    for (const auto& name : aspects) {
      std::vector<std::string> warnings;
      const auto q = budget(cfg.q, reps.size(), warnings);
      const auto matched = match_aspect_sentences(corpus, entity->entity_id, lexicons.at(name), match);
      if (matched.empty()) {
        warnings.push_back("no sentence matches aspect '" + name + "'; using the general summary");
        const auto importance = importance_scores(reps, selector(cfg));
        records.push_back(summary_record(*entity, cfg, "general", name, nullptr, q, importance,
                                         select_top(importance, q), std::move(warnings)));
        continue;
      }
      const auto importance = aspect_importance(reps, matched, cfg.gamma, selector(cfg));
      auto record = summary_record(*entity, cfg, "aspect", name, tidy(cfg.gamma), q, importance,
                                   select_top(importance, q), std::move(warnings));
      record["matched"] = matched.size();
      records.push_back(std::move(record));
    }
  }
  Json doc = provenance(cfg, inputs);
  doc["summaries"] = std::move(records);
  emit(cfg.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

std::string summary_key(const Json& record) {
  std::string key = record.at("entity_id").get<std::string>();
  if (record.contains("aspect") && !record.at("aspect").is_null()) key += "#" + record.at("aspect").get<std::string>();
  return key;
}

Json rouge_json(const RougeScore& s) {
  return Json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

int cmd_evaluate(RunConfig& cfg, std::ostream& out) {
  Inputs inputs;
  inputs.add("summaries", cfg.summaries);
  inputs.add("gold", cfg.gold);
  std::map<std::string, std::vector<std::string>> candidates, gold;
  try {
    const Json doc = load_json_file(cfg.summaries);
    for (const auto& record : doc.at("summaries")) {
      std::vector<std::string> texts;
      for (const auto& row : record.at("selected")) texts.push_back(row.at("text").get<std::string>());
      if (!candidates.emplace(summary_key(record), std::move(texts)).second) {
        throw DuplicateError("summary file repeats " + summary_key(record));
      }
    }

    std::ifstream in(cfg.gold);
    if (!in) throw IoError("cannot open " + cfg.gold);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      Json row;
      try {
        row = Json::parse(line);
      } catch (const Json::parse_error& e) {
        throw ParseError(cfg.gold + ":" + std::to_string(lineno) + ": " + e.what());
      }
      const auto key = summary_key(row);
      auto& refs = gold[key];
      if (!refs.empty()) throw DuplicateError(cfg.gold + ":" + std::to_string(lineno) + ": repeats " + key);
      refs = row.at("summaries").get<std::vector<std::string>>();
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed summary or gold file: ") + e.what());
  }

  RougeOptions options;
  options.aggregation = cfg.aggregation == "average" ? RefAggregation::kAverage : RefAggregation::kMax;
  options.fold_plurals = cfg.rouge_fold_plurals;
  options.remove_stopwords = cfg.remove_stopwords;
  const auto report = evaluate_run(candidates, gold, options);

  Json doc = provenance(cfg, inputs);
  doc["settings"] = Json{{"aggregation", cfg.aggregation},
                         {"fold_plurals", cfg.rouge_fold_plurals},
                         {"remove_stopwords", cfg.remove_stopwords},
                         {"tokenizer", "lowercase, split on non-alphanumerics"}};
  Json per = Json::object();
  for (const auto& [key, s] : report.per_entity) {
    per[key] = Json{{"rouge_1", rouge_json(s.r1)}, {"rouge_2", rouge_json(s.r2)}, {"rouge_l", rouge_json(s.rl)}};
  }
  doc["per_entity"] = std::move(per);
  doc["mean_f1"] = Json{{"rouge_1", report.mean_r1}, {"rouge_2", report.mean_r2}, {"rouge_l", report.mean_rl}};
  emit(cfg.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

std::string sparsity_csv(const RunConfig& cfg, const Inputs& inputs, std::span<const TopicalRep> reps) {
  const auto profile = sparsity_profile(reps);
  std::vector<double> fractions;
  for (const auto& r : reps) fractions.push_back(small_entry_fraction(r.values, 1e-3));
  std::sort(fractions.begin(), fractions.end());
  const std::size_t mid = fractions.size() / 2;
  const double median =
      fractions.size() % 2 ? fractions[mid] : 0.5 * (fractions[mid - 1] + fractions[mid]);

  std::ostringstream csv;
  csv.precision(std::numeric_limits<double>::max_digits10);
  csv << "# run_config: " << cfg.to_json() << '\n';
  csv << "# inputs: " << inputs.json().dump() << '\n';
  csv << "# reps: " << reps.size() << '\n';
  csv << "# median_fraction_below_1e-3_of_max: " << median << '\n';
  csv << "rank,mean,stddev,lower_2sd,upper_2sd\n";
  for (std::size_t i = 0; i < profile.mean.size(); ++i) {
    const double m = profile.mean[i], s = profile.stddev[i];
    csv << i << ',' << m << ',' << s << ',' << m - 2 * s << ',' << m + 2 * s << '\n';
  }
  return csv.str();
}

int cmd_analyze(RunConfig& cfg, std::ostream& out) {
  if (cfg.sparsity_out.empty() && cfg.clusters == 0 && cfg.compare_out.empty()) {
    throw ArgumentError("analyze needs at least one of --sparsity, --clusters, --compare");
  }
  Inputs inputs;
  const auto corpus = open_corpus(cfg, inputs);
  const auto source = open_reps(cfg, inputs);
  const auto geometry = cfg.geometry == "cosine" ? WardGeometry::kCosine : WardGeometry::kEuclidean;

  std::vector<TopicalRep> pooled;
  Json cluster_records = Json::array();
  Json compare_records = Json::array();
  for (const Entity* entity : chosen_entities(corpus, cfg)) {
    const auto reps = source.for_entity(*entity);
    pooled.insert(pooled.end(), reps.begin(), reps.end());

    if (cfg.clusters > 0) {
      std::vector<std::string> warnings;
      const auto count = budget(cfg.clusters, reps.size(), warnings);
      const auto result = ward_clustering(reps, count, geometry);
      std::vector<Json> groups(count, Json::array());
      for (const auto& [sent_id, label] : result.labels) {
        groups[label].push_back(Json{{"sent_id", sent_id}, {"text", entity->sentence(sent_id).text}});
      }
      Json merges = Json::array();
      for (const auto& m : result.merge_tree) {
        merges.push_back(Json{{"left", m.left}, {"right", m.right}, {"cost", m.cost}, {"size", m.size}});
      }
      cluster_records.push_back(Json{{"entity_id", entity->entity_id},
                                     {"geometry", cfg.geometry},
                                     {"num_clusters", count},
                                     {"clusters", groups},
                                     {"merges", merges},
                                     {"warnings", warnings}});
    }
    if (!cfg.compare_out.empty()) {
      std::vector<std::string> warnings;
      const auto q = budget(cfg.q, reps.size(), warnings);
      const auto cmp = compare_scorers(reps, q, selector(cfg));
      compare_records.push_back(Json{{"entity_id", entity->entity_id},
                                     {"q", q},
                                     {"geodesic", cmp.geodesic},
                                     {"euclidean", cmp.euclidean},
                                     {"jaccard", cmp.overlap},
                                     {"warnings", warnings}});
    }
  }

  if (!cfg.sparsity_out.empty()) emit(cfg.sparsity_out, sparsity_csv(cfg, inputs, pooled), out);
  if (cfg.clusters > 0) {
    Json doc = provenance(cfg, inputs);
    doc["entities"] = std::move(cluster_records);
    emit(cfg.out, doc.dump(2) + "\n", out);
  }
  if (!cfg.compare_out.empty()) {
    Json doc = provenance(cfg, inputs);
    doc["entities"] = std::move(compare_records);
    emit(cfg.compare_out, doc.dump(2) + "\n", out);
  }
  return kExitOk;
}

int cmd_export_reps(RunConfig& cfg, std::ostream& out) {
  Inputs inputs;
  const auto corpus = open_corpus(cfg, inputs);
  const auto source = open_reps(cfg, inputs);
  RepDump dump;
  dump.dim = source.model->config.m * source.model->config.layers;
  for (const Entity* entity : chosen_entities(corpus, cfg)) {
    auto reps = source.for_entity(*entity);
    std::move(reps.begin(), reps.end(), std::back_inserter(dump.reps));
  }
  std::sort(dump.reps.begin(), dump.reps.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  write_rep_file(dump, cfg.out);
  Json sidecar = provenance(cfg, inputs);
  sidecar["rep_dim"] = dump.dim;
  sidecar["rep_count"] = dump.reps.size();
  sidecar["sha256"] = sha256_file(cfg.out);
  write_file_bytes(cfg.out + ".json", sidecar.dump(2) + "\n");
  out << "wrote " << dump.reps.size() << " reps to " << cfg.out << '\n';
  return kExitOk;
}

int cmd_export_synthetic(RunConfig& cfg, std::ostream& out) {
  Inputs inputs;
  const auto corpus = open_corpus(cfg, inputs);
  const auto store = synthetic_embeddings(corpus, cfg.train.dim, cfg.train.seed);
  write_embedding_file(store, cfg.out);
  Json manifest = provenance(cfg, inputs);
  manifest["encoder_name"] = "synthetic";
  manifest["dim"] = store.dim();
  manifest["truncation_length"] = nullptr;
  manifest["seed"] = cfg.train.seed;
  manifest["sentence_count"] = store.size();
  manifest["sha256"] = sha256_file(cfg.out);
  write_file_bytes(cfg.out + ".json", manifest.dump(2) + "\n");
  out << "wrote " << store.size() << " sentences (d=" << store.dim() << ") to " << cfg.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::string option_value(const std::vector<std::string>& args, const std::string& name) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(name + "=", 0) == 0) return args[i].substr(name.size() + 1);
  }
  return {};
}

bool mentions(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Converts key=value lines into flag tokens placed ahead of the user's own
// flags, so anything given on the command line wins.
std::vector<std::string> config_tokens(const CLI::App& sub, const std::string& path,
                                       const std::vector<std::string>& user_args) {
  std::vector<CLI::ConfigItem> items;
  if (!std::ifstream(path)) throw IoError("cannot open config file " + path);
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  std::vector<std::string> tokens;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw ConfigError(path + ": sections are not supported ('" + item.fullname() + "')");
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    if (name == "config" || sub.get_option_no_throw(flag) == nullptr) {
      throw ConfigError(path + ": unknown key '" + item.name + "' for command " + sub.get_name());
    }
    if (mentions(user_args, flag)) continue;
    if (item.inputs.empty()) tokens.push_back(flag);
    for (const auto& value : item.inputs) tokens.push_back(flag + "=" + value);
  }
  return tokens;
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kArgument:
      return kExitUsage;
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kParse:
    case ErrorKind::kFormat:
      return kExitFormat;
    case ErrorKind::kShape:
    case ErrorKind::kDuplicate:
    case ErrorKind::kValidation:
      return kExitValidation;
    case ErrorKind::kLookup:
      return kExitLookup;
    case ErrorKind::kTraining:
      return kExitTraining;
    case ErrorKind::kDegenerate:
      return kExitDegenerate;
  }
  return kExitInternal;
}

TrainConfig profile_defaults(std::string_view name) {
  TrainConfig t;
  if (name == "paper") {
    t.m = 8192;
    t.layers = 6;
    t.steps = 15000;
    t.lr = 1e-5f;
    t.l1_weight = 1.0f;
  } else if (name == "desk") {
    t.m = 512;
    t.layers = 2;
    t.steps = 2000;
    t.lr = 1e-3f;
    t.l1_weight = 0.05f;
  } else {
    throw ConfigError("unknown profile '" + std::string(name) + "' (expected paper or desk)");
  }
  return t;
}

void RunConfig::validate() const {
  const bool uses_reps = command == "summarize" || command == "aspect" || command == "analyze" ||
                         command == "export-reps";
  if (uses_reps) {
    if (!reps.empty() && !checkpoint.empty()) throw ArgumentError("give either --reps or --checkpoint, not both");
    if (reps.empty() && checkpoint.empty()) throw ArgumentError("one of --reps or --checkpoint is required");
    if (!checkpoint.empty() && embeddings.empty()) throw ArgumentError("--checkpoint needs --embeddings");
  }
  if (command == "export-reps" && checkpoint.empty()) throw ArgumentError("export-reps needs --checkpoint");
  if (command == "aspect") {
    if (lexicons.empty()) throw ArgumentError("aspect needs at least one --lexicon");
    if (scorer != "geodesic") throw ArgumentError("aspect scoring supports only the geodesic scorer");
    if (!std::isfinite(gamma)) throw ArgumentError("--gamma must be finite");
  }
  if (k == 0) throw ArgumentError("--k must be at least 1");
  if (q == 0) throw ArgumentError("--q must be at least 1");
  if (command == "export-synthetic" && train.dim == 0) throw ArgumentError("--dim must be at least 1");
}

std::string RunConfig::to_json() const {
  Json j{{"command", command},
         {"profile", profile},
         {"config_file", config_file},
         {"train", train_known ? train_json(train) : Json(nullptr)},
         {"checkpoint_every", checkpoint_every},
         {"log_every", log_every},
         {"k", k},
         {"q", q},
         {"gamma", tidy(gamma)},
         {"scorer", scorer},
         {"reverse_edges", reverse_edges},
         {"lexicons", lexicons},
         {"aspects", aspects},
         {"fold_plurals", fold_plurals},
         {"entities", entities},
         {"aggregation", aggregation},
         {"rouge_fold_plurals", rouge_fold_plurals},
         {"remove_stopwords", remove_stopwords},
         {"clusters", clusters},
         {"geometry", geometry},
         {"sparsity_out", sparsity_out},
         {"clusters_out", clusters_out},
         {"compare_out", compare_out},
         {"corpus", corpus},
         {"embeddings", embeddings},
         {"checkpoint", checkpoint},
         {"reps", reps},
         {"summaries", summaries},
         {"gold", gold},
         {"out", out},
         {"out_dir", out_dir}};
  return j.dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Unsupervised extractive opinion summarization over sparse topical representations", "topisum"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  TrainConfig given;  // flag values; merged onto the profile after parsing
  std::map<std::string, CLI::Option*> train_opts;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", cfg.config_file, "key=value file; flags override it");
  };
  const auto add_entities = [&](CLI::App* sub) {
    sub->add_option("--entity", cfg.entities, "restrict to these entity ids (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };
  const auto add_rep_inputs = [&](CLI::App* sub) {
    sub->add_option("--corpus", cfg.corpus, "corpus JSONL")->required();
    sub->add_option("--embeddings", cfg.embeddings, "GSEM embedding file");
    sub->add_option("--checkpoint", cfg.checkpoint, "GSCK model checkpoint");
    sub->add_option("--reps", cfg.reps, "GSRP rep dump (skips the model)");
    add_entities(sub);
  };
  const auto add_selector = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "neighbours per node in the kNN graph")->capture_default_str();
    sub->add_option("--q", cfg.q, "sentences per summary")->capture_default_str();
    sub->add_flag("--reverse-edges", cfg.reverse_edges, "score by distance from each sentence to the mean");
  };

  auto* train_cmd = app.add_subcommand("train", "learn the dictionary layers from token embeddings");
  add_config(train_cmd);
  train_cmd->add_option("--embeddings", cfg.embeddings, "GSEM embedding file")->required();
  train_cmd->add_option("--corpus", cfg.corpus, "corpus JSONL whose sentence keys must match");
  train_cmd->add_option("--out-dir", cfg.out_dir, "checkpoint directory")->capture_default_str();
  train_cmd->add_option("--profile", cfg.profile, "paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}))
      ->capture_default_str();
  train_opts["m"] = train_cmd->add_option("--m", given.m, "dictionary elements per layer");
  train_opts["layers"] = train_cmd->add_option("--layers", given.layers, "number of dictionary layers");
  train_opts["dim"] = train_cmd->add_option("--dim", given.dim, "embedding width (default: from the file)");
  train_opts["hidden"] = train_cmd->add_option("--hidden", given.hidden, "kernel hidden width (default: dim)");
  train_opts["lr"] = train_cmd->add_option("--lr", given.lr, "Adam learning rate");
  train_opts["batch_size"] = train_cmd->add_option("--batch-size", given.batch_size, "word vectors per step");
  train_opts["steps"] = train_cmd->add_option("--steps", given.steps, "optimizer steps");
  train_opts["l1_weight"] = train_cmd->add_option("--l1-weight", given.l1_weight, "sparsity term weight");
  train_opts["seed"] = train_cmd->add_option("--seed", given.seed, "random seed")->required();
  train_cmd->add_option("--checkpoint-every", cfg.checkpoint_every, "steps between checkpoints")
      ->capture_default_str();
  train_cmd->add_option("--log-every", cfg.log_every, "steps between loss lines on stderr")->capture_default_str();

  auto* summarize_cmd = app.add_subcommand("summarize", "general summaries per entity");
  add_config(summarize_cmd);
  add_rep_inputs(summarize_cmd);
  add_selector(summarize_cmd);
  summarize_cmd->add_option("--scorer", cfg.scorer, "geodesic or euclidean")
      ->check(CLI::IsMember({"geodesic", "euclidean"}))
      ->capture_default_str();
  summarize_cmd->add_option("--out", cfg.out, "output JSON (default: stdout)");

  auto* aspect_cmd = app.add_subcommand("aspect", "aspect summaries per entity");
  add_config(aspect_cmd);
  add_rep_inputs(aspect_cmd);
  add_selector(aspect_cmd);
  aspect_cmd->add_option("--lexicon", cfg.lexicons, "aspect lexicon JSON (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  aspect_cmd->add_option("--aspect", cfg.aspects, "aspect names to run (default: all)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  aspect_cmd->add_option("--gamma", cfg.gamma, "weight of the general-importance penalty")->capture_default_str();
  aspect_cmd->add_flag("--fold-plurals,!--no-fold-plurals", cfg.fold_plurals,
                       "fold a trailing plural s when matching keywords");
  aspect_cmd->add_option("--out", cfg.out, "output JSON (default: stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "ROUGE-1/2/L F1 against gold summaries");
  add_config(evaluate_cmd);
  evaluate_cmd->add_option("--summaries", cfg.summaries, "output of summarize or aspect")->required();
  evaluate_cmd->add_option("--gold", cfg.gold, "gold JSONL")->required();
  evaluate_cmd->add_option("--aggregation", cfg.aggregation, "max or average over references")
      ->check(CLI::IsMember({"max", "average"}))
      ->capture_default_str();
  evaluate_cmd->add_flag("--fold-plurals", cfg.rouge_fold_plurals, "fold a trailing plural s before scoring");
  evaluate_cmd->add_flag("--remove-stopwords", cfg.remove_stopwords, "drop English stopwords before scoring");
  evaluate_cmd->add_option("--out", cfg.out, "output JSON (default: stdout)");

  auto* analyze_cmd = app.add_subcommand("analyze", "sparsity curve, Ward clusters, scorer comparison");
  add_config(analyze_cmd);
  add_rep_inputs(analyze_cmd);
  add_selector(analyze_cmd);
  analyze_cmd->add_option("--sparsity", cfg.sparsity_out, "write the sorted-entry curve CSV here");
  analyze_cmd->add_option("--clusters", cfg.clusters, "Ward clusters per entity");
  analyze_cmd->add_option("--geometry", cfg.geometry, "euclidean or cosine")
      ->check(CLI::IsMember({"euclidean", "cosine"}))
      ->capture_default_str();
  analyze_cmd->add_option("--out", cfg.out, "cluster report JSON (default: stdout)");
  analyze_cmd->add_option("--compare", cfg.compare_out, "write the geodesic/euclidean comparison JSON here");

  auto* export_cmd = app.add_subcommand("export-reps", "dump sentence representations to GSRP");
  add_config(export_cmd);
  add_rep_inputs(export_cmd);
  export_cmd->get_option("--embeddings")->required();
  export_cmd->add_option("--out", cfg.out, "GSRP output path")->required();

  auto* synth_cmd = app.add_subcommand("export-synthetic", "deterministic synthetic token embeddings");
  add_config(synth_cmd);
  synth_cmd->add_option("--corpus", cfg.corpus, "corpus JSONL")->required();
  synth_cmd->add_option("--dim", cfg.train.dim, "embedding width")->required();
  synth_cmd->add_option("--seed", cfg.train.seed, "random seed")->required();
  synth_cmd->add_option("--out", cfg.out, "GSEM output path")->required();

  try {
    std::vector<std::string> tokens = args;
    if (!tokens.empty()) {
      if (const auto* sub = app.get_subcommand_no_throw(tokens.front())) {
        const std::vector<std::string> user(tokens.begin() + 1, tokens.end());
        if (const auto path = option_value(user, "--config"); !path.empty()) {
          auto extra = config_tokens(*sub, path, user);
          tokens.insert(tokens.begin() + 1, extra.begin(), extra.end());
        }
      }
    }
    std::reverse(tokens.begin(), tokens.end());
    try {
      app.parse(tokens);
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    if (chosen == synth_cmd) cfg.train_known = true;
    if (chosen == train_cmd) {
      cfg.train = profile_defaults(cfg.profile);
      cfg.train_known = true;
      const auto take = [&](const char* key, auto& field, const auto& value) {
        if (train_opts.at(key)->count() > 0) field = value;
      };
      take("m", cfg.train.m, given.m);
      take("layers", cfg.train.layers, given.layers);
      take("dim", cfg.train.dim, given.dim);
      take("hidden", cfg.train.hidden, given.hidden);
      take("lr", cfg.train.lr, given.lr);
      take("batch_size", cfg.train.batch_size, given.batch_size);
      take("steps", cfg.train.steps, given.steps);
      take("l1_weight", cfg.train.l1_weight, given.l1_weight);
      take("seed", cfg.train.seed, given.seed);
      cfg.dim_given = train_opts.at("dim")->count() > 0;
      cfg.hidden_given = train_opts.at("hidden")->count() > 0;
    }
    cfg.validate();

    if (chosen == train_cmd) return cmd_train(cfg, out, err);
    if (chosen == summarize_cmd) return cmd_summarize(cfg, out);
    if (chosen == aspect_cmd) return cmd_aspect(cfg, out);
    if (chosen == evaluate_cmd) return cmd_evaluate(cfg, out);
    if (chosen == analyze_cmd) return cmd_analyze(cfg, out);
    if (chosen == export_cmd) return cmd_export_reps(cfg, out);
    return cmd_export_synthetic(cfg, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace topisum::cli
