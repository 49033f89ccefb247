// Copyright 2026 The accentmine Authors
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

// accentmine command-line pipeline: synth -> train -> eval -> cluster ->
// mine -> project. Exit codes: 0 ok, 2 validation/config, 3 I/O, 4 data.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "accentmine/accentmine.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  int code;
  std::string message;
};

void log_kv(const std::string& line) { std::cerr << line << '\n'; }

void check(am_status st) {
  if (st != AM_OK) throw CliError{static_cast<int>(st), am_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using CorpusPtr = std::unique_ptr<am_corpus, Deleter<am_corpus, am_corpus_free>>;
using ModelPtr = std::unique_ptr<am_model, Deleter<am_model, am_model_free>>;
using ClusteringPtr = std::unique_ptr<am_clustering, Deleter<am_clustering, am_clustering_free>>;
using CentroidsPtr = std::unique_ptr<am_centroids, Deleter<am_centroids, am_centroids_free>>;

std::string take_string(char* s) {
  std::string out(s ? s : "");
  am_string_free(s);
  return out;
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CliError{AM_ERR_IO, "cannot open config '" + path + "'"};
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError{AM_ERR_VALIDATION, "config '" + path + "': invalid JSON (" + e.what() + ")"};
  }
}

json block(const json& cfg, const char* key) {
  if (cfg.is_object() && cfg.contains(key)) return cfg[key];
  return cfg.is_object() ? cfg : json::object();
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw CliError{AM_ERR_IO, "cannot create output directory '" + dir + "'"};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw CliError{AM_ERR_IO, "cannot write '" + path.string() + "'"};
}

CorpusPtr load_corpus(const std::string& path) {
  am_corpus* c = nullptr;
  check(am_corpus_load(path.c_str(), &c));
  return CorpusPtr(c);
}

ModelPtr load_model(const std::string& path) {
  am_model* m = nullptr;
  check(am_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

// --- subcommands -----------------------------------------------------------

struct SynthArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
};

void run_synth(const SynthArgs& a) {
  json spec = block(read_config(a.config), "synth");
  if (a.seed) spec["seed"] = *a.seed;
  am_corpus* raw = nullptr;
  check(am_corpus_synthesize(spec.dump().c_str(), &raw));
  CorpusPtr corpus(raw);
  check(am_corpus_save(corpus.get(), a.out.c_str()));
  log_kv("event=synth out=" + a.out + " records=" + std::to_string(am_corpus_size(corpus.get())));
}

struct TrainArgs {
  std::string manifest, objective, config, out;
  std::optional<std::uint64_t> seed;
};

void run_train(const TrainArgs& a) {
  json cfg = block(read_config(a.config), "train");
  if (!a.objective.empty()) {
    cfg["objective"] = a.objective;
    // One config serves all objectives; the DRO block only applies to dro.
    if (a.objective != "dro") cfg.erase("dro");
  }
  if (a.seed) cfg["seed"] = *a.seed;
  auto corpus = load_corpus(a.manifest);
  make_dir(a.out);
  am_model* raw = nullptr;
  char* report = nullptr;
  check(am_train(corpus.get(), cfg.dump().c_str(), &raw, &report));
  ModelPtr model(raw);
  const std::string report_text = take_string(report);
  const fs::path params = fs::path(a.out) / "params.bin";
  check(am_model_save(model.get(), params.string().c_str()));
  write_text(fs::path(a.out) / "train_report.json", report_text);
  const json r = json::parse(report_text);
  std::ostringstream line;
  line << "event=train objective=" << r.value("objective", "") << " steps=" << r.value("steps", 0)
       << " worst_group=" << r["worst_group"].value("group", "") << " out=" << a.out;
  log_kv(line.str());
}

struct EvalArgs {
  std::string manifest, params, out = ".";
};

void run_eval(const EvalArgs& a) {
  auto model = load_model(a.params);
  auto corpus = load_corpus(a.manifest);
  make_dir(a.out);
  const auto json_path = (fs::path(a.out) / "report.json").string();
  const auto csv_path = (fs::path(a.out) / "confusion.csv").string();
  char* text = nullptr;
  check(am_evaluate(model.get(), corpus.get(), json_path.c_str(), csv_path.c_str(), &text));
  const json r = json::parse(take_string(text));
  std::ostringstream line;
  line << "event=eval mean=" << r["mean"].get<double>() << " stdev=" << r["stdev"].get<double>()
       << " out=" << a.out;
  log_kv(line.str());
}

struct ClusterArgs {
  std::string manifest, params, config, out;
  std::optional<std::size_t> k, batch_size, epochs;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
};

void run_cluster(const ClusterArgs& a) {
  json cfg = block(read_config(a.config), "cluster");
  if (a.k) cfg["k"] = *a.k;
  if (a.alpha) cfg["alpha"] = *a.alpha;
  if (a.batch_size) cfg["batch_size"] = *a.batch_size;
  if (a.epochs) cfg["epochs"] = *a.epochs;
  if (a.seed) cfg["seed"] = *a.seed;
  auto model = load_model(a.params);
  auto corpus = load_corpus(a.manifest);
  make_dir(a.out);
  am_clustering* raw = nullptr;
  check(am_cluster_run(model.get(), corpus.get(), cfg.dump().c_str(), &raw));
  ClusteringPtr clustering(raw);
  const auto centroids = (fs::path(a.out) / "centroids.emb").string();
  const auto assignments = (fs::path(a.out) / "assignments.jsonl").string();
  check(am_clustering_save(clustering.get(), centroids.c_str(), assignments.c_str()));
  char* summary = nullptr;
  check(am_clustering_summary(clustering.get(), &summary));
  const std::string text = take_string(summary);
  write_text(fs::path(a.out) / "cluster_summary.json", text);
  const json s = json::parse(text);
  std::ostringstream line;
  line << "event=cluster k=" << s["k"].get<std::size_t>();
  if (s.contains("purity")) line << " purity=" << s["purity"].get<double>();
  line << " out=" << a.out;
  log_kv(line.str());
}

struct MineArgs {
  std::string manifest, source, params, centroids, anchor_manifest, exclude_group, config, out;
  std::optional<std::size_t> target_size;
  std::size_t anchor_count = 0;
  std::optional<std::uint64_t> seed;
};

void run_mine(const MineArgs& a) {
  json plan = block(read_config(a.config), "mining");
  if (!a.source.empty()) plan["source"] = a.source;
  if (a.target_size) plan["target_size"] = *a.target_size;
  if (a.seed) plan["seed"] = *a.seed;
  if (!a.exclude_group.empty()) plan["exclude_group"] = a.exclude_group;
  std::size_t anchor_count = a.anchor_count;
  if (anchor_count == 0 && plan.contains("anchor_count")) anchor_count = plan["anchor_count"].get<std::size_t>();
  plan.erase("anchor_count");

  auto corpus = load_corpus(a.manifest);
  ModelPtr model;
  CentroidsPtr centroids;
  CorpusPtr anchor;
  if (!a.params.empty()) model = load_model(a.params);
  if (!a.centroids.empty()) {
    am_centroids* raw = nullptr;
    check(am_centroids_load(a.centroids.c_str(), &raw));
    centroids.reset(raw);
  }
  if (!a.anchor_manifest.empty()) anchor = load_corpus(a.anchor_manifest);
  if (anchor_count > 0 && !anchor)
    throw CliError{AM_ERR_VALIDATION, "--anchor-count needs --anchor-manifest"};
  make_dir(a.out);

  am_corpus* mined_raw = nullptr;
  char* summary = nullptr;
  check(am_mine(corpus.get(), plan.dump().c_str(), model.get(), centroids.get(), anchor.get(),
                anchor_count, &mined_raw, &summary));
  CorpusPtr mined(mined_raw);
  const std::string text = take_string(summary);
  check(am_corpus_save(mined.get(), (fs::path(a.out) / "mined.jsonl").string().c_str()));
  write_text(fs::path(a.out) / "mine_summary.json", text);
  const json s = json::parse(text);
  std::ostringstream line;
  line << "event=mine source=" << s["source"].get<std::string>() << " size=" << s["size"].get<std::size_t>()
       << " shortfall=" << (s["shortfall"].get<bool>() ? "true" : "false") << " out=" << a.out;
  log_kv(line.str());
}

struct MatchArgs {
  std::vector<std::string> manifests;
  std::uint64_t seed = 0;
  std::string out;
};

void run_match(const MatchArgs& a) {
  std::vector<CorpusPtr> inputs;
  std::vector<const am_corpus*> views;
  for (const auto& m : a.manifests) {
    inputs.push_back(load_corpus(m));
    views.push_back(inputs.back().get());
  }
  make_dir(a.out);
  std::vector<am_corpus*> outs(views.size(), nullptr);
  check(am_size_match(views.data(), views.size(), a.seed, outs.data()));
  std::vector<CorpusPtr> owned;
  for (auto* o : outs) owned.emplace_back(o);
  json summary;
  summary["seed"] = a.seed;
  summary["outputs"] = json::array();
  for (std::size_t i = 0; i < owned.size(); ++i) {
    const auto name = fs::path(a.manifests[i]).stem().string() + ".matched.jsonl";
    const auto path = (fs::path(a.out) / name).string();
    check(am_corpus_save(owned[i].get(), path.c_str()));
    summary["outputs"].push_back({{"input", a.manifests[i]},
                                  {"output", name},
                                  {"input_size", am_corpus_size(views[i])},
                                  {"size", am_corpus_size(owned[i].get())}});
  }
  write_text(fs::path(a.out) / "match_summary.json", summary.dump(2));
  log_kv("event=match manifests=" + std::to_string(owned.size()) + " size=" +
         std::to_string(owned.empty() ? 0 : am_corpus_size(owned[0].get())) + " out=" + a.out);
}

struct ProjectArgs {
  std::string manifest, params, out;
};

void run_project(const ProjectArgs& a) {
  auto model = load_model(a.params);
  auto corpus = load_corpus(a.manifest);
  make_dir(a.out);
  const auto csv = (fs::path(a.out) / "projection.csv").string();
  const auto emb = (fs::path(a.out) / "embeddings.emb").string();
  check(am_project(model.get(), corpus.get(), csv.c_str(), emb.c_str()));
  log_kv("event=project rows=" + std::to_string(am_corpus_size(corpus.get())) + " out=" + a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accentmine: group classifier training, embedding clustering and data mining"};
  app.require_subcommand(1);
  app.set_version_flag("--version", am_version());

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic imbalanced corpus manifest");
  synth_cmd->add_option("--config", synth.config, "JSON config (pipeline or synth block)")->required();
  synth_cmd->add_option("--out", synth.out, "Output manifest path")->required();
  synth_cmd->add_option("--seed", synth.seed, "Override the config seed");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the group classifier");
  train_cmd->add_option("--manifest", tr.manifest)->required();
  train_cmd->add_option("--objective", tr.objective, "erm|eq|dro (overrides config)")
      ->check(CLI::IsMember({"erm", "eq", "dro"}));
  train_cmd->add_option("--config", tr.config, "JSON config (pipeline or train block)");
  train_cmd->add_option("--out", tr.out, "Output directory")->required();
  train_cmd->add_option("--seed", tr.seed, "Override the config seed");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Per-group accuracy report");
  eval_cmd->add_option("--manifest", ev.manifest)->required();
  eval_cmd->add_option("--params", ev.params)->required();
  eval_cmd->add_option("--out", ev.out, "Output directory");

  ClusterArgs cl;
  auto* cluster_cmd = app.add_subcommand("cluster", "Online k-means over frozen embeddings");
  cluster_cmd->add_option("--manifest", cl.manifest)->required();
  cluster_cmd->add_option("--params", cl.params)->required();
  cluster_cmd->add_option("--config", cl.config, "JSON config (pipeline or cluster block)");
  cluster_cmd->add_option("--k", cl.k);
  cluster_cmd->add_option("--alpha", cl.alpha);
  cluster_cmd->add_option("--batch-size", cl.batch_size);
  cluster_cmd->add_option("--epochs", cl.epochs);
  cluster_cmd->add_option("--seed", cl.seed);
  cluster_cmd->add_option("--out", cl.out, "Output directory")->required();

  MineArgs mi;
  auto* mine_cmd = app.add_subcommand("mine", "Select utterances into a fine-tuning manifest");
  mine_cmd->add_option("--manifest", mi.manifest)->required();
  mine_cmd->add_option("--source", mi.source, "label:<group> | cluster:<index> | random");
  mine_cmd->add_option("--target-size", mi.target_size);
  mine_cmd->add_option("--params", mi.params, "Classifier/encoder params");
  mine_cmd->add_option("--centroids", mi.centroids, "Centroids from `cluster`");
  mine_cmd->add_option("--anchor-manifest", mi.anchor_manifest);
  mine_cmd->add_option("--anchor-count", mi.anchor_count);
  mine_cmd->add_option("--exclude-group", mi.exclude_group, "Group removed before random sampling");
  mine_cmd->add_option("--seed", mi.seed);
  mine_cmd->add_option("--config", mi.config, "JSON config (pipeline or mining block)");
  mine_cmd->add_option("--out", mi.out, "Output directory")->required();

  MatchArgs ma;
  auto* match_cmd = app.add_subcommand("match", "Downsample manifests to a common size");
  match_cmd->add_option("--manifest", ma.manifests)->required();
  match_cmd->add_option("--seed", ma.seed);
  match_cmd->add_option("--out", ma.out, "Output directory")->required();

  ProjectArgs pr;
  auto* project_cmd = app.add_subcommand("project", "2-D PCA projection of embeddings");
  project_cmd->add_option("--manifest", pr.manifest)->required();
  project_cmd->add_option("--params", pr.params)->required();
  project_cmd->add_option("--out", pr.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : AM_ERR_VALIDATION;
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*train_cmd) run_train(tr);
    if (*eval_cmd) run_eval(ev);
    if (*cluster_cmd) run_cluster(cl);
    if (*mine_cmd) run_mine(mi);
    if (*match_cmd) run_match(ma);
    if (*project_cmd) run_project(pr);
  } catch (const CliError& e) {
    log_kv("event=error code=" + std::to_string(e.code) + " message=\"" + e.message + "\"");
    return e.code;
  } catch (const json::exception& e) {
    log_kv(std::string("event=error code=2 message=\"") + e.what() + "\"");
    return AM_ERR_VALIDATION;
  }
  return 0;
}
