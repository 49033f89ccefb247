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

#include "accentmine/accentmine.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "accentmine/cluster.hpp"
#include "accentmine/config.hpp"
#include "accentmine/corpus.hpp"
#include "accentmine/encoder.hpp"
#include "accentmine/error.hpp"
#include "accentmine/metrics.hpp"
#include "accentmine/miner.hpp"
#include "accentmine/trainer.hpp"
#include "json.hpp"

using namespace accentmine;
using nlohmann::ordered_json;

struct am_corpus {
  LabeledCorpus corpus;
};

struct am_model {
  EncoderModel model;
};

struct am_clustering {
  CentroidSet centroids;
  Assignment assignment;
  std::vector<std::string> ids;
  ordered_json summary;
};

struct am_centroids {
  CentroidSet set;
};

namespace {

thread_local std::string g_last_error;

am_status status_for(Errc code) { return static_cast<am_status>(exit_code_for(code)); }

template <typename F>
am_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return AM_OK;
  } catch (const Error& e) {
    g_last_error = std::string(errc_name(e.code())) + ": " + e.what();
    return status_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("validation: ") + e.what();
    return AM_ERR_VALIDATION;
  } catch (const std::bad_alloc&) {
    g_last_error = "internal: out of memory";
    return AM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal: ") + e.what();
    return AM_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) fail(Errc::validation, std::string(name) + ": null argument");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_json(const char* text, const char* what) {
  need(text, what);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::validation, std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ordered_json composition(const LabeledCorpus& c) {
  ordered_json groups = ordered_json::object();
  std::size_t unlabeled = 0;
  for (const auto& g : c.groups) groups[g] = 0;
  for (const auto& r : c.records) {
    if (r.group)
      groups[*r.group] = groups[*r.group].get<std::size_t>() + 1;
    else
      ++unlabeled;
  }
  return {{"records", c.size()}, {"groups", groups}, {"unlabeled", unlabeled}};
}

MiningSource parse_source(const std::string& s) {
  if (s.rfind("label:", 0) == 0 && s.size() > 6) return SupervisedLabel{s.substr(6)};
  if (s.rfind("cluster:", 0) == 0 && s.size() > 8) {
    std::size_t idx = 0;
    const char* first = s.data() + 8;
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, idx);
    if (res.ec != std::errc() || res.ptr != last)
      fail(Errc::validation, "source: bad cluster index in '" + s + "'");
    return ClusterIndex{idx};
  }
  fail(Errc::validation, "source: expected label:<group>, cluster:<index> or random, got '" + s + "'");
}

}  // namespace

extern "C" {

const char* am_version(void) { return "0.1.0"; }

const char* am_last_error(void) { return g_last_error.c_str(); }

void am_string_free(char* str) { std::free(str); }

am_status am_corpus_synthesize(const char* synth_json, am_corpus** out) {
  return guarded([&] {
    need(out, "out");
    const auto j = parse_json(synth_json, "synth config");
    const auto cfg = parse_synth_config(config_block(j, "synth"));
    *out = new am_corpus{generate_synthetic_corpus(cfg.spec, cfg.seed)};
  });
}

am_status am_corpus_load(const char* manifest_path, am_corpus** out) {
  return guarded([&] {
    need(manifest_path, "manifest_path");
    need(out, "out");
    auto corpus = load_manifest(manifest_path);
    validate(corpus);
    *out = new am_corpus{std::move(corpus)};
  });
}

am_status am_corpus_save(const am_corpus* corpus, const char* manifest_path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(manifest_path, "manifest_path");
    save_manifest(corpus->corpus, manifest_path);
  });
}

size_t am_corpus_size(const am_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

am_status am_corpus_summary(const am_corpus* corpus, char** json_out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(json_out, "json_out");
    *json_out = dup_string(composition(corpus->corpus).dump());
  });
}

void am_corpus_free(am_corpus* corpus) { delete corpus; }

am_status am_train(const am_corpus* corpus, const char* train_json, am_model** model_out,
                   char** report_json_out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(model_out, "model_out");
    const auto j = parse_json(train_json, "train config");
    const auto cfg = parse_train_config(config_block(j, "train"));
    auto report = train(corpus->corpus, cfg);
    if (report_json_out) {
      ordered_json r;
      r["objective"] = to_string(cfg.objective);
      r["config"] = to_json(cfg);
      r["groups"] = report.model.groups;
      r["steps"] = report.trace.size();
      ordered_json trace = ordered_json::array();
      for (const auto& t : report.trace)
        trace.push_back({{"step", t.step}, {"mean_loss", t.mean_loss}, {"worst_group_loss", t.worst_group_loss}});
      r["trace"] = std::move(trace);
      if (report.final_q) r["final_q"] = *report.final_q;
      const auto [worst, loss] = worst_group_loss(report.model, corpus->corpus);
      r["worst_group"] = {{"group", worst}, {"loss", loss}};
      *report_json_out = dup_string(r.dump(2));
    }
    *model_out = new am_model{std::move(report.model)};
  });
}

am_status am_model_save(const am_model* model, const char* params_path) {
  return guarded([&] {
    need(model, "model");
    need(params_path, "params_path");
    save_model(model->model, params_path);
  });
}

am_status am_model_load(const char* params_path, am_model** out) {
  return guarded([&] {
    need(params_path, "params_path");
    need(out, "out");
    *out = new am_model{load_model(params_path)};
  });
}

void am_model_free(am_model* model) { delete model; }

am_status am_evaluate(const am_model* model, const am_corpus* corpus, const char* report_json_path,
                      const char* confusion_csv_path, char** report_json_out) {
  return guarded([&] {
    need(model, "model");
    need(corpus, "corpus");
    need(report_json_path, "report_json_path");
    need(confusion_csv_path, "confusion_csv_path");
    const auto report = evaluate(model->model, corpus->corpus);
    export_report(report, report_json_path, confusion_csv_path);
    if (report_json_out) {
      std::ifstream in(report_json_path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      *report_json_out = dup_string(text);
    }
  });
}

am_status am_cluster_run(const am_model* encoder, const am_corpus* corpus, const char* cluster_json,
                         am_clustering** out) {
  return guarded([&] {
    need(encoder, "encoder");
    need(corpus, "corpus");
    need(out, "out");
    const auto j = parse_json(cluster_json, "cluster config");
    const auto& block = config_block(j, "cluster");
    const auto cfg = parse_cluster_config(block);
    std::uint64_t seed = 0;
    if (block.contains("seed")) {
      if (!block["seed"].is_number_unsigned())
        fail(Errc::validation, "cluster.seed: must be a non-negative integer");
      seed = block["seed"].get<std::uint64_t>();
    }
    const auto& c = corpus->corpus;
    const Matrix points = embed_all(encoder->model, c);
    Rng rng(seed);
    auto [centroids, assignment] = run_online_kmeans(points, cfg, rng);

    auto result = std::make_unique<am_clustering>();
    for (const auto& r : c.records) result->ids.push_back(r.utt_id);
    ordered_json s;
    s["k"] = cfg.k;
    s["alpha"] = cfg.alpha;
    s["batch_size"] = cfg.batch_size;
    s["epochs"] = cfg.epochs;
    s["seed"] = seed;
    s["points"] = c.size();
    s["dim"] = points.cols();
    std::vector<std::size_t> sizes(cfg.k, 0);
    double inertia = 0.0;
    for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
      ++sizes[assignment.labels[i]];
      inertia += assignment.distances[i];
    }
    s["cluster_sizes"] = sizes;
    s["inertia"] = inertia;
    Assignment labeled;
    std::vector<std::string> truth;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c.records[i].group) continue;
      labeled.labels.push_back(assignment.labels[i]);
      labeled.distances.push_back(assignment.distances[i]);
      truth.push_back(*c.records[i].group);
    }
    s["labeled_points"] = truth.size();
    if (!truth.empty()) {
      const auto match = match_clusters_to_groups(labeled, truth);
      s["purity"] = match.purity;
      ordered_json map = ordered_json::object();
      for (const auto& [cluster, group] : match.cluster_to_group) map[std::to_string(cluster)] = group;
      s["cluster_to_group"] = map;
    }
    result->summary = std::move(s);
    result->centroids = std::move(centroids);
    result->assignment = std::move(assignment);
    *out = result.release();
  });
}

am_status am_clustering_save(const am_clustering* clustering, const char* centroids_path,
                             const char* assignments_path) {
  return guarded([&] {
    need(clustering, "clustering");
    need(centroids_path, "centroids_path");
    need(assignments_path, "assignments_path");
    save_centroids(clustering->centroids, centroids_path);
    std::ofstream out(assignments_path, std::ios::trunc);
    require(out.good(), Errc::io, std::string("cannot write '") + assignments_path + "'");
    for (std::size_t i = 0; i < clustering->ids.size(); ++i) {
      ordered_json line;
      line["utt_id"] = clustering->ids[i];
      line["cluster"] = clustering->assignment.labels[i];
      line["distance"] = clustering->assignment.distances[i];
      out << line.dump() << '\n';
    }
    require(out.good(), Errc::io, std::string("write failed for '") + assignments_path + "'");
  });
}

am_status am_clustering_summary(const am_clustering* clustering, char** json_out) {
  return guarded([&] {
    need(clustering, "clustering");
    need(json_out, "json_out");
    *json_out = dup_string(clustering->summary.dump(2));
  });
}

void am_clustering_free(am_clustering* clustering) { delete clustering; }

am_status am_centroids_load(const char* centroids_path, am_centroids** out) {
  return guarded([&] {
    need(centroids_path, "centroids_path");
    need(out, "out");
    *out = new am_centroids{load_centroids(centroids_path)};
  });
}

void am_centroids_free(am_centroids* centroids) { delete centroids; }

am_status am_mine(const am_corpus* corpus, const char* plan_json, const am_model* model,
                  const am_centroids* centroids, const am_corpus* anchor, size_t anchor_count,
                  am_corpus** mined_out, char** summary_json_out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(mined_out, "mined_out");
    const auto j = parse_json(plan_json, "mining plan");
    const auto& plan_j = config_block(j, "mining");
    if (!plan_j.contains("source") || !plan_j["source"].is_string())
      fail(Errc::validation, "mining.source: missing or not a string");
    const std::string source = plan_j["source"].get<std::string>();
    if (!plan_j.contains("target_size") || !plan_j["target_size"].is_number_unsigned() ||
        plan_j["target_size"].get<std::size_t>() == 0)
      fail(Errc::validation, "mining.target_size: must be a positive integer");
    const std::size_t target = plan_j["target_size"].get<std::size_t>();
    std::uint64_t seed = 0;
    if (plan_j.contains("seed")) {
      if (!plan_j["seed"].is_number_unsigned())
        fail(Errc::validation, "mining.seed: must be a non-negative integer");
      seed = plan_j["seed"].get<std::uint64_t>();
    }
    std::optional<std::string> exclude;
    if (plan_j.contains("exclude_group") && !plan_j["exclude_group"].is_null()) {
      if (!plan_j["exclude_group"].is_string())
        fail(Errc::validation, "mining.exclude_group: must be a string");
      exclude = plan_j["exclude_group"].get<std::string>();
    }
    if (anchor_count > 0) need(anchor, "anchor");

    const auto& c = corpus->corpus;
    MiningResult result;
    if (source == "random") {
      result.corpus = random_sample(c, target, seed, exclude);
      result.matched = result.corpus.size();
    } else {
      if (exclude) fail(Errc::validation, "mining.exclude_group: only valid with source random");
      MiningPlan plan;
      plan.source = parse_source(source);
      plan.target_size = target;
      plan.seed = seed;
      MiningArtifacts artifacts;
      if (std::holds_alternative<SupervisedLabel>(plan.source)) {
        need(model, "model (label mining needs --params)");
        artifacts = SupervisedArtifacts{&model->model};
      } else {
        need(model, "model (cluster mining needs --params)");
        need(centroids, "centroids (cluster mining needs --centroids)");
        artifacts = ClusterArtifacts{&model->model, &centroids->set};
      }
      result = mine(c, plan, artifacts);
    }
    const std::size_t mined_size = result.corpus.size();
    if (anchor_count > 0 || anchor != nullptr)
      result.corpus = mix_with_anchor(result.corpus, anchor ? anchor->corpus : LabeledCorpus{},
                                      anchor_count, seed);

    if (summary_json_out) {
      ordered_json s;
      s["source"] = source;
      if (exclude) s["exclude_group"] = *exclude;
      s["target_size"] = target;
      s["matched"] = result.matched;
      s["mined"] = mined_size;
      s["shortfall"] = result.shortfall;
      s["anchor_count"] = anchor_count;
      s["seed"] = seed;
      s["size"] = result.corpus.size();
      s["composition"] = composition(result.corpus);
      *summary_json_out = dup_string(s.dump(2));
    }
    *mined_out = new am_corpus{std::move(result.corpus)};
  });
}

am_status am_size_match(const am_corpus* const* inputs, size_t count, uint64_t seed, am_corpus** outs) {
  return guarded([&] {
    need(inputs, "inputs");
    need(outs, "outs");
    std::vector<LabeledCorpus> manifests;
    for (size_t i = 0; i < count; ++i) {
      need(inputs[i], "inputs[i]");
      manifests.push_back(inputs[i]->corpus);
    }
    auto matched = size_match(manifests, seed);
    for (size_t i = 0; i < count; ++i) outs[i] = new am_corpus{std::move(matched[i])};
  });
}

am_status am_project(const am_model* encoder, const am_corpus* corpus, const char* csv_path,
                     const char* embeddings_path) {
  return guarded([&] {
    need(encoder, "encoder");
    need(corpus, "corpus");
    need(csv_path, "csv_path");
    const auto& c = corpus->corpus;
    const Matrix embeddings = embed_all(encoder->model, c);
    const Matrix projected = pca_project(embeddings, 2);
    std::ofstream out(csv_path, std::ios::trunc);
    require(out.good(), Errc::io, std::string("cannot write '") + csv_path + "'");
    out << "utt_id,x,y,group\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto& r = c.records[i];
      out << csv_field(r.utt_id) << ',' << shortest(projected(i, 0)) << ',' << shortest(projected(i, 1)) << ','
          << (r.group ? csv_field(*r.group) : std::string()) << '\n';
    }
    require(out.good(), Errc::io, std::string("write failed for '") + csv_path + "'");
    if (embeddings_path) {
      EmbeddingTable table;
      table.rows = embeddings;
      for (const auto& r : c.records) table.ids.push_back(r.utt_id);
      save_embeddings(table, embeddings_path);
    }
  });
}

}  // extern "C"
