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

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "accentmine/accentmine.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("accentmine_capi_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const char* kSynth = R"({"synth": {"dim": 4, "seed": 3, "mean_spacing": 8.0, "groups": [
  {"label": "a", "count": 60, "stdev": 0.5},
  {"label": "b", "count": 40, "stdev": 0.5},
  {"label": "c", "count": 30, "stdev": 0.5}]}})";

const char* kTrain = R"({"objective": "dro", "batch_size": 16, "steps": 200, "lr": 0.1, "seed": 1,
  "hidden_dim": 6, "dro": {"eta_q": 0.01, "loss_ema_beta": 0.1}})";

json take_json(char* s) {
  REQUIRE(s != nullptr);
  auto j = json::parse(s);
  am_string_free(s);
  return j;
}

}  // namespace

TEST_CASE("version string") { CHECK(std::string(am_version()) == "0.1.0"); }

TEST_CASE("end-to-end through handles") {
  Scratch dir;
  am_corpus* corpus = nullptr;
  REQUIRE(am_corpus_synthesize(kSynth, &corpus) == AM_OK);
  CHECK(am_corpus_size(corpus) == 130);
  char* text = nullptr;
  REQUIRE(am_corpus_summary(corpus, &text) == AM_OK);
  const auto summary = take_json(text);
  CHECK(summary["records"] == 130);
  CHECK(summary["groups"]["b"] == 40);

  REQUIRE(am_corpus_save(corpus, (dir / "c.jsonl").c_str()) == AM_OK);
  am_corpus* reloaded = nullptr;
  REQUIRE(am_corpus_load((dir / "c.jsonl").c_str(), &reloaded) == AM_OK);
  CHECK(am_corpus_size(reloaded) == 130);

  am_model* model = nullptr;
  REQUIRE(am_train(reloaded, kTrain, &model, &text) == AM_OK);
  const auto report = take_json(text);
  CHECK(report["objective"] == "dro");
  CHECK(report["trace"].size() == 200);
  CHECK(report["final_q"].size() == 3);
  CHECK(report.contains("worst_group"));

  REQUIRE(am_model_save(model, (dir / "params.bin").c_str()) == AM_OK);
  am_model* loaded = nullptr;
  REQUIRE(am_model_load((dir / "params.bin").c_str(), &loaded) == AM_OK);

  REQUIRE(am_evaluate(loaded, reloaded, (dir / "r.json").c_str(), (dir / "c.csv").c_str(), &text) == AM_OK);
  const auto eval = take_json(text);
  CHECK(eval["mean"].get<double>() >= 0.95);
  CHECK(fs::exists(dir / "c.csv"));

  am_clustering* clustering = nullptr;
  REQUIRE(am_cluster_run(loaded, reloaded, R"({"k": 3, "alpha": 0.9, "batch_size": 32, "epochs": 5, "seed": 2})",
                         &clustering) == AM_OK);
  REQUIRE(am_clustering_summary(clustering, &text) == AM_OK);
  const auto cs = take_json(text);
  CHECK(cs["k"] == 3);
  CHECK(cs["points"] == 130);
  CHECK(cs.contains("purity"));
  REQUIRE(am_clustering_save(clustering, (dir / "cent.emb").c_str(), (dir / "assign.jsonl").c_str()) == AM_OK);
  am_centroids* centroids = nullptr;
  REQUIRE(am_centroids_load((dir / "cent.emb").c_str(), &centroids) == AM_OK);

  am_corpus* mined = nullptr;
  REQUIRE(am_mine(reloaded, R"({"source": "cluster:0", "target_size": 10, "seed": 4})", loaded, centroids,
                  nullptr, 0, &mined, &text) == AM_OK);
  const auto ms = take_json(text);
  CHECK(ms["size"] == am_corpus_size(mined));
  CHECK(am_corpus_size(mined) <= 10);

  am_corpus* by_label = nullptr;
  REQUIRE(am_mine(reloaded, R"({"source": "label:b", "target_size": 500, "seed": 4})", loaded, nullptr,
                  nullptr, 0, &by_label, &text) == AM_OK);
  CHECK(take_json(text)["shortfall"] == true);

  am_corpus* anchor = nullptr;
  REQUIRE(am_corpus_synthesize(R"({"dim": 4, "mean_spacing": 1.0, "groups": [{"label": "y", "count": 4, "stdev": 1.0}, {"label": "z", "count": 4, "stdev": 1.0}]})",
                               &anchor) == AM_OK);
  am_corpus* random = nullptr;
  CHECK(am_mine(reloaded, R"({"source": "random", "target_size": 20, "seed": 4})", nullptr, nullptr, reloaded, 130,
                &random, &text) == AM_ERR_VALIDATION);
  CHECK(std::string(am_last_error()).find("both") != std::string::npos);
  REQUIRE(am_mine(reloaded, R"({"source": "random", "target_size": 20, "seed": 4, "exclude_group": "a"})",
                  nullptr, nullptr, anchor, 5, &random, &text) == AM_OK);
  am_string_free(text);
  CHECK(am_corpus_size(random) == 25);

  const am_corpus* inputs[] = {reloaded, by_label, random};
  am_corpus* outs[3] = {};
  REQUIRE(am_size_match(inputs, 3, 9, outs) == AM_OK);
  for (auto* o : outs) CHECK(am_corpus_size(o) == am_corpus_size(random));

  REQUIRE(am_project(loaded, reloaded, (dir / "p.csv").c_str(), (dir / "e.emb").c_str()) == AM_OK);
  std::ifstream csv(dir / "p.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "utt_id,x,y,group");

  for (auto* o : outs) am_corpus_free(o);
  am_corpus_free(random);
  am_corpus_free(anchor);
  am_corpus_free(by_label);
  am_corpus_free(mined);
  am_centroids_free(centroids);
  am_clustering_free(clustering);
  am_model_free(loaded);
  am_model_free(model);
  am_corpus_free(reloaded);
  am_corpus_free(corpus);
}

TEST_CASE("status codes") {
  Scratch dir;
  am_corpus* corpus = nullptr;
  am_model* model = nullptr;
  SUBCASE("null arguments are validation errors") {
    CHECK(am_corpus_synthesize(nullptr, &corpus) == AM_ERR_VALIDATION);
    CHECK(am_corpus_synthesize(kSynth, nullptr) == AM_ERR_VALIDATION);
    CHECK(am_train(nullptr, kTrain, &model, nullptr) == AM_ERR_VALIDATION);
    CHECK(std::string(am_last_error()).find("corpus") != std::string::npos);
    CHECK(am_corpus_size(nullptr) == 0);
    am_corpus_free(nullptr);
    am_model_free(nullptr);
    am_string_free(nullptr);
  }
  SUBCASE("malformed JSON") {
    CHECK(am_corpus_synthesize("{not json", &corpus) == AM_ERR_VALIDATION);
    CHECK(corpus == nullptr);
  }
  SUBCASE("missing files are I/O errors") {
    CHECK(am_model_load((dir / "missing.bin").c_str(), &model) == AM_ERR_IO);
    CHECK(am_corpus_load((dir / "missing.jsonl").c_str(), &corpus) == AM_ERR_IO);
    CHECK(std::string(am_last_error()).find("missing.jsonl") != std::string::npos);
  }
  SUBCASE("bad data is a data error") {
    {
      std::ofstream out(dir / "bad.jsonl");
      out << "{\"utt_id\": \"x\", \"group\": \"a\", \"embedding\": [1, 2]}\n{oops\n";
    }
    CHECK(am_corpus_load((dir / "bad.jsonl").c_str(), &corpus) == AM_ERR_DATA);
  }
  SUBCASE("config errors") {
    REQUIRE(am_corpus_synthesize(kSynth, &corpus) == AM_OK);
    CHECK(am_train(corpus, R"({"objective": "dro"})", &model, nullptr) == AM_ERR_VALIDATION);
    CHECK(std::string(am_last_error()).find("dro") != std::string::npos);
    CHECK(model == nullptr);
    am_corpus_free(corpus);
  }
  SUBCASE("success clears the last error") {
    CHECK(am_corpus_synthesize("[]", &corpus) != AM_OK);
    CHECK(std::string(am_last_error()).size() > 0);
    REQUIRE(am_corpus_synthesize(kSynth, &corpus) == AM_OK);
    CHECK(std::string(am_last_error()).empty());
    am_corpus_free(corpus);
  }
}
