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

#include "accentmine/config.hpp"
#include "accentmine/error.hpp"

using namespace accentmine;
using nlohmann::json;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation);
    return e.what();
  }
  FAIL("expected error");
  return {};
}

json synth_json() {
  return json::parse(R"({"dim": 3, "seed": 4, "mean_spacing": 2.0,
    "groups": [{"label": "a", "count": 5, "stdev": 1.0}, {"label": "b", "count": 2, "stdev": 0.5}]})");
}

json train_json() {
  return json::parse(R"({"objective": "dro", "batch_size": 8, "steps": 10, "lr": 0.1, "seed": 2,
    "pool": "max", "hidden_dim": 4, "dro": {"eta_q": 0.02, "loss_ema_beta": 0.3}})");
}

}  // namespace

TEST_CASE("synth config") {
  SUBCASE("mean_spacing lays out orthogonal means") {
    const auto c = parse_synth_config(synth_json());
    CHECK(c.seed == 4);
    CHECK(c.spec.frames_per_utt == 1);
    REQUIRE(c.spec.groups.size() == 2);
    CHECK(c.spec.groups[0].mean == orthogonal_means(2, 3, 2.0)[0]);
    CHECK(c.spec.groups[1].mean == orthogonal_means(2, 3, 2.0)[1]);
  }
  SUBCASE("explicit means win") {
    auto j = synth_json();
    j.erase("mean_spacing");
    j["groups"][0]["mean"] = {1, 2, 3};
    j["groups"][1]["mean"] = {0, 0, 0};
    CHECK(parse_synth_config(j).spec.groups[0].mean == Vector{1, 2, 3});
  }
  SUBCASE("errors name the field") {
    auto j = synth_json();
    j["dim"] = 0;
    CHECK(error_of([&] { parse_synth_config(j); }).find("synth.dim") != std::string::npos);
    j = synth_json();
    j["groups"][1]["stdev"] = -1;
    CHECK(error_of([&] { parse_synth_config(j); }).find("synth.groups[1].stdev") != std::string::npos);
    j = synth_json();
    j.erase("mean_spacing");
    CHECK(error_of([&] { parse_synth_config(j); }).find("synth.groups[0].mean") != std::string::npos);
    j = synth_json();
    j["groups"][0]["count"] = "five";
    CHECK(error_of([&] { parse_synth_config(j); }).find("synth.groups[0].count") != std::string::npos);
    CHECK_THROWS_AS(parse_synth_config(json::array()), Error);
  }
}

TEST_CASE("train config") {
  SUBCASE("all fields") {
    const auto c = parse_train_config(train_json());
    CHECK(c.objective == Objective::dro);
    CHECK(c.batch_size == 8);
    CHECK(c.steps == 10);
    CHECK(c.lr == 0.1);
    CHECK(c.pool == PoolMethod::max);
    CHECK(c.hidden_dim == 4);
    REQUIRE(c.dro);
    CHECK(c.dro->eta_q == 0.02);
    CHECK(c.dro->loss_ema_beta == 0.3);
  }
  SUBCASE("round trip through to_json") {
    const auto c = parse_train_config(train_json());
    const auto back = parse_train_config(to_json(c));
    CHECK(to_json(back) == to_json(c));
  }
  SUBCASE("dro block must match the objective") {
    auto j = train_json();
    j.erase("dro");
    CHECK(error_of([&] { parse_train_config(j); }).find("dro") != std::string::npos);
    j = train_json();
    j["objective"] = "erm";
    CHECK_THROWS_AS(parse_train_config(j), Error);
  }
  SUBCASE("errors name the field once") {
    auto j = train_json();
    j["batch_size"] = 0;
    const auto msg = error_of([&] { parse_train_config(j); });
    CHECK(msg.find("train.batch_size") != std::string::npos);
    CHECK(msg.find("train.train") == std::string::npos);
    j = train_json();
    j["objective"] = "sgd";
    CHECK(error_of([&] { parse_train_config(j); }).find("objective") != std::string::npos);
    j = train_json();
    j["dro"]["eta_q"] = -1.0;
    CHECK(error_of([&] { parse_train_config(j); }).find("eta_q") != std::string::npos);
  }
}

TEST_CASE("cluster config and block lookup") {
  const auto j = json::parse(R"({"cluster": {"k": 4, "alpha": 0.5, "batch_size": 16, "epochs": 2}})");
  const auto c = parse_cluster_config(config_block(j, "cluster"));
  CHECK(c.k == 4);
  CHECK(c.alpha == 0.5);
  CHECK(c.batch_size == 16);
  CHECK(c.epochs == 2);
  CHECK(&config_block(j["cluster"], "cluster") == &j["cluster"]);
  auto bad = j["cluster"];
  bad["alpha"] = 2.0;
  CHECK(error_of([&] { parse_cluster_config(bad); }).find("cluster.alpha") != std::string::npos);
}
