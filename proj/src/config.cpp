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

#include "accentmine/config.hpp"

#include <cmath>
#include <limits>

#include "accentmine/error.hpp"

namespace accentmine {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(Errc::validation, field + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "must be a JSON object");
}

std::uint64_t get_u64(const json& j, const std::string& key, const std::string& where,
                      std::optional<std::uint64_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    bad(where + "." + key, "missing");
  }
  const auto& v = j[key];
  if (!v.is_number_unsigned())
    bad(where + "." + key, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::size_t get_positive(const json& j, const std::string& key, const std::string& where,
                         std::optional<std::size_t> fallback = std::nullopt) {
  const auto v = get_u64(j, key, where, fallback);
  if (v == 0) bad(where + "." + key, "must be a positive integer");
  return static_cast<std::size_t>(v);
}

double get_real(const json& j, const std::string& key, const std::string& where,
                std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    bad(where + "." + key, "missing");
  }
  const auto& v = j[key];
  if (!v.is_number()) bad(where + "." + key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(where + "." + key, "must be finite");
  return x;
}

std::string get_string(const json& j, const std::string& key, const std::string& where,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    bad(where + "." + key, "missing");
  }
  if (!j[key].is_string()) bad(where + "." + key, "must be a string");
  return j[key].get<std::string>();
}

template <typename F>
auto with_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != Errc::validation) throw;
    const std::string msg = e.what();
    if (msg.rfind(field + ".", 0) == 0) throw;
    fail(Errc::validation, field + "." + msg);
  }
}

}  // namespace

const json& config_block(const json& j, const std::string& key) {
  if (j.is_object() && j.contains(key)) return j[key];
  return j;
}

SynthConfig parse_synth_config(const json& j, const std::string& where) {
  require_object(j, where);
  SynthConfig out;
  out.seed = get_u64(j, "seed", where, 0);
  auto& spec = out.spec;
  spec.dim = get_positive(j, "dim", where);
  spec.frames_per_utt = get_positive(j, "frames_per_utt", where, 1);
  if (!j.contains("groups") || !j["groups"].is_array()) bad(where + ".groups", "must be an array");
  const auto& groups = j["groups"];
  std::optional<std::vector<Vector>> layout;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string at = where + ".groups[" + std::to_string(g) + "]";
    const auto& item = groups[g];
    require_object(item, at);
    GroupMixSpec::Group grp;
    grp.label = get_string(item, "label", at);
    grp.count = get_positive(item, "count", at);
    grp.stdev = get_real(item, "stdev", at);
    if (grp.stdev <= 0.0) bad(at + ".stdev", "must be a positive real");
    if (item.contains("mean")) {
      if (!item["mean"].is_array()) bad(at + ".mean", "must be an array of numbers");
      for (const auto& x : item["mean"]) {
        if (!x.is_number()) bad(at + ".mean", "must be an array of numbers");
        grp.mean.push_back(x.get<double>());
      }
    } else {
      if (!j.contains("mean_spacing")) bad(at + ".mean", "missing (or set " + where + ".mean_spacing)");
      if (!layout) {
        const double spacing = get_real(j, "mean_spacing", where);
        if (groups.size() > spec.dim) bad(where + ".mean_spacing", "needs dim >= number of groups");
        layout = orthogonal_means(groups.size(), spec.dim, spacing);
      }
      grp.mean = (*layout)[g];
    }
    spec.groups.push_back(std::move(grp));
  }
  with_field(where, [&] {
    validate(spec);
    return 0;
  });
  return out;
}

TrainConfig parse_train_config(const json& j, const std::string& where) {
  require_object(j, where);
  TrainConfig c;
  c.objective = with_field(where, [&] { return parse_objective(get_string(j, "objective", where, "erm")); });
  c.batch_size = get_positive(j, "batch_size", where, c.batch_size);
  c.steps = static_cast<std::size_t>(get_u64(j, "steps", where, c.steps));
  c.lr = get_real(j, "lr", where, c.lr);
  if (c.lr <= 0.0) bad(where + ".lr", "must be a positive real");
  c.seed = get_u64(j, "seed", where, 0);
  c.pool = with_field(where, [&] { return parse_pool_method(get_string(j, "pool", where, "average")); });
  c.hidden_dim = get_positive(j, "hidden_dim", where, c.hidden_dim);
  if (j.contains("dro") && !j["dro"].is_null()) {
    const auto& d = j["dro"];
    require_object(d, where + ".dro");
    DroConfig dro;
    dro.eta_q = get_real(d, "eta_q", where + ".dro", dro.eta_q);
    dro.loss_ema_beta = get_real(d, "loss_ema_beta", where + ".dro", dro.loss_ema_beta);
    c.dro = dro;
  }
  with_field(where, [&] {
    validate(c);
    return 0;
  });
  return c;
}

OnlineKMeansConfig parse_cluster_config(const json& j, const std::string& where) {
  require_object(j, where);
  OnlineKMeansConfig c;
  c.k = get_positive(j, "k", where);
  c.alpha = get_real(j, "alpha", where, c.alpha);
  c.batch_size = get_positive(j, "batch_size", where, c.batch_size);
  c.epochs = static_cast<std::size_t>(get_u64(j, "epochs", where, c.epochs));
  with_field(where, [&] {
    validate(c);
    return 0;
  });
  return c;
}

json to_json(const TrainConfig& c) {
  json j;
  j["objective"] = to_string(c.objective);
  j["batch_size"] = c.batch_size;
  j["steps"] = c.steps;
  j["lr"] = c.lr;
  j["seed"] = c.seed;
  j["pool"] = to_string(c.pool);
  j["hidden_dim"] = c.hidden_dim;
  if (c.dro) j["dro"] = {{"eta_q", c.dro->eta_q}, {"loss_ema_beta", c.dro->loss_ema_beta}};
  return j;
}

}  // namespace accentmine
