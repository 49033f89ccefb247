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

#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "accentmine/cluster.hpp"
#include "accentmine/corpus.hpp"
#include "accentmine/trainer.hpp"

namespace accentmine {

// JSON readers for the config blocks. Errors are Errc::validation and name
// the offending field, e.g. "train.batch_size: must be a positive integer".

struct SynthConfig {
  GroupMixSpec spec;
  std::uint64_t seed = 0;
};

SynthConfig parse_synth_config(const nlohmann::json& j, const std::string& where = "synth");
TrainConfig parse_train_config(const nlohmann::json& j, const std::string& where = "train");
OnlineKMeansConfig parse_cluster_config(const nlohmann::json& j,
                                        const std::string& where = "cluster");

nlohmann::json to_json(const TrainConfig& config);

// Returns j[key] when present, otherwise j itself, so a command accepts both
// the unified pipeline config and a bare block.
const nlohmann::json& config_block(const nlohmann::json& j, const std::string& key);

}  // namespace accentmine
