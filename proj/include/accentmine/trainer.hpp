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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "accentmine/corpus.hpp"
#include "accentmine/encoder.hpp"
#include "accentmine/rng.hpp"

namespace accentmine {

enum class Objective { erm, eq, dro };

const char* to_string(Objective objective);
Objective parse_objective(const std::string& name);

struct DroConfig {
  double eta_q = 0.01;
  double loss_ema_beta = 0.1;
};

struct TrainConfig {
  Objective objective = Objective::erm;
  std::size_t batch_size = 32;
  std::size_t steps = 1000;
  double lr = 0.05;
  std::uint64_t seed = 0;
  PoolMethod pool = PoolMethod::average;
  std::size_t hidden_dim = 16;
  std::optional<DroConfig> dro;  // present iff objective == dro
};

void validate(const TrainConfig& config);

// Online group-DRO state: a distribution q over groups plus running
// per-group losses.
struct DroState {
  Vector q;
  double eta_q = 0.01;
  Vector ema_group_loss;
  double loss_ema_beta = 0.1;

  static DroState uniform(std::size_t groups, const DroConfig& config);
};

void validate(const DroState& state);

// Record indices for one mini-batch. ERM draws records uniformly; EQ and DRO
// draw a group uniformly and then a record within it, independently per slot.
std::vector<std::size_t> sample_batch(const LabeledCorpus& corpus, Objective objective,
                                      std::size_t batch_size, Rng& rng);

// Refreshes the running loss of groups present in the batch
// (ema <- beta*ema + (1-beta)*loss), then applies q_g <- q_g*exp(eta*ema_g)
// to every group and renormalizes.
DroState update_group_weights(const DroState& state, std::span<const double> batch_group_losses,
                              std::span<const bool> mask);

// Sum of q_g*loss_g over present groups divided by the q mass of those groups.
double dro_batch_loss(const DroState& state, std::span<const double> per_group_mean_losses,
                      std::span<const bool> mask);

struct TraceEntry {
  std::size_t step = 0;
  double mean_loss = 0.0;
  double worst_group_loss = 0.0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TrainReport {
  EncoderModel model;
  std::vector<TraceEntry> trace;
  std::optional<Vector> final_q;

  friend bool operator==(const TrainReport& a, const TrainReport& b) {
    return a.model.params == b.model.params && a.model.groups == b.model.groups &&
           a.trace == b.trace && a.final_q == b.final_q;
  }
};

TrainReport train(const LabeledCorpus& corpus, const TrainConfig& config);

// Group with the largest mean cross-entropy over the whole corpus; ties go
// to the lexicographically smallest label.
std::pair<std::string, double> worst_group_loss(const EncoderModel& model,
                                                const LabeledCorpus& corpus);

}  // namespace accentmine
