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

#include "accentmine/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "accentmine/error.hpp"

namespace accentmine {
namespace {

// Smallest weight a group can hold; keeps q strictly positive after long
// runs where one group dominates.
constexpr double kMinGroupWeight = 1e-300;

void check_group_vectors(const DroState& state, std::span<const double> losses,
                         std::span<const bool> mask) {
  require(losses.size() == state.q.size() && mask.size() == state.q.size(), Errc::shape,
          "group loss/mask length does not match number of groups");
}

std::vector<std::size_t> record_labels(const LabeledCorpus& corpus,
                                       const std::vector<std::string>& groups) {
  std::vector<std::size_t> labels;
  labels.reserve(corpus.size());
  for (const auto& r : corpus.records) {
    require(r.group.has_value(), Errc::validation,
            "record '" + r.utt_id + "' is unlabeled; supervised training needs labels");
    auto it = std::find(groups.begin(), groups.end(), *r.group);
    require(it != groups.end(), Errc::validation,
            "record '" + r.utt_id + "' has group '" + *r.group + "' unknown to the model");
    labels.push_back(static_cast<std::size_t>(it - groups.begin()));
  }
  return labels;
}

}  // namespace

const char* to_string(Objective objective) {
  switch (objective) {
    case Objective::erm: return "erm";
    case Objective::eq: return "eq";
    case Objective::dro: return "dro";
  }
  return "erm";
}

Objective parse_objective(const std::string& name) {
  if (name == "erm") return Objective::erm;
  if (name == "eq") return Objective::eq;
  if (name == "dro") return Objective::dro;
  fail(Errc::validation, "objective: unknown objective '" + name + "' (expected erm|eq|dro)");
}

void validate(const TrainConfig& c) {
  require(c.batch_size >= 1, Errc::validation, "batch_size: must be a positive integer");
  require(std::isfinite(c.lr) && c.lr > 0.0, Errc::validation, "lr: must be a positive real");
  require(c.hidden_dim >= 1, Errc::validation, "hidden_dim: must be a positive integer");
  require(c.dro.has_value() == (c.objective == Objective::dro), Errc::validation,
          c.objective == Objective::dro ? "dro: block required when objective is dro"
                                        : "dro: block only allowed when objective is dro");
  if (c.dro) {
    require(std::isfinite(c.dro->eta_q) && c.dro->eta_q > 0.0, Errc::validation,
            "dro.eta_q: must be a positive real");
    require(c.dro->loss_ema_beta >= 0.0 && c.dro->loss_ema_beta < 1.0, Errc::validation,
            "dro.loss_ema_beta: must lie in [0, 1)");
  }
}

DroState DroState::uniform(std::size_t groups, const DroConfig& config) {
  require(groups >= 1, Errc::validation, "DRO state needs at least one group");
  return {Vector(groups, 1.0 / static_cast<double>(groups)), config.eta_q, Vector(groups, 0.0),
          config.loss_ema_beta};
}

void validate(const DroState& s) {
  require(!s.q.empty() && s.ema_group_loss.size() == s.q.size(), Errc::shape,
          "DRO state vectors have inconsistent lengths");
  double total = 0.0;
  for (double v : s.q) {
    require(std::isfinite(v) && v > 0.0, Errc::validation, "DRO weights must be positive");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-9, Errc::validation, "DRO weights must sum to 1");
  require(std::isfinite(s.eta_q) && s.eta_q > 0.0, Errc::validation, "eta_q must be positive");
  require(s.loss_ema_beta >= 0.0 && s.loss_ema_beta < 1.0, Errc::validation,
          "loss_ema_beta must lie in [0, 1)");
}

std::vector<std::size_t> sample_batch(const LabeledCorpus& corpus, Objective objective,
                                      std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> batch;
  batch.reserve(batch_size);
  if (objective == Objective::erm) {
    require(!corpus.empty(), Errc::validation, "cannot sample from an empty corpus");
    for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(rng.uniform_index(corpus.size()));
    return batch;
  }
  const auto by_group = corpus.indices_by_group();
  require(!by_group.empty(), Errc::validation, "corpus has no groups");
  for (std::size_t g = 0; g < by_group.size(); ++g)
    require(!by_group[g].empty(), Errc::validation,
            "group '" + corpus.groups[g] + "' has no records; " + to_string(objective) +
                " sampling needs every group");
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto& members = by_group[rng.uniform_index(by_group.size())];
    batch.push_back(members[rng.uniform_index(members.size())]);
  }
  return batch;
}

DroState update_group_weights(const DroState& state, std::span<const double> batch_group_losses,
                              std::span<const bool> mask) {
  check_group_vectors(state, batch_group_losses, mask);
  for (std::size_t g = 0; g < mask.size(); ++g)
    if (mask[g])
      require(std::isfinite(batch_group_losses[g]) && batch_group_losses[g] >= 0.0,
              Errc::numeric, "group " + std::to_string(g) + " loss is not a finite non-negative value");
  DroState next = state;
  const double beta = state.loss_ema_beta;
  for (std::size_t g = 0; g < mask.size(); ++g)
    if (mask[g]) next.ema_group_loss[g] = beta * state.ema_group_loss[g] + (1.0 - beta) * batch_group_losses[g];

  // Multiplicative update in log space, shifted by the max exponent.
  const std::size_t groups = state.q.size();
  Vector logw(groups);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < groups; ++g) {
    logw[g] = std::log(state.q[g]) + state.eta_q * next.ema_group_loss[g];
    top = std::max(top, logw[g]);
  }
  double total = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    next.q[g] = std::exp(logw[g] - top);
    total += next.q[g];
  }
  for (double& v : next.q) v = std::max(v / total, kMinGroupWeight);
  return next;
}

double dro_batch_loss(const DroState& state, std::span<const double> per_group_mean_losses,
                      std::span<const bool> mask) {
  check_group_vectors(state, per_group_mean_losses, mask);
  double weighted = 0.0, mass = 0.0;
  for (std::size_t g = 0; g < mask.size(); ++g) {
    if (!mask[g]) continue;
    weighted += state.q[g] * per_group_mean_losses[g];
    mass += state.q[g];
  }
  require(mass > 0.0, Errc::empty_input, "dro_batch_loss: no group present in the batch");
  return weighted / mass;
}

TrainReport train(const LabeledCorpus& corpus, const TrainConfig& config) {
  validate(config);
  validate(corpus);
  require(!corpus.empty(), Errc::validation, "training corpus is empty");
  require(corpus.groups.size() >= 2, Errc::validation, "training needs at least 2 groups");
  const std::size_t groups = corpus.groups.size();
  const auto labels = record_labels(corpus, corpus.groups);

  std::vector<Vector> inputs;
  inputs.reserve(corpus.size());
  for (const auto& r : corpus.records) inputs.push_back(pooled_input(r, config.pool));
  const std::size_t dim = inputs.front().size();
  for (std::size_t i = 0; i < inputs.size(); ++i)
    require(inputs[i].size() == dim, Errc::shape,
            "record '" + corpus.records[i].utt_id + "' has feature dim " +
                std::to_string(inputs[i].size()) + ", expected " + std::to_string(dim));

  const Rng root(config.seed);
  Rng init_rng = root.fork(1);
  Rng batch_rng = root.fork(2);

  TrainReport report;
  report.model.groups = corpus.groups;
  report.model.pool = config.pool;
  report.model.params = init_params(dim, config.hidden_dim, groups, init_rng);
  auto& params = report.model.params;
  std::optional<DroState> dro;
  if (config.objective == Objective::dro) dro = DroState::uniform(groups, *config.dro);

  std::vector<ForwardResult> fwd(config.batch_size);
  Vector losses(config.batch_size);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto batch = sample_batch(corpus, config.objective, config.batch_size, batch_rng);

    Vector group_sum(groups, 0.0);
    std::vector<std::size_t> group_n(groups, 0);
    double batch_sum = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const std::size_t i = batch[b];
      fwd[b] = forward(inputs[i], params);
      losses[b] = cross_entropy(fwd[b].probs, labels[i]);
      require(std::isfinite(losses[b]), Errc::numeric,
              "non-finite loss at step " + std::to_string(step));
      group_sum[labels[i]] += losses[b];
      ++group_n[labels[i]];
      batch_sum += losses[b];
    }
    Vector group_mean(groups, 0.0);
    auto present = std::make_unique<bool[]>(groups);
    double worst = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      if (group_n[g] == 0) continue;
      present[g] = true;
      group_mean[g] = group_sum[g] / static_cast<double>(group_n[g]);
      worst = std::max(worst, group_mean[g]);
    }

    // Per-example weights of the objective being minimized.
    Vector group_weight(groups, 0.0);
    if (dro) {
      *dro = update_group_weights(*dro, group_mean, std::span<const bool>(present.get(), groups));
      double mass = 0.0;
      for (std::size_t g = 0; g < groups; ++g)
        if (present[g]) mass += dro->q[g];
      for (std::size_t g = 0; g < groups; ++g)
        if (present[g]) group_weight[g] = dro->q[g] / mass / static_cast<double>(group_n[g]);
    } else {
      for (std::size_t g = 0; g < groups; ++g)
        group_weight[g] = 1.0 / static_cast<double>(batch.size());
    }

    auto gradient = ClassifierParams::zeros(dim, config.hidden_dim, groups);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const std::size_t i = batch[b];
      accumulate_gradient(inputs[i], labels[i], params, fwd[b], group_weight[labels[i]], gradient);
    }
    params.add_scaled(gradient, -config.lr);
    report.trace.push_back({step + 1, batch_sum / static_cast<double>(batch.size()), worst});
  }
  if (dro) report.final_q = dro->q;
  return report;
}

std::pair<std::string, double> worst_group_loss(const EncoderModel& model,
                                                const LabeledCorpus& corpus) {
  require(!corpus.empty(), Errc::empty_input, "worst_group_loss: empty corpus");
  const auto labels = record_labels(corpus, model.groups);
  Vector sum(model.groups.size(), 0.0);
  std::vector<std::size_t> n(model.groups.size(), 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto fwd = forward(pooled_input(corpus.records[i], model.pool), model.params);
    sum[labels[i]] += cross_entropy(fwd.probs, labels[i]);
    ++n[labels[i]];
  }
  std::optional<std::size_t> best;
  double best_loss = 0.0;
  for (std::size_t g = 0; g < model.groups.size(); ++g) {
    if (n[g] == 0) continue;
    const double loss = sum[g] / static_cast<double>(n[g]);
    if (!best || loss > best_loss ||
        (loss == best_loss && model.groups[g] < model.groups[*best])) {
      best = g;
      best_loss = loss;
    }
  }
  return {model.groups[*best], best_loss};
}

}  // namespace accentmine
