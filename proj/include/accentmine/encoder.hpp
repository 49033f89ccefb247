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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "accentmine/corpus.hpp"
#include "accentmine/rng.hpp"
#include "accentmine/tensor.hpp"

namespace accentmine {

enum class PoolMethod { average, max };

const char* to_string(PoolMethod method);
PoolMethod parse_pool_method(const std::string& name);

// Two-layer perceptron over a time-pooled input:
//   hidden = relu(w1 x + b1), probs = softmax(w2 hidden + b2).
// Gradients use the same type.
struct ClassifierParams {
  Matrix w1;  // H x D
  Vector b1;  // H
  Matrix w2;  // G x H
  Vector b2;  // G

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t hidden_dim() const { return w1.rows(); }
  std::size_t num_groups() const { return w2.rows(); }

  static ClassifierParams zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t groups);

  // this += scale * other
  void add_scaled(const ClassifierParams& other, double scale);

  friend bool operator==(const ClassifierParams&, const ClassifierParams&) = default;
};

void validate(const ClassifierParams& params);

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
ClassifierParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t groups,
                             Rng& rng);

Vector pool_frames(const Matrix& frames, PoolMethod method);

// Pooled input of a record: pooled frames, or the stored embedding.
Vector pooled_input(const UtteranceRecord& record, PoolMethod method);

Vector softmax(std::span<const double> logits);

struct ForwardResult {
  Vector probs;
  Vector hidden;
  Vector pre_activation;
};

ForwardResult forward(std::span<const double> pooled, const ClassifierParams& params);

double cross_entropy(std::span<const double> probs, std::size_t label);

// Adds weight * d(loss)/d(params) into `grad` for one pooled example whose
// forward pass is `fwd`.
void accumulate_gradient(std::span<const double> pooled, std::size_t label,
                         const ClassifierParams& params, const ForwardResult& fwd, double weight,
                         ClassifierParams& grad);

// Exact gradient of cross_entropy(forward(pool_frames(frames))) w.r.t. params.
ClassifierParams grad(const Matrix& frames, std::size_t label, const ClassifierParams& params,
                      PoolMethod method);

// Trained classifier with its label vocabulary and pooling method.
struct EncoderModel {
  ClassifierParams params;
  std::vector<std::string> groups;
  PoolMethod pool = PoolMethod::average;
};

// Pooled hidden vector used as the utterance embedding.
Vector embed(const EncoderModel& model, const UtteranceRecord& record);
Matrix embed_all(const EncoderModel& model, const LabeledCorpus& corpus);

// Argmax with ties toward the lowest index.
std::size_t argmax(std::span<const double> values);

// Binary params file: four consecutive embedding-format sections
// (w1, b1, w2, b2) plus a JSON sidecar "<path>.json" with shapes, groups
// and pooling method.
void save_model(const EncoderModel& model, const std::filesystem::path& path);
EncoderModel load_model(const std::filesystem::path& path);

}  // namespace accentmine
