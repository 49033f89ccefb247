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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "accentmine/corpus.hpp"
#include "accentmine/encoder.hpp"
#include "accentmine/tensor.hpp"

namespace accentmine {

struct GroupReport {
  std::vector<std::string> groups;
  Vector per_group_accuracy;
  std::vector<std::size_t> counts;
  double mean = 0.0;           // unweighted across groups
  double stdev = 0.0;          // population stdev (divisor G) across groups
  double weighted_mean = 0.0;  // overall accuracy, weighted by group size
  std::vector<std::vector<std::size_t>> confusion;  // rows truth, cols prediction
};

// Builds accuracies, mean and stdev from a confusion matrix. Every row must
// have at least one record.
GroupReport report_from_confusion(std::vector<std::string> groups,
                                  std::vector<std::vector<std::size_t>> confusion);

// Predicts argmax(probs) for every record. Each model group must occur in
// the corpus and every record label must be a model group.
GroupReport evaluate(const EncoderModel& model, const LabeledCorpus& corpus);

double population_stdev(std::span<const double> values);

struct PcaResult {
  Vector mean;
  Matrix directions;  // out_dim x D, unit rows
  Vector variances;   // eigenvalues of the covariance, descending
  Matrix projected;   // N x out_dim
};

// Mean-centred projection onto the leading principal directions, found by
// power iteration with deflation on the covariance matrix. Each direction's
// largest-magnitude coordinate is made positive.
PcaResult pca(const Matrix& points, std::size_t out_dim = 2);
Matrix pca_project(const Matrix& points, std::size_t out_dim = 2);

// Writes report JSON to `json_path` and confusion counts to `csv_path`.
void export_report(const GroupReport& report, const std::filesystem::path& json_path,
                   const std::filesystem::path& csv_path);

}  // namespace accentmine
