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
#include <string>
#include <variant>
#include <vector>

#include "accentmine/cluster.hpp"
#include "accentmine/corpus.hpp"
#include "accentmine/encoder.hpp"

namespace accentmine {

struct SupervisedLabel {
  std::string group;
};

struct ClusterIndex {
  std::size_t index = 0;
};

using MiningSource = std::variant<SupervisedLabel, ClusterIndex>;

struct AnchorSpec {
  const LabeledCorpus* corpus = nullptr;
  std::size_t count = 0;
};

struct MiningPlan {
  MiningSource source;
  std::size_t target_size = 1;
  std::optional<AnchorSpec> anchor;
  std::uint64_t seed = 0;
};

// Classifier used to label records for SupervisedLabel plans.
struct SupervisedArtifacts {
  const EncoderModel* model = nullptr;
};

// Encoder that produces embeddings plus the centroids they are assigned to.
struct ClusterArtifacts {
  const EncoderModel* encoder = nullptr;
  const CentroidSet* centroids = nullptr;
};

using MiningArtifacts = std::variant<SupervisedArtifacts, ClusterArtifacts>;

struct MiningResult {
  LabeledCorpus corpus;
  std::size_t matched = 0;  // records matching the source before truncation
  bool shortfall = false;   // matched < target_size
};

// Selects matching records. When more than target_size match, keeps the most
// confident ones (highest probability / smallest centroid distance, ties by
// corpus order). Output preserves corpus order.
MiningResult mine(const LabeledCorpus& corpus, const MiningPlan& plan,
                  const MiningArtifacts& artifacts);

// mine() followed by mix_with_anchor() when the plan carries an anchor.
MiningResult execute_plan(const LabeledCorpus& corpus, const MiningPlan& plan,
                          const MiningArtifacts& artifacts);

// Uniform sample without replacement of n records, skipping exclude_group.
LabeledCorpus random_sample(const LabeledCorpus& corpus, std::size_t n, std::uint64_t seed,
                            const std::optional<std::string>& exclude_group = std::nullopt);

LabeledCorpus mix_with_anchor(const LabeledCorpus& mined, const LabeledCorpus& anchor,
                              std::size_t anchor_count, std::uint64_t seed);

// Downsamples every manifest to the size of the smallest one.
std::vector<LabeledCorpus> size_match(const std::vector<LabeledCorpus>& manifests,
                                      std::uint64_t seed);

}  // namespace accentmine
