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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "accentmine/tensor.hpp"

namespace accentmine {

// One utterance. Features are either a T x D frame matrix or an already
// pooled D-dimensional embedding.
struct UtteranceRecord {
  std::string utt_id;
  std::optional<std::string> group;
  std::variant<Matrix, Vector> features;

  bool has_frames() const { return std::holds_alternative<Matrix>(features); }
  const Matrix& frames() const { return std::get<Matrix>(features); }
  const Vector& embedding() const { return std::get<Vector>(features); }
  std::size_t feature_dim() const;

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

struct LabeledCorpus {
  std::vector<UtteranceRecord> records;
  std::vector<std::string> groups;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Index of a label in `groups`, or nullopt.
  std::optional<std::size_t> group_index(const std::string& label) const;
  // Record indices per group, in `groups` order.
  std::vector<std::vector<std::size_t>> indices_by_group() const;

  friend bool operator==(const LabeledCorpus&, const LabeledCorpus&) = default;
};

// Throws on duplicate/empty utt_ids, unknown labels, duplicate groups,
// empty or non-finite features.
void validate(const LabeledCorpus& corpus);

// Builds a corpus from records; groups are listed in order of first appearance.
LabeledCorpus make_corpus(std::vector<UtteranceRecord> records);

struct GroupMixSpec {
  struct Group {
    std::string label;
    std::size_t count = 0;
    Vector mean;
    double stdev = 1.0;
  };
  std::vector<Group> groups;
  std::size_t dim = 0;
  std::size_t frames_per_utt = 1;
};

void validate(const GroupMixSpec& spec);

// Frames are i.i.d. N(mean, stdev^2) rows, rounded to float32 precision so
// that a manifest round trip reproduces them exactly.
LabeledCorpus generate_synthetic_corpus(const GroupMixSpec& spec, std::uint64_t seed);

// Means placed at spacing/sqrt(2) along the first G axes, so every pair of
// means is exactly `spacing` apart. Requires G <= dim.
std::vector<Vector> orthogonal_means(std::size_t groups, std::size_t dim, double spacing);

// Train-split utterance counts of the eight accent groups in the Common Voice
// English accent table: US, Indian, England, Canadian, Australian, Asian,
// Irish, Scottish.
std::vector<std::pair<std::string, std::size_t>> common_voice_accent_counts();

// Scales counts proportionally so the largest becomes `largest`; each result
// is rounded to nearest and at least 1.
std::vector<std::size_t> scale_counts(const std::vector<std::size_t>& counts, std::size_t largest);

// Manifest I/O. Frame matrices are stored in a sidecar "<manifest>.frames"
// in the embedding binary format and referenced by frames_ref/row/num_frames.
LabeledCorpus load_manifest(const std::filesystem::path& path);
void save_manifest(const LabeledCorpus& corpus, const std::filesystem::path& path);

struct EmbeddingTable {
  std::vector<std::string> ids;
  Matrix rows;  // count x dim
};

EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// Stream-level helpers for files holding several consecutive sections.
EmbeddingTable read_embedding_section(std::istream& in, const std::string& source);
void write_embedding_section(std::ostream& out, const EmbeddingTable& table);

}  // namespace accentmine
