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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>

#include "accentmine/corpus.hpp"
#include "accentmine/encoder.hpp"
#include "accentmine/rng.hpp"

namespace testing {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("accentmine_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline accentmine::UtteranceRecord embedding_record(std::string id, std::optional<std::string> group,
                                                    accentmine::Vector v) {
  return {std::move(id), std::move(group), std::move(v)};
}

// Two-group Gaussian corpus stored as single-frame records.
inline accentmine::LabeledCorpus gaussian_corpus(const std::vector<std::pair<std::string, std::size_t>>& groups,
                                                 const std::vector<accentmine::Vector>& means,
                                                 double stdev, std::uint64_t seed) {
  accentmine::GroupMixSpec spec;
  spec.dim = means.front().size();
  spec.frames_per_utt = 1;
  for (std::size_t g = 0; g < groups.size(); ++g)
    spec.groups.push_back({groups[g].first, groups[g].second, means[g], stdev});
  return accentmine::generate_synthetic_corpus(spec, seed);
}

inline accentmine::ClassifierParams random_params(std::size_t d, std::size_t h, std::size_t g,
                                                  accentmine::Rng& rng, double scale = 1.0) {
  auto p = accentmine::ClassifierParams::zeros(d, h, g);
  for (double& v : p.w1.data()) v = scale * rng.normal();
  for (double& v : p.b1) v = scale * rng.normal();
  for (double& v : p.w2.data()) v = scale * rng.normal();
  for (double& v : p.b2) v = scale * rng.normal();
  return p;
}

}  // namespace testing
