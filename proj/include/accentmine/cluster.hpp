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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "accentmine/rng.hpp"
#include "accentmine/tensor.hpp"

namespace accentmine {

struct CentroidSet {
  Matrix centroids;  // k x D
  double alpha = 0.9;

  std::size_t k() const { return centroids.rows(); }
  std::size_t dim() const { return centroids.cols(); }
};

void validate(const CentroidSet& set);

struct Assignment {
  std::vector<std::size_t> labels;
  Vector distances;  // squared Euclidean distance to the assigned centroid
};

// K-means++ seeding over the rows of `points`.
CentroidSet kmeanspp_init(const Matrix& points, std::size_t k, Rng& rng, double alpha = 0.9);

// Nearest centroid by squared distance, ties toward the lowest index.
Assignment assign(const Matrix& points, const CentroidSet& set);

// c_i <- alpha*c_i + (1-alpha)*mean(points assigned to i). Clusters with no
// assigned points keep their centroid.
CentroidSet ema_update(const CentroidSet& set, const Matrix& points, const Assignment& assignment);

struct OnlineKMeansConfig {
  std::size_t k = 2;
  double alpha = 0.9;
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
};

void validate(const OnlineKMeansConfig& config);

// K-means++ init, then per epoch: shuffle, and for each mini-batch assign +
// ema_update. The returned assignment covers all points under the final
// centroids. Only centroids move; the points are never modified.
std::pair<CentroidSet, Assignment> run_online_kmeans(const Matrix& points,
                                                     const OnlineKMeansConfig& config, Rng& rng);

struct ClusterMatch {
  std::map<std::size_t, std::string> cluster_to_group;
  double purity = 0.0;
};

// Majority group per cluster (ties toward the smallest label) and the share
// of points whose cluster's majority equals their own label.
ClusterMatch match_clusters_to_groups(const Assignment& assignment,
                                      std::span<const std::string> labels);

std::size_t count_distinct_rows(const Matrix& points);

// Centroids in the embedding binary format plus a "<path>.json" sidecar.
void save_centroids(const CentroidSet& set, const std::filesystem::path& path);
CentroidSet load_centroids(const std::filesystem::path& path);

}  // namespace accentmine
