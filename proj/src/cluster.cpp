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

#include "accentmine/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "accentmine/corpus.hpp"
#include "accentmine/error.hpp"
#include "json.hpp"

namespace accentmine {

void validate(const CentroidSet& set) {
  require(set.k() >= 1, Errc::validation, "centroid set needs k >= 1");
  require(set.alpha >= 0.0 && set.alpha <= 1.0, Errc::validation, "alpha: must lie in [0, 1]");
  require(all_finite(set.centroids.data()), Errc::non_finite, "centroids contain non-finite values");
}

void validate(const OnlineKMeansConfig& c) {
  require(c.k >= 1, Errc::validation, "k: must be a positive integer");
  require(c.alpha >= 0.0 && c.alpha <= 1.0, Errc::validation, "alpha: must lie in [0, 1]");
  require(c.batch_size >= 1, Errc::validation, "batch_size: must be a positive integer");
}

std::size_t count_distinct_rows(const Matrix& points) {
  std::vector<std::size_t> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = points.row(a), rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (i == 0 || less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

CentroidSet kmeanspp_init(const Matrix& points, std::size_t k, Rng& rng, double alpha) {
  require(points.rows() >= 1, Errc::empty_input, "kmeans++: no points");
  require(k >= 1, Errc::validation, "k: must be a positive integer");
  const std::size_t distinct = count_distinct_rows(points);
  require(k <= distinct, Errc::validation,
          "k: " + std::to_string(k) + " exceeds the number of distinct points (" +
              std::to_string(distinct) + ")");

  CentroidSet set;
  set.alpha = alpha;
  set.centroids = Matrix(0, points.cols());
  set.centroids.append_row(points.row(rng.uniform_index(points.rows())));

  const std::size_t n = points.rows();
  Vector nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points.row(i), set.centroids.row(0));
  while (set.k() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    require(total > 0.0, Errc::validation, "kmeans++: all remaining points coincide with centroids");
    // Inverse-CDF draw; zero-mass points never satisfy cum > target.
    const double target = rng.uniform() * total;
    double cum = 0.0;
    std::size_t pick = n;
    std::size_t last_positive = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      last_positive = i;
      cum += nearest[i];
      if (cum > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) pick = last_positive;
    set.centroids.append_row(points.row(pick));
    const auto c = set.centroids.row(set.k() - 1);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(points.row(i), c));
  }
  return set;
}

Assignment assign(const Matrix& points, const CentroidSet& set) {
  require(set.k() >= 1, Errc::validation, "assign: no centroids");
  require(points.rows() == 0 || points.cols() == set.dim(), Errc::shape,
          "assign: points have dim " + std::to_string(points.cols()) + ", centroids have dim " +
              std::to_string(set.dim()));
  Assignment a;
  a.labels.resize(points.rows());
  a.distances.resize(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    std::size_t best = 0;
    double best_d = squared_distance(points.row(i), set.centroids.row(0));
    for (std::size_t c = 1; c < set.k(); ++c) {
      const double d = squared_distance(points.row(i), set.centroids.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    a.labels[i] = best;
    a.distances[i] = best_d;
  }
  return a;
}

CentroidSet ema_update(const CentroidSet& set, const Matrix& points, const Assignment& assignment) {
  require(assignment.labels.size() == points.rows(), Errc::shape,
          "ema_update: assignment does not cover the points");
  require(points.rows() == 0 || points.cols() == set.dim(), Errc::shape,
          "ema_update: point/centroid dim mismatch");
  const std::size_t k = set.k(), dim = set.dim();
  Matrix sums(k, dim);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const std::size_t c = assignment.labels[i];
    require(c < k, Errc::index, "ema_update: label out of range");
    ++counts[c];
    auto src = points.row(i);
    auto dst = sums.row(c);
    for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
  }
  CentroidSet next = set;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double n = static_cast<double>(counts[c]);
    for (std::size_t d = 0; d < dim; ++d)
      next.centroids(c, d) = set.alpha * set.centroids(c, d) + (1.0 - set.alpha) * (sums(c, d) / n);
  }
  return next;
}

std::pair<CentroidSet, Assignment> run_online_kmeans(const Matrix& points,
                                                     const OnlineKMeansConfig& config, Rng& rng) {
  validate(config);
  CentroidSet set = kmeanspp_init(points, config.k, rng, config.alpha);
  std::vector<std::size_t> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Matrix batch(0, points.cols());
      for (std::size_t i = start; i < stop; ++i) batch.append_row(points.row(order[i]));
      set = ema_update(set, batch, assign(batch, set));
    }
  }
  Assignment final_assignment = assign(points, set);
  return {std::move(set), std::move(final_assignment)};
}

ClusterMatch match_clusters_to_groups(const Assignment& assignment,
                                      std::span<const std::string> labels) {
  require(assignment.labels.size() == labels.size(), Errc::shape,
          "match_clusters_to_groups: " + std::to_string(labels.size()) + " labels for " +
              std::to_string(assignment.labels.size()) + " points");
  std::map<std::size_t, std::map<std::string, std::size_t>> tally;
  for (std::size_t i = 0; i < labels.size(); ++i) ++tally[assignment.labels[i]][labels[i]];
  ClusterMatch match;
  std::size_t correct = 0;
  for (const auto& [cluster, counts] : tally) {
    // std::map iterates labels in ascending order, so strict > keeps the
    // smallest label among ties.
    const std::string* best = nullptr;
    std::size_t best_n = 0;
    for (const auto& [label, n] : counts)
      if (n > best_n) {
        best = &label;
        best_n = n;
      }
    match.cluster_to_group[cluster] = *best;
    correct += best_n;
  }
  match.purity = labels.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(labels.size());
  return match;
}

void save_centroids(const CentroidSet& set, const std::filesystem::path& path) {
  validate(set);
  EmbeddingTable table;
  table.rows = set.centroids;
  for (std::size_t c = 0; c < set.k(); ++c) table.ids.push_back("c" + std::to_string(c));
  save_embeddings(table, path);
  nlohmann::ordered_json meta;
  meta["format"] = "accentmine-centroids-v1";
  meta["k"] = set.k();
  meta["dim"] = set.dim();
  meta["alpha"] = set.alpha;
  std::ofstream side(path.string() + ".json", std::ios::trunc);
  require(side.good(), Errc::io, "cannot write '" + path.string() + ".json'");
  side << meta.dump(2) << '\n';
}

CentroidSet load_centroids(const std::filesystem::path& path) {
  CentroidSet set;
  set.centroids = load_embeddings(path).rows;
  std::ifstream side(path.string() + ".json");
  if (side.good()) {
    try {
      set.alpha = nlohmann::json::parse(side).value("alpha", set.alpha);
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::format, path.string() + ".json: " + e.what());
    }
  }
  validate(set);
  return set;
}

}  // namespace accentmine
