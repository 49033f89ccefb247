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

// Reference computations written independently of the library code paths
// they check: plain loops, brute force and finite differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major list of rows

// Cross-entropy of a relu MLP evaluated directly from the formulas.
// w1: H x D, w2: G x H.
inline double mlp_loss(const Mat& w1, const Vec& b1, const Mat& w2, const Vec& b2, const Vec& x,
                       std::size_t label) {
  Vec h(w1.size());
  for (std::size_t i = 0; i < w1.size(); ++i) {
    double z = b1[i];
    for (std::size_t d = 0; d < x.size(); ++d) z += w1[i][d] * x[d];
    h[i] = std::max(0.0, z);
  }
  Vec logits(w2.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < w2.size(); ++g) {
    double z = b2[g];
    for (std::size_t i = 0; i < h.size(); ++i) z += w2[g][i] * h[i];
    logits[g] = z;
    top = std::max(top, z);
  }
  double lse = 0.0;
  for (double z : logits) lse += std::exp(z - top);
  return -(logits[label] - top - std::log(lse));
}

// Index of the nearest row of `centroids`, scanning every candidate; ties to
// the lowest index.
inline std::pair<std::size_t, double> nearest(const Vec& p, const Mat& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) d += (p[j] - centroids[c][j]) * (p[j] - centroids[c][j]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return {best, best_d};
}

// Nearest-class-mean classifier accuracy over labelled points.
inline double nearest_class_mean_accuracy(const Mat& points, const std::vector<std::size_t>& labels,
                                          std::size_t classes) {
  Mat means(classes, Vec(points.front().size(), 0.0));
  std::vector<double> n(classes, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t d = 0; d < points[i].size(); ++d) means[labels[i]][d] += points[i][d];
    n[labels[i]] += 1.0;
  }
  for (std::size_t c = 0; c < classes; ++c)
    for (double& v : means[c]) v /= n[c];
  std::size_t correct = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (nearest(points[i], means).first == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(points.size());
}

inline double within_cluster_ss(const Mat& points, const std::vector<std::size_t>& labels,
                                const Mat& centroids) {
  double ss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t d = 0; d < points[i].size(); ++d) {
      const double diff = points[i][d] - centroids[labels[i]][d];
      ss += diff * diff;
    }
  return ss;
}

}  // namespace oracle
