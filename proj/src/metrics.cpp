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

#include "accentmine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "accentmine/error.hpp"
#include "accentmine/rng.hpp"
#include "json.hpp"

namespace accentmine {
namespace {

constexpr std::size_t kMaxPowerIterations = 200000;
constexpr double kPowerTolerance = 1e-13;
constexpr std::uint64_t kPcaStartSeed = 0x5CA1AB1E;

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void orthogonalize(Vector& v, const Matrix& basis, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const double c = dot(v, basis.row(j));
    for (std::size_t d = 0; d < v.size(); ++d) v[d] -= c * basis(j, d);
  }
}

Vector multiply(const Matrix& m, std::span<const double> v) {
  Vector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = dot(m.row(r), v);
  return out;
}

void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < v.size(); ++d)
    if (std::abs(v[d]) > std::abs(v[best])) best = d;
  if (v[best] < 0.0)
    for (double& x : v) x = -x;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double population_stdev(std::span<const double> values) {
  require(!values.empty(), Errc::empty_input, "stdev of an empty set");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

GroupReport report_from_confusion(std::vector<std::string> groups,
                                  std::vector<std::vector<std::size_t>> confusion) {
  require(!groups.empty(), Errc::empty_input, "report needs at least one group");
  require(confusion.size() == groups.size(), Errc::shape, "confusion rows do not match groups");
  GroupReport r;
  r.groups = std::move(groups);
  r.confusion = std::move(confusion);
  std::vector<std::string> missing;
  std::size_t total = 0, correct = 0;
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    const auto& row = r.confusion[g];
    require(row.size() == r.groups.size(), Errc::shape, "confusion matrix is not square");
    std::size_t n = 0;
    for (auto c : row) n += c;
    if (n == 0) missing.push_back(r.groups[g]);
    r.counts.push_back(n);
    r.per_group_accuracy.push_back(n ? static_cast<double>(row[g]) / static_cast<double>(n) : 0.0);
    total += n;
    correct += row[g];
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(Errc::validation, "no test records for group(s): " + list);
  }
  double sum = 0.0;
  for (double a : r.per_group_accuracy) sum += a;
  r.mean = sum / static_cast<double>(r.groups.size());
  r.stdev = population_stdev(r.per_group_accuracy);
  r.weighted_mean = static_cast<double>(correct) / static_cast<double>(total);
  return r;
}

GroupReport evaluate(const EncoderModel& model, const LabeledCorpus& corpus) {
  const std::size_t groups = model.groups.size();
  std::vector<std::vector<std::size_t>> confusion(groups, std::vector<std::size_t>(groups, 0));
  for (const auto& r : corpus.records) {
    require(r.group.has_value(), Errc::validation,
            "record '" + r.utt_id + "' is unlabeled; evaluation needs labels");
    auto it = std::find(model.groups.begin(), model.groups.end(), *r.group);
    require(it != model.groups.end(), Errc::validation,
            "record '" + r.utt_id + "' has group '" + *r.group + "' unknown to the model");
    const auto fwd = forward(pooled_input(r, model.pool), model.params);
    ++confusion[static_cast<std::size_t>(it - model.groups.begin())][argmax(fwd.probs)];
  }
  return report_from_confusion(model.groups, std::move(confusion));
}

PcaResult pca(const Matrix& points, std::size_t out_dim) {
  const std::size_t n = points.rows(), dim = points.cols();
  require(n >= 2, Errc::validation, "pca: need at least 2 points");
  require(dim >= 2, Errc::validation, "pca: need dimension >= 2, got " + std::to_string(dim));
  require(out_dim >= 1 && out_dim <= dim, Errc::validation, "pca: output dim out of range");

  PcaResult result;
  result.mean.assign(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) result.mean[d] += points(i, d);
  for (double& m : result.mean) m /= static_cast<double>(n);

  Matrix cov(dim, dim);
  Vector centred(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) centred[d] = points(i, d) - result.mean[d];
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) cov(a, b) += centred[a] * centred[b];
  }
  double trace = 0.0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) cov(a, b) /= static_cast<double>(n);
  for (std::size_t a = 0; a < dim; ++a) trace += cov(a, a);
  require(trace > 0.0 && std::isfinite(trace), Errc::validation, "pca: data has zero variance");

  result.directions = Matrix(out_dim, dim);
  Rng rng(kPcaStartSeed);
  for (std::size_t j = 0; j < out_dim; ++j) {
    Vector v(dim);
    for (double& x : v) x = rng.normal();
    orthogonalize(v, result.directions, j);
    double nv = norm(v);
    for (double& x : v) x /= nv;
    double eigenvalue = 0.0;
    for (std::size_t it = 0; it < kMaxPowerIterations; ++it) {
      Vector w = multiply(cov, v);
      orthogonalize(w, result.directions, j);
      const double nw = norm(w);
      if (nw <= 1e-14 * trace) {
        // Remaining spectrum is zero; any orthogonal unit vector will do.
        eigenvalue = 0.0;
        break;
      }
      for (double& x : w) x /= nw;
      double diff = 0.0;
      for (std::size_t d = 0; d < dim; ++d) diff = std::max(diff, std::abs(w[d] - v[d]));
      v = std::move(w);
      eigenvalue = nw;
      if (diff < kPowerTolerance) break;
    }
    fix_sign(v);
    eigenvalue = dot(v, multiply(cov, v));
    std::copy(v.begin(), v.end(), result.directions.row(j).begin());
    result.variances.push_back(eigenvalue);
    // deflate
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) cov(a, b) -= eigenvalue * v[a] * v[b];
  }

  result.projected = Matrix(n, out_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) centred[d] = points(i, d) - result.mean[d];
    for (std::size_t j = 0; j < out_dim; ++j) result.projected(i, j) = dot(centred, result.directions.row(j));
  }
  return result;
}

Matrix pca_project(const Matrix& points, std::size_t out_dim) { return pca(points, out_dim).projected; }

void export_report(const GroupReport& report, const std::filesystem::path& json_path,
                   const std::filesystem::path& csv_path) {
  require(!report.groups.empty(), Errc::validation, "report has no groups");
  std::size_t total = 0;
  for (auto c : report.counts) total += c;
  require(total > 0, Errc::validation, "report has no test records");

  nlohmann::ordered_json j;
  j["groups"] = report.groups;
  nlohmann::ordered_json acc, counts;
  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    acc[report.groups[g]] = report.per_group_accuracy[g];
    counts[report.groups[g]] = report.counts[g];
  }
  j["per_group_accuracy"] = acc;
  j["counts"] = counts;
  j["mean"] = report.mean;
  j["stdev"] = report.stdev;
  j["stdev_kind"] = "population";
  j["weighted_mean"] = report.weighted_mean;
  j["confusion"] = report.confusion;
  {
    std::ofstream out(json_path, std::ios::trunc);
    require(out.good(), Errc::io, "cannot write report '" + json_path.string() + "'");
    out << j.dump(2) << '\n';
    require(out.good(), Errc::io, "write failed for '" + json_path.string() + "'");
  }
  std::ofstream csv(csv_path, std::ios::trunc);
  require(csv.good(), Errc::io, "cannot write '" + csv_path.string() + "'");
  csv << "truth\\predicted";
  for (const auto& g : report.groups) csv << ',' << csv_field(g);
  csv << '\n';
  for (std::size_t r = 0; r < report.groups.size(); ++r) {
    csv << csv_field(report.groups[r]);
    for (auto c : report.confusion[r]) csv << ',' << c;
    csv << '\n';
  }
  require(csv.good(), Errc::io, "write failed for '" + csv_path.string() + "'");
}

}  // namespace accentmine
