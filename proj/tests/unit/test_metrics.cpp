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

#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "accentmine/error.hpp"
#include "accentmine/metrics.hpp"
#include "json.hpp"
#include "support/test_support.hpp"

using namespace accentmine;

namespace {

// Predicts class argmax(x) for a D-dim input with D == G.
EncoderModel argmax_model(std::vector<std::string> groups) {
  const std::size_t g = groups.size();
  auto p = ClassifierParams::zeros(g, g, g);
  for (std::size_t i = 0; i < g; ++i) {
    p.w1(i, i) = 1.0;
    p.w2(i, i) = 50.0;
  }
  return {p, std::move(groups), PoolMethod::average};
}

UtteranceRecord onehot(const std::string& id, const std::string& group, std::size_t hot, std::size_t g) {
  Vector v(g, 0.0);
  v[hot] = 1.0;
  return testing::embedding_record(id, group, v);
}

}  // namespace

TEST_CASE("evaluate") {
  const auto model = argmax_model({"a", "b"});
  SUBCASE("perfect classifier") {
    const auto c = make_corpus({onehot("1", "a", 0, 2), onehot("2", "b", 1, 2), onehot("3", "b", 1, 2)});
    const auto r = evaluate(model, c);
    CHECK(r.per_group_accuracy == Vector{1.0, 1.0});
    CHECK(r.mean == 1.0);
    CHECK(r.stdev == 0.0);
    CHECK(r.counts == std::vector<std::size_t>{1, 2});
    CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{1, 0}, {0, 2}});
  }
  SUBCASE("accuracies 0.8 and 0.6") {
    std::vector<UtteranceRecord> records;
    for (int i = 0; i < 10; ++i) records.push_back(onehot("a" + std::to_string(i), "a", i < 8 ? 0 : 1, 2));
    for (int i = 0; i < 10; ++i) records.push_back(onehot("b" + std::to_string(i), "b", i < 6 ? 1 : 0, 2));
    const auto r = evaluate(model, make_corpus(records));
    CHECK(r.per_group_accuracy[0] == doctest::Approx(0.8));
    CHECK(r.per_group_accuracy[1] == doctest::Approx(0.6));
    CHECK(r.mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.stdev == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.weighted_mean == doctest::Approx(0.7));
  }
  SUBCASE("constant predictor") {
    const auto c = make_corpus({onehot("1", "a", 0, 2), onehot("2", "b", 0, 2), onehot("3", "b", 0, 2)});
    const auto r = evaluate(model, c);
    CHECK(r.per_group_accuracy == Vector{1.0, 0.0});
    CHECK(r.mean == 0.5);
    CHECK(r.stdev == 0.5);
    CHECK(r.weighted_mean == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("missing group is named") {
    const auto m3 = argmax_model({"a", "b", "c"});
    try {
      evaluate(m3, make_corpus({onehot("1", "a", 0, 3)}));
      FAIL("expected error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("b") != std::string::npos);
      CHECK(msg.find("c") != std::string::npos);
    }
  }
  SUBCASE("unknown label or unlabeled record") {
    CHECK_THROWS_AS(evaluate(model, make_corpus({onehot("1", "a", 0, 2), onehot("2", "b", 1, 2),
                                                  onehot("3", "zz", 1, 2)})),
                    Error);
    auto c = make_corpus({onehot("1", "a", 0, 2), onehot("2", "b", 1, 2), onehot("3", "b", 1, 2)});
    c.records[2].group.reset();
    CHECK_THROWS_AS(evaluate(model, c), Error);
  }
}

TEST_CASE("report_from_confusion properties") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t g = 1 + rng.uniform_index(6);
    std::vector<std::vector<std::size_t>> conf(g, std::vector<std::size_t>(g));
    for (auto& row : conf)
      for (auto& v : row) v = rng.uniform_index(5);
    for (std::size_t i = 0; i < g; ++i) conf[i][i] += 1;
    std::vector<std::string> groups;
    for (std::size_t i = 0; i < g; ++i) groups.push_back("g" + std::to_string(i));
    const auto r = report_from_confusion(groups, conf);

    // duplicating every record leaves the unweighted mean unchanged
    auto doubled = conf;
    for (auto& row : doubled)
      for (auto& v : row) v *= 2;
    CHECK(report_from_confusion(groups, doubled).mean == doctest::Approx(r.mean).epsilon(1e-12));

    bool all_equal = true;
    for (double a : r.per_group_accuracy) all_equal = all_equal && a == r.per_group_accuracy[0];
    CHECK((r.stdev == 0.0) == all_equal);
    CHECK(r.stdev >= 0.0);
    CHECK(r.mean >= 0.0);
    CHECK(r.mean <= 1.0);
  }
  CHECK_THROWS_AS(report_from_confusion({"a", "b"}, {{1, 0}, {0, 0}}), Error);
  CHECK_THROWS_AS(report_from_confusion({"a", "b"}, {{1, 0}}), Error);
}

TEST_CASE("population_stdev") {
  const Vector v = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(population_stdev(v) == doctest::Approx(2.0));
  CHECK(population_stdev(Vector{3.0}) == 0.0);
  CHECK_THROWS_AS(population_stdev(Vector{}), Error);
}

TEST_CASE("pca") {
  SUBCASE("axis-aligned 2-D data") {
    const auto p = Matrix::from_rows({{-3.0, 0.0}, {3.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}});
    const auto r = pca(p, 2);
    CHECK(std::abs(r.directions(0, 0)) == doctest::Approx(1.0));
    CHECK(r.directions(0, 0) > 0.0);
    CHECK(std::abs(r.directions(1, 1)) == doctest::Approx(1.0));
    CHECK(r.variances[0] == doctest::Approx(4.5));
    CHECK(r.variances[1] == doctest::Approx(0.5));
    CHECK(r.projected(1, 0) == doctest::Approx(3.0));
  }
  SUBCASE("planted clusters separate along the first component") {
    const auto c = testing::gaussian_corpus({{"a", 50}, {"b", 50}}, {Vector(6, 0.0), Vector(6, 5.0)}, 0.3, 2);
    Matrix p(0, 6);
    for (const auto& r : c.records) p.append_row(r.frames().row(0));
    const auto proj = pca_project(p, 2);
    double min_a = 1e9, max_a = -1e9, min_b = 1e9, max_b = -1e9;
    for (std::size_t i = 0; i < p.rows(); ++i) {
      const double x = proj(i, 0);
      if (*c.records[i].group == "a") {
        min_a = std::min(min_a, x);
        max_a = std::max(max_a, x);
      } else {
        min_b = std::min(min_b, x);
        max_b = std::max(max_b, x);
      }
    }
    CHECK((max_a < min_b || max_b < min_a));
  }
  SUBCASE("duplicated points keep the same directions") {
    Rng rng(4);
    Matrix p(30, 3);
    for (double& v : p.data()) v = rng.normal();
    Matrix doubled = p;
    for (std::size_t r = 0; r < p.rows(); ++r) doubled.append_row(p.row(r));
    const auto a = pca(p, 2), b = pca(doubled, 2);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t d = 0; d < 3; ++d) CHECK(a.directions(k, d) == doctest::Approx(b.directions(k, d)).epsilon(1e-6));
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(pca(Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}}), 2), Error);
    CHECK_THROWS_AS(pca(Matrix::from_rows({{1.0}, {2.0}}), 1), Error);
    CHECK_THROWS_AS(pca(Matrix::from_rows({{1.0, 2.0}}), 1), Error);
  }
  SUBCASE("agrees with a dense eigensolver") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 40, dim = 3 + rng.uniform_index(5);
      Matrix p(n, dim);
      // anisotropic scales keep the leading eigenvalues well separated
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) p(i, d) = rng.normal() * (1.0 + 2.0 * static_cast<double>(dim - d));
      const auto r = pca(p, 2);

      Eigen::MatrixXd x(n, dim);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) x(i, d) = p(i, d);
      const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
      const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
      for (std::size_t k = 0; k < 2; ++k) {
        const Eigen::VectorXd v = es.eigenvectors().col(dim - 1 - k);
        const double lambda = es.eigenvalues()(dim - 1 - k);
        CHECK(r.variances[k] == doctest::Approx(lambda).epsilon(1e-6));
        double dotp = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dotp += v(d) * r.directions(k, d);
        const double sign = dotp < 0.0 ? -1.0 : 1.0;
        for (std::size_t d = 0; d < dim; ++d) CHECK(std::abs(r.directions(k, d) - sign * v(d)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("export_report") {
  testing::TempDir dir("report");
  const auto r = report_from_confusion({"a", "b,c"}, {{3, 1}, {0, 2}});
  export_report(r, dir / "report.json", dir / "confusion.csv");
  const auto j = nlohmann::json::parse(testing::read_file(dir / "report.json"));
  CHECK(j["per_group_accuracy"]["a"].get<double>() == doctest::Approx(0.75));
  CHECK(j["counts"]["b,c"].get<int>() == 2);
  CHECK(j["mean"].get<double>() == doctest::Approx(0.875));
  CHECK(j["stdev"].get<double>() == doctest::Approx(0.125));
  CHECK(testing::read_file(dir / "confusion.csv") == "truth\\predicted,a,\"b,c\"\na,3,1\n\"b,c\",0,2\n");
  CHECK_THROWS_AS(export_report(r, dir / "nope" / "r.json", dir / "c.csv"), Error);
}
