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

#include "accentmine/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "accentmine/error.hpp"
#include "json.hpp"

namespace accentmine {
namespace {

constexpr double kMinProb = 1e-30;

void check_shapes(const ClassifierParams& p) {
  require(p.b1.size() == p.w1.rows() && p.w2.cols() == p.w1.rows() && p.b2.size() == p.w2.rows(),
          Errc::shape, "classifier parameter shapes are inconsistent");
}

void fill_uniform(std::span<double> out, double bound, Rng& rng) {
  for (double& v : out) v = (2.0 * rng.uniform() - 1.0) * bound;
}

EmbeddingTable section(const Matrix& m, const std::string& name) {
  EmbeddingTable t;
  t.rows = m;
  for (std::size_t r = 0; r < m.rows(); ++r) t.ids.push_back(name + "/" + std::to_string(r));
  return t;
}

Matrix row_matrix(const Vector& v) {
  Matrix m(1, v.size());
  std::copy(v.begin(), v.end(), m.row(0).begin());
  return m;
}

}  // namespace

const char* to_string(PoolMethod method) {
  return method == PoolMethod::average ? "average" : "max";
}

PoolMethod parse_pool_method(const std::string& name) {
  if (name == "average" || name == "avg" || name == "mean") return PoolMethod::average;
  if (name == "max") return PoolMethod::max;
  fail(Errc::validation, "pool: unknown pooling method '" + name + "' (expected average|max)");
}

ClassifierParams ClassifierParams::zeros(std::size_t input_dim, std::size_t hidden_dim,
                                         std::size_t groups) {
  return {Matrix(hidden_dim, input_dim), Vector(hidden_dim, 0.0), Matrix(groups, hidden_dim),
          Vector(groups, 0.0)};
}

void ClassifierParams::add_scaled(const ClassifierParams& other, double scale) {
  auto axpy = [scale](std::span<double> dst, std::span<const double> src) {
    require(dst.size() == src.size(), Errc::shape, "parameter shape mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
  };
  require(w1.rows() == other.w1.rows() && w1.cols() == other.w1.cols() &&
              w2.rows() == other.w2.rows() && w2.cols() == other.w2.cols(),
          Errc::shape, "parameter shape mismatch");
  axpy(w1.data(), other.w1.data());
  axpy(b1, other.b1);
  axpy(w2.data(), other.w2.data());
  axpy(b2, other.b2);
}

void validate(const ClassifierParams& p) {
  check_shapes(p);
  require(p.input_dim() >= 1 && p.hidden_dim() >= 1 && p.num_groups() >= 2, Errc::validation,
          "classifier needs D >= 1, H >= 1, G >= 2");
  require(all_finite(p.w1.data()) && all_finite(p.b1) && all_finite(p.w2.data()) &&
              all_finite(p.b2),
          Errc::non_finite, "classifier parameters contain non-finite values");
}

ClassifierParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t groups,
                             Rng& rng) {
  require(input_dim >= 1 && hidden_dim >= 1 && groups >= 2, Errc::validation,
          "classifier needs D >= 1, H >= 1, G >= 2");
  auto p = ClassifierParams::zeros(input_dim, hidden_dim, groups);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  fill_uniform(p.w1.data(), bound1, rng);
  fill_uniform(p.b1, bound1, rng);
  fill_uniform(p.w2.data(), bound2, rng);
  fill_uniform(p.b2, bound2, rng);
  return p;
}

Vector pool_frames(const Matrix& frames, PoolMethod method) {
  require(frames.rows() >= 1 && frames.cols() >= 1, Errc::empty_input,
          "pool_frames: need at least one frame");
  const std::size_t dim = frames.cols();
  if (method == PoolMethod::average) {
    Vector out(dim, 0.0);
    for (std::size_t t = 0; t < frames.rows(); ++t)
      for (std::size_t d = 0; d < dim; ++d) out[d] += frames(t, d);
    for (double& v : out) v /= static_cast<double>(frames.rows());
    return out;
  }
  Vector out(frames.row(0).begin(), frames.row(0).end());
  for (std::size_t t = 1; t < frames.rows(); ++t)
    for (std::size_t d = 0; d < dim; ++d) out[d] = std::max(out[d], frames(t, d));
  return out;
}

Vector pooled_input(const UtteranceRecord& record, PoolMethod method) {
  return record.has_frames() ? pool_frames(record.frames(), method) : record.embedding();
}

Vector softmax(std::span<const double> logits) {
  require(!logits.empty(), Errc::empty_input, "softmax: empty logits");
  const double top = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

ForwardResult forward(std::span<const double> pooled, const ClassifierParams& params) {
  check_shapes(params);
  require(pooled.size() == params.input_dim(), Errc::shape,
          "forward: input has dim " + std::to_string(pooled.size()) + ", classifier expects " +
              std::to_string(params.input_dim()));
  ForwardResult r;
  const std::size_t hidden = params.hidden_dim();
  r.pre_activation.resize(hidden);
  r.hidden.resize(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    r.pre_activation[h] = dot(params.w1.row(h), pooled) + params.b1[h];
    r.hidden[h] = r.pre_activation[h] > 0.0 ? r.pre_activation[h] : 0.0;
  }
  Vector logits(params.num_groups());
  for (std::size_t g = 0; g < logits.size(); ++g)
    logits[g] = dot(params.w2.row(g), r.hidden) + params.b2[g];
  r.probs = softmax(logits);
  return r;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  require(label < probs.size(), Errc::index,
          "cross_entropy: label " + std::to_string(label) + " out of range for " +
              std::to_string(probs.size()) + " classes");
  return -std::log(std::max(probs[label], kMinProb));
}

void accumulate_gradient(std::span<const double> pooled, std::size_t label,
                         const ClassifierParams& params, const ForwardResult& fwd, double weight,
                         ClassifierParams& grad) {
  const std::size_t groups = params.num_groups();
  const std::size_t hidden = params.hidden_dim();
  require(label < groups, Errc::index, "gradient: label out of range");
  Vector dlogits(fwd.probs);
  dlogits[label] -= 1.0;
  Vector dhidden(hidden, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    const double dl = weight * dlogits[g];
    grad.b2[g] += dl;
    auto w2_row = params.w2.row(g);
    auto gw2_row = grad.w2.row(g);
    for (std::size_t h = 0; h < hidden; ++h) {
      gw2_row[h] += dl * fwd.hidden[h];
      dhidden[h] += dl * w2_row[h];
    }
  }
  for (std::size_t h = 0; h < hidden; ++h) {
    // relu subgradient is 0 at exactly 0
    if (fwd.pre_activation[h] <= 0.0) continue;
    grad.b1[h] += dhidden[h];
    auto gw1_row = grad.w1.row(h);
    for (std::size_t d = 0; d < pooled.size(); ++d) gw1_row[d] += dhidden[h] * pooled[d];
  }
}

ClassifierParams grad(const Matrix& frames, std::size_t label, const ClassifierParams& params,
                      PoolMethod method) {
  const Vector pooled = pool_frames(frames, method);
  const ForwardResult fwd = forward(pooled, params);
  auto g = ClassifierParams::zeros(params.input_dim(), params.hidden_dim(), params.num_groups());
  accumulate_gradient(pooled, label, params, fwd, 1.0, g);
  return g;
}

std::size_t argmax(std::span<const double> values) {
  require(!values.empty(), Errc::empty_input, "argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Vector embed(const EncoderModel& model, const UtteranceRecord& record) {
  return forward(pooled_input(record, model.pool), model.params).hidden;
}

Matrix embed_all(const EncoderModel& model, const LabeledCorpus& corpus) {
  Matrix out(0, model.params.hidden_dim());
  for (const auto& r : corpus.records) out.append_row(embed(model, r));
  return out;
}

void save_model(const EncoderModel& model, const std::filesystem::path& path) {
  validate(model.params);
  require(model.groups.size() == model.params.num_groups(), Errc::shape,
          "model group list does not match classifier output size");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::io, "cannot write params '" + path.string() + "'");
    write_embedding_section(out, section(model.params.w1, "w1"));
    write_embedding_section(out, section(row_matrix(model.params.b1), "b1"));
    write_embedding_section(out, section(model.params.w2, "w2"));
    write_embedding_section(out, section(row_matrix(model.params.b2), "b2"));
    out.flush();
    require(out.good(), Errc::io, "write failed for '" + path.string() + "'");
  }
  nlohmann::ordered_json meta;
  meta["format"] = "accentmine-params-v1";
  meta["pool"] = to_string(model.pool);
  meta["groups"] = model.groups;
  meta["sections"] = nlohmann::ordered_json::array();
  auto add = [&](const char* name, std::size_t rows, std::size_t cols) {
    meta["sections"].push_back({{"name", name}, {"rows", rows}, {"cols", cols}});
  };
  const auto& p = model.params;
  add("w1", p.hidden_dim(), p.input_dim());
  add("b1", 1, p.hidden_dim());
  add("w2", p.num_groups(), p.hidden_dim());
  add("b2", 1, p.num_groups());
  std::ofstream side(path.string() + ".json", std::ios::trunc);
  require(side.good(), Errc::io, "cannot write '" + path.string() + ".json'");
  side << meta.dump(2) << '\n';
  require(side.good(), Errc::io, "write failed for '" + path.string() + ".json'");
}

EncoderModel load_model(const std::filesystem::path& path) {
  const std::string side_path = path.string() + ".json";
  std::ifstream side(side_path);
  require(side.good(), Errc::io, "cannot open params sidecar '" + side_path + "'");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, side_path + ": invalid JSON (" + e.what() + ")");
  }
  EncoderModel model;
  try {
    model.pool = parse_pool_method(meta.at("pool").get<std::string>());
    model.groups = meta.at("groups").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, side_path + ": " + e.what());
  }

  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open params '" + path.string() + "'");
  std::vector<EmbeddingTable> sections;
  for (int i = 0; i < 4; ++i) sections.push_back(read_embedding_section(in, path.string()));
  require(sections[1].rows.rows() == 1 && sections[3].rows.rows() == 1, Errc::format,
          path.string() + ": bias sections must have one row");
  auto row_vec = [](const Matrix& m) { return Vector(m.row(0).begin(), m.row(0).end()); };
  model.params = {sections[0].rows, row_vec(sections[1].rows), sections[2].rows,
                  row_vec(sections[3].rows)};
  try {
    check_shapes(model.params);
  } catch (const Error&) {
    fail(Errc::format, path.string() + ": parameter sections have inconsistent shapes");
  }
  const auto& secs = meta.value("sections", nlohmann::json::array());
  for (std::size_t i = 0; i < secs.size() && i < sections.size(); ++i)
    require(secs[i].value("rows", 0u) == sections[i].rows.rows() &&
                secs[i].value("cols", 0u) == sections[i].rows.cols(),
            Errc::format, side_path + ": section shapes disagree with params file");
  require(model.groups.size() == model.params.num_groups(), Errc::format,
          side_path + ": group count does not match classifier output size");
  return model;
}

}  // namespace accentmine
