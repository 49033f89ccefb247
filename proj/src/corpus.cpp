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

#include "accentmine/corpus.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "accentmine/error.hpp"
#include "accentmine/rng.hpp"
#include "json.hpp"

namespace accentmine {
namespace {

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF),
                                 static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

std::string frames_sidecar_name(const std::filesystem::path& manifest) {
  return manifest.filename().string() + ".frames";
}

std::string pad_index(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

}  // namespace

std::size_t UtteranceRecord::feature_dim() const {
  return has_frames() ? frames().cols() : embedding().size();
}

std::optional<std::size_t> LabeledCorpus::group_index(const std::string& label) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g] == label) return g;
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> LabeledCorpus::indices_by_group() const {
  std::vector<std::vector<std::size_t>> out(groups.size());
  std::map<std::string, std::size_t> index;
  for (std::size_t g = 0; g < groups.size(); ++g) index[groups[g]] = g;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& label = records[i].group;
    if (!label) continue;
    auto it = index.find(*label);
    require(it != index.end(), Errc::validation, "record '" + records[i].utt_id +
                                                     "' has unknown group '" + *label + "'");
    out[it->second].push_back(i);
  }
  return out;
}

void validate(const LabeledCorpus& corpus) {
  std::set<std::string> groups;
  for (const auto& g : corpus.groups)
    require(groups.insert(g).second, Errc::validation, "duplicate group label '" + g + "'");
  std::unordered_set<std::string> ids;
  for (const auto& r : corpus.records) {
    require(!r.utt_id.empty(), Errc::validation, "empty utt_id");
    require(ids.insert(r.utt_id).second, Errc::duplicate, "duplicate utt_id '" + r.utt_id + "'");
    if (r.group)
      require(groups.count(*r.group) > 0, Errc::validation,
              "record '" + r.utt_id + "' has group '" + *r.group + "' not in the group list");
    if (r.has_frames()) {
      const auto& f = r.frames();
      require(f.rows() >= 1 && f.cols() >= 1, Errc::validation,
              "record '" + r.utt_id + "' has an empty frame matrix");
      require(all_finite(f.data()), Errc::non_finite,
              "record '" + r.utt_id + "' has non-finite frames");
    } else {
      require(!r.embedding().empty(), Errc::validation,
              "record '" + r.utt_id + "' has an empty embedding");
      require(all_finite(r.embedding()), Errc::non_finite,
              "record '" + r.utt_id + "' has a non-finite embedding");
    }
  }
}

LabeledCorpus make_corpus(std::vector<UtteranceRecord> records) {
  LabeledCorpus c;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (r.group && seen.insert(*r.group).second) c.groups.push_back(*r.group);
  c.records = std::move(records);
  return c;
}

void validate(const GroupMixSpec& spec) {
  require(spec.groups.size() >= 2, Errc::validation, "groups: at least 2 groups are required");
  require(spec.dim >= 1, Errc::validation, "dim: must be a positive integer");
  require(spec.frames_per_utt >= 1, Errc::validation,
          "frames_per_utt: must be a positive integer");
  std::set<std::string> labels;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& grp = spec.groups[g];
    const std::string where = "groups[" + std::to_string(g) + "]";
    require(!grp.label.empty(), Errc::validation, where + ".label: must be non-empty");
    require(labels.insert(grp.label).second, Errc::validation,
            where + ".label: duplicate label '" + grp.label + "'");
    require(grp.count >= 1, Errc::validation, where + ".count: must be a positive integer");
    require(grp.mean.size() == spec.dim, Errc::validation,
            where + ".mean: length " + std::to_string(grp.mean.size()) +
                " does not match dim " + std::to_string(spec.dim));
    require(all_finite(grp.mean), Errc::validation, where + ".mean: entries must be finite");
    require(std::isfinite(grp.stdev) && grp.stdev > 0.0, Errc::validation,
            where + ".stdev: must be a positive real");
  }
}

LabeledCorpus generate_synthetic_corpus(const GroupMixSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  LabeledCorpus corpus;
  for (const auto& grp : spec.groups) {
    corpus.groups.push_back(grp.label);
    for (std::size_t i = 0; i < grp.count; ++i) {
      Matrix frames(spec.frames_per_utt, spec.dim);
      for (std::size_t t = 0; t < spec.frames_per_utt; ++t)
        for (std::size_t d = 0; d < spec.dim; ++d) {
          const double v = grp.mean[d] + grp.stdev * rng.normal();
          frames(t, d) = static_cast<double>(static_cast<float>(v));
        }
      corpus.records.push_back({grp.label + "-" + pad_index(i), grp.label, std::move(frames)});
    }
  }
  return corpus;
}

std::vector<Vector> orthogonal_means(std::size_t groups, std::size_t dim, double spacing) {
  require(groups <= dim, Errc::validation, "mean layout needs dim >= number of groups");
  std::vector<Vector> means(groups, Vector(dim, 0.0));
  const double offset = spacing / std::sqrt(2.0);
  for (std::size_t g = 0; g < groups; ++g) means[g][g] = offset;
  return means;
}

std::vector<std::pair<std::string, std::size_t>> common_voice_accent_counts() {
  return {{"US", 220000},      {"Indian", 73000}, {"England", 75000}, {"Canadian", 39000},
          {"Australian", 31000}, {"Asian", 9820},   {"Irish", 5867},    {"Scottish", 9864}};
}

std::vector<std::size_t> scale_counts(const std::vector<std::size_t>& counts, std::size_t largest) {
  require(!counts.empty(), Errc::validation, "counts: must be non-empty");
  std::size_t top = 0;
  for (auto c : counts) top = std::max(top, c);
  require(top > 0, Errc::validation, "counts: largest count must be positive");
  std::vector<std::size_t> out;
  out.reserve(counts.size());
  for (auto c : counts) {
    const double scaled = static_cast<double>(c) * static_cast<double>(largest) / static_cast<double>(top);
    out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scaled))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embedding binary format

EmbeddingTable read_embedding_section(std::istream& in, const std::string& source) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() == 0 && in.eof()) fail(Errc::truncated, source + ": truncated before header");
  require(in.gcount() == 4, Errc::truncated, source + ": truncated magic");
  require(magic == kMagic, Errc::format, source + ": bad magic (expected EMB1)");
  std::uint32_t count = 0, dim = 0;
  require(get_u32(in, count) && get_u32(in, dim), Errc::truncated, source + ": truncated header");

  EmbeddingTable table;
  table.rows = Matrix(count, dim);
  for (std::uint32_t r = 0; r < count; ++r) {
    for (std::uint32_t d = 0; d < dim; ++d) {
      std::uint32_t bits = 0;
      require(get_u32(in, bits), Errc::truncated,
              source + ": truncated payload at row " + std::to_string(r));
      const double v = static_cast<double>(std::bit_cast<float>(bits));
      require(std::isfinite(v), Errc::non_finite,
              source + ": non-finite value at row " + std::to_string(r) + ", column " +
                  std::to_string(d));
      table.rows(r, d) = v;
    }
  }
  table.ids.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    std::string id;
    char ch = 0;
    bool terminated = false;
    while (in.get(ch)) {
      if (ch == '\n') {
        terminated = true;
        break;
      }
      id.push_back(ch);
    }
    require(terminated, Errc::truncated, source + ": truncated utt_id list at entry " +
                                             std::to_string(r));
    table.ids.push_back(std::move(id));
  }
  return table;
}

void write_embedding_section(std::ostream& out, const EmbeddingTable& table) {
  require(table.ids.size() == table.rows.rows(), Errc::shape,
          "embedding table: id count does not match row count");
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(table.rows.rows()));
  put_u32(out, static_cast<std::uint32_t>(table.rows.cols()));
  for (double v : table.rows.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  for (const auto& id : table.ids) {
    require(id.find('\n') == std::string::npos, Errc::validation,
            "utt_id contains a newline: '" + id + "'");
    out << id << '\n';
  }
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::io, "cannot open '" + path.string() + "'");
  return read_embedding_section(in, path.string());
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot write '" + path.string() + "'");
  write_embedding_section(out, table);
  out.flush();
  require(out.good(), Errc::io, "write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Manifest

LabeledCorpus load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io, "cannot open manifest '" + path.string() + "'");
  const auto dir = path.parent_path();
  std::map<std::string, EmbeddingTable> sidecars;
  std::unordered_set<std::string> ids;
  std::vector<UtteranceRecord> records;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string at = path.string() + ":" + std::to_string(line_no) + ": ";
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::format, at + "invalid JSON (" + e.what() + ")");
    }
    require(obj.is_object(), Errc::format, at + "expected a JSON object");
    require(obj.contains("utt_id") && obj["utt_id"].is_string(), Errc::format,
            at + "utt_id: missing or not a string");
    UtteranceRecord rec;
    rec.utt_id = obj["utt_id"].get<std::string>();
    require(!rec.utt_id.empty(), Errc::format, at + "utt_id: empty");
    require(ids.insert(rec.utt_id).second, Errc::duplicate,
            at + "duplicate utt_id '" + rec.utt_id + "'");
    require(obj.contains("group"), Errc::format, at + "group: missing (use null for unlabeled)");
    if (obj["group"].is_string())
      rec.group = obj["group"].get<std::string>();
    else
      require(obj["group"].is_null(), Errc::format, at + "group: must be a string or null");

    const bool has_emb = obj.contains("embedding");
    const bool has_ref = obj.contains("frames_ref");
    require(has_emb != has_ref, Errc::format,
            at + "exactly one of embedding or frames_ref is required");
    if (has_emb) {
      const auto& arr = obj["embedding"];
      require(arr.is_array() && !arr.empty(), Errc::format,
              at + "embedding: must be a non-empty array");
      Vector v;
      v.reserve(arr.size());
      for (const auto& x : arr) {
        require(x.is_number(), Errc::format, at + "embedding: entries must be numbers");
        v.push_back(x.get<double>());
      }
      require(all_finite(v), Errc::non_finite, at + "embedding: non-finite entry");
      rec.features = std::move(v);
    } else {
      require(obj["frames_ref"].is_string(), Errc::format, at + "frames_ref: must be a string");
      require(obj.contains("row") && obj["row"].is_number_unsigned(), Errc::format,
              at + "row: missing or not a non-negative integer");
      std::size_t num_frames = 1;
      if (obj.contains("num_frames")) {
        require(obj["num_frames"].is_number_unsigned() && obj["num_frames"].get<std::size_t>() >= 1,
                Errc::format, at + "num_frames: must be a positive integer");
        num_frames = obj["num_frames"].get<std::size_t>();
      }
      const auto ref = obj["frames_ref"].get<std::string>();
      auto it = sidecars.find(ref);
      if (it == sidecars.end()) it = sidecars.emplace(ref, load_embeddings(dir / ref)).first;
      const auto& table = it->second;
      const std::size_t row = obj["row"].get<std::size_t>();
      require(row + num_frames <= table.rows.rows(), Errc::format,
              at + "frames_ref rows out of range for '" + ref + "'");
      Matrix frames(num_frames, table.rows.cols());
      for (std::size_t t = 0; t < num_frames; ++t) {
        require(table.ids[row + t] == rec.utt_id, Errc::format,
                at + "frames_ref row " + std::to_string(row + t) + " belongs to '" +
                    table.ids[row + t] + "'");
        auto src = table.rows.row(row + t);
        std::copy(src.begin(), src.end(), frames.row(t).begin());
      }
      rec.features = std::move(frames);
    }
    records.push_back(std::move(rec));
  }
  require(!in.bad(), Errc::io, "read failed for '" + path.string() + "'");
  return make_corpus(std::move(records));
}

void save_manifest(const LabeledCorpus& corpus, const std::filesystem::path& path) {
  validate(corpus);
  const std::string sidecar = frames_sidecar_name(path);
  EmbeddingTable frames;
  std::ostringstream body;
  for (const auto& r : corpus.records) {
    nlohmann::ordered_json obj;
    obj["utt_id"] = r.utt_id;
    obj["group"] = r.group ? nlohmann::ordered_json(*r.group) : nlohmann::ordered_json(nullptr);
    if (r.has_frames()) {
      const auto& f = r.frames();
      if (frames.rows.rows() == 0 && frames.rows.cols() == 0) frames.rows = Matrix(0, f.cols());
      require(f.cols() == frames.rows.cols(), Errc::shape,
              "record '" + r.utt_id + "': frame width differs from earlier records");
      obj["frames_ref"] = sidecar;
      obj["row"] = frames.rows.rows();
      obj["num_frames"] = f.rows();
      for (std::size_t t = 0; t < f.rows(); ++t) {
        frames.rows.append_row(f.row(t));
        frames.ids.push_back(r.utt_id);
      }
    } else {
      obj["embedding"] = r.embedding();
    }
    body << obj.dump() << '\n';
  }
  if (!frames.ids.empty()) save_embeddings(frames, path.parent_path() / sidecar);
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), Errc::io, "cannot write manifest '" + path.string() + "'");
  out << body.str();
  out.flush();
  require(out.good(), Errc::io, "write failed for '" + path.string() + "'");
}

}  // namespace accentmine
