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

#include "accentmine/miner.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "accentmine/error.hpp"
#include "accentmine/rng.hpp"

namespace accentmine {
namespace {

struct Candidate {
  std::size_t index;
  double score;  // smaller is more confident
};

LabeledCorpus take(const LabeledCorpus& corpus, const std::vector<std::size_t>& indices) {
  std::vector<UtteranceRecord> records;
  records.reserve(indices.size());
  for (auto i : indices) records.push_back(corpus.records[i]);
  return make_corpus(std::move(records));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(std::span<std::size_t>(order), rng);
  return order;
}

}  // namespace

MiningResult mine(const LabeledCorpus& corpus, const MiningPlan& plan,
                  const MiningArtifacts& artifacts) {
  require(plan.target_size >= 1, Errc::validation, "target_size: must be a positive integer");
  std::vector<Candidate> matches;
  if (const auto* label = std::get_if<SupervisedLabel>(&plan.source)) {
    const auto* art = std::get_if<SupervisedArtifacts>(&artifacts);
    require(art && art->model, Errc::validation, "label mining needs a trained classifier");
    const auto& groups = art->model->groups;
    auto it = std::find(groups.begin(), groups.end(), label->group);
    require(it != groups.end(), Errc::validation,
            "source: group '" + label->group + "' is unknown to the classifier");
    const std::size_t target = static_cast<std::size_t>(it - groups.begin());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto fwd = forward(pooled_input(corpus.records[i], art->model->pool), art->model->params);
      if (argmax(fwd.probs) == target) matches.push_back({i, -fwd.probs[target]});
    }
  } else {
    const auto& cluster = std::get<ClusterIndex>(plan.source);
    const auto* art = std::get_if<ClusterArtifacts>(&artifacts);
    require(art && art->encoder && art->centroids, Errc::validation,
            "cluster mining needs an encoder and centroids");
    require(cluster.index < art->centroids->k(), Errc::validation,
            "source: cluster " + std::to_string(cluster.index) + " does not exist (k = " +
                std::to_string(art->centroids->k()) + ")");
    const Assignment a = assign(embed_all(*art->encoder, corpus), *art->centroids);
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (a.labels[i] == cluster.index) matches.push_back({i, a.distances[i]});
  }

  MiningResult result;
  result.matched = matches.size();
  result.shortfall = matches.size() < plan.target_size;
  if (matches.size() > plan.target_size) {
    std::stable_sort(matches.begin(), matches.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
    matches.resize(plan.target_size);
  }
  std::vector<std::size_t> keep;
  for (const auto& m : matches) keep.push_back(m.index);
  std::sort(keep.begin(), keep.end());
  result.corpus = take(corpus, keep);
  return result;
}

MiningResult execute_plan(const LabeledCorpus& corpus, const MiningPlan& plan,
                          const MiningArtifacts& artifacts) {
  MiningResult result = mine(corpus, plan, artifacts);
  if (plan.anchor) {
    require(plan.anchor->corpus != nullptr, Errc::validation, "anchor: corpus missing");
    result.corpus = mix_with_anchor(result.corpus, *plan.anchor->corpus, plan.anchor->count, plan.seed);
  }
  return result;
}

LabeledCorpus random_sample(const LabeledCorpus& corpus, std::size_t n, std::uint64_t seed,
                            const std::optional<std::string>& exclude_group) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& g = corpus.records[i].group;
    if (exclude_group && g && *g == *exclude_group) continue;
    eligible.push_back(i);
  }
  require(n <= eligible.size(), Errc::validation,
          "random_sample: requested " + std::to_string(n) + " records but only " +
              std::to_string(eligible.size()) + " are eligible");
  Rng rng(seed);
  shuffle(std::span<std::size_t>(eligible), rng);
  eligible.resize(n);
  return take(corpus, eligible);
}

LabeledCorpus mix_with_anchor(const LabeledCorpus& mined, const LabeledCorpus& anchor,
                              std::size_t anchor_count, std::uint64_t seed) {
  require(anchor_count <= anchor.size(), Errc::validation,
          "anchor_count: " + std::to_string(anchor_count) + " exceeds anchor size " +
              std::to_string(anchor.size()));
  const Rng root(seed);
  Rng pick_rng = root.fork(1);
  Rng order_rng = root.fork(2);

  auto picks = shuffled_indices(anchor.size(), pick_rng);
  picks.resize(anchor_count);
  std::sort(picks.begin(), picks.end());

  std::vector<UtteranceRecord> records = mined.records;
  std::unordered_set<std::string> ids;
  for (const auto& r : records) ids.insert(r.utt_id);
  for (auto i : picks) {
    const auto& r = anchor.records[i];
    require(ids.insert(r.utt_id).second, Errc::collision,
            "utt_id '" + r.utt_id + "' occurs in both the mined and the anchor data");
    records.push_back(r);
  }
  shuffle(std::span<UtteranceRecord>(records), order_rng);
  return make_corpus(std::move(records));
}

std::vector<LabeledCorpus> size_match(const std::vector<LabeledCorpus>& manifests,
                                      std::uint64_t seed) {
  require(!manifests.empty(), Errc::validation, "size_match: no manifests");
  std::size_t smallest = manifests.front().size();
  for (std::size_t m = 0; m < manifests.size(); ++m) {
    require(!manifests[m].empty(), Errc::validation,
            "size_match: manifest " + std::to_string(m) + " is empty");
    smallest = std::min(smallest, manifests[m].size());
  }
  const Rng root(seed);
  std::vector<LabeledCorpus> out;
  out.reserve(manifests.size());
  for (std::size_t m = 0; m < manifests.size(); ++m) {
    Rng rng = root.fork(m);
    auto keep = shuffled_indices(manifests[m].size(), rng);
    keep.resize(smallest);
    std::sort(keep.begin(), keep.end());
    out.push_back(take(manifests[m], keep));
  }
  return out;
}

}  // namespace accentmine
