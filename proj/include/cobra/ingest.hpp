// Copyright 2025 The cobra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COBRA_INGEST_HPP
#define COBRA_INGEST_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cobra/model.hpp"

namespace cobra {

// Raw conference data: a reviewer x paper similarity matrix, optionally a
// same-shape 0/1 conflict matrix.  Similarities must be finite and
// non-negative; they may exceed 1 until normalize_scores is applied.
struct RawDataset {
  std::vector<std::string> reviewer_ids;
  std::vector<std::string> paper_ids;
  ScoreMatrix scores;
  std::optional<std::vector<std::vector<char>>> conflicts;
};

// CSV with header `reviewer_id,<paper_id>,...` and one row per reviewer.
// Ragged rows, non-numeric or negative cells, NaNs, duplicate ids and empty
// files raise std::invalid_argument naming the offending line.
RawDataset load_similarity_csv(const std::string& path);

// Same shape as the similarity CSV with cells 0/1; ids must agree with ds.
void load_conflicts_csv(const std::string& path, RawDataset* ds);

// Author per paper (index into reviewer_ids) or -1 when unmatched.
// Maximum-cardinality matching on the conflict pairs, augmenting papers in
// ascending order; requires conflicts.
std::vector<int> authorship_by_max_matching(const RawDataset& ds);

// Papers in dataset order, each taking its highest-scoring reviewer if that
// reviewer is still free (ties by lower reviewer index), otherwise dropped.
std::vector<int> authorship_by_greedy(const RawDataset& ds);

// Divides every similarity by the global maximum, mapping into [0,1].
// Idempotent; all-zero matrices raise std::invalid_argument.
RawDataset normalize_scores(RawDataset ds);

void write_authorship_csv(const std::string& path, const RawDataset& ds,
                          const std::vector<int>& author_of_paper);

// An instance over the matched author-paper pairs: each matched author
// becomes an agent with her single paper, unmatched papers and paperless
// reviewers are dropped, and rankings are derived from the scores.
// `agent_ids`/`paper_ids` carry the original dataset labels.
struct BuiltInstance {
  Instance instance;
  std::vector<std::string> agent_ids;
  std::vector<std::string> paper_ids;
};
BuiltInstance build_instance(const RawDataset& ds,
                             const std::vector<int>& author_of_paper, int k_p,
                             int k_a);

// Uniform sample of `size` papers (with their authors as the agent set)
// drawn without replacement from a single-submission instance.  The same
// (seed, size) always yields the same instance; `picked` maps the sample
// back to the source paper indices.
struct Subsample {
  Instance instance;
  std::vector<int> picked;
};
Subsample subsample_instance(const Instance& full, int size, std::uint64_t seed);

// Plain-text instance files (1-based ids):
//   agents N / k_p K / k_a K / submissions m1 ... mN
//   ranking <agent> <submission> <reviewers best first...>
//   scorerow <agent> <one value per paper in global order>   (optional)
// '#' starts a comment.
Instance load_instance_file(const std::string& path);

}  // namespace cobra

#endif  // COBRA_INGEST_HPP
