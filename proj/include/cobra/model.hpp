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

#ifndef COBRA_MODEL_HPP
#define COBRA_MODEL_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cobra/score.hpp"

namespace cobra {

// Agents and papers are 0-based indices throughout the library.  CLI and
// file formats render them 1-based.
struct PaperRef {
  int author = 0;
  int index = 0;  // position within the author's submission list
  friend bool operator==(const PaperRef&, const PaperRef&) = default;
};

// Dense reviewer x paper similarity matrix in fixed-point units.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(int reviewers, int papers, Score fill = 0)
      : rows_(reviewers), cols_(papers),
        cells_(static_cast<std::size_t>(reviewers) * papers, fill) {}

  int reviewers() const { return rows_; }
  int papers() const { return cols_; }
  Score at(int reviewer, int paper) const {
    return cells_[static_cast<std::size_t>(reviewer) * cols_ + paper];
  }
  Score& at(int reviewer, int paper) {
    return cells_[static_cast<std::size_t>(reviewer) * cols_ + paper];
  }
  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Score> cells_;
};

// A review-assignment problem: n agents, each submitting m_i papers, a
// strict reviewer ranking per submission, per-agent review capacity k_a and
// per-paper reviewer demand k_p, plus an optional similarity matrix that is
// used only for evaluation and auditing.
//
// Papers carry global ids in author-major order; paper_id/paper convert
// between the global id and (author, submission index).
class Instance {
 public:
  Instance() = default;
  Instance(int reviews_per_paper, int reviewer_capacity,
           std::vector<int> submissions,
           std::vector<std::vector<std::vector<int>>> rankings,
           std::optional<ScoreMatrix> scores = std::nullopt);

  int agents() const { return n_; }
  int k_p() const { return k_p_; }
  int k_a() const { return k_a_; }
  int papers() const { return m_total_; }
  int submissions(int agent) const { return m_[agent]; }
  const std::vector<int>& submission_counts() const { return m_; }

  int paper_id(int author, int index) const { return offset_[author] + index; }
  PaperRef paper(int id) const { return {author_[id], id - offset_[author_[id]]}; }
  int author_of(int id) const { return author_[id]; }

  // Reviewers in strictly decreasing preference for the given submission;
  // never contains the author.
  const std::vector<int>& ranking(int author, int index) const {
    return rankings_[author][index];
  }
  const std::vector<int>& ranking_of_paper(int id) const {
    PaperRef p = paper(id);
    return rankings_[p.author][p.index];
  }
  const std::vector<std::vector<std::vector<int>>>& rankings() const {
    return rankings_;
  }

  bool has_scores() const { return scores_.has_value(); }
  Score score(int reviewer, int paper) const { return scores_->at(reviewer, paper); }
  const ScoreMatrix& scores() const { return *scores_; }
  void set_scores(std::optional<ScoreMatrix> s) { scores_ = std::move(s); }

 private:
  int n_ = 0;
  int k_p_ = 0;
  int k_a_ = 0;
  int m_total_ = 0;
  std::vector<int> m_;
  std::vector<int> offset_;   // first global paper id per agent
  std::vector<int> author_;   // author per global paper id
  std::vector<std::vector<std::vector<int>>> rankings_;
  std::optional<ScoreMatrix> scores_;
};

// The reviewing relation.  Maintains both views (papers per reviewer,
// reviewers per paper) plus a membership matrix for O(1) queries.
class Assignment {
 public:
  Assignment() = default;
  Assignment(int reviewers, int papers);

  int reviewers() const { return n_; }
  int papers() const { return m_; }
  bool contains(int reviewer, int paper) const {
    return matrix_[static_cast<std::size_t>(reviewer) * m_ + paper] != 0;
  }
  void add(int reviewer, int paper);
  void remove(int reviewer, int paper);

  int load(int reviewer) const { return static_cast<int>(by_reviewer_[reviewer].size()); }
  int coverage(int paper) const { return static_cast<int>(by_paper_[paper].size()); }
  const std::vector<int>& papers_of(int reviewer) const { return by_reviewer_[reviewer]; }
  const std::vector<int>& reviewers_of(int paper) const { return by_paper_[paper]; }

  long long size() const { return pair_count_; }
  // All pairs as (reviewer, paper), sorted.
  std::vector<std::pair<int, int>> pairs() const;

  bool operator==(const Assignment& other) const {
    return n_ == other.n_ && m_ == other.m_ && matrix_ == other.matrix_;
  }

 private:
  int n_ = 0;
  int m_ = 0;
  long long pair_count_ = 0;
  std::vector<char> matrix_;
  std::vector<std::vector<int>> by_reviewer_;
  std::vector<std::vector<int>> by_paper_;
};

// An assignment under construction plus bookkeeping of incompletely
// assigned papers and agent completion order.  Single writer; the driving
// algorithm calls assign()/finish_round() during cycle elimination and
// swap_rewire() during topological repair.
struct PartialAssignment {
  explicit PartialAssignment(const Instance& inst);

  Assignment asg;
  // P-bar: per agent, the globally-indexed papers with fewer than k_p
  // reviewers, ascending.
  std::vector<std::vector<int>> incomplete;
  // Round at which the agent's last paper completed; -1 while incomplete.
  // Agents completing in the same round are ordered by index.
  std::vector<int> completed_at;
  std::vector<int> completion_sequence;
  // Reviews received per author across all her papers; equals the author's
  // own load while she stays incomplete (checked by check_balance).
  std::vector<long long> received;
  int round = 0;

  bool agent_complete(int agent) const { return incomplete[agent].empty(); }

  void assign(const Instance& inst, int reviewer, int paper);
  // Seals one cycle elimination: newly completed agents enter the
  // completion sequence (ties by agent index) and the round advances.
  // Returns the agents that completed this round.
  std::vector<int> finish_round();
  // Moves `donor` (a completely assigned paper) from reviewer `via` to
  // `gainer`, and gives `via` the incomplete paper `gap` instead.
  void swap_rewire(const Instance& inst, int via, int gap, int donor, int gainer);
  // Throws std::logic_error unless every incomplete agent's load stays at
  // or below the reviews her papers have received (exact equality under
  // tight capacity, k_a == m* k_p).  Returns the number of agents checked.
  int check_balance(const Instance& inst) const;

 private:
  std::vector<int> pending_;
  void on_paper_complete(const Instance& inst, int paper);
};

// An instance padded so every agent has exactly m* submissions.  Dummy
// papers rank reviewers by ascending agent index and never carry scores.
struct PaddedInstance {
  Instance instance;
  std::vector<char> dummy;  // per padded global paper id
  int m_star = 0;
  bool is_dummy(int paper) const { return dummy[paper] != 0; }
};

// Empty = valid; otherwise one message per violated invariant.
std::vector<std::string> validate_instance(const Instance& inst);

// Checks the three validity constraints (coverage == k_p, load <= k_a, no
// self-review).  Throws std::invalid_argument if the assignment's shape
// does not match the instance.
std::vector<std::string> validate_assignment(const Instance& inst,
                                             const Assignment& asg);

// Per paper: reviewers sorted by score descending, ties by ascending
// reviewer index, the author excluded.  Invariant under positive affine
// rescaling of the scores.
std::vector<std::vector<int>> rankings_from_scores(
    const ScoreMatrix& scores, const std::vector<int>& author_of_paper);

PaddedInstance pad_to_uniform(const Instance& inst);

// Drops all pairs that touch dummy papers and renumbers the rest back to
// the original instance's paper ids.
Assignment strip_dummies(const PaddedInstance& padded, const Assignment& asg);

struct UtilityReport {
  std::vector<Score> paper_score;    // u^p per global paper
  std::vector<Score> agent_utility;  // sum over the agent's own papers
  Score usw = 0;                     // sum of paper scores
  Score esw = 0;                     // min paper score (0 if no papers)
};

// Requires scores; throws std::invalid_argument without them.
UtilityReport compute_utilities(const Instance& inst, const Assignment& asg);

}  // namespace cobra

#endif  // COBRA_MODEL_HPP
