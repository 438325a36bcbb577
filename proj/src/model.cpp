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

#include "cobra/model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cobra {

namespace {

std::string agent_str(int a) { return std::to_string(a + 1); }

std::string paper_str(const Instance& inst, int paper) {
  PaperRef p = inst.paper(paper);
  return "p" + std::to_string(p.author + 1) + "." + std::to_string(p.index + 1);
}

}  // namespace

Instance::Instance(int reviews_per_paper, int reviewer_capacity,
                   std::vector<int> submissions,
                   std::vector<std::vector<std::vector<int>>> rankings,
                   std::optional<ScoreMatrix> scores)
    : k_p_(reviews_per_paper),
      k_a_(reviewer_capacity),
      m_(std::move(submissions)),
      rankings_(std::move(rankings)),
      scores_(std::move(scores)) {
  n_ = static_cast<int>(m_.size());
  offset_.resize(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) offset_[i + 1] = offset_[i] + std::max(m_[i], 0);
  m_total_ = offset_[n_];
  author_.resize(m_total_);
  for (int i = 0; i < n_; ++i) {
    for (int j = offset_[i]; j < offset_[i + 1]; ++j) author_[j] = i;
  }
}

Assignment::Assignment(int reviewers, int papers)
    : n_(reviewers), m_(papers),
      matrix_(static_cast<std::size_t>(reviewers) * papers, 0),
      by_reviewer_(reviewers), by_paper_(papers) {}

void Assignment::add(int reviewer, int paper) {
  char& cell = matrix_[static_cast<std::size_t>(reviewer) * m_ + paper];
  if (cell) throw std::logic_error("duplicate assignment pair");
  cell = 1;
  by_reviewer_[reviewer].push_back(paper);
  by_paper_[paper].push_back(reviewer);
  ++pair_count_;
}

void Assignment::remove(int reviewer, int paper) {
  char& cell = matrix_[static_cast<std::size_t>(reviewer) * m_ + paper];
  if (!cell) throw std::logic_error("removing absent assignment pair");
  cell = 0;
  auto& rp = by_reviewer_[reviewer];
  rp.erase(std::find(rp.begin(), rp.end(), paper));
  auto& pr = by_paper_[paper];
  pr.erase(std::find(pr.begin(), pr.end(), reviewer));
  --pair_count_;
}

std::vector<std::pair<int, int>> Assignment::pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(pair_count_));
  for (int r = 0; r < n_; ++r) {
    for (int p : by_reviewer_[r]) out.emplace_back(r, p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PartialAssignment::PartialAssignment(const Instance& inst)
    : asg(inst.agents(), inst.papers()),
      incomplete(inst.agents()),
      completed_at(inst.agents(), -1),
      received(inst.agents(), 0) {
  for (int i = 0; i < inst.agents(); ++i) {
    for (int l = 0; l < inst.submissions(i); ++l) {
      incomplete[i].push_back(inst.paper_id(i, l));
    }
  }
}

void PartialAssignment::on_paper_complete(const Instance& inst, int paper) {
  int author = inst.author_of(paper);
  auto& bar = incomplete[author];
  bar.erase(std::find(bar.begin(), bar.end(), paper));
  if (bar.empty()) pending_.push_back(author);
}

void PartialAssignment::assign(const Instance& inst, int reviewer, int paper) {
  asg.add(reviewer, paper);
  ++received[inst.author_of(paper)];
  if (asg.coverage(paper) == inst.k_p()) on_paper_complete(inst, paper);
}

std::vector<int> PartialAssignment::finish_round() {
  std::sort(pending_.begin(), pending_.end());
  for (int a : pending_) {
    completed_at[a] = round;
    completion_sequence.push_back(a);
  }
  std::vector<int> done = std::move(pending_);
  pending_.clear();
  ++round;
  return done;
}

void PartialAssignment::swap_rewire(const Instance& inst, int via, int gap,
                                    int donor, int gainer) {
  asg.remove(via, donor);
  asg.add(via, gap);
  asg.add(gainer, donor);
  ++received[inst.author_of(gap)];
  if (asg.coverage(gap) == inst.k_p()) {
    on_paper_complete(inst, gap);
    // Completions here happen outside cycle elimination; record them at the
    // current round immediately (the repair phase never rebuilds L).
    std::sort(pending_.begin(), pending_.end());
    for (int a : pending_) {
      completed_at[a] = round;
      completion_sequence.push_back(a);
    }
    pending_.clear();
  }
}

int PartialAssignment::check_balance(const Instance& inst) const {
  // An incomplete agent's load never exceeds the reviews her papers have
  // received (this is what keeps her capacity open).  With tight capacity
  // (k_a == m* k_p) completed agents can never re-enter cycles, so the two
  // counts agree exactly; with slack capacity a completed agent may bridge
  // a cycle and its successor gives a paper away without receiving one.
  int m_star = 0;
  for (int i = 0; i < inst.agents(); ++i) {
    m_star = std::max(m_star, inst.submissions(i));
  }
  const bool tight = static_cast<long long>(m_star) * inst.k_p() == inst.k_a();
  int checked = 0;
  for (int i = 0; i < inst.agents(); ++i) {
    if (incomplete[i].empty()) continue;
    ++checked;
    bool ok = tight ? received[i] == asg.load(i) : received[i] >= asg.load(i);
    if (!ok) {
      throw std::logic_error(
          "load/received imbalance for incomplete agent " + agent_str(i) +
          ": load=" + std::to_string(asg.load(i)) +
          " received=" + std::to_string(received[i]) +
          (tight ? " (tight capacity)" : ""));
    }
  }
  return checked;
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  const int n = inst.agents();
  if (inst.k_p() < 1) out.push_back("k_p must be a positive integer");
  if (inst.k_a() < 1) out.push_back("k_a must be a positive integer");
  for (int i = 0; i < n; ++i) {
    if (inst.submissions(i) < 0) {
      out.push_back("agent " + agent_str(i) + ": negative submission count");
    }
  }
  if (inst.k_p() >= 1 && n < inst.k_p() + 1) {
    out.push_back("need at least k_p+1 = " + std::to_string(inst.k_p() + 1) +
                  " agents, have " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    long long demand = static_cast<long long>(inst.submissions(i)) * inst.k_p();
    if (demand > inst.k_a()) {
      out.push_back("agent " + agent_str(i) + ": m_i*k_p = " +
                    std::to_string(demand) + " exceeds k_a = " +
                    std::to_string(inst.k_a()));
    }
  }
  if (static_cast<int>(inst.rankings().size()) != n) {
    out.push_back("rankings missing for some agents");
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(inst.rankings()[i].size()) != inst.submissions(i)) {
      out.push_back("agent " + agent_str(i) +
                    ": ranking count does not match submission count");
      continue;
    }
    for (int l = 0; l < inst.submissions(i); ++l) {
      const auto& sigma = inst.ranking(i, l);
      std::vector<char> seen(n, 0);
      bool ok = static_cast<int>(sigma.size()) == n - 1;
      for (int r : sigma) {
        if (r < 0 || r >= n || r == i || seen[r]) {
          ok = false;
          break;
        }
        seen[r] = 1;
      }
      if (!ok) {
        out.push_back("agent " + agent_str(i) + " submission " +
                      std::to_string(l + 1) +
                      ": ranking is not a permutation of the other agents");
      }
    }
  }
  if (inst.has_scores()) {
    if (inst.scores().reviewers() != n || inst.scores().papers() != inst.papers()) {
      out.push_back("score matrix shape does not match instance");
    } else {
      for (int r = 0; r < n && out.size() < 100; ++r) {
        for (int j = 0; j < inst.papers(); ++j) {
          Score s = inst.score(r, j);
          if (s < 0 || s > kScoreOne) {
            out.push_back("score for reviewer " + agent_str(r) + ", paper " +
                          paper_str(inst, j) + " is outside [0,1]");
            break;
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> validate_assignment(const Instance& inst,
                                             const Assignment& asg) {
  if (asg.reviewers() != inst.agents() || asg.papers() != inst.papers()) {
    throw std::invalid_argument("assignment shape does not match instance");
  }
  std::vector<std::string> out;
  for (int j = 0; j < inst.papers(); ++j) {
    if (asg.coverage(j) != inst.k_p()) {
      out.push_back("paper " + paper_str(inst, j) + " has " +
                    std::to_string(asg.coverage(j)) + " reviewers, needs " +
                    std::to_string(inst.k_p()));
    }
  }
  for (int i = 0; i < inst.agents(); ++i) {
    if (asg.load(i) > inst.k_a()) {
      out.push_back("agent " + agent_str(i) + " reviews " +
                    std::to_string(asg.load(i)) + " papers, cap is " +
                    std::to_string(inst.k_a()));
    }
    for (int l = 0; l < inst.submissions(i); ++l) {
      int p = inst.paper_id(i, l);
      if (asg.contains(i, p)) {
        out.push_back("agent " + agent_str(i) + " reviews her own paper " +
                      paper_str(inst, p));
      }
    }
  }
  return out;
}

std::vector<std::vector<int>> rankings_from_scores(
    const ScoreMatrix& scores, const std::vector<int>& author_of_paper) {
  if (static_cast<int>(author_of_paper.size()) != scores.papers()) {
    throw std::invalid_argument("authorship list does not match score matrix");
  }
  const int n = scores.reviewers();
  std::vector<std::vector<int>> out(scores.papers());
  for (int j = 0; j < scores.papers(); ++j) {
    int author = author_of_paper[j];
    auto& order = out[j];
    order.reserve(n - 1);
    for (int r = 0; r < n; ++r) {
      if (r != author) order.push_back(r);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      Score sa = scores.at(a, j), sb = scores.at(b, j);
      if (sa != sb) return sa > sb;
      return a < b;
    });
  }
  return out;
}

PaddedInstance pad_to_uniform(const Instance& inst) {
  const int n = inst.agents();
  int m_star = 0;
  for (int i = 0; i < n; ++i) m_star = std::max(m_star, inst.submissions(i));

  std::vector<int> ascending;  // reused per agent, author removed
  std::vector<std::vector<std::vector<int>>> rankings(n);
  for (int i = 0; i < n; ++i) {
    rankings[i].reserve(m_star);
    for (int l = 0; l < inst.submissions(i); ++l) rankings[i].push_back(inst.ranking(i, l));
    if (inst.submissions(i) < m_star) {
      ascending.clear();
      for (int r = 0; r < n; ++r) {
        if (r != i) ascending.push_back(r);
      }
      for (int l = inst.submissions(i); l < m_star; ++l) rankings[i].push_back(ascending);
    }
  }
  PaddedInstance padded;
  padded.m_star = m_star;
  padded.instance = Instance(inst.k_p(), inst.k_a(),
                             std::vector<int>(n, m_star), std::move(rankings));
  padded.dummy.assign(static_cast<std::size_t>(n) * m_star, 0);
  for (int i = 0; i < n; ++i) {
    for (int l = inst.submissions(i); l < m_star; ++l) {
      padded.dummy[padded.instance.paper_id(i, l)] = 1;
    }
  }
  return padded;
}

Assignment strip_dummies(const PaddedInstance& padded, const Assignment& asg) {
  const Instance& pin = padded.instance;
  // Real papers of agent i are exactly the first (m* - #dummies_i) slots.
  std::vector<int> real_count(pin.agents(), 0);
  for (int j = 0; j < pin.papers(); ++j) {
    if (!padded.is_dummy(j)) ++real_count[pin.author_of(j)];
  }
  std::vector<int> offset(pin.agents() + 1, 0);
  for (int i = 0; i < pin.agents(); ++i) offset[i + 1] = offset[i] + real_count[i];

  Assignment out(pin.agents(), offset[pin.agents()]);
  for (int r = 0; r < pin.agents(); ++r) {
    for (int j : asg.papers_of(r)) {
      if (padded.is_dummy(j)) continue;
      PaperRef p = pin.paper(j);
      out.add(r, offset[p.author] + p.index);
    }
  }
  return out;
}

UtilityReport compute_utilities(const Instance& inst, const Assignment& asg) {
  if (!inst.has_scores()) {
    throw std::invalid_argument("instance has no similarity scores");
  }
  if (asg.reviewers() != inst.agents() || asg.papers() != inst.papers()) {
    throw std::invalid_argument("assignment shape does not match instance");
  }
  UtilityReport rep;
  rep.paper_score.assign(inst.papers(), 0);
  rep.agent_utility.assign(inst.agents(), 0);
  for (int j = 0; j < inst.papers(); ++j) {
    Score s = 0;
    for (int r : asg.reviewers_of(j)) s += inst.score(r, j);
    rep.paper_score[j] = s;
    rep.agent_utility[inst.author_of(j)] += s;
    rep.usw += s;
  }
  rep.esw = 0;
  for (int j = 0; j < inst.papers(); ++j) {
    rep.esw = j == 0 ? rep.paper_score[j] : std::min(rep.esw, rep.paper_score[j]);
  }
  return rep;
}

}  // namespace cobra
