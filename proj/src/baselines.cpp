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

#include "cobra/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cobra/flow.hpp"

namespace cobra {

namespace {

void require_scored_valid(const Instance& inst) {
  auto violations = validate_instance(inst);
  if (!violations.empty()) {
    throw std::invalid_argument("invalid instance: " + violations.front());
  }
  if (!inst.has_scores()) {
    throw std::invalid_argument("instance has no similarity scores");
  }
}

// Exhaustive assignment search under a minimum-paper-score threshold.
// Papers are processed tightest-first; per paper, reviewer k_p-subsets are
// enumerated over the score-descending eligible list with prefix-sum
// bounds, and every node re-checks that each remaining paper can still
// reach the threshold with its available reviewers.
class ThresholdSearch {
 public:
  ThresholdSearch(const Instance& inst, long long node_budget)
      : inst_(inst), budget_(node_budget) {
    const int n = inst.agents();
    const int m = inst.papers();
    papers_.resize(m);
    for (int j = 0; j < m; ++j) {
      PaperInfo& p = papers_[j];
      p.id = j;
      for (int r = 0; r < n; ++r) {
        if (r != inst.author_of(j)) p.eligible.push_back(r);
      }
      std::sort(p.eligible.begin(), p.eligible.end(), [&](int a, int b) {
        Score sa = inst.score(a, j), sb = inst.score(b, j);
        if (sa != sb) return sa > sb;
        return a < b;
      });
      p.escore.reserve(p.eligible.size());
      for (int r : p.eligible) p.escore.push_back(inst.score(r, j));
      p.static_top = 0;
      for (int t = 0; t < inst.k_p() && t < static_cast<int>(p.escore.size()); ++t) {
        p.static_top += p.escore[t];
      }
    }
    std::sort(papers_.begin(), papers_.end(), [](const PaperInfo& a, const PaperInfo& b) {
      if (a.static_top != b.static_top) return a.static_top < b.static_top;
      return a.id < b.id;
    });
    chosen_.resize(m);
    done_.assign(m, 0);
  }

  // Upper bound on the minimum paper score of any valid assignment.
  Score threshold_cap() const {
    Score cap = 0;
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      cap = i == 0 ? papers_[i].static_top : std::min(cap, papers_[i].static_top);
    }
    return cap;
  }

  // 1 = witness found, 0 = proven infeasible, -1 = node budget exhausted.
  int find_feasible(Score tau, Assignment* witness) {
    start(tau, false, nullptr);
    dfs(0);
    if (found_) {
      *witness = build_assignment();
      return 1;
    }
    return exhausted_ ? -1 : 0;
  }

  // Raises `best` to the maximum-USW assignment among those whose minimum
  // paper score stays >= tau.  Returns true when the search completed (the
  // result is exactly optimal).
  bool maximize_usw(Score tau, Assignment* best) {
    start(tau, true, best);
    dfs(0);
    if (found_) *best = best_assignment_;
    return !exhausted_;
  }

  long long nodes_used() const { return nodes_used_; }

 private:
  struct PaperInfo {
    int id = 0;
    std::vector<int> eligible;
    std::vector<Score> escore;
    Score static_top = 0;
  };

  const Instance& inst_;
  long long budget_;
  long long nodes_used_ = 0;
  long long call_base_ = 0;

  Score tau_ = 0;
  bool optimize_ = false;
  Score best_usw_ = -1;
  bool found_ = false;
  bool exhausted_ = false;

  std::vector<PaperInfo> papers_;
  std::vector<int> caps_;
  std::vector<std::vector<int>> chosen_;  // per papers_ index
  std::vector<char> done_;
  Score current_usw_ = 0;
  Assignment best_assignment_;

  void start(Score tau, bool optimize, Assignment* seed) {
    tau_ = tau;
    optimize_ = optimize;
    found_ = false;
    exhausted_ = false;
    call_base_ = nodes_used_;
    caps_.assign(inst_.agents(), inst_.k_a());
    current_usw_ = 0;
    if (optimize) {
      best_assignment_ = *seed;
      best_usw_ = compute_utilities(inst_, *seed).usw;
    }
  }

  bool stop() const { return exhausted_ || (found_ && !optimize_); }

  Assignment build_assignment() const {
    Assignment out(inst_.agents(), inst_.papers());
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      for (int r : chosen_[i]) out.add(r, papers_[i].id);
    }
    return out;
  }

  // Global capacity check: with little slack left, stranded capacity (an
  // agent only eligible for already-covered papers) is the usual dead end,
  // so decide remaining count-feasibility exactly with a small max-flow.
  // Sampled so its cost stays marginal.
  bool count_feasible(int remaining_papers) {
    const long long need =
        static_cast<long long>(remaining_papers) * inst_.k_p();
    long long total = 0;
    for (int c : caps_) total += c;
    if (total < need) return false;
    if (total - need > 2LL * inst_.k_p()) return true;
    if (remaining_papers > 64 || (nodes_used_ & 63) != 0) return true;
    std::vector<std::vector<int>> eligible;
    eligible.reserve(remaining_papers);
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      if (done_[i]) continue;
      eligible.emplace_back();
      for (int agent : papers_[i].eligible) {
        if (caps_[agent] > 0) eligible.back().push_back(agent);
      }
    }
    return b_matching_feasible(eligible,
                               std::vector<int>(eligible.size(), inst_.k_p()),
                               caps_);
  }

  void dfs(int depth) {
    if (stop()) return;
    ++nodes_used_;
    if (nodes_used_ - call_base_ > budget_) {
      exhausted_ = true;
      return;
    }
    const int m = static_cast<int>(papers_.size());
    if (depth == m) {
      if (optimize_) {
        if (current_usw_ > best_usw_) {
          best_usw_ = current_usw_;
          best_assignment_ = build_assignment();
          found_ = true;
        }
      } else {
        found_ = true;
      }
      return;
    }

    // One scan over the open papers: per-paper optimistic top-k_p sums give
    // the threshold prune, a utilitarian bound, and the fail-first choice
    // (the paper with the least headroom above tau).
    Score total_bound = 0;
    int selected = -1;
    Score selected_top = 0;
    Score best_slack = 0;
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      if (done_[i]) continue;
      const PaperInfo& p = papers_[i];
      Score top = 0;
      int got = 0;
      for (std::size_t e = 0; e < p.eligible.size() && got < inst_.k_p(); ++e) {
        if (caps_[p.eligible[e]] > 0) {
          top += p.escore[e];
          ++got;
        }
      }
      if (got < inst_.k_p() || top < tau_) return;
      total_bound += top;
      Score slack = top - tau_;
      if (selected < 0 || slack < best_slack) {
        selected = static_cast<int>(i);
        selected_top = top;
        best_slack = slack;
      }
    }
    if (optimize_ && current_usw_ + total_bound <= best_usw_) return;
    if (!count_feasible(m - depth)) return;

    const PaperInfo& p = papers_[selected];
    const Score rest_bound = total_bound - selected_top;
    std::vector<int> avail;
    std::vector<Score> prefix{0};
    for (std::size_t e = 0; e < p.eligible.size(); ++e) {
      if (caps_[p.eligible[e]] > 0) {
        avail.push_back(static_cast<int>(e));
        prefix.push_back(prefix.back() + p.escore[e]);
      }
    }
    done_[selected] = 1;
    std::vector<int> picked;
    picked.reserve(inst_.k_p());
    pick(depth, selected, 0, 0, 0, rest_bound, avail, prefix, picked);
    done_[selected] = 0;
  }

  void pick(int depth, int sel, int chosen_count, std::size_t start_at,
            Score sum, Score rest_bound, const std::vector<int>& avail,
            const std::vector<Score>& prefix, std::vector<int>& picked) {
    if (stop()) return;
    const PaperInfo& p = papers_[sel];
    const int need = inst_.k_p() - chosen_count;
    if (need == 0) {
      if (sum < tau_) return;  // the bound admits some below-threshold subsets
      for (int r : picked) --caps_[r];
      chosen_[sel] = picked;
      current_usw_ += sum;
      dfs(depth + 1);
      current_usw_ -= sum;
      for (int r : picked) ++caps_[r];
      return;
    }
    for (std::size_t a = start_at; a + need <= avail.size(); ++a) {
      // Best continuation takes the next need-1 available entries.
      Score optimistic = sum + (prefix[a + need] - prefix[a]);
      if (optimistic < tau_) break;  // scores descend with a
      if (optimize_ && current_usw_ + optimistic + rest_bound <= best_usw_) {
        break;
      }
      picked.push_back(p.eligible[avail[a]]);
      pick(depth, sel, chosen_count + 1, a + 1, sum + p.escore[avail[a]],
           rest_bound, avail, prefix, picked);
      picked.pop_back();
      if (stop()) return;
    }
  }
};

}  // namespace

Assignment assign_max_usw(const Instance& inst) {
  require_scored_valid(inst);
  const int n = inst.agents();
  const int m = inst.papers();
  const int src = 0, snk = 1;
  MinCostFlow flow(2 + n + m);
  for (int r = 0; r < n; ++r) flow.add_arc(src, 2 + r, inst.k_a(), 0);
  std::vector<int> arc_of(static_cast<std::size_t>(n) * m, -1);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < m; ++j) {
      if (inst.author_of(j) == r) continue;
      arc_of[static_cast<std::size_t>(r) * m + j] =
          flow.add_arc(2 + r, 2 + n + j, 1, kScoreOne - inst.score(r, j));
    }
  }
  for (int j = 0; j < m; ++j) flow.add_arc(2 + n + j, snk, inst.k_p(), 0);

  const long long want = static_cast<long long>(m) * inst.k_p();
  auto [pushed, cost] = flow.solve(src, snk, want);
  (void)cost;
  if (pushed != want) {
    throw std::logic_error("no valid assignment exists for this instance");
  }
  Assignment out(n, m);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < m; ++j) {
      int id = arc_of[static_cast<std::size_t>(r) * m + j];
      if (id >= 0 && flow.flow_on(id) > 0) out.add(r, j);
    }
  }
  return out;
}

Assignment assign_maxmin_esw(const Instance& inst, MaxminStats* stats,
                             long long node_budget) {
  require_scored_valid(inst);

  // The utilitarian optimum seeds the search: its minimum paper score is a
  // feasible threshold, so the result can never fall below it.
  Assignment witness = assign_max_usw(inst);
  Score lo = compute_utilities(inst, witness).esw;

  ThresholdSearch search(inst, node_budget);
  Score hi = inst.papers() == 0 ? 0 : search.threshold_cap();
  bool certified = true;
  while (lo < hi) {
    Score mid = lo + (hi - lo + 1) / 2;
    Assignment candidate;
    int r = search.find_feasible(mid, &candidate);
    if (r == 1) {
      lo = mid;
      witness = std::move(candidate);
    } else {
      if (r < 0) certified = false;
      hi = mid - 1;
    }
  }
  if (inst.papers() > 0) {
    certified &= search.maximize_usw(lo, &witness);
  }
  if (stats) {
    stats->esw = compute_utilities(inst, witness).esw;
    stats->certified = certified;
    stats->nodes_used = search.nodes_used();
  }
  return witness;
}

}  // namespace cobra
