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

#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace cobra::testing {

namespace {

constexpr Score kNegInf = std::numeric_limits<Score>::min() / 4;
constexpr Score kPosInf = std::numeric_limits<Score>::max() / 4;

void shuffle_in_place(std::vector<int>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(rng, i)]);
  }
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

Instance random_instance(const InstanceSpec& spec, std::mt19937_64& rng) {
  int k_p = spec.k_p_choices[uniform_below(rng, spec.k_p_choices.size())];
  int lo_n = std::max(spec.min_n, k_p + 1);
  int n = lo_n + static_cast<int>(uniform_below(rng, spec.max_n - lo_n + 1));
  std::vector<int> m(n);
  int total = 0, m_star = 0;
  for (int i = 0; i < n; ++i) {
    m[i] = spec.min_m_i +
           static_cast<int>(uniform_below(rng, spec.max_m_i - spec.min_m_i + 1));
    total += m[i];
    m_star = std::max(m_star, m[i]);
  }
  if (total == 0) {
    m[0] = 1;
    m_star = 1;
  }
  int k_a = m_star * k_p;
  if (spec.allow_double_capacity && uniform_below(rng, 2) == 1) k_a *= 2;

  int papers = 0;
  for (int c : m) papers += c;
  std::optional<ScoreMatrix> scores;
  if (spec.with_scores) {
    ScoreMatrix s(n, papers);
    for (int j = 0; j < papers; ++j) {
      std::unordered_set<Score> used;
      for (int r = 0; r < n; ++r) {
        Score v;
        do {
          v = static_cast<Score>(uniform_below(rng, kScoreOne + 1));
        } while (spec.distinct_score_columns && !used.insert(v).second);
        s.at(r, j) = v;
      }
    }
    scores = std::move(s);
  }

  std::vector<std::vector<std::vector<int>>> rankings(n);
  if (spec.rank_by_scores && scores) {
    std::vector<int> authors;
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < m[i]; ++l) authors.push_back(i);
    }
    auto per_paper = rankings_from_scores(*scores, authors);
    int j = 0;
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < m[i]; ++l) rankings[i].push_back(per_paper[j++]);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      std::vector<int> base;
      for (int r = 0; r < n; ++r) {
        if (r != i) base.push_back(r);
      }
      for (int l = 0; l < m[i]; ++l) {
        std::vector<int> order = base;
        shuffle_in_place(order, rng);
        rankings[i].push_back(std::move(order));
      }
    }
  }
  return Instance(k_p, k_a, std::move(m), std::move(rankings), std::move(scores));
}

Instance worked6_instance() {
  auto perm = [](std::initializer_list<int> one_based) {
    std::vector<int> v;
    for (int x : one_based) v.push_back(x - 1);
    return v;
  };
  std::vector<std::vector<std::vector<int>>> rankings = {
      {perm({2, 3, 4, 5, 6})}, {perm({3, 1, 5, 4, 6})}, {perm({1, 2, 5, 4, 6})},
      {perm({1, 3, 5, 2, 6})}, {perm({6, 4, 1, 2, 3})}, {perm({2, 1, 3, 4, 5})},
  };
  return Instance(3, 3, std::vector<int>(6, 1), std::move(rankings));
}

Assignment worked6_final_assignment() {
  Instance inst = worked6_instance();
  return assignment_from_pairs(
      inst, {{0, 5}, {0, 1}, {0, 4}, {1, 0}, {1, 2}, {1, 5}, {2, 1}, {2, 0},
             {2, 3}, {3, 0}, {3, 4}, {3, 5}, {4, 1}, {4, 2}, {4, 3}, {5, 4},
             {5, 3}, {5, 2}});
}

Instance adversarial4_instance() {
  ScoreMatrix s(4, 4);
  s.at(0, 3) = kScoreOne;               // 1 is the perfect reviewer for p4
  s.at(1, 2) = kScoreOne;               // 2 is the perfect reviewer for p3
  s.at(2, 0) = kScoreOne / 5;           // 0.2
  s.at(3, 1) = 3 * (kScoreOne / 10);    // 0.3
  s.at(1, 0) = 9 * (kScoreOne / 10);    // 0.9
  s.at(0, 1) = 9 * (kScoreOne / 10);    // 0.9
  std::vector<int> authors = {0, 1, 2, 3};
  auto per_paper = rankings_from_scores(s, authors);
  std::vector<std::vector<std::vector<int>>> rankings(4);
  for (int i = 0; i < 4; ++i) rankings[i] = {per_paper[i]};
  return Instance(1, 1, std::vector<int>(4, 1), std::move(rankings),
                  std::move(s));
}

Assignment adversarial4_optimal() {
  Instance inst = adversarial4_instance();
  return assignment_from_pairs(inst, {{0, 3}, {1, 2}, {2, 0}, {3, 1}});
}

Assignment assignment_from_pairs(
    const Instance& inst, const std::vector<std::pair<int, int>>& reviewer_paper) {
  Assignment asg(inst.agents(), inst.papers());
  for (auto [r, p] : reviewer_paper) asg.add(r, p);
  return asg;
}

namespace {

void enumerate_rec(const Instance& inst, int paper, std::vector<int>& caps,
                   Assignment& asg, const std::function<void(const Assignment&)>& fn) {
  if (paper == inst.papers()) {
    fn(asg);
    return;
  }
  const int author = inst.author_of(paper);
  std::vector<int> picked;
  std::function<void(int, int)> choose = [&](int from, int need) {
    if (need == 0) {
      for (int r : picked) {
        asg.add(r, paper);
        --caps[r];
      }
      enumerate_rec(inst, paper + 1, caps, asg, fn);
      for (int r : picked) {
        asg.remove(r, paper);
        ++caps[r];
      }
      return;
    }
    for (int r = from; r <= inst.agents() - need; ++r) {
      if (r == author || caps[r] == 0) continue;
      picked.push_back(r);
      choose(r + 1, need - 1);
      picked.pop_back();
    }
  };
  choose(0, inst.k_p());
}

}  // namespace

void enumerate_assignments(const Instance& inst,
                           const std::function<void(const Assignment&)>& fn) {
  std::vector<int> caps(inst.agents(), inst.k_a());
  Assignment asg(inst.agents(), inst.papers());
  enumerate_rec(inst, 0, caps, asg, fn);
}

namespace {

// Capacity state packed base (k_a+1); n * ceil(log2(k_a+1)) must fit 64 bits.
std::uint64_t caps_key(const std::vector<int>& caps, int base) {
  std::uint64_t key = 0;
  for (int c : caps) key = key * static_cast<std::uint64_t>(base) + c;
  return key;
}

struct WelfareDp {
  const Instance& inst;
  std::vector<std::unordered_map<std::uint64_t, std::pair<Score, Score>>> memo;

  explicit WelfareDp(const Instance& i) : inst(i), memo(i.papers() + 1) {}

  // (max total, max bottleneck) over completions from this paper on.
  std::pair<Score, Score> solve(int paper, std::vector<int>& caps) {
    if (paper == inst.papers()) return {0, kPosInf};
    std::uint64_t key = caps_key(caps, inst.k_a() + 1);
    auto it = memo[paper].find(key);
    if (it != memo[paper].end()) return it->second;
    const int author = inst.author_of(paper);
    std::pair<Score, Score> best{kNegInf, kNegInf};
    std::vector<int> picked;
    std::function<void(int, int, Score)> choose = [&](int from, int need, Score sum) {
      if (need == 0) {
        for (int r : picked) --caps[r];
        auto [usw, esw] = solve(paper + 1, caps);
        for (int r : picked) ++caps[r];
        if (usw != kNegInf) {
          best.first = std::max(best.first, sum + usw);
          best.second = std::max(best.second, std::min(sum, esw));
        }
        return;
      }
      for (int r = from; r <= inst.agents() - need; ++r) {
        if (r == author || caps[r] == 0) continue;
        picked.push_back(r);
        choose(r + 1, need - 1,
               sum + (inst.has_scores() ? inst.score(r, paper) : 0));
        picked.pop_back();
      }
    };
    choose(0, inst.k_p(), 0);
    memo[paper][key] = best;
    return best;
  }
};

}  // namespace

BruteWelfare brute_welfare(const Instance& inst) {
  std::vector<int> caps(inst.agents(), inst.k_a());
  WelfareDp dp(inst);
  auto [usw, esw] = dp.solve(0, caps);
  BruteWelfare out;
  out.feasible = usw != kNegInf;
  if (out.feasible) {
    out.max_usw = usw;
    out.max_esw = inst.papers() == 0 ? 0 : esw;
  }
  return out;
}

TtcOracleResult classic_ttc(const std::vector<std::vector<int>>& sigma) {
  const int n = static_cast<int>(sigma.size());
  std::vector<int> reviewer_of(n, -1);  // paper i belongs to agent i
  std::vector<int> load(n, 0);
  for (;;) {
    // Pointers.
    std::vector<int> target(n, -1);
    int lowest_unassigned = -1;
    for (int i = 0; i < n; ++i) {
      if (reviewer_of[i] < 0) {
        lowest_unassigned = i;
        break;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (reviewer_of[i] < 0) {
        for (int r : sigma[i]) {
          if (load[r] == 0) {
            target[i] = r;
            break;
          }
        }
      } else if (lowest_unassigned >= 0) {
        target[i] = lowest_unassigned;
      }
    }
    // All cycles; pick the one containing the smallest on-cycle agent.
    std::vector<std::vector<int>> cycles;
    std::vector<int> color(n, 0);
    for (int s = 0; s < n; ++s) {
      if (color[s]) continue;
      std::vector<int> walk;
      int u = s;
      while (u >= 0 && color[u] == 0) {
        color[u] = 1;
        walk.push_back(u);
        u = target[u];
      }
      if (u >= 0 && color[u] == 1) {
        auto it = std::find(walk.begin(), walk.end(), u);
        std::vector<int> cyc(it, walk.end());
        std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()),
                    cyc.end());
        cycles.push_back(std::move(cyc));
      }
      for (int v : walk) color[v] = 2;
    }
    if (cycles.empty()) break;
    const auto& cyc = *std::min_element(
        cycles.begin(), cycles.end(),
        [](const auto& a, const auto& b) { return a[0] < b[0]; });
    for (std::size_t t = 0; t < cyc.size(); ++t) {
      int i = cyc[t];
      if (reviewer_of[i] >= 0) continue;  // bridges give nothing away
      int to = target[i];
      reviewer_of[i] = to;
      ++load[to];
    }
  }
  TtcOracleResult out;
  out.reviewer_of = reviewer_of;
  for (int i = 0; i < n; ++i) {
    if (reviewer_of[i] < 0) out.stuck_agents.push_back(i);
  }
  return out;
}

namespace {

// Enumerates restricted assignments of `members`' papers inside the
// coalition, reporting each member-utility vector.
void coalition_assignments(const Instance& inst, const std::vector<int>& members,
                           const std::function<void(const std::vector<Score>&)>& fn) {
  const int c = static_cast<int>(members.size());
  std::vector<int> caps(c, inst.k_a());
  std::vector<Score> after(c, 0);
  std::function<void(int)> per_paper = [&](int t) {
    if (t == c) {
      fn(after);
      return;
    }
    const int paper = members[t];
    std::vector<int> picked;
    std::function<void(int, int, Score)> choose = [&](int from, int need, Score sum) {
      if (need == 0) {
        for (int s : picked) --caps[s];
        after[t] = sum;
        per_paper(t + 1);
        for (int s : picked) ++caps[s];
        return;
      }
      for (int s = from; s <= c - need; ++s) {
        if (s == t || caps[s] == 0) continue;
        picked.push_back(s);
        choose(s + 1, need - 1, sum + inst.score(members[s], paper));
        picked.pop_back();
      }
    };
    choose(0, inst.k_p(), 0);
  };
  per_paper(0);
}

}  // namespace

BruteAudit brute_core_audit(const Instance& inst, const Assignment& asg) {
  const int n = inst.agents();
  std::vector<Score> before = compute_utilities(inst, asg).agent_utility;
  BruteAudit out;
  double best_alpha = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) < inst.k_p() + 1) continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    bool all_zero = true, all_positive = true;
    for (int i : members) {
      all_zero = all_zero && before[i] == 0;
      all_positive = all_positive && before[i] > 0;
    }
    bool violated_here = false;
    double coalition_alpha = 0;
    coalition_assignments(inst, members, [&](const std::vector<Score>& after) {
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < members.size(); ++t) {
        if (after[t] <= before[members[t]]) return;
        if (before[members[t]] > 0) {
          worst = std::min(worst, static_cast<double>(after[t]) /
                                      static_cast<double>(before[members[t]]));
        }
      }
      violated_here = true;
      if (all_positive) coalition_alpha = std::max(coalition_alpha, worst);
    });
    if (violated_here) {
      out.violated = true;
      out.largest_group = std::max(out.largest_group,
                                   static_cast<int>(members.size()));
      if (all_zero) out.unbounded = true;
      if (all_positive) best_alpha = std::max(best_alpha, coalition_alpha);
    }
  }
  if (best_alpha > 0) out.alpha = best_alpha;
  return out;
}

}  // namespace cobra::testing
