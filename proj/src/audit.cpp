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

#include "cobra/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cobra/baselines.hpp"

namespace cobra {

namespace {

constexpr double kInfFactor = std::numeric_limits<double>::infinity();

void require_audit_preconditions(const Instance& inst, const Assignment& asg) {
  auto iv = validate_instance(inst);
  if (!iv.empty()) throw std::invalid_argument("invalid instance: " + iv.front());
  if (!inst.has_scores()) {
    throw std::invalid_argument("audit requires similarity scores");
  }
  for (int i = 0; i < inst.agents(); ++i) {
    if (inst.submissions(i) != 1) {
      throw std::invalid_argument(
          "audit supports single-submission agents only");
    }
  }
  auto av = validate_assignment(inst, asg);
  if (!av.empty()) throw std::invalid_argument("invalid assignment: " + av.front());
}

// With one submission per agent, agent i's paper is global paper i.
std::vector<Score> author_utilities(const Instance& inst, const Assignment& asg) {
  return compute_utilities(inst, asg).agent_utility;
}

// Minimum improvement factor across members; +inf when a zero-utility
// member improves, 0 when anyone fails to improve.
double min_factor(const std::vector<Score>& before, const std::vector<Score>& after) {
  double worst = kInfFactor;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (after[i] <= before[i]) return 0.0;
    if (before[i] > 0) {
      worst = std::min(worst, static_cast<double>(after[i]) /
                                  static_cast<double>(before[i]));
    }
  }
  return worst;
}

DeviationWitness make_witness(const Instance& inst,
                              const std::vector<Score>& utilities,
                              std::vector<int> members, Assignment restricted) {
  DeviationWitness w;
  w.coalition = std::move(members);
  w.utility_before.reserve(w.coalition.size());
  w.utility_after.reserve(w.coalition.size());
  for (int a : w.coalition) {
    w.utility_before.push_back(utilities[a]);
    Score after = 0;
    for (int r : restricted.reviewers_of(a)) after += inst.score(r, a);
    w.utility_after.push_back(after);
  }
  w.restricted = std::move(restricted);
  return w;
}

// Per-coalition witness search: one paper per member, choose k_p coalition
// reviewers per paper subject to loads, with the paper's reviewer-score sum
// strictly above `floor[i]` and at least `at_least[i]`.
class CoalitionSearch {
 public:
  CoalitionSearch(const Instance& inst, std::vector<int> members)
      : inst_(inst), members_(std::move(members)) {
    const int c = static_cast<int>(members_.size());
    order_.resize(c);
    scores_.resize(c);
    for (int t = 0; t < c; ++t) {
      int paper = members_[t];  // global paper id == author id
      auto& ord = order_[t];
      for (int s = 0; s < c; ++s) {
        if (s != t) ord.push_back(s);
      }
      std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        Score sa = inst_.score(members_[a], paper);
        Score sb = inst_.score(members_[b], paper);
        if (sa != sb) return sa > sb;
        return members_[a] < members_[b];
      });
      auto& sc = scores_[t];
      sc.reserve(ord.size());
      for (int s : ord) sc.push_back(inst_.score(members_[s], paper));
    }
  }

  bool find(const std::vector<Score>& floor, const std::vector<long double>& at_least,
            Assignment* out) {
    floor_ = &floor;
    at_least_ = &at_least;
    caps_.assign(members_.size(), inst_.k_a());
    chosen_.assign(members_.size(), {});
    if (!dfs(0)) return false;
    if (out) {
      *out = Assignment(inst_.agents(), inst_.papers());
      for (std::size_t t = 0; t < members_.size(); ++t) {
        for (int s : chosen_[t]) out->add(members_[s], members_[t]);
      }
    }
    return true;
  }

 private:
  const Instance& inst_;
  std::vector<int> members_;
  std::vector<std::vector<int>> order_;    // member positions, score desc
  std::vector<std::vector<Score>> scores_;
  const std::vector<Score>* floor_ = nullptr;
  const std::vector<long double>* at_least_ = nullptr;
  std::vector<int> caps_;
  std::vector<std::vector<int>> chosen_;
  std::vector<int> picked_;

  bool target_ok(int t, Score sum) const {
    return sum > (*floor_)[t] &&
           static_cast<long double>(sum) >= (*at_least_)[t];
  }

  // Capacity-aware optimistic sum for papers t..end.
  bool remaining_ok(std::size_t t) const {
    for (std::size_t q = t; q < members_.size(); ++q) {
      Score top = 0;
      int got = 0;
      for (std::size_t e = 0; e < order_[q].size() && got < inst_.k_p(); ++e) {
        if (caps_[order_[q][e]] > 0) {
          top += scores_[q][e];
          ++got;
        }
      }
      if (got < inst_.k_p() || !target_ok(static_cast<int>(q), top)) return false;
    }
    return true;
  }

  bool dfs(std::size_t t) {
    if (t == members_.size()) return true;
    if (!remaining_ok(t)) return false;
    picked_.clear();
    return pick(t, 0, 0, 0);
  }

  bool pick(std::size_t t, int depth, std::size_t start, Score sum) {
    const int need = inst_.k_p() - depth;
    if (need == 0) {
      if (!target_ok(static_cast<int>(t), sum)) return false;
      for (int s : picked_) --caps_[s];
      chosen_[t] = picked_;
      std::vector<int> saved = picked_;
      bool ok = dfs(t + 1);
      picked_ = std::move(saved);
      if (!ok) {
        for (int s : picked_) ++caps_[s];
      }
      return ok;
    }
    const auto& ord = order_[t];
    for (std::size_t e = start; e < ord.size(); ++e) {
      if (caps_[ord[e]] == 0) continue;
      // Optimistic completion: this entry plus the best available after it.
      Score opt = sum + scores_[t][e];
      int got = 0;
      for (std::size_t f = e + 1; f < ord.size() && got < need - 1; ++f) {
        if (caps_[ord[f]] > 0) {
          opt += scores_[t][f];
          ++got;
        }
      }
      if (got < need - 1) break;  // availability only shrinks with e
      if (!target_ok(static_cast<int>(t), opt)) break;  // scores descend
      picked_.push_back(ord[e]);
      if (pick(t, depth + 1, e + 1, sum + scores_[t][e])) return true;
      picked_.pop_back();
    }
    return false;
  }
};

// Streams every coalition of size k_p+1 with its forced internal
// assignment; fn(members, after) is called for each (after = per-member
// utility under the deviation).  Returns early when fn returns false.
void scan_forced_coalitions(
    const Instance& inst,
    const std::function<bool(const std::vector<int>&, const std::vector<Score>&)>& fn) {
  const int n = inst.agents();
  const int c = inst.k_p() + 1;
  if (c > n) return;
  std::vector<int> members(c);
  std::vector<Score> after(c);
  std::iota(members.begin(), members.end(), 0);
  for (;;) {
    for (int i = 0; i < c; ++i) {
      Score s = 0;
      for (int j = 0; j < c; ++j) {
        if (j != i) s += inst.score(members[j], members[i]);
      }
      after[i] = s;
    }
    if (!fn(members, after)) return;
    // next combination
    int i = c - 1;
    while (i >= 0 && members[i] == n - c + i) --i;
    if (i < 0) break;
    ++members[i];
    for (int j = i + 1; j < c; ++j) members[j] = members[j - 1] + 1;
  }
}

Assignment forced_assignment(const Instance& inst, const std::vector<int>& members) {
  Assignment a(inst.agents(), inst.papers());
  for (int i : members) {
    for (int j : members) {
      if (i != j) a.add(j, i);
    }
  }
  return a;
}

// Restricted instance over a coalition, with rankings re-derived from the
// score submatrix.  Member t authors paper t.
Instance sub_instance(const Instance& inst, const std::vector<int>& members) {
  const int c = static_cast<int>(members.size());
  ScoreMatrix s(c, c);
  for (int r = 0; r < c; ++r) {
    for (int j = 0; j < c; ++j) s.at(r, j) = inst.score(members[r], members[j]);
  }
  std::vector<int> authors(c);
  std::iota(authors.begin(), authors.end(), 0);
  auto per_paper = rankings_from_scores(s, authors);
  std::vector<std::vector<std::vector<int>>> rankings(c);
  for (int i = 0; i < c; ++i) rankings[i] = {per_paper[i]};
  return Instance(inst.k_p(), inst.k_a(), std::vector<int>(c, 1),
                  std::move(rankings), std::move(s));
}

}  // namespace

std::string verify_witness(const Instance& inst, const Assignment& asg,
                           const DeviationWitness& w) {
  require_audit_preconditions(inst, asg);
  if (w.coalition.empty() ||
      !std::is_sorted(w.coalition.begin(), w.coalition.end()) ||
      std::adjacent_find(w.coalition.begin(), w.coalition.end()) != w.coalition.end() ||
      w.coalition.front() < 0 || w.coalition.back() >= inst.agents()) {
    throw std::invalid_argument("malformed coalition");
  }
  if (static_cast<int>(w.coalition.size()) <= inst.k_p()) {
    return "coalition of size " + std::to_string(w.coalition.size()) +
           " cannot completely assign its papers (needs more than k_p = " +
           std::to_string(inst.k_p()) + " members)";
  }
  std::vector<char> member(inst.agents(), 0);
  for (int a : w.coalition) member[a] = 1;
  for (auto [r, p] : w.restricted.pairs()) {
    if (!member[r] || !member[inst.author_of(p)]) {
      return "restricted assignment touches agents outside the coalition";
    }
    if (r == inst.author_of(p)) {
      return "member " + std::to_string(r + 1) + " reviews her own paper";
    }
  }
  for (int a : w.coalition) {
    if (w.restricted.coverage(a) != inst.k_p()) {
      return "paper of member " + std::to_string(a + 1) + " has " +
             std::to_string(w.restricted.coverage(a)) + " reviewers, needs " +
             std::to_string(inst.k_p());
    }
    if (w.restricted.load(a) > inst.k_a()) {
      return "member " + std::to_string(a + 1) + " exceeds her review capacity";
    }
  }
  std::vector<Score> utilities = author_utilities(inst, asg);
  for (int a : w.coalition) {
    Score after = 0;
    for (int r : w.restricted.reviewers_of(a)) after += inst.score(r, a);
    if (after <= utilities[a]) {
      return "member " + std::to_string(a + 1) + " does not strictly improve";
    }
  }
  return "";
}

std::vector<DeviationWitness> forced_coalition_scan(const Instance& inst,
                                                    const Assignment& asg) {
  require_audit_preconditions(inst, asg);
  std::vector<Score> utilities = author_utilities(inst, asg);
  std::vector<DeviationWitness> out;
  scan_forced_coalitions(
      inst,
      [&](const std::vector<int>& members, const std::vector<Score>& after) {
        bool strict = true;
        for (std::size_t i = 0; i < members.size(); ++i) {
          if (after[i] <= utilities[members[i]]) {
            strict = false;
            break;
          }
        }
        if (strict) {
          out.push_back(make_witness(inst, utilities, members,
                                     forced_assignment(inst, members)));
        }
        return true;
      });
  return out;
}

double alpha_bisection(const Instance& inst, const Assignment& asg,
                       const std::function<bool(double)>& feasible_at) {
  require_audit_preconditions(inst, asg);
  std::vector<Score> utilities = author_utilities(inst, asg);
  double cap = 1.0;
  for (int i = 0; i < inst.agents(); ++i) {
    if (utilities[i] <= 0) continue;
    Score best = 0;
    for (int r = 0; r < inst.agents(); ++r) {
      if (r != i) best = std::max(best, inst.score(r, i));
    }
    double reach = static_cast<double>(inst.k_p()) * static_cast<double>(best) /
                   static_cast<double>(utilities[i]);
    cap = std::max(cap, reach);
  }
  if (!feasible_at(1.0)) {
    throw std::logic_error("alpha_bisection called without a bounded violation");
  }
  if (feasible_at(cap)) return cap;
  double lo = 1.0, hi = cap;
  while (hi - lo > 1e-3) {
    double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

AuditReport exact_audit(const Instance& inst, const Assignment& asg,
                        int max_agents) {
  require_audit_preconditions(inst, asg);
  const int n = inst.agents();
  if (n > max_agents) {
    throw std::invalid_argument(
        "exact_audit is exponential and capped at " + std::to_string(max_agents) +
        " agents (got " + std::to_string(n) + "); use heuristic_audit");
  }
  std::vector<Score> utilities = author_utilities(inst, asg);

  AuditReport rep;
  rep.exactness = AuditReport::Exactness::kExact;
  std::vector<std::vector<int>> positive_violators;
  std::optional<DeviationWitness> fallback;
  const std::vector<long double> zeros_ld(n, 0.0L);

  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) < inst.k_p() + 1) continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    std::vector<Score> floor(members.size());
    std::vector<long double> at_least(members.size(), 0.0L);
    bool all_zero = true, all_positive = true;
    for (std::size_t t = 0; t < members.size(); ++t) {
      floor[t] = utilities[members[t]];
      all_zero = all_zero && floor[t] == 0;
      all_positive = all_positive && floor[t] > 0;
    }
    CoalitionSearch search(inst, members);
    Assignment found;
    if (!search.find(floor, at_least, &found)) continue;

    rep.violated = true;
    rep.largest_group = std::max(rep.largest_group,
                                 static_cast<int>(members.size()));
    if (all_zero) rep.unbounded = true;
    if (all_positive) positive_violators.push_back(members);
    if (!fallback) {
      fallback = make_witness(inst, utilities, members, std::move(found));
    }
  }

  if (!positive_violators.empty()) {
    std::optional<DeviationWitness> best;
    auto oracle = [&](double alpha) {
      for (const auto& members : positive_violators) {
        std::vector<Score> floor(members.size());
        std::vector<long double> at_least(members.size());
        for (std::size_t t = 0; t < members.size(); ++t) {
          floor[t] = utilities[members[t]];
          at_least[t] = static_cast<long double>(alpha) *
                        static_cast<long double>(floor[t]);
        }
        CoalitionSearch search(inst, members);
        Assignment found;
        if (search.find(floor, at_least, &found)) {
          best = make_witness(inst, utilities, members, std::move(found));
          return true;
        }
      }
      return false;
    };
    rep.alpha_star = alpha_bisection(inst, asg, oracle);
    rep.witness = std::move(best);
  }
  if (!rep.witness) rep.witness = std::move(fallback);
  return rep;
}

AuditReport forced_scan_audit(const Instance& inst, const Assignment& asg) {
  require_audit_preconditions(inst, asg);
  std::vector<Score> utilities = author_utilities(inst, asg);
  AuditReport rep;
  rep.exactness = AuditReport::Exactness::kForcedScanOnly;
  double best_bounded = 0.0;
  std::vector<int> best_members;
  scan_forced_coalitions(
      inst,
      [&](const std::vector<int>& members, const std::vector<Score>& after) {
        std::vector<Score> before(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
          before[i] = utilities[members[i]];
        }
        double factor = min_factor(before, after);
        if (factor <= 1.0) return true;  // not a strict all-around improvement
        rep.violated = true;
        rep.largest_group = static_cast<int>(members.size());
        bool all_positive = std::all_of(before.begin(), before.end(),
                                        [](Score s) { return s > 0; });
        if (factor == kInfFactor) {
          // Infinite only when every member starts at zero utility.
          rep.unbounded = true;
          if (!rep.witness && best_members.empty()) {
            rep.witness = make_witness(inst, utilities, members,
                                       forced_assignment(inst, members));
          }
        } else if (all_positive && factor > best_bounded) {
          // Groups with any zero-utility member belong to the unbounded
          // check, never to the bounded factor.
          best_bounded = factor;
          best_members = members;
        } else if (!rep.witness && best_members.empty()) {
          rep.witness = make_witness(inst, utilities, members,
                                     forced_assignment(inst, members));
        }
        return true;
      });
  if (!best_members.empty()) {
    rep.alpha_star = best_bounded;
    rep.witness = make_witness(inst, utilities, best_members,
                               forced_assignment(inst, best_members));
  }
  return rep;
}

AuditReport heuristic_audit(const Instance& inst, const Assignment& asg,
                            int growth_cap) {
  require_audit_preconditions(inst, asg);
  const int n = inst.agents();
  std::vector<Score> utilities = author_utilities(inst, asg);

  AuditReport rep;
  rep.exactness = AuditReport::Exactness::kHeuristicLowerBound;

  // Stage 1: stream the complete scan at size k_p+1, remembering the most
  // promising seeds (witnesses or not) for growth.
  constexpr int kSeedCount = 10;
  struct Seed {
    std::vector<int> members;
    double factor;
  };
  std::vector<Seed> seeds;
  double best_alpha = 0.0;
  std::optional<DeviationWitness> best_witness;
  std::optional<std::vector<int>> unbounded_members;
  std::optional<std::vector<int>> fallback_members;

  scan_forced_coalitions(
      inst,
      [&](const std::vector<int>& members, const std::vector<Score>& after) {
        std::vector<Score> before(members.size());
        bool all_zero = true;
        for (std::size_t i = 0; i < members.size(); ++i) {
          before[i] = utilities[members[i]];
          all_zero &= before[i] == 0;
        }
        double factor = min_factor(before, after);
        bool all_positive = std::all_of(before.begin(), before.end(),
                                        [](Score s) { return s > 0; });
        if (factor > 1.0) {
          rep.violated = true;
          rep.largest_group = std::max(rep.largest_group,
                                       static_cast<int>(members.size()));
          if (factor == kInfFactor) {
            if (all_zero) {
              rep.unbounded = true;
              if (!unbounded_members) unbounded_members = members;
            }
          } else if (all_positive && factor > best_alpha) {
            best_alpha = factor;
            best_witness = make_witness(inst, utilities, members,
                                        forced_assignment(inst, members));
          } else if (!fallback_members) {
            fallback_members = members;
          }
        }
        // Seed ranking treats an unbounded factor as the strongest.
        if (static_cast<int>(seeds.size()) < kSeedCount) {
          seeds.push_back({members, factor});
          std::sort(seeds.begin(), seeds.end(),
                    [](const Seed& a, const Seed& b) { return a.factor > b.factor; });
        } else if (factor > seeds.back().factor) {
          seeds.back() = {members, factor};
          std::sort(seeds.begin(), seeds.end(),
                    [](const Seed& a, const Seed& b) { return a.factor > b.factor; });
        }
        return true;
      });

  // Stage 2: grow each seed, re-assigning the candidate group with the
  // small utilitarian matcher and keeping the best minimum factor.
  auto evaluate = [&](const std::vector<int>& members)
      -> std::pair<double, Assignment> {
    Instance sub = sub_instance(inst, members);
    Assignment local = assign_max_usw(sub);
    UtilityReport rep_local = compute_utilities(sub, local);
    std::vector<Score> before(members.size());
    std::vector<Score> after(members.size());
    for (std::size_t t = 0; t < members.size(); ++t) {
      before[t] = utilities[members[t]];
      after[t] = rep_local.agent_utility[t];
    }
    // Translate back to full-instance indexing.
    Assignment full(inst.agents(), inst.papers());
    for (auto [r, p] : local.pairs()) full.add(members[r], members[p]);
    return {min_factor(before, after), std::move(full)};
  };

  for (const Seed& seed : seeds) {
    std::vector<int> members = seed.members;
    while (static_cast<int>(members.size()) < std::min(growth_cap, n)) {
      double best_factor = -1.0;
      int best_agent = -1;
      Assignment best_restricted;
      for (int a = 0; a < n; ++a) {
        if (std::binary_search(members.begin(), members.end(), a)) continue;
        std::vector<int> grown = members;
        grown.insert(std::upper_bound(grown.begin(), grown.end(), a), a);
        auto [factor, restricted] = evaluate(grown);
        if (factor > best_factor) {
          best_factor = factor;
          best_agent = a;
          best_restricted = std::move(restricted);
        }
      }
      if (best_agent < 0) break;
      members.insert(std::upper_bound(members.begin(), members.end(), best_agent),
                     best_agent);
      if (best_factor > 1.0) {
        rep.violated = true;
        rep.largest_group = std::max(rep.largest_group,
                                     static_cast<int>(members.size()));
        bool all_positive = std::all_of(
            members.begin(), members.end(),
            [&](int m) { return utilities[m] > 0; });
        if (best_factor == kInfFactor) {
          rep.unbounded = true;
          if (!unbounded_members) unbounded_members = members;
        } else if (all_positive && best_factor > best_alpha) {
          best_alpha = best_factor;
          best_witness = make_witness(inst, utilities, members,
                                      std::move(best_restricted));
        }
      }
    }
  }

  if (best_alpha > 1.0) rep.alpha_star = best_alpha;
  if (best_witness) {
    rep.witness = std::move(best_witness);
  } else if (unbounded_members) {
    rep.witness = make_witness(inst, utilities, *unbounded_members,
                               forced_assignment(inst, *unbounded_members));
  } else if (fallback_members) {
    rep.witness = make_witness(inst, utilities, *fallback_members,
                               forced_assignment(inst, *fallback_members));
  }
  return rep;
}

}  // namespace cobra
