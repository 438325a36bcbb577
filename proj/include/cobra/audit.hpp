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

#ifndef COBRA_AUDIT_HPP
#define COBRA_AUDIT_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cobra/model.hpp"

namespace cobra {

// Deviation auditing asks whether some group of authors could leave with
// their papers and re-assign the reviews among themselves so that every
// member's paper ends up with a strictly better reviewer panel (by total
// similarity).  All audit entry points require a valid, scored instance
// where every agent has exactly one submission, and a valid assignment;
// they throw std::invalid_argument otherwise.

// A group that can deviate: the coalition, the reviewing relation it would
// implement internally, and each member's utility before/after.
struct DeviationWitness {
  std::vector<int> coalition;  // ascending agent ids
  Assignment restricted;       // full-shape; pairs only within the coalition
  std::vector<Score> utility_before;  // aligned with `coalition`
  std::vector<Score> utility_after;
};

struct AuditReport {
  enum class Exactness { kExact, kHeuristicLowerBound, kForcedScanOnly };
  bool violated = false;
  bool unbounded = false;  // some all-zero-utility group reaches all-positive
  // Largest factor by which some group multiplies every member's utility;
  // present only for groups whose members all start with positive utility.
  std::optional<double> alpha_star;
  std::optional<DeviationWitness> witness;
  int largest_group = 0;  // max coalition size over all witnesses found
  Exactness exactness = Exactness::kExact;
};

// Empty string when the witness certifies a deviation; otherwise the first
// failed check (coalition size, restricted validity, strict improvement).
std::string verify_witness(const Instance& inst, const Assignment& asg,
                           const DeviationWitness& w);

// Complete enumeration of coalitions of size exactly k_p+1.  At that size
// the internal assignment is forced (every member reviews every other
// member's paper), so the scan is exact for this coalition size.  May be
// large on dense violation sets; the heuristic audit streams it instead.
std::vector<DeviationWitness> forced_coalition_scan(const Instance& inst,
                                                    const Assignment& asg);

// Exhaustive audit over all coalition sizes via depth-first search with
// per-member improvement pruning.  Exponential in the number of agents;
// refuses instances above `max_agents`.
AuditReport exact_audit(const Instance& inst, const Assignment& asg,
                        int max_agents = 16);

// Largest alpha such that feasible_at(alpha) holds, located by bisection to
// an absolute tolerance of 1e-3.  feasible_at must be monotone
// (non-increasing in alpha) and true at 1; throws std::logic_error
// otherwise.  The cap comes from the best conceivable reviewer panel of
// any positive-utility author.
double alpha_bisection(const Instance& inst, const Assignment& asg,
                       const std::function<bool(double)>& feasible_at);

// Forced-coalition scan followed by greedy coalition growth: the most
// promising seed groups are extended one agent at a time, re-assigning each
// candidate group by a small utilitarian matching and keeping the agent
// that maximizes the group's minimum improvement factor.  Sound (every
// reported witness verifies) but a negative answer proves nothing.
AuditReport heuristic_audit(const Instance& inst, const Assignment& asg,
                            int growth_cap = 20);

// The scan alone, wrapped as a report (the cheap audit mode).
AuditReport forced_scan_audit(const Instance& inst, const Assignment& asg);

}  // namespace cobra

#endif  // COBRA_AUDIT_HPP
