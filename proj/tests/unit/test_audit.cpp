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

#include <cmath>
#include <random>
#include <stdexcept>

#include "cobra/audit.hpp"
#include "cobra/baselines.hpp"
#include "cobra/cobra.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cobra;
using namespace cobra::testing;

TEST_SUITE("audit") {

TEST_CASE("the 4-agent fixture: pair {1,2} deviates with factor 3") {
  Instance inst = adversarial4_instance();
  Assignment asg = adversarial4_optimal();
  // The fixture assignment is the USW optimum (checked by enumeration).
  BruteWelfare brute = brute_welfare(inst);
  CHECK(compute_utilities(inst, asg).usw == brute.max_usw);
  CHECK(asg == assign_max_usw(inst));

  auto witnesses = forced_coalition_scan(inst, asg);
  REQUIRE(witnesses.size() == 1);
  CHECK(witnesses[0].coalition == std::vector<int>{0, 1});
  CHECK(witnesses[0].utility_before == std::vector<Score>{200'000'000, 300'000'000});
  CHECK(witnesses[0].utility_after == std::vector<Score>{900'000'000, 900'000'000});
  CHECK(verify_witness(inst, asg, witnesses[0]).empty());

  BruteAudit oracle = brute_core_audit(inst, asg);
  CHECK(oracle.violated);
  CHECK_FALSE(oracle.unbounded);
  REQUIRE(oracle.alpha);
  CHECK(*oracle.alpha == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(oracle.largest_group == 2);

  AuditReport exact = exact_audit(inst, asg);
  CHECK(exact.violated);
  CHECK_FALSE(exact.unbounded);
  REQUIRE(exact.alpha_star);
  CHECK(std::abs(*exact.alpha_star - 3.0) <= 1e-3);
  CHECK(exact.largest_group == 2);
  CHECK(exact.exactness == AuditReport::Exactness::kExact);

  AuditReport heur = heuristic_audit(inst, asg);
  CHECK(heur.violated);
  REQUIRE(heur.alpha_star);
  CHECK(std::abs(*heur.alpha_star - 3.0) <= 1e-3);
  CHECK(heur.largest_group == 2);
  CHECK(heur.exactness == AuditReport::Exactness::kHeuristicLowerBound);
}

TEST_CASE("verify_witness rejects undersized coalitions") {
  Instance inst = adversarial4_instance();
  Assignment asg = adversarial4_optimal();
  DeviationWitness w;
  w.coalition = {0};  // size k_p = 1 cannot complete its paper
  w.restricted = Assignment(4, 4);
  std::string reason = verify_witness(inst, asg, w);
  CHECK(reason.find("cannot completely assign") != std::string::npos);
}

TEST_CASE("verify_witness rejects non-strict improvements") {
  Instance inst = adversarial4_instance();
  Assignment asg = adversarial4_optimal();
  DeviationWitness w;
  w.coalition = {0, 2};  // p1 <- 3 keeps agent 1's utility at 0.2
  w.restricted = Assignment(4, 4);
  w.restricted.add(2, 0);
  w.restricted.add(0, 2);
  std::string reason = verify_witness(inst, asg, w);
  CHECK(reason.find("does not strictly improve") != std::string::npos);
}

TEST_CASE("verify_witness rejects invalid restricted assignments") {
  Instance inst = adversarial4_instance();
  Assignment asg = adversarial4_optimal();
  DeviationWitness w;
  w.coalition = {0, 1};
  w.restricted = Assignment(4, 4);
  w.restricted.add(1, 0);  // p2 left unassigned
  std::string reason = verify_witness(inst, asg, w);
  CHECK(reason.find("needs") != std::string::npos);

  DeviationWitness outside;
  outside.coalition = {0, 1};
  outside.restricted = Assignment(4, 4);
  outside.restricted.add(1, 0);
  outside.restricted.add(2, 1);  // reviewer 3 is not a member
  CHECK(verify_witness(inst, asg, outside).find("outside") != std::string::npos);
}

TEST_CASE("n = k_p+1: the full coalition cannot improve on the forced assignment") {
  std::mt19937_64 rng(12);
  InstanceSpec spec;
  spec.min_n = spec.max_n = 3;
  spec.k_p_choices = {2};
  spec.allow_double_capacity = false;
  spec.with_scores = true;
  Instance inst = random_instance(spec, rng);
  Assignment asg = run_cobra(inst);
  CHECK(forced_coalition_scan(inst, asg).empty());
  AuditReport rep = exact_audit(inst, asg);
  CHECK_FALSE(rep.violated);
  CHECK_FALSE(rep.unbounded);
  CHECK_FALSE(rep.alpha_star.has_value());
  CHECK(rep.largest_group == 0);
}

TEST_CASE("unbounded violation: zero-utility authors reach positive scores") {
  // Assignment gives everyone 0; agents 1 and 2 score 0.5 for each other.
  ScoreMatrix s(4, 4);
  s.at(1, 0) = 500'000'000;
  s.at(0, 1) = 500'000'000;
  auto per_paper = rankings_from_scores(s, {0, 1, 2, 3});
  std::vector<std::vector<std::vector<int>>> rankings(4);
  for (int i = 0; i < 4; ++i) rankings[i] = {per_paper[i]};
  Instance inst(1, 1, std::vector<int>(4, 1), std::move(rankings), s);
  Assignment asg = assignment_from_pairs(inst, {{2, 0}, {3, 1}, {0, 2}, {1, 3}});
  REQUIRE(validate_assignment(inst, asg).empty());
  AuditReport rep = exact_audit(inst, asg);
  CHECK(rep.violated);
  CHECK(rep.unbounded);
  CHECK_FALSE(rep.alpha_star.has_value());
  BruteAudit oracle = brute_core_audit(inst, asg);
  CHECK(oracle.unbounded);
  AuditReport heur = heuristic_audit(inst, asg);
  CHECK(heur.violated);
  CHECK(heur.unbounded);
}

TEST_CASE("mixed coalitions violate but contribute no bounded factor") {
  // Agents 1 and 2 can deviate together, but agent 1 starts at zero
  // utility: the group counts as a violation, not as a bounded factor and
  // not as unbounded (the members are not all at zero).
  ScoreMatrix s(4, 4);
  s.at(1, 0) = 500'000'000;  // 2 scores 0.5 for p1
  s.at(0, 1) = 600'000'000;  // 1 scores 0.6 for p2
  s.at(3, 1) = 400'000'000;  // 4 scores 0.4 for p2 (the current panel)
  auto per_paper = rankings_from_scores(s, {0, 1, 2, 3});
  std::vector<std::vector<std::vector<int>>> rankings(4);
  for (int i = 0; i < 4; ++i) rankings[i] = {per_paper[i]};
  Instance inst(1, 1, std::vector<int>(4, 1), std::move(rankings), s);
  Assignment asg = assignment_from_pairs(inst, {{2, 0}, {3, 1}, {0, 2}, {1, 3}});
  REQUIRE(validate_assignment(inst, asg).empty());

  BruteAudit oracle = brute_core_audit(inst, asg);
  CHECK(oracle.violated);
  CHECK_FALSE(oracle.unbounded);
  CHECK_FALSE(oracle.alpha.has_value());

  for (AuditReport rep :
       {exact_audit(inst, asg), heuristic_audit(inst, asg),
        forced_scan_audit(inst, asg)}) {
    CHECK(rep.violated);
    CHECK_FALSE(rep.unbounded);
    CHECK_FALSE(rep.alpha_star.has_value());
    CHECK(rep.largest_group == 2);
    REQUIRE(rep.witness.has_value());
    CHECK(verify_witness(inst, asg, *rep.witness).empty());
  }
}

TEST_CASE("alpha_bisection against stub oracles") {
  Instance inst = adversarial4_instance();
  Assignment asg = adversarial4_optimal();
  // Exact doubling: feasible iff alpha <= 2.
  double a = alpha_bisection(inst, asg, [](double x) { return x <= 2.0; });
  CHECK(std::abs(a - 2.0) <= 1e-3);
  // Two groups with factors 1.2 and 1.5: the max wins.
  double b = alpha_bisection(inst, asg,
                             [](double x) { return x <= 1.2 || x <= 1.5; });
  CHECK(std::abs(b - 1.5) <= 1e-3);
  // No bounded violation at all: a fault.
  CHECK_THROWS_AS(alpha_bisection(inst, asg, [](double) { return false; }),
                  std::logic_error);
}

TEST_CASE("exact_audit agrees with the naive oracle on random instances") {
  std::mt19937_64 rng(99);
  InstanceSpec spec;
  spec.min_n = 3;
  spec.max_n = 6;
  spec.k_p_choices = {1, 2};
  spec.with_scores = true;
  spec.rank_by_scores = true;
  for (int rep = 0; rep < 30; ++rep) {
    Instance inst = random_instance(spec, rng);
    // Audit the utilitarian optimum: it often violates the core.
    Assignment asg = assign_max_usw(inst);
    BruteAudit oracle = brute_core_audit(inst, asg);
    AuditReport rep2 = exact_audit(inst, asg);
    CHECK(rep2.violated == oracle.violated);
    CHECK(rep2.unbounded == oracle.unbounded);
    CHECK(rep2.largest_group == oracle.largest_group);
    CHECK(rep2.alpha_star.has_value() == oracle.alpha.has_value());
    if (rep2.alpha_star && oracle.alpha) {
      CHECK(std::abs(*rep2.alpha_star - *oracle.alpha) <= 1e-3);
    }
    if (rep2.witness) {
      CHECK(verify_witness(inst, asg, *rep2.witness).empty());
    }
  }
}

TEST_CASE("heuristic and exact audits agree on `violated` at small sizes") {
  std::mt19937_64 rng(123);
  InstanceSpec spec;
  spec.min_n = 3;
  spec.max_n = 8;
  spec.k_p_choices = {1, 2};
  spec.with_scores = true;
  spec.rank_by_scores = true;
  for (int rep = 0; rep < 40; ++rep) {
    Instance inst = random_instance(spec, rng);
    Assignment asg = assign_max_usw(inst);
    AuditReport exact = exact_audit(inst, asg);
    AuditReport heur = heuristic_audit(inst, asg, /*growth_cap=*/inst.agents());
    CHECK(exact.violated == heur.violated);
    if (heur.violated) {
      // Heuristic witnesses are sound, so alpha is a lower bound.
      if (heur.alpha_star && exact.alpha_star) {
        CHECK(*heur.alpha_star <= *exact.alpha_star + 1e-3);
      }
      CHECK(heur.largest_group <= exact.largest_group);
    }
    // Report invariants and witness soundness, both modes.
    for (const AuditReport* rep3 : {&exact, &heur}) {
      if (!rep3->violated) {
        CHECK_FALSE(rep3->unbounded);
        CHECK_FALSE(rep3->alpha_star.has_value());
      }
      if (rep3->alpha_star) CHECK(*rep3->alpha_star >= 1.0);
      if (rep3->witness) {
        CHECK(verify_witness(inst, asg, *rep3->witness).empty());
      }
    }
  }
}

TEST_CASE("cobra output audits clean (exact audit, scored rankings)") {
  std::mt19937_64 rng(314);
  InstanceSpec spec;
  spec.min_n = 4;
  spec.max_n = 8;
  spec.k_p_choices = {1, 2, 3};
  spec.with_scores = true;
  spec.rank_by_scores = true;
  spec.distinct_score_columns = true;
  for (int rep = 0; rep < 25; ++rep) {
    Instance inst = random_instance(spec, rng);
    Assignment asg = run_cobra(inst);
    CHECK(forced_coalition_scan(inst, asg).empty());
    AuditReport rep2 = exact_audit(inst, asg);
    CHECK_FALSE(rep2.violated);
  }
}

TEST_CASE("exact_audit refuses oversized instances") {
  std::mt19937_64 rng(1);
  InstanceSpec spec;
  spec.min_n = spec.max_n = 6;
  spec.with_scores = true;
  Instance inst = random_instance(spec, rng);
  Assignment asg = assign_max_usw(inst);
  CHECK_THROWS_AS(exact_audit(inst, asg, /*max_agents=*/4),
                  std::invalid_argument);
}

TEST_CASE("audits reject multi-submission instances") {
  std::mt19937_64 rng(2);
  InstanceSpec spec;
  spec.min_n = spec.max_n = 5;
  spec.k_p_choices = {1};
  spec.min_m_i = 2;
  spec.max_m_i = 2;
  spec.with_scores = true;
  Instance inst = random_instance(spec, rng);
  Assignment asg = assign_max_usw(inst);
  CHECK_THROWS_AS(exact_audit(inst, asg), std::invalid_argument);
}

}  // TEST_SUITE
