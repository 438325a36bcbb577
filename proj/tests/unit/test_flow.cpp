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

#include <random>

#include "cobra/flow.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cobra;
using namespace cobra::testing;

TEST_SUITE("flow") {

TEST_CASE("min-cost flow solves a small known transportation problem") {
  // Two sources of 1 unit each, two sinks, costs chosen so the cross
  // pairing wins: (a->y)=1, (a->x)=4, (b->x)=1, (b->y)=4.
  MinCostFlow f(6);
  int s = 0, t = 5;
  f.add_arc(s, 1, 1, 0);
  f.add_arc(s, 2, 1, 0);
  int ax = f.add_arc(1, 3, 1, 4);
  int ay = f.add_arc(1, 4, 1, 1);
  int bx = f.add_arc(2, 3, 1, 1);
  int by = f.add_arc(2, 4, 1, 4);
  f.add_arc(3, t, 1, 0);
  f.add_arc(4, t, 1, 0);
  auto [flow, cost] = f.solve(s, t);
  CHECK(flow == 2);
  CHECK(cost == 2);
  CHECK(f.flow_on(ay) == 1);
  CHECK(f.flow_on(bx) == 1);
  CHECK(f.flow_on(ax) == 0);
  CHECK(f.flow_on(by) == 0);
}

TEST_CASE("min-cost flow respects the flow limit") {
  MinCostFlow f(3);
  f.add_arc(0, 1, 10, 1);
  f.add_arc(1, 2, 10, 1);
  auto [flow, cost] = f.solve(0, 2, 4);
  CHECK(flow == 4);
  CHECK(cost == 8);
}

TEST_CASE("min-cost flow matches brute force on random bipartite problems") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 40; ++rep) {
    // Random 3x3..4x4 assignment problems with unit demands.
    int n = 3 + static_cast<int>(uniform_below(rng, 2));
    std::vector<std::vector<long long>> w(n, std::vector<long long>(n));
    for (auto& row : w) {
      for (auto& x : row) x = static_cast<long long>(uniform_below(rng, 100));
    }
    // Brute force over permutations (maximize).
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    long long best = -1;
    do {
      long long sum = 0;
      for (int i = 0; i < n; ++i) sum += w[i][perm[i]];
      best = std::max(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Flow: maximize == minimize (100 - w).
    MinCostFlow f(2 + 2 * n);
    for (int i = 0; i < n; ++i) f.add_arc(0, 2 + i, 1, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) f.add_arc(2 + i, 2 + n + j, 1, 100 - w[i][j]);
    }
    for (int j = 0; j < n; ++j) f.add_arc(2 + n + j, 1, 1, 0);
    auto [flow, cost] = f.solve(0, 1);
    CHECK(flow == n);
    CHECK(100LL * n - cost == best);
  }
}

TEST_CASE("kuhn matching finds maximum matchings (exhaustive check)") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    int l = 2 + static_cast<int>(uniform_below(rng, 4));
    int r = 2 + static_cast<int>(uniform_below(rng, 4));
    std::vector<std::vector<int>> adj(l);
    for (int i = 0; i < l; ++i) {
      for (int j = 0; j < r; ++j) {
        if (uniform_below(rng, 3) == 0) adj[i].push_back(j);
      }
    }
    std::vector<int> match;
    int got = max_bipartite_matching(adj, r, &match);
    // Exhaustive: try all subsets of left nodes in all right orders, via
    // simple recursion over left nodes.
    std::vector<int> taken(r, -1);
    int best = 0;
    std::function<void(int, int)> rec = [&](int i, int size) {
      best = std::max(best, size);
      if (i == l) return;
      rec(i + 1, size);
      for (int j : adj[i]) {
        if (taken[j] < 0) {
          taken[j] = i;
          rec(i + 1, size + 1);
          taken[j] = -1;
        }
      }
    };
    rec(0, 0);
    CHECK(got == best);
    // No augmenting path remains: re-running changes nothing.
    int matched = 0;
    for (int j = 0; j < r; ++j) matched += match[j] >= 0;
    CHECK(matched == got);
  }
}

TEST_CASE("b-matching feasibility agrees with a capacity argument") {
  // 3 papers needing 2 reviewers each from 3 reviewers of capacity 2
  // works; capacity 1 cannot.
  std::vector<std::vector<int>> eligible = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  std::vector<int> demand = {2, 2, 2};
  CHECK(b_matching_feasible(eligible, demand, {2, 2, 2}));
  CHECK_FALSE(b_matching_feasible(eligible, demand, {1, 1, 1}));
  // A paper with too few eligible reviewers fails regardless of capacity.
  CHECK_FALSE(b_matching_feasible({{0}}, {2}, {5, 5}));
}

}  // TEST_SUITE
