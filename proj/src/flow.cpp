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

#include "cobra/flow.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace cobra {

MinCostFlow::MinCostFlow(int nodes)
    : n_(nodes), out_(nodes), potential_(nodes, 0), dist_(nodes, 0),
      parent_arc_(nodes, -1) {}

int MinCostFlow::add_arc(int from, int to, long long cap, long long cost) {
  if (cost < 0) throw std::invalid_argument("negative arc cost");
  int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, cap, cost});
  arcs_.push_back({from, 0, -cost});
  out_[from].push_back(id);
  out_[to].push_back(id + 1);
  return id;
}

std::pair<long long, long long> MinCostFlow::solve(int s, int t,
                                                   long long limit) {
  long long flow = 0, cost = 0;
  std::fill(potential_.begin(), potential_.end(), 0);
  while (flow < limit) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
    dist_[s] = 0;
    using Entry = std::pair<long long, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    heap.push({0, s});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist_[u]) continue;
      for (int id : out_[u]) {
        const Arc& a = arcs_[id];
        if (a.cap <= 0) continue;
        long long nd = d + a.cost + potential_[u] - potential_[a.to];
        if (nd < dist_[a.to]) {
          dist_[a.to] = nd;
          parent_arc_[a.to] = id;
          heap.push({nd, a.to});
        }
      }
    }
    if (dist_[t] >= kInf) break;
    for (int v = 0; v < n_; ++v) {
      if (dist_[v] < kInf) potential_[v] += dist_[v];
    }
    long long push = limit - flow;
    for (int v = t; v != s;) {
      const Arc& a = arcs_[parent_arc_[v]];
      push = std::min(push, a.cap);
      v = arcs_[parent_arc_[v] ^ 1].to;
    }
    for (int v = t; v != s;) {
      Arc& a = arcs_[parent_arc_[v]];
      a.cap -= push;
      arcs_[parent_arc_[v] ^ 1].cap += push;
      cost += push * a.cost;
      v = arcs_[parent_arc_[v] ^ 1].to;
    }
    flow += push;
  }
  return {flow, cost};
}

long long MinCostFlow::flow_on(int arc_id) const {
  return arcs_[arc_id ^ 1].cap;
}

namespace {

bool kuhn_augment(int left, const std::vector<std::vector<int>>& adj,
                  std::vector<int>& match_of_right, std::vector<char>& used) {
  for (int r : adj[left]) {
    if (used[r]) continue;
    used[r] = 1;
    if (match_of_right[r] < 0 ||
        kuhn_augment(match_of_right[r], adj, match_of_right, used)) {
      match_of_right[r] = left;
      return true;
    }
  }
  return false;
}

}  // namespace

int max_bipartite_matching(const std::vector<std::vector<int>>& adj,
                           int right_count, std::vector<int>* match_of_right) {
  std::vector<int> match(right_count, -1);
  std::vector<char> used(right_count, 0);
  int size = 0;
  for (int l = 0; l < static_cast<int>(adj.size()); ++l) {
    std::fill(used.begin(), used.end(), 0);
    if (kuhn_augment(l, adj, match, used)) ++size;
  }
  if (match_of_right) *match_of_right = std::move(match);
  return size;
}

bool b_matching_feasible(const std::vector<std::vector<int>>& eligible,
                         const std::vector<int>& demand,
                         const std::vector<int>& capacity) {
  const int papers = static_cast<int>(eligible.size());
  const int reviewers = static_cast<int>(capacity.size());
  long long need = 0;
  for (int d : demand) need += d;
  if (need == 0) return true;

  // Dinic on source -> papers -> reviewers -> sink.
  const int src = 0, snk = 1 + papers + reviewers;
  const int nodes = snk + 1;
  struct Arc {
    int to;
    int cap;
  };
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> out(nodes);
  auto add = [&](int u, int v, int c) {
    out[u].push_back(static_cast<int>(arcs.size()));
    arcs.push_back({v, c});
    out[v].push_back(static_cast<int>(arcs.size()));
    arcs.push_back({u, 0});
  };
  for (int j = 0; j < papers; ++j) {
    if (demand[j] > static_cast<int>(eligible[j].size())) return false;
    add(src, 1 + j, demand[j]);
    for (int r : eligible[j]) add(1 + j, 1 + papers + r, 1);
  }
  for (int r = 0; r < reviewers; ++r) add(1 + papers + r, snk, capacity[r]);

  std::vector<int> level(nodes), it(nodes);
  long long flow = 0;
  std::vector<int> queue_buf(nodes);
  std::function<int(int, int)> dfs = [&](int u, int pushed) -> int {
    if (u == snk) return pushed;
    for (int& i = it[u]; i < static_cast<int>(out[u].size()); ++i) {
      int id = out[u][i];
      Arc& a = arcs[id];
      if (a.cap <= 0 || level[a.to] != level[u] + 1) continue;
      int got = dfs(a.to, std::min(pushed, a.cap));
      if (got > 0) {
        a.cap -= got;
        arcs[id ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  };
  for (;;) {
    std::fill(level.begin(), level.end(), -1);
    int head = 0, tail = 0;
    queue_buf[tail++] = src;
    level[src] = 0;
    while (head < tail) {
      int u = queue_buf[head++];
      for (int id : out[u]) {
        if (arcs[id].cap > 0 && level[arcs[id].to] < 0) {
          level[arcs[id].to] = level[u] + 1;
          queue_buf[tail++] = arcs[id].to;
        }
      }
    }
    if (level[snk] < 0) break;
    std::fill(it.begin(), it.end(), 0);
    while (int got = dfs(src, 1 << 30)) flow += got;
    if (flow >= need) return true;
  }
  return flow >= need;
}

}  // namespace cobra
