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

#include "cobra/cobra.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cobra {

namespace {

std::string paper_label(const PaddedInstance& padded, int paper) {
  PaperRef p = padded.instance.paper(paper);
  std::string s = "p" + std::to_string(p.author + 1) + "." +
                  std::to_string(p.index + 1);
  if (padded.is_dummy(paper)) s += "d";
  return s;
}

std::string agent_list(const std::vector<int>& agents) {
  std::string s;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(agents[i] + 1);
  }
  return s;
}

// All cycles of an out-degree <= 1 graph (they are node disjoint).  Each
// cycle is listed in edge order starting from its lowest node.
std::vector<std::vector<int>> functional_cycles(const std::vector<int>& target) {
  const int n = static_cast<int>(target.size());
  std::vector<std::vector<int>> cycles;
  std::vector<int> color(n, 0);  // 0 white, 1 on current walk, 2 done
  std::vector<int> walk;
  for (int s = 0; s < n; ++s) {
    if (color[s] != 0) continue;
    walk.clear();
    int u = s;
    while (u >= 0 && color[u] == 0) {
      color[u] = 1;
      walk.push_back(u);
      u = target[u];
    }
    if (u >= 0 && color[u] == 1) {
      auto it = std::find(walk.begin(), walk.end(), u);
      std::vector<int> cycle(it, walk.end());
      auto lowest = std::min_element(cycle.begin(), cycle.end());
      std::rotate(cycle.begin(), lowest, cycle.end());
      cycles.push_back(std::move(cycle));
    }
    for (int v : walk) color[v] = 2;
  }
  return cycles;
}

// DFS from the lowest node; the first back edge closes the cycle.  Returns
// (node, edge label) pairs in cycle order, or empty when acyclic.
std::vector<std::pair<int, int>> first_greedy_cycle(const GreedyGraph& g) {
  const int k = static_cast<int>(g.nodes.size());
  auto position = [&](int agent) {
    return static_cast<int>(std::lower_bound(g.nodes.begin(), g.nodes.end(),
                                             agent) -
                            g.nodes.begin());
  };
  std::vector<int> color(k, 0);
  // Stack entries: (position, next edge index to try).
  std::vector<std::pair<int, int>> stack;
  for (int root = 0; root < k; ++root) {
    if (color[root] != 0) continue;
    stack.clear();
    stack.emplace_back(root, 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto& [u, ei] = stack.back();
      if (ei < static_cast<int>(g.edges[u].size())) {
        auto [to_agent, label] = g.edges[u][ei];
        ++ei;
        int v = position(to_agent);
        if (color[v] == 1) {
          // Back edge: cycle runs from v's stack position to the top.
          std::vector<std::pair<int, int>> cycle;
          std::size_t start = 0;
          while (stack[start].first != v) ++start;
          for (std::size_t t = start; t + 1 < stack.size(); ++t) {
            int node = g.nodes[stack[t].first];
            // Label of the tree edge actually taken from this node.
            auto [next_agent, lbl] = g.edges[stack[t].first][stack[t].second - 1];
            (void)next_agent;
            cycle.emplace_back(node, lbl);
          }
          cycle.emplace_back(g.nodes[u], label);
          return cycle;
        }
        if (color[v] == 0) {
          color[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        color[u] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

// Kahn's algorithm, sources first, ties by agent index.
std::vector<int> topological_order(const GreedyGraph& g) {
  const int k = static_cast<int>(g.nodes.size());
  auto position = [&](int agent) {
    return static_cast<int>(std::lower_bound(g.nodes.begin(), g.nodes.end(),
                                             agent) -
                            g.nodes.begin());
  };
  std::vector<int> indeg(k, 0);
  for (int u = 0; u < k; ++u) {
    for (auto [to_agent, label] : g.edges[u]) {
      (void)label;
      ++indeg[position(to_agent)];
    }
  }
  std::vector<int> order;
  std::vector<char> placed(k, 0);
  for (int step = 0; step < k; ++step) {
    int pick = -1;
    for (int u = 0; u < k; ++u) {
      if (!placed[u] && indeg[u] == 0) {
        pick = u;
        break;
      }
    }
    if (pick < 0) throw std::logic_error("greedy graph still has a cycle");
    placed[pick] = 1;
    order.push_back(g.nodes[pick]);
    for (auto [to_agent, label] : g.edges[pick]) {
      (void)label;
      --indeg[position(to_agent)];
    }
  }
  return order;
}

}  // namespace

PreferenceGraph build_preference_graph(const PaddedInstance& padded,
                                       const PartialAssignment& part) {
  const Instance& inst = padded.instance;
  const int n = inst.agents();
  PreferenceGraph g{std::vector<int>(n, -1), std::vector<int>(n, -1)};
  int lowest_incomplete = -1;
  for (int i = 0; i < n; ++i) {
    if (!part.agent_complete(i)) {
      lowest_incomplete = i;
      break;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!part.agent_complete(i)) {
      int paper = part.incomplete[i].front();
      g.chosen_paper[i] = paper;
      for (int cand : inst.ranking_of_paper(paper)) {
        if (part.asg.load(cand) < inst.k_a() && !part.asg.contains(cand, paper)) {
          g.target[i] = cand;
          break;
        }
      }
    } else if (lowest_incomplete >= 0) {
      g.target[i] = lowest_incomplete;
    }
  }
  return g;
}

GreedyGraph build_greedy_graph(const PaddedInstance& /*padded*/,
                               const PartialAssignment& part,
                               const std::vector<int>& incomplete_agents) {
  GreedyGraph g;
  g.nodes = incomplete_agents;
  g.edges.resize(g.nodes.size());
  for (std::size_t u = 0; u < g.nodes.size(); ++u) {
    int i = g.nodes[u];
    for (int other : g.nodes) {
      if (other == i) continue;
      for (int paper : part.incomplete[i]) {
        if (!part.asg.contains(other, paper)) {
          g.edges[u].emplace_back(other, paper);
          break;  // lowest qualifying paper labels the edge
        }
      }
    }
  }
  return g;
}

TtcOutcome pra_ttc(const PaddedInstance& padded, std::ostream* trace,
                   CobraStats* stats) {
  const Instance& inst = padded.instance;
  PartialAssignment part(inst);
  for (;;) {
    PreferenceGraph g = build_preference_graph(padded, part);
    auto cycles = functional_cycles(g.target);
    if (cycles.empty()) break;
    const auto& cycle =
        *std::min_element(cycles.begin(), cycles.end(),
                          [](const auto& a, const auto& b) { return a[0] < b[0]; });
    std::ostringstream edits;
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      int i = cycle[t];
      if (g.chosen_paper[i] < 0) continue;  // complete agents contribute nothing
      int to = g.target[i];
      part.assign(inst, to, g.chosen_paper[i]);
      if (trace) {
        if (edits.tellp() > 0) edits << ";";
        edits << paper_label(padded, g.chosen_paper[i]) << "->" << (to + 1);
      }
    }
    part.finish_round();
    if (stats) {
      ++stats->ttc_rounds;
      stats->balance_checks += part.check_balance(inst);
    } else {
      part.check_balance(inst);
    }
    if (trace) {
      *trace << "ttc round=" << part.round << " cycle=" << agent_list(cycle)
             << " assign=" << edits.str() << "\n";
    }
  }

  TtcOutcome out{std::move(part), {}, {}};
  for (int i = 0; i < inst.agents(); ++i) {
    if (!out.partial.agent_complete(i)) out.incomplete_agents.push_back(i);
  }
  if (static_cast<int>(out.incomplete_agents.size()) > inst.k_p()) {
    throw std::logic_error("more than k_p agents left incomplete");
  }
  int want = inst.k_p() - static_cast<int>(out.incomplete_agents.size()) + 1;
  const auto& seq = out.partial.completion_sequence;
  int have = std::min<int>(want, static_cast<int>(seq.size()));
  out.last_completed.assign(seq.end() - have, seq.end());
  if (trace) {
    *trace << "ttc done U=" << agent_list(out.incomplete_agents)
           << " L=" << agent_list(out.last_completed) << "\n";
  }
  return out;
}

Assignment filling_gaps(const PaddedInstance& padded, TtcOutcome outcome,
                        std::ostream* trace, CobraStats* stats) {
  const Instance& inst = padded.instance;
  if (outcome.incomplete_agents.empty()) {
    throw std::invalid_argument("filling_gaps requires a non-empty U");
  }
  PartialAssignment& part = outcome.partial;
  std::vector<int> members = outcome.incomplete_agents;  // U plus L, kept sorted
  std::vector<int> active = outcome.incomplete_agents;   // current U
  for (int a : outcome.last_completed) members.push_back(a);
  std::sort(members.begin(), members.end());

  // Phase 1: greedy-graph cycle elimination.
  for (;;) {
    GreedyGraph g = build_greedy_graph(padded, part, active);
    auto cycle = first_greedy_cycle(g);
    if (cycle.empty()) break;
    std::ostringstream edits;
    std::vector<int> cycle_nodes;
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      auto [i, label] = cycle[t];
      int to = cycle[(t + 1) % cycle.size()].first;
      part.assign(inst, to, label);
      cycle_nodes.push_back(i);
      if (trace) {
        if (edits.tellp() > 0) edits << ";";
        edits << paper_label(padded, label) << "->" << (to + 1);
      }
    }
    std::vector<int> done = part.finish_round();
    if (stats) {
      ++stats->phase1_rounds;
      stats->balance_checks += part.check_balance(inst);
    } else {
      part.check_balance(inst);
    }
    for (int a : done) {
      active.erase(std::find(active.begin(), active.end(), a));
    }
    if (trace) {
      *trace << "fg1 round=" << part.round << " cycle=" << agent_list(cycle_nodes)
             << " assign=" << edits.str() << "\n";
    }
  }

  // Phase 2: topological three-way rewires.
  GreedyGraph g = build_greedy_graph(padded, part, active);
  std::vector<int> order = topological_order(g);
  if (trace && !order.empty()) {
    *trace << "fg2 order=" << agent_list(order) << "\n";
  }
  std::vector<int> donors_buf;
  for (int agent : order) {
    while (!part.incomplete[agent].empty()) {
      int gap = part.incomplete[agent].front();
      int donor = -1;
      for (int owner : members) {
        if (owner == agent) continue;
        for (int l = 0; l < inst.submissions(owner); ++l) {
          int p = inst.paper_id(owner, l);
          if (part.asg.coverage(p) == inst.k_p() && !part.asg.contains(agent, p)) {
            donor = p;
            break;
          }
        }
        if (donor >= 0) break;
      }
      if (donor < 0) {
        throw std::logic_error("no donor paper available in repair phase");
      }
      donors_buf = part.asg.reviewers_of(donor);
      std::sort(donors_buf.begin(), donors_buf.end());
      int via = -1;
      for (int r : donors_buf) {
        if (r != agent && !part.asg.contains(r, gap)) {
          via = r;
          break;
        }
      }
      if (via < 0) {
        throw std::logic_error("no intermediary reviewer available in repair phase");
      }
      part.swap_rewire(inst, via, gap, donor, agent);
      if (stats) ++stats->phase2_swaps;
      if (part.asg.load(agent) > part.received[agent]) {
        throw std::logic_error("load/received imbalance during repair");
      }
      if (stats) ++stats->balance_checks;
      if (trace) {
        *trace << "fg2 swap agent=" << (agent + 1) << " paper="
               << paper_label(padded, gap) << " donor="
               << paper_label(padded, donor) << " via=" << (via + 1) << "\n";
      }
    }
  }
  return std::move(part.asg);
}

Assignment run_cobra(const Instance& inst, std::ostream* trace,
                     CobraStats* stats) {
  auto violations = validate_instance(inst);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  PaddedInstance padded = pad_to_uniform(inst);
  TtcOutcome outcome = pra_ttc(padded, trace, stats);
  Assignment padded_asg = outcome.incomplete_agents.empty()
                              ? std::move(outcome.partial.asg)
                              : filling_gaps(padded, std::move(outcome), trace, stats);
  Assignment result = strip_dummies(padded, padded_asg);
  auto bad = validate_assignment(inst, result);
  if (!bad.empty()) {
    throw std::logic_error("produced an invalid assignment: " + bad.front());
  }
  return result;
}

}  // namespace cobra
