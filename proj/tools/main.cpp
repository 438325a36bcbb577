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

// Command-line driver: `cobra assign`, `cobra audit`, `cobra experiment`.
// Instances come either from a plain-text instance file (rankings, optional
// scores) or from similarity/conflict CSVs with a derived authorship.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cobra/baselines.hpp"
#include "cobra/cobra.hpp"
#include "cobra/experiment.hpp"
#include "cobra/ingest.hpp"

namespace {

using namespace cobra;

struct InputFlags {
  std::string instance_file;
  std::string similarity_csv;
  std::string conflicts_csv;
  std::string authorship = "greedy";  // greedy | max-matching
  std::string authorship_out;
  bool normalize = false;
  int k_p = 3;
  int k_a = 3;
};

void add_input_flags(CLI::App* cmd, InputFlags* in) {
  cmd->add_option("--instance", in->instance_file,
                  "instance file (rankings, optional scores)");
  cmd->add_option("--similarity", in->similarity_csv, "similarity CSV");
  cmd->add_option("--conflicts", in->conflicts_csv, "conflict CSV (0/1)");
  cmd->add_option("--authorship", in->authorship,
                  "authorship derivation: greedy | max-matching")
      ->check(CLI::IsMember({"greedy", "max-matching"}));
  cmd->add_option("--authorship-out", in->authorship_out,
                  "write the derived paper/author pairs as CSV");
  cmd->add_flag("--normalize", in->normalize,
                "divide similarities by the global maximum");
  cmd->add_option("--k-p", in->k_p, "reviewers required per paper")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k-a", in->k_a, "review capacity per agent")
      ->check(CLI::PositiveNumber);
}

struct LoadedInstance {
  Instance instance;
  // Labels for CSV output; empty when synthesized from indices.
  std::vector<std::string> agent_ids;
  std::vector<std::string> paper_ids;
};

std::string default_paper_label(const Instance& inst, int paper) {
  PaperRef p = inst.paper(paper);
  return "p" + std::to_string(p.author + 1) + "." + std::to_string(p.index + 1);
}

LoadedInstance load_input(const InputFlags& in) {
  LoadedInstance out;
  if (!in.instance_file.empty()) {
    out.instance = load_instance_file(in.instance_file);
    return out;
  }
  if (in.similarity_csv.empty()) {
    throw std::invalid_argument("provide --instance or --similarity");
  }
  RawDataset ds = load_similarity_csv(in.similarity_csv);
  if (!in.conflicts_csv.empty()) load_conflicts_csv(in.conflicts_csv, &ds);
  if (in.normalize) ds = normalize_scores(std::move(ds));
  std::vector<int> authors = in.authorship == "max-matching"
                                 ? authorship_by_max_matching(ds)
                                 : authorship_by_greedy(ds);
  if (!in.authorship_out.empty()) write_authorship_csv(in.authorship_out, ds, authors);
  BuiltInstance built = build_instance(ds, authors, in.k_p, in.k_a);
  out.instance = std::move(built.instance);
  out.agent_ids = std::move(built.agent_ids);
  out.paper_ids = std::move(built.paper_ids);
  return out;
}

std::string agent_label(const LoadedInstance& li, int agent) {
  return li.agent_ids.empty() ? std::to_string(agent + 1) : li.agent_ids[agent];
}

std::string paper_label(const LoadedInstance& li, int paper) {
  return li.paper_ids.empty() ? default_paper_label(li.instance, paper)
                              : li.paper_ids[paper];
}

void write_assignment_csv(const std::string& path, const LoadedInstance& li,
                          const Assignment& asg) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "paper_id,reviewer_id\n";
  for (int j = 0; j < li.instance.papers(); ++j) {
    std::vector<int> rs = asg.reviewers_of(j);
    std::sort(rs.begin(), rs.end());
    for (int r : rs) out << paper_label(li, j) << "," << agent_label(li, r) << "\n";
  }
}

Assignment read_assignment_csv(const std::string& path, const LoadedInstance& li) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  // Label lookup tables.
  std::vector<std::string> agents, papers;
  for (int i = 0; i < li.instance.agents(); ++i) agents.push_back(agent_label(li, i));
  for (int j = 0; j < li.instance.papers(); ++j) papers.push_back(paper_label(li, j));
  Assignment asg(li.instance.agents(), li.instance.papers());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || lineno == 1) continue;  // header
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected paper_id,reviewer_id");
    }
    std::string pid = line.substr(0, comma);
    std::string rid = line.substr(comma + 1);
    if (!rid.empty() && rid.back() == '\r') rid.pop_back();
    auto pit = std::find(papers.begin(), papers.end(), pid);
    auto rit = std::find(agents.begin(), agents.end(), rid);
    if (pit == papers.end() || rit == agents.end()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown paper or reviewer id");
    }
    asg.add(static_cast<int>(rit - agents.begin()),
            static_cast<int>(pit - papers.begin()));
  }
  return asg;
}

int cmd_assign(const InputFlags& in, const std::string& algorithm,
               const std::string& out_path, const std::string& trace_path) {
  LoadedInstance li = load_input(in);
  auto violations = validate_instance(li.instance);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid instance: " << v << "\n";
    return 1;
  }
  auto alg = algorithm_from_name(algorithm);
  if (!alg) {
    std::cerr << "unknown algorithm '" << algorithm << "'\n";
    return 1;
  }
  Assignment asg;
  if (*alg == Algorithm::kCobra) {
    std::ofstream trace;
    std::ostream* tp = nullptr;
    if (!trace_path.empty()) {
      trace.open(trace_path);
      if (!trace) {
        std::cerr << "cannot write " << trace_path << "\n";
        return 1;
      }
      tp = &trace;
    }
    asg = run_cobra(li.instance, tp);
  } else if (*alg == Algorithm::kMaxUsw) {
    asg = assign_max_usw(li.instance);
  } else {
    asg = assign_maxmin_esw(li.instance);
  }
  if (!out_path.empty()) write_assignment_csv(out_path, li, asg);
  if (li.instance.has_scores()) {
    UtilityReport rep = compute_utilities(li.instance, asg);
    std::cout << "pairs=" << asg.size() << " usw=" << format_score(rep.usw)
              << " esw=" << format_score(rep.esw) << "\n";
  } else {
    std::cout << "pairs=" << asg.size() << " usw=n/a esw=n/a (no scores)\n";
  }
  return 0;
}

int cmd_audit(const InputFlags& in, const std::string& assignment_path,
              const std::string& mode_name, int exact_max_n, int growth_cap,
              const std::string& out_path) {
  LoadedInstance li = load_input(in);
  auto mode = audit_mode_from_name(mode_name);
  if (!mode) {
    std::cerr << "unknown audit mode '" << mode_name << "'\n";
    return 1;
  }
  Assignment asg = read_assignment_csv(assignment_path, li);
  auto bad = validate_assignment(li.instance, asg);
  if (!bad.empty()) {
    for (const auto& v : bad) std::cerr << "invalid assignment: " << v << "\n";
    return 1;
  }
  AuditReport report = audit_assignment(li.instance, asg, *mode, exact_max_n,
                                        growth_cap);
  UtilityReport utilities = compute_utilities(li.instance, asg);
  std::cout << "violated=" << (report.violated ? 1 : 0)
            << " unbounded=" << (report.unbounded ? 1 : 0) << " alpha="
            << (report.alpha_star ? std::to_string(*report.alpha_star) : "n/a")
            << " largest_group=" << report.largest_group << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 1;
    }
    out << "usw,esw,violated,unbounded,alpha,largest_group,mode\n";
    out << format_score(utilities.usw) << "," << format_score(utilities.esw)
        << "," << (report.violated ? 1 : 0) << "," << (report.unbounded ? 1 : 0)
        << ","
        << (report.alpha_star ? std::to_string(*report.alpha_star) : "") << ","
        << report.largest_group << "," << audit_mode_name(*mode) << "\n";
  }
  return 0;
}

int cmd_experiment(const InputFlags& in, ExperimentConfig config,
                   const std::vector<std::string>& algorithm_names,
                   const std::string& mode_name, const std::string& out_prefix) {
  auto mode = audit_mode_from_name(mode_name);
  if (!mode) {
    std::cerr << "unknown audit mode '" << mode_name << "'\n";
    return 1;
  }
  config.audit_mode = *mode;
  if (!algorithm_names.empty()) {
    config.algorithms.clear();
    for (const auto& name : algorithm_names) {
      auto alg = algorithm_from_name(name);
      if (!alg) {
        std::cerr << "unknown algorithm '" << name << "'\n";
        return 1;
      }
      config.algorithms.push_back(*alg);
    }
  }
  LoadedInstance li = load_input(in);
  auto violations = validate_instance(li.instance);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid instance: " << v << "\n";
    return 1;
  }
  std::vector<RunRecord> records = run_experiment(li.instance, config);
  std::vector<SummaryRow> summary = summarize(records);
  if (!out_prefix.empty()) {
    write_runs_csv(out_prefix + "_runs.csv", records);
    write_summary_csv(out_prefix + "_summary.csv", summary);
  }
  std::cout << format_summary_table(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-stable conference reviewer assignment toolkit"};
  app.require_subcommand(1);

  InputFlags in_assign, in_audit, in_exp;
  std::string algorithm = "cobra", out_path, trace_path;
  auto* assign = app.add_subcommand("assign", "compute one assignment");
  add_input_flags(assign, &in_assign);
  assign->add_option("--algorithm", algorithm, "cobra | max-usw | maxmin-esw");
  assign->add_option("--out", out_path, "assignment CSV to write");
  assign->add_option("--trace", trace_path, "write a run trace (cobra only)");

  std::string assignment_path, audit_mode = "heuristic", audit_out;
  int exact_max_n = 16, growth_cap = 20;
  auto* audit = app.add_subcommand("audit", "audit an assignment for deviations");
  add_input_flags(audit, &in_audit);
  audit->add_option("--assignment", assignment_path, "assignment CSV")->required();
  audit->add_option("--audit-mode", audit_mode,
                    "exact | heuristic | forced-scan-only");
  audit->add_option("--exact-max-n", exact_max_n,
                    "agent cap for the exact audit");
  audit->add_option("--growth-cap", growth_cap, "heuristic coalition size cap");
  audit->add_option("--out", audit_out, "audit record CSV to write");

  ExperimentConfig config;
  std::vector<std::string> algorithm_names;
  std::string exp_mode = "heuristic", out_prefix;
  auto* experiment =
      app.add_subcommand("experiment", "seeded subsampled comparison runs");
  add_input_flags(experiment, &in_exp);
  experiment->add_option("--runs", config.runs, "number of runs")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--subsample", config.subsample,
                         "papers per run (0 = full dataset)");
  experiment->add_option("--seed", config.base_seed, "base seed (run r uses base+r)");
  experiment->add_option("--algorithm", algorithm_names,
                         "algorithms to compare (repeatable)");
  experiment->add_option("--audit-mode", exp_mode,
                         "exact | heuristic | forced-scan-only");
  experiment->add_option("--exact-max-n", config.exact_audit_max_n,
                         "agent cap for the exact audit");
  experiment->add_option("--growth-cap", config.growth_cap,
                         "heuristic coalition size cap");
  experiment->add_option("--out", out_prefix,
                         "output prefix (<prefix>_runs.csv, <prefix>_summary.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (assign->parsed()) {
      // k_p/k_a from the instance file win over flags there.
      return cmd_assign(in_assign, algorithm, out_path, trace_path);
    }
    if (audit->parsed()) {
      return cmd_audit(in_audit, assignment_path, audit_mode, exact_max_n,
                       growth_cap, audit_out);
    }
    if (experiment->parsed()) {
      return cmd_experiment(in_exp, config, algorithm_names, exp_mode, out_prefix);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
