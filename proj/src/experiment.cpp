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

#include "cobra/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "cobra/baselines.hpp"
#include "cobra/cobra.hpp"
#include "cobra/ingest.hpp"

namespace cobra {

namespace {

std::string double_exact(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double se_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return sd / std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kCobra: return "cobra";
    case Algorithm::kMaxUsw: return "max-usw";
    case Algorithm::kMaxminEsw: return "maxmin-esw";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "cobra") return Algorithm::kCobra;
  if (name == "max-usw") return Algorithm::kMaxUsw;
  if (name == "maxmin-esw") return Algorithm::kMaxminEsw;
  return std::nullopt;
}

std::string audit_mode_name(AuditMode m) {
  switch (m) {
    case AuditMode::kExact: return "exact";
    case AuditMode::kHeuristic: return "heuristic";
    case AuditMode::kForcedScanOnly: return "forced-scan-only";
  }
  return "?";
}

std::optional<AuditMode> audit_mode_from_name(const std::string& name) {
  if (name == "exact") return AuditMode::kExact;
  if (name == "heuristic") return AuditMode::kHeuristic;
  if (name == "forced-scan-only") return AuditMode::kForcedScanOnly;
  return std::nullopt;
}

AuditReport audit_assignment(const Instance& inst, const Assignment& asg,
                             AuditMode mode, int exact_max_n, int growth_cap) {
  switch (mode) {
    case AuditMode::kExact: return exact_audit(inst, asg, exact_max_n);
    case AuditMode::kHeuristic: return heuristic_audit(inst, asg, growth_cap);
    case AuditMode::kForcedScanOnly: return forced_scan_audit(inst, asg);
  }
  throw std::logic_error("unknown audit mode");
}

std::vector<RunRecord> run_experiment(const Instance& full,
                                      const ExperimentConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("run count must be >= 1");
  if (config.subsample != 0 && config.subsample < full.k_p() + 1) {
    throw std::invalid_argument("subsample size must be at least k_p + 1");
  }
  if (config.algorithms.empty()) {
    throw std::invalid_argument("no algorithms selected");
  }
  std::vector<RunRecord> records;
  for (int run = 0; run < config.runs; ++run) {
    std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(run);
    try {
      const Instance* inst = &full;
      Subsample sub;
      if (config.subsample > 0) {
        sub = subsample_instance(full, config.subsample, seed);
        inst = &sub.instance;
      }
      for (Algorithm alg : config.algorithms) {
        Assignment asg;
        switch (alg) {
          case Algorithm::kCobra: asg = run_cobra(*inst); break;
          case Algorithm::kMaxUsw: asg = assign_max_usw(*inst); break;
          case Algorithm::kMaxminEsw: asg = assign_maxmin_esw(*inst); break;
        }
        UtilityReport utilities = compute_utilities(*inst, asg);
        AuditReport audit = audit_assignment(*inst, asg, config.audit_mode,
                                             config.exact_audit_max_n,
                                             config.growth_cap);
        RunRecord rec;
        rec.run = run;
        rec.seed = seed;
        rec.algorithm = alg;
        rec.usw = utilities.usw;
        rec.esw = utilities.esw;
        rec.violated = audit.violated;
        rec.unbounded = audit.unbounded;
        rec.alpha = audit.alpha_star;
        rec.largest_group = audit.largest_group;
        records.push_back(rec);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run " + std::to_string(run) + " (seed " +
                               std::to_string(seed) + ") failed: " + e.what());
    }
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<SummaryRow> rows;
  std::vector<Algorithm> order;
  for (const RunRecord& r : records) {
    bool known = false;
    for (Algorithm a : order) known = known || a == r.algorithm;
    if (!known) order.push_back(r.algorithm);
  }
  for (Algorithm alg : order) {
    SummaryRow row;
    row.algorithm = alg;
    std::vector<double> usw, esw, alpha, group;
    int violated = 0, unbounded = 0, total = 0;
    for (const RunRecord& r : records) {
      if (r.algorithm != alg) continue;
      ++total;
      usw.push_back(score_to_double(r.usw));
      esw.push_back(score_to_double(r.esw));
      if (r.violated) {
        ++violated;
        group.push_back(static_cast<double>(r.largest_group));
      }
      if (r.unbounded) {
        ++unbounded;
      } else {
        // Violation-free runs sit exactly at the core: factor 1.
        alpha.push_back(r.violated && r.alpha ? *r.alpha : 1.0);
      }
    }
    row.runs = total;
    row.usw_mean = mean_of(usw);
    row.usw_se = se_of(usw);
    row.esw_mean = mean_of(esw);
    row.esw_se = se_of(esw);
    row.unb_pct = total ? 100.0 * unbounded / total : 0.0;
    row.alpha_mean = alpha.empty() ? 1.0 : mean_of(alpha);
    row.alpha_se = se_of(alpha);
    row.cv_pct = total ? 100.0 * violated / total : 0.0;
    row.group_mean = mean_of(group);
    row.group_se = se_of(group);
    rows.push_back(row);
  }
  return rows;
}

void write_runs_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "run,seed,algorithm,usw,esw,violated,unbounded,alpha,largest_group\n";
  for (const RunRecord& r : records) {
    out << r.run << "," << r.seed << "," << algorithm_name(r.algorithm) << ","
        << format_score(r.usw) << "," << format_score(r.esw) << ","
        << (r.violated ? 1 : 0) << "," << (r.unbounded ? 1 : 0) << ","
        << (r.alpha ? double_exact(*r.alpha) : "") << "," << r.largest_group
        << "\n";
  }
}

std::vector<RunRecord> read_runs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path + ": empty file");
  }
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(ls, cell, ',')) {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                    ": short row");
      }
      return cell;
    };
    RunRecord r;
    r.run = std::stoi(next());
    r.seed = std::stoull(next());
    auto alg = algorithm_from_name(next());
    if (!alg) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown algorithm");
    }
    r.algorithm = *alg;
    Score s;
    if (!parse_score(next(), &s)) throw std::invalid_argument("bad usw");
    r.usw = s;
    if (!parse_score(next(), &s)) throw std::invalid_argument("bad esw");
    r.esw = s;
    r.violated = next() == "1";
    r.unbounded = next() == "1";
    std::string alpha = next();
    if (!alpha.empty()) r.alpha = std::stod(alpha);
    r.largest_group = std::stoi(next());
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "algorithm,runs,usw_mean,usw_se,esw_mean,esw_se,unb_pct,"
         "alpha_mean,alpha_se,cv_pct,group_mean,group_se\n";
  for (const SummaryRow& r : rows) {
    out << algorithm_name(r.algorithm) << "," << r.runs << ","
        << double_exact(r.usw_mean) << "," << double_exact(r.usw_se) << ","
        << double_exact(r.esw_mean) << "," << double_exact(r.esw_se) << ","
        << double_exact(r.unb_pct) << "," << double_exact(r.alpha_mean) << ","
        << double_exact(r.alpha_se) << "," << double_exact(r.cv_pct) << ","
        << double_exact(r.group_mean) << "," << double_exact(r.group_se) << "\n";
  }
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
  char buf[256];
  std::string out =
      "algorithm     USW (mean+-se)     ESW (mean+-se)     #unb-a   alpha*"
      "            CV-Pr    group\n";
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%-12s  %7.3f +- %5.3f   %7.3f +- %5.3f   %5.1f%%   "
                  "%6.3f +- %5.3f   %5.1f%%   %5.2f\n",
                  algorithm_name(r.algorithm).c_str(), r.usw_mean, r.usw_se,
                  r.esw_mean, r.esw_se, r.unb_pct, r.alpha_mean, r.alpha_se,
                  r.cv_pct, r.group_mean);
    out += buf;
  }
  return out;
}

}  // namespace cobra
