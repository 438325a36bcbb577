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

#ifndef COBRA_EXPERIMENT_HPP
#define COBRA_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cobra/audit.hpp"
#include "cobra/model.hpp"

namespace cobra {

enum class Algorithm { kCobra, kMaxUsw, kMaxminEsw };
enum class AuditMode { kExact, kHeuristic, kForcedScanOnly };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);
std::string audit_mode_name(AuditMode m);
std::optional<AuditMode> audit_mode_from_name(const std::string& name);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms = {Algorithm::kCobra, Algorithm::kMaxUsw,
                                       Algorithm::kMaxminEsw};
  int runs = 100;
  int subsample = 100;  // 0 = use the full instance every run
  std::uint64_t base_seed = 1;
  AuditMode audit_mode = AuditMode::kHeuristic;
  int exact_audit_max_n = 16;
  int growth_cap = 20;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kCobra;
  Score usw = 0;
  Score esw = 0;
  bool violated = false;
  bool unbounded = false;
  std::optional<double> alpha;  // bounded violation factor, when present
  int largest_group = 0;
};

// Per-algorithm aggregates.  "se" columns are the standard error of the
// mean (sample standard deviation / sqrt(runs); 0 for a single run).
// alpha_mean averages over non-unbounded runs, counting violation-free runs
// as exactly 1; group_mean averages over violated runs (0 when none).
struct SummaryRow {
  Algorithm algorithm = Algorithm::kCobra;
  int runs = 0;
  double usw_mean = 0, usw_se = 0;
  double esw_mean = 0, esw_se = 0;
  double unb_pct = 0;
  double alpha_mean = 1.0, alpha_se = 0;
  double cv_pct = 0;
  double group_mean = 0, group_se = 0;
};

// Runs the seeded pipeline: for run r, subsample with seed base_seed + r,
// assign with each algorithm, score, audit.  Deterministic for a fixed
// config; any per-run failure is rethrown with the failing seed named.
std::vector<RunRecord> run_experiment(const Instance& full,
                                      const ExperimentConfig& config);

// Pure fold of the records; the summary always recomputes exactly from the
// per-run CSV.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

AuditReport audit_assignment(const Instance& inst, const Assignment& asg,
                             AuditMode mode, int exact_max_n, int growth_cap);

void write_runs_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_runs_csv(const std::string& path);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::string format_summary_table(const std::vector<SummaryRow>& rows);

}  // namespace cobra

#endif  // COBRA_EXPERIMENT_HPP
