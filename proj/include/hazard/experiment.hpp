#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hazard/config.hpp"

namespace hazard {

// Shortest round-trip decimal rendering; nan/inf spelled out.
std::string format_double(double v);

struct RunArtifacts {
  ReplicationSummary summary;
  std::filesystem::path replications_csv;
  std::filesystem::path curve_csv;
  std::filesystem::path summary_json;
};

// Runs the experiment and writes three artifacts into out_dir (created if
// missing):
//   replications.csv  replication,seed,terminal_P,classification
//   curve.csv         t,mean_P,se_P,mean_hazard
//   summary.json      counts, optimality frequency with 95% Wilson interval
// Identical config and seed produce byte-identical files.
RunArtifacts run_experiment(const BuiltExperiment& built);

// One row of the verification table printed by the `check` verb.
struct CheckRow {
  enum class Status { kPass, kFail, kInfeasible };
  std::string name;
  Status status = Status::kPass;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  long long failures = 0;
  long long infeasible = 0;
  // Tightest hazard rate the enumeration actually exhibited across the grid
  // (NaN when nothing was enumerable).
  double tightest_ratio = 0.0;
  // Smallest closed-form floor used across the checked times.
  double tightest_delta = 0.0;
};

// Exact verification over a configuration grid (11 points per axis, coarsened
// until the per-model feasibility guards accept it) at times {0,1,2,5,10}:
// the expected-improvement bound at every grid state, then the exponential
// supermartingale property with gamma = min(1, smallest floor). A model whose
// enumeration stays infeasible is reported as such, not failed.
CheckReport check_experiment(const BuiltExperiment& built);

std::string render_check_report(const CheckReport& report);

}  // namespace hazard
