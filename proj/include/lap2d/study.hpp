#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lap2d/analysis.hpp"
#include "lap2d/fd_solver.hpp"

// End-to-end studies: regularized solves over parameter ladders, the
// associated convergence / flux / decay / radiation checks, and structured
// reports (JSON document plus flat CSV tables).  Every pass/fail verdict
// records the measured value and the tolerance it was held against.

namespace lap2d::harness {

enum class StudyKind { lap_zero, lap_helmholtz, k_to_zero, decay, flux, kernels };

std::string study_kind_name(StudyKind kind);
StudyKind parse_study_kind(const std::string& name);  // throws config_error

struct StudyConfig {
  StudyKind study = StudyKind::lap_zero;
  std::string problem = "identity-dipole";
  double grid_half_width = 8.0;
  int grid_n = 513;
  std::vector<double> eps_ladder = default_eps_ladder();
  std::vector<double> k_ladder = {0.5, 0.25, 0.125, 0.0625};
  double k = 1.0;   // fixed Helmholtz wave number
  double b = 2.0;   // weight exponent of the integral norm
  int trace_m = 256;
  int threads = 0;  // requested worker threads; 0 = automatic
  bool write_fields = false;
  std::string out_dir;
  std::map<std::string, double> tolerance_overrides;

  static std::vector<double> default_eps_ladder();  // 0.1 * 4^-j, j = 0..7

  // Effective tolerance: override if present, else the built-in default.
  // Throws config_error for names that are not known checks.
  double tol(const std::string& name) const;

  // Apply one `key = value` setting; throws config_error on unknown keys or
  // unparsable values.
  void set(const std::string& key, const std::string& value);

  void validate() const;  // ladder monotonicity, grid invariants, ...
};

// Flat `key = value` file with '#' comments and comma-separated lists.
StudyConfig parse_config_file(const std::string& path);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct StudyReport {
  StudyConfig config;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  nlohmann::json details;             // study-specific numerics
  std::map<std::string, std::string> tables;  // CSV payloads by file stem
  std::vector<double> solve_seconds;
  double total_seconds = 0.0;

  bool passed() const;
  // include_timing=false yields the determinism-comparable document (wall
  // clock is the only legitimately non-reproducible content).
  std::string to_json(bool include_timing = true) const;
  // Writes report.json and the CSV tables into config.out_dir.
  void write_outputs() const;
};

StudyReport run_study(const StudyConfig& config);

// Individual studies (run_study dispatches on config.study).
StudyReport study_lap_zero(const StudyConfig& config);
StudyReport study_lap_helmholtz(const StudyConfig& config);
StudyReport study_k_to_zero(const StudyConfig& config);
StudyReport study_decay(const StudyConfig& config);
StudyReport study_flux(const StudyConfig& config);
StudyReport study_kernels(const StudyConfig& config);

// Fast self-check of the kernel and oracle layers plus a coarse solver
// smoke test; prints one line per check, returns the number of failures.
int selftest(std::ostream& os);

// Catalog listing for the CLI.
std::string list_problems_text();

}  // namespace lap2d::harness
