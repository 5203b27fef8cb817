// lap2d command-line front end. Talks to the shared library exclusively
// through the C interface in lap2d.h.
//
// Exit codes: 0 all checks passed, 1 at least one check failed,
//             2 configuration error, 3 solver failure.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lap2d.h"

namespace {

int exit_code_for(lap2d_status status) {
  switch (status) {
    case LAP2D_OK: return 0;
    case LAP2D_CHECK_FAILED: return 1;
    case LAP2D_ERR_CONFIG: return 2;
    case LAP2D_ERR_SOLVER: return 3;
    case LAP2D_ERR_INVALID_ARG:
    case LAP2D_ERR_IO:
    case LAP2D_ERR_INTERNAL: return 2;
  }
  return 2;
}

int fail(lap2d_status status) {
  std::fprintf(stderr, "error: %s\n", lap2d_last_error());
  return exit_code_for(status);
}

struct ConfigDeleter {
  void operator()(lap2d_config* c) const { lap2d_config_free(c); }
};
struct ReportDeleter {
  void operator()(lap2d_report* r) const { lap2d_report_free(r); }
};

int run_study_command(const std::string& config_path,
                      const std::vector<std::pair<std::string, std::string>>&
                          overrides,
                      bool quiet) {
  std::unique_ptr<lap2d_config, ConfigDeleter> config(lap2d_config_create());
  if (!config) {
    std::fprintf(stderr, "error: out of memory\n");
    return 2;
  }
  if (!config_path.empty()) {
    const lap2d_status st = lap2d_config_load(config.get(),
                                              config_path.c_str());
    if (st != LAP2D_OK) return fail(st);
  }
  for (const auto& [key, value] : overrides) {
    const lap2d_status st =
        lap2d_config_set(config.get(), key.c_str(), value.c_str());
    if (st != LAP2D_OK) return fail(st);
  }

  lap2d_report* raw = nullptr;
  const lap2d_status st = lap2d_study_run(config.get(), &raw);
  if (st != LAP2D_OK && st != LAP2D_CHECK_FAILED) return fail(st);
  std::unique_ptr<lap2d_report, ReportDeleter> report(raw);

  char* json = lap2d_report_json(report.get(), /*include_timing=*/1);
  if (!json) return fail(LAP2D_ERR_INTERNAL);
  if (!quiet) std::fputs(json, stdout);
  lap2d_string_free(json);

  const lap2d_status write_st = lap2d_report_write(report.get());
  if (write_st != LAP2D_OK) {
    // Records are still on stdout; only the on-disk copy failed.
    std::fprintf(stderr, "warning: could not write outputs: %s\n",
                 lap2d_last_error());
  }
  return lap2d_report_passed(report.get()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lap2d: limiting-absorption studies for planar "
               "divergence-form operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lap2d_version()));

  // study ------------------------------------------------------------------
  auto* study_cmd = app.add_subcommand(
      "study", "run one study and write report.json plus CSV tables");
  std::string config_path, study_name, problem, out_dir;
  std::string eps_ladder, k_ladder;
  double grid_half_width = -1.0, k = -1.0, b = -1.0;
  int grid_n = -1, trace_m = -1, threads = -1;
  bool write_fields = false, quiet = false;
  std::vector<std::string> tol_overrides;
  study_cmd->add_option("-c,--config", config_path,
                        "key = value configuration file");
  study_cmd->add_option("-s,--study", study_name,
                        "study kind: lap-zero, lap-helmholtz, k-to-zero, "
                        "decay, flux, kernels");
  study_cmd->add_option("-p,--problem", problem, "built-in problem name");
  study_cmd->add_option("-o,--out", out_dir, "output directory");
  study_cmd->add_option("--grid-n", grid_n, "nodes per side (odd, >= 65)");
  study_cmd->add_option("--grid-half-width", grid_half_width,
                        "domain half-width L");
  study_cmd->add_option("--eps-ladder", eps_ladder,
                        "comma-separated decreasing eps values");
  study_cmd->add_option("--k-ladder", k_ladder,
                        "comma-separated decreasing k values");
  study_cmd->add_option("--k", k, "wave number for fixed-energy studies");
  study_cmd->add_option("--b", b, "weight exponent for the integral norm");
  study_cmd->add_option("--trace-m", trace_m,
                        "samples on the trace circle (even, >= 64)");
  study_cmd->add_option("--threads", threads,
                        "solver concurrency cap (0 = automatic)");
  study_cmd->add_option("--tol", tol_overrides,
                        "tolerance override name=value (repeatable)");
  study_cmd->add_flag("--write-fields", write_fields,
                      "also write solution fields as binary grids");
  study_cmd->add_flag("-q,--quiet", quiet,
                      "do not print the report to stdout");

  // selftest -----------------------------------------------------------------
  auto* selftest_cmd = app.add_subcommand(
      "selftest", "run the built-in smoke checks and exit");

  // list-problems -------------------------------------------------------------
  auto* list_cmd = app.add_subcommand("list-problems",
                                      "list the built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (selftest_cmd->parsed()) {
    return lap2d_selftest() == 0 ? 0 : 1;
  }
  if (list_cmd->parsed()) {
    char* text = lap2d_list_problems();
    if (!text) return fail(LAP2D_ERR_INTERNAL);
    std::fputs(text, stdout);
    lap2d_string_free(text);
    return 0;
  }

  // Assemble key/value overrides in a fixed order: command-line flags win
  // over the config file.
  std::vector<std::pair<std::string, std::string>> overrides;
  auto add = [&](const char* key, const std::string& value) {
    overrides.emplace_back(key, value);
  };
  if (!study_name.empty()) add("study", study_name);
  if (!problem.empty()) add("problem", problem);
  if (!out_dir.empty()) add("out_dir", out_dir);
  if (grid_n >= 0) add("grid_n", std::to_string(grid_n));
  if (grid_half_width >= 0) add("grid_half_width",
                                std::to_string(grid_half_width));
  if (!eps_ladder.empty()) add("eps_ladder", eps_ladder);
  if (!k_ladder.empty()) add("k_ladder", k_ladder);
  if (k >= 0) add("k", std::to_string(k));
  if (b >= 0) add("b", std::to_string(b));
  if (trace_m >= 0) add("trace_m", std::to_string(trace_m));
  if (threads >= 0) add("threads", std::to_string(threads));
  if (write_fields) add("write_fields", "true");
  for (const std::string& t : tol_overrides) {
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --tol expects name=value, got '%s'\n",
                   t.c_str());
      return 2;
    }
    add(("tol." + t.substr(0, eq)).c_str(), t.substr(eq + 1));
  }

  return run_study_command(config_path, overrides, quiet);
}
