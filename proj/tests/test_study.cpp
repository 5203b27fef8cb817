#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"
#include "lap2d/errors.hpp"
#include "lap2d/study.hpp"

using namespace lap2d;
using namespace lap2d::harness;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = (fs::temp_directory_path() / name).string();
  std::ofstream os(path);
  os << body;
  return path;
}

}  // namespace

TEST_CASE("study kind names round-trip") {
  for (const StudyKind kind :
       {StudyKind::lap_zero, StudyKind::lap_helmholtz, StudyKind::k_to_zero,
        StudyKind::decay, StudyKind::flux, StudyKind::kernels}) {
    CHECK(parse_study_kind(study_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_study_kind("no-such-study"), config_error);
}

TEST_CASE("config setters parse and reject by key") {
  StudyConfig c;
  c.set("study", "flux");
  CHECK(c.study == StudyKind::flux);
  c.set("problem", "identity-monopole");
  c.set("grid_half_width", "4");
  c.set("grid_n", "65");
  c.set("eps_ladder", "0.1, 0.025, 0.00625");
  CHECK(c.eps_ladder == std::vector<double>{0.1, 0.025, 0.00625});
  c.set("k_ladder", "0.5,0.25,0.125");
  c.set("k", "2.0");
  c.set("b", "1.5");
  c.set("trace_m", "128");
  c.set("threads", "1");
  c.set("write_fields", "true");
  CHECK(c.write_fields);
  c.set("tol.flux_abs", "0.5");
  CHECK(c.tol("flux_abs") == 0.5);
  c.validate();

  CHECK_THROWS_WITH_AS(c.set("no_such_key", "1"),
                       doctest::Contains("no_such_key"), config_error);
  CHECK_THROWS_WITH_AS(c.set("grid_n", "abc"), doctest::Contains("grid_n"),
                       config_error);
  CHECK_THROWS_WITH_AS(c.set("tol.bogus", "1"), doctest::Contains("bogus"),
                       config_error);
  CHECK_THROWS_AS(c.set("eps_ladder", "0.1, fish"), config_error);
  CHECK_THROWS_AS(c.tol("not-a-check"), config_error);
}

TEST_CASE("config validation enforces the documented invariants") {
  const auto expect_reject = [](void (*mutate)(StudyConfig&)) {
    StudyConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), config_error);
  };
  expect_reject([](StudyConfig& c) { c.grid_n = 64; });
  expect_reject([](StudyConfig& c) { c.grid_n = 33; });
  expect_reject([](StudyConfig& c) { c.eps_ladder = {0.1, 0.2}; });
  expect_reject([](StudyConfig& c) { c.eps_ladder = {0.1, 0.1}; });
  expect_reject([](StudyConfig& c) { c.eps_ladder = {0.1, -0.05}; });
  expect_reject([](StudyConfig& c) { c.eps_ladder.clear(); });
  expect_reject([](StudyConfig& c) { c.k_ladder = {0.5, 0.6}; });
  expect_reject([](StudyConfig& c) { c.k = 0.0; });
  expect_reject([](StudyConfig& c) { c.b = 1.0; });
  expect_reject([](StudyConfig& c) { c.trace_m = 63; });
  expect_reject([](StudyConfig& c) { c.trace_m = 32; });
  expect_reject([](StudyConfig& c) { c.threads = -1; });
  expect_reject([](StudyConfig& c) { c.tolerance_overrides["flux_abs"] = 0; });
  StudyConfig ok;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("config files support comments, lists, and line diagnostics") {
  const std::string good = write_temp("lap2d_cfg_good.cfg",
                                      "# full line comment\n"
                                      "study = flux\n"
                                      "\n"
                                      "problem = identity-monopole  # trail\n"
                                      "grid_half_width = 4\n"
                                      "grid_n = 65\n"
                                      "eps_ladder = 0.1, 0.025, 0.00625\n"
                                      "tol.flux_spread = 0.02\n");
  const StudyConfig c = parse_config_file(good);
  CHECK(c.study == StudyKind::flux);
  CHECK(c.problem == "identity-monopole");
  CHECK(c.grid_n == 65);
  CHECK(c.tol("flux_spread") == 0.02);
  fs::remove(good);

  const std::string bad_key = write_temp("lap2d_cfg_badkey.cfg",
                                         "study = flux\nwhat = 1\n");
  CHECK_THROWS_WITH_AS(parse_config_file(bad_key), doctest::Contains(":2:"),
                       config_error);
  fs::remove(bad_key);

  const std::string no_eq =
      write_temp("lap2d_cfg_noeq.cfg", "study flux\n");
  CHECK_THROWS_WITH_AS(parse_config_file(no_eq),
                       doctest::Contains("key = value"), config_error);
  fs::remove(no_eq);

  CHECK_THROWS_AS(parse_config_file("/no/such/file.cfg"), config_error);
}

TEST_CASE("k-to-zero requires a zero-mean source") {
  StudyConfig c;
  c.study = StudyKind::k_to_zero;
  c.problem = "identity-monopole";
  c.grid_half_width = 4;
  c.grid_n = 65;
  CHECK_THROWS_WITH_AS(run_study(c),
                       doctest::Contains("compatibility"), config_error);
}

TEST_CASE("kernels study: structured report with one honest failure") {
  StudyConfig c;
  c.study = StudyKind::kernels;
  const StudyReport first = run_study(c);
  const StudyReport second = run_study(c);

  // every check carries a name, a positive tolerance, and a note
  std::set<std::string> names;
  for (const CheckResult& chk : first.checks) {
    CHECK_FALSE(chk.name.empty());
    CHECK(chk.tolerance > 0.0);
    CHECK_FALSE(chk.note.empty());
    CHECK(names.insert(chk.name).second);  // unique
  }
  // the second-order remainder bound fails by design; everything else passes
  CHECK_FALSE(first.passed());
  int failures = 0;
  for (const CheckResult& chk : first.checks) {
    if (!chk.pass) {
      ++failures;
      CHECK(chk.name == "expansion-bounded");
    }
  }
  CHECK(failures == 1);
  CHECK_FALSE(first.notes.empty());
  CHECK(first.tables.count("expansion") == 1);

  // the JSON document parses and carries the checks
  const nlohmann::json doc = nlohmann::json::parse(first.to_json());
  CHECK(doc.contains("checks"));
  CHECK(doc.contains("details"));
  CHECK(doc["passed"].get<bool>() == false);

  // determinism: the timing-free documents of two runs are bitwise equal
  CHECK(first.to_json(false) == second.to_json(false));
  // and the timed document differs from the timing-free one
  CHECK(first.to_json(true) != first.to_json(false));
}

TEST_CASE("flux study: small solve produces a green report and outputs") {
  StudyConfig c;
  c.study = StudyKind::flux;
  c.problem = "identity-monopole";
  c.grid_half_width = 4;
  c.grid_n = 129;
  c.out_dir = (fs::temp_directory_path() / "lap2d_flux_out").string();
  fs::remove_all(c.out_dir);
  const StudyReport report = run_study(c);
  CHECK(report.passed());
  CHECK(report.solve_seconds.size() == 1);
  CHECK(report.total_seconds > 0.0);
  std::set<std::string> names;
  for (const CheckResult& chk : report.checks) names.insert(chk.name);
  CHECK(names.count("flux-matches-mass") == 1);
  CHECK(names.count("flux-conservation") == 1);
  CHECK(names.count("ring-identity") == 1);
  CHECK(names.count("representation") == 1);

  report.write_outputs();
  CHECK(fs::exists(fs::path(c.out_dir) / "report.json"));
  CHECK(fs::exists(fs::path(c.out_dir) / "flux.csv"));
  std::ifstream is(fs::path(c.out_dir) / "report.json");
  nlohmann::json doc;
  is >> doc;  // parses cleanly
  CHECK(doc["problem"] == "identity-monopole");
  CHECK(doc["config"]["grid_n"] == 129);
  fs::remove_all(c.out_dir);
}

TEST_CASE("selftest passes and reports each layer") {
  std::ostringstream os;
  CHECK(selftest(os) == 0);
  const std::string text = os.str();
  CHECK(text.find("wronskian") != std::string::npos);
  CHECK(text.find("solver-order") != std::string::npos);
  CHECK(text.find("representation") != std::string::npos);
}

TEST_CASE("problem catalog listing names every builtin") {
  const std::string text = list_problems_text();
  CHECK(text.find("identity-dipole") != std::string::npos);
  CHECK(text.find("identity-monopole") != std::string::npos);
  CHECK(text.find("bump-dipole") != std::string::npos);
  CHECK(text.find("anisotropic-dipole") != std::string::npos);
}
