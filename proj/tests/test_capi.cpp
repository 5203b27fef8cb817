#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "lap2d.h"

namespace fs = std::filesystem;

TEST_CASE("version string is semantic") {
  const char* v = lap2d_version();
  REQUIRE(v != nullptr);
  int major = -1, minor = -1, patch = -1;
  CHECK(std::sscanf(v, "%d.%d.%d", &major, &minor, &patch) == 3);
  CHECK(major >= 0);
}

TEST_CASE("config lifecycle, setters, and error reporting") {
  lap2d_config* cfg = lap2d_config_create();
  REQUIRE(cfg != nullptr);

  CHECK(lap2d_config_set(cfg, "study", "kernels") == LAP2D_OK);
  CHECK(lap2d_config_set(cfg, "grid_n", "129") == LAP2D_OK);

  CHECK(lap2d_config_set(cfg, "bogus_key", "1") == LAP2D_ERR_CONFIG);
  CHECK(std::strstr(lap2d_last_error(), "bogus_key") != nullptr);
  CHECK(lap2d_config_set(cfg, "grid_n", "not-a-number") == LAP2D_ERR_CONFIG);
  CHECK(std::strstr(lap2d_last_error(), "grid_n") != nullptr);

  // a successful call clears the thread-local error message
  CHECK(lap2d_config_set(cfg, "k", "1.0") == LAP2D_OK);
  CHECK(std::strlen(lap2d_last_error()) == 0);

  // null-argument guards
  CHECK(lap2d_config_set(nullptr, "k", "1") == LAP2D_ERR_INVALID_ARG);
  CHECK(lap2d_config_set(cfg, nullptr, "1") == LAP2D_ERR_INVALID_ARG);
  CHECK(lap2d_config_set(cfg, "k", nullptr) == LAP2D_ERR_INVALID_ARG);
  CHECK(lap2d_config_load(cfg, nullptr) == LAP2D_ERR_INVALID_ARG);
  CHECK(lap2d_config_load(nullptr, "x") == LAP2D_ERR_INVALID_ARG);

  lap2d_config_free(cfg);
  lap2d_config_free(nullptr);  // no-op
}

TEST_CASE("config load replaces contents and surfaces file errors") {
  const std::string path =
      (fs::temp_directory_path() / "lap2d_capi_cfg.cfg").string();
  {
    std::ofstream os(path);
    os << "study = flux\nproblem = identity-monopole\n"
          "grid_half_width = 4\ngrid_n = 65\n";
  }
  lap2d_config* cfg = lap2d_config_create();
  REQUIRE(cfg != nullptr);
  CHECK(lap2d_config_load(cfg, path.c_str()) == LAP2D_OK);
  fs::remove(path);

  CHECK(lap2d_config_load(cfg, "/no/such/lap2d.cfg") == LAP2D_ERR_CONFIG);
  CHECK(std::strlen(lap2d_last_error()) > 0);

  // invalid content reports the offending line
  const std::string bad =
      (fs::temp_directory_path() / "lap2d_capi_bad.cfg").string();
  {
    std::ofstream os(bad);
    os << "grid_n = 64\n";  // even point count rejected at validate()
  }
  CHECK(lap2d_config_load(cfg, bad.c_str()) == LAP2D_ERR_CONFIG);
  fs::remove(bad);
  lap2d_config_free(cfg);
}

TEST_CASE("kernels study runs through the C API with an expected red check") {
  lap2d_config* cfg = lap2d_config_create();
  REQUIRE(cfg != nullptr);
  REQUIRE(lap2d_config_set(cfg, "study", "kernels") == LAP2D_OK);

  lap2d_report* report = nullptr;
  const lap2d_status st = lap2d_study_run(cfg, &report);
  CHECK(st == LAP2D_CHECK_FAILED);  // the remainder-bound check is red
  REQUIRE(report != nullptr);
  CHECK(lap2d_report_passed(report) == 0);

  char* doc = lap2d_report_json(report, 0);
  REQUIRE(doc != nullptr);
  CHECK(std::strstr(doc, "\"checks\"") != nullptr);
  CHECK(std::strstr(doc, "expansion-bounded") != nullptr);
  CHECK(std::strstr(doc, "\"timing\"") == nullptr);
  char* timed = lap2d_report_json(report, 1);
  REQUIRE(timed != nullptr);
  CHECK(std::strstr(timed, "\"timing\"") != nullptr);
  lap2d_string_free(doc);
  lap2d_string_free(timed);

  // writing without an out_dir fails as an I/O error; with one it succeeds
  CHECK(lap2d_report_write(report) == LAP2D_ERR_IO);
  lap2d_report_free(report);

  const std::string out =
      (fs::temp_directory_path() / "lap2d_capi_out").string();
  fs::remove_all(out);
  REQUIRE(lap2d_config_set(cfg, "out_dir", out.c_str()) == LAP2D_OK);
  report = nullptr;
  REQUIRE(lap2d_study_run(cfg, &report) == LAP2D_CHECK_FAILED);
  CHECK(lap2d_report_write(report) == LAP2D_OK);
  CHECK(fs::exists(fs::path(out) / "report.json"));
  fs::remove_all(out);

  lap2d_report_free(report);
  lap2d_report_free(nullptr);  // no-op
  lap2d_config_free(cfg);
}

TEST_CASE("study run argument and configuration failures") {
  lap2d_report* report = nullptr;
  CHECK(lap2d_study_run(nullptr, &report) == LAP2D_ERR_INVALID_ARG);
  CHECK(report == nullptr);

  lap2d_config* cfg = lap2d_config_create();
  REQUIRE(cfg != nullptr);
  CHECK(lap2d_study_run(cfg, nullptr) == LAP2D_ERR_INVALID_ARG);

  // unknown problem surfaces as a config error, report untouched
  REQUIRE(lap2d_config_set(cfg, "problem", "no-such-problem") == LAP2D_OK);
  CHECK(lap2d_study_run(cfg, &report) == LAP2D_ERR_CONFIG);
  CHECK(report == nullptr);
  CHECK(std::strstr(lap2d_last_error(), "no-such-problem") != nullptr);
  lap2d_config_free(cfg);

  CHECK(lap2d_report_passed(nullptr) == 0);
  CHECK(lap2d_report_json(nullptr, 1) == nullptr);
  CHECK(lap2d_report_write(nullptr) == LAP2D_ERR_INVALID_ARG);
}

TEST_CASE("problem listing is caller-owned") {
  char* text = lap2d_list_problems();
  REQUIRE(text != nullptr);
  CHECK(std::strstr(text, "identity-dipole") != nullptr);
  CHECK(std::strstr(text, "anisotropic-dipole") != nullptr);
  lap2d_string_free(text);
  lap2d_string_free(nullptr);  // no-op
}
