#include "lap2d.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "lap2d/errors.hpp"
#include "lap2d/study.hpp"

struct lap2d_config {
  lap2d::harness::StudyConfig value;
};

struct lap2d_report {
  lap2d::harness::StudyReport value;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Maps the active exception to a status code and records its message.
lap2d_status status_from_exception() {
  try {
    throw;
  } catch (const lap2d::config_error& e) {
    set_error(e.what());
    return LAP2D_ERR_CONFIG;
  } catch (const lap2d::solver_error& e) {
    set_error(e.what());
    return LAP2D_ERR_SOLVER;
  } catch (const lap2d::domain_error& e) {
    set_error(e.what());
    return LAP2D_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return LAP2D_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LAP2D_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return LAP2D_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* lap2d_version(void) { return "0.1.0"; }

const char* lap2d_last_error(void) { return g_last_error.c_str(); }

lap2d_config* lap2d_config_create(void) {
  try {
    set_error("");
    return new lap2d_config{};
  } catch (...) {
    status_from_exception();
    return nullptr;
  }
}

void lap2d_config_free(lap2d_config* config) { delete config; }

lap2d_status lap2d_config_load(lap2d_config* config, const char* path) {
  if (!config || !path) {
    set_error("lap2d_config_load: null argument");
    return LAP2D_ERR_INVALID_ARG;
  }
  try {
    set_error("");
    config->value = lap2d::harness::parse_config_file(path);
    return LAP2D_OK;
  } catch (...) {
    return status_from_exception();
  }
}

lap2d_status lap2d_config_set(lap2d_config* config, const char* key,
                              const char* value) {
  if (!config || !key || !value) {
    set_error("lap2d_config_set: null argument");
    return LAP2D_ERR_INVALID_ARG;
  }
  try {
    set_error("");
    config->value.set(key, value);
    return LAP2D_OK;
  } catch (...) {
    return status_from_exception();
  }
}

lap2d_status lap2d_study_run(const lap2d_config* config,
                             lap2d_report** out_report) {
  if (!config || !out_report) {
    set_error("lap2d_study_run: null argument");
    return LAP2D_ERR_INVALID_ARG;
  }
  try {
    set_error("");
    auto report = std::make_unique<lap2d_report>();
    report->value = lap2d::harness::run_study(config->value);
    const bool ok = report->value.passed();
    *out_report = report.release();
    return ok ? LAP2D_OK : LAP2D_CHECK_FAILED;
  } catch (...) {
    return status_from_exception();
  }
}

void lap2d_report_free(lap2d_report* report) { delete report; }

int lap2d_report_passed(const lap2d_report* report) {
  return report && report->value.passed() ? 1 : 0;
}

char* lap2d_report_json(const lap2d_report* report, int include_timing) {
  if (!report) {
    set_error("lap2d_report_json: null report");
    return nullptr;
  }
  try {
    set_error("");
    return dup_string(report->value.to_json(include_timing != 0));
  } catch (...) {
    status_from_exception();
    return nullptr;
  }
}

lap2d_status lap2d_report_write(const lap2d_report* report) {
  if (!report) {
    set_error("lap2d_report_write: null report");
    return LAP2D_ERR_INVALID_ARG;
  }
  try {
    set_error("");
    report->value.write_outputs();
    return LAP2D_OK;
  } catch (const lap2d::config_error& e) {
    set_error(e.what());
    return LAP2D_ERR_IO;
  } catch (...) {
    return status_from_exception();
  }
}

int lap2d_selftest(void) {
  try {
    set_error("");
    return lap2d::harness::selftest(std::cout);
  } catch (...) {
    status_from_exception();
    return -1;
  }
}

char* lap2d_list_problems(void) {
  try {
    set_error("");
    return dup_string(lap2d::harness::list_problems_text());
  } catch (...) {
    status_from_exception();
    return nullptr;
  }
}

void lap2d_string_free(char* s) { std::free(s); }

}  // extern "C"
