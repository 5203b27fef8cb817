#include "lap2d/study.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "lap2d/errors.hpp"
#include "lap2d/exterior.hpp"
#include "lap2d/parallel.hpp"
#include "lap2d/special_functions.hpp"

namespace lap2d::harness {

namespace {

using json = nlohmann::json;
using model::Complex;
using model::Problem;
using model::SpectralShift;
using solver::BoundaryClosure;

// ---------------------------------------------------------------------------
// Small string / parsing helpers for the flat key = value config format.

std::string trim(const std::string& s) {
  size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse '" + value +
                       "' as a real number");
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse '" + value +
                       "' as an integer");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw config_error("config key '" + key + "': cannot parse '" + value +
                     "' as a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw config_error("config key '" + key + "': empty list element");
    out.push_back(to_double(key, item));
  }
  if (out.empty())
    throw config_error("config key '" + key + "': empty list");
  return out;
}

// Deterministic number formatting for the CSV tables.
std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Built-in tolerances; any of these can be overridden with `tol.<name>`.

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table = {
      // kernel suite
      {"wronskian", 1e-9},
      {"branch_overlap", 1e-9},
      {"log_kernel_far_bound", 0.25},
      {"wave_kernel_far_bound", 0.25},
      {"expansion_headroom", 2.0},
      {"alpha_slope_rel", 0.02},
      {"alpha_imag_abs", 1e-12},
      {"small_z_match", 1e-4},
      // ladders and uniform bounds
      {"cauchy_final", 1e-3},
      {"ladder_integral", 1e-3},
      {"ladder_sup_half", 1e-3},
      {"uniform_bound_growth", 1.5},
      {"helmholtz_bound_growth", 1.5},
      // flux
      {"flux_abs", 1e-3},
      {"flux_mass_rel", 0.02},
      {"flux_spread", 0.01},
      {"ring_identity", 1e-6},
      // decay and far field
      {"decay_exponent_one", 0.15},
      {"decay_exponent_half", 0.1},
      {"origin_step_rel", 0.10},
      {"far_field_log_rel", 0.05},
      // representation and radiation
      {"representation_rel", 0.01},
      {"radiation_exponent_min", 1.0},
      {"radiation_incoming_floor", 0.5},
      // limits and oracles
      {"k_limit_final", 5e-3},
      {"oracle_rel", 0.02},
  };
  return table;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void add_check(StudyReport& report, std::string name, double value,
               double tolerance, bool pass, std::string note = {}) {
  report.checks.push_back(
      {std::move(name), value, tolerance, pass, std::move(note)});
}

// ---------------------------------------------------------------------------
// Shared study machinery.

BoundaryClosure closure_for(const SpectralShift& shift, int mode) {
  switch (shift.kind()) {
    case model::ShiftKind::zero_energy_regularized:
      return BoundaryClosure::robin(
          kernels::zero_energy_wavenumber(shift.eps()).value(), mode);
    case model::ShiftKind::zero_energy_limit:
      // Static decaying closure; only the m >= 1 channel decays, so the
      // limit solve is meaningful for zero-mean sources only.
      return BoundaryClosure::robin(Complex(0.0, 0.0), 1);
    case model::ShiftKind::helmholtz_regularized:
      return BoundaryClosure::robin(
          kernels::helmholtz_wavenumber(shift.k(), shift.eps()).value(), mode);
    case model::ShiftKind::helmholtz_limit:
      return BoundaryClosure::robin(Complex(shift.k(), 0.0), mode);
  }
  throw std::logic_error("closure_for: unknown shift kind");
}

struct SolveBatch {
  std::vector<GridField> fields;
  std::vector<sparse::SolveStats> stats;
  std::vector<double> seconds;
};

// Independent solves over the parameter list; parallel across parameters.
SolveBatch solve_batch(const Problem& problem,
                       const std::vector<SpectralShift>& shifts,
                       const Grid& grid, int mode) {
  SolveBatch batch;
  batch.fields.resize(shifts.size());
  batch.stats.resize(shifts.size());
  batch.seconds.resize(shifts.size());
  parallel_for(shifts.size(), [&](size_t j) {
    Stopwatch watch;
    const auto system =
        solver::assemble(problem.a, shifts[j], grid, closure_for(shifts[j], mode));
    try {
      batch.fields[j] = solver::solve(system, problem.f, &batch.stats[j]);
    } catch (const solver_error& e) {
      throw solver_error(std::string(e.what()) + " [" + shifts[j].describe() +
                         "]");
    }
    batch.seconds[j] = watch.seconds();
  });
  return batch;
}

// Trace circle just outside the perturbation/support disk, kept a few cells
// away from it so the one-sided derivative stencil sees smooth data.
double trace_radius(const Problem& problem, const Grid& grid) {
  const double r0 =
      std::max(problem.a.perturbation_radius, problem.f.support_radius);
  return r0 + std::max(4.0 * grid.spacing(), 0.1 * r0);
}

// Radii for the flux-vs-radius table: the trace circle plus a spread up to
// half the domain, deduplicated.
std::vector<double> flux_table_radii(double r_tr, const Grid& grid) {
  std::vector<double> radii = {r_tr};
  const double r_max = grid.half_width / 2.0;
  for (double r : {2.0, 3.0, 4.0}) {
    if (r > 1.2 * radii.back() && r <= r_max) radii.push_back(r);
  }
  return radii;
}

json norms_to_json(const analysis::WeightedNorms& n) {
  return {{"sup_weighted", n.sup_weighted},
          {"sup_weighted_half", n.sup_weighted_half},
          {"l2_minus_b", n.l2_minus_b},
          {"b", n.b}};
}

json ladder_to_json(const analysis::ConvergenceLadder& lad) {
  return {{"parameters", lad.parameters},
          {"pairwise_norm_diffs", lad.pairwise_norm_diffs},
          {"norm", analysis::norm_kind_name(lad.norm_kind)},
          {"tolerance", lad.tolerance},
          {"cauchy_pass", lad.cauchy_pass}};
}

json fit_to_json(const analysis::DecayFit& fit) {
  return {{"exponent", fit.exponent},     {"prefactor", fit.prefactor},
          {"window_lo", fit.window_lo},   {"window_hi", fit.window_hi},
          {"residual", fit.residual},     {"power_law", fit.power_law}};
}

// Evaluates the boundary representation at 8 off-axis points on
// |x| = 2 * trace radius and compares with the interior solution.
CheckResult representation_check(const StudyConfig& config,
                                 const GridField& field,
                                 const boundary::BoundaryTrace& trace,
                                 const SpectralShift& shift) {
  const double r_eval = 2.0 * trace.radius;
  double max_err = 0.0, max_val = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double theta = kernels::two_pi * (i + 0.37) / 8.0;
    const Point2 x = from_polar(r_eval, theta);
    const Complex via_rep = boundary::exterior_eval(trace, x, shift);
    const Complex direct = field.interpolate(x);
    max_err = std::max(max_err, std::abs(via_rep - direct));
    max_val = std::max(max_val, std::abs(direct));
  }
  CheckResult check;
  check.name = "representation";
  check.tolerance = config.tol("representation_rel");
  if (max_val < 1e-14) {
    check.value = max_err;
    check.pass = max_err < 1e-14;
    check.note = "field vanishes at the test radius; absolute comparison";
    return check;
  }
  check.value = max_err / max_val;
  check.pass = check.value <= check.tolerance;
  check.note = "boundary representation vs interior field at twice the trace "
               "radius (relative max error)";
  return check;
}

// Truncation-sensitivity entry: the weighted sup norm of a coarse solve at
// half-width L against the same solve at 2L (same spacing), both measured
// on the ball of radius L/2.
json truncation_sensitivity(const Problem& problem, const SpectralShift& shift,
                            int mode, const StudyConfig& config) {
  const double L = config.grid_half_width;
  const int coarse_n = 129;
  const Grid grid_l(L, coarse_n);
  const Grid grid_2l(2.0 * L, 2 * coarse_n - 1);
  double norm_l = 0.0, norm_2l = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const Grid& g = pass == 0 ? grid_l : grid_2l;
    const auto system = solver::assemble(problem.a, shift, g,
                                         closure_for(shift, mode));
    const GridField u = solver::solve(system, problem.f);
    const double norm =
        analysis::compute_norms(u, config.b, L / 2.0).sup_weighted;
    (pass == 0 ? norm_l : norm_2l) = norm;
  }
  const double rel =
      std::abs(norm_2l - norm_l) / std::max(std::abs(norm_l), 1e-300);
  return {{"half_width", L},
          {"norm_sup_weighted", norm_l},
          {"doubled_half_width_norm", norm_2l},
          {"rel_change", rel},
          {"grid_n", coarse_n}};
}

std::string trace_csv(const boundary::BoundaryTrace& trace) {
  std::ostringstream os;
  os << "# radius=" << fmt(trace.radius) << " m=" << trace.samples() << "\n";
  os << "angle,u_re,u_im,uN_re,uN_im\n";
  for (int i = 0; i < trace.samples(); ++i) {
    os << fmt(trace.angles[i]) << ',' << fmt(trace.values[i].real()) << ','
       << fmt(trace.values[i].imag()) << ','
       << fmt(trace.normal_derivs[i].real()) << ','
       << fmt(trace.normal_derivs[i].imag()) << "\n";
  }
  return os.str();
}

std::string flux_csv(const std::vector<double>& radii,
                     const std::vector<Complex>& fluxes) {
  std::ostringstream os;
  os << "radius,flux_re,flux_im\n";
  for (size_t i = 0; i < radii.size(); ++i) {
    os << fmt(radii[i]) << ',' << fmt(fluxes[i].real()) << ','
       << fmt(fluxes[i].imag()) << "\n";
  }
  return os.str();
}

// Angular-mean magnitude samples of a far-field callable, for plotting the
// decay fits.
std::string decay_csv(const std::function<Complex(Point2)>& eval, double lo,
                      double hi, int directions, int radial_samples) {
  std::ostringstream os;
  os << "radius,mean_abs\n";
  for (int i = 0; i < radial_samples; ++i) {
    const double t = double(i) / (radial_samples - 1);
    const double r = lo * std::pow(hi / lo, t);
    double mean = 0.0;
    for (int d = 0; d < directions; ++d) {
      const double theta = kernels::two_pi * (d + 0.5) / directions;
      mean += std::abs(eval(from_polar(r, theta)));
    }
    os << fmt(r) << ',' << fmt(mean / directions) << "\n";
  }
  return os.str();
}

void maybe_write_field(const StudyConfig& config, const std::string& name,
                       const GridField& field) {
  if (!config.write_fields || config.out_dir.empty()) return;
  std::filesystem::create_directories(config.out_dir);
  write_binary(field,
               (std::filesystem::path(config.out_dir) / (name + ".bin"))
                   .string());
}

// Oracle cross-check for identity-coefficient problems: FD solution vs the
// convolution oracle on the ball of twice the source scale, sampled on a
// decimated node set.
std::optional<CheckResult> oracle_check(const StudyConfig& config,
                                        const Problem& problem,
                                        const SpectralShift& shift,
                                        const GridField& field) {
  if (!problem.a.is_identity()) return std::nullopt;
  const Grid& grid = field.grid();
  const double r0 =
      std::max(problem.a.perturbation_radius, problem.f.support_radius);
  const double r_ball = 2.0 * r0;
  const int stride = std::max(1, (grid.n - 1) / 128);
  std::vector<Point2> points;
  std::vector<std::pair<int, int>> nodes;
  for (int iy = 0; iy < grid.n; iy += stride) {
    for (int ix = 0; ix < grid.n; ix += stride) {
      const Point2 p = grid.node(ix, iy);
      if (norm(p) <= r_ball) {
        points.push_back(p);
        nodes.emplace_back(ix, iy);
      }
    }
  }
  const double qstep = grid.spacing() / 4.0;
  const auto reference = solver::conv_oracle(problem.f, shift, points, qstep);
  double max_err = 0.0, max_ref = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const Complex fd = field.at(nodes[i].first, nodes[i].second);
    max_err = std::max(max_err, std::abs(fd - reference[i]));
    max_ref = std::max(max_ref, std::abs(reference[i]));
  }
  CheckResult check;
  check.name = "oracle-agreement";
  check.value = max_err / std::max(max_ref, 1e-300);
  check.tolerance = config.tol("oracle_rel");
  check.pass = check.value <= check.tolerance;
  check.note = "grid solution vs convolution oracle on the ball of twice the "
               "source scale (relative max error)";
  return check;
}

// Line fit of log(values) against log(radii); returns the decay exponent q
// in values ~ r^{-q}.
double fitted_decay_exponent(const std::vector<double>& radii,
                             const std::vector<double>& values) {
  const size_t n = radii.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(radii[i]);
    const double y = std::log(std::max(values[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return -(n * sxy - sx * sy) / denom;
}

}  // namespace

// ---------------------------------------------------------------------------
// StudyConfig.

std::vector<double> StudyConfig::default_eps_ladder() {
  std::vector<double> out;
  double eps = 0.1;
  for (int j = 0; j < 8; ++j) {
    out.push_back(eps);
    eps /= 4.0;
  }
  return out;
}

double StudyConfig::tol(const std::string& name) const {
  if (auto it = tolerance_overrides.find(name); it != tolerance_overrides.end())
    return it->second;
  const auto& table = default_tolerances();
  const auto it = table.find(name);
  if (it == table.end())
    throw config_error("unknown tolerance name '" + name + "'");
  return it->second;
}

void StudyConfig::set(const std::string& key, const std::string& value) {
  if (key == "study") {
    study = parse_study_kind(value);
  } else if (key == "problem") {
    problem = value;
  } else if (key == "grid_half_width") {
    grid_half_width = to_double(key, value);
  } else if (key == "grid_n") {
    grid_n = to_int(key, value);
  } else if (key == "eps_ladder") {
    eps_ladder = to_list(key, value);
  } else if (key == "k_ladder") {
    k_ladder = to_list(key, value);
  } else if (key == "k") {
    k = to_double(key, value);
  } else if (key == "b") {
    b = to_double(key, value);
  } else if (key == "trace_m") {
    trace_m = to_int(key, value);
  } else if (key == "threads") {
    threads = to_int(key, value);
  } else if (key == "out_dir") {
    out_dir = value;
  } else if (key == "write_fields") {
    write_fields = to_bool(key, value);
  } else if (key.rfind("tol.", 0) == 0) {
    const std::string name = key.substr(4);
    if (default_tolerances().find(name) == default_tolerances().end())
      throw config_error("unknown tolerance name '" + name + "' in key '" +
                         key + "'");
    tolerance_overrides[name] = to_double(key, value);
  } else {
    throw config_error("unknown config key '" + key + "'");
  }
}

void StudyConfig::validate() const {
  const Grid probe(grid_half_width, grid_n);  // throws config_error if invalid
  (void)probe;
  auto check_ladder = [](const char* name, const std::vector<double>& v) {
    if (v.empty())
      throw config_error(std::string(name) + " must not be empty");
    for (size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0))
        throw config_error(std::string(name) + " entries must be positive");
      if (i > 0 && !(v[i] < v[i - 1]))
        throw config_error(std::string(name) +
                           " must be strictly decreasing");
    }
  };
  check_ladder("eps_ladder", eps_ladder);
  check_ladder("k_ladder", k_ladder);
  if (!(k > 0.0)) throw config_error("k must be positive");
  if (!(b > 1.0))
    throw config_error("b must exceed 1 (the integral norm must control the "
                       "slow-decay tail)");
  if (trace_m < 64 || trace_m % 2 != 0)
    throw config_error("trace_m must be even and at least 64");
  if (threads < 0) throw config_error("threads must be non-negative");
  for (const auto& [name, value] : tolerance_overrides) {
    if (!(value > 0.0))
      throw config_error("tolerance override '" + name +
                         "' must be positive");
  }
}

StudyConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config file '" + path + "'");
  StudyConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected `key = value`");
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const config_error& e) {
      throw config_error(path + ":" + std::to_string(line_no) + ": " +
                         e.what());
    }
  }
  config.validate();
  return config;
}

std::string study_kind_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::lap_zero: return "lap-zero";
    case StudyKind::lap_helmholtz: return "lap-helmholtz";
    case StudyKind::k_to_zero: return "k-to-zero";
    case StudyKind::decay: return "decay";
    case StudyKind::flux: return "flux";
    case StudyKind::kernels: return "kernels";
  }
  throw std::logic_error("study_kind_name: unknown kind");
}

StudyKind parse_study_kind(const std::string& name) {
  for (StudyKind kind :
       {StudyKind::lap_zero, StudyKind::lap_helmholtz, StudyKind::k_to_zero,
        StudyKind::decay, StudyKind::flux, StudyKind::kernels}) {
    if (study_kind_name(kind) == name) return kind;
  }
  throw config_error("unknown study '" + name + "'");
}

// ---------------------------------------------------------------------------
// StudyReport.

bool StudyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

std::string StudyReport::to_json(bool include_timing) const {
  json doc;
  doc["version"] = "0.1.0";
  doc["study"] = study_kind_name(config.study);
  doc["problem"] = config.problem;
  json cfg;
  cfg["grid_half_width"] = config.grid_half_width;
  cfg["grid_n"] = config.grid_n;
  cfg["eps_ladder"] = config.eps_ladder;
  cfg["k_ladder"] = config.k_ladder;
  cfg["k"] = config.k;
  cfg["b"] = config.b;
  cfg["trace_m"] = config.trace_m;
  cfg["threads"] = config.threads;
  cfg["write_fields"] = config.write_fields;
  cfg["out_dir"] = config.out_dir;
  cfg["tolerance_overrides"] = config.tolerance_overrides;
  doc["config"] = cfg;
  json cs = json::array();
  for (const CheckResult& c : checks) {
    cs.push_back({{"name", c.name},
                  {"value", c.value},
                  {"tolerance", c.tolerance},
                  {"pass", c.pass},
                  {"note", c.note}});
  }
  doc["checks"] = cs;
  doc["notes"] = notes;
  doc["details"] = details.is_null() ? json::object() : details;
  doc["passed"] = passed();
  if (include_timing) {
    doc["timing"] = {{"total_seconds", total_seconds},
                     {"solve_seconds", solve_seconds}};
  }
  return doc.dump(2) + "\n";
}

void StudyReport::write_outputs() const {
  if (config.out_dir.empty())
    throw config_error("out_dir is not set; cannot write outputs");
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "report.json");
    if (!os)
      throw config_error("cannot write report to '" + config.out_dir + "'");
    os << to_json(true);
  }
  for (const auto& [stem, payload] : tables) {
    std::ofstream os(dir / (stem + ".csv"));
    if (!os)
      throw config_error("cannot write table '" + stem + "' to '" +
                         config.out_dir + "'");
    os << payload;
  }
}

// ---------------------------------------------------------------------------
// lap-zero: the epsilon ladder for the static operator.

StudyReport study_lap_zero(const StudyConfig& config) {
  Stopwatch total;
  StudyReport report;
  report.config = config;
  const Problem& problem = model::find_problem(config.problem);
  const Grid grid(config.grid_half_width, config.grid_n);
  const int mode = problem.zero_mean ? 1 : 0;
  const size_t n_eps = config.eps_ladder.size();

  std::vector<SpectralShift> shifts;
  for (double eps : config.eps_ladder)
    shifts.push_back(SpectralShift::zero_energy(eps));
  const bool limit_exists = problem.zero_mean;
  if (limit_exists) shifts.push_back(SpectralShift::zero_energy_limit());

  for (double eps : config.eps_ladder) {
    if (config.grid_half_width < 10.0 / std::sqrt(eps)) {
      report.notes.push_back(
          "plateau scale 1/sqrt(eps) exceeds the domain for eps <= " +
          fmt(eps) + "; truncation is handled by the radiation closure");
      break;
    }
  }

  const SolveBatch batch = solve_batch(problem, shifts, grid, mode);
  report.solve_seconds = batch.seconds;

  // Per-parameter norms (restricted to the half-domain ball, where the
  // ladder is measured).
  const double ball = config.grid_half_width / 2.0;
  std::vector<analysis::WeightedNorms> norms(n_eps);
  for (size_t j = 0; j < n_eps; ++j)
    norms[j] = analysis::compute_norms(batch.fields[j], config.b, ball);

  // Ladder verdict in the weighted sup norm.
  std::optional<analysis::ConvergenceLadder> lad;
  if (n_eps >= 3) {
    const std::vector<GridField> ladder_fields(batch.fields.begin(),
                                               batch.fields.begin() + n_eps);
    analysis::LadderOptions opts;
    opts.kind = analysis::NormKind::weighted_sup;
    opts.b = config.b;
    opts.max_radius = ball;
    opts.tolerance = config.tol("cauchy_final");
    lad = analysis::ladder(ladder_fields, config.eps_ladder, opts);
    report.details["ladder"] = ladder_to_json(*lad);
    if (problem.zero_mean) {
      add_check(report, "ladder-cauchy", lad->pairwise_norm_diffs.back(),
                opts.tolerance, lad->cauchy_pass,
                "pairwise diffs non-increasing and the final one below "
                "tolerance (weighted sup norm on the half-domain ball)");
    } else {
      add_check(report, "ladder-divergence", lad->pairwise_norm_diffs.back(),
                opts.tolerance, !lad->cauchy_pass,
                "nonzero-mean source: the ladder must NOT be Cauchy "
                "(passes when the Cauchy verdict fails)");
    }
  } else {
    report.notes.push_back(
        "epsilon ladder has fewer than 3 entries; Cauchy verdict skipped");
  }

  // Uniform bound sup_eps ||u_eps|| <= c ||f|| (zero-mean case only; the
  // nonzero-mean family diverges logarithmically by design).
  const double f_l2 =
      analysis::source_norm_l2(problem.f, grid.spacing() / 2.0);
  if (problem.zero_mean && f_l2 > 0.0) {
    double max_ratio = 0.0;
    for (size_t j = 0; j < n_eps; ++j)
      max_ratio = std::max(max_ratio, norms[j].sup_weighted / f_l2);
    const double growth = max_ratio / (norms[0].sup_weighted / f_l2);
    report.details["uniform_bound_c"] = max_ratio;
    add_check(report, "uniform-bound", growth,
              config.tol("uniform_bound_growth"),
              growth <= config.tol("uniform_bound_growth"),
              "largest ratio (weighted sup norm / source L2 norm) across the "
              "ladder, relative to the coarsest-parameter ratio");
  }

  // Limit candidate: the true limit solve for zero-mean sources, the finest
  // regularized solve otherwise.
  const GridField& target =
      limit_exists ? batch.fields.back() : batch.fields[n_eps - 1];
  const SpectralShift target_shift =
      limit_exists ? shifts.back() : shifts[n_eps - 1];

  const double r_tr = trace_radius(problem, grid);
  const auto trace = boundary::trace_on_circle(target, r_tr, config.trace_m);
  const Complex flux_val = boundary::flux(trace);
  const Complex mass = model::source_mean(problem.f, grid.spacing() / 2.0);
  report.details["flux"] = {{"radius", r_tr},
                            {"re", flux_val.real()},
                            {"im", flux_val.imag()},
                            {"source_mean_re", mass.real()},
                            {"source_mean_im", mass.imag()}};
  if (problem.zero_mean) {
    add_check(report, "flux-vanishes", std::abs(flux_val),
              config.tol("flux_abs"),
              std::abs(flux_val) <= config.tol("flux_abs"),
              "total outward flux through the trace circle");
  } else {
    const double rel = std::abs(flux_val + mass) / std::abs(mass);
    add_check(report, "flux-matches-mass", rel, config.tol("flux_mass_rel"),
              rel <= config.tol("flux_mass_rel"),
              "flux equals minus the source mass (relative error)");
  }

  // Far-field behaviour through the boundary representation (insensitive to
  // truncation effects: interior-regular contamination integrates to zero).
  const auto eval_far = [&](Point2 x) {
    return boundary::exterior_eval(trace, x, target_shift);
  };
  const double fit_lo = 4.0 * r_tr, fit_hi = 16.0 * r_tr;
  if (problem.zero_mean) {
    const auto fit = analysis::fit_decay_fn(eval_far, fit_lo, fit_hi, 16, 25);
    report.details["decay_fit"] = fit_to_json(fit);
    const double dev = std::abs(fit.exponent - 1.0);
    add_check(report, "decay-exponent", dev, config.tol("decay_exponent_one"),
              dev <= config.tol("decay_exponent_one"),
              "far-field decay exponent vs the target 1 (fitted through the "
              "boundary representation)");
  } else {
    const auto far = analysis::fit_far_field_log(eval_far, fit_lo, fit_hi, 16,
                                                 25);
    report.details["far_field_log"] = {{"c_log_re", far.c_log.real()},
                                       {"c_log_im", far.c_log.imag()},
                                       {"c0_re", far.c0.real()},
                                       {"c0_im", far.c0.imag()},
                                       {"rms", far.rms}};
    const Complex expected = -flux_val / kernels::two_pi;
    const double rel =
        std::abs(far.c_log - expected) / std::max(std::abs(expected), 1e-300);
    add_check(report, "far-field-log", rel, config.tol("far_field_log_rel"),
              rel <= config.tol("far_field_log_rel"),
              "coefficient of ln(1/|x|) vs -flux/(2 pi)");
    const auto fit = analysis::fit_decay_fn(eval_far, 1.5 * r_tr, fit_hi, 16,
                                            25);
    report.details["decay_fit"] = fit_to_json(fit);
    add_check(report, "log-profile-flagged", fit.residual,
              analysis::power_law_residual_threshold, !fit.power_law,
              "logarithmic far field must not register as a clean power law "
              "(passes when the fit residual exceeds the power-law "
              "threshold)");
  }

  // Origin blow-up law via the convolution oracle (identity coefficients).
  if (!problem.zero_mean) {
    if (problem.a.is_identity()) {
      const double qstep =
          std::min(grid.spacing() / 2.0, problem.f.support_radius / 128.0);
      std::vector<Complex> origin(n_eps);
      for (size_t j = 0; j < n_eps; ++j)
        origin[j] =
            solver::conv_oracle(problem.f, shifts[j], {Point2{0.0, 0.0}},
                                qstep)[0];
      json steps = json::array();
      double last_rel = 0.0;
      for (size_t j = 0; j + 1 < n_eps; ++j) {
        const double step = std::abs(origin[j + 1] - origin[j]);
        const double expected =
            std::log(config.eps_ladder[j] / config.eps_ladder[j + 1]) /
            (4.0 * kernels::pi);
        last_rel = std::abs(step - expected) / expected;
        steps.push_back({{"eps_coarse", config.eps_ladder[j]},
                         {"eps_fine", config.eps_ladder[j + 1]},
                         {"step", step},
                         {"expected", expected},
                         {"rel_error", last_rel}});
      }
      report.details["origin_ladder"] = steps;
      if (n_eps >= 2) {
        add_check(report, "origin-log-step", last_rel,
                  config.tol("origin_step_rel"),
                  last_rel <= config.tol("origin_step_rel"),
                  "|u(0) step| between the two finest parameters vs "
                  "ln(eps ratio)/(4 pi)");
      }
    } else {
      report.notes.push_back(
          "origin blow-up check skipped: the convolution oracle requires "
          "identity coefficients");
    }
  }

  report.checks.push_back(
      representation_check(config, target, trace, target_shift));

  if (const auto oracle =
          oracle_check(config, problem, target_shift, target)) {
    report.checks.push_back(*oracle);
  }

  report.details["truncation_sensitivity"] =
      truncation_sensitivity(problem, target_shift, mode, config);

  // Parameter records and tables.
  {
    json params = json::array();
    for (size_t j = 0; j < n_eps; ++j) {
      params.push_back({{"eps", config.eps_ladder[j]},
                        {"iterations", batch.stats[j].iterations},
                        {"relative_residual", batch.stats[j].relative_residual},
                        {"norms", norms_to_json(norms[j])}});
    }
    if (limit_exists) {
      params.push_back(
          {{"eps", 0.0},
           {"limit", true},
           {"iterations", batch.stats.back().iterations},
           {"relative_residual", batch.stats.back().relative_residual},
           {"norms", norms_to_json(analysis::compute_norms(
                         batch.fields.back(), config.b, ball))}});
    }
    report.details["parameters"] = params;
  }
  {
    std::ostringstream os;
    os << "eps,iterations,relative_residual,sup_weighted,diff_sup\n";
    for (size_t j = 0; j < n_eps; ++j) {
      os << fmt(config.eps_ladder[j]) << ',' << batch.stats[j].iterations
         << ',' << fmt(batch.stats[j].relative_residual) << ','
         << fmt(norms[j].sup_weighted) << ',';
      if (j > 0 && lad) os << fmt(lad->pairwise_norm_diffs[j - 1]);
      os << "\n";
    }
    report.tables["ladder"] = os.str();
  }
  report.tables["decay"] = decay_csv(eval_far, fit_lo, fit_hi, 16, 25);
  {
    const auto radii = flux_table_radii(r_tr, grid);
    const auto fluxes =
        boundary::flux_conservation(target, radii, config.trace_m);
    report.tables["flux"] = flux_csv(radii, fluxes);
  }
  report.tables["trace"] = trace_csv(trace);

  for (size_t j = 0; j < n_eps; ++j)
    maybe_write_field(config, "field_eps" + std::to_string(j),
                      batch.fields[j]);
  if (limit_exists) maybe_write_field(config, "field_limit", batch.fields.back());

  report.total_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// lap-helmholtz: the epsilon ladder at fixed positive energy.

StudyReport study_lap_helmholtz(const StudyConfig& config) {
  Stopwatch total;
  StudyReport report;
  report.config = config;
  const Problem& problem = model::find_problem(config.problem);
  const Grid grid(config.grid_half_width, config.grid_n);
  const int mode = problem.zero_mean ? 1 : 0;
  const size_t n_eps = config.eps_ladder.size();

  std::vector<SpectralShift> shifts;
  for (double eps : config.eps_ladder)
    shifts.push_back(SpectralShift::helmholtz(config.k, eps));
  shifts.push_back(SpectralShift::helmholtz_limit(config.k));

  const SolveBatch batch = solve_batch(problem, shifts, grid, mode);
  report.solve_seconds = batch.seconds;

  std::vector<analysis::WeightedNorms> norms(n_eps);
  for (size_t j = 0; j < n_eps; ++j)
    norms[j] = analysis::compute_norms(batch.fields[j], config.b);

  const std::vector<GridField> ladder_fields(batch.fields.begin(),
                                             batch.fields.begin() + n_eps);
  std::optional<analysis::ConvergenceLadder> lad_l2, lad_sup;
  if (n_eps >= 3) {
    analysis::LadderOptions opts;
    opts.b = config.b;
    opts.kind = analysis::NormKind::l2_minus_b;
    opts.tolerance = config.tol("ladder_integral");
    lad_l2 = analysis::ladder(ladder_fields, config.eps_ladder, opts);
    opts.kind = analysis::NormKind::weighted_sup_half;
    opts.tolerance = config.tol("ladder_sup_half");
    lad_sup = analysis::ladder(ladder_fields, config.eps_ladder, opts);
    report.details["ladder_integral"] = ladder_to_json(*lad_l2);
    report.details["ladder_sup_half"] = ladder_to_json(*lad_sup);
    add_check(report, "ladder-integral-norm",
              lad_l2->pairwise_norm_diffs.back(), lad_l2->tolerance,
              lad_l2->cauchy_pass,
              "Cauchy verdict in the weighted integral norm");
    add_check(report, "ladder-sup-half-norm",
              lad_sup->pairwise_norm_diffs.back(), lad_sup->tolerance,
              lad_sup->cauchy_pass,
              "Cauchy verdict in the sup norm weighted by 1 + sqrt(|x|)");
  } else {
    report.notes.push_back(
        "epsilon ladder has fewer than 3 entries; Cauchy verdicts skipped");
  }

  // Uniform resolvent bound ||w_eps||_{-b} <= c ||f||_b.
  const double f_b =
      analysis::source_norm_b(problem.f, config.b, grid.spacing() / 2.0);
  if (f_b > 0.0) {
    double max_ratio = 0.0;
    for (size_t j = 0; j < n_eps; ++j)
      max_ratio = std::max(max_ratio, norms[j].l2_minus_b / f_b);
    const double growth = max_ratio / (norms[0].l2_minus_b / f_b);
    report.details["uniform_bound_c"] = max_ratio;
    add_check(report, "uniform-bound", growth,
              config.tol("helmholtz_bound_growth"),
              growth <= config.tol("helmholtz_bound_growth"),
              "largest ratio (weighted integral norm / weighted source norm) "
              "across the ladder, relative to the coarsest-parameter ratio");
  }

  const GridField& limit = batch.fields.back();
  const SpectralShift limit_shift = shifts.back();
  report.details["limit_norms"] =
      norms_to_json(analysis::compute_norms(limit, config.b));

  const double r_tr = trace_radius(problem, grid);
  const auto trace = boundary::trace_on_circle(limit, r_tr, config.trace_m);
  const Complex flux_val = boundary::flux(trace);
  report.details["flux"] = {{"radius", r_tr},
                            {"re", flux_val.real()},
                            {"im", flux_val.imag()}};

  // Half-power decay through the representation.
  const auto eval_far = [&](Point2 x) {
    return boundary::exterior_eval(trace, x, limit_shift);
  };
  const double fit_lo = 4.0 * r_tr, fit_hi = 16.0 * r_tr;
  const auto fit = analysis::fit_decay_fn(eval_far, fit_lo, fit_hi, 16, 25);
  report.details["decay_fit"] = fit_to_json(fit);
  const double dev = std::abs(fit.exponent - 0.5);
  add_check(report, "decay-exponent-half", dev,
            config.tol("decay_exponent_half"),
            dev <= config.tol("decay_exponent_half"),
            "far-field decay exponent vs the target 1/2");

  // Radiation-condition residual: decreasing over radii for the outgoing
  // solution, roughly constant for the conjugated (incoming) control field.
  {
    const double r_lo =
        std::max(problem.a.perturbation_radius, problem.f.support_radius) +
        1.0;
    const double r_hi = config.grid_half_width / 2.0;
    std::vector<double> radii;
    for (int i = 0; i < 5; ++i)
      radii.push_back(r_lo + (r_hi - r_lo) * i / 4.0);
    const auto residuals =
        boundary::radiation_residual(limit, config.k, radii, config.trace_m);
    bool monotone = true;
    for (size_t i = 0; i + 1 < residuals.size(); ++i)
      if (!(residuals[i + 1] < residuals[i])) monotone = false;
    const double q = fitted_decay_exponent(radii, residuals);
    add_check(report, "radiation-decay", q,
              config.tol("radiation_exponent_min"),
              monotone && q >= config.tol("radiation_exponent_min"),
              monotone ? "residual strictly decreasing; value is the fitted "
                         "decay exponent (must be >= tolerance)"
                       : "residual failed strict monotonicity across radii");

    const kernels::WaveNumber kw(Complex(config.k, 0.0));
    const GridField incoming = sample_on_grid(grid, [&](Point2 p) {
      if (norm(p) < 1e-9) return Complex(0.0, 0.0);
      return std::conj(kernels::helmholtz_green(p, Point2{0.0, 0.0}, kw));
    });
    const auto in_res =
        boundary::radiation_residual(incoming, config.k, radii, config.trace_m);
    const double in_ratio =
        in_res.back() / std::max(in_res.front(), 1e-300);
    add_check(report, "radiation-incoming-control", in_ratio,
              config.tol("radiation_incoming_floor"),
              in_ratio >= config.tol("radiation_incoming_floor"),
              "conjugated (incoming) field must NOT satisfy the outgoing "
              "condition: residual ratio across radii stays above the floor");
    {
      std::ostringstream os;
      os << "radius,residual,incoming_residual\n";
      for (size_t i = 0; i < radii.size(); ++i)
        os << fmt(radii[i]) << ',' << fmt(residuals[i]) << ','
           << fmt(in_res[i]) << "\n";
      report.tables["radiation"] = os.str();
    }
  }

  report.checks.push_back(
      representation_check(config, limit, trace, limit_shift));

  if (const auto oracle = oracle_check(config, problem, limit_shift, limit)) {
    report.checks.push_back(*oracle);
  }

  report.details["truncation_sensitivity"] =
      truncation_sensitivity(problem, limit_shift, mode, config);

  {
    json params = json::array();
    for (size_t j = 0; j < n_eps; ++j) {
      params.push_back({{"eps", config.eps_ladder[j]},
                        {"iterations", batch.stats[j].iterations},
                        {"relative_residual", batch.stats[j].relative_residual},
                        {"norms", norms_to_json(norms[j])}});
    }
    params.push_back({{"eps", 0.0},
                      {"limit", true},
                      {"iterations", batch.stats.back().iterations},
                      {"relative_residual",
                       batch.stats.back().relative_residual}});
    report.details["parameters"] = params;
  }
  {
    std::ostringstream os;
    os << "eps,iterations,relative_residual,l2_minus_b,sup_half,diff_l2,"
          "diff_sup_half\n";
    for (size_t j = 0; j < n_eps; ++j) {
      os << fmt(config.eps_ladder[j]) << ',' << batch.stats[j].iterations
         << ',' << fmt(batch.stats[j].relative_residual) << ','
         << fmt(norms[j].l2_minus_b) << ',' << fmt(norms[j].sup_weighted_half)
         << ',';
      if (j > 0 && lad_l2) os << fmt(lad_l2->pairwise_norm_diffs[j - 1]);
      os << ',';
      if (j > 0 && lad_sup) os << fmt(lad_sup->pairwise_norm_diffs[j - 1]);
      os << "\n";
    }
    report.tables["ladder"] = os.str();
  }
  report.tables["decay"] = decay_csv(eval_far, fit_lo, fit_hi, 16, 25);
  {
    const auto radii = flux_table_radii(r_tr, grid);
    const auto fluxes =
        boundary::flux_conservation(limit, radii, config.trace_m);
    report.tables["flux"] = flux_csv(radii, fluxes);
  }
  report.tables["trace"] = trace_csv(trace);

  for (size_t j = 0; j < n_eps; ++j)
    maybe_write_field(config, "field_eps" + std::to_string(j),
                      batch.fields[j]);
  maybe_write_field(config, "field_limit", limit);

  report.total_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// k-to-zero: the low-frequency limit toward the static solution.

StudyReport study_k_to_zero(const StudyConfig& config) {
  Stopwatch total;
  StudyReport report;
  report.config = config;
  const Problem& problem = model::find_problem(config.problem);
  if (!problem.zero_mean) {
    throw config_error(
        "study k-to-zero requires a zero-mean source (compatibility "
        "condition); problem '" + config.problem +
        "' has nonzero source mean");
  }
  const Grid grid(config.grid_half_width, config.grid_n);
  const size_t n_k = config.k_ladder.size();

  std::vector<SpectralShift> shifts;
  shifts.push_back(SpectralShift::zero_energy_limit());
  for (double k : config.k_ladder)
    shifts.push_back(SpectralShift::helmholtz_limit(k));

  const SolveBatch batch = solve_batch(problem, shifts, grid, /*mode=*/1);
  report.solve_seconds = batch.seconds;

  const GridField& u0 = batch.fields.front();
  const double r0 =
      std::max(problem.a.perturbation_radius, problem.f.support_radius);
  const double ann_lo = 2.0 * r0;
  const double ann_hi = config.grid_half_width / 2.0;

  std::vector<double> diffs(n_k);
  for (size_t j = 0; j < n_k; ++j) {
    const GridField d = analysis::difference(batch.fields[j + 1], u0);
    diffs[j] = analysis::weighted_sup_annulus(d, 0.5, ann_lo, ann_hi);
  }
  report.details["difference_norms"] = diffs;
  report.details["annulus"] = {{"lo", ann_lo}, {"hi", ann_hi}};

  if (n_k >= 3) {
    bool monotone = true;
    for (size_t j = 0; j + 1 < n_k; ++j)
      if (diffs[j + 1] > 1.1 * diffs[j]) monotone = false;
    add_check(report, "k-limit-monotone",
              diffs.back() / std::max(diffs.front(), 1e-300), 1.0, monotone,
              "weighted difference norms non-increasing along the k ladder "
              "(10% wobble allowed); value is final/first");
  } else {
    report.notes.push_back(
        "insufficient k ladder for the monotonicity check");
    report.details["insufficient_ladder"] = true;
  }
  add_check(report, "k-limit-final", diffs.back(), config.tol("k_limit_final"),
            diffs.back() <= config.tol("k_limit_final"),
            "final weighted difference norm on the annulus");

  // Representation consistency on the finest-k solution.
  const double r_tr = trace_radius(problem, grid);
  const auto trace =
      boundary::trace_on_circle(batch.fields.back(), r_tr, config.trace_m);
  report.checks.push_back(representation_check(config, batch.fields.back(),
                                               trace, shifts.back()));

  report.details["truncation_sensitivity"] =
      truncation_sensitivity(problem, shifts.front(), /*mode=*/1, config);

  {
    json params = json::array();
    params.push_back({{"k", 0.0},
                      {"limit", true},
                      {"iterations", batch.stats[0].iterations},
                      {"relative_residual",
                       batch.stats[0].relative_residual}});
    for (size_t j = 0; j < n_k; ++j) {
      params.push_back(
          {{"k", config.k_ladder[j]},
           {"iterations", batch.stats[j + 1].iterations},
           {"relative_residual", batch.stats[j + 1].relative_residual},
           {"difference_norm", diffs[j]}});
    }
    report.details["parameters"] = params;
  }
  {
    std::ostringstream os;
    os << "k,iterations,relative_residual,diff_weighted_sup\n";
    for (size_t j = 0; j < n_k; ++j) {
      os << fmt(config.k_ladder[j]) << ',' << batch.stats[j + 1].iterations
         << ',' << fmt(batch.stats[j + 1].relative_residual) << ','
         << fmt(diffs[j]) << "\n";
    }
    report.tables["kladder"] = os.str();
  }

  maybe_write_field(config, "field_static", u0);
  for (size_t j = 0; j < n_k; ++j)
    maybe_write_field(config, "field_k" + std::to_string(j),
                      batch.fields[j + 1]);

  report.total_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// decay: the two far-field exponents (and the logarithmic profile for
// nonzero-mean sources) in one report.

StudyReport study_decay(const StudyConfig& config) {
  Stopwatch total;
  StudyReport report;
  report.config = config;
  const Problem& problem = model::find_problem(config.problem);
  const Grid grid(config.grid_half_width, config.grid_n);
  const int mode = problem.zero_mean ? 1 : 0;

  const SpectralShift static_shift =
      problem.zero_mean ? SpectralShift::zero_energy_limit()
                        : SpectralShift::zero_energy(config.eps_ladder.back());
  const SpectralShift wave_shift = SpectralShift::helmholtz_limit(config.k);
  const SolveBatch batch =
      solve_batch(problem, {static_shift, wave_shift}, grid, mode);
  report.solve_seconds = batch.seconds;

  const double r_tr = trace_radius(problem, grid);
  const auto static_trace =
      boundary::trace_on_circle(batch.fields[0], r_tr, config.trace_m);
  const auto wave_trace =
      boundary::trace_on_circle(batch.fields[1], r_tr, config.trace_m);
  const auto eval_static = [&](Point2 x) {
    return boundary::exterior_eval(static_trace, x, static_shift);
  };
  const auto eval_wave = [&](Point2 x) {
    return boundary::exterior_eval(wave_trace, x, wave_shift);
  };
  const double fit_lo = 4.0 * r_tr, fit_hi = 16.0 * r_tr;

  if (problem.zero_mean) {
    const auto fit =
        analysis::fit_decay_fn(eval_static, fit_lo, fit_hi, 16, 25);
    report.details["static_decay_fit"] = fit_to_json(fit);
    const double dev = std::abs(fit.exponent - 1.0);
    add_check(report, "decay-exponent-static", dev,
              config.tol("decay_exponent_one"),
              dev <= config.tol("decay_exponent_one"),
              "static far-field decay exponent vs the target 1");
  } else {
    const Complex flux_val = boundary::flux(static_trace);
    const auto far =
        analysis::fit_far_field_log(eval_static, fit_lo, fit_hi, 16, 25);
    report.details["far_field_log"] = {{"c_log_re", far.c_log.real()},
                                       {"c_log_im", far.c_log.imag()},
                                       {"c0_re", far.c0.real()},
                                       {"c0_im", far.c0.imag()},
                                       {"rms", far.rms}};
    const Complex expected = -flux_val / kernels::two_pi;
    const double rel =
        std::abs(far.c_log - expected) / std::max(std::abs(expected), 1e-300);
    add_check(report, "far-field-log", rel, config.tol("far_field_log_rel"),
              rel <= config.tol("far_field_log_rel"),
              "coefficient of ln(1/|x|) vs -flux/(2 pi)");
    const auto fit =
        analysis::fit_decay_fn(eval_static, 1.5 * r_tr, fit_hi, 16, 25);
    report.details["static_decay_fit"] = fit_to_json(fit);
    add_check(report, "log-profile-flagged", fit.residual,
              analysis::power_law_residual_threshold, !fit.power_law,
              "logarithmic far field must not register as a clean power law");
  }

  const auto wave_fit =
      analysis::fit_decay_fn(eval_wave, fit_lo, fit_hi, 16, 25);
  report.details["wave_decay_fit"] = fit_to_json(wave_fit);
  const double wave_dev = std::abs(wave_fit.exponent - 0.5);
  add_check(report, "decay-exponent-wave", wave_dev,
            config.tol("decay_exponent_half"),
            wave_dev <= config.tol("decay_exponent_half"),
            "wave far-field decay exponent vs the target 1/2");

  report.checks.push_back(
      representation_check(config, batch.fields[0], static_trace,
                           static_shift));

  {
    std::ostringstream os;
    os << "radius,mean_abs_static,mean_abs_wave\n";
    for (int i = 0; i < 25; ++i) {
      const double t = double(i) / 24.0;
      const double r = fit_lo * std::pow(fit_hi / fit_lo, t);
      double mean_s = 0.0, mean_w = 0.0;
      for (int d = 0; d < 16; ++d) {
        const Point2 x = from_polar(r, kernels::two_pi * (d + 0.5) / 16.0);
        mean_s += std::abs(eval_static(x));
        mean_w += std::abs(eval_wave(x));
      }
      os << fmt(r) << ',' << fmt(mean_s / 16.0) << ',' << fmt(mean_w / 16.0)
         << "\n";
    }
    report.tables["decay"] = os.str();
  }

  report.details["truncation_sensitivity"] =
      truncation_sensitivity(problem, static_shift, mode, config);

  report.total_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// flux: conservation across radii and the discrete ring identity.

StudyReport study_flux(const StudyConfig& config) {
  Stopwatch total;
  StudyReport report;
  report.config = config;
  const Problem& problem = model::find_problem(config.problem);
  const Grid grid(config.grid_half_width, config.grid_n);
  const int mode = problem.zero_mean ? 1 : 0;

  const SpectralShift shift =
      problem.zero_mean ? SpectralShift::zero_energy_limit()
                        : SpectralShift::zero_energy(config.eps_ladder.back());
  const SolveBatch batch = solve_batch(problem, {shift}, grid, mode);
  report.solve_seconds = batch.seconds;
  const GridField& u = batch.fields[0];

  const double r_tr = trace_radius(problem, grid);
  const auto radii = flux_table_radii(r_tr, grid);
  const auto fluxes = boundary::flux_conservation(u, radii, config.trace_m);
  report.tables["flux"] = flux_csv(radii, fluxes);

  const Complex mass = model::source_mean(problem.f, grid.spacing() / 2.0);
  double max_abs = 0.0, max_dev = 0.0, spread = 0.0;
  for (const Complex& fx : fluxes) {
    max_abs = std::max(max_abs, std::abs(fx));
    max_dev = std::max(max_dev, std::abs(fx + mass));
    spread = std::max(spread, std::abs(fx - fluxes.front()));
  }
  if (problem.zero_mean) {
    add_check(report, "flux-vanishes", max_abs, config.tol("flux_abs"),
              max_abs <= config.tol("flux_abs"),
              "largest |flux| across the radii table");
  } else {
    const double rel = max_dev / std::abs(mass);
    add_check(report, "flux-matches-mass", rel, config.tol("flux_mass_rel"),
              rel <= config.tol("flux_mass_rel"),
              "largest relative deviation of flux from minus the source mass");
  }
  const double spread_norm =
      spread / std::max(1.0, std::abs(mass));
  add_check(report, "flux-conservation", spread_norm,
            config.tol("flux_spread"),
            spread_norm <= config.tol("flux_spread"),
            "flux spread across radii (constant for fields homogeneous "
            "outside the source)");

  // Discrete conservation: the edge-flux ring around a node block balances
  // the block sum of (sigma u - f) exactly (up to solver residual).
  {
    const double h = grid.spacing();
    const int c = (grid.n - 1) / 2;
    const int ring = std::min<int>(int(std::lround(2.0 / h)), c - 2);
    const Complex ring_flux = solver::discrete_ring_flux(problem.a, u, ring);
    Complex block_sum(0.0, 0.0);
    double abs_sum = 0.0;
    const Complex sigma = shift.sigma();
    for (int iy = c - ring; iy <= c + ring; ++iy) {
      for (int ix = c - ring; ix <= c + ring; ++ix) {
        const Complex fv = problem.f(grid.node(ix, iy));
        block_sum += sigma * u.at(ix, iy) - fv;
        abs_sum += std::abs(fv);
      }
    }
    block_sum *= h * h;
    abs_sum *= h * h;
    const double value =
        std::abs(ring_flux - block_sum) / std::max(1.0, abs_sum);
    add_check(report, "ring-identity", value, config.tol("ring_identity"),
              value <= config.tol("ring_identity"),
              "discrete edge-flux ring vs the block sum of sigma*u - f");
    report.details["ring_identity"] = {{"ring_radius", ring * h},
                                       {"ring_flux_re", ring_flux.real()},
                                       {"ring_flux_im", ring_flux.imag()},
                                       {"block_sum_re", block_sum.real()},
                                       {"block_sum_im", block_sum.imag()}};
  }

  const auto trace = boundary::trace_on_circle(u, r_tr, config.trace_m);
  report.checks.push_back(representation_check(config, u, trace, shift));
  report.tables["trace"] = trace_csv(trace);

  report.details["truncation_sensitivity"] =
      truncation_sensitivity(problem, shift, mode, config);

  report.total_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// kernels: the pure special-function suite (no grid solves).

StudyReport study_kernels(const StudyConfig& config) {
  Stopwatch total;
  StudyReport report;
  report.config = config;

  // Wronskian J0 Y1 - J1 Y0 = -2/(pi x) at 100 log-spaced real points.
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x =
          0.1 * std::pow(1000.0, double(i) / 99.0);  // [0.1, 100]
      const Complex h0 = kernels::hankel1_0(Complex(x, 0.0));
      const Complex h1 = kernels::hankel1_1(Complex(x, 0.0));
      const double j0 = h0.real(), y0 = h0.imag();
      const double j1 = h1.real(), y1 = h1.imag();
      const double target = -2.0 / (kernels::pi * x);
      worst = std::max(worst,
                       std::abs(j0 * y1 - j1 * y0 - target) / std::abs(target));
    }
    add_check(report, "wronskian", worst, config.tol("wronskian"),
              worst <= config.tol("wronskian"),
              "cylinder-function Wronskian at 100 log-spaced points in "
              "[0.1, 100] (relative)");
  }

  // Series vs asymptotic branch on the crossover annulus.
  {
    double worst = 0.0;
    for (double r : {11.0, 11.5, 12.0, 12.5, 13.0}) {
      for (double phi : {0.0, 0.1, 0.2, 0.3}) {
        const Complex z = Complex(r * std::cos(phi), r * std::sin(phi));
        for (int nu : {0, 1}) {
          const Complex a = kernels::detail::hankel1_series(nu, z);
          const Complex b = kernels::detail::hankel1_asymptotic(nu, z);
          worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
      }
    }
    add_check(report, "branch-overlap", worst, config.tol("branch_overlap"),
              worst <= config.tol("branch_overlap"),
              "ascending series vs large-argument expansion on the "
              "crossover annulus (relative)");
  }

  // Far-field structure of the logarithmic kernel:
  // |g0(x,y) - (1/2pi) ln(1/|x|)| * |x| stays bounded for |y| <= 1.
  {
    double worst = 0.0;
    const std::vector<Point2> ys = {{0.0, 0.0}, {1.0, 0.0},   {0.0, -1.0},
                                    {0.7, 0.7}, {-0.3, 0.9}, {-0.9, -0.4}};
    for (int i = 0; i < 13; ++i) {
      const double r = 10.0 * std::pow(100.0, double(i) / 12.0);  // [10, 1000]
      for (int d = 0; d < 8; ++d) {
        const Point2 x = from_polar(r, kernels::two_pi * (d + 0.3) / 8.0);
        for (const Point2& y : ys) {
          const double dev =
              kernels::log_green(x, y) +
              std::log(norm(x)) / kernels::two_pi;
          worst = std::max(worst, std::abs(dev) * norm(x));
        }
      }
    }
    add_check(report, "log-kernel-far-bound", worst,
              config.tol("log_kernel_far_bound"),
              worst <= config.tol("log_kernel_far_bound"),
              "|g0 - monopole| * |x| over |x| in [10, 1000], |y| <= 1");
  }

  // Wave-kernel magnitude bound |G| <= C / sqrt(k r) for k r >= 1.
  {
    double worst = 0.0;
    const kernels::WaveNumber kw(Complex(1.0, 0.0));
    for (int i = 0; i < 40; ++i) {
      const double r = std::pow(1000.0, double(i) / 39.0);  // [1, 1000]
      const Complex g =
          kernels::helmholtz_green(Point2{r, 0.0}, Point2{0.0, 0.0}, kw);
      worst = std::max(worst, std::abs(g) * std::sqrt(r));
    }
    add_check(report, "wave-kernel-far-bound", worst,
              config.tol("wave_kernel_far_bound"),
              worst <= config.tol("wave_kernel_far_bound"),
              "|G| sqrt(k|x|) over k|x| in [1, 1000]");
  }

  // Resolvent-kernel expansion: residual g_eps - alpha(eps) - g0 over the
  // window 0.5 <= |x - y| <= 2, compared against the eps^2 ln(1/eps) law
  // (one constant across the ladder) and, as a diagnostic, against the
  // eps ln(1/eps) law.
  {
    const std::vector<double> eps_list = {1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> sup_residuals, ratios2, ratios1;
    for (double eps : eps_list) {
      const Complex a = kernels::alpha(eps);
      double sup = 0.0;
      for (int i = 0; i < 25; ++i) {
        const double r = 0.5 + 1.5 * i / 24.0;
        const Complex g_eps =
            kernels::regularized_green(Point2{r, 0.0}, Point2{0.0, 0.0}, eps);
        const double g0 =
            kernels::log_green(Point2{r, 0.0}, Point2{0.0, 0.0});
        sup = std::max(sup, std::abs(g_eps - a - g0));
      }
      sup_residuals.push_back(sup);
      ratios2.push_back(sup / (eps * eps * std::log(1.0 / eps)));
      ratios1.push_back(sup / (eps * std::log(1.0 / eps)));
    }
    const double c_fit = config.tol("expansion_headroom") * ratios2.front();
    bool bounded = true;
    double worst_ratio = 0.0;
    for (double ratio : ratios2) {
      worst_ratio = std::max(worst_ratio, ratio / ratios2.front());
      if (ratio > c_fit) bounded = false;
    }
    add_check(report, "expansion-bounded", worst_ratio,
              config.tol("expansion_headroom"), bounded,
              "sup-residual / (eps^2 ln(1/eps)) across the eps ladder, "
              "relative to the coarsest-eps ratio; must stay within the "
              "headroom for a single-constant bound");
    report.notes.push_back(
        "measured residual g_eps - alpha - g0 scales like eps*ln(1/eps) "
        "(their ratio is flat across the ladder; see the expansion table), "
        "so no single constant bounds residual/(eps^2 ln(1/eps)); the "
        "leading term grows like (eps r^2/4)*alpha(eps)");
    json table = json::array();
    for (size_t i = 0; i < eps_list.size(); ++i) {
      table.push_back({{"eps", eps_list[i]},
                       {"sup_residual", sup_residuals[i]},
                       {"ratio_eps2_log", ratios2[i]},
                       {"ratio_eps1_log", ratios1[i]}});
    }
    report.details["expansion"] = table;
    std::ostringstream os;
    os << "eps,sup_residual,ratio_eps2_log,ratio_eps1_log\n";
    for (size_t i = 0; i < eps_list.size(); ++i)
      os << fmt(eps_list[i]) << ',' << fmt(sup_residuals[i]) << ','
         << fmt(ratios2[i]) << ',' << fmt(ratios1[i]) << "\n";
    report.tables["expansion"] = os.str();
  }

  // The splitting constant: Re alpha is affine in ln(1/eps) with slope
  // 1/(4 pi); Im alpha = -1/8 exactly.
  {
    const std::vector<double> eps_list = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double worst_imag = 0.0;
    for (double eps : eps_list) {
      const Complex a = kernels::alpha(eps);
      const double x = std::log(1.0 / eps);
      sx += x;
      sy += a.real();
      sxx += x * x;
      sxy += x * a.real();
      worst_imag = std::max(worst_imag, std::abs(a.imag() + 0.125));
    }
    const double n = double(eps_list.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double target = 1.0 / (4.0 * kernels::pi);
    const double rel = std::abs(slope - target) / target;
    add_check(report, "alpha-log-slope", rel, config.tol("alpha_slope_rel"),
              rel <= config.tol("alpha_slope_rel"),
              "slope of Re alpha against ln(1/eps) vs 1/(4 pi)");
    add_check(report, "alpha-imaginary-part", worst_imag,
              config.tol("alpha_imag_abs"),
              worst_imag <= config.tol("alpha_imag_abs"),
              "Im alpha must equal -1/8 exactly");
  }

  // Small-argument limit: (i/4) H0(z) + (1/2pi)(ln(z/2) + gamma) - i/4 -> 0.
  {
    double worst = 0.0;
    for (double r : {1e-3, 1e-2}) {
      for (double phi : {0.0, 3.0 * kernels::pi / 4.0}) {
        const Complex z(r * std::cos(phi), r * std::sin(phi));
        const Complex dev =
            Complex(0.0, 0.25) * kernels::hankel1_0(z) +
            (std::log(z / 2.0) + kernels::euler_gamma) / kernels::two_pi -
            Complex(0.0, 0.25);
        worst = std::max(worst, std::abs(dev));
      }
    }
    add_check(report, "small-z-match", worst, config.tol("small_z_match"),
              worst <= config.tol("small_z_match"),
              "H0 small-argument splitting at |z| in {1e-3, 1e-2}");
  }

  report.total_seconds = total.seconds();
  return report;
}

// ---------------------------------------------------------------------------

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  struct ThreadGuard {
    ~ThreadGuard() { set_thread_request(0); }
  } guard;
  if (config.threads > 0) set_thread_request(unsigned(config.threads));
  switch (config.study) {
    case StudyKind::lap_zero: return study_lap_zero(config);
    case StudyKind::lap_helmholtz: return study_lap_helmholtz(config);
    case StudyKind::k_to_zero: return study_k_to_zero(config);
    case StudyKind::decay: return study_decay(config);
    case StudyKind::flux: return study_flux(config);
    case StudyKind::kernels: return study_kernels(config);
  }
  throw std::logic_error("run_study: unknown study kind");
}

// ---------------------------------------------------------------------------
// Self-test: fast kernel and solver smoke checks.

namespace {

int report_line(std::ostream& os, const std::string& name, double value,
                double tolerance, bool pass) {
  os << (pass ? "[ ok ] " : "[FAIL] ") << name << "  value=" << value
     << "  tolerance=" << tolerance << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int selftest(std::ostream& os) {
  int failures = 0;

  // Wronskian spot check.
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x = 0.2 * std::pow(250.0, double(i) / 19.0);
      const Complex h0 = kernels::hankel1_0(Complex(x, 0.0));
      const Complex h1 = kernels::hankel1_1(Complex(x, 0.0));
      const double target = -2.0 / (kernels::pi * x);
      worst = std::max(
          worst, std::abs(h0.real() * h1.imag() - h1.real() * h0.imag() -
                          target) /
                     std::abs(target));
    }
    failures += report_line(os, "wronskian", worst, 1e-9, worst <= 1e-9);
  }

  // Branch overlap spot check.
  {
    double worst = 0.0;
    for (double r : {11.0, 13.0}) {
      const Complex z(r * std::cos(0.2), r * std::sin(0.2));
      for (int nu : {0, 1}) {
        const Complex a = kernels::detail::hankel1_series(nu, z);
        const Complex b = kernels::detail::hankel1_asymptotic(nu, z);
        worst = std::max(worst, std::abs(a - b) / std::abs(b));
      }
    }
    failures += report_line(os, "branch-overlap", worst, 1e-9, worst <= 1e-9);
  }

  // Logarithmic kernel value.
  {
    const double got = kernels::log_green({3.0, 4.0}, {0.0, 0.0});
    const double want = -std::log(5.0) / kernels::two_pi;
    const double dev = std::abs(got - want);
    failures += report_line(os, "log-kernel-value", dev, 1e-15, dev <= 1e-15);
  }

  // Normal derivative of the wave kernel vs a centered difference.
  {
    const kernels::WaveNumber kw(Complex(1.3, 0.0));
    const Point2 x{0.2, -0.1};
    const Point2 s{2.0, 1.0};
    const Point2 n = unit(s);
    const double d = 1e-5;
    const Complex fd =
        (kernels::helmholtz_green(x, s + d * n, kw) -
         kernels::helmholtz_green(x, s - d * n, kw)) /
        (2.0 * d);
    const Complex an = kernels::helmholtz_green_normal_deriv(x, s, n, kw);
    const double dev = std::abs(fd - an) / std::abs(an);
    failures +=
        report_line(os, "kernel-normal-derivative", dev, 1e-8, dev <= 1e-8);
  }

  // Splitting-constant structure.
  {
    const Complex a2 = kernels::alpha(1e-2);
    const Complex a4 = kernels::alpha(1e-4);
    const double step =
        (a4.real() - a2.real()) / std::log(1e2);  // slope vs ln(1/eps)
    const double dev = std::abs(step - 1.0 / (4.0 * kernels::pi)) +
                       std::abs(a2.imag() + 0.125);
    failures += report_line(os, "alpha-structure", dev, 1e-12, dev <= 1e-12);
  }

  // Regularized kernel approaches the logarithmic one.
  {
    const double eps = 1e-8;
    const Complex g_eps =
        kernels::regularized_green({1.0, 0.0}, {0.0, 0.0}, eps);
    const Complex split = kernels::alpha(eps) +
                          kernels::log_green({1.0, 0.0}, {0.0, 0.0});
    const double dev = std::abs(g_eps - split);
    failures +=
        report_line(os, "kernel-splitting", dev, 1e-6, dev <= 1e-6);
  }

  // Manufactured-solution smoke test: -div(grad u) + i eps u with the cubic
  // bump as exact solution (compactly supported, so the Dirichlet closure
  // is exact) on two grids; the error must drop by about 4.
  {
    const auto exact = [](Point2 p) {
      return Complex(model::cubic_bump(norm(p), 1.0), 0.0);
    };
    const Complex sigma(0.0, 0.37);
    const auto rhs = [&](Point2 p) {
      const double r2 = p.x * p.x + p.y * p.y;
      if (r2 >= 1.0) return Complex(0.0, 0.0);
      const double s = 1.0 - r2;
      // -Laplace of (1 - r^2)^3 in 2d: 12 s^2 - 24 r^2 s.
      return Complex(12.0 * s * s - 24.0 * r2 * s, 0.0) + sigma * exact(p);
    };
    model::CoefficientField a;
    a.entries = [](Point2) { return model::identity_matrix(); };
    a.perturbation_radius = 1.0;
    model::SourceTerm f;
    f.values = rhs;
    f.support_radius = 1.0;
    double errors[2] = {0.0, 0.0};
    for (int pass = 0; pass < 2; ++pass) {
      const Grid grid(4.0, pass == 0 ? 65 : 129);
      const auto system =
          solver::assemble(a, SpectralShift::zero_energy(0.37), grid,
                           solver::BoundaryClosure::dirichlet());
      const GridField u = solver::solve(system, f);
      double err = 0.0;
      for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
          err = std::max(err,
                         std::abs(u.at(ix, iy) - exact(grid.node(ix, iy))));
      errors[pass] = err;
    }
    const double ratio = errors[0] / std::max(errors[1], 1e-300);
    failures += report_line(os, "solver-order-smoke", ratio, 3.5,
                            ratio >= 3.5);
  }

  // Trace + representation reproduce a known exterior field.
  {
    const Grid grid(4.0, 129);
    const Point2 y0{0.3, 0.0};
    const GridField field = sample_on_grid(grid, [&](Point2 p) {
      if (dist(p, y0) < 1e-9) return Complex(0.0, 0.0);
      return Complex(kernels::log_green(p, y0), 0.0);
    });
    const auto trace = boundary::trace_on_circle(field, 1.0, 128);
    const Point2 x{2.5, 0.4};
    const Complex got = boundary::exterior_eval(
        trace, x, SpectralShift::zero_energy_limit());
    const Complex want(kernels::log_green(x, y0), 0.0);
    const double dev = std::abs(got - want) / std::abs(want);
    failures +=
        report_line(os, "representation-smoke", dev, 1e-3, dev <= 1e-3);
  }

  os << (failures == 0 ? "selftest: all checks passed\n"
                       : "selftest: FAILURES\n");
  return failures;
}

std::string list_problems_text() {
  std::ostringstream os;
  for (const auto& p : model::builtin_problems()) {
    os << p.name << (p.zero_mean ? "  [zero-mean]" : "  [nonzero-mean]")
       << "\n    " << p.description << "\n";
  }
  return os.str();
}

}  // namespace lap2d::harness
