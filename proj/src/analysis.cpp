#include "lap2d/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "lap2d/errors.hpp"
#include "lap2d/special_functions.hpp"

namespace lap2d::analysis {

WeightedNorms compute_norms(const GridField& field, double b,
                            double max_radius) {
  if (!(b > 1.0)) {
    throw domain_error("compute_norms: need b > 1 (the weighted integral "
                       "diverges otherwise)");
  }
  const Grid& g = field.grid();
  const double h = g.spacing();
  WeightedNorms out;
  out.b = b;
  double l2 = 0.0;
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      const double r = norm(g.node(ix, iy));
      if (r > max_radius) continue;
      const double v = std::abs(field.at(ix, iy));
      out.sup_weighted = std::max(out.sup_weighted, (1.0 + r) * v);
      out.sup_weighted_half =
          std::max(out.sup_weighted_half, (1.0 + std::sqrt(r)) * v);
      l2 += v * v / (1.0 + std::pow(r, b));
    }
  }
  out.l2_minus_b = std::sqrt(l2 * h * h);
  return out;
}

double weighted_sup_annulus(const GridField& field, double power, double lo,
                            double hi) {
  const Grid& g = field.grid();
  double out = 0.0;
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      const double r = norm(g.node(ix, iy));
      if (r < lo || r > hi) continue;
      out = std::max(out, std::pow(r, power) * std::abs(field.at(ix, iy)));
    }
  }
  return out;
}

GridField difference(const GridField& a, const GridField& b) {
  if (a.grid() != b.grid()) {
    throw domain_error("difference: grid mismatch");
  }
  GridField out(a.grid());
  for (size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = a.data()[i] - b.data()[i];
  }
  return out;
}

namespace {

double source_weighted_l2(const model::SourceTerm& f, double step,
                          const std::function<double(double)>& weight) {
  const double s = f.support_radius;
  const int n = std::max(2, int(std::ceil(2.0 * s / step)));
  const double h = 2.0 * s / n;
  double acc = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Point2 p{-s + (ix + 0.5) * h, -s + (iy + 0.5) * h};
      acc += std::norm(f(p)) * weight(norm(p));
    }
  }
  return std::sqrt(acc * h * h);
}

}  // namespace

double source_norm_b(const model::SourceTerm& f, double b,
                     double quadrature_step) {
  if (!(b > 1.0)) throw domain_error("source_norm_b: need b > 1");
  return source_weighted_l2(
      f, quadrature_step, [b](double r) { return 1.0 + std::pow(r, b); });
}

double source_norm_l2(const model::SourceTerm& f, double quadrature_step) {
  return source_weighted_l2(f, quadrature_step,
                            [](double) { return 1.0; });
}

// ---------------------------------------------------------------------------
// Decay fits.

namespace {

struct RadialSamples {
  std::vector<double> log_r;
  std::vector<double> log_mean;  // log of the angular mean of |field|
};

RadialSamples sample_angular_means(
    const std::function<Complex(Point2)>& field, double lo, double hi,
    int directions, int radial_samples) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw domain_error("fit_decay: need 0 < lo < hi");
  }
  if (directions < 4 || radial_samples < 4) {
    throw domain_error("fit_decay: need >= 4 directions and radii");
  }
  RadialSamples out;
  const double step = std::log(hi / lo) / (radial_samples - 1);
  for (int t = 0; t < radial_samples; ++t) {
    const double r = lo * std::exp(step * t);
    double mean = 0.0;
    for (int d = 0; d < directions; ++d) {
      const double phi = kernels::two_pi * d / directions;
      mean += std::abs(field(from_polar(r, phi)));
    }
    mean /= directions;
    if (!(mean > 0.0)) {
      throw domain_error("fit_decay: field vanishes on the window");
    }
    out.log_r.push_back(std::log(r));
    out.log_mean.push_back(std::log(mean));
  }
  return out;
}

// Simple least squares y = a + s x; returns {a, s, rms}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    rss += e * e;
  }
  fit.rms = std::sqrt(rss / n);
  return fit;
}

DecayFit decay_from_samples(const RadialSamples& s, double lo, double hi) {
  const LineFit line = fit_line(s.log_r, s.log_mean);
  DecayFit fit;
  fit.exponent = -line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.window_lo = lo;
  fit.window_hi = hi;
  fit.residual = line.rms;
  fit.power_law = line.rms < power_law_residual_threshold;
  return fit;
}

}  // namespace

DecayFit fit_decay(const GridField& field, double lo, double hi,
                   int directions) {
  const double max_r = field.grid().half_width;  // corners excluded
  if (hi > max_r) {
    throw domain_error("fit_decay: window exceeds the inscribed circle");
  }
  const auto eval = [&field](Point2 p) { return field.interpolate(p); };
  const int radial_samples = 33;
  return decay_from_samples(
      sample_angular_means(eval, lo, hi, directions, radial_samples), lo, hi);
}

DecayFit fit_decay_fn(const std::function<Complex(Point2)>& field, double lo,
                      double hi, int directions, int radial_samples) {
  return decay_from_samples(
      sample_angular_means(field, lo, hi, directions, radial_samples), lo,
      hi);
}

LogFarField fit_far_field_log(const std::function<Complex(Point2)>& field,
                              double lo, double hi, int directions,
                              int radial_samples) {
  if (!(lo > 0.0) || !(hi > lo) || radial_samples < 4) {
    throw domain_error("fit_far_field_log: bad window");
  }
  // Angular mean of the complex values per radius, then least squares in
  // the real basis {ln(1/r), 1} applied to re and im parts separately.
  std::vector<double> basis;     // ln(1/r)
  std::vector<Complex> means;
  const double step = std::log(hi / lo) / (radial_samples - 1);
  for (int t = 0; t < radial_samples; ++t) {
    const double r = lo * std::exp(step * t);
    Complex mean(0.0, 0.0);
    for (int d = 0; d < directions; ++d) {
      const double phi = kernels::two_pi * d / directions;
      mean += field(from_polar(r, phi));
    }
    means.push_back(mean / double(directions));
    basis.push_back(-std::log(r));
  }
  std::vector<double> re(means.size()), im(means.size());
  for (size_t i = 0; i < means.size(); ++i) {
    re[i] = means[i].real();
    im[i] = means[i].imag();
  }
  const LineFit fr = fit_line(basis, re);
  const LineFit fi = fit_line(basis, im);
  LogFarField out;
  out.c_log = Complex(fr.slope, fi.slope);
  out.c0 = Complex(fr.intercept, fi.intercept);
  out.rms = std::hypot(fr.rms, fi.rms);
  return out;
}

// ---------------------------------------------------------------------------
// Ladders.

std::string norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::weighted_sup:
      return "weighted-sup";
    case NormKind::weighted_sup_half:
      return "weighted-sup-half";
    case NormKind::l2_minus_b:
      return "l2-minus-b";
  }
  return "unknown";
}

ConvergenceLadder ladder(const std::vector<GridField>& fields,
                         const std::vector<double>& parameters,
                         const LadderOptions& options) {
  if (fields.size() < 3) {
    throw domain_error("ladder: need at least 3 fields");
  }
  if (fields.size() != parameters.size()) {
    throw domain_error("ladder: one parameter per field required");
  }
  for (size_t j = 1; j < parameters.size(); ++j) {
    if (!(parameters[j] < parameters[j - 1]) || !(parameters[j] > 0.0)) {
      throw domain_error("ladder: parameters must decrease strictly to 0+");
    }
  }
  ConvergenceLadder out;
  out.parameters = parameters;
  out.norm_kind = options.kind;
  out.tolerance = options.tolerance;
  for (size_t j = 0; j + 1 < fields.size(); ++j) {
    const WeightedNorms norms = compute_norms(
        difference(fields[j + 1], fields[j]), options.b, options.max_radius);
    double d = 0.0;
    switch (options.kind) {
      case NormKind::weighted_sup:
        d = norms.sup_weighted;
        break;
      case NormKind::weighted_sup_half:
        d = norms.sup_weighted_half;
        break;
      case NormKind::l2_minus_b:
        d = norms.l2_minus_b;
        break;
    }
    out.pairwise_norm_diffs.push_back(d);
  }
  bool monotone = true;
  for (size_t j = 1; j < out.pairwise_norm_diffs.size(); ++j) {
    // allow 10% wobble near the discretization floor
    if (out.pairwise_norm_diffs[j] >
        1.1 * out.pairwise_norm_diffs[j - 1]) {
      monotone = false;
    }
  }
  out.cauchy_pass =
      monotone && out.pairwise_norm_diffs.back() < options.tolerance;
  return out;
}

}  // namespace lap2d::analysis
