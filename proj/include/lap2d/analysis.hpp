#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lap2d/grid.hpp"
#include "lap2d/problem_model.hpp"

// Weighted norms, radial decay fits, and convergence-ladder bookkeeping.
// All "whole plane" norms are evaluated on the truncated square; studies
// report their stability under doubling the truncation half-width instead
// of pretending the domain is infinite.

namespace lap2d::analysis {

using model::Complex;

struct WeightedNorms {
  double sup_weighted = 0.0;       // sup (1 + |x|)   |u|
  double sup_weighted_half = 0.0;  // sup (1 + |x|^{1/2}) |u|
  double l2_minus_b = 0.0;         // sqrt( int |u|^2 / (1 + |x|^b) )
  double b = 2.0;
};

// Norms over grid nodes with |x| <= max_radius (midpoint-rule weights for
// the integral norm).  Requires b > 1, otherwise the integral norm would
// not control fields with the 1/sqrt(|x|) tail.
WeightedNorms compute_norms(
    const GridField& field, double b,
    double max_radius = std::numeric_limits<double>::infinity());

// sup over the annulus lo <= |x| <= hi of |x|^power * |field|.
double weighted_sup_annulus(const GridField& field, double power, double lo,
                            double hi);

// Pointwise difference of fields on the same grid.
GridField difference(const GridField& a, const GridField& b);

// Weighted L2 norms of the source by midpoint quadrature over its support:
// ||f||_b = sqrt( int |f|^2 (1 + |x|^b) ) and the plain L2 norm.
double source_norm_b(const model::SourceTerm& f, double b,
                     double quadrature_step);
double source_norm_l2(const model::SourceTerm& f, double quadrature_step);

// ---------------------------------------------------------------------------
// Radial decay fits.

struct DecayFit {
  double exponent = 0.0;   // p in |field| ~ prefactor * |x|^{-p}
  double prefactor = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;   // RMS of the log-log fit
  bool power_law = false;  // residual below the power-law threshold
};

// RMS threshold separating clean power laws from logarithmic profiles.
inline constexpr double power_law_residual_threshold = 5e-3;

// Least-squares fit of log(mean |field|) against log |x|: the field is
// averaged over `directions` rays per radius (killing angular factors such
// as the dipole cosine), then a single line is fitted over log-spaced radii
// in [lo, hi].
DecayFit fit_decay(const GridField& field, double lo, double hi,
                   int directions);
DecayFit fit_decay_fn(const std::function<Complex(Point2)>& field, double lo,
                      double hi, int directions, int radial_samples);

// Far-field logarithmic structure: least-squares fit of
//     field(x) ~ c_log * ln(1/|x|) + c0
// over the angular means on [lo, hi].  For zero-mean sources c_log -> 0;
// for unit-mass sources c_log -> -flux/(2 pi).
struct LogFarField {
  Complex c_log;
  Complex c0;
  double rms = 0.0;
};
LogFarField fit_far_field_log(const std::function<Complex(Point2)>& field,
                              double lo, double hi, int directions,
                              int radial_samples);

// ---------------------------------------------------------------------------
// Convergence ladders.

enum class NormKind { weighted_sup, weighted_sup_half, l2_minus_b };

std::string norm_kind_name(NormKind kind);

struct ConvergenceLadder {
  std::vector<double> parameters;        // strictly decreasing toward 0
  std::vector<double> pairwise_norm_diffs;
  NormKind norm_kind = NormKind::weighted_sup;
  double tolerance = 0.0;
  bool cauchy_pass = false;
};

struct LadderOptions {
  NormKind kind = NormKind::weighted_sup;
  double b = 2.0;
  double max_radius = std::numeric_limits<double>::infinity();
  double tolerance = 1e-3;
};

// pairwise_norm_diffs[j] = norm(fields[j+1] - fields[j]).  The Cauchy
// verdict passes when the diffs are non-increasing up to 10% wobble and the
// final diff is below tolerance.
ConvergenceLadder ladder(const std::vector<GridField>& fields,
                         const std::vector<double>& parameters,
                         const LadderOptions& options);

}  // namespace lap2d::analysis
