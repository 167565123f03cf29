// Copyright (c) 2026 The rgscale developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/families.hpp"
#include "rgscale/quadrature.hpp"
#include "rgscale/scaling.hpp"

namespace rgscale {

// ---------------------------------------------------------------------------
// Critical-exponent extraction: a direct decay fit, an integrability scan,
// and an empirical fit on scaled series, plus a Fourier-side singularity
// probe. All three estimators must agree on critical zoo families.
// ---------------------------------------------------------------------------

struct ExponentReport {
  double alpha_hat = 0;
  std::string method;       // method_one | method_two | empirical_gamma
  double residual = 0;      // fit rms or scan resolution
  double window_lo = 0;     // radii, alpha range, or R range used
  double window_hi = 0;
  double gamma_hat = 0;     // (n + alpha)/2 for l = 2, (n + alpha_l)/l in general
  int order = 2;
  bool normal_regime = false;  // scan found no integrability boundary above the grid floor
  bool high_residual = false;
};

/// Log-log fit of the 2-point decay: W^T(y) ~ (const + F) |y|^{-(n-alpha)},
/// so alpha = n + slope. The window must start where F is subdominant.
inline ExponentReport fit_alpha_method_one(const CorrelationFamily& family, double r_min = 0,
                                           double r_max = 0, int points = 32) {
  if (!family.two_point_radial)
    throw domain_error("method one needs a radial 2-point function");
  if (r_min <= 0) r_min = std::max(10.0, 10.0 * family.f_correction_scale);
  if (r_max <= 0) r_max = 100.0 * r_min;
  if (!(r_max > r_min) || points < 2) throw domain_error("method one: bad fit window");
  std::vector<double> lx(points), ly(points);
  for (int i = 0; i < points; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (points - 1));
    const double w = family.two_point_radial(r);
    if (!(w > 0.0))
      throw domain_error("method one: nonpositive 2-point value at r = " + format_g17(r) +
                         "; log-log fit undefined");
    lx[i] = std::log(r);
    ly[i] = std::log(w);
  }
  const LineFit fit = fit_line(lx, ly);
  ExponentReport rep;
  rep.method = "method_one";
  rep.order = 2;
  rep.alpha_hat = family.dimension + fit.slope;
  rep.gamma_hat = 0.5 * (family.dimension + rep.alpha_hat);
  rep.residual = fit.rms_residual;
  rep.window_lo = r_min;
  rep.window_hi = r_max;
  rep.high_residual = fit.rms_residual > 0.02;
  return rep;
}

// --- integrability scan ------------------------------------------------------

struct ScanRow {
  double alpha;
  double cutoff;
  double partial_integral;
};

struct AlphaInfScan {
  ExponentReport report;
  std::vector<ScanRow> rows;                 // curve data (alpha, cutoff, I(alpha, cutoff))
  std::vector<int> classification;           // per alpha: 1 divergent, 0 convergent
  std::vector<double> alpha_grid;
};

namespace detail {

/// \int_{r_lo}^{r_hi} |W(s)| (1+s^2)^{-alpha/2} s^{n-1} ds on a log abscissa.
template <typename W>
double weighted_shell_integral(W&& w, int n, double alpha, double r_lo, double r_hi) {
  auto f = [&](double u) {
    const double s = std::exp(u);
    return std::abs(w(s)) * std::pow(1.0 + s * s, -0.5 * alpha) * std::pow(s, n - 1) * s;
  };
  const double u_lo = std::log(std::max(r_lo, 1e-12)), u_hi = std::log(r_hi);
  const int panels = std::max(8, static_cast<int>(std::ceil(4.0 * (u_hi - u_lo))));
  return integrate_panels(f, u_lo, u_hi, panels, 24);
}

}  // namespace detail

/// Partial integrals I(alpha, r) = \int_{|y|<=r} |W^T(y)| (1+|y|^2)^{-alpha/2} dy
/// over geometric cutoffs. Divergent when the decade increments fail to decay
/// geometrically (constant increments = logarithmic divergence); convergent
/// when they do, or when the tail has already flattened. The boundary is the
/// integrability threshold alpha_inf, reported at the grid resolution.
inline AlphaInfScan alpha_inf_scan(const CorrelationFamily& family, double alpha_lo,
                                   double alpha_hi, double dalpha,
                                   std::vector<double> cutoff_radii = {}) {
  if (!family.two_point_radial) throw domain_error("integrability scan needs a radial 2-point function");
  if (!(alpha_hi > alpha_lo) || !(dalpha > 0)) throw domain_error("integrability scan: bad alpha grid");
  if (cutoff_radii.empty()) cutoff_radii = {10, 100, 1000, 10000, 100000, 1000000};
  if (cutoff_radii.size() < 3) throw domain_error("integrability scan: need at least 3 cutoffs");
  for (size_t i = 1; i < cutoff_radii.size(); ++i)
    if (!(cutoff_radii[i] > cutoff_radii[i - 1]))
      throw domain_error("integrability scan: cutoffs must increase");

  AlphaInfScan scan;
  const int n = family.dimension;
  const double surface = sphere_surface(n);
  for (double a = alpha_lo; a <= alpha_hi + 1e-12; a += dalpha) scan.alpha_grid.push_back(a);

  for (double a : scan.alpha_grid) {
    // head [0, r_0] plus log-spaced shells
    double total = integrate_auto(
                       [&](double s) {
                         return std::abs(family.two_point_radial(s)) *
                                std::pow(1.0 + s * s, -0.5 * a) * std::pow(s, n - 1);
                       },
                       0.0, cutoff_radii.front(), 1e-11)
                       .value;
    std::vector<double> cumulative = {total};
    for (size_t k = 1; k < cutoff_radii.size(); ++k) {
      total += detail::weighted_shell_integral(family.two_point_radial, n, a, cutoff_radii[k - 1],
                                               cutoff_radii[k]);
      cumulative.push_back(total);
    }
    for (size_t k = 0; k < cutoff_radii.size(); ++k)
      scan.rows.push_back({a, cutoff_radii[k], surface * cumulative[k]});

    const size_t K = cumulative.size() - 1;
    const double d_last = cumulative[K] - cumulative[K - 1];
    const double d_prev = cumulative[K - 1] - cumulative[K - 2];
    int divergent;
    if (d_last <= 1e-9 * cumulative[K]) {
      divergent = 0;  // tail already flat
    } else {
      // geometric decay rate of the shell increments: for a tail s^{-1-eps'}
      // the ratio of successive decade increments is (r_{k+1}/r_k)^{-eps'}
      const double ratio = d_last / d_prev;
      const double decades = std::log(cutoff_radii[K] / cutoff_radii[K - 1]);
      const double eps_hat = -std::log(std::max(ratio, 1e-300)) / decades;
      divergent = eps_hat < 0.005 ? 1 : 0;
    }
    scan.classification.push_back(divergent);
  }

  int last_divergent = -1;
  for (size_t i = 0; i < scan.classification.size(); ++i)
    if (scan.classification[i]) last_divergent = static_cast<int>(i);

  ExponentReport rep;
  rep.method = "method_two";
  rep.order = 2;
  rep.residual = 0.5 * dalpha;
  rep.window_lo = alpha_lo;
  rep.window_hi = alpha_hi;
  if (last_divergent < 0) {
    rep.alpha_hat = alpha_lo;
    rep.normal_regime = true;  // integrable at every weighting: no boundary in the grid
  } else if (last_divergent + 1 >= static_cast<int>(scan.alpha_grid.size())) {
    throw domain_error("integrability scan: boundary above the alpha grid; widen the grid");
  } else {
    rep.alpha_hat =
        0.5 * (scan.alpha_grid[last_divergent] + scan.alpha_grid[last_divergent + 1]);
  }
  rep.gamma_hat = 0.5 * (n + rep.alpha_hat);
  scan.report = rep;
  return scan;
}

// --- empirical exponent from a scaled series ---------------------------------

/// Tail window: the last half-decade of R values, at least `min_points` many.
inline std::pair<size_t, size_t> tail_window(const std::vector<ScalingPoint>& pts,
                                             size_t min_points = 3) {
  if (pts.size() < 2) throw domain_error("tail fit: need at least 2 series points");
  const double r_hi = pts.back().R;
  size_t first = pts.size();
  for (size_t i = 0; i < pts.size(); ++i)
    if (pts[i].R >= r_hi / std::sqrt(10.0)) {
      first = i;
      break;
    }
  min_points = std::min(min_points, pts.size());
  if (pts.size() - first < min_points) first = pts.size() - min_points;
  return {first, pts.size()};
}

/// Log-log slope of a series tail; sign changes in the tail are rejected.
inline LineFit fit_series_tail(const ScalingSeries& series) {
  auto [first, last] = tail_window(series.points);
  std::vector<double> lx, ly;
  const double sign = series.points[last - 1].value >= 0 ? 1.0 : -1.0;
  for (size_t i = first; i < last; ++i) {
    const double v = sign * series.points[i].value;
    if (!(v > 0.0))
      throw domain_error("tail fit: sign change or zero in the series tail at R = " +
                         format_g17(series.points[i].R));
    lx.push_back(std::log(series.points[i].R));
    ly.push_back(std::log(v));
  }
  return fit_line(lx, ly);
}

/// The series must be computed at gamma = 0; then value(R) = R^{l gamma*} x
/// (finite limit), so the tail log-log slope divided by l estimates gamma*.
inline ExponentReport fit_gamma_empirical(const ScalingSeries& series) {
  if (series.gamma != 0.0)
    throw domain_error("empirical gamma fit expects a series computed at gamma = 0");
  const LineFit fit = fit_series_tail(series);
  auto [first, last] = tail_window(series.points);
  ExponentReport rep;
  rep.method = "empirical_gamma";
  rep.order = series.order;
  rep.gamma_hat = fit.slope / series.order;
  rep.alpha_hat = series.order * rep.gamma_hat - series.dimension;
  rep.residual = fit.rms_residual;
  rep.window_lo = series.points[first].R;
  rep.window_hi = series.points[last - 1].R;
  rep.high_residual = fit.rms_residual > 0.02;
  return rep;
}

// --- Fourier-side singularity probe ------------------------------------------

struct SingularityProbe {
  double epsilon_hat = 0;   // fitted power of the |p|^{-eps} singularity
  bool log_flag = false;    // growth slower than any fitted power: logarithmic type
  bool growing = false;
  double rel_rms_power = 0;
  double rel_rms_log = 0;
  std::vector<double> lambdas;
  std::vector<double> values;  // \hat G_alpha(lambda p0)
};

/// Estimates \hat G_alpha(lambda p0) for G_alpha(y) = W^T(y) (1+|y|^2)^{-alpha/2}
/// over decreasing lambda and fits the small-momentum growth. Radial
/// oscillatory quadrature; n = 1 or 2 only.
inline SingularityProbe fourier_singularity_probe(const CorrelationFamily& family, double alpha,
                                                  std::vector<double> lambda_grid,
                                                  double p0 = 1.0) {
  const int n = family.dimension;
  if (n > 2) throw domain_error("singularity probe supports n = 1 or 2 only");
  if (!family.two_point_radial) throw domain_error("singularity probe needs a radial 2-point function");
  if (lambda_grid.empty()) {
    for (int i = 0; i <= 12; ++i) lambda_grid.push_back(std::pow(10.0, -2.0 - 0.36 * i));
  }
  std::sort(lambda_grid.begin(), lambda_grid.end(), std::greater<>());
  auto g = [&](double s) {
    return family.two_point_radial(s) * std::pow(1.0 + s * s, -0.5 * alpha);
  };
  SingularityProbe probe;
  for (double lam : lambda_grid) {
    const double p = lam * p0;
    QuadResult q = (n == 1) ? fourier_cos_radial(g, p, {.panels = 96})
                            : fourier_bessel0_radial(g, p, {.panels = 96});
    if (!q.converged)
      throw numeric_error("oscillatory quadrature failed to converge at lambda = " +
                          format_g17(lam));
    probe.lambdas.push_back(lam);
    probe.values.push_back(q.value);
  }
  // fit on the small-lambda half of the grid
  const size_t half = probe.lambdas.size() / 2;
  std::vector<double> lx, lv, v;
  for (size_t i = half; i < probe.lambdas.size(); ++i) {
    lx.push_back(std::log(probe.lambdas[i]));
    v.push_back(probe.values[i]);
    if (!(probe.values[i] > 0.0))
      throw numeric_error("singularity probe: nonpositive transform value at lambda = " +
                          format_g17(probe.lambdas[i]));
    lv.push_back(std::log(probe.values[i]));
  }
  const LineFit power_fit = fit_line(lx, lv);
  const LineFit log_fit = fit_line(lx, v);  // c1 + c2 * ln(lambda)
  double rss_pow = 0, rss_log = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    const double pred_pow = std::exp(power_fit.intercept + power_fit.slope * lx[i]);
    const double pred_log = log_fit.intercept + log_fit.slope * lx[i];
    rss_pow += std::pow((pred_pow - v[i]) / v[i], 2);
    rss_log += std::pow((pred_log - v[i]) / v[i], 2);
  }
  probe.rel_rms_power = std::sqrt(rss_pow / lx.size());
  probe.rel_rms_log = std::sqrt(rss_log / lx.size());
  probe.epsilon_hat = -power_fit.slope;
  probe.growing = probe.values.back() > 1.5 * probe.values.front();
  probe.log_flag = probe.growing && probe.rel_rms_log < probe.rel_rms_power;
  return probe;
}

// --- cross validation ---------------------------------------------------------

struct CrossValidationSettings {
  double method_one_r_min = 0;  // 0: choose from the family's correction scale
  double method_one_r_max = 0;
  double scan_dalpha = 0.05;
  std::vector<double> R_grid = {32, 64, 128, 256, 512, 1024};
  const SmearingKernel* kernel = nullptr;
  std::uint64_t seed = 7;
  double agreement_tolerance = 0.07;
  double separation = 8.0;  // |Y| for the empirical series
};

struct CrossValidationReport {
  ExponentReport method_one;
  ExponentReport method_two;
  ExponentReport empirical;
  bool normal_regime = false;
  double max_pairwise_delta = 0;
  bool methods_agree = false;
  double conclusion5_slope = 0;      // tail slope at gamma = (n + alpha_inf + 0.2)/2
  bool conclusion5_vanishing = false;  // decreasing tail: no attained minimum from above
};

inline ScalingSeries make_two_point_series(const CorrelationFamily& family,
                                           const SmearingKernel& kernel, double gamma,
                                           const std::vector<double>& R_grid, double separation,
                                           std::uint64_t seed, int workers) {
  ScalingRequest req;
  req.family = &family;
  req.kernel = &kernel;
  req.mode = ScalingMode::block;
  req.order = 2;
  req.gamma = gamma;
  req.X.assign(2 * family.dimension, 0.0);
  req.X[family.dimension] = -separation;  // second point offset along e1
  req.R_grid = R_grid;
  req.sampler.seed = seed;
  return scaled_truncated_block(req, workers);
}

inline CrossValidationReport cross_validate_methods(const CorrelationFamily& family,
                                                    const CrossValidationSettings& settings,
                                                    int workers = 1) {
  if (!settings.kernel) throw domain_error("cross validation needs a kernel");
  const int n = family.dimension;
  CrossValidationReport rep;

  AlphaInfScan scan = alpha_inf_scan(family, settings.scan_dalpha, n - settings.scan_dalpha,
                                     settings.scan_dalpha);
  rep.method_two = scan.report;
  if (scan.report.normal_regime) {
    rep.normal_regime = true;
    // no power-law window exists; the decay fit is expected to be rejected
    try {
      rep.method_one = fit_alpha_method_one(family, settings.method_one_r_min,
                                            settings.method_one_r_max);
      rep.normal_regime = rep.method_one.high_residual || rep.method_one.alpha_hat <= 0;
    } catch (const domain_error&) {
      rep.method_one.method = "method_one";
      rep.method_one.high_residual = true;
    }
    return rep;
  }

  rep.method_one =
      fit_alpha_method_one(family, settings.method_one_r_min, settings.method_one_r_max);
  ScalingSeries base = make_two_point_series(family, *settings.kernel, 0.0, settings.R_grid,
                                             settings.separation, settings.seed, workers);
  rep.empirical = fit_gamma_empirical(base);

  const double d01 = std::abs(rep.method_one.alpha_hat - rep.method_two.alpha_hat);
  const double d02 = std::abs(rep.method_one.alpha_hat - rep.empirical.alpha_hat);
  const double d12 = std::abs(rep.method_two.alpha_hat - rep.empirical.alpha_hat);
  rep.max_pairwise_delta = std::max({d01, d02, d12});
  rep.methods_agree = rep.max_pairwise_delta <= settings.agreement_tolerance;

  // every alpha strictly above alpha_inf sends the series to zero
  const double alpha_above = rep.method_two.alpha_hat + 0.2;
  ScalingSeries above =
      make_two_point_series(family, *settings.kernel, 0.5 * (n + alpha_above), settings.R_grid,
                            settings.separation, settings.seed + 1, workers);
  rep.conclusion5_slope = fit_series_tail(above).slope;
  rep.conclusion5_vanishing = rep.conclusion5_slope <= -0.15;
  return rep;
}

}  // namespace rgscale
