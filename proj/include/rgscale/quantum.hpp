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

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/families.hpp"
#include "rgscale/kernel.hpp"
#include "rgscale/quadrature.hpp"
#include "rgscale/scaling.hpp"

namespace rgscale {

// ---------------------------------------------------------------------------
// Commutator-decay scaling. The norm bound
//
//   ||[A_R, B_R]|| <= R^{-(gA+gB)} \int F(x1-x2) f(x1/R) f(x2/R) dx1 dx2
//                   = R^{n-(gA+gB)} S_{n-1} \int_0^{min(4R, suppF)}
//                       F(u) (f*f)(u/R) u^{n-1} du
//
// decays with slope n - (gA + gB) once (f*f)(u/R) -> (f*f)(0).
// ---------------------------------------------------------------------------

struct CommutatorScalingResult {
  std::vector<double> R_grid;
  std::vector<double> bounds;
  double fitted_slope = 0;
  double predicted_slope = 0;  // n - (gamma_A + gamma_B)
  double fit_residual = 0;
  double limit_prefactor = 0;  // bound / R^{n-(gA+gB)} at the largest R
};

inline CommutatorScalingResult commutator_scaling(const CommutatorProfile& profile,
                                                  double gamma_A, double gamma_B,
                                                  const SmearingKernel& kernel,
                                                  const std::vector<double>& R_grid) {
  if (!(gamma_A > 0.0) || !(gamma_B > 0.0))
    throw domain_error("commutator scaling: observable exponents must be positive");
  if (profile.n != kernel.dimension())
    throw domain_error("commutator scaling: profile and kernel dimensions differ");
  if (R_grid.size() < 2) throw domain_error("commutator scaling: need at least 2 grid points");
  const int n = profile.n;
  const double gsum = gamma_A + gamma_B;
  const K2Table& k2 = detail::shared_k2_table(kernel);
  CommutatorScalingResult res;
  res.R_grid = R_grid;
  res.predicted_slope = n - gsum;
  for (double R : R_grid) {
    const double u_max = std::min(4.0 * R, profile.effective_support());
    const double integral =
        integrate_auto(
            [&](double u) { return profile.eval(u) * k2.eval(u / R) * std::pow(u, n - 1); }, 0.0,
            u_max, 1e-11, 8192)
            .value;
    res.bounds.push_back(std::pow(R, n - gsum) * sphere_surface(n) * integral);
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < R_grid.size(); ++i) {
    lx.push_back(std::log(R_grid[i]));
    ly.push_back(std::log(res.bounds[i]));
  }
  const LineFit fit = fit_line(lx, ly);
  res.fitted_slope = fit.slope;
  res.fit_residual = fit.rms_residual;
  res.limit_prefactor = res.bounds.back() / std::pow(R_grid.back(), n - gsum);
  return res;
}

// ---------------------------------------------------------------------------
// KMS spectral transfer: W_AB(omega) = (1 - e^{-beta omega})^{-1} W_[A,B](omega)
// for a factored commutator density W_[A,B](omega) = omega * g(omega), with
// the continuous extension W_AB(0) = g(0)/beta.
// ---------------------------------------------------------------------------

inline double thermal_weight(double beta, double omega) {
  const double x = beta * omega;
  if (std::abs(x) < 1e-5) {
    // omega / (1 - e^{-x}) = (1/beta) / (1 - x/2 + x^2/6 - x^3/24 + ...)
    return (1.0 / beta) / (1.0 - x * (0.5 - x * (1.0 / 6.0 - x / 24.0)));
  }
  return omega / (1.0 - std::exp(-x));
}

inline SpectralModel kms_transfer(std::function<double(double)> g, double beta,
                                  double atom_at_zero = 0.0,
                                  SpectralShapeClass shape = SpectralShapeClass::gaussian_like,
                                  double sigma = 1.0, double omega_max = 0.0) {
  if (!(beta > 0.0)) throw domain_error("kms transfer: beta must be positive");
  if (atom_at_zero < 0.0) throw domain_error("kms transfer: atom weight must be >= 0");
  SpectralModel m;
  m.beta = beta;
  m.atom_at_zero = atom_at_zero;
  m.sigma = sigma;
  m.shape = shape;
  m.omega_max = omega_max > 0 ? omega_max : 16.0 * sigma;
  auto gg = g;
  m.wcomm = [gg](double omega) { return omega * gg(omega); };
  m.wab = [gg, beta](double omega) { return gg(omega) * thermal_weight(beta, omega); };
  return m;
}

// ---------------------------------------------------------------------------
// Time correlations C(t) = atom + \int W_AB(omega) e^{-i omega t} d omega.
// ---------------------------------------------------------------------------

struct TimeCorrelation {
  std::vector<double> t_grid;
  std::vector<std::complex<double>> values;
};

namespace detail {

template <typename F>
std::complex<double> spectral_fourier(F&& density, double omega_max, double t, int base_panels = 64,
                                      int order = 16) {
  const int panels =
      std::max(base_panels, 2 * static_cast<int>(std::ceil(omega_max * std::abs(t) / std::numbers::pi)));
  const double re = integrate_panels(
      [&](double w) { return density(w) * std::cos(w * t); }, -omega_max, omega_max, panels, order);
  const double im = integrate_panels(
      [&](double w) { return density(w) * -std::sin(w * t); }, -omega_max, omega_max, panels, order);
  return {re, im};
}

}  // namespace detail

inline TimeCorrelation time_correlation(const SpectralModel& model,
                                        const std::vector<double>& t_grid) {
  // tail admissibility: the density must be negligible at the support bound
  const double edge = std::max(std::abs(model.wab(model.omega_max)),
                               std::abs(model.wab(-model.omega_max)));
  const double scale = std::max({std::abs(model.wab(0.0)), std::abs(model.wab(model.sigma)),
                                 std::abs(model.wab(-model.sigma)), model.atom_at_zero}) +
                       1e-300;
  if (edge * model.omega_max > 1e-8 * scale)
    throw numeric_error("time correlation: spectral tail not negligible at the support bound (" +
                        format_g17(edge) + " at omega = " + format_g17(model.omega_max) + ")");
  TimeCorrelation corr;
  corr.t_grid = t_grid;
  corr.values.reserve(t_grid.size());
  for (double t : t_grid)
    corr.values.push_back(static_cast<std::complex<double>>(model.atom_at_zero) +
                          detail::spectral_fourier(model.wab, model.omega_max, t));
  return corr;
}

// ---------------------------------------------------------------------------
// KMS identities.
// ---------------------------------------------------------------------------

struct KmsIdentityReport {
  double defining_relation_residual = 0;  // max |(1-e^{-bw}) W_AB(w) - W_[A,B](w)| on the grid
  double strip_identity_violation = 0;    // max_t |path A - path B|
};

/// Both sides of the analytic-strip identity reduce to the same integrand
/// e^{-beta omega} W_AB(omega) e^{-i omega t}; they are evaluated through two
/// independent quadrature paths (real-weighted vs complex-exponential), which
/// validates the spectral representation end to end.
inline KmsIdentityReport kms_identity_check(const SpectralModel& model,
                                            const std::vector<double>& t_grid) {
  if (model.shape == SpectralShapeClass::custom)
    throw domain_error("kms identity check: shape class 'custom' not admissible (the "
                       "exponentially weighted integral needs a controlled tail)");
  KmsIdentityReport rep;
  const double W = model.omega_max;
  const int grid = 2048;
  for (int i = 0; i <= grid; ++i) {
    const double w = -W + 2.0 * W * i / grid;
    const double lhs = (1.0 - std::exp(-model.beta * w)) * model.wab(w);
    rep.defining_relation_residual =
        std::max(rep.defining_relation_residual, std::abs(lhs - model.wcomm(w)));
  }
  const double beta = model.beta;
  for (double t : t_grid) {
    // path A: fold the thermal weight into a real density
    const std::complex<double> a = detail::spectral_fourier(
        [&](double w) { return std::exp(-beta * w) * model.wab(w); }, W, t, 64, 16);
    // path B: keep the weight inside the complex exponential e^{-i omega (t - i beta)}
    const std::complex<double> z(0.0, -1.0);
    const int panels = std::max(96, 3 * static_cast<int>(std::ceil(W * std::abs(t) / std::numbers::pi)));
    const GaussRule& rule = gauss_rule(24);
    std::complex<double> b = 0.0;
    const double h = 2.0 * W / panels;
    for (int k = 0; k < panels; ++k) {
      const double lo = -W + k * h;
      for (size_t j = 0; j < rule.nodes.size(); ++j) {
        const double w = lo + 0.5 * h * (rule.nodes[j] + 1.0);
        b += 0.5 * h * rule.weights[j] * model.wab(w) *
             std::exp(z * (std::complex<double>(t, -beta) * w));
      }
    }
    rep.strip_identity_violation = std::max(rep.strip_identity_violation, std::abs(a - b));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Critical slowing down: spectral weight concentrating at omega = 0 flattens
// the time correlations; dynamics survives only on the t -> R^delta t scale.
// ---------------------------------------------------------------------------

struct SlowdownReport {
  std::vector<double> R_grid;
  std::vector<double> flatness;      // max_t |C_R(t) - C_R(0)| / |C_R(0)|
  std::vector<double> half_widths;   // tau(R): C_R(tau) = C_R(0)/2
  double delta_hat = 0;              // slope of log tau vs log R
  double delta_hat_derivative = 0;   // cross-check from max_t |dC_R/dt|
  double collapse_deviation_exact = 0;   // C_R(R^delta t) spread at the planted delta
  double collapse_deviation_fitted = 0;  // same at delta_hat
  bool flatness_monotone = false;
};

namespace detail {

/// Unit-scale transform Q(s) = \int phi(u) e^{-i u s} du; every scale-R value
/// is Q(sigma_R t), so collapse at the exact exponent is structural.
class UnitShapeTransform {
 public:
  UnitShapeTransform(std::function<double(double)> shape, double support)
      : shape_(std::move(shape)), support_(support) {}

  std::complex<double> operator()(double s) const {
    return spectral_fourier(shape_, support_, s);
  }
  // dQ/ds = -i \int u phi(u) e^{-i u s} du
  std::complex<double> derivative(double s) const {
    return std::complex<double>(0.0, -1.0) *
           spectral_fourier([this](double u) { return u * shape_(u); }, support_, s);
  }

 private:
  std::function<double(double)> shape_;
  double support_;
};

}  // namespace detail

inline SlowdownReport slowdown_experiment(const SlowdownFamily& family,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& R_grid) {
  if (t_grid.empty() || R_grid.size() < 2)
    throw domain_error("slowdown experiment: need a t grid and at least 2 R values");
  detail::UnitShapeTransform q(family.shape, family.shape_support);
  const double q0 = q(0.0).real();
  if (!(q0 > 0.0)) throw domain_error("slowdown experiment: shape has nonpositive total weight");

  SlowdownReport rep;
  rep.R_grid = R_grid;
  for (double R : R_grid) {
    const double sigma = family.sigma(R);
    double flat = 0;
    for (double t : t_grid) {
      const double c0 = family.atom_at_zero + q0;
      const double ct = family.atom_at_zero + q(sigma * t).real();
      flat = std::max(flat, std::abs(ct - c0) / std::abs(c0));
    }
    rep.flatness.push_back(flat);

    // half width of the density part by doubling bracket + bisection
    double lo = 0.0, hi = t_grid.back() > 0 ? t_grid.back() : 1.0;
    int guard = 0;
    while (q(sigma * hi).real() > 0.5 * q0) {
      hi *= 2.0;
      if (++guard > 200)
        throw numeric_error("slowdown experiment: half-width outside the search range; widen the grid");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (q(sigma * mid).real() > 0.5 * q0)
        lo = mid;
      else
        hi = mid;
    }
    rep.half_widths.push_back(0.5 * (lo + hi));
  }

  rep.flatness_monotone = true;
  for (size_t i = 1; i < rep.flatness.size(); ++i)
    rep.flatness_monotone = rep.flatness_monotone && rep.flatness[i] <= rep.flatness[i - 1] + 1e-15;

  std::vector<double> lx, ly;
  for (size_t i = 0; i < R_grid.size(); ++i) {
    lx.push_back(std::log(R_grid[i]));
    ly.push_back(std::log(rep.half_widths[i]));
  }
  rep.delta_hat = fit_line(lx, ly).slope;

  // derivative route: max_t |dC_R/dt| picks up the sigma_R = c R^{-delta} prefactor
  std::vector<double> ld;
  for (size_t i = 0; i < R_grid.size(); ++i) {
    const double sigma = family.sigma(R_grid[i]);
    double dmax = 0;
    for (int j = 1; j <= 64; ++j) {
      const double t = 4.0 * rep.half_widths[i] * j / 64.0;
      dmax = std::max(dmax, std::abs(sigma * q.derivative(sigma * t)));
    }
    ld.push_back(std::log(dmax));
  }
  rep.delta_hat_derivative = -fit_line(lx, ld).slope;

  auto collapse_at = [&](double delta) {
    double dev = 0;
    for (double t : t_grid) {
      double ref = 0;
      bool have_ref = false;
      for (size_t i = 0; i < R_grid.size(); ++i) {
        const double s = family.sigma(R_grid[i]) * std::pow(R_grid[i], delta) * t;
        const double v = family.atom_at_zero + q(s).real();
        if (!have_ref) {
          ref = v;
          have_ref = true;
        } else {
          dev = std::max(dev, std::abs(v - ref) / std::abs(family.atom_at_zero + q0));
        }
      }
    }
    return dev;
  };
  rep.collapse_deviation_exact = collapse_at(family.delta);
  rep.collapse_deviation_fitted = collapse_at(rep.delta_hat);
  return rep;
}

// ---------------------------------------------------------------------------
// Vanishing commutator density forces time-independent correlations.
// ---------------------------------------------------------------------------

struct ConstancyReport {
  double atom = 0;
  double max_deviation = 0;  // max_t |C(t) - atom|
  bool constant = false;
};

inline ConstancyReport constancy_from_vanishing_commutator(double beta, double atom,
                                                           const std::vector<double>& t_grid) {
  SpectralModel model = kms_transfer([](double) { return 0.0; }, beta, atom,
                                     SpectralShapeClass::compact_support, 1.0, 4.0);
  const TimeCorrelation corr = time_correlation(model, t_grid);
  ConstancyReport rep;
  rep.atom = atom;
  for (const auto& v : corr.values)
    rep.max_deviation = std::max(rep.max_deviation, std::abs(v - std::complex<double>(atom)));
  rep.constant = rep.max_deviation < 1e-12;
  return rep;
}

}  // namespace rgscale
