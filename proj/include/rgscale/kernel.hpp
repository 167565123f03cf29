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
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/qmc.hpp"
#include "rgscale/quadrature.hpp"

namespace rgscale {

/// Smooth block-averaging weight: radial profile f with f == 1 on [0,1],
/// f == 0 on [2,inf), smooth in between. The scaled version is
/// f_R(x) = f(|x|/R), supported in the ball of radius 2R.
enum class KernelProfile { bump, cos2 };

inline KernelProfile kernel_profile_from_string(const std::string& s) {
  if (s == "bump") return KernelProfile::bump;
  if (s == "cos2") return KernelProfile::cos2;
  throw domain_error("kernel profile must be 'bump' or 'cos2', got '" + s + "'");
}

class SmearingKernel {
 public:
  SmearingKernel(int dimension, KernelProfile profile = KernelProfile::bump,
                 int grid_resolution = 0)
      : n_(dimension), profile_(profile) {
    require_dimension(dimension);
    resolution_ = grid_resolution > 0 ? grid_resolution : default_resolution(dimension);
  }

  int dimension() const { return n_; }
  KernelProfile profile() const { return profile_; }
  int resolution() const { return resolution_; }
  static int default_resolution(int n) { return n == 1 ? 64 : (n == 2 ? 32 : 16); }

  /// Radial profile. Plateau and zero regions are exact, not approximate.
  double eval_profile(double s) const {
    if (s < 0) throw domain_error("kernel profile argument must be nonnegative");
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    if (profile_ == KernelProfile::bump) {
      // two-sided exponential glue: C^inf, value 1/2 at s = 3/2
      const double ga = glue(2.0 - s);
      const double gb = glue(s - 1.0);
      return ga / (ga + gb);
    }
    const double c = std::cos(0.5 * std::numbers::pi * (s - 1.0));
    return c * c;  // C^1 taper, used for kernel-robustness checks
  }

  double operator()(std::span<const double> x) const { return eval_profile(norm(x)); }
  double scaled(std::span<const double> x, double R) const { return eval_profile(norm(x) / R); }

  /// \int f(x) d^n x.
  double integral() const {
    if (!integral_) {
      const double radial =
          integrate_auto([this](double s) { return eval_profile(s) * std::pow(s, n_ - 1); }, 0.0,
                         2.0, 1e-13)
              .value;
      integral_ = sphere_surface(n_) * radial;
    }
    return *integral_;
  }

  /// Self-convolution (f*f)(y) = \int f(x) f(x-y) dx evaluated exactly at a
  /// single radius (radial by symmetry, supported on [0,4]).
  double k2_radial(double r) const {
    r = std::abs(r);
    if (r >= 4.0) return 0.0;
    auto f = [this](double s) { return eval_profile(s); };
    return radial_shifted_integral(
        n_, [&](double s) { return s < 2.0 ? f(s) : 0.0; }, f, r, 2.0, {.tol = 1e-12});
  }

  /// \int f(x)^2 dx = (f*f)(0).
  double l2_norm_squared() const {
    if (!l2sq_) l2sq_ = k2_radial(0.0);
    return *l2sq_;
  }

  /// Radial Fourier transform \hat f(p) = \int f(|x|) e^{-i p.x} d^n x
  /// (real and even; convention: e^{-i p.x}, no 2*pi prefactor).
  double fourier(double p) const {
    p = std::abs(p);
    if (p < 1e-12) return integral();
    switch (n_) {
      case 1:
        return 2.0 * integrate_auto([&](double s) { return eval_profile(s) * std::cos(p * s); },
                                    0.0, 2.0, 1e-12, 8192)
                         .value;
      case 2:
        return 2.0 * std::numbers::pi *
               integrate_auto(
                   [&](double s) { return eval_profile(s) * std::cyl_bessel_j(0.0, p * s) * s; },
                   0.0, 2.0, 1e-12, 8192)
                   .value;
      default:
        return 4.0 * std::numbers::pi / p *
               integrate_auto([&](double s) { return eval_profile(s) * std::sin(p * s) * s; }, 0.0,
                              2.0, 1e-12, 8192)
                   .value;
    }
  }

  /// Scaling identity for the scaled kernel f_R: \hat{f_R}(k) = R^n \hat f(R k).
  double fourier_scaled(double k, double R) const { return std::pow(R, n_) * fourier(R * k); }

 private:
  static double glue(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }

  int n_;
  KernelProfile profile_;
  int resolution_;
  mutable std::optional<double> integral_;
  mutable std::optional<double> l2sq_;
};

// ---------------------------------------------------------------------------
// Tabulated self-convolution (radial table with cubic interpolation).
// ---------------------------------------------------------------------------

class K2Table {
 public:
  K2Table(const SmearingKernel& kernel, int resolution, double tol = 1e-6)
      : resolution_(resolution) {
    if (resolution < 2)
      throw domain_error("self_convolution: resolution too coarse; suggest at least " +
                         std::to_string(SmearingKernel::default_resolution(kernel.dimension())));
    const int count = 4 * resolution + 1;
    values_.resize(count);
    dr_ = 4.0 / (count - 1);
    for (int i = 0; i < count; ++i) values_[i] = kernel.k2_radial(i * dr_);
    // refinement estimate of the interpolation error at midpoints
    double max_err = 0;
    for (int i = 0; i < count - 1; i += std::max(1, count / 16)) {
      const double r = (i + 0.5) * dr_;
      max_err = std::max(max_err, std::abs(eval(r) - kernel.k2_radial(r)));
    }
    if (max_err > tol)
      throw domain_error("self_convolution: resolution " + std::to_string(resolution) +
                         " too coarse (error " + format_g17(max_err) + " above tolerance " +
                         format_g17(tol) + "); suggest resolution " +
                         std::to_string(resolution * 4));
  }

  /// Catmull-Rom interpolation of the radial table; even in r by construction.
  double eval(double r) const {
    r = std::abs(r);
    if (r >= 4.0) return 0.0;
    const double t = r / dr_;
    const int i = std::min(static_cast<int>(t), static_cast<int>(values_.size()) - 2);
    const double u = t - i;
    const double p0 = values_[i > 0 ? i - 1 : 1];  // even reflection at r = 0
    const double p1 = values_[i];
    const double p2 = values_[i + 1];
    const double p3 = values_[i + 2 < static_cast<int>(values_.size()) ? i + 2
                                                                       : static_cast<int>(values_.size()) - 1];
    const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    const double c = -0.5 * p0 + 0.5 * p2;
    return ((a * u + b) * u + c) * u + p1;
  }

  double eval_vector(std::span<const double> y) const { return eval(norm(y)); }
  int resolution() const { return resolution_; }
  static constexpr double support_radius() { return 4.0; }

 private:
  int resolution_;
  double dr_ = 0;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Higher self-convolutions on difference coordinates:
//   K_m(y_1..y_{m-1}) = \int f(x) prod_j f(x - (y_1 + ... + y_j)) dx.
// ---------------------------------------------------------------------------

class KernelConvolution {
 public:
  KernelConvolution(const SmearingKernel& kernel, int folds, std::uint64_t seed = 0x5eedULL,
                    std::uint64_t samples = 16384)
      : kernel_(&kernel), m_(folds), seed_(seed), samples_(samples) {
    if (folds < 2 || folds > 5) throw domain_error("self_convolution: fold count must be 2..5");
    if (kernel.dimension() * (folds - 1) > 12)
      throw domain_error("self_convolution: n*(m-1) must be <= 12");
  }

  int folds() const { return m_; }

  /// y has (m-1)*n entries. m = 2 integrates on a grid, m >= 3 by seeded QMC.
  double eval(std::span<const double> y) const {
    const int n = kernel_->dimension();
    if (static_cast<int>(y.size()) != (m_ - 1) * n)
      throw domain_error("self_convolution: expected " + std::to_string((m_ - 1) * n) +
                         " difference coordinates");
    if (m_ == 2) return kernel_->k2_radial(norm(y));
    // partial sums y_1+..+y_j are the shifts applied to x
    std::vector<double> shifts((m_ - 1) * n, 0.0);
    for (int j = 0; j < m_ - 1; ++j)
      for (int d = 0; d < n; ++d)
        shifts[j * n + d] = (j ? shifts[(j - 1) * n + d] : 0.0) + y[j * n + d];
    auto integrand = [&](std::span<const double> x) {
      double prod = kernel_->operator()(x);
      if (prod == 0.0) return 0.0;
      double z[3];
      for (int j = 0; j < m_ - 1 && prod != 0.0; ++j) {
        for (int d = 0; d < n; ++d) z[d] = x[d] - shifts[j * n + d];
        prod *= kernel_->operator()(std::span<const double>(z, n));
      }
      return prod;
    };
    return qmc::integrate_cube(n, -2.0, 2.0, samples_, 16, seed_, integrand).mean;
  }

 private:
  const SmearingKernel* kernel_;
  int m_;
  std::uint64_t seed_;
  std::uint64_t samples_;
};

// ---------------------------------------------------------------------------
// Tabulated Fourier transform with a rapid-decrease check.
// ---------------------------------------------------------------------------

struct FourierTable {
  std::vector<double> momenta;
  std::vector<double> values;
  bool decay_window_ok = false;  // warning flag: grid reached |p| >= 5 to observe decay
  double max_p4_product = 0;     // max of |fhat(p)| * p^4 over the sampled 5 <= p <= 20
};

inline FourierTable kernel_fourier_table(const SmearingKernel& kernel, double p_max,
                                         int points_per_unit = 0) {
  if (points_per_unit <= 0) points_per_unit = kernel.resolution();
  FourierTable table;
  const int count = static_cast<int>(p_max * points_per_unit) + 1;
  table.momenta.resize(count);
  table.values.resize(count);
  for (int i = 0; i < count; ++i) {
    const double p = p_max * i / (count - 1);
    table.momenta[i] = p;
    table.values[i] = kernel.fourier(p);
  }
  table.decay_window_ok = p_max >= 5.0;
  if (table.decay_window_ok) {
    for (int i = 0; i < count; ++i) {
      const double p = table.momenta[i];
      if (p >= 5.0 && p <= 20.0)
        table.max_p4_product = std::max(table.max_p4_product,
                                        std::abs(table.values[i]) * p * p * p * p);
    }
  }
  return table;
}

}  // namespace rgscale
