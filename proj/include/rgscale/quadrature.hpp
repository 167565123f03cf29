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
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "rgscale/common.hpp"

namespace rgscale {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_rule(int order) {
  // Newton iteration on Legendre polynomials, symmetric nodes.
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double p_deriv = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      p_deriv = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / p_deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * p_deriv * p_deriv);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule; orders are clamped to the supported set.
inline const GaussRule& gauss_rule(int order) {
  static const std::array<int, 6> orders = {4, 8, 16, 24, 32, 64};
  static const std::array<GaussRule, 6> rules = [] {
    std::array<GaussRule, 6> r;
    for (size_t i = 0; i < orders.size(); ++i) r[i] = detail::compute_gauss_rule(orders[i]);
    return r;
  }();
  for (size_t i = 0; i < orders.size(); ++i)
    if (order <= orders[i]) return rules[i];
  return rules.back();
}

template <typename F>
double integrate_gl(F&& f, double a, double b, int order = 16) {
  const GaussRule& rule = gauss_rule(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

template <typename F>
double integrate_panels(F&& f, double a, double b, int n_panels, int order = 16) {
  double sum = 0;
  const double h = (b - a) / n_panels;
  for (int k = 0; k < n_panels; ++k) sum += integrate_gl(f, a + k * h, a + (k + 1) * h, order);
  return sum;
}

struct QuadResult {
  double value = 0;
  double error_estimate = 0;
  bool converged = true;
};

/// Panel-doubling quadrature with a relative/absolute convergence target.
template <typename F>
QuadResult integrate_auto(F&& f, double a, double b, double tol = 1e-10, int max_panels = 4096,
                          int order = 16) {
  QuadResult res;
  double prev = integrate_panels(f, a, b, 1, order);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    const double cur = integrate_panels(f, a, b, panels, order);
    const double err = std::abs(cur - prev);
    if (err <= tol * (std::abs(cur) + 1e-300) || err <= tol) {
      res.value = cur;
      res.error_estimate = err;
      return res;
    }
    prev = cur;
  }
  res.value = prev;
  res.error_estimate = std::abs(prev) * tol * 10;
  res.converged = false;
  return res;
}

/// Geometrically graded panels toward an integrable endpoint singularity at `a`
/// (or at `b` when toward_b). The innermost panel stops at width*(b-a)*2^-levels.
template <typename F>
double integrate_graded(F&& f, double a, double b, bool toward_b = false, int levels = 48,
                        int order = 16) {
  const double len = b - a;
  double sum = 0;
  double hi = 1.0;
  for (int k = 0; k < levels; ++k) {
    const double lo = (k + 1 == levels) ? 0.0 : hi * 0.5;
    double pa, pb;
    if (!toward_b) {
      pa = a + lo * len;
      pb = a + hi * len;
    } else {
      pa = b - hi * len;
      pb = b - lo * len;
    }
    sum += integrate_gl(f, pa, pb, order);
    hi = lo;
  }
  return sum;
}

/// Integrates over [a, b] with grading toward an interior point s (integrable
/// singularity at s allowed). Falls back to plain panels when s is outside.
template <typename F>
double integrate_graded_interior(F&& f, double a, double b, double s, int levels = 48,
                                 int order = 16) {
  if (s <= a || s >= b) return integrate_auto(f, a, b, 1e-11).value;
  return integrate_graded(f, a, s, /*toward_b=*/true, levels, order) +
         integrate_graded(f, s, b, /*toward_b=*/false, levels, order);
}

// ---------------------------------------------------------------------------
// Radial reductions in n = 1..3 dimensions.
// ---------------------------------------------------------------------------

/// \int_{R^n} g(|y|) h(|y - Z e1|) dy for radial g (supported on [0, rmax])
/// and radial h. `singular_shift` grades the radial panels toward the sphere
/// |y| = Z where h's argument can vanish.
struct RadialShiftedOptions {
  double tol = 1e-10;
  int angular_nodes = 64;
  bool singular_shift = false;
  int order = 16;
};

template <typename G, typename H>
double radial_shifted_integral(int n, G&& g, H&& h, double Z, double rmax,
                               const RadialShiftedOptions& opt = {}) {
  require_dimension(n);
  Z = std::abs(Z);
  std::function<double(double)> shell;  // integrand of the outer radial integral
  if (n == 1) {
    shell = [&](double r) { return g(r) * (h(std::abs(r - Z)) + h(r + Z)); };
  } else if (n == 2) {
    const int m = opt.angular_nodes;
    shell = [&, m](double r) {
      // periodic trapezoid over the polar angle
      double acc = 0;
      for (int j = 0; j < m; ++j) {
        const double th = 2.0 * std::numbers::pi * (j + 0.5) / m;
        const double d2 = r * r + Z * Z - 2.0 * r * Z * std::cos(th);
        acc += h(std::sqrt(std::max(d2, 0.0)));
      }
      return g(r) * r * (2.0 * std::numbers::pi / m) * acc;
    };
  } else {
    shell = [&](double r) {
      const double inner = integrate_gl(
          [&](double u) {
            const double d2 = r * r + Z * Z - 2.0 * r * Z * u;
            return h(std::sqrt(std::max(d2, 0.0)));
          },
          -1.0, 1.0, 24);
      return 2.0 * std::numbers::pi * g(r) * r * r * inner;
    };
  }
  if (opt.singular_shift && Z < rmax) {
    return integrate_graded_interior(shell, 0.0, rmax, Z, 48, opt.order);
  }
  QuadResult q = integrate_auto(shell, 0.0, rmax, opt.tol, 4096, opt.order);
  return q.value;
}

// ---------------------------------------------------------------------------
// Oscillatory transforms of slowly decaying radial functions.
// ---------------------------------------------------------------------------

namespace detail {

/// Iterated averaging of the partial sums of an alternating-tail sequence
/// (Euler-style acceleration). Returns the accelerated limit and a spread
/// estimate from the last two averaging levels.
inline QuadResult average_partial_sums(std::vector<double> partial) {
  QuadResult res;
  if (partial.empty()) throw numeric_error("average_partial_sums: no panels");
  double prev_top = partial.front();
  while (partial.size() > 1) {
    prev_top = partial.front();
    for (size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
    partial.pop_back();
  }
  res.value = partial.front();
  res.error_estimate = std::abs(res.value - prev_top);
  return res;
}

}  // namespace detail

struct OscillatoryOptions {
  int panels = 96;         // half-period panels past the head
  int order = 16;
  double head_scale = 1.0; // log-grading starts at this radius
};

/// 2 * \int_0^inf G(s) cos(p s) ds for even radial G with a possibly
/// non-integrable (conditionally convergent) power-law tail.
template <typename G>
QuadResult fourier_cos_radial(G&& g, double p, const OscillatoryOptions& opt = {}) {
  if (p <= 0) throw domain_error("fourier_cos_radial: momentum must be positive");
  auto f = [&](double s) { return g(s) * std::cos(p * s); };
  const double z0 = 0.5 * std::numbers::pi / p;  // first zero of cos(ps)
  // Head [0, z0]: log-graded panels so both small-s structure and the first
  // quarter oscillation are resolved.
  double head = 0;
  {
    const double s1 = std::min(opt.head_scale, z0);
    head += integrate_panels(f, 0.0, s1, 8, opt.order);
    double lo = s1;
    while (lo < z0) {
      const double hi = std::min(lo * 2.0, z0);
      head += integrate_panels(f, lo, hi, 2, opt.order);
      lo = hi;
    }
  }
  std::vector<double> partial;
  partial.reserve(opt.panels);
  double acc = head;
  for (int k = 0; k < opt.panels; ++k) {
    const double a = z0 + k * std::numbers::pi / p;
    const double b = a + std::numbers::pi / p;
    acc += integrate_gl(f, a, b, opt.order);
    partial.push_back(acc);
  }
  QuadResult res = detail::average_partial_sums(std::move(partial));
  res.value *= 2.0;
  res.error_estimate *= 2.0;
  if (res.error_estimate > 1e-6 * (std::abs(res.value) + 1e-300) && res.error_estimate > 1e-9)
    res.converged = false;
  return res;
}

/// 2*pi * \int_0^inf G(s) J0(p s) s ds, same tail handling via the
/// asymptotically pi-spaced Bessel zeros.
template <typename G>
QuadResult fourier_bessel0_radial(G&& g, double p, const OscillatoryOptions& opt = {}) {
  if (p <= 0) throw domain_error("fourier_bessel0_radial: momentum must be positive");
  auto f = [&](double s) { return g(s) * std::cyl_bessel_j(0.0, p * s) * s; };
  const double z1 = 2.404825557695773 / p;  // first J0 zero
  double head = 0;
  {
    const double s1 = std::min(opt.head_scale, z1);
    head += integrate_panels(f, 0.0, s1, 8, opt.order);
    double lo = s1;
    while (lo < z1) {
      const double hi = std::min(lo * 2.0, z1);
      head += integrate_panels(f, lo, hi, 2, opt.order);
      lo = hi;
    }
  }
  std::vector<double> partial;
  partial.reserve(opt.panels);
  double acc = head;
  double a = z1;
  for (int k = 0; k < opt.panels; ++k) {
    const double b = a + std::numbers::pi / p;  // inter-zero spacing -> pi/p
    acc += integrate_gl(f, a, b, opt.order);
    partial.push_back(acc);
    a = b;
  }
  QuadResult res = detail::average_partial_sums(std::move(partial));
  res.value *= 2.0 * std::numbers::pi;
  res.error_estimate *= 2.0 * std::numbers::pi;
  if (res.error_estimate > 1e-6 * (std::abs(res.value) + 1e-300) && res.error_estimate > 1e-9)
    res.converged = false;
  return res;
}

}  // namespace rgscale
