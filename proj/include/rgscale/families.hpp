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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/partitions.hpp"

namespace rgscale {

// ---------------------------------------------------------------------------
// Synthetic correlation hierarchies with analytically known decay. Truncated
// functions live on difference coordinates y_i = x_i - x_{i+1}; translation
// invariance is structural.
// ---------------------------------------------------------------------------

struct CorrelationFamily {
  int dimension = 1;
  int max_order = 2;
  double one_point = 0.0;
  std::string kind;
  /// truncated l-point function of (l-1) difference vectors, flat layout
  std::function<double(int l, std::span<const double> y)> truncated;
  /// fast path when the 2-point function is radial (all zoo families are)
  std::function<double(double r)> two_point_radial;
  /// declared homogeneity degree alpha'_l of the decay channel, per order
  std::map<int, double> decay_meta;
  /// prefactor of the asymptotic power tail (0 when there is none)
  double critical_c0 = 0.0;
  /// correction scale of the bounded F part (0 when absent)
  double f_correction_scale = 0.0;
  /// true when the 2-point function is singular at coincident points
  bool singular_at_origin = false;

  double eval_truncated(int l, std::span<const double> y) const {
    check_order(l);
    if (static_cast<int>(y.size()) != (l - 1) * dimension)
      throw domain_error("eval_truncated: expected " + std::to_string((l - 1) * dimension) +
                         " coordinates for order " + std::to_string(l));
    return truncated(l, y);
  }

  void check_order(int l) const {
    if (l < 2 || l > max_order)
      throw domain_error("order " + std::to_string(l) + " out of range; max_order is " +
                         std::to_string(max_order));
  }
};

// --- model parameter blocks -------------------------------------------------

/// Normal regime: integrable clustering exp(-|y|/xi) in every channel.
struct ExponentialClusterSpec {
  int n = 1;
  double xi = 1.0;
  int max_order = 4;
};

/// Critical 2-point model (c0 + F(y)) * (1 + |y|^2)^{-(n-alpha)/2} with
/// F(y) = f_amp * exp(-f_rate * |y|), 0 < alpha < n.
struct PowerLawSpec {
  int n = 1;
  double alpha = 0.5;
  double c0 = 1.0;
  double f_amp = 0.0;
  double f_rate = 0.0;
};

/// Exactly homogeneous 2-point function |y|^{-(n-alpha)} (singular at 0);
/// used for the strict scale-invariance checks in field mode.
struct ExactPowerLawSpec {
  int n = 1;
  double alpha = 0.5;
};

/// Gaussian hierarchy: all truncated functions of order >= 3 vanish.
struct QuasiFreeSpec {
  std::variant<ExponentialClusterSpec, PowerLawSpec> two_point = ExponentialClusterSpec{};
  int max_order = 5;
};

/// General l-point channels W^T_l = (c0 + F(y)) / (1 + h_amp * H_l(y)) with
/// H_l(y) = (sum_i |y_i|^2)^{alpha'_l / 2}, declared per order.
struct HomogeneousChannelSpec {
  int n = 1;
  std::map<int, double> alpha_prime;  // order -> alpha'_l, contiguous from 2
  double c0 = 1.0;
  double f_amp = 0.0;
  double f_rate = 1.0;
  double h_amp = 1.0;
};

using FamilySpec = std::variant<ExponentialClusterSpec, PowerLawSpec, ExactPowerLawSpec,
                                QuasiFreeSpec, HomogeneousChannelSpec>;

namespace detail {

inline void validate_power_law(const PowerLawSpec& s) {
  require_dimension(s.n);
  if (!(s.alpha > 0.0 && s.alpha < s.n))
    throw domain_error("power-law alpha must lie in (0, n) = (0, " + std::to_string(s.n) +
                       "), got " + format_g17(s.alpha));
  if (!(s.c0 > 0.0)) throw domain_error("power-law c0 must be positive");
  if (s.f_amp < 0.0 || s.f_rate < 0.0) throw domain_error("power-law F parameters must be >= 0");
  if (s.f_amp > 0.0 && s.f_rate <= 0.0)
    throw domain_error("power-law F must be integrable: f_rate > 0 when f_amp > 0");
}

inline double homogeneous_h(std::span<const double> y, double alpha_prime, double h_amp) {
  return h_amp * std::pow(norm2(y), 0.5 * alpha_prime);
}

}  // namespace detail

inline CorrelationFamily make_family(const ExponentialClusterSpec& spec) {
  require_dimension(spec.n);
  if (!(spec.xi > 0.0)) throw domain_error("exponential cluster: xi must be positive");
  if (spec.max_order < 2) throw domain_error("max_order must be >= 2");
  CorrelationFamily fam;
  fam.dimension = spec.n;
  fam.max_order = spec.max_order;
  fam.kind = "exponential_cluster";
  const int n = spec.n;
  const double xi = spec.xi;
  fam.truncated = [n, xi](int l, std::span<const double> y) {
    double s = 0;
    for (int i = 0; i < l - 1; ++i) s += norm(y.subspan(i * n, n));
    return std::exp(-s / xi);
  };
  fam.two_point_radial = [xi](double r) { return std::exp(-r / xi); };
  return fam;
}

inline CorrelationFamily make_family(const PowerLawSpec& spec) {
  detail::validate_power_law(spec);
  CorrelationFamily fam;
  fam.dimension = spec.n;
  fam.max_order = 2;
  fam.kind = "power_law";
  const double nu = 0.5 * (spec.n - spec.alpha);
  const auto radial = [spec, nu](double r) {
    return (spec.c0 + spec.f_amp * std::exp(-spec.f_rate * r)) * std::pow(1.0 + r * r, -nu);
  };
  fam.two_point_radial = radial;
  fam.truncated = [radial](int, std::span<const double> y) { return radial(norm(y)); };
  fam.decay_meta[2] = spec.n - spec.alpha;
  fam.critical_c0 = spec.c0;
  if (spec.f_amp > 0.0) fam.f_correction_scale = 1.0 / spec.f_rate;
  return fam;
}

inline CorrelationFamily make_family(const ExactPowerLawSpec& spec) {
  require_dimension(spec.n);
  if (!(spec.alpha > 0.0 && spec.alpha < spec.n))
    throw domain_error("exact power-law alpha must lie in (0, n) = (0, " + std::to_string(spec.n) +
                       "), got " + format_g17(spec.alpha));
  CorrelationFamily fam;
  fam.dimension = spec.n;
  fam.max_order = 2;
  fam.kind = "exact_power_law";
  fam.singular_at_origin = true;
  const double expo = -(spec.n - spec.alpha);
  const auto radial = [expo](double r) { return std::pow(r, expo); };
  fam.two_point_radial = radial;
  fam.truncated = [radial](int, std::span<const double> y) { return radial(norm(y)); };
  fam.decay_meta[2] = spec.n - spec.alpha;
  fam.critical_c0 = 1.0;
  return fam;
}

inline CorrelationFamily make_family(const QuasiFreeSpec& spec) {
  CorrelationFamily base = std::visit([](const auto& s) { return make_family(s); }, spec.two_point);
  if (spec.max_order < 2) throw domain_error("max_order must be >= 2");
  CorrelationFamily fam = base;
  fam.max_order = spec.max_order;
  fam.kind = "quasi_free[" + base.kind + "]";
  auto two_point = base.truncated;
  fam.truncated = [two_point](int l, std::span<const double> y) {
    return l == 2 ? two_point(2, y) : 0.0;
  };
  return fam;
}

inline CorrelationFamily make_family(const HomogeneousChannelSpec& spec) {
  require_dimension(spec.n);
  if (!(spec.c0 > 0.0)) throw domain_error("homogeneous channel: c0 must be positive");
  if (!(spec.h_amp > 0.0)) throw domain_error("homogeneous channel: h_amp must be positive");
  if (spec.alpha_prime.empty()) throw domain_error("homogeneous channel: no orders declared");
  int max_order = 1;
  for (const auto& [l, ap] : spec.alpha_prime) {
    if (l < 2) throw domain_error("homogeneous channel orders start at 2");
    const double bound = (l - 1) * spec.n;
    if (!(ap > 0.0 && ap < bound))
      throw domain_error("alpha'_" + std::to_string(l) + " must lie in (0, (l-1)n) = (0, " +
                         format_g17(bound) + "), got " + format_g17(ap));
    max_order = std::max(max_order, l);
  }
  for (int l = 2; l <= max_order; ++l)
    if (!spec.alpha_prime.count(l))
      throw domain_error("homogeneous channel: missing alpha'_" + std::to_string(l) +
                         " (orders must be contiguous from 2)");
  CorrelationFamily fam;
  fam.dimension = spec.n;
  fam.max_order = max_order;
  fam.kind = "homogeneous_channel";
  fam.decay_meta = spec.alpha_prime;
  const HomogeneousChannelSpec s = spec;
  fam.truncated = [s](int l, std::span<const double> y) {
    const double h = detail::homogeneous_h(y, s.alpha_prime.at(l), s.h_amp);
    const double f = s.f_amp * std::exp(-s.f_rate * norm(y));
    return (s.c0 + f) / (1.0 + h);
  };
  const double ap2 = spec.alpha_prime.at(2);
  fam.two_point_radial = [s, ap2](double r) {
    const double h = s.h_amp * std::pow(r, ap2);
    return (s.c0 + s.f_amp * std::exp(-s.f_rate * r)) / (1.0 + h);
  };
  fam.critical_c0 = spec.c0 / spec.h_amp;
  if (spec.f_amp > 0.0) fam.f_correction_scale = 1.0 / spec.f_rate;
  return fam;
}

inline CorrelationFamily make_family(const FamilySpec& spec) {
  return std::visit([](const auto& s) { return make_family(s); }, spec);
}

// ---------------------------------------------------------------------------
// Full correlations from truncated ones via the partition sum.
// ---------------------------------------------------------------------------

/// W_l(x_1..x_l) = sum over partitions of products of truncated values on the
/// blocks (block points in index order; singleton blocks contribute W_1).
inline double eval_full(const CorrelationFamily& fam, int l, std::span<const double> x) {
  if (l == 1) return fam.one_point;
  fam.check_order(l);
  const int n = fam.dimension;
  if (static_cast<int>(x.size()) != l * n)
    throw domain_error("eval_full: expected " + std::to_string(l * n) + " coordinates");
  const PartitionSet& ps = enumerate_partitions(l);
  double total = 0;
  std::vector<double> diffs;
  for (const Partition& partition : ps.partitions) {
    double prod = 1;
    for (const Block& block : partition) {
      if (prod == 0.0) break;
      if (block.size() == 1) {
        prod *= fam.one_point;
        continue;
      }
      diffs.assign((block.size() - 1) * n, 0.0);
      for (size_t i = 0; i + 1 < block.size(); ++i)
        for (int d = 0; d < n; ++d)
          diffs[i * n + d] = x[block[i] * n + d] - x[block[i + 1] * n + d];
      prod *= fam.truncated(static_cast<int>(block.size()), diffs);
    }
    total += prod;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Commutator norm profiles F(y) = ||[A, B(y)]||.
// ---------------------------------------------------------------------------

struct CommutatorProfile {
  enum class Kind { strictly_local, integrable_tail };
  Kind kind = Kind::strictly_local;
  int n = 1;
  double amplitude = 1.0;  // bound amplitude b
  double radius = 1.0;     // strictly local: support radius rho
  double xi = 1.0;         // integrable tail: F(y) = b * exp(-|y|/xi)

  double eval(double r) const {
    if (kind == Kind::strictly_local) return r <= radius ? amplitude : 0.0;
    return amplitude * std::exp(-r / xi);
  }

  /// \int F(y) d^n y in closed form.
  double total_integral() const {
    if (kind == Kind::strictly_local) return amplitude * ball_volume(n, radius);
    // S_{n-1} * Gamma(n) * xi^n
    const double gamma_n = (n == 1) ? 1.0 : (n == 2 ? 1.0 : 2.0);
    return amplitude * sphere_surface(n) * gamma_n * std::pow(xi, n);
  }

  /// radius beyond which the tail mass is negligible
  double effective_support() const {
    return kind == Kind::strictly_local ? radius : 46.0 * xi;
  }
};

// ---------------------------------------------------------------------------
// KMS-consistent spectral two-point weights.
// ---------------------------------------------------------------------------

enum class SpectralShapeClass { gaussian_like, compact_support, custom };

/// Two-point spectral weight W_AB(omega) plus an atom at omega = 0, tied to a
/// commutator density W_[A,B](omega) = omega * g(omega) through the thermal
/// factor (1 - e^{-beta*omega})^{-1}, extended continuously by g(0)/beta.
struct SpectralModel {
  double beta = 1.0;
  double atom_at_zero = 0.0;
  double sigma = 1.0;  // concentration scale of the density
  SpectralShapeClass shape = SpectralShapeClass::custom;
  double omega_max = 40.0;  // integration support bound
  std::function<double(double)> wab;    // two-point density
  std::function<double(double)> wcomm;  // commutator density

  double density(double omega) const { return wab(omega); }
  double commutator_density(double omega) const { return wcomm(omega); }
};

/// Family of spectral models whose weight concentrates at omega = 0 as
/// sigma_R = c * R^{-delta}; total weight is independent of R.
struct SlowdownFamily {
  double delta = 0.5;
  double c = 1.0;
  double beta = 1.0;
  double atom_at_zero = 0.0;
  std::function<double(double)> shape;  // even, nonnegative, integrable phi
  double shape_support = 40.0;          // phi negligible beyond this argument

  double sigma(double R) const { return c * std::pow(R, -delta); }

  SpectralModel at_scale(double R) const {
    SpectralModel m;
    m.beta = beta;
    m.atom_at_zero = atom_at_zero;
    m.sigma = sigma(R);
    m.shape = SpectralShapeClass::gaussian_like;
    m.omega_max = m.sigma * shape_support;
    const double s = m.sigma;
    auto phi = shape;
    m.wab = [phi, s](double omega) { return phi(omega / s) / s; };
    const double b = beta;
    auto density = m.wab;
    m.wcomm = [density, b](double omega) { return (1.0 - std::exp(-b * omega)) * density(omega); };
    return m;
  }
};

inline SlowdownFamily make_slowdown_family(std::function<double(double)> shape, double delta,
                                           double c, double beta = 1.0,
                                           double shape_support = 40.0) {
  if (!(delta > 0.0)) throw domain_error("slowdown family: delta must be positive");
  if (!(c > 0.0)) throw domain_error("slowdown family: concentration constant must be positive");
  SlowdownFamily fam;
  fam.delta = delta;
  fam.c = c;
  fam.beta = beta;
  fam.shape = std::move(shape);
  fam.shape_support = shape_support;
  return fam;
}

}  // namespace rgscale
