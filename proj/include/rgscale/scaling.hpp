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
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/families.hpp"
#include "rgscale/kernel.hpp"
#include "rgscale/parallel.hpp"
#include "rgscale/qmc.hpp"
#include "rgscale/quadrature.hpp"

namespace rgscale {

// ---------------------------------------------------------------------------
// Scaled truncated correlators over an R-grid. Block mode evaluates
//
//   value(R) = R^{l(n-gamma)} \int W^T_l(R[(x_i - x_{i+1}) + (X_i - X_{i+1})])
//              prod_i f(x_i) dx_i   over  [-2,2]^{l n}
//
// (position-space form after x -> R x); field mode drops the kernel:
//
//   value(R) = R^{l(n-gamma)} W^T_l(R (X_1 - X_2), ..., R (X_{l-1} - X_l)).
// ---------------------------------------------------------------------------

enum class ScalingMode { block, field };

struct SamplerSpec {
  enum class Method { automatic, grid, qmc };
  Method method = Method::automatic;
  std::uint64_t samples = 65536;  // total QMC budget per R (split over rotations)
  std::uint64_t seed = 1;
};

inline constexpr int kQmcRotations = 16;

struct ScalingRequest {
  const CorrelationFamily* family = nullptr;
  const SmearingKernel* kernel = nullptr;  // ignored in field mode
  ScalingMode mode = ScalingMode::block;
  int order = 2;
  double gamma = 0.0;
  std::vector<double> X;       // l points, flat, dimension entries each
  std::vector<double> R_grid;  // strictly increasing, positive
  SamplerSpec sampler;
  bool require_support_condition = false;
  double qmc_rel_tolerance = 0.05;  // per-R flag threshold on stderr/|value|
};

struct ScalingPoint {
  double R = 0;
  double value = 0;
  double stderr_value = 0;  // 0 for deterministic grid quadrature
  std::uint64_t samples = 0;
  bool flagged = false;
};

struct ScalingSeries {
  std::vector<ScalingPoint> points;
  int order = 2;
  int dimension = 1;
  ScalingMode mode = ScalingMode::block;
  double gamma = 0;
  std::string family_kind;
  std::uint64_t seed = 0;

  bool any_flagged() const {
    for (const auto& p : points)
      if (p.flagged) return true;
    return false;
  }
};

namespace detail {

inline void validate_request(const ScalingRequest& req) {
  if (!req.family) throw domain_error("scaling request: no family");
  const int n = req.family->dimension;
  const int l = req.order;
  req.family->check_order(l);
  if (static_cast<int>(req.X.size()) != l * n)
    throw domain_error("scaling request: X must hold " + std::to_string(l) + " points of dimension " +
                       std::to_string(n));
  if (req.R_grid.empty()) throw domain_error("scaling request: empty R grid");
  double prev = 0;
  for (double r : req.R_grid) {
    if (!(r > prev)) throw domain_error("scaling request: R grid must be strictly increasing and positive");
    prev = r;
  }
  if (req.mode == ScalingMode::block && !req.kernel)
    throw domain_error("scaling request: block mode needs a kernel");
  if (req.require_support_condition) {
    for (int i = 0; i < l; ++i)
      for (int j = i + 1; j < l; ++j) {
        double d2 = 0;
        for (int d = 0; d < n; ++d) {
          const double diff = req.X[i * n + d] - req.X[j * n + d];
          d2 += diff * diff;
        }
        if (!(std::sqrt(d2) > 4.0))
          throw domain_error("support condition violated: |X_" + std::to_string(i + 1) + " - X_" +
                             std::to_string(j + 1) + "| must exceed 4 kernel units");
      }
  }
}

inline std::vector<double> difference_points(std::span<const double> X, int l, int n) {
  std::vector<double> Y((l - 1) * n);
  for (int i = 0; i + 1 < l; ++i)
    for (int d = 0; d < n; ++d) Y[i * n + d] = X[i * n + d] - X[(i + 1) * n + d];
  return Y;
}

/// Shared interpolation tables of f*f, keyed by kernel identity. Contents are
/// deterministic, so sharing does not affect reproducibility.
inline const K2Table& shared_k2_table(const SmearingKernel& kernel) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<K2Table>> cache;
  const auto key = std::make_tuple(kernel.dimension(), static_cast<int>(kernel.profile()),
                                   kernel.resolution());
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    // 4x the declared resolution keeps the cubic interpolation error well
    // below the quadrature targets
    auto table = std::make_unique<K2Table>(kernel, kernel.resolution() * 4, 1e-5);
    it = cache.emplace(key, std::move(table)).first;
  }
  return *it->second;
}

}  // namespace detail

inline ScalingSeries scaled_truncated_field(const ScalingRequest& req) {
  detail::validate_request(req);
  const CorrelationFamily& fam = *req.family;
  const int n = fam.dimension, l = req.order;
  const std::vector<double> Y = detail::difference_points(req.X, l, n);
  if (fam.singular_at_origin) {
    for (int i = 0; i + 1 < l; ++i)
      if (norm(std::span<const double>(Y).subspan(i * n, n)) == 0.0)
        throw domain_error("field mode: unsmeared field at coincident points diverges");
  }
  ScalingSeries series;
  series.order = l;
  series.dimension = n;
  series.mode = ScalingMode::field;
  series.gamma = req.gamma;
  series.family_kind = fam.kind;
  series.seed = req.sampler.seed;
  std::vector<double> scaled(Y.size());
  for (double R : req.R_grid) {
    for (size_t i = 0; i < Y.size(); ++i) scaled[i] = R * Y[i];
    const double value = std::pow(R, l * (n - req.gamma)) * fam.eval_truncated(l, scaled);
    series.points.push_back({R, value, 0.0, 1, false});
  }
  return series;
}

inline ScalingSeries scaled_truncated_block(const ScalingRequest& req, int workers = 1) {
  detail::validate_request(req);
  if (req.mode != ScalingMode::block) return scaled_truncated_field(req);
  const CorrelationFamily& fam = *req.family;
  const SmearingKernel& kernel = *req.kernel;
  if (kernel.dimension() != fam.dimension)
    throw domain_error("kernel and family dimensions differ");
  const int n = fam.dimension, l = req.order;
  const std::vector<double> Y = detail::difference_points(req.X, l, n);

  ScalingSeries series;
  series.order = l;
  series.dimension = n;
  series.mode = ScalingMode::block;
  series.gamma = req.gamma;
  series.family_kind = fam.kind;
  series.seed = req.sampler.seed;
  series.points.resize(req.R_grid.size());

  using Method = SamplerSpec::Method;
  Method method = req.sampler.method;
  if (method == Method::automatic) method = (l == 2) ? Method::grid : Method::qmc;
  if (method == Method::grid && l >= 3)
    throw domain_error("grid sampler supports order 2 only; orders >= 3 integrate by QMC");

  if (method == Method::grid) {
    // l = 2 reduces to the n-dim integral \int W^T_2(R(y+Y)) (f*f)(y) dy.
    if (!fam.two_point_radial)
      throw domain_error("grid sampler needs a radial 2-point function");
    const K2Table& k2 = detail::shared_k2_table(kernel);
    const double Yn = norm(Y);
    run_indexed(req.R_grid.size(), workers, [&](std::size_t i) {
      const double R = req.R_grid[i];
      auto w2 = [&](double r) { return fam.two_point_radial(R * r); };
      RadialShiftedOptions opt;
      opt.tol = 1e-9;
      opt.singular_shift = fam.singular_at_origin && Yn < K2Table::support_radius();
      const double integral = radial_shifted_integral(
          n, [&](double r) { return k2.eval(r); }, w2, Yn, K2Table::support_radius(), opt);
      const double value = std::pow(R, l * (n - req.gamma)) * integral;
      series.points[i] = {R, value, 0.0, 0, false};
    });
    return series;
  }

  // QMC over [-2,2]^{l n}; work units are (R index, rotation) pairs, combined
  // in fixed order so any worker count yields identical bytes.
  const int dim = l * n;
  if (dim > qmc::kMaxDim) throw domain_error("QMC dimension above 16 unsupported");
  const std::uint64_t per_rotation =
      std::max<std::uint64_t>(1, req.sampler.samples / kQmcRotations);
  std::vector<double> rotation_values(req.R_grid.size() * kQmcRotations);
  run_indexed(rotation_values.size(), workers, [&](std::size_t unit) {
    const std::size_t r_index = unit / kQmcRotations;
    const int rotation = static_cast<int>(unit % kQmcRotations);
    const double R = req.R_grid[r_index];
    const std::uint64_t key =
        detail::derive_key(detail::derive_key(req.sampler.seed, r_index), 0xb0b, rotation);
    auto integrand = [&](std::span<const double> x) {
      double weight = 1.0;
      for (int i = 0; i < l && weight != 0.0; ++i)
        weight *= kernel(std::span<const double>(x).subspan(i * n, n));
      if (weight == 0.0) return 0.0;
      double args[15];
      for (int i = 0; i + 1 < l; ++i)
        for (int d = 0; d < n; ++d)
          args[i * n + d] = R * (x[i * n + d] - x[(i + 1) * n + d] + Y[i * n + d]);
      const double w = fam.truncated(l, std::span<const double>(args, (l - 1) * n));
      if (!std::isfinite(w)) return 0.0;  // integrable point singularity (measure zero)
      return w * weight;
    };
    rotation_values[unit] = qmc::rotation_integral_cube(dim, -2.0, 2.0, per_rotation, key, integrand);
  });
  for (std::size_t i = 0; i < req.R_grid.size(); ++i) {
    double sum = 0;
    for (int s = 0; s < kQmcRotations; ++s) sum += rotation_values[i * kQmcRotations + s];
    const double mean = sum / kQmcRotations;
    double var = 0;
    for (int s = 0; s < kQmcRotations; ++s) {
      const double d = rotation_values[i * kQmcRotations + s] - mean;
      var += d * d;
    }
    var /= (kQmcRotations - 1);
    const double se = std::sqrt(var / kQmcRotations);
    const double prefactor = std::pow(req.R_grid[i], l * (n - req.gamma));
    const double value = prefactor * mean;
    const double stderr_value = prefactor * se;
    const bool flagged =
        stderr_value > req.qmc_rel_tolerance * std::abs(value) && stderr_value > 0.0;
    series.points[i] = {req.R_grid[i], value, stderr_value,
                        per_rotation * kQmcRotations, flagged};
  }
  return series;
}

// ---------------------------------------------------------------------------
// Predicted limits.
// ---------------------------------------------------------------------------

/// Predicted 2-point limit c0 * \int |y+Y|^{-(n-alpha)} (f*f)(y) dy by
/// deterministic quadrature. Requires the support condition |Y| > 4 unless
/// the integrable-singularity fallback is enabled.
inline double limit_prediction_2pt(const CorrelationFamily& family, const SmearingKernel& kernel,
                                   std::span<const double> Y, bool singular_fallback = false) {
  if (family.dimension != kernel.dimension())
    throw domain_error("kernel and family dimensions differ");
  auto it = family.decay_meta.find(2);
  if (it == family.decay_meta.end() || family.critical_c0 <= 0.0)
    throw domain_error("limit prediction needs a family with declared power-law 2-point decay");
  const double nu = it->second;  // n - alpha
  const double Yn = norm(Y);
  if (!(Yn > K2Table::support_radius()) && !singular_fallback)
    throw domain_error(
        "support condition |Y| > 4 violated and singular fallback disabled (the integrand "
        "|y+Y|^{-(n-alpha)} meets the kernel support)");
  const K2Table& k2 = detail::shared_k2_table(kernel);
  RadialShiftedOptions opt;
  opt.tol = 1e-11;
  opt.singular_shift = Yn < K2Table::support_radius();
  const double integral = radial_shifted_integral(
      family.dimension, [&](double r) { return k2.eval(r); },
      [nu](double r) { return std::pow(r, -nu); }, Yn, K2Table::support_radius(), opt);
  return family.critical_c0 * integral;
}

struct QmcValue {
  double value = 0;
  double stderr_value = 0;
  std::uint64_t samples = 0;
};

/// Predicted l-point limit c0 * \int H_l(y+Y)^{-1} prod f(x_i) dx_i by QMC,
/// for homogeneous channels with alpha'_l < (l-1) n.
inline QmcValue limit_prediction_lpt(const CorrelationFamily& family, const SmearingKernel& kernel,
                                     std::span<const double> X, int l,
                                     const SamplerSpec& sampler = {}, int workers = 1) {
  if (family.dimension != kernel.dimension())
    throw domain_error("kernel and family dimensions differ");
  if (l < 2 || l > 5) throw domain_error("limit prediction supports orders 2..5");
  auto it = family.decay_meta.find(l);
  if (it == family.decay_meta.end())
    throw domain_error("family declares no decay channel for order " + std::to_string(l));
  const int n = family.dimension;
  const double alpha_prime = it->second;
  if (!(alpha_prime < (l - 1) * n))
    throw domain_error("alpha'_l = " + format_g17(alpha_prime) +
                       " is not below (l-1)n = " + format_g17(static_cast<double>((l - 1) * n)) +
                       "; outside the weak-clustering regime");
  if (static_cast<int>(X.size()) != l * n)
    throw domain_error("limit prediction: X must hold " + std::to_string(l) + " points");
  const std::vector<double> Y = detail::difference_points(X, l, n);
  const int dim = l * n;
  const double c0 = family.critical_c0;
  auto integrand = [&](std::span<const double> x) {
    double weight = 1.0;
    for (int i = 0; i < l && weight != 0.0; ++i)
      weight *= kernel(std::span<const double>(x).subspan(i * n, n));
    if (weight == 0.0) return 0.0;
    double s2 = 0;
    for (int i = 0; i + 1 < l; ++i)
      for (int d = 0; d < n; ++d) {
        const double u = x[i * n + d] - x[(i + 1) * n + d] + Y[i * n + d];
        s2 += u * u;
      }
    const double h = std::pow(s2, 0.5 * alpha_prime);
    if (h < 1e-300) return 0.0;  // integrable point singularity (measure zero)
    return weight / h;
  };
  qmc::Estimate est = qmc::integrate_cube(dim, -2.0, 2.0,
                                          std::max<std::uint64_t>(1, sampler.samples / kQmcRotations),
                                          kQmcRotations, sampler.seed, integrand, workers);
  return {c0 * est.mean, c0 * est.stderr_mean, est.samples};
}

// ---------------------------------------------------------------------------
// Coincident-channel continuity check: the all-points-coincident block value
// against the X -> 0 extrapolation of the separated-configuration limit.
// ---------------------------------------------------------------------------

struct CoincidentChannelOptions {
  std::vector<double> R_grid = {128, 256, 512, 1024};
  std::uint64_t samples = 262144;
  std::uint64_t seed = 77;
  double x0_separation = 6.0;                    // base separation of the shrinking sequence
  std::vector<double> shrink = {0.5, 0.25, 0.125};
};

struct CoincidentChannelReport {
  double direct_value = 0;
  double direct_sigma = 0;
  double limit_value = 0;
  double limit_sigma = 0;
  double discrepancy = 0;
  double sigma_combined = 0;
  bool within_3sigma = false;
};

inline CoincidentChannelReport coincident_channel_check(const CorrelationFamily& family,
                                                        const SmearingKernel& kernel, int l,
                                                        double gamma,
                                                        const CoincidentChannelOptions& opt = {},
                                                        int workers = 1) {
  const int n = family.dimension;
  CoincidentChannelReport rep;

  // direct route: block series at X == 0, extrapolated in R^{-alpha'} from the
  // two largest grid points
  ScalingRequest req;
  req.family = &family;
  req.kernel = &kernel;
  req.mode = ScalingMode::block;
  req.order = l;
  req.gamma = gamma;
  req.X.assign(l * n, 0.0);
  req.R_grid = opt.R_grid;
  req.sampler.method = SamplerSpec::Method::qmc;
  req.sampler.samples = opt.samples;
  req.sampler.seed = opt.seed;
  ScalingSeries direct = scaled_truncated_block(req, workers);
  const auto& pts = direct.points;
  if (pts.size() >= 2 && family.decay_meta.count(l)) {
    const double ap = family.decay_meta.at(l);
    const auto& p1 = pts[pts.size() - 2];
    const auto& p2 = pts[pts.size() - 1];
    const double u1 = std::pow(p1.R, -ap), u2 = std::pow(p2.R, -ap);
    const double w1 = -u2 / (u1 - u2), w2 = u1 / (u1 - u2);  // value at u -> 0
    rep.direct_value = w1 * p1.value + w2 * p2.value;
    rep.direct_sigma = std::sqrt(w1 * w1 * p1.stderr_value * p1.stderr_value +
                                 w2 * w2 * p2.stderr_value * p2.stderr_value);
  } else {
    rep.direct_value = pts.back().value;
    rep.direct_sigma = pts.back().stderr_value;
  }

  // limit route: separated-configuration prediction along a shrinking sequence,
  // extrapolated in t^{alpha'} (the leading continuity correction)
  std::vector<double> tv, vv, sv;
  for (size_t k = 0; k < opt.shrink.size(); ++k) {
    const double t = opt.shrink[k];
    std::vector<double> X(l * n, 0.0);
    for (int i = 0; i < l; ++i) X[i * n] = t * opt.x0_separation * i;
    SamplerSpec s = req.sampler;
    s.seed = detail::derive_key(opt.seed, 0x11f, k);
    QmcValue v = limit_prediction_lpt(family, kernel, X, l, s, workers);
    tv.push_back(t);
    vv.push_back(v.value);
    sv.push_back(v.stderr_value);
  }
  if (tv.size() >= 2) {
    const double ap = family.decay_meta.count(l) ? family.decay_meta.at(l) : 1.0;
    const size_t k1 = tv.size() - 2, k2 = tv.size() - 1;
    const double u1 = std::pow(tv[k1], ap), u2 = std::pow(tv[k2], ap);
    const double w1 = -u2 / (u1 - u2), w2 = u1 / (u1 - u2);
    rep.limit_value = w1 * vv[k1] + w2 * vv[k2];
    rep.limit_sigma = std::sqrt(w1 * w1 * sv[k1] * sv[k1] + w2 * w2 * sv[k2] * sv[k2]);
    if (tv.size() >= 3) {
      // model residual estimate: drop to the previous pair
      const double u0 = std::pow(tv[k1 - 1], ap);
      const double w0a = -u1 / (u0 - u1), w0b = u0 / (u0 - u1);
      const double alt = w0a * vv[k1 - 1] + w0b * vv[k1];
      rep.limit_sigma = std::hypot(rep.limit_sigma, 0.5 * std::abs(alt - rep.limit_value));
    }
  } else {
    rep.limit_value = vv.back();
    rep.limit_sigma = sv.back();
  }

  rep.discrepancy = std::abs(rep.direct_value - rep.limit_value);
  rep.sigma_combined = std::hypot(rep.direct_sigma, rep.limit_sigma);
  rep.within_3sigma = rep.discrepancy <= 3.0 * rep.sigma_combined;
  return rep;
}

}  // namespace rgscale
