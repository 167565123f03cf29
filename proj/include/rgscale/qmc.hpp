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
#include <span>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/parallel.hpp"

namespace rgscale {

/// Randomized quasi-Monte-Carlo on an axis-aligned cube: Halton points with
/// Cranley-Patterson rotations. Each rotated estimate is unbiased, so the
/// spread of the independent rotations yields an honest standard error.
/// Everything is keyed deterministically; point i of rotation s is a pure
/// function of (key, s, i).
namespace qmc {

inline constexpr int kMaxDim = 16;
inline constexpr std::uint32_t kPrimes[kMaxDim] = {2,  3,  5,  7,  11, 13, 17, 19,
                                                   23, 29, 31, 37, 41, 43, 47, 53};

inline double radical_inverse(std::uint32_t base, std::uint64_t index) {
  double inv_base = 1.0 / base, factor = inv_base, value = 0.0;
  while (index) {
    value += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return value;
}

struct Estimate {
  double mean = 0;
  double stderr_mean = 0;       // stddev of rotation means / sqrt(#rotations)
  std::uint64_t samples = 0;    // total points across rotations
  std::vector<double> rotation_means;
};

/// One rotation: mean of f over `count` points in [0,1)^dim shifted by a
/// key-derived offset. Kahan summation keeps the result independent of any
/// outer chunking.
template <typename F>
double rotation_mean(int dim, std::uint64_t count, std::uint64_t key, F&& f) {
  if (dim < 1 || dim > kMaxDim) throw domain_error("qmc: dimension must be 1..16");
  double shift[kMaxDim];
  for (int d = 0; d < dim; ++d) shift[d] = detail::u01(detail::derive_key(key, 0xace1u, d));
  double sum = 0, comp = 0;
  double point[kMaxDim];
  for (std::uint64_t i = 1; i <= count; ++i) {
    for (int d = 0; d < dim; ++d) {
      double u = radical_inverse(kPrimes[d], i) + shift[d];
      if (u >= 1.0) u -= 1.0;
      point[d] = u;
    }
    const double y = f(std::span<const double>(point, dim)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(count);
}

/// Mean of f over [0,1)^dim using `rotations` independent rotations of
/// `count_per_rotation` points each. Rotations are independent work units;
/// the combination order is fixed, so results are bitwise reproducible for
/// any worker count.
template <typename F>
Estimate integrate_unit(int dim, std::uint64_t count_per_rotation, int rotations,
                        std::uint64_t key, F&& f, int workers = 1) {
  if (rotations < 2) throw domain_error("qmc: need at least 2 rotations for an error estimate");
  Estimate est;
  est.rotation_means.resize(rotations);
  run_indexed(static_cast<std::size_t>(rotations), workers, [&](std::size_t s) {
    est.rotation_means[s] = rotation_mean(dim, count_per_rotation, detail::derive_key(key, 0xb0b, s), f);
  });
  double sum = 0;
  for (double m : est.rotation_means) sum += m;
  est.mean = sum / rotations;
  double var = 0;
  for (double m : est.rotation_means) var += (m - est.mean) * (m - est.mean);
  var /= (rotations - 1);
  est.stderr_mean = std::sqrt(var / rotations);
  est.samples = count_per_rotation * static_cast<std::uint64_t>(rotations);
  return est;
}

/// Volume-scaled single-rotation integral over [lo, hi]^dim. Callers that
/// manage their own work units combine several of these.
template <typename F>
double rotation_integral_cube(int dim, double lo, double hi, std::uint64_t count,
                              std::uint64_t key, F&& f) {
  const double side = hi - lo;
  double volume = 1.0;
  for (int d = 0; d < dim; ++d) volume *= side;
  const double mean = rotation_mean(dim, count, key, [&f, lo, side, dim](std::span<const double> u) {
    double scaled[kMaxDim];
    for (int d = 0; d < dim; ++d) scaled[d] = lo + side * u[d];
    return f(std::span<const double>(scaled, dim));
  });
  return volume * mean;
}

/// Same, over the cube [lo, hi]^dim; returns the integral (not the mean).
template <typename F>
Estimate integrate_cube(int dim, double lo, double hi, std::uint64_t count_per_rotation,
                        int rotations, std::uint64_t key, F&& f, int workers = 1) {
  const double side = hi - lo;
  double volume = 1.0;
  for (int d = 0; d < dim; ++d) volume *= side;
  Estimate est = integrate_unit(
      dim, count_per_rotation, rotations, key,
      [&f, lo, side, dim](std::span<const double> u) {
        double scaled[kMaxDim];  // per-call: rotations may run on different threads
        for (int d = 0; d < dim; ++d) scaled[d] = lo + side * u[d];
        return f(std::span<const double>(scaled, dim));
      },
      workers);
  est.mean *= volume;
  est.stderr_mean *= volume;
  for (double& m : est.rotation_means) m *= volume;
  return est;
}

}  // namespace qmc
}  // namespace rgscale
