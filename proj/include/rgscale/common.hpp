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
#include <cstdio>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgscale {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid parameters or configuration (maps to CLI exit code 1).
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to converge (maps to CLI exit code 2).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic key derivation for nested seeding (seed, stream, substream).
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (a + 1)) ^ (0xc2b2ae3d27d4eb4fULL * (b + 1));
  splitmix64(s);
  return splitmix64(s);
}

inline double u01(std::uint64_t bits) {
  // 53 random bits -> [0,1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Floats in CSV/JSON outputs carry 17 significant digits.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double norm2(std::span<const double> v) {
  double s = 0;
  for (double c : v) s += c * c;
  return s;
}

inline double norm(std::span<const double> v) { return std::sqrt(norm2(v)); }

/// Surface area of the unit sphere S^{n-1} for n = 1..3.
inline double sphere_surface(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw domain_error("sphere_surface: dimension must be 1..3, got " + std::to_string(n));
  }
}

inline double ball_volume(int n, double r) {
  switch (n) {
    case 1: return 2.0 * r;
    case 2: return std::numbers::pi * r * r;
    case 3: return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    default: throw domain_error("ball_volume: dimension must be 1..3, got " + std::to_string(n));
  }
}

inline void require_dimension(int n) {
  if (n < 1 || n > 3) throw domain_error("dimension must lie in 1..3, got " + std::to_string(n));
}

/// Least-squares slope and intercept of y against x; residual is the RMS of the fit.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double rms_residual = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw domain_error("fit_line: need at least two matched samples");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = m * sxx - sx * sx;
  if (det == 0) throw domain_error("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (m * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / m;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / m);
  return f;
}

}  // namespace rgscale
