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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/exponents.hpp"
#include "rgscale/families.hpp"
#include "rgscale/scaling.hpp"

namespace rgscale {

// ---------------------------------------------------------------------------
// Fixed-point trichotomy from declared channel exponents:
//   gamma_l = n - alpha'_l / l = (n + alpha_l) / l,  alpha'_l + alpha_l = (l-1) n.
// Channels with gamma_l < gamma_2 vanish under gamma_2 scaling, equal channels
// survive finite, any gamma_l > gamma_2 diverges.
// ---------------------------------------------------------------------------

enum class ChannelRelation { less, equal, greater };
enum class ChannelTrend { vanishing, finite, diverging, undecided };
enum class FixedPointVerdict { gaussian, non_trivial, divergent };

inline std::string to_string(ChannelRelation r) {
  switch (r) {
    case ChannelRelation::less: return "less";
    case ChannelRelation::equal: return "equal";
    default: return "greater";
  }
}
inline std::string to_string(ChannelTrend t) {
  switch (t) {
    case ChannelTrend::vanishing: return "vanishing";
    case ChannelTrend::finite: return "finite";
    case ChannelTrend::diverging: return "diverging";
    default: return "undecided";
  }
}
inline std::string to_string(FixedPointVerdict v) {
  switch (v) {
    case FixedPointVerdict::gaussian: return "gaussian";
    case FixedPointVerdict::non_trivial: return "non_trivial";
    default: return "divergent";
  }
}

struct ChannelRow {
  int l = 3;
  double alpha_prime = 0;
  double alpha_l = 0;
  double gamma_l = 0;
  ChannelRelation relation = ChannelRelation::less;
  // numeric confirmation, filled on demand
  std::optional<ChannelTrend> trend;
  double tail_slope = 0;
  double final_R = 0;
  bool mismatch = false;  // algebraic relation and numeric trend disagree
};

struct FixedPointReport {
  int n = 1;
  double alpha_2 = 0;
  double gamma_2 = 0;
  double tie_tolerance = 0.02;
  std::vector<ChannelRow> rows;
  FixedPointVerdict verdict = FixedPointVerdict::gaussian;
  bool confirmed = false;
};

inline FixedPointReport classify(int n, double alpha_2,
                                 const std::vector<std::pair<int, double>>& rows,
                                 double tie_tolerance = 0.02) {
  require_dimension(n);
  if (!(alpha_2 > 0.0 && alpha_2 < n))
    throw domain_error("alpha_2 must lie in (0, n) = (0, " + std::to_string(n) + "), got " +
                       format_g17(alpha_2));
  FixedPointReport rep;
  rep.n = n;
  rep.alpha_2 = alpha_2;
  rep.gamma_2 = 0.5 * (n + alpha_2);
  rep.tie_tolerance = tie_tolerance;
  bool any_equal = false, any_greater = false;
  for (const auto& [l, alpha_prime] : rows) {
    if (l < 3) throw domain_error("channel rows start at l = 3");
    const double bound = (l - 1) * static_cast<double>(n);
    if (!(alpha_prime > 0.0 && alpha_prime < bound))
      throw domain_error("alpha'_" + std::to_string(l) + " must lie in (0, (l-1)n) = (0, " +
                         format_g17(bound) + "), got " + format_g17(alpha_prime));
    ChannelRow row;
    row.l = l;
    row.alpha_prime = alpha_prime;
    row.alpha_l = bound - alpha_prime;
    row.gamma_l = n - alpha_prime / l;
    if (std::abs(rep.gamma_2 - row.gamma_l) <= tie_tolerance) {
      row.relation = ChannelRelation::equal;
      any_equal = true;
    } else if (row.gamma_l > rep.gamma_2) {
      row.relation = ChannelRelation::greater;
      any_greater = true;
    } else {
      row.relation = ChannelRelation::less;
    }
    rep.rows.push_back(row);
  }
  if (any_greater)
    rep.verdict = FixedPointVerdict::divergent;
  else if (any_equal)
    rep.verdict = FixedPointVerdict::non_trivial;
  else
    rep.verdict = FixedPointVerdict::gaussian;
  return rep;
}

struct ConfirmOptions {
  std::vector<double> R_grid = {16, 32, 64, 128, 256};
  std::uint64_t seed = 11;
  std::uint64_t samples = 131072;
  double x_separation = 6.0;     // pairwise spacing of the base points
  double slope_threshold = 0.1;  // |tail slope| below this reads as finite
};

/// Runs the scaled series for every row at gamma = gamma_2 and labels the
/// trend from the tail log-log slope. The family must realize the declared
/// exponents (built from the same channel data).
inline FixedPointReport confirm_numerically(FixedPointReport report,
                                            const CorrelationFamily& family,
                                            const SmearingKernel& kernel,
                                            const ConfirmOptions& opt = {}, int workers = 1) {
  const int n = family.dimension;
  if (n != report.n) throw domain_error("confirm: family dimension differs from the report");
  for (ChannelRow& row : report.rows) {
    ScalingRequest req;
    req.family = &family;
    req.kernel = &kernel;
    req.mode = ScalingMode::block;
    req.order = row.l;
    req.gamma = report.gamma_2;
    req.X.assign(row.l * n, 0.0);
    for (int i = 0; i < row.l; ++i) req.X[i * n] = opt.x_separation * i;
    req.R_grid = opt.R_grid;
    req.sampler.method = SamplerSpec::Method::qmc;
    req.sampler.samples = opt.samples;
    req.sampler.seed = detail::derive_key(opt.seed, row.l);
    const ScalingSeries series = scaled_truncated_block(req, workers);
    row.final_R = series.points.back().R;

    bool all_zero = true;
    for (const auto& p : series.points) all_zero = all_zero && p.value == 0.0;
    if (all_zero) {
      row.trend = ChannelTrend::vanishing;
      row.tail_slope = -std::numeric_limits<double>::infinity();
    } else {
      const LineFit fit = fit_series_tail(series);
      row.tail_slope = fit.slope;
      // crude slope uncertainty from the relative QMC errors over the window
      auto [first, last] = tail_window(series.points);
      double rel = 0;
      for (size_t i = first; i < last; ++i) {
        const auto& p = series.points[i];
        if (p.value != 0.0) rel = std::max(rel, std::abs(p.stderr_value / p.value));
      }
      const double span = std::log(series.points[last - 1].R / series.points[first].R);
      const double slope_sigma = 2.0 * rel / std::max(span, 1e-9);
      const double margin = std::abs(std::abs(fit.slope) - opt.slope_threshold);
      if (margin < 2.0 * slope_sigma) {
        row.trend = ChannelTrend::undecided;
      } else if (fit.slope < -opt.slope_threshold) {
        row.trend = ChannelTrend::vanishing;
      } else if (fit.slope > opt.slope_threshold) {
        row.trend = ChannelTrend::diverging;
      } else {
        row.trend = ChannelTrend::finite;
      }
    }
    const ChannelTrend expected = row.relation == ChannelRelation::less ? ChannelTrend::vanishing
                                  : row.relation == ChannelRelation::equal
                                      ? ChannelTrend::finite
                                      : ChannelTrend::diverging;
    row.mismatch = row.trend != expected;
  }
  report.confirmed = true;
  return report;
}

}  // namespace rgscale
