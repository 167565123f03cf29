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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rgscale/common.hpp"

namespace rgscale {

/// Set-partition algebra between full (moment) and truncated (cumulant)
/// correlation hierarchies:
///
///   W(x_1..x_l) = sum over partitions  prod over blocks  W^T(x_block)
///
/// and its inversion by recursion on the order. Orders up to 6 (Bell(6)=203)
/// keep exhaustive enumeration trivial.

inline constexpr int kMaxPartitionOrder = 6;
inline constexpr std::uint64_t kBellNumbers[kMaxPartitionOrder + 1] = {1, 1, 2, 5, 15, 52, 203};

using Block = std::vector<int>;          // ascending indices into {0..l-1}
using Partition = std::vector<Block>;    // blocks ordered by least element

struct PartitionSet {
  int l = 0;
  std::vector<Partition> partitions;
};

namespace detail {

inline void enumerate_partitions_rec(int next, int l, Partition& current,
                                     std::vector<Partition>& out) {
  if (next == l) {
    out.push_back(current);
    return;
  }
  for (auto& block : current) {
    block.push_back(next);
    enumerate_partitions_rec(next + 1, l, current, out);
    block.pop_back();
  }
  current.push_back({next});
  enumerate_partitions_rec(next + 1, l, current, out);
  current.pop_back();
}

}  // namespace detail

/// All partitions of {0..l-1}, blocks sorted by least element (the recursion
/// creates blocks in first-element order, so this holds by construction).
inline const PartitionSet& enumerate_partitions(int l) {
  if (l < 1 || l > kMaxPartitionOrder)
    throw domain_error("enumerate_partitions: order must be 1.." +
                       std::to_string(kMaxPartitionOrder) + ", got " + std::to_string(l));
  static const std::vector<PartitionSet> cache = [] {
    std::vector<PartitionSet> sets(kMaxPartitionOrder + 1);
    for (int m = 1; m <= kMaxPartitionOrder; ++m) {
      sets[m].l = m;
      Partition scratch;
      detail::enumerate_partitions_rec(0, m, scratch, sets[m].partitions);
    }
    return sets;
  }();
  return cache[l];
}

// ---------------------------------------------------------------------------
// Hierarchy tables keyed by point subsets.
// ---------------------------------------------------------------------------

enum class HierarchyKind { moments, cumulants };

/// Values of a correlation hierarchy on a fixed tuple of points, one entry per
/// nonempty subset (bitmask over point indices). Subset size is the order.
struct HierarchyTable {
  int l_max = 0;
  HierarchyKind kind = HierarchyKind::cumulants;
  std::map<std::uint32_t, double> values;

  double at(std::uint32_t subset) const {
    auto it = values.find(subset);
    if (it == values.end())
      throw domain_error("hierarchy table: missing entry of order " +
                         std::to_string(__builtin_popcount(subset)));
    return it->second;
  }
};

namespace detail {

/// Partitions of an arbitrary subset, as bitmask blocks, via the canonical
/// partitions of {0..k-1}.
inline std::vector<std::vector<std::uint32_t>> subset_partitions(std::uint32_t subset) {
  std::vector<int> members;
  for (int i = 0; i < 32; ++i)
    if (subset & (1u << i)) members.push_back(i);
  const int k = static_cast<int>(members.size());
  const PartitionSet& ps = enumerate_partitions(k);
  std::vector<std::vector<std::uint32_t>> result;
  result.reserve(ps.partitions.size());
  for (const Partition& p : ps.partitions) {
    std::vector<std::uint32_t> masks;
    masks.reserve(p.size());
    for (const Block& b : p) {
      std::uint32_t m = 0;
      for (int idx : b) m |= 1u << members[idx];
      masks.push_back(m);
    }
    result.push_back(std::move(masks));
  }
  return result;
}

}  // namespace detail

/// Forward direction: W(S) = sum over partitions of S of prod W^T(block).
inline HierarchyTable cumulants_to_moments(const HierarchyTable& cum) {
  if (cum.kind != HierarchyKind::cumulants)
    throw domain_error("cumulants_to_moments: input table is not of cumulant kind");
  HierarchyTable mom;
  mom.l_max = cum.l_max;
  mom.kind = HierarchyKind::moments;
  const std::uint32_t full = (1u << cum.l_max) - 1;
  for (std::uint32_t s = 1; s <= full; ++s) {
    double total = 0;
    for (const auto& partition : detail::subset_partitions(s)) {
      double prod = 1;
      for (std::uint32_t block : partition) prod *= cum.at(block);
      total += prod;
    }
    mom.values[s] = total;
  }
  return mom;
}

/// Inverse direction by recursion on the order: the full-block term is solved
/// for, all strictly finer partitions use already-known lower orders.
inline HierarchyTable moments_to_cumulants(const HierarchyTable& mom) {
  if (mom.kind != HierarchyKind::moments)
    throw domain_error("moments_to_cumulants: input table is not of moment kind");
  HierarchyTable cum;
  cum.l_max = mom.l_max;
  cum.kind = HierarchyKind::cumulants;
  const std::uint32_t full = (1u << mom.l_max) - 1;
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t s = 1; s <= full; ++s) subsets.push_back(s);
  std::sort(subsets.begin(), subsets.end(), [](std::uint32_t a, std::uint32_t b) {
    const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  for (std::uint32_t s : subsets) {
    double rest = 0;
    for (const auto& partition : detail::subset_partitions(s)) {
      if (partition.size() == 1) continue;  // the full block, solved for
      double prod = 1;
      for (std::uint32_t block : partition) prod *= cum.at(block);
      rest += prod;
    }
    cum.values[s] = mom.at(s) - rest;
  }
  return cum;
}

// ---------------------------------------------------------------------------
// Dual momentum variables: q_i = p_1 + ... + p_i, i = 1..l-1 (vectors in R^n).
// ---------------------------------------------------------------------------

inline std::vector<double> momenta_to_partial_sums(std::span<const double> p, int n) {
  if (n < 1 || p.size() % n != 0) throw domain_error("momenta: size must be a multiple of the dimension");
  std::vector<double> q(p.begin(), p.end());
  const int count = static_cast<int>(p.size()) / n;
  for (int i = 1; i < count; ++i)
    for (int d = 0; d < n; ++d) q[i * n + d] += q[(i - 1) * n + d];
  return q;
}

/// Recovers p from q = (p_1, p_1+p_2, ...): p_1 = q_1, p_i = q_i - q_{i-1}.
inline std::vector<double> partial_sums_to_momenta(std::span<const double> q, int n) {
  if (n < 1 || q.size() % n != 0) throw domain_error("momenta: size must be a multiple of the dimension");
  std::vector<double> p(q.begin(), q.end());
  const int count = static_cast<int>(q.size()) / n;
  for (int i = count - 1; i >= 1; --i)
    for (int d = 0; d < n; ++d) p[i * n + d] -= q[(i - 1) * n + d];
  return p;
}

}  // namespace rgscale
