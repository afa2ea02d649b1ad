// SPDX-License-Identifier: Apache-2.0
//
// beamspace-sd: beamspace channel estimation for lens-array mmWave massive MIMO
// Copyright (C) 2026 The beamspace-sd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Saleh-Valenzuela spatial channels for a half-wavelength ULA, the lens
// (spatial DFT) beamspace transform, and the leakage bounds that make
// per-component support detection work.
//
// Beam indices are zero-based throughout: beam n points at the grid direction
// (n + 1 - (N+1)/2) / N.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "beamspace/errors.hpp"
#include "beamspace/numerics.hpp"
#include "beamspace/random.hpp"

namespace beamspace {

struct PathComponent {
  cplx gain;         // complex path gain
  double direction;  // spatial direction (d/λ)·sin θ, in [-0.5, 0.5]
  bool is_los = false;
};

struct SpatialChannel {
  std::size_t n_antennas = 0;
  std::vector<PathComponent> components;  // LoS first, then NLoS paths
  CVector vector;                         // antenna-domain channel h
};

struct BeamspaceChannel {
  CVector vector;  // U·h
  /// U·(gain·a(direction)) per path, unscaled by √(N/(L+1)). Empty unless requested.
  std::vector<CVector> component_vectors;
};

struct ChannelParams {
  std::size_t n_antennas = 256;
  std::size_t n_nlos = 2;
  double los_variance = 1.0;
  double nlos_variance = 0.01;
};

/// a(ψ) = (1/√N)·[exp(−j2πψm)], m ∈ {l − (N−1)/2 : l = 0..N−1}
inline CVector steering_vector(double direction, std::size_t n_antennas) {
  if (n_antennas == 0) throw DomainError("steering_vector: N must be positive");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  const double centre = (static_cast<double>(n_antennas) - 1.0) / 2.0;
  CVector a(n_antennas);
  for (std::size_t l = 0; l < n_antennas; ++l) {
    const double m = static_cast<double>(l) - centre;
    a[l] = std::polar(scale, -2.0 * std::numbers::pi * direction * m);
  }
  return a;
}

/// Grid direction of zero-based beam n: (2n + 1 − N) / (2N).
inline double grid_direction(std::size_t beam, std::size_t n_antennas) {
  const auto n = static_cast<double>(n_antennas);
  return (2.0 * static_cast<double>(beam) + 1.0 - n) / (2.0 * n);
}

/// Υ(x) = sin(Nπx) / (N·sin(πx)). At integer x the removable singularity is
/// replaced by its limit (−1)^{x(N−1)}, so Υ(0) = 1.
inline double dirichlet_kernel(double x, std::size_t n_antennas) {
  const auto n = static_cast<double>(n_antennas);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-13) {
    const auto k = static_cast<long long>(nearest);
    const auto exponent = (k < 0 ? -k : k) * static_cast<long long>(n_antennas - 1);
    return exponent % 2 == 0 ? 1.0 : -1.0;
  }
  return std::sin(n * std::numbers::pi * x) / (n * std::sin(std::numbers::pi * x));
}

/// The lens antenna array acting as a spatial DFT: row n of U is a(ψ̄_n)^H.
class BeamspaceTransform {
 public:
  explicit BeamspaceTransform(std::size_t n_antennas) : n_(n_antennas), u_(n_antennas, n_antennas) {
    if (n_antennas == 0) throw DomainError("BeamspaceTransform: N must be positive");
    for (std::size_t beam = 0; beam < n_; ++beam) {
      const CVector a = steering_vector(grid_direction(beam, n_), n_);
      for (std::size_t l = 0; l < n_; ++l) u_(beam, l) = std::conj(a[l]);
    }
  }

  std::size_t n_antennas() const noexcept { return n_; }
  const CMatrix& matrix() const noexcept { return u_; }
  double grid(std::size_t beam) const { return grid_direction(beam, n_); }

  CVector apply(std::span<const cplx> spatial) const {
    if (spatial.size() != n_)
      throw DimensionError("BeamspaceTransform: vector length " + std::to_string(spatial.size()) +
                           " != N = " + std::to_string(n_));
    return matvec(u_, spatial);
  }

 private:
  std::size_t n_;
  CMatrix u_;
};

/// h = √(N/(L+1))·Σ gain_i·a(direction_i)
inline SpatialChannel assemble_channel(std::size_t n_antennas, std::vector<PathComponent> components) {
  if (components.empty()) throw DomainError("assemble_channel: need at least one path");
  SpatialChannel h{n_antennas, std::move(components), CVector(n_antennas)};
  const double scale = std::sqrt(static_cast<double>(n_antennas) /
                                 static_cast<double>(h.components.size()));
  for (const auto& c : h.components) {
    const CVector a = steering_vector(c.direction, n_antennas);
    for (std::size_t l = 0; l < n_antennas; ++l) h.vector[l] += scale * c.gain * a[l];
  }
  return h;
}

/// One LoS and `n_nlos` NLoS paths with CN gains and directions uniform on [−0.5, 0.5].
inline SpatialChannel sample_channel(Rng& rng, const ChannelParams& params) {
  if (params.los_variance <= 0.0 || params.nlos_variance <= 0.0)
    throw DomainError("sample_channel: path variances must be positive");
  std::uniform_real_distribution<double> direction(-0.5, 0.5);
  std::vector<PathComponent> paths;
  paths.reserve(params.n_nlos + 1);
  for (std::size_t i = 0; i <= params.n_nlos; ++i) {
    const bool los = i == 0;
    const cplx gain = complex_gaussian(rng, los ? params.los_variance : params.nlos_variance);
    paths.push_back({gain, direction(rng), los});
  }
  return assemble_channel(params.n_antennas, std::move(paths));
}

inline BeamspaceChannel to_beamspace(const SpatialChannel& h, const BeamspaceTransform& u,
                                     bool keep_components = false) {
  if (h.n_antennas != u.n_antennas() || h.vector.size() != u.n_antennas())
    throw DimensionError("to_beamspace: channel has N = " + std::to_string(h.vector.size()) +
                         ", transform has N = " + std::to_string(u.n_antennas()));
  BeamspaceChannel out{u.apply(h.vector), {}};
  if (keep_components) {
    out.component_vectors.reserve(h.components.size());
    for (const auto& c : h.components) {
      CVector spatial = steering_vector(c.direction, h.n_antennas);
      for (auto& v : spatial) v *= c.gain;
      out.component_vectors.push_back(u.apply(spatial));
    }
  }
  return out;
}

/// |β_i||β_j| / (N·|sin π(ψ_i − ψ_j)|), an upper bound on |c̃_i^H c̃_j|.
inline double cross_correlation_bound(const PathComponent& ci, const PathComponent& cj,
                                      std::size_t n_antennas) {
  const double delta = ci.direction - cj.direction;
  if (std::abs(delta - std::round(delta)) < 1e-13)
    throw DomainError("cross_correlation_bound: directions coincide modulo 1");
  return std::abs(ci.gain) * std::abs(cj.gain) /
         (static_cast<double>(n_antennas) * std::abs(std::sin(std::numbers::pi * delta)));
}

/// Guaranteed fraction of a component's power captured by its V strongest
/// beams: (2/N²)·Σ_{i=1}^{V/2} 1/sin²((2i−1)π/(2N)). Defined for even V.
inline double power_ratio_lower_bound(std::size_t n_antennas, std::size_t v) {
  if (v % 2 != 0 || v < 2 || v > n_antennas)
    throw DomainError("power_ratio_lower_bound: V must be even with 2 <= V <= N (V = " +
                      std::to_string(v) + ", N = " + std::to_string(n_antennas) + ")");
  const auto n = static_cast<double>(n_antennas);
  double acc = 0.0;
  for (std::size_t i = 1; i <= v / 2; ++i) {
    const double s = std::sin((2.0 * static_cast<double>(i) - 1.0) * std::numbers::pi / (2.0 * n));
    acc += 1.0 / (s * s);
  }
  return 2.0 / (n * n) * acc;
}

/// Unit-gain beamspace component whose direction sits `offset` above a grid
/// direction near broadside: entries Υ(ψ̄_n − ψ).
inline CVector offgrid_component(std::size_t n_antennas, double offset) {
  const double direction = grid_direction((n_antennas - 1) / 2, n_antennas) + offset;
  CVector c(n_antennas);
  for (std::size_t beam = 0; beam < n_antennas; ++beam)
    c[beam] = dirichlet_kernel(grid_direction(beam, n_antennas) - direction, n_antennas);
  return c;
}

/// Indices of the V largest-magnitude entries, strongest first (ties: lower index).
inline std::vector<std::size_t> strongest_entries(std::span<const cplx> x, std::size_t v) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  v = std::min(v, x.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(v), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double na = std::norm(x[a]);
                      const double nb = std::norm(x[b]);
                      return na != nb ? na > nb : a < b;
                    });
  order.resize(v);
  return order;
}

/// Power of the V strongest entries over total power.
inline double strongest_power_ratio(std::span<const cplx> x, std::size_t v) {
  const double total = squared_norm(x);
  if (total == 0.0) return 0.0;
  double kept = 0.0;
  for (auto idx : strongest_entries(x, v)) kept += std::norm(x[idx]);
  return kept / total;
}

/// Captured-power ratio for the worst-case component, half a beam off-grid.
/// Equals power_ratio_lower_bound for even V.
inline double worst_case_component_ratio(std::size_t n_antennas, std::size_t v) {
  if (v > n_antennas) throw DomainError("worst_case_component_ratio: V exceeds N");
  return strongest_power_ratio(
      offgrid_component(n_antennas, 1.0 / (2.0 * static_cast<double>(n_antennas))), v);
}

}  // namespace beamspace
