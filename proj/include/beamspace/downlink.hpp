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

// Downlink evaluation of a channel estimate: one beam per user, reduced
// dimension zero-forcing, sum-rate against the true channel.
//
// Channel matrices are N×K with one column per user. The downlink sees
// H̃^H·B·P_r, so with H_r = B^T·H̃ (K×K, row j = beam of RF chain j) the
// effective K×K matrix is H_r^H·P_r.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "beamspace/errors.hpp"
#include "beamspace/numerics.hpp"

namespace beamspace {

struct BeamSelection {
  std::vector<std::size_t> beam_of_user;  // RF chain k serves user k on this beam

  std::size_t users() const noexcept { return beam_of_user.size(); }

  /// N×K 0/1 matrix B with B(beam_of_user[k], k) = 1.
  CMatrix selecting_matrix(std::size_t n_beams) const {
    CMatrix b(n_beams, users());
    for (std::size_t k = 0; k < users(); ++k) b(beam_of_user[k], k) = 1.0;
    return b;
  }
};

struct Precoder {
  CMatrix matrix;         // P_r, or the full N×K precoder in the fully digital case
  double power_budget;    // ρ
  double scale;           // c in P = c·H(H^H H)^{-1}
};

/// Greedy magnitude selection. Users are served in decreasing order of their
/// strongest beam magnitude; each takes its strongest beam not yet claimed.
inline BeamSelection select_beams(const CMatrix& channels) {
  const std::size_t n = channels.rows();
  const std::size_t k_users = channels.cols();
  if (k_users > n)
    throw DimensionError("select_beams: " + std::to_string(k_users) + " users but only " +
                         std::to_string(n) + " beams");

  std::vector<double> peak(k_users, 0.0);
  for (std::size_t k = 0; k < k_users; ++k)
    for (std::size_t b = 0; b < n; ++b) peak[k] = std::max(peak[k], std::abs(channels(b, k)));

  std::vector<std::size_t> order(k_users);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return peak[a] > peak[b]; });

  BeamSelection sel{std::vector<std::size_t>(k_users)};
  std::vector<bool> claimed(n, false);
  for (const std::size_t k : order) {
    std::size_t best = n;
    double best_mag = -1.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (claimed[b]) continue;
      const double m = std::abs(channels(b, k));
      if (m > best_mag) {
        best_mag = m;
        best = b;
      }
    }
    claimed[best] = true;
    sel.beam_of_user[k] = best;
  }
  return sel;
}

/// H_r = B^T·H̃: row j holds beam_of_user[j] across all users.
inline CMatrix reduced_channel(const CMatrix& channels, const BeamSelection& sel) {
  CMatrix hr(sel.users(), channels.cols());
  for (std::size_t j = 0; j < sel.users(); ++j) {
    if (sel.beam_of_user[j] >= channels.rows())
      throw DimensionError("reduced_channel: beam index out of range");
    for (std::size_t k = 0; k < channels.cols(); ++k) hr(j, k) = channels(sel.beam_of_user[j], k);
  }
  return hr;
}

/// P = c·H(H^H H)^{-1} with c set so trace(P P^H) = ρ; then H^H·P = c·I.
/// Works for the square reduced channel and for the tall fully digital one.
inline Precoder zf_precoder(const CMatrix& channel, double power_budget) {
  const HouseholderQr qr(channel);
  if (qr.singular())
    throw SingularSystemError("zf_precoder: channel is singular (condition estimate " +
                              std::to_string(qr.condition_estimate()) + ")");
  const std::size_t k_users = channel.cols();
  CMatrix inv_gram(k_users, k_users);
  CVector e(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    std::fill(e.begin(), e.end(), cplx{});
    e[k] = 1.0;
    inv_gram.set_column(k, qr.solve_normal(e));
  }
  CMatrix p = matmul(channel, inv_gram);
  const double frob2 = squared_norm(p.data());
  const double scale = std::sqrt(power_budget / frob2);
  for (std::size_t r = 0; r < p.rows(); ++r)
    for (auto& v : p.row(r)) v *= scale;
  return {std::move(p), power_budget, scale};
}

/// Σ_k log2(1 + |G_kk|² / (Σ_{j≠k} |G_kj|² + σ²)) for effective matrix G (users × streams).
inline double sum_rate_effective(const CMatrix& effective, double noise_power) {
  double total = 0.0;
  for (std::size_t k = 0; k < effective.rows(); ++k) {
    double interference = 0.0;
    for (std::size_t j = 0; j < effective.cols(); ++j)
      if (j != k) interference += std::norm(effective(k, j));
    total += std::log2(1.0 + std::norm(effective(k, k)) / (interference + noise_power));
  }
  return total;
}

/// Downlink effective matrix H_r^H·P on the true channel.
inline CMatrix effective_channel(const CMatrix& true_channels, const BeamSelection& sel,
                                 const Precoder& precoder) {
  return matmul(conj_transpose(reduced_channel(true_channels, sel)), precoder.matrix);
}

/// Sum-rate of a beam-selected precoder evaluated on the TRUE beamspace channel.
inline double sum_rate(const CMatrix& true_channels, const BeamSelection& sel,
                       const Precoder& precoder, double noise_power) {
  return sum_rate_effective(effective_channel(true_channels, sel, precoder), noise_power);
}

/// ZF on the complete N×K channel (one RF chain per antenna) with perfect CSI.
inline double full_digital_zf_sum_rate(const CMatrix& channels, double power_budget,
                                       double noise_power) {
  const Precoder p = zf_precoder(channels, power_budget);
  return sum_rate_effective(matmul(conj_transpose(channels), p.matrix), noise_power);
}

}  // namespace beamspace
