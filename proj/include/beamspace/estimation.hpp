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

// Sparse beamspace channel estimators: support detection (SD) and the OMP
// baseline. Both solve z̄ = W̄·h̃ + n̄ with W̄ of size Q×N, so every
// restricted least-squares problem uses COLUMNS of W̄ and the residual is
// updated as z ← z − W̄_S·f.

#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "beamspace/errors.hpp"
#include "beamspace/numerics.hpp"
#include "beamspace/sounding.hpp"

namespace beamspace {

/// Sorted set of zero-based beam indices.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t idx) const {
    return std::binary_search(indices_.begin(), indices_.end(), idx);
  }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  void merge(const SupportSet& other) {
    std::vector<std::size_t> out;
    out.reserve(indices_.size() + other.indices_.size());
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(out));
    indices_ = std::move(out);
  }

  bool operator==(const SupportSet&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

struct EstimationResult {
  CVector channel;                       // estimated h̃, zero outside total_support
  SupportSet total_support;
  std::vector<std::size_t> peaks;        // SD: one per path; OMP: selection order
  std::vector<CVector> component_estimates;  // SD per-path estimates, when requested
};

/// V beams around a detected peak, wrapping modulo N. Even V takes
/// {p − V/2, …, p + V/2 − 1}; odd V takes {p − (V−1)/2, …, p + (V−1)/2}.
inline SupportSet support_from_peak(std::size_t peak, std::size_t v, std::size_t n_antennas) {
  if (n_antennas == 0 || peak >= n_antennas)
    throw DomainError("support_from_peak: peak " + std::to_string(peak) + " outside 0.." +
                      std::to_string(n_antennas) + "-1");
  if (v == 0 || v > n_antennas)
    throw DomainError("support_from_peak: V = " + std::to_string(v) + " must lie in 1..N");
  const std::size_t below = v % 2 == 0 ? v / 2 : (v - 1) / 2;
  std::vector<std::size_t> idx;
  idx.reserve(v);
  for (std::size_t k = 0; k < v; ++k) idx.push_back((peak + n_antennas - below + k) % n_antennas);
  return SupportSet(std::move(idx));
}

/// argmax_n |w̄_n^H r| over columns of W̄; ties go to the smallest index.
inline std::size_t detect_peak(std::span<const cplx> residual, const CMatrix& w) {
  const CVector scores = adjoint_matvec(w, residual);
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t n = 0; n < scores.size(); ++n) {
    const double s = std::norm(scores[n]);
    if (s > best_score) {
      best_score = s;
      best = n;
    }
  }
  return best;
}

inline std::size_t detect_peak(std::span<const cplx> residual, const Combiner& w) {
  return detect_peak(residual, w.matrix());
}

namespace detail {

inline std::string describe(const std::vector<std::size_t>& support) {
  std::string s = "{";
  for (std::size_t i = 0; i < support.size(); ++i) s += (i ? "," : "") + std::to_string(support[i]);
  return s + "}";
}

// LS restricted to `support`; rethrows a singular system with the support attached.
inline CVector restricted_ls(const CMatrix& w, const std::vector<std::size_t>& support,
                             std::span<const cplx> z, CMatrix* columns_out = nullptr) {
  CMatrix columns = select_columns(w, support);
  const HouseholderQr qr(columns);
  if (qr.singular())
    throw SingularSystemError("restricted LS on support " + describe(support) +
                                  " is rank deficient (condition estimate " +
                                  std::to_string(qr.condition_estimate()) + ")",
                              support);
  CVector f = qr.solve(z);
  if (columns_out) *columns_out = std::move(columns);
  return f;
}

inline CVector scatter(const std::vector<std::size_t>& support, const CVector& values,
                       std::size_t n) {
  CVector out(n);
  for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = values[i];
  return out;
}

}  // namespace detail

/// Support-detection estimate of a beamspace channel with `n_nlos` + 1 paths,
/// keeping V beams per path.
///
/// Per path: matched-filter peak on the current residual, structured support
/// around it, LS on that support, cancel the fitted contribution. The staged
/// fits are used only to steer peak detection; the returned channel is one LS
/// over the union of supports against the original measurement.
inline EstimationResult sd_estimate(std::span<const cplx> z, const CMatrix& w, std::size_t n_nlos,
                                    std::size_t v, bool keep_components = false) {
  const std::size_t q = w.rows();
  const std::size_t n = w.cols();
  if (z.size() != q)
    throw DimensionError("sd_estimate: measurement length " + std::to_string(z.size()) +
                         " != Q = " + std::to_string(q));
  if (v == 0 || v > n || v * (n_nlos + 1) > q)
    throw DomainError("sd_estimate: need 1 <= V <= N and V*(L+1) <= Q (V = " + std::to_string(v) +
                      ", L = " + std::to_string(n_nlos) + ", Q = " + std::to_string(q) + ")");

  EstimationResult result;
  CVector residual(z.begin(), z.end());
  for (std::size_t path = 0; path <= n_nlos; ++path) {
    const std::size_t peak = detect_peak(residual, w);
    const SupportSet support = support_from_peak(peak, v, n);
    CMatrix columns;
    const CVector f = detail::restricted_ls(w, support.indices(), residual, &columns);
    const CVector fitted = matvec(columns, f);
    for (std::size_t i = 0; i < q; ++i) residual[i] -= fitted[i];

    result.peaks.push_back(peak);
    result.total_support.merge(support);
    if (keep_components) result.component_estimates.push_back(detail::scatter(support.indices(), f, n));
  }

  const auto& total = result.total_support.indices();
  result.channel = detail::scatter(total, detail::restricted_ls(w, total, z), n);
  return result;
}

inline EstimationResult sd_estimate(const Measurement& z, const Combiner& w, std::size_t n_nlos,
                                    std::size_t v, bool keep_components = false) {
  return sd_estimate(z.z, w.matrix(), n_nlos, v, keep_components);
}

/// Orthogonal matching pursuit with a fixed number of iterations. Already
/// selected columns are never re-selected.
inline EstimationResult omp_estimate(std::span<const cplx> z, const CMatrix& w, std::size_t sparsity) {
  const std::size_t q = w.rows();
  const std::size_t n = w.cols();
  if (z.size() != q)
    throw DimensionError("omp_estimate: measurement length " + std::to_string(z.size()) +
                         " != Q = " + std::to_string(q));
  if (sparsity > q || sparsity > n)
    throw DomainError("omp_estimate: sparsity " + std::to_string(sparsity) + " exceeds min(Q, N)");

  EstimationResult result;
  result.channel.assign(n, cplx{});
  std::vector<std::size_t> support;
  std::vector<bool> taken(n, false);
  CVector residual(z.begin(), z.end());
  CVector f;
  for (std::size_t it = 0; it < sparsity; ++it) {
    const CVector scores = adjoint_matvec(w, residual);
    std::size_t best = n;
    double best_score = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[c]) continue;
      const double s = std::norm(scores[c]);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    taken[best] = true;
    support.push_back(best);

    CMatrix columns;
    f = detail::restricted_ls(w, support, z, &columns);
    const CVector fitted = matvec(columns, f);
    for (std::size_t i = 0; i < q; ++i) residual[i] = z[i] - fitted[i];
  }

  result.peaks = support;
  if (!support.empty()) result.channel = detail::scatter(support, f, n);
  result.total_support = SupportSet(std::move(support));
  return result;
}

inline EstimationResult omp_estimate(const Measurement& z, const Combiner& w, std::size_t sparsity) {
  return omp_estimate(z.z, w.matrix(), sparsity);
}

/// ‖est − true‖² / ‖true‖²
inline double nmse(std::span<const cplx> truth, std::span<const cplx> estimate) {
  if (truth.size() != estimate.size())
    throw DimensionError("nmse: lengths " + std::to_string(truth.size()) + " and " +
                         std::to_string(estimate.size()));
  const double ref = squared_norm(truth);
  if (ref == 0.0) throw DomainError("nmse: true channel is zero");
  double err = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) err += std::norm(estimate[i] - truth[i]);
  return err / ref;
}

}  // namespace beamspace
