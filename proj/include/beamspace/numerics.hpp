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

// Small dense complex linear algebra: just enough for restricted least
// squares, zero-forcing and the beamspace transform.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "beamspace/errors.hpp"

namespace beamspace {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionError("CMatrix: data length " + std::to_string(data_.size()) + " != " +
                           std::to_string(rows_) + "x" + std::to_string(cols_));
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<cplx> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  CVector column(std::size_t c) const {
    CVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void set_column(std::size_t c, std::span<const cplx> values) {
    if (values.size() != rows_) throw DimensionError("CMatrix::set_column: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool operator==(const CMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Σ conj(a_n)·b_n
inline cplx hermitian_product(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size())
    throw DimensionError("hermitian_product: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  cplx acc = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) acc += std::conj(a[n]) * b[n];
  return acc;
}

inline double squared_norm(std::span<const cplx> a) noexcept {
  double acc = 0.0;
  for (const auto& v : a) acc += std::norm(v);
  return acc;
}

inline double norm(std::span<const cplx> a) noexcept { return std::sqrt(squared_norm(a)); }

inline CVector matvec(const CMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size())
    throw DimensionError("matvec: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times length " + std::to_string(x.size()));
  CVector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    cplx acc = 0.0;
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

/// A^H·x without forming A^H.
inline CVector adjoint_matvec(const CMatrix& a, std::span<const cplx> x) {
  if (a.rows() != x.size())
    throw DimensionError("adjoint_matvec: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " adjoint times length " +
                         std::to_string(x.size()));
  CVector y(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    const cplx xr = x[r];
    for (std::size_t c = 0; c < a.cols(); ++c) y[c] += std::conj(row[c]) * xr;
  }
  return y;
}

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()));
  CMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline CMatrix conj_transpose(const CMatrix& a) {
  CMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

inline CMatrix select_columns(const CMatrix& a, std::span<const std::size_t> columns) {
  CMatrix out(a.rows(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= a.cols())
      throw DimensionError("select_columns: column " + std::to_string(columns[j]) +
                           " out of range " + std::to_string(a.cols()));
    for (std::size_t r = 0; r < a.rows(); ++r) out(r, j) = a(r, columns[j]);
  }
  return out;
}

/// Largest |entry| of A·A^H − I.
inline double unitarity_defect(const CMatrix& a) {
  const CMatrix g = matmul(a, conj_transpose(a));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? cplx{1.0} : cplx{})));
  return worst;
}

/// Condition estimates above this are treated as rank deficient.
inline constexpr double kConditionLimit = 1e12;

/// Householder QR of a tall matrix (rows ≥ cols). Q is kept implicitly as the
/// sequence of reflectors.
class HouseholderQr {
 public:
  explicit HouseholderQr(const CMatrix& a) : rows_(a.rows()), cols_(a.cols()) {
    if (cols_ == 0 || rows_ < cols_)
      throw DimensionError("HouseholderQr: need rows >= cols >= 1, got " + std::to_string(rows_) +
                           "x" + std::to_string(cols_));
    // column-major working copy
    std::vector<CVector> work(cols_, CVector(rows_));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) work[c][r] = a(r, c);

    reflectors_.reserve(cols_);
    r_.assign(cols_ * cols_, cplx{});
    for (std::size_t k = 0; k < cols_; ++k) {
      CVector& x = work[k];
      double xnorm2 = 0.0;
      for (std::size_t i = k; i < rows_; ++i) xnorm2 += std::norm(x[i]);
      const double xnorm = std::sqrt(xnorm2);

      CVector v(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
      cplx alpha = 0.0;
      double vnorm2 = 0.0;
      if (xnorm > 0.0) {
        const double ax0 = std::abs(v[0]);
        const cplx phase = ax0 > 0.0 ? v[0] / ax0 : cplx{1.0};
        alpha = -phase * xnorm;
        v[0] -= alpha;
        vnorm2 = squared_norm(v);
      }
      for (std::size_t j = k; j < cols_; ++j) {
        if (vnorm2 > 0.0) apply_reflector(v, vnorm2, k, work[j]);
        r_[k * cols_ + j] = work[j][k];
      }
      reflectors_.push_back({std::move(v), vnorm2});
    }

    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cols_; ++k) {
      const double d = std::abs(r_[k * cols_ + k]);
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    condition_ = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  /// max|R_kk| / min|R_kk|; a cheap lower estimate of the 2-norm condition number.
  double condition_estimate() const noexcept { return condition_; }
  bool singular() const noexcept { return !(condition_ <= kConditionLimit); }

  /// argmin_f ‖A f − b‖₂
  CVector solve(std::span<const cplx> b) const {
    if (b.size() != rows_)
      throw DimensionError("HouseholderQr::solve: rhs length " + std::to_string(b.size()) +
                           " != " + std::to_string(rows_));
    require_regular();
    CVector y(b.begin(), b.end());
    for (std::size_t k = 0; k < cols_; ++k)
      if (reflectors_[k].norm2 > 0.0) apply_reflector(reflectors_[k].v, reflectors_[k].norm2, k, y);
    y.resize(cols_);
    back_substitute(y);
    return y;
  }

  /// (A^H A)^{-1}·rhs = R^{-1} R^{-H} rhs
  CVector solve_normal(std::span<const cplx> rhs) const {
    if (rhs.size() != cols_) throw DimensionError("HouseholderQr::solve_normal: length mismatch");
    require_regular();
    CVector y(rhs.begin(), rhs.end());
    // R^H y' = rhs (forward)
    for (std::size_t i = 0; i < cols_; ++i) {
      cplx acc = y[i];
      for (std::size_t j = 0; j < i; ++j) acc -= std::conj(r(j, i)) * y[j];
      y[i] = acc / std::conj(r(i, i));
    }
    back_substitute(y);
    return y;
  }

 private:
  struct Reflector {
    CVector v;
    double norm2;
  };

  const cplx& r(std::size_t i, std::size_t j) const noexcept { return r_[i * cols_ + j]; }

  void require_regular() const {
    if (singular())
      throw SingularSystemError("least-squares system is rank deficient (condition estimate " +
                                std::to_string(condition_) + ")");
  }

  // x[k:] ← (I − 2 v v^H / ‖v‖²) x[k:]
  static void apply_reflector(const CVector& v, double vnorm2, std::size_t k, CVector& x) {
    cplx dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * x[k + i];
    const cplx scale = 2.0 * dot / vnorm2;
    for (std::size_t i = 0; i < v.size(); ++i) x[k + i] -= scale * v[i];
  }

  void back_substitute(CVector& y) const {
    for (std::size_t i = cols_; i-- > 0;) {
      cplx acc = y[i];
      for (std::size_t j = i + 1; j < cols_; ++j) acc -= r(i, j) * y[j];
      y[i] = acc / r(i, i);
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Reflector> reflectors_;
  std::vector<cplx> r_;  // cols×cols upper triangle, row-major
  double condition_ = 0.0;
};

/// Least squares via Householder QR. Throws SingularSystemError when the
/// condition estimate exceeds kConditionLimit.
inline CVector ls_solve(const CMatrix& a, std::span<const cplx> z) {
  return HouseholderQr(a).solve(z);
}

}  // namespace beamspace
