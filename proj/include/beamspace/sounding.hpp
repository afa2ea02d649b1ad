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

// Uplink pilot sounding through the adaptive selecting network. Q = M·K
// measurements per user are collected in M blocks of K instants; in block m
// the phase-shifter network applies the K×N combiner W_m to the lens output.
//
// Pilots are taken as Ψ_m = I_K. Any unitary pilot matrix gives noise
// N_m·Ψ_m^H with the same distribution, so this is exact, not an
// approximation.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "beamspace/channel.hpp"
#include "beamspace/errors.hpp"
#include "beamspace/numerics.hpp"
#include "beamspace/random.hpp"

namespace beamspace {

/// Stacked analog combiner W̄ = [W_1; …; W_M], Q×N with ±1/√Q entries.
class Combiner {
 public:
  Combiner(CMatrix matrix, std::size_t block_size) : matrix_(std::move(matrix)), block_size_(block_size) {
    if (block_size_ == 0 || matrix_.rows() % block_size_ != 0)
      throw DimensionError("Combiner: Q = " + std::to_string(matrix_.rows()) +
                           " is not a multiple of the block size " + std::to_string(block_size_));
    // FNV-1a over the sign pattern identifies the draw.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& w : matrix_.data()) {
      h ^= w.real() > 0.0 ? 1u : 0u;
      h *= 0x100000001b3ULL;
    }
    id_ = h;
  }

  const CMatrix& matrix() const noexcept { return matrix_; }
  std::size_t measurements() const noexcept { return matrix_.rows(); }
  std::size_t n_antennas() const noexcept { return matrix_.cols(); }
  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t blocks() const noexcept { return matrix_.rows() / block_size_; }
  std::uint64_t id() const noexcept { return id_; }

 private:
  CMatrix matrix_;
  std::size_t block_size_;
  std::uint64_t id_ = 0;
};

struct SoundingConfig {
  std::size_t n_antennas = 256;
  std::size_t users = 16;   // K, instants per block
  std::size_t blocks = 6;   // M
  double uplink_noise_power = 0.1;
  std::uint64_t seed = 0;

  std::size_t measurements() const noexcept { return blocks * users; }
};

struct Measurement {
  CVector z;                 // z̄_k, length Q
  std::uint64_t combiner_id; // Combiner::id() of the W̄ that produced it
};

/// Bernoulli combiner: i.i.d. equiprobable entries in (1/√Q)·{−1, +1}.
/// `block_size` is K; the default treats all Q rows as a single block.
inline Combiner make_combiner(Rng& rng, std::size_t n_antennas, std::size_t measurements,
                              std::size_t block_size = 0) {
  if (n_antennas == 0 || measurements == 0)
    throw DimensionError("make_combiner: N and Q must be positive");
  if (block_size == 0) block_size = measurements;
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(measurements));
  std::bernoulli_distribution coin(0.5);
  CMatrix w(measurements, n_antennas);
  for (std::size_t q = 0; q < measurements; ++q)
    for (std::size_t n = 0; n < n_antennas; ++n) w(q, n) = coin(rng) ? amplitude : -amplitude;
  return Combiner(std::move(w), block_size);
}

inline Combiner make_combiner(const SoundingConfig& cfg) {
  Rng rng(cfg.seed);
  return make_combiner(rng, cfg.n_antennas, cfg.measurements(), cfg.users);
}

/// max_{i≠j} |w̄_i^H w̄_j| over columns of W̄.
inline double mutual_coherence(const Combiner& w) {
  const CMatrix& m = w.matrix();
  const CMatrix gram = matmul(conj_transpose(m), m);
  double worst = 0.0;
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = i + 1; j < gram.cols(); ++j) worst = std::max(worst, std::abs(gram(i, j)));
  return worst;
}

/// Per-entry power of the combined noise W_m·n: σ_UL²·‖row‖² = σ_UL²·N/Q.
inline double effective_noise_power(const Combiner& w, double uplink_noise_power) {
  return uplink_noise_power * static_cast<double>(w.n_antennas()) /
         static_cast<double>(w.measurements());
}

/// σ_UL² for a per-antenna received pilot SNR in dB, with unit-power pilots.
inline double snr_to_noise_power(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

/// z̄ = W̄·h̃ + n̄, where block m's noise is W_m applied to a fresh CN(0, σ_UL²·I_N)
/// vector, giving covariance σ_UL²·W_m W_m^H per block.
inline Measurement simulate_measurement(const BeamspaceChannel& h, const Combiner& w,
                                        double uplink_noise_power, Rng& rng) {
  if (h.vector.size() != w.n_antennas())
    throw DimensionError("simulate_measurement: channel length " + std::to_string(h.vector.size()) +
                         " != combiner width " + std::to_string(w.n_antennas()));
  if (uplink_noise_power < 0.0) throw DomainError("simulate_measurement: negative noise power");

  const std::size_t n = w.n_antennas();
  const CMatrix& wm = w.matrix();
  Measurement out{CVector(w.measurements()), w.id()};
  CVector received(n);
  for (std::size_t block = 0; block < w.blocks(); ++block) {
    for (std::size_t a = 0; a < n; ++a) {
      received[a] = h.vector[a];
      if (uplink_noise_power > 0.0) received[a] += complex_gaussian(rng, uplink_noise_power);
    }
    for (std::size_t r = block * w.block_size(); r < (block + 1) * w.block_size(); ++r) {
      const auto row = wm.row(r);
      cplx acc = 0.0;
      for (std::size_t a = 0; a < n; ++a) acc += row[a] * received[a];
      out.z[r] = acc;
    }
  }
  return out;
}

}  // namespace beamspace
