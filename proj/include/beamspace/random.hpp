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

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace beamspace {

using Rng = std::mt19937_64;

/// Independent purposes that draw randomness within one Monte Carlo trial.
/// Each gets its own stream so adding a consumer never shifts another's draws.
enum class StreamTag : std::uint64_t {
  channel = 1,
  combiner = 2,
  uplink_noise = 3,
  synthetic = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream(master, trial, tag, sub).
inline constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial, StreamTag tag,
                                           std::uint64_t sub = 0) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return splitmix64(h ^ sub);
}

inline Rng make_stream(std::uint64_t master, std::uint64_t trial, StreamTag tag,
                       std::uint64_t sub = 0) {
  return Rng(stream_seed(master, trial, tag, sub));
}

/// Draw from CN(0, variance): real and imaginary parts i.i.d. N(0, variance/2).
inline std::complex<double> complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> part(0.0, std::sqrt(variance / 2.0));
  const double re = part(rng);
  const double im = part(rng);
  return {re, im};
}

}  // namespace beamspace
