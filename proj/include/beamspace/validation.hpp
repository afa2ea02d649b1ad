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

// Invariant checks run by `beamspace_sim validate`, and the structured sparse
// channel synthesizer they share with the test suites.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "beamspace/channel.hpp"
#include "beamspace/config.hpp"
#include "beamspace/downlink.hpp"
#include "beamspace/estimation.hpp"
#include "beamspace/harness.hpp"
#include "beamspace/numerics.hpp"
#include "beamspace/random.hpp"
#include "beamspace/sounding.hpp"

namespace beamspace {

struct StructuredSparseOptions {
  /// Gains CN(0, var) when true; otherwise fixed magnitude √var with uniform phase.
  bool rayleigh_gains = false;
  /// Each path sits δ·(1/N) below its peak beam, δ uniform on [0, max_offset_beams].
  double max_offset_beams = 0.25;
  /// Peaks at least V beams apart (cyclically), so path supports are disjoint.
  bool disjoint_supports = true;
  double los_variance = 1.0;
  double nlos_variance = 0.01;
};

struct StructuredSparseChannel {
  CVector vector;                    // exactly V·(L+1)-sparse (fewer if supports overlap)
  std::vector<std::size_t> peaks;    // strongest beam of each path
  SupportSet support;
};

/// Beamspace channel whose paths are off-grid Dirichlet patterns truncated to
/// the V-beam window that support detection would assign to their peak.
inline StructuredSparseChannel synthesize_structured_channel(Rng& rng, std::size_t n_antennas,
                                                             std::size_t n_nlos, std::size_t v,
                                                             const StructuredSparseOptions& opt = {}) {
  const std::size_t paths = n_nlos + 1;
  std::uniform_int_distribution<std::size_t> beam(0, n_antennas - 1);
  std::uniform_real_distribution<double> offset(0.0, opt.max_offset_beams);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  StructuredSparseChannel out{CVector(n_antennas), {}, {}};
  while (out.peaks.size() < paths) {
    const std::size_t p = beam(rng);
    bool ok = true;
    for (auto q : out.peaks) {
      const std::size_t d = p > q ? p - q : q - p;
      const std::size_t cyclic = std::min(d, n_antennas - d);
      if (cyclic == 0 || (opt.disjoint_supports && cyclic < v)) ok = false;
    }
    if (ok) out.peaks.push_back(p);
  }

  const double scale = std::sqrt(static_cast<double>(n_antennas) / static_cast<double>(paths));
  for (std::size_t i = 0; i < paths; ++i) {
    const double var = i == 0 ? opt.los_variance : opt.nlos_variance;
    const cplx gain = opt.rayleigh_gains ? complex_gaussian(rng, var)
                                         : std::polar(std::sqrt(var), phase(rng));
    const std::size_t p = out.peaks[i];
    const double direction =
        grid_direction(p, n_antennas) - offset(rng) / static_cast<double>(n_antennas);
    const SupportSet s = support_from_peak(p, v, n_antennas);
    for (auto n : s)
      out.vector[n] += scale * gain * dirichlet_kernel(grid_direction(n, n_antennas) - direction, n_antennas);
    out.support.merge(s);
  }
  return out;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 100;
};

inline CheckResult check_bound_anchor() {
  const double b = power_ratio_lower_bound(256, 8);
  return {"bound_anchor", b >= 0.94 && b <= 0.96, "P_V/P_T bound (N=256, V=8) = " + format_double(b)};
}

inline CheckResult check_worst_case_equality() {
  double worst = 0.0;
  for (std::size_t n : {64, 256})
    for (std::size_t v : {2, 4, 8})
      worst = std::max(worst, std::abs(worst_case_component_ratio(n, v) - power_ratio_lower_bound(n, v)));
  return {"worst_case_equality", worst <= 1e-9, "max |ratio - bound| = " + format_double(worst)};
}

inline CheckResult check_unitarity(const ValidationOptions& opt) {
  const BeamspaceTransform u(256);
  const double defect = unitarity_defect(u.matrix());
  Rng rng = make_stream(opt.seed, 0, StreamTag::synthetic, 1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    CVector x(256);
    for (auto& v : x) v = complex_gaussian(rng, 1.0);
    worst = std::max(worst, std::abs(norm(u.apply(x)) / norm(x) - 1.0));
  }
  return {"unitarity_parseval", defect <= 1e-10 && worst <= 1e-10,
          "max|UU^H - I| = " + format_double(defect) + ", max| |Ux|/|x| - 1 | = " + format_double(worst)};
}

inline CheckResult check_cross_correlation(const ValidationOptions& opt) {
  std::size_t violations = 0, pairs = 0;
  for (std::size_t n : {32, 64, 128, 256}) {
    const BeamspaceTransform u(n);
    Rng rng = make_stream(opt.seed, n, StreamTag::synthetic, 2);
    std::uniform_real_distribution<double> dir(-0.5, 0.5);
    for (std::size_t t = 0; t < opt.trials; ++t) {
      const PathComponent a{complex_gaussian(rng, 1.0), dir(rng)};
      const PathComponent b{complex_gaussian(rng, 1.0), dir(rng)};
      const SpatialChannel h = assemble_channel(n, {a, b});
      const auto beams = to_beamspace(h, u, true);
      const double measured =
          std::abs(hermitian_product(beams.component_vectors[0], beams.component_vectors[1]));
      if (measured > cross_correlation_bound(a, b, n) * (1.0 + 1e-9)) ++violations;
      ++pairs;
    }
  }
  return {"cross_correlation_bound", violations == 0,
          std::to_string(violations) + " violations in " + std::to_string(pairs) + " pairs"};
}

inline CheckResult check_exact_recovery(const ValidationOptions& opt) {
  const std::size_t n = 256, q = 96, l = 2, v = 8;
  std::size_t exact = 0, guard = 0;
  for (std::size_t t = 0; t < opt.trials; ++t) {
    Rng rng = make_stream(opt.seed, t, StreamTag::synthetic, 3);
    const Combiner w = make_combiner(rng, n, q, 16);
    const auto h = synthesize_structured_channel(rng, n, l, v);
    try {
      const auto est = sd_estimate(matvec(w.matrix(), h.vector), w.matrix(), l, v);
      if (nmse(h.vector, est.channel) <= 1e-10) ++exact;
    } catch (const SingularSystemError&) {
      ++guard;
    }
  }
  const bool ok = exact * 100 >= 99 * opt.trials && exact + guard == opt.trials;
  return {"sd_exact_recovery", ok,
          std::to_string(exact) + "/" + std::to_string(opt.trials) + " exact, " +
              std::to_string(guard) + " condition-guard failures"};
}

inline CheckResult check_zf_property(const ValidationOptions& opt) {
  const std::size_t k = 16;
  const double rho = 16.0;
  double worst_offdiag = 0.0, worst_power = 0.0;
  const BeamspaceTransform u(256);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    ExperimentConfig cfg;
    cfg.master_seed = opt.seed;
    const TrialDraw draw = draw_trial(cfg, u, t);
    const BeamSelection sel = select_beams(draw.channels);
    const Precoder p = zf_precoder(reduced_channel(draw.channels, sel), rho);
    const CMatrix g = effective_channel(draw.channels, sel, p);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (i != j) worst_offdiag = std::max(worst_offdiag, std::abs(g(i, j)) / std::abs(g(i, i)));
    worst_power = std::max(worst_power, std::abs(squared_norm(p.matrix.data()) - rho));
  }
  return {"zf_zero_interference", worst_offdiag <= 1e-9 && worst_power <= 1e-9,
          "max off-diagonal ratio " + format_double(worst_offdiag) + ", max |tr(PP^H) - rho| " +
              format_double(worst_power)};
}

inline CheckResult check_sweep_determinism(const ValidationOptions& opt) {
  ExperimentConfig cfg;
  cfg.trials = 2;
  cfg.snr_grid_db = {10.0};
  cfg.master_seed = opt.seed;
  const std::string a = to_csv(run_nmse_sweep(cfg, {1}));
  const std::string b = to_csv(run_nmse_sweep(cfg, {4}));
  return {"sweep_determinism", a == b, a == b ? "identical output" : "outputs differ"};
}

inline std::vector<CheckResult> run_validation(const ValidationOptions& opt) {
  return {check_bound_anchor(),          check_worst_case_equality(), check_unitarity(opt),
          check_cross_correlation(opt),  check_exact_recovery(opt),   check_zf_property(opt),
          check_sweep_determinism(opt)};
}

}  // namespace beamspace
