// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The beamspace-sd authors

#include <catch_amalgamated.hpp>

#include <set>

#include "beamspace/channel.hpp"
#include "beamspace/downlink.hpp"
#include "beamspace/harness.hpp"

using namespace beamspace;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CMatrix random_square(Rng& rng, std::size_t k) {
  CMatrix a(k, k);
  for (auto& v : a.data()) v = complex_gaussian(rng, 1.0);
  return a;
}

double trace_power(const CMatrix& p) { return squared_norm(p.data()); }

}  // namespace

TEST_CASE("select_beams without conflict", "[downlink]") {
  CMatrix h(16, 2);
  h(5, 0) = 1.0;
  h(6, 0) = 0.2;
  h(9, 1) = 0.8;
  h(3, 1) = 0.1;
  CHECK(select_beams(h).beam_of_user == std::vector<std::size_t>{5, 9});
}

TEST_CASE("select_beams resolves a conflict in favour of the stronger user", "[downlink]") {
  CMatrix h(16, 2);
  h(5, 0) = 1.0;
  h(5, 1) = 0.9;
  h(7, 1) = 0.5;
  h(2, 1) = 0.1;
  CHECK(select_beams(h).beam_of_user == std::vector<std::size_t>{5, 7});

  // Same conflict with the users swapped: ordering follows magnitude, not index.
  CMatrix g(16, 2);
  g(5, 1) = 1.0;
  g(5, 0) = 0.9;
  g(7, 0) = 0.5;
  CHECK(select_beams(g).beam_of_user == std::vector<std::size_t>{7, 5});
}

TEST_CASE("select_beams on orthogonal on-grid users returns their beams", "[downlink]") {
  const BeamspaceTransform u(64);
  const std::vector<std::size_t> beams{3, 40, 17, 63};
  CMatrix h(64, beams.size());
  for (std::size_t k = 0; k < beams.size(); ++k) {
    const auto spatial = assemble_channel(64, {{1.0, grid_direction(beams[k], 64), true}});
    h.set_column(k, to_beamspace(spatial, u).vector);
  }
  CHECK(select_beams(h).beam_of_user == beams);
}

TEST_CASE("select_beams assignment is injective", "[downlink][property]") {
  Rng rng(13);
  const BeamspaceTransform u(64);
  for (int t = 0; t < 50; ++t) {
    CMatrix h(64, 16);
    for (std::size_t k = 0; k < 16; ++k) h.set_column(k, to_beamspace(sample_channel(rng, {64, 2, 1.0, 0.01}), u).vector);
    const auto sel = select_beams(h);
    CHECK(std::set<std::size_t>(sel.beam_of_user.begin(), sel.beam_of_user.end()).size() == 16);
    const CMatrix b = sel.selecting_matrix(64);
    for (std::size_t k = 0; k < 16; ++k) CHECK(squared_norm(b.column(k)) == 1.0);
  }
  CHECK_THROWS_AS(select_beams(CMatrix(3, 4)), DimensionError);
}

TEST_CASE("reduced_channel picks selected rows", "[downlink]") {
  CMatrix h(4, 2, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0});
  const BeamSelection sel{{2, 0}};
  CHECK(reduced_channel(h, sel) == CMatrix(2, 2, {5.0, 6.0, 1.0, 2.0}));
  CHECK_THROWS_AS(reduced_channel(h, BeamSelection{{4, 0}}), DimensionError);
}

TEST_CASE("zf_precoder", "[downlink]") {
  SECTION("identity channel") {
    const Precoder p = zf_precoder(CMatrix::identity(16), 16.0);
    CHECK(unitarity_defect(p.matrix) < 1e-14);
    CHECK_THAT(p.scale, WithinAbs(1.0, 1e-14));
  }
  SECTION("random channels give scaled identity and exact power") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
      const CMatrix h = random_square(rng, 8);
      const Precoder p = zf_precoder(h, 8.0);
      const CMatrix g = matmul(conj_transpose(h), p.matrix);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
          const cplx expected = i == j ? cplx{p.scale} : cplx{};
          CHECK(std::abs(g(i, j) - expected) <= 1e-9 * p.scale);
        }
      CHECK_THAT(trace_power(p.matrix), WithinAbs(8.0, 1e-9));
    }
  }
  SECTION("closed-form scale") {
    Rng rng(6);
    const CMatrix h = random_square(rng, 4);
    // Independent inverse via Gauss-Jordan on H^H H.
    CMatrix a = matmul(conj_transpose(h), h);
    CMatrix inv = CMatrix::identity(4);
    for (std::size_t c = 0; c < 4; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < 4; ++r)
        if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
      for (std::size_t k = 0; k < 4; ++k) {
        std::swap(a(c, k), a(piv, k));
        std::swap(inv(c, k), inv(piv, k));
      }
      const cplx d = a(c, c);
      for (std::size_t k = 0; k < 4; ++k) {
        a(c, k) /= d;
        inv(c, k) /= d;
      }
      for (std::size_t r = 0; r < 4; ++r) {
        if (r == c) continue;
        const cplx f = a(r, c);
        for (std::size_t k = 0; k < 4; ++k) {
          a(r, k) -= f * a(c, k);
          inv(r, k) -= f * inv(c, k);
        }
      }
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < 4; ++i) tr += inv(i, i).real();
    const double rho = 4.0;
    CHECK_THAT(zf_precoder(h, rho).scale, WithinRel(std::sqrt(rho / tr), 1e-10));

    CMatrix h2 = h;
    for (auto& v : h2.data()) v *= 2.0;
    CHECK_THAT(zf_precoder(h2, rho).scale, WithinRel(2.0 * std::sqrt(rho / tr), 1e-10));
  }
  SECTION("singular channel") {
    CMatrix h = CMatrix::identity(3);
    h(2, 2) = 0.0;
    CHECK_THROWS_AS(zf_precoder(h, 3.0), SingularSystemError);
  }
}

TEST_CASE("sum_rate", "[downlink]") {
  const CMatrix id = CMatrix::identity(16);
  CMatrix truth(32, 16);
  for (std::size_t k = 0; k < 16; ++k) truth(2 * k, k) = 1.0;
  const BeamSelection sel = select_beams(truth);
  const Precoder p = zf_precoder(reduced_channel(truth, sel), 16.0);
  CHECK_THAT(sum_rate(truth, sel, p, 1.0), WithinAbs(16.0, 1e-12));
  CHECK_THAT(sum_rate_effective(id, 1.0), WithinAbs(16.0, 1e-12));
}

TEST_CASE("perfect-CSI beam-selected ZF has no interference", "[downlink][property]") {
  ExperimentConfig cfg;
  const BeamspaceTransform u(256);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const TrialDraw draw = draw_trial(cfg, u, t);
    const BeamSelection sel = select_beams(draw.channels);
    const Precoder p = zf_precoder(reduced_channel(draw.channels, sel), 16.0);
    const CMatrix g = effective_channel(draw.channels, sel, p);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j)
        if (i != j) CHECK(std::abs(g(i, j)) <= 1e-9 * std::abs(g(i, i)));
    CHECK_THAT(trace_power(p.matrix), WithinAbs(16.0, 1e-9));

    const double full = full_digital_zf_sum_rate(draw.channels, 16.0, 0.1);
    CHECK(sum_rate(draw.channels, sel, p, 0.1) <= full + 1e-9);
  }
}

TEST_CASE("full_digital_zf_sum_rate", "[downlink]") {
  SECTION("single user is matched filtering") {
    Rng rng(3);
    CMatrix h(32, 1);
    for (auto& v : h.data()) v = complex_gaussian(rng, 1.0);
    const double expected = std::log2(1.0 + 16.0 * squared_norm(h.data()) / 0.1);
    CHECK_THAT(full_digital_zf_sum_rate(h, 16.0, 0.1), WithinRel(expected, 1e-12));
  }
  SECTION("orthogonal columns decouple") {
    CMatrix h(8, 2);
    h(0, 0) = 2.0;
    h(3, 1) = 1.0;
    // Power split of ZF: p_k proportional to 1/|h_k|^2, total rho.
    const double rho = 2.0, s2 = 0.5;
    const double c2 = rho / (1.0 / 4.0 + 1.0);
    const double expected = 2.0 * std::log2(1.0 + c2 / s2);
    CHECK_THAT(full_digital_zf_sum_rate(h, rho, s2), WithinRel(expected, 1e-12));
  }
  SECTION("rank deficient") {
    CMatrix h(8, 2);
    h(0, 0) = 1.0;
    h(0, 1) = 2.0;
    CHECK_THROWS_AS(full_digital_zf_sum_rate(h, 1.0, 1.0), SingularSystemError);
  }
}
