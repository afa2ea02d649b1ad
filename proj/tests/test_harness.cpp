// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The beamspace-sd authors

#include <catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beamspace/harness.hpp"

using namespace beamspace;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_antennas = 64;
  cfg.users = 4;
  cfg.rf_chains = 4;
  cfg.blocks = 6;
  cfg.measurements = 24;
  cfg.v = 4;
  cfg.omp_sparsity = 12;
  cfg.snr_grid_db = {0.0, 10.0};
  cfg.trials = 6;
  cfg.master_seed = 7;
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("mean_ci95", "[harness]") {
  const MeanCi m = mean_ci95({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  // sample sd of 1..4 is sqrt(5/3)
  CHECK_THAT(m.ci95, WithinAbs(1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15));
  CHECK(mean_ci95({}).mean == 0.0);
  CHECK(mean_ci95({3.0}).ci95 == 0.0);
  CHECK_THAT(to_db(0.1), WithinAbs(-10.0, 1e-12));
}

TEST_CASE("parallel_for visits every index once and rethrows", "[harness]") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, 3, [](std::size_t i) {
                    if (i == 17) throw DomainError("boom");
                  }),
                  DomainError);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("config defaults and parsing", "[harness][config]") {
  const ExperimentConfig d;
  CHECK(d.n_antennas == 256);
  CHECK(d.users == 16);
  CHECK(d.rf_chains == 16);
  CHECK(d.n_nlos == 2);
  CHECK(d.measurements == 96);
  CHECK(d.v == 8);
  CHECK(d.omp_sparsity == 24);
  CHECK_NOTHROW(d.validate());

  const auto cfg = parse_config("# test\nN = 128\nK=8\nM = 4  # blocks\nV = 6\nsnr_grid_db = 0, 7.5\n");
  CHECK(cfg.n_antennas == 128);
  CHECK(cfg.rf_chains == 8);
  CHECK(cfg.measurements == 32);
  CHECK(cfg.omp_sparsity == 18);
  CHECK(cfg.snr_grid_db == std::vector<double>{0.0, 7.5});

  CHECK(parse_config(to_config_text(cfg)) == cfg);
  CHECK(parse_config("") == ExperimentConfig{});
}

TEST_CASE("config errors name the field", "[harness][config]") {
  const auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of("NN = 3") == "NN");
  CHECK(field_of("N = 3\nN = 4") == "N");
  CHECK(field_of("trials = x") == "trials");
  CHECK(field_of("trials = 0") == "trials");
  CHECK(field_of("Q = 95") == "Q");
  CHECK(field_of("N_RF = 8") == "N_RF");
  CHECK(field_of("V = 40") == "V");
  CHECK(field_of("omp_sparsity = 97") == "omp_sparsity");
  CHECK(field_of("los_var = -1") == "los_var");
  CHECK(field_of("snr_grid_db = 1,,2") == "snr_grid_db");
  CHECK(field_of("downlink.rho = 0") == "downlink.rho");
  CHECK(field_of("just text") == "line 1");
  CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg.txt"), IoError);
}

TEST_CASE("nmse sweep shape and determinism", "[harness]") {
  const auto cfg = small_config();
  const SweepResult a = run_nmse_sweep(cfg, {1});
  const SweepResult b = run_nmse_sweep(cfg, {3});
  CHECK(a == b);
  CHECK(to_csv(a) == to_csv(b));
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows[0].estimator == "sd");
  CHECK(a.rows[1].estimator == "omp");
  CHECK(a.rows[2].snr_db == 10.0);
  for (const auto& r : a.rows) {
    CHECK(r.trials == 6);
    CHECK_FALSE(r.mean_sum_rate.has_value());
    CHECK(r.mean_nmse > 0.0);
  }
  CHECK(count_lines(to_csv(a)) == 1 + cfg.snr_grid_db.size() * 2);

  auto other = cfg;
  other.master_seed = 8;
  CHECK_FALSE(run_nmse_sweep(other) == a);
}

TEST_CASE("trial streams do not depend on the SNR grid", "[harness]") {
  auto cfg = small_config();
  const auto both = run_nmse_sweep_detailed(cfg);
  cfg.snr_grid_db = {0.0};
  const auto first = run_nmse_sweep_detailed(cfg);
  CHECK(both.samples[0].nmse == first.samples[0].nmse);
}

TEST_CASE("sum-rate sweep orderings per trial", "[harness]") {
  auto cfg = small_config();
  cfg.trials = 10;
  const SweepRun run = run_sumrate_sweep_detailed(cfg, {2});
  REQUIRE(run.summary.rows.size() == 8);
  const auto& perfect = run.samples[2];
  const auto& full = run.samples[3];
  CHECK(run.summary.rows[2].estimator == "perfect_csi");
  CHECK(run.summary.rows[3].estimator == "full_digital_zf");
  for (std::size_t t = 0; t < perfect.sum_rate.size(); ++t) CHECK(perfect.sum_rate[t] <= full.sum_rate[t] + 1e-9);
  for (const auto& r : run.summary.rows) CHECK(r.mean_sum_rate.has_value());
}

TEST_CASE("SD error floor at high SNR is set by discarded leakage", "[harness][montecarlo]") {
  ExperimentConfig cfg;
  cfg.trials = 20;
  cfg.snr_grid_db = {60.0};
  const BeamspaceTransform u(cfg.n_antennas);
  double nmse_sum = 0.0, discarded_sum = 0.0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const TrialDraw draw = draw_trial(cfg, u, t);
    const ChannelEstimates est = estimate_users(cfg, draw, t, 0);
    // Power of the true channel outside the estimated support is a hard lower
    // bound on the error, since the estimate is zero there.
    double outside = 0.0;
    for (std::size_t i = 0; i < draw.channels.data().size(); ++i)
      if (est.sd.data()[i] == cplx{}) outside += std::norm(draw.channels.data()[i]);
    const double discarded = outside / squared_norm(draw.channels.data());
    const double e = matrix_nmse(draw.channels, est.sd);
    CHECK(e >= discarded * (1.0 - 1e-9));
    nmse_sum += e;
    discarded_sum += discarded;
  }
  const double mean_nmse = nmse_sum / cfg.trials;
  const double mean_discarded = discarded_sum / cfg.trials;
  CHECK(mean_nmse < 0.06);
  CHECK(mean_nmse <= 2.0 * mean_discarded);
}

TEST_CASE("bound table", "[harness]") {
  const auto rows = run_bound_table({256}, {2, 4, 8});
  REQUIRE(rows.size() == 3);
  CHECK_THAT(rows[0].lower_bound, WithinAbs(0.8106, 5e-4));
  CHECK_THAT(rows[2].lower_bound, WithinAbs(0.9496, 5e-4));
  for (const auto& r : rows) CHECK_THAT(r.worst_case_ratio, WithinAbs(r.lower_bound, 1e-9));
  CHECK(rows[0].lower_bound < rows[1].lower_bound);
  CHECK(rows[1].lower_bound < rows[2].lower_bound);
  CHECK(bound_table_csv(rows).rfind("N,V,power_ratio_lower_bound,worst_case_component_ratio\n", 0) == 0);
  CHECK(nlohmann::json::parse(bound_table_json(rows)).size() == 3);
  CHECK_THROWS_AS(run_bound_table({256}, {3}), DomainError);
}

TEST_CASE("CSV and JSON emission", "[harness][io]") {
  SweepResult r{small_config(), {}};
  CHECK(to_csv(r) == std::string(kSweepCsvHeader) + "\n");

  r.rows.push_back({0.0, "sd", 0.125, 0.01, std::nullopt, 6});
  r.rows.push_back({10.0, "perfect_csi", 0.0, 0.0, 31.25, 6});
  r.rows.push_back({-2.5, "omp", 1.0 / 3.0, 0.1, 0.1 + 0.2, 6});
  CHECK(to_csv(r) ==
        "snr_db,estimator,mean_nmse,nmse_ci95,mean_sum_rate,trials\n"
        "0,sd,0.125,0.01,,6\n"
        "10,perfect_csi,0,0,31.25,6\n"
        "-2.5,omp,0.3333333333333333,0.1,0.30000000000000004,6\n");

  CHECK(sweep_from_json(to_json(r)) == r);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("rows").at(0).at("mean_sum_rate").is_null());
  CHECK(j.at("config").at("master_seed") == 7);

  const auto dir = std::filesystem::temp_directory_path() / "beamspace_emit_test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "out.csv").string();
  emit(r, OutputFormat::csv, csv);
  CHECK(read_file(csv) == to_csv(r));
  CHECK(parse_config(read_file(config_sidecar_path(csv))) == r.config);
  const auto json = (dir / "out.json").string();
  emit(r, format_for_path(json), json);
  CHECK(sweep_from_json(read_file(json)) == r);
  std::filesystem::remove_all(dir);

  CHECK(format_for_path("a.json") == OutputFormat::json);
  CHECK(format_for_path("a.csv") == OutputFormat::csv);
  CHECK(format_for_path("noext") == OutputFormat::csv);

  try {
    emit(r, OutputFormat::csv, "/nonexistent/dir/out.csv");
    FAIL("expected an I/O error");
  } catch (const IoError& e) {
    CHECK(e.path() == "/nonexistent/dir/out.csv");
  }
}

TEST_CASE("noiseless SD sum-rate is close to perfect CSI", "[harness][montecarlo]") {
  ExperimentConfig cfg;
  cfg.trials = 20;
  cfg.snr_grid_db = {300.0};
  const SweepResult r = run_sumrate_sweep(cfg, {0});
  const double sd = *r.rows[0].mean_sum_rate;
  const double perfect = *r.rows[2].mean_sum_rate;
  CHECK(sd >= 0.98 * perfect);
}
