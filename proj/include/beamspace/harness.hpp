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

// Seeded Monte Carlo sweeps and result emission.
//
// Every random draw comes from stream(master_seed, trial, tag[, snr index]),
// so results do not depend on thread count or on which estimators run.
// Channels and the combiner depend only on the trial; uplink noise also on
// the SNR point, so the SNR curves share channel realizations.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "beamspace/channel.hpp"
#include "beamspace/config.hpp"
#include "beamspace/downlink.hpp"
#include "beamspace/errors.hpp"
#include "beamspace/estimation.hpp"
#include "beamspace/numerics.hpp"
#include "beamspace/random.hpp"
#include "beamspace/sounding.hpp"

namespace beamspace {

inline constexpr const char* kEstimatorSd = "sd";
inline constexpr const char* kEstimatorOmp = "omp";
inline constexpr const char* kEstimatorPerfect = "perfect_csi";
inline constexpr const char* kEstimatorFullDigital = "full_digital_zf";

struct SweepRow {
  double snr_db = 0.0;
  std::string estimator;
  double mean_nmse = 0.0;
  double nmse_ci95 = 0.0;
  std::optional<double> mean_sum_rate;  // absent for NMSE-only sweeps
  std::size_t trials = 0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult&) const = default;
};

/// Per-trial values behind one SweepRow.
struct RowSamples {
  std::vector<double> nmse;
  std::vector<double> sum_rate;
};

struct SweepRun {
  SweepResult summary;
  std::vector<RowSamples> samples;  // aligned with summary.rows
};

struct RunOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
};

/// Mean and normal-approximation 95% half-width 1.96·s/√n.
inline MeanCi mean_ci95(const std::vector<double>& x) {
  MeanCi out;
  if (x.empty()) return out;
  double sum = 0.0;
  for (double v : x) sum += v;
  out.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    out.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(x.size()));
  }
  return out;
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

/// Runs fn(0..count-1) on a small thread pool. Exceptions are rethrown
/// (lowest failing worker first) after all workers finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = count;
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Channels (N×K beamspace, one column per user) and combiner of one trial.
struct TrialDraw {
  CMatrix channels;
  Combiner combiner;
};

inline TrialDraw draw_trial(const ExperimentConfig& cfg, const BeamspaceTransform& u,
                            std::uint64_t trial) {
  Rng channel_rng = make_stream(cfg.master_seed, trial, StreamTag::channel);
  const ChannelParams params{cfg.n_antennas, cfg.n_nlos, cfg.los_variance, cfg.nlos_variance};
  CMatrix channels(cfg.n_antennas, cfg.users);
  for (std::size_t k = 0; k < cfg.users; ++k)
    channels.set_column(k, to_beamspace(sample_channel(channel_rng, params), u).vector);

  Rng combiner_rng = make_stream(cfg.master_seed, trial, StreamTag::combiner);
  return {std::move(channels),
          make_combiner(combiner_rng, cfg.n_antennas, cfg.measurements, cfg.users)};
}

struct ChannelEstimates {
  CMatrix sd;
  CMatrix omp;
};

/// SD and OMP estimates for every user from one shared set of noisy measurements.
inline ChannelEstimates estimate_users(const ExperimentConfig& cfg, const TrialDraw& draw,
                                       std::uint64_t trial, std::size_t snr_index) {
  Rng noise_rng = make_stream(cfg.master_seed, trial, StreamTag::uplink_noise, snr_index);
  const double noise = snr_to_noise_power(cfg.snr_grid_db.at(snr_index));
  ChannelEstimates est{CMatrix(cfg.n_antennas, cfg.users), CMatrix(cfg.n_antennas, cfg.users)};
  for (std::size_t k = 0; k < cfg.users; ++k) {
    const BeamspaceChannel h{draw.channels.column(k), {}};
    const Measurement z = simulate_measurement(h, draw.combiner, noise, noise_rng);
    est.sd.set_column(k, sd_estimate(z, draw.combiner, cfg.n_nlos, cfg.v).channel);
    est.omp.set_column(k, omp_estimate(z, draw.combiner, cfg.omp_sparsity).channel);
  }
  return est;
}

/// ‖Ĥ − H‖_F² / ‖H‖_F² over all users of a trial.
inline double matrix_nmse(const CMatrix& truth, const CMatrix& estimate) {
  return nmse(truth.data(), estimate.data());
}

/// Beam selection from `estimate`, ZF from the estimated reduced channel,
/// rate on the true channel.
inline double beam_selected_rate(const CMatrix& truth, const CMatrix& estimate,
                                 const DownlinkConfig& dl) {
  const BeamSelection sel = select_beams(estimate);
  const Precoder p = zf_precoder(reduced_channel(estimate, sel), dl.power_budget);
  return sum_rate(truth, sel, p, dl.noise_power);
}

namespace detail {

struct TrialRecord {
  std::vector<double> nmse_sd, nmse_omp;  // per SNR
  std::vector<double> rate_sd, rate_omp;  // per SNR, sum-rate sweeps only
  double rate_perfect = 0.0;
  double rate_full = 0.0;
};

inline std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, bool with_rates,
                                           const RunOptions& opts) {
  cfg.validate();
  const BeamspaceTransform u(cfg.n_antennas);
  std::vector<TrialRecord> records(cfg.trials);
  parallel_for(cfg.trials, opts.threads, [&](std::size_t trial) {
    const TrialDraw draw = draw_trial(cfg, u, trial);
    TrialRecord& rec = records[trial];
    for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
      const ChannelEstimates est = estimate_users(cfg, draw, trial, s);
      rec.nmse_sd.push_back(matrix_nmse(draw.channels, est.sd));
      rec.nmse_omp.push_back(matrix_nmse(draw.channels, est.omp));
      if (with_rates) {
        rec.rate_sd.push_back(beam_selected_rate(draw.channels, est.sd, cfg.downlink));
        rec.rate_omp.push_back(beam_selected_rate(draw.channels, est.omp, cfg.downlink));
      }
    }
    if (with_rates) {
      rec.rate_perfect = beam_selected_rate(draw.channels, draw.channels, cfg.downlink);
      rec.rate_full = full_digital_zf_sum_rate(draw.channels, cfg.downlink.power_budget,
                                               cfg.downlink.noise_power);
    }
  });
  return records;
}

inline void add_row(SweepRun& run, double snr_db, const char* name, std::vector<double> nmse,
                    std::optional<std::vector<double>> rate) {
  const MeanCi n = mean_ci95(nmse);
  SweepRow row{snr_db, name, n.mean, n.ci95, std::nullopt, nmse.size()};
  if (rate) row.mean_sum_rate = mean_ci95(*rate).mean;
  run.summary.rows.push_back(std::move(row));
  run.samples.push_back({std::move(nmse), rate ? std::move(*rate) : std::vector<double>{}});
}

}  // namespace detail

/// NMSE of SD and OMP across the SNR grid; rows (snr, sd), (snr, omp) in grid order.
inline SweepRun run_nmse_sweep_detailed(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  const auto records = detail::run_trials(cfg, false, opts);
  SweepRun run{{cfg, {}}, {}};
  for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
    std::vector<double> sd, omp;
    for (const auto& r : records) {
      sd.push_back(r.nmse_sd[s]);
      omp.push_back(r.nmse_omp[s]);
    }
    detail::add_row(run, cfg.snr_grid_db[s], kEstimatorSd, std::move(sd), std::nullopt);
    detail::add_row(run, cfg.snr_grid_db[s], kEstimatorOmp, std::move(omp), std::nullopt);
  }
  return run;
}

inline SweepResult run_nmse_sweep(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  return run_nmse_sweep_detailed(cfg, opts).summary;
}

/// Downlink sum-rate with SD, OMP and perfect CSI beam selection, plus the
/// fully digital ZF reference. Perfect-CSI rows repeat at every SNR point.
inline SweepRun run_sumrate_sweep_detailed(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  const auto records = detail::run_trials(cfg, true, opts);
  SweepRun run{{cfg, {}}, {}};
  for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
    std::vector<double> nsd, nomp, rsd, romp, rperfect, rfull;
    for (const auto& r : records) {
      nsd.push_back(r.nmse_sd[s]);
      nomp.push_back(r.nmse_omp[s]);
      rsd.push_back(r.rate_sd[s]);
      romp.push_back(r.rate_omp[s]);
      rperfect.push_back(r.rate_perfect);
      rfull.push_back(r.rate_full);
    }
    const double snr = cfg.snr_grid_db[s];
    const std::vector<double> zeros(records.size(), 0.0);
    detail::add_row(run, snr, kEstimatorSd, std::move(nsd), std::move(rsd));
    detail::add_row(run, snr, kEstimatorOmp, std::move(nomp), std::move(romp));
    detail::add_row(run, snr, kEstimatorPerfect, zeros, std::move(rperfect));
    detail::add_row(run, snr, kEstimatorFullDigital, zeros, std::move(rfull));
  }
  return run;
}

inline SweepResult run_sumrate_sweep(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  return run_sumrate_sweep_detailed(cfg, opts).summary;
}

struct BoundRow {
  std::size_t n_antennas;
  std::size_t v;
  double lower_bound;
  double worst_case_ratio;

  bool operator==(const BoundRow&) const = default;
};

inline std::vector<BoundRow> run_bound_table(const std::vector<std::size_t>& n_list,
                                             const std::vector<std::size_t>& v_list) {
  std::vector<BoundRow> rows;
  for (auto n : n_list)
    for (auto v : v_list)
      rows.push_back({n, v, power_ratio_lower_bound(n, v), worst_case_component_ratio(n, v)});
  return rows;
}

// ---- emission -------------------------------------------------------------

enum class OutputFormat { csv, json };

inline OutputFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot != std::string::npos && path.substr(dot) == ".json" ? OutputFormat::json
                                                                 : OutputFormat::csv;
}

inline constexpr const char* kSweepCsvHeader = "snr_db,estimator,mean_nmse,nmse_ci95,mean_sum_rate,trials";

inline std::string to_csv(const SweepResult& r) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& row : r.rows) {
    out += format_double(row.snr_db) + ',' + row.estimator + ',' + format_double(row.mean_nmse) +
           ',' + format_double(row.nmse_ci95) + ',' +
           (row.mean_sum_rate ? format_double(*row.mean_sum_rate) : std::string{}) + ',' +
           std::to_string(row.trials) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["N"] = c.n_antennas;
  j["K"] = c.users;
  j["N_RF"] = c.rf_chains;
  j["L"] = c.n_nlos;
  j["M"] = c.blocks;
  j["Q"] = c.measurements;
  j["V"] = c.v;
  j["omp_sparsity"] = c.omp_sparsity;
  j["los_var"] = c.los_variance;
  j["nlos_var"] = c.nlos_variance;
  j["snr_grid_db"] = c.snr_grid_db;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["downlink.rho"] = c.downlink.power_budget;
  j["downlink.noise_power"] = c.downlink.noise_power;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  ExperimentConfig c;
  c.n_antennas = j.at("N").get<std::size_t>();
  c.users = j.at("K").get<std::size_t>();
  c.rf_chains = j.at("N_RF").get<std::size_t>();
  c.n_nlos = j.at("L").get<std::size_t>();
  c.blocks = j.at("M").get<std::size_t>();
  c.measurements = j.at("Q").get<std::size_t>();
  c.v = j.at("V").get<std::size_t>();
  c.omp_sparsity = j.at("omp_sparsity").get<std::size_t>();
  c.los_variance = j.at("los_var").get<double>();
  c.nlos_variance = j.at("nlos_var").get<double>();
  c.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
  c.trials = j.at("trials").get<std::size_t>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.downlink.power_budget = j.at("downlink.rho").get<double>();
  c.downlink.noise_power = j.at("downlink.noise_power").get<double>();
  return c;
}

inline std::string to_json(const SweepResult& r) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(r.config);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["snr_db"] = row.snr_db;
    o["estimator"] = row.estimator;
    o["mean_nmse"] = row.mean_nmse;
    o["nmse_ci95"] = row.nmse_ci95;
    o["mean_sum_rate"] = row.mean_sum_rate ? nlohmann::ordered_json(*row.mean_sum_rate) : nullptr;
    o["trials"] = row.trials;
    j["rows"].push_back(std::move(o));
  }
  return j.dump(2) + '\n';
}

inline SweepResult sweep_from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  SweepResult r{config_from_json(j.at("config")), {}};
  for (const auto& o : j.at("rows")) {
    SweepRow row;
    row.snr_db = o.at("snr_db").get<double>();
    row.estimator = o.at("estimator").get<std::string>();
    row.mean_nmse = o.at("mean_nmse").get<double>();
    row.nmse_ci95 = o.at("nmse_ci95").get<double>();
    if (!o.at("mean_sum_rate").is_null()) row.mean_sum_rate = o.at("mean_sum_rate").get<double>();
    row.trials = o.at("trials").get<std::size_t>();
    r.rows.push_back(std::move(row));
  }
  return r;
}

inline std::string bound_table_csv(const std::vector<BoundRow>& rows) {
  std::string out = "N,V,power_ratio_lower_bound,worst_case_component_ratio\n";
  for (const auto& r : rows)
    out += std::to_string(r.n_antennas) + ',' + std::to_string(r.v) + ',' +
           format_double(r.lower_bound) + ',' + format_double(r.worst_case_ratio) + '\n';
  return out;
}

inline std::string bound_table_json(const std::vector<BoundRow>& rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["N"] = r.n_antennas;
    o["V"] = r.v;
    o["power_ratio_lower_bound"] = r.lower_bound;
    o["worst_case_component_ratio"] = r.worst_case_ratio;
    j.push_back(std::move(o));
  }
  return j.dump(2) + '\n';
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

/// Path of the resolved-config file written next to a CSV result.
inline std::string config_sidecar_path(const std::string& csv_path) { return csv_path + ".config"; }

/// Writes a sweep. JSON embeds the resolved config; CSV keeps the fixed
/// six-column schema and gets the config as a `<path>.config` sidecar, which
/// is itself a valid --config input.
inline void emit(const SweepResult& r, OutputFormat format, const std::string& path) {
  if (format == OutputFormat::json) {
    write_text(path, to_json(r));
  } else {
    write_text(path, to_csv(r));
    write_text(config_sidecar_path(path), to_config_text(r.config));
  }
}

}  // namespace beamspace
