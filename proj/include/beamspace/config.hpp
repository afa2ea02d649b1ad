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

// Experiment configuration and its flat `key = value` text form.
//
//   # comment
//   N = 256
//   snr_grid_db = 0, 5, 10, 15, 20
//   downlink.rho = 16
//
// Keys: N K N_RF L M Q V omp_sparsity los_var nlos_var snr_grid_db trials
// master_seed downlink.rho downlink.noise_power. Unknown or repeated keys are
// errors. N_RF, Q and omp_sparsity default to K, M·K and V·(L+1).

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "beamspace/errors.hpp"

namespace beamspace {

struct DownlinkConfig {
  double power_budget = 16.0;  // ρ = K
  double noise_power = 0.1;    // σ_DL² for a downlink SNR ρ/(K·σ_DL²) of 10 dB

  bool operator==(const DownlinkConfig&) const = default;
};

struct ExperimentConfig {
  std::size_t n_antennas = 256;   // N
  std::size_t users = 16;         // K
  std::size_t rf_chains = 16;     // N_RF
  std::size_t n_nlos = 2;         // L
  std::size_t blocks = 6;         // M
  std::size_t measurements = 96;  // Q
  std::size_t v = 8;              // beams kept per path
  std::size_t omp_sparsity = 24;
  double los_variance = 1.0;
  double nlos_variance = 0.01;
  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::size_t trials = 200;
  std::uint64_t master_seed = 1;
  DownlinkConfig downlink;

  bool operator==(const ExperimentConfig&) const = default;

  void validate() const {
    if (n_antennas == 0) throw ConfigError("N", "must be positive");
    if (users == 0) throw ConfigError("K", "must be positive");
    if (users > n_antennas) throw ConfigError("K", "cannot exceed N");
    if (rf_chains != users) throw ConfigError("N_RF", "must equal K");
    if (blocks == 0) throw ConfigError("M", "must be positive");
    if (measurements != blocks * users) throw ConfigError("Q", "must equal M*K");
    if (v == 0 || v > n_antennas) throw ConfigError("V", "must lie in 1..N");
    if (v * (n_nlos + 1) > measurements) throw ConfigError("V", "V*(L+1) must not exceed Q");
    if (omp_sparsity > measurements || omp_sparsity > n_antennas)
      throw ConfigError("omp_sparsity", "must not exceed Q or N");
    if (!(los_variance > 0.0)) throw ConfigError("los_var", "must be positive");
    if (!(nlos_variance > 0.0)) throw ConfigError("nlos_var", "must be positive");
    if (snr_grid_db.empty()) throw ConfigError("snr_grid_db", "must list at least one SNR");
    if (trials == 0) throw ConfigError("trials", "must be positive");
    if (!(downlink.power_budget > 0.0)) throw ConfigError("downlink.rho", "must be positive");
    if (!(downlink.noise_power > 0.0)) throw ConfigError("downlink.noise_power", "must be positive");
  }
};

/// Shortest decimal that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end || text.empty())
    throw ConfigError(key, "cannot parse '" + std::string(text) + "'");
  return value;
}

inline std::vector<double> parse_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Parses config text. Keys not given keep their defaults; derived keys
/// follow the keys they derive from unless set explicitly.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::optional<std::size_t> rf_chains, measurements, omp_sparsity;
  std::vector<std::string> seen;

  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    for (const auto& s : seen)
      if (s == key) throw ConfigError(key, "given more than once");
    seen.push_back(key);

    using detail::parse_number;
    if (key == "N") cfg.n_antennas = parse_number<std::size_t>(key, value);
    else if (key == "K") cfg.users = parse_number<std::size_t>(key, value);
    else if (key == "N_RF") rf_chains = parse_number<std::size_t>(key, value);
    else if (key == "L") cfg.n_nlos = parse_number<std::size_t>(key, value);
    else if (key == "M") cfg.blocks = parse_number<std::size_t>(key, value);
    else if (key == "Q") measurements = parse_number<std::size_t>(key, value);
    else if (key == "V") cfg.v = parse_number<std::size_t>(key, value);
    else if (key == "omp_sparsity") omp_sparsity = parse_number<std::size_t>(key, value);
    else if (key == "los_var") cfg.los_variance = parse_number<double>(key, value);
    else if (key == "nlos_var") cfg.nlos_variance = parse_number<double>(key, value);
    else if (key == "snr_grid_db") cfg.snr_grid_db = detail::parse_list(key, value);
    else if (key == "trials") cfg.trials = parse_number<std::size_t>(key, value);
    else if (key == "master_seed") cfg.master_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "downlink.rho") cfg.downlink.power_budget = parse_number<double>(key, value);
    else if (key == "downlink.noise_power") cfg.downlink.noise_power = parse_number<double>(key, value);
    else throw ConfigError(key, "unknown key");
  }

  cfg.rf_chains = rf_chains.value_or(cfg.users);
  cfg.measurements = measurements.value_or(cfg.blocks * cfg.users);
  cfg.omp_sparsity = omp_sparsity.value_or(cfg.v * (cfg.n_nlos + 1));
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form; parse_config(to_config_text(c)) == c.
inline std::string to_config_text(const ExperimentConfig& cfg) {
  std::string grid;
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i)
    grid += (i ? ", " : "") + format_double(cfg.snr_grid_db[i]);
  std::string out;
  const auto line = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  line("N", std::to_string(cfg.n_antennas));
  line("K", std::to_string(cfg.users));
  line("N_RF", std::to_string(cfg.rf_chains));
  line("L", std::to_string(cfg.n_nlos));
  line("M", std::to_string(cfg.blocks));
  line("Q", std::to_string(cfg.measurements));
  line("V", std::to_string(cfg.v));
  line("omp_sparsity", std::to_string(cfg.omp_sparsity));
  line("los_var", format_double(cfg.los_variance));
  line("nlos_var", format_double(cfg.nlos_variance));
  line("snr_grid_db", grid);
  line("trials", std::to_string(cfg.trials));
  line("master_seed", std::to_string(cfg.master_seed));
  line("downlink.rho", format_double(cfg.downlink.power_budget));
  line("downlink.noise_power", format_double(cfg.downlink.noise_power));
  return out;
}

}  // namespace beamspace
