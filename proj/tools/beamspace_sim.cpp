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

// beamspace_sim: command line front end for the sweeps and checks.
//
//   beamspace_sim nmse-sweep    [--config f] [--seed s] [--trials t] [--out f]
//   beamspace_sim sumrate-sweep [--config f] [--seed s] [--trials t] [--out f]
//   beamspace_sim bound-table   [--config f] [--n 64,256] [--v 2,4,8] [--out f]
//   beamspace_sim validate      [--config f] [--seed s] [--trials t] [--out f]

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "beamspace/beamspace.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  std::string format;  // csv | json; default from --out extension
  unsigned threads = 0;
};

beamspace::ExperimentConfig resolve_config(const CommonOptions& o) {
  beamspace::ExperimentConfig cfg =
      o.config_path.empty() ? beamspace::ExperimentConfig{} : beamspace::load_config(o.config_path);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  cfg.validate();
  return cfg;
}

beamspace::OutputFormat resolve_format(const CommonOptions& o) {
  if (o.format == "json") return beamspace::OutputFormat::json;
  if (o.format == "csv") return beamspace::OutputFormat::csv;
  return beamspace::format_for_path(o.out);
}

void print_summary(const beamspace::SweepResult& r) {
  std::fprintf(stderr, "%8s  %-16s %12s %10s %12s\n", "snr_db", "estimator", "nmse_db", "ci95",
               "sum_rate");
  for (const auto& row : r.rows) {
    std::fprintf(stderr, "%8.2f  %-16s %12.3f %10.2e", row.snr_db, row.estimator.c_str(),
                 row.mean_nmse > 0.0 ? beamspace::to_db(row.mean_nmse) : -INFINITY, row.nmse_ci95);
    if (row.mean_sum_rate) std::fprintf(stderr, " %12.3f", *row.mean_sum_rate);
    std::fprintf(stderr, "\n");
  }
}

void write_sweep(const beamspace::SweepResult& r, const CommonOptions& o) {
  const auto format = resolve_format(o);
  if (o.out.empty()) {
    std::cout << (format == beamspace::OutputFormat::json ? beamspace::to_json(r)
                                                          : beamspace::to_csv(r));
  } else {
    beamspace::emit(r, format, o.out);
  }
}

void add_common(CLI::App* sub, CommonOptions& o, bool with_threads) {
  sub->add_option("--config", o.config_path, "Experiment config file (key = value lines)")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "Override master_seed");
  sub->add_option("--trials", o.trials, "Override trials");
  sub->add_option("--out", o.out, "Output file (stdout when omitted)");
  sub->add_option("--format", o.format, "csv or json (default: from --out extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_threads)
    sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores (output is identical)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Support-detection beamspace channel estimation simulator"};
  app.footer(
      "Uplink SNR is the per-antenna received pilot SNR 1/sigma_UL^2 with unit-power pilots.\n"
      "Downlink: power budget rho (default K = 16) and noise power sigma_DL^2 (default 0.1),\n"
      "i.e. downlink SNR rho/(K sigma_DL^2) = 10 dB.");
  app.require_subcommand(1);

  CommonOptions nmse_opts, rate_opts, validate_opts, bound_opts;
  auto* nmse_cmd = app.add_subcommand("nmse-sweep", "Mean NMSE of SD and OMP over the SNR grid");
  add_common(nmse_cmd, nmse_opts, true);
  auto* rate_cmd = app.add_subcommand("sumrate-sweep", "Downlink sum-rate with estimated CSI");
  add_common(rate_cmd, rate_opts, true);

  auto* bound_cmd = app.add_subcommand("bound-table", "Captured-power bound vs worst-case component");
  std::vector<std::size_t> n_list, v_list{2, 4, 6, 8};
  bound_cmd->add_option("--config", bound_opts.config_path, "Take N from this config")
      ->check(CLI::ExistingFile);
  bound_cmd->add_option("--n", n_list, "Array sizes (default 64,128,256)")->delimiter(',');
  bound_cmd->add_option("--v", v_list, "Even window sizes")->delimiter(',');
  bound_cmd->add_option("--out", bound_opts.out, "Output file (stdout when omitted)");
  bound_cmd->add_option("--format", bound_opts.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* validate_cmd = app.add_subcommand("validate", "Run the invariant checks");
  add_common(validate_cmd, validate_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*nmse_cmd) {
      const auto cfg = resolve_config(nmse_opts);
      const auto r = beamspace::run_nmse_sweep(cfg, {nmse_opts.threads});
      print_summary(r);
      write_sweep(r, nmse_opts);
    } else if (*rate_cmd) {
      const auto cfg = resolve_config(rate_opts);
      const auto r = beamspace::run_sumrate_sweep(cfg, {rate_opts.threads});
      print_summary(r);
      write_sweep(r, rate_opts);
    } else if (*bound_cmd) {
      if (n_list.empty())
        n_list = bound_opts.config_path.empty()
                     ? std::vector<std::size_t>{64, 128, 256}
                     : std::vector<std::size_t>{beamspace::load_config(bound_opts.config_path).n_antennas};
      const auto rows = beamspace::run_bound_table(n_list, v_list);
      const auto text = resolve_format(bound_opts) == beamspace::OutputFormat::json
                            ? beamspace::bound_table_json(rows)
                            : beamspace::bound_table_csv(rows);
      if (bound_opts.out.empty())
        std::cout << text;
      else
        beamspace::write_text(bound_opts.out, text);
    } else if (*validate_cmd) {
      const auto cfg = resolve_config(validate_opts);
      beamspace::ValidationOptions vo{cfg.master_seed, validate_opts.trials.value_or(100)};
      std::string report;
      bool all = true;
      for (const auto& c : beamspace::run_validation(vo)) {
        all = all && c.passed;
        report += std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + '\n';
      }
      if (validate_opts.out.empty())
        std::cout << report;
      else
        beamspace::write_text(validate_opts.out, report);
      return all ? 0 : kExitValidation;
    }
  } catch (const beamspace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const beamspace::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const beamspace::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
