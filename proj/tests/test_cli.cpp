// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The beamspace-sd authors

#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beamspace/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("beamspace_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(BEAMSPACE_SIM_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

const char* kSmallConfig =
    "N = 64\nK = 4\nM = 6\nV = 4\nL = 2\nsnr_grid_db = 0, 10\ntrials = 3\nmaster_seed = 11\n";

}  // namespace

TEST_CASE("nmse-sweep output is byte-identical across runs and thread counts", "[cli]") {
  TempDir tmp;
  const auto cfg = tmp.path / "small.cfg";
  write_file(cfg, kSmallConfig);
  const auto a = tmp.path / "a.csv", b = tmp.path / "b.csv";
  REQUIRE(run("nmse-sweep --config " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run("nmse-sweep --config " + cfg.string() + " --threads 4 --out " + b.string()) == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a).rfind(beamspace::kSweepCsvHeader, 0) == 0);
  CHECK(beamspace::parse_config(read_file(a.string() + ".config")) == beamspace::load_config(cfg.string()));
}

TEST_CASE("json output embeds the config and honours overrides", "[cli]") {
  TempDir tmp;
  const auto cfg = tmp.path / "small.cfg";
  write_file(cfg, kSmallConfig);
  const auto out = tmp.path / "r.json";
  REQUIRE(run("sumrate-sweep --config " + cfg.string() + " --seed 99 --trials 2 --out " + out.string()) == 0);
  const auto r = beamspace::sweep_from_json(read_file(out));
  CHECK(r.config.master_seed == 99);
  CHECK(r.config.trials == 2);
  CHECK(r.rows.size() == 8);
}

TEST_CASE("bound-table and validate", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "bounds.csv";
  REQUIRE(run("bound-table --n 256 --v 2,8 --out " + out.string()) == 0);
  const std::string text = read_file(out);
  CHECK(text.find("256,8,0.9496") != std::string::npos);
  CHECK(run("bound-table --n 256 --v 3") == 2);

  const auto report = tmp.path / "validate.txt";
  CHECK(run("validate --trials 20 --out " + report.string()) == 0);
  CHECK(read_file(report).find("FAIL") == std::string::npos);
}

TEST_CASE("bad input gives distinct exit codes", "[cli]") {
  TempDir tmp;
  const auto bad = tmp.path / "bad.cfg";
  write_file(bad, "N = 64\nbogus_key = 1\n");
  CHECK(run("nmse-sweep --config " + bad.string()) == 2);
  write_file(bad, "Q = 95\n");
  CHECK(run("nmse-sweep --config " + bad.string()) == 2);
  const auto cfg = tmp.path / "small.cfg";
  write_file(cfg, kSmallConfig);
  CHECK(run("nmse-sweep --config " + cfg.string() + " --out /nonexistent/dir/x.csv") == 3);
  CHECK(run("nmse-sweep --config /nonexistent/cfg") != 0);
  CHECK(run("no-such-command") != 0);
  CHECK(run("") != 0);
}
