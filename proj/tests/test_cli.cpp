// Copyright 2026 The statematch developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "statematch/report.hpp"

using namespace statematch;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("statematch_test_" +
            std::to_string(
                std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out << content;
}

const char* kTinyConfig = R"({
  "epsilon": 0.7,
  "theta0": {"count": 3, "min": 0.1, "max": 1.2},
  "phi0": {"policy": "equally-spaced", "count": 2},
  "shots": 8192,
  "iterations": 1,
  "seed": 20231005,
  "backend": "statevector"
})";

}  // namespace

TEST_CASE("config parsing is strict about unknown keys") {
  CHECK_THROWS_AS(parse_config_json(R"({"epsilon": 0.5})"), ConfigError);

  try {
    parse_config_json(
        R"({"epsilon": 0.5, "seed": 1, "shotz": 10, "theta0": {"mx": 1.0}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("shotz") != std::string::npos);
    CHECK(msg.find("theta0.mx") != std::string::npos);
  }

  const ExperimentConfig config = parse_config_json(kTinyConfig);
  CHECK(config.epsilons == std::vector<double>{0.7});
  CHECK(config.theta0_count == 3);
  CHECK(config.shots == 8192);
}

TEST_CASE("config hash is stable under key reordering") {
  const ExperimentConfig a = parse_config_json(
      R"({"epsilon": [0.7], "seed": 4, "shots": 100})");
  const ExperimentConfig b = parse_config_json(
      R"({"shots": 100, "seed": 4, "epsilon": [0.7]})");
  CHECK(config_hash(a) == config_hash(b));
  const ExperimentConfig c = parse_config_json(
      R"({"shots": 101, "seed": 4, "epsilon": [0.7]})");
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("decompose command writes a verifiable gate file") {
  TempDir dir;
  std::ostringstream out, err;
  const std::string path = dir.file("gates.json");
  const int code = cmd_decompose(0.8, path, out, err);
  CHECK(code == 0);
  CHECK(out.str().find("cnot_count = 2") != std::string::npos);
  REQUIRE(fs::exists(path));

  const GateSequence seq = gate_sequence_from_json(slurp(path));
  CHECK(seq.cnot_count == 2);
  CHECK(seq.epsilon == Approx(0.8));
  CHECK(verify_decomposition(seq, build_u_epsilon(Epsilon(0.8))) <= 1e-9);
  REQUIRE(fs::exists(path + ".manifest.json"));
}

TEST_CASE("decompose command validates epsilon") {
  TempDir dir;
  std::ostringstream out, err;
  CHECK(cmd_decompose(0.0, dir.file("g.json"), out, err) == 2);
  CHECK(cmd_decompose(1.5, dir.file("g.json"), out, err) == 2);
  // the boundary value is supported and still uses two CNOTs
  CHECK(cmd_decompose(1.0, dir.file("g1.json"), out, err) == 0);
}

TEST_CASE("sweep command produces byte-identical CSV for identical config") {
  TempDir dir;
  spit(dir.file("config.json"), kTinyConfig);

  std::ostringstream out1, err1, out2, err2;
  SweepCommandOptions opts;
  opts.config_path = dir.file("config.json");
  opts.out_dir = dir.file("run1");
  REQUIRE(cmd_sweep(opts, out1, err1) == 0);
  opts.out_dir = dir.file("run2");
  REQUIRE(cmd_sweep(opts, out2, err2) == 0);

  const std::string csv1 = slurp(dir.file("run1") + "/sweep.csv");
  const std::string csv2 = slurp(dir.file("run2") + "/sweep.csv");
  CHECK(csv1 == csv2);
  CHECK(fs::exists(dir.file("run1") + "/manifest.json"));
  CHECK(fs::exists(dir.file("run1") + "/sweep_summary.json"));

  SECTION("override changes the output") {
    opts.out_dir = dir.file("run3");
    opts.seed = 999;
    std::ostringstream out3, err3;
    REQUIRE(cmd_sweep(opts, out3, err3) == 0);
    CHECK(slurp(dir.file("run3") + "/sweep.csv") != csv1);
  }
}

TEST_CASE("sweep command rejects bad configs with exit code 2") {
  TempDir dir;
  std::ostringstream out, err;
  SweepCommandOptions opts;

  opts.config_path = dir.file("missing.json");
  CHECK(cmd_sweep(opts, out, err) == 2);

  spit(dir.file("unknown.json"),
       R"({"epsilon": 0.5, "seed": 1, "bogus_key": true})");
  opts.config_path = dir.file("unknown.json");
  CHECK(cmd_sweep(opts, out, err) == 2);
  CHECK(err.str().find("bogus_key") != std::string::npos);

  spit(dir.file("noise_sv.json"),
       R"({"epsilon": 0.5, "seed": 1, "noise": {"gamma": 0.1}})");
  opts.config_path = dir.file("noise_sv.json");
  CHECK(cmd_sweep(opts, out, err) == 2);
}

TEST_CASE("plot command embeds the numeric series") {
  TempDir dir;
  spit(dir.file("config.json"), kTinyConfig);
  SweepCommandOptions opts;
  opts.config_path = dir.file("config.json");
  opts.out_dir = dir.file("run");
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(opts, out, err) == 0);
  const std::string csv_path = dir.file("run") + "/sweep.csv";

  SECTION("success plot") {
    const std::string svg_path = dir.file("success.svg");
    REQUIRE(cmd_plot(csv_path, "success", svg_path, out, err) == 0);
    const std::string svg = slurp(svg_path);
    const auto meta = nlohmann::json::parse(extract_svg_metadata(svg));
    CHECK(meta["kind"] == "success");
    REQUIRE(meta["series"].size() == 1);
    const auto& series = meta["series"][0];
    CHECK(series["epsilon"].get<double>() == Approx(0.7));
    REQUIRE(series["theta0"].size() == 3);
    REQUIRE(series["mean"].size() == 3);
    // sampled means of a noiseless run stay inside the embedded band
    for (std::size_t i = 0; i < 3; ++i) {
      const double mean = series["mean"][i].get<double>();
      CHECK(mean >= series["band_lo"][i].get<double>() - 1e-12);
      CHECK(mean <= series["band_hi"][i].get<double>() + 1e-12);
    }
  }

  SECTION("theta1 plot") {
    const std::string svg_path = dir.file("theta1.svg");
    REQUIRE(cmd_plot(csv_path, "theta1", svg_path, out, err) == 0);
    const auto meta =
        nlohmann::json::parse(extract_svg_metadata(slurp(svg_path)));
    CHECK(meta["kind"] == "theta1");
  }

  SECTION("unknown kind") {
    CHECK(cmd_plot(csv_path, "volume", dir.file("x.svg"), out, err) == 2);
  }
}

TEST_CASE("plot command refuses empty or malformed input") {
  TempDir dir;
  std::ostringstream out, err;

  const std::string empty_path = dir.file("empty.csv");
  spit(empty_path,
       std::string("# ") + kSweepCsvSchema +
           "\nepsilon,theta0,phi0,shots,p_ideal,p_est,sigma,band_lo,band_hi,"
           "classification,theta1_ideal,theta1_est,seed,n00,n01,n10,n11\n");
  const std::string svg_path = dir.file("empty.svg");
  CHECK(cmd_plot(empty_path, "success", svg_path, out, err) == 1);
  CHECK_FALSE(fs::exists(svg_path));

  const std::string bad_path = dir.file("bad.csv");
  spit(bad_path, std::string("# ") + kSweepCsvSchema + "\nheader\n1,2,3\n");
  std::ostringstream err2;
  CHECK(cmd_plot(bad_path, "success", svg_path, out, err2) == 2);
  CHECK(err2.str().find("line 3") != std::string::npos);
}

TEST_CASE("mitigate command corrects a sweep CSV") {
  TempDir dir;
  spit(dir.file("config.json"), kTinyConfig);
  SweepCommandOptions opts;
  opts.config_path = dir.file("config.json");
  opts.out_dir = dir.file("run");
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(opts, out, err) == 0);
  const std::string csv_path = dir.file("run") + "/sweep.csv";

  SECTION("identity confusion leaves estimates unchanged") {
    ConfusionMatrix identity;
    spit(dir.file("identity.json"), confusion_to_json(identity));
    const std::string out_path = dir.file("corrected.csv");
    REQUIRE(cmd_mitigate(csv_path, dir.file("identity.json"), out_path, out,
                         err) == 0);
    const std::string corrected = slurp(out_path);
    std::istringstream lines(corrected);
    std::string line;
    std::getline(lines, line);  // schema
    CHECK(line == std::string("# ") + kMitigatedCsvSchema);
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
      std::vector<std::string> cells;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      REQUIRE(cells.size() == 19);
      CHECK(std::stod(cells[17]) == Approx(std::stod(cells[5])).margin(1e-12));
    }
  }

  SECTION("missing confusion file") {
    CHECK(cmd_mitigate(csv_path, dir.file("nope.json"),
                       dir.file("c.csv"), out, err) == 2);
  }

  SECTION("singular confusion matrix") {
    ConfusionMatrix singular;
    singular.entries.col(1) = singular.entries.col(0);
    spit(dir.file("singular.json"), confusion_to_json(singular));
    CHECK(cmd_mitigate(csv_path, dir.file("singular.json"),
                       dir.file("c.csv"), out, err) == 1);
  }
}

TEST_CASE("mitigate command requires raw outcome counts") {
  TempDir dir;
  spit(dir.file("config2.json"), R"({
    "epsilon": 0.7, "seed": 5, "iterations": 2, "shots": 64,
    "theta0": {"count": 2, "min": 0.2, "max": 1.0},
    "phi0": {"count": 1}
  })");
  SweepCommandOptions opts;
  opts.config_path = dir.file("config2.json");
  opts.out_dir = dir.file("run2");
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(opts, out, err) == 0);

  ConfusionMatrix identity;
  spit(dir.file("identity.json"), confusion_to_json(identity));
  CHECK(cmd_mitigate(dir.file("run2") + "/sweep.csv",
                     dir.file("identity.json"), dir.file("c.csv"), out,
                     err) == 1);
}

TEST_CASE("the output directory falls back to the environment variable") {
  TempDir dir;
  REQUIRE(setenv(kOutDirEnvVar, dir.file("envout").c_str(), 1) == 0);
  std::ostringstream out, err;
  const int code = cmd_decompose(0.75, "", out, err);
  unsetenv(kOutDirEnvVar);
  CHECK(code == 0);
  CHECK(fs::exists(dir.file("envout") + "/gate_sequence.json"));
}

TEST_CASE("counts serialization round-trips") {
  CountsTable counts;
  counts.shots = 16;
  counts.seed = 99;
  counts.counts = {{"00", 10}, {"11", 6}};
  const std::string j = counts_to_json(counts);
  const auto parsed = nlohmann::json::parse(j);
  CHECK(parsed["shots"] == 16);
  CHECK(parsed["counts"]["00"] == 10);
  CHECK(counts_to_csv(counts) == "bitstring,count\n00,10\n11,6\n");
}

TEST_CASE("sweep CSV round-trips through the parser") {
  TempDir dir;
  spit(dir.file("config.json"), kTinyConfig);
  SweepCommandOptions opts;
  opts.config_path = dir.file("config.json");
  opts.out_dir = dir.file("run");
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(opts, out, err) == 0);

  const auto records = sweep_from_csv(slurp(dir.file("run") + "/sweep.csv"));
  REQUIRE(records.size() == 6);
  for (const auto& r : records) {
    CHECK(r.epsilon == Approx(0.7));
    CHECK(r.shots == 8192);
    CHECK(r.n00 + r.n01 + r.n10 + r.n11 == r.shots);
  }
}
