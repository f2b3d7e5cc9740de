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

#include "statematch/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace statematch {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << content;
}

std::string resolve_out_dir(const std::string& requested) {
  if (!requested.empty()) return requested;
  if (const char* env = std::getenv(kOutDirEnvVar); env && *env) return env;
  return ".";
}

json complex_to_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

std::complex<double> complex_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

void collect_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                          const std::string& prefix,
                          std::vector<std::string>& unknown) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      unknown.push_back(prefix.empty() ? key : prefix + "." + key);
    }
  }
}

Phi0Policy parse_policy(const std::string& s) {
  if (s == "equally-spaced") return Phi0Policy::EquallySpaced;
  if (s == "random") return Phi0Policy::Random;
  throw ConfigError("config: phi0.policy must be 'equally-spaced' or 'random'");
}

SimBackend parse_backend(const std::string& s) {
  if (s == "statevector") return SimBackend::Statevector;
  if (s == "density") return SimBackend::Density;
  if (s == "gate-sequence") return SimBackend::GateSequence;
  throw ConfigError(
      "config: backend must be 'statevector', 'density' or 'gate-sequence'");
}

Classification parse_classification(const std::string& s) {
  if (s == "within-statistical") return Classification::WithinStatistical;
  if (s == "device-error") return Classification::DeviceError;
  throw ConfigError("unknown classification label: " + s);
}

RunManifest start_manifest(const std::string& config_path,
                           const std::string& out_dir,
                           const std::string& hash) {
  RunManifest m;
  m.config_hash = hash;
  m.config_path = config_path;
  m.output_dir = out_dir;
  m.timestamp_utc = utc_timestamp();
  return m;
}

void finish_manifest(RunManifest& manifest, const std::string& path) {
  manifest.artifacts.push_back(path);
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config: top level must be a JSON object");
  }

  std::vector<std::string> unknown;
  collect_unknown_keys(root,
                       {"epsilon", "theta0", "phi0", "shots", "iterations",
                        "seed", "backend", "noise"},
                       "", unknown);
  if (root.contains("theta0") && root["theta0"].is_object()) {
    collect_unknown_keys(root["theta0"], {"count", "min", "max"}, "theta0",
                         unknown);
  }
  if (root.contains("phi0") && root["phi0"].is_object()) {
    collect_unknown_keys(root["phi0"], {"policy", "count"}, "phi0", unknown);
  }
  if (root.contains("noise") && root["noise"].is_object()) {
    collect_unknown_keys(root["noise"], {"gamma", "readout"}, "noise",
                         unknown);
  }
  if (!unknown.empty()) {
    std::string msg = "config: unknown keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  ExperimentConfig config;
  try {
    if (!root.contains("epsilon")) {
      throw ConfigError("config: 'epsilon' is required");
    }
    if (root["epsilon"].is_array()) {
      config.epsilons = root["epsilon"].get<std::vector<double>>();
    } else {
      config.epsilons = {root["epsilon"].get<double>()};
    }
    if (!root.contains("seed")) {
      throw ConfigError("config: 'seed' is required");
    }
    config.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("theta0")) {
      const json& t = root["theta0"];
      if (t.contains("count")) config.theta0_count = t["count"].get<int>();
      if (t.contains("min")) config.theta0_min = t["min"].get<double>();
      if (t.contains("max")) config.theta0_max = t["max"].get<double>();
    }
    if (root.contains("phi0")) {
      const json& p = root["phi0"];
      if (p.contains("policy")) {
        config.phi0_policy = parse_policy(p["policy"].get<std::string>());
      }
      if (p.contains("count")) config.phi0_count = p["count"].get<int>();
    }
    if (root.contains("shots")) {
      config.shots = root["shots"].get<std::uint64_t>();
    }
    if (root.contains("iterations")) {
      config.iterations = root["iterations"].get<int>();
    }
    if (root.contains("backend")) {
      config.backend = parse_backend(root["backend"].get<std::string>());
    }
    if (root.contains("noise")) {
      const json& n = root["noise"];
      if (n.contains("gamma")) {
        config.damping_gamma = n["gamma"].get<double>();
      }
      if (n.contains("readout")) {
        const auto flips = n["readout"].get<std::vector<double>>();
        if (flips.size() != 2) {
          throw ConfigError(
              "config: noise.readout must be [flip01, flip10]");
        }
        config.readout_flip01 = flips[0];
        config.readout_flip10 = flips[1];
      }
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config: wrong value type: ") + e.what());
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config_json(read_file(path));
}

std::string config_to_canonical_json(const ExperimentConfig& config) {
  json j;
  j["backend"] = to_label(config.backend);
  j["epsilon"] = config.epsilons;
  j["iterations"] = config.iterations;
  j["noise"] = {{"gamma", config.damping_gamma},
                {"readout", {config.readout_flip01, config.readout_flip10}}};
  j["phi0"] = {{"count", config.phi0_count},
               {"policy", to_label(config.phi0_policy)}};
  j["seed"] = config.seed;
  j["shots"] = config.shots;
  j["theta0"] = {{"count", config.theta0_count},
                 {"max", config.theta0_max},
                 {"min", config.theta0_min}};
  return j.dump();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  return hash_hex(fnv1a64(config_to_canonical_json(config)));
}

std::string gate_sequence_to_json(const GateSequence& seq, double residual) {
  json j;
  j["schema"] = "statematch-gates/1";
  j["epsilon"] = seq.epsilon;
  j["cnot_count"] = seq.cnot_count;
  j["global_phase"] = complex_to_json(seq.global_phase);
  j["residual"] = residual;
  j["gates"] = json::array();
  for (const Gate& g : seq.gates) {
    json jg;
    if (g.kind == Gate::Kind::OneQubit) {
      jg["kind"] = "u1q";
      jg["qubit"] = g.qubit;
      jg["matrix"] = json::array();
      for (int r = 0; r < 2; ++r) {
        json row = json::array();
        for (int c = 0; c < 2; ++c) row.push_back(complex_to_json(g.matrix(r, c)));
        jg["matrix"].push_back(row);
      }
    } else {
      jg["kind"] = "cnot";
      jg["control"] = g.control;
      jg["target"] = g.target;
    }
    j["gates"].push_back(jg);
  }
  return j.dump(2) + "\n";
}

GateSequence gate_sequence_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("gate sequence: invalid JSON: ") + e.what());
  }
  GateSequence seq;
  try {
    seq.epsilon = j.at("epsilon").get<double>();
    seq.cnot_count = j.at("cnot_count").get<int>();
    seq.global_phase = complex_from_json(j.at("global_phase"));
    for (const json& jg : j.at("gates")) {
      if (jg.at("kind") == "u1q") {
        Eigen::Matrix2cd m;
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c)
            m(r, c) = complex_from_json(jg.at("matrix").at(r).at(c));
        seq.gates.push_back(Gate::one_qubit(jg.at("qubit").get<int>(), m));
      } else if (jg.at("kind") == "cnot") {
        seq.gates.push_back(Gate::cnot(jg.at("control").get<int>(),
                                       jg.at("target").get<int>()));
      } else {
        throw ConfigError("gate sequence: unknown gate kind");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("gate sequence: malformed: ") + e.what());
  }
  return seq;
}

std::string counts_to_json(const CountsTable& counts) {
  json j;
  j["shots"] = counts.shots;
  j["seed"] = counts.seed;
  j["counts"] = json::object();
  for (const auto& [bits, n] : counts.counts) j["counts"][bits] = n;
  return j.dump(2) + "\n";
}

std::string counts_to_csv(const CountsTable& counts) {
  std::string out = "bitstring,count\n";
  for (const auto& [bits, n] : counts.counts) {
    out += bits + "," + std::to_string(n) + "\n";
  }
  return out;
}

std::string confusion_to_json(const ConfusionMatrix& cm) {
  json j;
  j["schema"] = "statematch-confusion/1";
  j["source"] = cm.source;
  j["shots"] = cm.shots;
  j["entries"] = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(cm.entries(r, c));
    j["entries"].push_back(row);
  }
  return j.dump(2) + "\n";
}

ConfusionMatrix confusion_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("confusion: invalid JSON: ") + e.what());
  }
  ConfusionMatrix cm;
  try {
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        cm.entries(r, c) = j.at("entries").at(r).at(c).get<double>();
    if (j.contains("source")) cm.source = j["source"].get<std::string>();
    if (j.contains("shots")) cm.shots = j["shots"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("confusion: malformed: ") + e.what());
  }
  cm.validate();
  return cm;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out;
  out += "# ";
  out += kSweepCsvSchema;
  out += "\n";
  out +=
      "epsilon,theta0,phi0,shots,p_ideal,p_est,sigma,band_lo,band_hi,"
      "classification,theta1_ideal,theta1_est,seed,n00,n01,n10,n11\n";
  for (const StatRecord& r : sweep.records) {
    out += fmt_double(r.epsilon) + "," + fmt_double(r.theta0) + "," +
           fmt_double(r.phi0) + "," + std::to_string(r.shots) + "," +
           fmt_double(r.p_ideal) + "," + fmt_double(r.p_est) + "," +
           fmt_double(r.sigma) + "," + fmt_double(r.band_lo) + "," +
           fmt_double(r.band_hi) + "," + to_label(r.classification) + "," +
           fmt_double(r.theta1_ideal) + "," +
           (r.theta1_missing ? "" : fmt_double(r.theta1_est)) + "," +
           std::to_string(r.seed) + "," + std::to_string(r.n00) + "," +
           std::to_string(r.n01) + "," + std::to_string(r.n10) + "," +
           std::to_string(r.n11) + "\n";
  }
  return out;
}

std::vector<StatRecord> sweep_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError("sweep csv, line " + std::to_string(line_no) + ": " +
                      what);
  };

  line_no = 1;
  if (!std::getline(in, line)) fail("empty file");
  if (line != std::string("# ") + kSweepCsvSchema &&
      line != std::string("# ") + kMitigatedCsvSchema) {
    fail("unrecognized schema line");
  }
  line_no = 2;
  if (!std::getline(in, line)) fail("missing header row");

  std::vector<StatRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (cells.size() < 17) fail("expected at least 17 columns");
    try {
      StatRecord r;
      r.epsilon = std::stod(cells[0]);
      r.theta0 = std::stod(cells[1]);
      r.phi0 = std::stod(cells[2]);
      r.shots = std::stoull(cells[3]);
      r.p_ideal = std::stod(cells[4]);
      r.p_est = std::stod(cells[5]);
      r.sigma = std::stod(cells[6]);
      r.band_lo = std::stod(cells[7]);
      r.band_hi = std::stod(cells[8]);
      r.classification = parse_classification(cells[9]);
      r.theta1_ideal = std::stod(cells[10]);
      if (cells[11].empty()) {
        r.theta1_missing = true;
        r.theta1_est = std::numeric_limits<double>::quiet_NaN();
      } else {
        r.theta1_est = std::stod(cells[11]);
      }
      r.seed = std::stoull(cells[12]);
      r.n00 = std::stoull(cells[13]);
      r.n01 = std::stoull(cells[14]);
      r.n10 = std::stoull(cells[15]);
      r.n11 = std::stoull(cells[16]);
      records.push_back(r);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(std::string("cannot parse row: ") + e.what());
    }
  }
  return records;
}

std::string manifest_to_json(const RunManifest& manifest) {
  json j;
  j["schema"] = "statematch-manifest/1";
  j["config_hash"] = manifest.config_hash;
  j["config_path"] = manifest.config_path;
  j["output_dir"] = manifest.output_dir;
  j["artifacts"] = manifest.artifacts;
  j["toolkit_version"] = manifest.toolkit_version;
  j["timestamp_utc"] = manifest.timestamp_utc;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render_sweep_svg(const std::vector<StatRecord>& records,
                             PlotKind kind) {
  if (records.empty()) {
    throw std::invalid_argument("render_sweep_svg: empty record set");
  }
  constexpr double width = 720, height = 480;
  constexpr double ml = 70, mr = 20, mt = 20, mb = 50;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  double x_min = records.front().theta0, x_max = records.front().theta0;
  for (const auto& r : records) {
    x_min = std::min(x_min, r.theta0);
    x_max = std::max(x_max, r.theta0);
  }
  if (x_max == x_min) x_max = x_min + 1e-9;
  const double y_min = 0.0;
  const double y_max = kind == PlotKind::Success ? 1.0 : std::numbers::pi;
  auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double v) {
    return mt + plot_h - (v - y_min) / (y_max - y_min) * plot_h;
  };

  // Group records by epsilon, keeping first-appearance order.
  std::vector<double> eps_order;
  std::map<double, std::vector<StatRecord>> by_eps;
  for (const auto& r : records) {
    if (!by_eps.count(r.epsilon)) eps_order.push_back(r.epsilon);
    by_eps[r.epsilon].push_back(r);
  }

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream svg;
  json meta;
  meta["kind"] = kind == PlotKind::Success ? "success" : "theta1";
  meta["series"] = json::array();

  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  int color_idx = 0;
  for (double eps : eps_order) {
    const auto& recs = by_eps[eps];
    const char* color = palette[color_idx++ % 6];

    // Ideal curve and band, one value per distinct theta0 (records at the
    // same theta0 share them).
    std::map<double, const StatRecord*> per_theta;
    for (const auto& r : recs) per_theta.emplace(r.theta0, &r);

    json series;
    series["epsilon"] = eps;
    series["theta0"] = json::array();
    series["ideal"] = json::array();
    series["band_lo"] = json::array();
    series["band_hi"] = json::array();
    series["mean"] = json::array();
    series["std"] = json::array();

    if (kind == PlotKind::Success) {
      std::ostringstream band;
      band << "<path fill=\"" << color << "\" fill-opacity=\"0.15\" "
           << "stroke=\"none\" d=\"M";
      for (auto it = per_theta.begin(); it != per_theta.end(); ++it) {
        band << sx(it->first) << " " << sy(it->second->band_hi) << " L";
      }
      bool first = true;
      for (auto it = per_theta.rbegin(); it != per_theta.rend(); ++it) {
        if (!first) band << " L";
        band << sx(it->first) << " " << sy(it->second->band_lo);
        first = false;
      }
      band << " Z\"/>";
      svg << band.str() << "\n";
    }

    std::ostringstream curve;
    curve << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [theta, rec] : per_theta) {
      const double ideal =
          kind == PlotKind::Success ? rec->p_ideal : rec->theta1_ideal;
      curve << sx(theta) << "," << sy(ideal) << " ";
    }
    curve << "\"/>";
    svg << curve.str() << "\n";

    const std::vector<AggregateRow> agg = aggregate_records(recs);
    for (const AggregateRow& row : agg) {
      const double mean =
          kind == PlotKind::Success ? row.p_mean : row.theta1_mean;
      const double dev = kind == PlotKind::Success ? row.p_std : row.theta1_std;
      svg << "<line stroke=\"" << color << "\" stroke-width=\"1\" x1=\""
          << sx(row.theta0) << "\" x2=\"" << sx(row.theta0) << "\" y1=\""
          << sy(std::max(y_min, mean - dev)) << "\" y2=\""
          << sy(std::min(y_max, mean + dev)) << "\"/>\n";
      svg << "<circle fill=\"" << color << "\" cx=\"" << sx(row.theta0)
          << "\" cy=\"" << sy(mean) << "\" r=\"2.5\"/>\n";
    }

    for (const auto& [theta, rec] : per_theta) {
      series["theta0"].push_back(theta);
      series["ideal"].push_back(kind == PlotKind::Success ? rec->p_ideal
                                                          : rec->theta1_ideal);
      series["band_lo"].push_back(rec->band_lo);
      series["band_hi"].push_back(rec->band_hi);
    }
    for (const AggregateRow& row : agg) {
      series["mean"].push_back(kind == PlotKind::Success ? row.p_mean
                                                         : row.theta1_mean);
      series["std"].push_back(kind == PlotKind::Success ? row.p_std
                                                        : row.theta1_std);
    }
    meta["series"].push_back(series);
  }

  // Axes.
  svg << "<line stroke=\"black\" x1=\"" << ml << "\" y1=\"" << mt + plot_h
      << "\" x2=\"" << ml + plot_w << "\" y2=\"" << mt + plot_h << "\"/>\n";
  svg << "<line stroke=\"black\" x1=\"" << ml << "\" y1=\"" << mt
      << "\" x2=\"" << ml << "\" y2=\"" << mt + plot_h << "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    svg << "<text font-size=\"11\" text-anchor=\"middle\" x=\"" << sx(xv)
        << "\" y=\"" << mt + plot_h + 16 << "\">" << fmt_double(std::round(xv * 1000) / 1000)
        << "</text>\n";
    svg << "<text font-size=\"11\" text-anchor=\"end\" x=\"" << ml - 6
        << "\" y=\"" << sy(yv) + 4 << "\">" << fmt_double(std::round(yv * 1000) / 1000)
        << "</text>\n";
  }
  svg << "<text font-size=\"13\" text-anchor=\"middle\" x=\""
      << ml + plot_w / 2 << "\" y=\"" << height - 12 << "\">theta0 (rad)"
      << "</text>\n";
  svg << "<text font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + plot_h / 2 << ")\" x=\"16\" y=\"" << mt + plot_h / 2 << "\">"
      << (kind == PlotKind::Success ? "success probability" : "theta1 (rad)")
      << "</text>\n";

  svg << "<metadata id=\"statematch-data\">" << meta.dump()
      << "</metadata>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string extract_svg_metadata(const std::string& svg) {
  const std::string open = "<metadata id=\"statematch-data\">";
  const std::string close = "</metadata>";
  const auto start = svg.find(open);
  if (start == std::string::npos) {
    throw std::invalid_argument("svg: no embedded data block");
  }
  const auto end = svg.find(close, start);
  if (end == std::string::npos) {
    throw std::invalid_argument("svg: unterminated data block");
  }
  return svg.substr(start + open.size(), end - start - open.size());
}

int cmd_decompose(double epsilon, std::string out_path, std::ostream& out,
                  std::ostream& err) {
  std::optional<Epsilon> eps;
  try {
    eps.emplace(epsilon);
  } catch (const std::domain_error& e) {
    err << "decompose: " << e.what() << "\n";
    return 2;
  }
  try {
    const KakResult kak = decompose_epsilon(*eps);
    const GateSequence seq = canonicalize_and_synthesize(kak, eps->value());
    const double residual =
        verify_decomposition(seq, build_u_epsilon(*eps));
    if (out_path.empty()) {
      out_path = resolve_out_dir("") + "/gate_sequence.json";
    }
    write_file(out_path, gate_sequence_to_json(seq, residual));

    RunManifest manifest = start_manifest(
        "", fs::path(out_path).parent_path().string(),
        hash_hex(fnv1a64("decompose:" + fmt_double(epsilon))));
    finish_manifest(manifest, out_path);
    const std::string manifest_path = out_path + ".manifest.json";
    write_file(manifest_path, manifest_to_json(manifest));

    out << "epsilon = " << fmt_double(epsilon) << "\n";
    out << "cnot_count = " << seq.cnot_count << "\n";
    out << "residual = " << fmt_double(residual) << "\n";
    out << "wrote " << out_path << "\n";
    return residual <= 1e-9 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "decompose: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const SweepCommandOptions& options, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_config_file(options.config_path);
    if (options.seed) config.seed = *options.seed;
    if (options.shots) config.shots = *options.shots;
    config.validate();
  } catch (const ConfigError& e) {
    err << "sweep: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "sweep: " << e.what() << "\n";
    return 2;
  }

  try {
    const SweepResult result = run_sweep(config);
    const std::string dir = resolve_out_dir(options.out_dir);
    const std::string csv_path = dir + "/sweep.csv";
    const std::string summary_path = dir + "/sweep_summary.json";
    const std::string manifest_path = dir + "/manifest.json";

    write_file(csv_path, sweep_to_csv(result));

    json summary;
    summary["schema"] = "statematch-summary/1";
    summary["config"] = json::parse(config_to_canonical_json(config));
    summary["record_count"] = result.records.size();
    summary["aggregates"] = json::array();
    int device_error_count = 0;
    for (const auto& r : result.records) {
      if (r.classification == Classification::DeviceError) {
        ++device_error_count;
      }
    }
    summary["device_error_records"] = device_error_count;
    for (const AggregateRow& row : aggregate(result)) {
      summary["aggregates"].push_back(
          {{"epsilon", row.epsilon},
           {"theta0", row.theta0},
           {"p_mean", row.p_mean},
           {"p_std", row.p_std},
           {"theta1_mean", row.theta1_mean},
           {"theta1_std", row.theta1_std},
           {"count", row.count},
           {"theta1_missing", row.theta1_missing},
           {"band_width", row.band_width},
           {"out_of_band_excess", row.out_of_band_excess}});
    }
    write_file(summary_path, summary.dump(2) + "\n");

    RunManifest manifest =
        start_manifest(options.config_path, dir, config_hash(config));
    finish_manifest(manifest, csv_path);
    finish_manifest(manifest, summary_path);
    write_file(manifest_path, manifest_to_json(manifest));

    out << "records = " << result.records.size() << "\n";
    out << "device_error_records = " << device_error_count << "\n";
    out << "wrote " << csv_path << "\n";
    out << "wrote " << summary_path << "\n";
    out << "wrote " << manifest_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "sweep: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plot(const std::string& csv_path, const std::string& kind,
             std::string out_path, std::ostream& out, std::ostream& err) {
  PlotKind plot_kind;
  if (kind == "success") {
    plot_kind = PlotKind::Success;
  } else if (kind == "theta1") {
    plot_kind = PlotKind::Theta1;
  } else {
    err << "plot: unknown kind '" << kind << "' (use success or theta1)\n";
    return 2;
  }
  std::vector<StatRecord> records;
  try {
    records = sweep_from_csv(read_file(csv_path));
  } catch (const ConfigError& e) {
    err << "plot: " << e.what() << "\n";
    return 2;
  }
  try {
    if (records.empty()) {
      throw std::invalid_argument("no records in " + csv_path);
    }
    if (out_path.empty()) {
      out_path = resolve_out_dir("") + "/sweep_" + kind + ".svg";
    }
    write_file(out_path, render_sweep_svg(records, plot_kind));

    RunManifest manifest = start_manifest(
        csv_path, fs::path(out_path).parent_path().string(),
        hash_hex(fnv1a64("plot:" + kind)));
    finish_manifest(manifest, out_path);
    write_file(out_path + ".manifest.json", manifest_to_json(manifest));
    out << "wrote " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "plot: " << e.what() << "\n";
    return 1;
  }
}

int cmd_mitigate(const std::string& csv_path,
                 const std::string& confusion_path, std::string out_path,
                 std::ostream& out, std::ostream& err) {
  std::vector<StatRecord> records;
  ConfusionMatrix confusion;
  try {
    records = sweep_from_csv(read_file(csv_path));
    confusion = confusion_from_json(read_file(confusion_path));
  } catch (const ConfigError& e) {
    err << "mitigate: " << e.what() << "\n";
    return 2;
  } catch (const MitigationError& e) {
    err << "mitigate: " << e.what() << "\n";
    return 2;
  }
  try {
    if (records.empty()) {
      throw std::invalid_argument("no records in " + csv_path);
    }
    std::string csv;
    csv += "# ";
    csv += kMitigatedCsvSchema;
    csv += "\n";
    csv +=
        "epsilon,theta0,phi0,shots,p_ideal,p_est,sigma,band_lo,band_hi,"
        "classification,theta1_ideal,theta1_est,seed,n00,n01,n10,n11,"
        "corrected_p_est,corrected_theta1_est\n";
    for (const StatRecord& r : records) {
      const std::uint64_t total = r.n00 + r.n01 + r.n10 + r.n11;
      if (total != r.shots || r.shots == 0) {
        throw std::invalid_argument(
            "records lack raw outcome counts (multi-step sweeps cannot be "
            "mitigated)");
      }
      Eigen::Vector4d raw;
      raw << static_cast<double>(r.n00) / r.shots,
          static_cast<double>(r.n01) / r.shots,
          static_cast<double>(r.n10) / r.shots,
          static_cast<double>(r.n11) / r.shots;
      const Eigen::Vector4d corrected = mitigate(raw, confusion);
      const double corrected_p = corrected(0) + corrected(2);
      std::string corrected_theta;
      if (corrected(0) > 0.0 || corrected(2) > 0.0) {
        corrected_theta = fmt_double(estimate_theta1(corrected(0), corrected(2)));
      }
      csv += fmt_double(r.epsilon) + "," + fmt_double(r.theta0) + "," +
             fmt_double(r.phi0) + "," + std::to_string(r.shots) + "," +
             fmt_double(r.p_ideal) + "," + fmt_double(r.p_est) + "," +
             fmt_double(r.sigma) + "," + fmt_double(r.band_lo) + "," +
             fmt_double(r.band_hi) + "," + to_label(r.classification) + "," +
             fmt_double(r.theta1_ideal) + "," +
             (r.theta1_missing ? "" : fmt_double(r.theta1_est)) + "," +
             std::to_string(r.seed) + "," + std::to_string(r.n00) + "," +
             std::to_string(r.n01) + "," + std::to_string(r.n10) + "," +
             std::to_string(r.n11) + "," + fmt_double(corrected_p) + "," +
             corrected_theta + "\n";
    }
    if (out_path.empty()) {
      out_path = resolve_out_dir("") + "/sweep_mitigated.csv";
    }
    write_file(out_path, csv);

    RunManifest manifest = start_manifest(
        csv_path, fs::path(out_path).parent_path().string(),
        hash_hex(fnv1a64("mitigate")));
    finish_manifest(manifest, out_path);
    write_file(out_path + ".manifest.json", manifest_to_json(manifest));
    out << "wrote " << out_path << "\n";
    return 0;
  } catch (const MitigationError& e) {
    err << "mitigate: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "mitigate: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace statematch
