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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "statematch/kak.hpp"
#include "statematch/mitigation.hpp"
#include "statematch/simulator.hpp"
#include "statematch/stats.hpp"

namespace statematch {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr const char* kSweepCsvSchema = "statematch-sweep/1";
inline constexpr const char* kMitigatedCsvSchema = "statematch-sweep-mitigated/1";
inline constexpr const char* kOutDirEnvVar = "STATEMATCH_OUT_DIR";

/// Config file or CLI usage problem (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict JSON config parser; unknown keys are rejected with a list of the
/// offending keys. Missing optional keys take the documented defaults.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical JSON of the effective config (defaults resolved, sorted keys);
/// hashing this gives a hash that is stable under semantically identical
/// configs.
std::string config_to_canonical_json(const ExperimentConfig& config);
std::uint64_t fnv1a64(const std::string& data);
std::string config_hash(const ExperimentConfig& config);

// --- serialization -------------------------------------------------------

std::string gate_sequence_to_json(const GateSequence& seq, double residual);
GateSequence gate_sequence_from_json(const std::string& text);

std::string counts_to_json(const CountsTable& counts);
std::string counts_to_csv(const CountsTable& counts);

std::string confusion_to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const std::string& text);

/// Byte-stable CSV of a sweep (doubles rendered with %.17g).
std::string sweep_to_csv(const SweepResult& sweep);
/// Parses the sweep CSV schema; throws ConfigError with the line number on
/// malformed input.
std::vector<StatRecord> sweep_from_csv(const std::string& text);

struct RunManifest {
  std::string config_hash;
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> artifacts;
  std::string toolkit_version = kToolkitVersion;
  std::string timestamp_utc;
};
std::string manifest_to_json(const RunManifest& manifest);
std::string utc_timestamp();

// --- plotting ------------------------------------------------------------

enum class PlotKind { Success, Theta1 };

/// SVG with the theoretical curve, +-3 sigma band (success plots), per-theta0
/// mean markers and per-phi0 standard-deviation error bars. The rendered
/// numeric series are embedded as JSON inside a <metadata> element.
std::string render_sweep_svg(const std::vector<StatRecord>& records,
                             PlotKind kind);

/// The embedded JSON payload of an SVG produced by render_sweep_svg.
std::string extract_svg_metadata(const std::string& svg);

// --- CLI commands (exit codes: 0 success, 1 domain error, 2 usage) --------

struct SweepCommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::string out_dir;  // empty: $STATEMATCH_OUT_DIR or "."
};

int cmd_decompose(double epsilon, std::string out_path, std::ostream& out,
                  std::ostream& err);
int cmd_sweep(const SweepCommandOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_plot(const std::string& csv_path, const std::string& kind,
             std::string out_path, std::ostream& out, std::ostream& err);
int cmd_mitigate(const std::string& csv_path,
                 const std::string& confusion_path, std::string out_path,
                 std::ostream& out, std::ostream& err);

}  // namespace statematch
