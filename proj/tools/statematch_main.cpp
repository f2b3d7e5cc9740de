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

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "statematch/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "statematch: quantum-state-matching protocol decomposition, "
      "simulation and benchmark toolkit"};
  app.require_subcommand(1);

  double epsilon = 0.0;
  std::string out_path;
  auto* dec = app.add_subcommand(
      "decompose", "Decompose U_epsilon into two CNOTs plus local gates");
  dec->add_option("--epsilon", epsilon, "Tolerance radius in (0, 1]")
      ->required();
  dec->add_option("--out", out_path, "Output gate-sequence JSON path");

  statematch::SweepCommandOptions sweep_options;
  std::optional<std::uint64_t> seed_override, shots_override;
  auto* swp = app.add_subcommand(
      "sweep", "Run a configured experiment sweep and write CSV results");
  swp->add_option("--config", sweep_options.config_path,
                  "JSON config file path")
      ->required();
  swp->add_option("--seed", seed_override, "Override the config seed");
  swp->add_option("--shots", shots_override, "Override the config shots");
  swp->add_option("--out", sweep_options.out_dir,
                  "Output directory (default: $STATEMATCH_OUT_DIR or .)");

  std::string plot_input, plot_kind = "success", plot_out;
  auto* plt = app.add_subcommand("plot", "Render a sweep CSV as SVG");
  plt->add_option("--input", plot_input, "Sweep CSV path")->required();
  plt->add_option("--kind", plot_kind, "Plot kind: success or theta1");
  plt->add_option("--out", plot_out, "Output SVG path");

  std::string mit_input, mit_confusion, mit_out;
  auto* mit = app.add_subcommand(
      "mitigate", "Apply readout error mitigation to a sweep CSV");
  mit->add_option("--input", mit_input, "Sweep CSV path")->required();
  mit->add_option("--confusion", mit_confusion, "Confusion matrix JSON path")
      ->required();
  mit->add_option("--out", mit_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (dec->parsed()) {
    return statematch::cmd_decompose(epsilon, out_path, std::cout, std::cerr);
  }
  if (swp->parsed()) {
    sweep_options.seed = seed_override;
    sweep_options.shots = shots_override;
    return statematch::cmd_sweep(sweep_options, std::cout, std::cerr);
  }
  if (plt->parsed()) {
    return statematch::cmd_plot(plot_input, plot_kind, plot_out, std::cout,
                                std::cerr);
  }
  if (mit->parsed()) {
    return statematch::cmd_mitigate(mit_input, mit_confusion, mit_out,
                                    std::cout, std::cerr);
  }
  return 2;
}
