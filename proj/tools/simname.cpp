// Copyright 2026 The memplast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Experiment runner.
//
//   simname <subcommand> --config <file> --out <dir> [--seed N]
//
// Exit status: 0 all criteria pass, 1 a criterion failed, 2 usage or
// configuration error, 3 numerical fault.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "memplast/experiments.hpp"
#include "memplast/neuron.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

int RunCommand(memplast::ExperimentKind kind, const std::string& config_path,
               const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << fmt::format("error: cannot read config '{}'\n", config_path);
    return kExitUsage;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << fmt::format("error: {}: {}\n", config_path, e.what());
    return kExitUsage;
  }

  memplast::ExperimentResult result;
  try {
    memplast::ExperimentConfig config = memplast::ConfigFromJson(j, kind);
    if (seed) config.seed = *seed;
    result = memplast::RunExperiment(config, std::filesystem::path(out_dir));
  } catch (const memplast::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const memplast::NumericalFault& e) {
    std::cerr << fmt::format("numerical fault at step {}: {}\n", e.step(),
                             e.what());
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  for (const memplast::Criterion& c : result.criteria) {
    std::cout << fmt::format("{:<22} {}\n", c.name, c.pass ? "PASS" : "FAIL");
  }
  return result.all_pass() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"membrane-threshold plasticity experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  memplast::ExperimentKind chosen{};

  for (auto kind : {memplast::ExperimentKind::kStdpEquivalence,
                    memplast::ExperimentKind::kCoincidence,
                    memplast::ExperimentKind::kHiddenPattern,
                    memplast::ExperimentKind::kMultiPattern,
                    memplast::ExperimentKind::kCheckStability}) {
    const std::string name(memplast::ExperimentName(kind));
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat JSON config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return RunCommand(chosen, config_path, out_dir, seed);
}
