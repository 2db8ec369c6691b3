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


#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "memplast/neuron.hpp"
#include "memplast/plasticity.hpp"
#include "memplast/synapse_table.hpp"

namespace memplast {

enum class ExperimentKind {
  kStdpEquivalence,
  kCoincidence,
  kHiddenPattern,
  kMultiPattern,
  kCheckStability,
};

std::optional<ExperimentKind> ParseExperimentKind(std::string_view name);
std::string_view ExperimentName(ExperimentKind kind);

// Invalid or unknown configuration content.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat experiment configuration. Rates are in spikes/ms, times in ms.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kHiddenPattern;
  std::uint64_t seed = 1;
  double dt = 0.1;
  double duration = 200000.0;      // training (or recording) time
  double probe_duration = 20000.0;  // learning-off test after training

  NeuronParams neuron;
  PlasticityParams plasticity;

  std::size_t num_inputs = 225;
  double input_rate = 0.02;  // independent/background input rate
  std::size_t num_sync = 20;
  double sync_rate = 0.005;
  double pattern_len = 40.0;
  double pattern_rate = 0.02;
  double presentation_rate = 0.005;
  double min_gap = 10.0;
  int num_patterns = 1;
  bool exact_pattern_count = true;

  std::size_t num_neurons = 20;  // per population
  std::size_t num_populations = 1;
  // Initial weights are w_init_lo + (w_init_hi - w_init_lo) * u^power with
  // u uniform on [0, 1).
  double w_init_lo = 0.0;
  double w_init_hi = 1.0;
  double w_init_power = 1.0;
  // stdp-equivalence only: when > 0, w_init_hi is rescaled by bisection so
  // the frozen network fires at this rate (spikes/ms).
  double target_rate = 0.0;
  double w_self_exc = 0.0;
  double w_mutual_inh = 0.0;

  // Arguments of the stability check; 0 derives them from the stimulus.
  double stability_t_p = 0.0;
  double stability_t_n = 0.0;
  double stability_f = 0.0;

  double lag = 20.0;
  double bin_width = 2.0;
  double stdp_window = 100.0;
  double coincidence_tolerance = 5.0;

  double snapshot_every = 0.0;
  std::vector<NeuronId> membrane_neurons;
  bool write_updates = true;
  bool audit_memory = false;

  // Throws ConfigError.
  void Validate() const;
  // (t_p, t_n, f) used for the stability check.
  double EffectiveTp() const;
  double EffectiveTn() const;
  double EffectiveF() const;
};

// Tuned defaults for each experiment.
ExperimentConfig DefaultConfig(ExperimentKind kind);

// Missing keys keep the defaults of `kind`; unknown keys, wrong types and an
// "experiment" entry naming a different experiment throw ConfigError.
ExperimentConfig ConfigFromJson(const nlohmann::json& j, ExperimentKind kind);
nlohmann::json ConfigToJson(const ExperimentConfig& config);

StabilityReport StabilityFor(const ExperimentConfig& config);

struct Criterion {
  std::string name;
  bool pass = false;
};

struct ExperimentResult {
  StabilityReport stability;
  std::vector<Criterion> criteria;
  nlohmann::json metrics;

  bool all_pass() const;
};

// Runs the configured experiment. When `out_dir` is set, the config echo,
// stability report, recordings and metrics are written there. Throws
// ConfigError for invalid configs and NumericalFault on blow-up.
ExperimentResult RunExperiment(
    const ExperimentConfig& config,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace memplast
