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

#include <nlohmann/json.hpp>

#include "memplast/neuron.hpp"

namespace memplast {

// Learning-rule constants. Updates fire only on presynaptic spike arrival and
// read nothing but the destination's membrane potential and calcium.
struct PlasticityParams {
  double eta_plus = 0.01;
  double eta_minus = 0.0028;
  double eta_h = 0.56;
  double v_lth = -60.0;
  double ca_target = 0.01;  // spikes/ms
  double w_min = 0.0;
  double w_max = 1.0;

  // Throws std::invalid_argument; checks v_lth against the neuron's rest and
  // firing threshold.
  void Validate(const NeuronParams& neuron) const;
};

// +eta_plus above the learning threshold, -eta_minus below it, 0 on equality.
double VoltageUpdate(double v_next, const PlasticityParams& params);

// eta_h * (ca_target - ca).
double HomeostaticUpdate(double ca, const PlasticityParams& params);

// Unclamped sum of both components.
inline double WeightDelta(double v_next, double ca,
                          const PlasticityParams& params) {
  return VoltageUpdate(v_next, params) + HomeostaticUpdate(ca, params);
}

// clamp(w + VoltageUpdate + HomeostaticUpdate, w_min, w_max).
double TotalUpdate(double w, double v_next, double ca,
                   const PlasticityParams& params);

// Signed slack of the three stability inequalities; each flag is set iff its
// slack is >= 0. For the strict retention inequality a zero slack is
// reported as failing, so its slack is nudged below zero in that case.
struct StabilityReport {
  bool drift_ok = false;        // t_p * eta_plus <= t_n * eta_minus
  bool retention_ok = false;    // eta_plus > t_n * f * eta_minus
  bool homeostasis_ok = false;  // eta_minus <= ca_target * eta_h
  double drift_margin = 0.0;
  double retention_margin = 0.0;
  double homeostasis_margin = 0.0;

  bool all_ok() const { return drift_ok && retention_ok && homeostasis_ok; }
};

// t_p: pattern duration (ms); t_n: mean noise interval between patterns (ms);
// f: presynaptic rate during noise (spikes/ms). All must be > 0.
StabilityReport ValidateStability(const PlasticityParams& params, double t_p,
                                  double t_n, double f);

void to_json(nlohmann::json& j, const StabilityReport& r);

}  // namespace memplast
