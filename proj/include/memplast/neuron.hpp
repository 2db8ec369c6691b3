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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace memplast {

// How exponential decays are discretized.
enum class DecayMode {
  kExact,  // multiply by exp(-dt / tau)
  kEuler,  // multiply by (1 - dt / tau)
};

// Conductance-based integrate-and-fire constants. Conductances are in units
// where the leak is g_l; c_m / g_l is the membrane time constant in ms.
struct NeuronParams {
  double c_m = 200.0;
  double v_rest = -70.0;
  double e_exc = 0.0;
  double e_inh = -80.0;
  double g_l = 10.0;
  double tau_s = 5.0;
  double tau_ca = 500.0;
  double v_spike = -55.0;
  double v_reset = -70.0;
  double t_refr = 2.0;
  DecayMode decay = DecayMode::kExact;

  double tau_m() const { return c_m / g_l; }

  // Throws std::invalid_argument naming the first violated constraint.
  void Validate() const;
};

struct NeuronState {
  double v = -70.0;
  double g_e = 0.0;
  double g_i = 0.0;
  double ca = 0.0;  // spikes/ms
  double refr_until = -1.0;
  std::optional<double> last_spike;

  static NeuronState AtRest(const NeuronParams& params) {
    NeuronState s;
    s.v = params.v_rest;
    return s;
  }
};

// Raised when integration produces a non-finite value, usually because dt is
// too large for the conductances in play.
class NumericalFault : public std::runtime_error {
 public:
  NumericalFault(const std::string& what, std::int64_t step)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

struct StepResult {
  NeuronState state;
  bool spiked = false;
  // Membrane potential after integration, before any reset or refractory
  // clamp. This is the value the learning rule compares to its threshold.
  double v_integrated = 0.0;
};

// Per-step multiplicative decay for time constant `tau`.
double DecayFactor(double dt, double tau, DecayMode mode);

// Step functions with decay factors cached for a fixed dt.
class NeuronStepper {
 public:
  NeuronStepper(const NeuronParams& params, double dt);

  StepResult Integrate(const NeuronState& state, double exc_input,
                       double inh_input, double t) const;
  NeuronState Calcium(const NeuronState& state, bool spiked) const;

  const NeuronParams& params() const { return params_; }
  double dt() const { return dt_; }

 private:
  NeuronParams params_;
  double dt_;
  double syn_decay_;
  double ca_decay_;
};

// Advances one neuron by dt. `t` is the time at the end of the step (ms);
// spike and refractory bookkeeping use it. Inputs are summed synaptic
// weights arriving this step and jump the conductances before decay.
StepResult IntegrateStep(const NeuronState& state, const NeuronParams& params,
                         double exc_input, double inh_input, double dt,
                         double t);

// Calcium low-pass of the neuron's own spikes. A spike adds 1/tau_ca so the
// long-run mean of ca equals the firing rate in spikes/ms.
NeuronState UpdateCalcium(const NeuronState& state, const NeuronParams& params,
                          bool spiked, double dt);

}  // namespace memplast
