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

#include "memplast/neuron.hpp"

#include <cmath>

#include <fmt/format.h>

namespace memplast {

namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(fmt::format("NeuronParams: {}", what));
}

}  // namespace

void NeuronParams::Validate() const {
  Require(c_m > 0, "c_m must be > 0");
  Require(g_l > 0, "g_l must be > 0");
  Require(tau_s > 0, "tau_s must be > 0");
  Require(tau_ca > 0, "tau_ca must be > 0");
  Require(t_refr >= 0, "t_refr must be >= 0");
  Require(v_rest < v_spike, "v_rest must be below v_spike");
  Require(v_reset <= v_rest, "v_reset must not exceed v_rest");
  Require(e_exc > v_spike, "e_exc must lie above v_spike");
  Require(e_inh <= v_rest, "e_inh must not exceed v_rest");
}

double DecayFactor(double dt, double tau, DecayMode mode) {
  return mode == DecayMode::kExact ? std::exp(-dt / tau) : 1.0 - dt / tau;
}

NeuronStepper::NeuronStepper(const NeuronParams& params, double dt)
    : params_(params),
      dt_(dt),
      syn_decay_(DecayFactor(dt, params.tau_s, params.decay)),
      ca_decay_(DecayFactor(dt, params.tau_ca, params.decay)) {
  if (!(dt > 0)) throw std::invalid_argument("NeuronStepper: dt must be > 0");
}

StepResult NeuronStepper::Integrate(const NeuronState& state, double exc_input,
                                    double inh_input, double t) const {
  StepResult out{state, false, 0.0};
  NeuronState& s = out.state;
  const NeuronParams& p = params_;

  s.g_e = (s.g_e + exc_input) * syn_decay_;
  s.g_i = (s.g_i + inh_input) * syn_decay_;

  const double current = (p.v_rest - s.v) * p.g_l + (p.e_exc - s.v) * s.g_e +
                         (p.e_inh - s.v) * s.g_i;
  s.v += current * dt_ / p.c_m;
  out.v_integrated = s.v;

  if (!std::isfinite(s.v) || !std::isfinite(s.g_e) || !std::isfinite(s.g_i)) {
    throw NumericalFault(
        fmt::format("non-finite neuron state at t={} ms (v={}, g_e={}, g_i={})",
                    t, s.v, s.g_e, s.g_i),
        -1);
  }

  // Half a step of slack absorbs rounding in t = step * dt.
  const bool refractory = t < s.refr_until - 0.5 * dt_;
  if (refractory) {
    s.v = p.v_reset;
  } else if (s.v >= p.v_spike) {
    out.spiked = true;
    s.v = p.v_reset;
    s.refr_until = t + p.t_refr;
    s.last_spike = t;
  }
  return out;
}

NeuronState NeuronStepper::Calcium(const NeuronState& state,
                                   bool spiked) const {
  NeuronState s = state;
  s.ca *= ca_decay_;
  if (spiked) s.ca += 1.0 / params_.tau_ca;
  return s;
}

StepResult IntegrateStep(const NeuronState& state, const NeuronParams& params,
                         double exc_input, double inh_input, double dt,
                         double t) {
  if (exc_input < 0 || inh_input < 0) {
    throw std::invalid_argument("IntegrateStep: inputs must be >= 0");
  }
  return NeuronStepper(params, dt).Integrate(state, exc_input, inh_input, t);
}

NeuronState UpdateCalcium(const NeuronState& state, const NeuronParams& params,
                          bool spiked, double dt) {
  return NeuronStepper(params, dt).Calcium(state, spiked);
}

}  // namespace memplast
