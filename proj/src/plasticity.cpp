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

#include "memplast/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace memplast {

void PlasticityParams::Validate(const NeuronParams& neuron) const {
  auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw std::invalid_argument(fmt::format("PlasticityParams: {}", what));
    }
  };
  require(eta_plus > 0, "eta_plus must be > 0");
  require(eta_minus > 0, "eta_minus must be > 0");
  require(eta_h >= 0, "eta_h must be >= 0");
  require(ca_target >= 0, "ca_target must be >= 0");
  require(w_min >= 0, "w_min must be >= 0");
  require(w_min < w_max, "w_min must be below w_max");
  require(neuron.v_rest < v_lth && v_lth < neuron.v_spike,
          "v_lth must lie strictly between v_rest and v_spike");
}

double VoltageUpdate(double v_next, const PlasticityParams& params) {
  if (v_next > params.v_lth) return params.eta_plus;
  if (v_next < params.v_lth) return -params.eta_minus;
  return 0.0;
}

double HomeostaticUpdate(double ca, const PlasticityParams& params) {
  return params.eta_h * (params.ca_target - ca);
}

double TotalUpdate(double w, double v_next, double ca,
                   const PlasticityParams& params) {
  return std::clamp(w + WeightDelta(v_next, ca, params), params.w_min,
                    params.w_max);
}

StabilityReport ValidateStability(const PlasticityParams& params, double t_p,
                                  double t_n, double f) {
  if (!(t_p > 0 && t_n > 0 && f > 0)) {
    throw std::invalid_argument("ValidateStability: t_p, t_n, f must be > 0");
  }
  StabilityReport r;
  r.drift_margin = t_n * params.eta_minus - t_p * params.eta_plus;
  r.retention_margin = params.eta_plus - t_n * f * params.eta_minus;
  r.homeostasis_margin = params.ca_target * params.eta_h - params.eta_minus;

  r.drift_ok = r.drift_margin >= 0;
  r.retention_ok = r.retention_margin > 0;
  r.homeostasis_ok = r.homeostasis_margin >= 0;
  if (r.retention_margin == 0) {
    r.retention_margin = -std::numeric_limits<double>::denorm_min();
  }
  return r;
}

void to_json(nlohmann::json& j, const StabilityReport& r) {
  j = nlohmann::json{
      {"drift_ok", r.drift_ok},
      {"retention_ok", r.retention_ok},
      {"homeostasis_ok", r.homeostasis_ok},
      {"all_ok", r.all_ok()},
      {"margins",
       {{"drift", r.drift_margin},
        {"retention", r.retention_margin},
        {"homeostasis", r.homeostasis_margin}}},
  };
}

}  // namespace memplast
