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


#include "memplast/experiments.hpp"

#include <doctest.h>

namespace memplast {
namespace {

using nlohmann::json;

constexpr ExperimentKind kKinds[] = {
    ExperimentKind::kStdpEquivalence, ExperimentKind::kCoincidence,
    ExperimentKind::kHiddenPattern, ExperimentKind::kMultiPattern,
    ExperimentKind::kCheckStability};

TEST_CASE("experiment names round-trip") {
  for (ExperimentKind k : kKinds) {
    CHECK(ParseExperimentKind(ExperimentName(k)) == k);
  }
  CHECK_FALSE(ParseExperimentKind("stdp").has_value());
}

TEST_CASE("defaults validate and satisfy the stability inequalities") {
  for (ExperimentKind k : kKinds) {
    CAPTURE(ExperimentName(k));
    const ExperimentConfig c = DefaultConfig(k);
    CHECK_NOTHROW(c.Validate());
    CHECK(StabilityFor(c).all_ok());
  }
}

TEST_CASE("empty config yields the defaults") {
  const ExperimentConfig c =
      ConfigFromJson(json::object(), ExperimentKind::kCoincidence);
  CHECK(ConfigToJson(c) ==
        ConfigToJson(DefaultConfig(ExperimentKind::kCoincidence)));
}

TEST_CASE("config echo round-trips") {
  json j{{"seed", 42}, {"eta_plus", 0.002}, {"membrane_neurons", {1, 2}},
         {"decay", "euler"}, {"write_updates", false}};
  const ExperimentConfig c = ConfigFromJson(j, ExperimentKind::kHiddenPattern);
  CHECK(c.seed == 42);
  CHECK(c.plasticity.eta_plus == 0.002);
  CHECK(c.neuron.decay == DecayMode::kEuler);
  const json echo = ConfigToJson(c);
  CHECK(echo.at("experiment") == "hidden-pattern");
  CHECK(ConfigToJson(ConfigFromJson(echo, ExperimentKind::kHiddenPattern)) ==
        echo);
}

TEST_CASE("unknown keys, wrong types and mismatched experiments are rejected") {
  const auto kind = ExperimentKind::kHiddenPattern;
  CHECK_THROWS_AS(ConfigFromJson(json{{"eta_plsu", 0.1}}, kind), ConfigError);
  CHECK_THROWS_AS(ConfigFromJson(json{{"eta_plus", "big"}}, kind),
                  ConfigError);
  CHECK_THROWS_AS(ConfigFromJson(json{{"num_neurons", -3}}, kind),
                  ConfigError);
  CHECK_THROWS_AS(ConfigFromJson(json{{"decay", "rk4"}}, kind), ConfigError);
  CHECK_THROWS_AS(ConfigFromJson(json{{"experiment", "coincidence"}}, kind),
                  ConfigError);
  CHECK_THROWS_AS(ConfigFromJson(json::array(), kind), ConfigError);
}

TEST_CASE("invalid values fail validation") {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kHiddenPattern);
  c.duration = 0.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = DefaultConfig(ExperimentKind::kHiddenPattern);
  c.plasticity.v_lth = -40.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = DefaultConfig(ExperimentKind::kMultiPattern);
  c.num_populations = 1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("stability arguments derive from the stimulus") {
  const ExperimentConfig c = DefaultConfig(ExperimentKind::kHiddenPattern);
  CHECK(c.EffectiveTp() == doctest::Approx(40.0));
  CHECK(c.EffectiveTn() == doctest::Approx(160.0));
  CHECK(c.EffectiveF() == doctest::Approx(0.02));
}

TEST_CASE("check-stability reports each inequality") {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kCheckStability);
  ExperimentResult r = RunExperiment(c);
  CHECK(r.all_pass());
  REQUIRE(r.criteria.size() == 3);
  c.plasticity.eta_minus = 0.1 * c.plasticity.eta_plus;
  r = RunExperiment(c);
  CHECK_FALSE(r.all_pass());
  CHECK_FALSE(r.stability.drift_ok);
}

TEST_CASE("short runs are reproducible in memory") {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kCoincidence);
  c.duration = 3000.0;
  c.probe_duration = 1000.0;
  c.num_neurons = 4;
  const ExperimentResult a = RunExperiment(c);
  const ExperimentResult b = RunExperiment(c);
  CHECK(a.metrics == b.metrics);
}

}  // namespace
}  // namespace memplast
