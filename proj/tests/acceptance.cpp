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


// Runs the seven acceptance criteria and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria (capped at 1).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "memplast/experiments.hpp"
#include "memplast/neuron.hpp"
#include "memplast/plasticity.hpp"
#include "memplast/stimulus.hpp"

namespace {

using namespace memplast;
namespace fs = std::filesystem;

constexpr int kSeeds = 10;

struct Line {
  std::string name;
  bool pass = false;
  std::string detail;
};

void Report(const Line& l) {
  fmt::print("criterion {:<28} {}  {}\n", l.name, l.pass ? "PASS" : "FAIL",
             l.detail);
  std::fflush(stdout);
}

// Runs `kind` on seeds 1..kSeeds; returns the per-seed pass string.
std::string SeedSweep(ExperimentKind kind, int& passes) {
  std::string marks;
  passes = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    ExperimentConfig c = DefaultConfig(kind);
    c.seed = static_cast<std::uint64_t>(seed);
    const bool ok = RunExperiment(c).all_pass();
    passes += ok;
    marks += ok ? '1' : '0';
  }
  return marks;
}

Line StdpEquivalence() {
  const ExperimentConfig c = DefaultConfig(ExperimentKind::kStdpEquivalence);
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult r = RunExperiment(c);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  std::string failed;
  for (const Criterion& k : r.criteria) {
    if (!k.pass) failed += " " + k.name;
  }
  return {"1 stdp-equivalence", r.all_pass() && secs < 60.0 &&
                                    c.duration >= 100000.0,
          fmt::format("{:.1f} s, {} criteria{}", secs, r.criteria.size(),
                      failed.empty() ? "" : ", failed:" + failed)};
}

Line SeedCriterion(const char* name, ExperimentKind kind, int need) {
  int passes = 0;
  const std::string marks = SeedSweep(kind, passes);
  return {name, passes >= need,
          fmt::format("{}/{} seeds (need {}) [{}]", passes, kSeeds, need,
                      marks)};
}

Line Stability() {
  std::mt19937_64 rng(20260);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int agree = 0;
  const int sets = 1000;
  for (int i = 0; i < sets; ++i) {
    PlasticityParams p;
    p.eta_plus = std::pow(10.0, -4.0 + 4.0 * u(rng));
    p.eta_minus = p.eta_plus * (0.05 + 0.5 * u(rng));
    p.ca_target = 0.0005 + 0.02 * u(rng);
    p.eta_h = p.eta_minus / p.ca_target * (0.5 + u(rng));
    const double t_p = 5 + 95 * u(rng);
    const double t_n = 20 + 400 * u(rng);
    const double f = 0.001 + 0.05 * u(rng);
    const StabilityReport r = ValidateStability(p, t_p, t_n, f);
    const bool drift = t_p * p.eta_plus <= t_n * p.eta_minus;
    const bool retention = p.eta_plus > t_n * f * p.eta_minus;
    const bool homeostasis = p.eta_minus <= p.ca_target * p.eta_h;
    agree += r.drift_ok == drift && r.retention_ok == retention &&
             r.homeostasis_ok == homeostasis;
  }

  // Drift violated, homeostasis still satisfied.
  ExperimentConfig c = DefaultConfig(ExperimentKind::kHiddenPattern);
  c.plasticity.eta_minus = 0.05 * c.plasticity.eta_plus;
  c.plasticity.eta_h = 0.1;
  const ExperimentResult r = RunExperiment(c);
  const bool violated = !r.stability.drift_ok && r.stability.homeostasis_ok;
  const double dw = r.metrics.value("uncorrelated_weight_change", 0.0);
  return {"5 stability",
          agree == sets && violated && !r.all_pass() && dw > 0.0,
          fmt::format("oracle agreement {}/{}; eta_minus = 0.05 eta_plus: "
                      "drift {}, hidden-pattern {}, uncorrelated dw {:+.3f}",
                      agree, sets, violated ? "violated" : "holds",
                      r.all_pass() ? "passes" : "fails", dw)};
}

Line MemoryAccess() {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kHiddenPattern);
  c.audit_memory = true;
  const ExperimentResult r = RunExperiment(c);
  bool ok = false;
  for (const Criterion& k : r.criteria) {
    if (k.name == "memory_access") ok = k.pass;
  }
  const auto& a = r.metrics.at("memory_audit");
  return {"6 memory-access", ok,
          fmt::format("{} visits, {} reads, {} writes, {} untriggered, {} "
                      "degree mismatches",
                      a.value("visits", 0), a.value("reads", 0),
                      a.value("writes", 0), a.value("untriggered_accesses", -1),
                      a.value("degree_mismatches", -1))};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Line Numerics() {
  NeuronParams p;
  const double dt = 0.1;
  const NeuronStepper stepper(p, dt);

  double worst_g = 0.0, worst_ca = 0.0;
  NeuronState s = NeuronState::AtRest(p);
  s = stepper.Integrate(s, 1.0, 0.0, 0.0).state;
  s = stepper.Calcium(s, true);
  for (int k = 1; k <= 5 * static_cast<int>(p.tau_s / dt); ++k) {
    worst_g = std::max(worst_g,
                       std::abs(s.g_e / std::exp(-k * dt / p.tau_s) - 1.0));
    s = stepper.Integrate(s, 0.0, 0.0, k * dt).state;
  }
  s = NeuronState{};
  s = stepper.Calcium(s, true);
  for (int k = 1; k <= 5 * static_cast<int>(p.tau_ca / dt); ++k) {
    const double expected = std::exp(-k * dt / p.tau_ca) / p.tau_ca;
    s = stepper.Calcium(s, false);
    worst_ca = std::max(worst_ca, std::abs(s.ca / expected - 1.0));
  }

  // Calcium mean against the firing rate of a Poisson-driven neuron.
  const SpikeTrain in = PoissonTrain(225, 0.02, 100000.0, 3, dt);
  std::vector<double> w(225);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (double& x : w) x = u(rng);
  s = NeuronState::AtRest(p);
  std::size_t next = 0, spikes = 0;
  double ca_sum = 0.0;
  const auto steps = ToStep(in.duration, dt);
  for (std::int64_t k = 0; k < steps; ++k) {
    double exc = 0.0;
    while (next < in.spikes.size() && ToStep(in.spikes[next].time, dt) == k) {
      exc += w[in.spikes[next++].source];
    }
    const StepResult r = stepper.Integrate(s, exc, 0.0, ToTime(k, dt));
    s = stepper.Calcium(r.state, r.spiked);
    spikes += r.spiked;
    ca_sum += s.ca;
  }
  const double rate = static_cast<double>(spikes) / in.duration;
  const double ca_mean = ca_sum / static_cast<double>(steps);
  const double ca_err = rate > 0 ? std::abs(ca_mean / rate - 1.0) : 1.0;

  // Byte-exact outputs across two seeded runs.
  const fs::path root = fs::temp_directory_path() / "memplast_acceptance";
  fs::remove_all(root);
  ExperimentConfig c = DefaultConfig(ExperimentKind::kHiddenPattern);
  c.seed = 3;
  RunExperiment(c, root / "a");
  RunExperiment(c, root / "b");
  bool identical = true;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    identical &= Slurp(e.path()) == Slurp(root / "b" / e.path().filename());
    ++files;
  }
  fs::remove_all(root);

  const bool ok = worst_g < 0.01 && worst_ca < 0.01 && ca_err < 0.1 &&
                  identical && files > 0 && spikes > 0;
  return {"7 numerics-determinism", ok,
          fmt::format("g_e err {:.2e}, ca err {:.2e}, ca mean {:.4f} vs rate "
                      "{:.4f} spikes/ms ({:.1f}%), {} files {}",
                      worst_g, worst_ca, ca_mean, rate, 100 * ca_err, files,
                      identical ? "identical" : "differ")};
}

}  // namespace

int main() {
  std::vector<Line> lines;
  auto add = [&](Line l) {
    Report(l);
    lines.push_back(std::move(l));
  };
  add(StdpEquivalence());
  add(SeedCriterion("2 coincidence", ExperimentKind::kCoincidence, 9));
  add(SeedCriterion("3 hidden-pattern", ExperimentKind::kHiddenPattern, 8));
  add(SeedCriterion("4 multi-pattern", ExperimentKind::kMultiPattern, 7));
  add(Stability());
  add(MemoryAccess());
  add(Numerics());
  int failed = 0;
  for (const Line& l : lines) failed += !l.pass;
  fmt::print("{} of {} criteria passed\n", lines.size() - failed,
             lines.size());
  return failed == 0 ? 0 : 1;
}
