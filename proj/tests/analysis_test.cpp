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


#include "memplast/analysis.hpp"

#include <cmath>
#include <random>

#include <doctest.h>

namespace memplast {
namespace {

StdpCurve SyntheticCurve(const ExponentialStdpFit& truth, double noise,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  StdpCurve c;
  for (double t = -99.0; t < 100.0; t += 2.0) {
    c.centers.push_back(t);
    c.mean.push_back(ExponentialStdp(truth, t) + n(rng));
    c.stddev.push_back(0.0);
    c.count.push_back(10);
  }
  return c;
}

TEST_CASE("exponential fit recovers a noiseless curve") {
  const ExponentialStdpFit truth{1.0, 20.0, 0.5, 20.0, 0.0, 0.0};
  const auto fit = FitExponentialStdp(SyntheticCurve(truth, 0.0, 1));
  REQUIRE(fit.has_value());
  CHECK(fit->a_plus == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fit->tau_plus == doctest::Approx(20.0).epsilon(0.01));
  CHECK(fit->a_minus == doctest::Approx(0.5).epsilon(0.01));
  CHECK(fit->tau_minus == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("fit residual never exceeds the all-zero residual") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ExponentialStdpFit truth{0.1 * seed, 5.0 + seed, 0.05, 30.0, 0, 0};
    const auto fit = FitExponentialStdp(SyntheticCurve(truth, 0.5, seed));
    REQUIRE(fit.has_value());
    CHECK(fit->residual <= fit->zero_residual);
  }
}

TEST_CASE("all-zero curve reports fit failure") {
  StdpCurve c = SyntheticCurve({0, 1, 0, 1, 0, 0}, 0.0, 1);
  CHECK_FALSE(FitExponentialStdp(c).has_value());
}

UpdateLogEntry Update(double t, NeuronId dst, double dw) {
  UpdateLogEntry e;
  e.time = t;
  e.destination = dst;
  e.dw = dw;
  return e;
}

TEST_CASE("curve bins by pre minus nearest post and clamps to the edges") {
  const std::vector<std::vector<double>> posts{{500.0}};
  const std::vector<UpdateLogEntry> log{
      Update(495.0, 0, 1.0), Update(499.0, 0, 3.0), Update(505.0, 0, -2.0),
      Update(200.0, 0, 7.0), Update(900.0, 0, -7.0)};
  const StdpCurve c = ComputeStdpCurve(log, posts, 10.0, 50.0);
  REQUIRE(c.size() == 10);
  CHECK(c.count[4] == 2);
  CHECK(c.mean[4] == doctest::Approx(2.0));
  CHECK(c.mean[5] == doctest::Approx(-2.0));
  CHECK(c.mean.front() == 7.0);
  CHECK(c.mean.back() == -7.0);
  CHECK(c.GrandMean() == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("curve ignores neurons that never fired") {
  const StdpCurve c = ComputeStdpCurve({Update(5.0, 0, 1.0)}, {{}});
  for (auto n : c.count) CHECK(n == 0);
}

TEST_CASE("curve is invariant under a common time shift") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  std::vector<double> posts;
  for (int i = 0; i < 40; ++i) posts.push_back(u(rng));
  std::sort(posts.begin(), posts.end());
  std::vector<UpdateLogEntry> log;
  for (int i = 0; i < 2000; ++i) log.push_back(Update(u(rng), 0, u(rng) - 2500));
  std::vector<double> posts_shifted = posts;
  for (double& t : posts_shifted) t += 1000.0;
  std::vector<UpdateLogEntry> log_shifted = log;
  for (UpdateLogEntry& e : log_shifted) e.time += 1000.0;
  const StdpCurve a = ComputeStdpCurve(log, {posts});
  const StdpCurve b = ComputeStdpCurve(log_shifted, {posts_shifted});
  CHECK(a.count == b.count);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.mean[i] == doctest::Approx(b.mean[i]));
  }
}

const std::vector<Presentation> kSchedule{
    {0, 100.0, 40.0}, {1, 300.0, 40.0}, {0, 500.0, 40.0}, {1, 700.0, 40.0}};

TEST_CASE("selectivity of spikes inside and outside windows") {
  const std::vector<OutputSpike> inside{{0, 130.0}, {0, 530.0}, {1, 150.0}};
  SelectivityReport r = Selectivity(inside, kSchedule, 1000.0, {0, 1}, 20.0, 0);
  CHECK(r.hit_fraction == 1.0);
  CHECK(r.false_alarm_rate == 0.0);
  CHECK(r.chance == doctest::Approx(0.12));

  const std::vector<OutputSpike> outside{{0, 50.0}, {1, 900.0}};
  r = Selectivity(outside, kSchedule, 1000.0, {0, 1}, 20.0);
  CHECK(r.hit_fraction == 0.0);
  // One spike per neuron outside 760 ms of uncovered time.
  CHECK(r.false_alarm_rate == doctest::Approx(1000.0 / 760.0));
  CHECK(r.neuron_hits == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("random spikes hit at chance level") {
  std::vector<Presentation> sched;
  for (double t = 50.0; t < 99000.0; t += 200.0) sched.push_back({0, t, 40.0});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 100000.0);
  std::vector<OutputSpike> spikes;
  for (int i = 0; i < 5000; ++i) spikes.push_back({0, u(rng)});
  std::sort(spikes.begin(), spikes.end(),
            [](auto& a, auto& b) { return a.time < b.time; });
  const SelectivityReport r = Selectivity(spikes, sched, 100000.0, {0});
  const double sd = std::sqrt(r.chance * (1 - r.chance) / 5000);
  CHECK(std::abs(r.hit_fraction - r.chance) < 5 * sd);
  CHECK(r.chance == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("populations tuned to different patterns are disjoint") {
  PatternSchedule s;
  s.presentations = kSchedule;
  std::vector<OutputSpike> spikes{{0, 120.0}, {0, 520.0}, {1, 320.0},
                                  {1, 720.0}, {1, 730.0}};
  WtaAssignment a = AssignPatterns(spikes, s, 1000.0, {{0}, {1}});
  CHECK(a.disjoint);
  CHECK(a.populations[0].pattern == 0);
  CHECK(a.populations[1].pattern == 1);
  CHECK(a.populations[0].exclusivity == 1.0);

  spikes = {{0, 120.0}, {1, 130.0}, {1, 720.0}, {1, 530.0}};
  a = AssignPatterns(spikes, s, 1000.0, {{0}, {1}});
  CHECK_FALSE(a.disjoint);
  CHECK(a.populations[1].pattern == 0);
  CHECK(a.populations[1].exclusivity == doctest::Approx(1.0 / 3.0));

  a = AssignPatterns({}, s, 1000.0, {{0}, {1}});
  CHECK(a.populations[0].pattern == -1);
  CHECK_FALSE(a.disjoint);
}

TEST_CASE("fraction of spikes near events") {
  const std::vector<OutputSpike> spikes{{0, 10.0}, {0, 16.0}, {1, 98.0}};
  CHECK(FractionNearEvents(spikes, {12.0, 100.0}, 3.0) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(FractionNearEvents({}, {1.0}, 5.0) == 0.0);
}

TEST_CASE("sync weight ratio per neuron") {
  WeightMatrix w{4, 2, {0.8, 0.2, 0.6, 0.2, 0.1, 0.2, 0.3, 0.2}};
  const std::vector<double> r = SyncWeightRatios(w, 2);
  CHECK(r[0] == doctest::Approx(3.5));
  CHECK(r[1] == doctest::Approx(1.0));
}

TEST_CASE("membrane distribution around a post spike") {
  MembraneTrace tr;
  tr.v.assign(1000, -70.0);
  for (std::size_t i = 495; i <= 505; ++i) tr.v[i] = -60.0;
  const VmemDistribution d = ComputeVmemDistribution(tr, {50.0}, 0.1, 2.0);
  CHECK(d.half_width == 20);
  CHECK(d.MeanAt(0.0) == doctest::Approx(-60.0));
  CHECK(d.MeanAt(-1.5) == doctest::Approx(-70.0));
  CHECK(d.samples[0] == 1);
}

}  // namespace
}  // namespace memplast
