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


#include "memplast/synapse_table.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <doctest.h>

namespace memplast {
namespace {

std::vector<Edge> DenseEdges(std::size_t sources, std::size_t dests,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (NeuronId s = 0; s < sources; ++s) {
    for (NeuronId d = 0; d < dests; ++d) edges.push_back({s, d, u(rng)});
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

TEST_CASE("dense 225 x 40 table stores 9000 synapses") {
  const SynapseTable t = SynapseTable::Build(225, 40, DenseEdges(225, 40, 1));
  CHECK(t.size() == 9000);
  CHECK(t.num_sources() == 225);
  CHECK(t.num_destinations() == 40);
  for (NeuronId s = 0; s < 225; ++s) {
    REQUIRE(t.out_degree(s) == 40);
    const auto fan = t.fanout(s);
    for (std::size_t k = 1; k < fan.size(); ++k) {
      CHECK(fan[k - 1].destination < fan[k].destination);
    }
  }
}

TEST_CASE("sparse fan-out lists only the listed destinations") {
  const SynapseTable t = SynapseTable::Build(
      3, 4, {{0, 3, 0.1}, {0, 1, 0.2}, {2, 0, 0.3}});
  CHECK(t.out_degree(0) == 2);
  CHECK(t.out_degree(1) == 0);
  CHECK(t.out_degree(2) == 1);
  CHECK(t.fanout(0)[0].destination == 1);
  CHECK(t.fanout(0)[1].weight == 0.1);
}

TEST_CASE("duplicate pairs and bad edges are rejected") {
  CHECK_THROWS_AS(SynapseTable::Build(2, 2, {{0, 1, 0.1}, {0, 1, 0.2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SynapseTable::Build(2, 2, {{2, 0, 0.1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SynapseTable::Build(2, 2, {{0, 0, 1.5}}),
                  std::invalid_argument);
}

TEST_CASE("visitor touches exactly the fan-out and writes back") {
  SynapseTable t = SynapseTable::Build(225, 40, DenseEdges(225, 40, 2));
  std::set<NeuronId> seen;
  t.OnPreSpike(7, [&](SynapseHandle h) {
    seen.insert(h.destination());
    h.set_weight(0.25);
  });
  CHECK(seen.size() == 40);
  for (const Synapse& s : t.fanout(7)) CHECK(s.weight == 0.25);
  CHECK(t.fanout(8)[0].weight != 0.25);
}

TEST_CASE("snapshot round-trips through the table and CSV") {
  const SynapseTable t =
      SynapseTable::Build(5, 3, {{0, 0, 0.5}, {1, 2, 0.125}, {4, 1, 1.0}});
  const WeightMatrix m = t.Snapshot();
  CHECK(m.rows == 5);
  CHECK(m.cols == 3);
  CHECK(std::isnan(m.at(0, 1)));
  CHECK(m.at(1, 2) == 0.125);

  const WeightMatrix again = SynapseTable::FromSnapshot(m).Snapshot();
  std::stringstream ss;
  WriteWeightsCsv(ss, m);
  const WeightMatrix parsed = ReadWeightsCsv(ss);
  for (const WeightMatrix* other : {&again, &parsed}) {
    REQUIRE(other->values.size() == m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      if (std::isnan(m.values[i])) {
        CHECK(std::isnan(other->values[i]));
      } else {
        CHECK(other->values[i] == m.values[i]);
      }
    }
  }
}

void Drive(SynapseTable& t, AccessTrace& trace, bool note) {
  t.AttachTrace(&trace);
  for (int step = 0; step < 50; ++step) {
    trace.set_time(step * 0.1);
    for (NeuronId s = static_cast<NeuronId>(step % 3); s < t.num_sources();
         s += 7) {
      if (note) trace.NotePreSpike(s);
      t.OnPreSpike(s, [](SynapseHandle h) { h.set_weight(h.weight() * 0.5); });
    }
  }
}

TEST_CASE("trace audit passes for presynaptic-triggered visits") {
  for (TraceMode mode : {TraceMode::kRecord, TraceMode::kStream}) {
    SynapseTable t = SynapseTable::Build(30, 10, DenseEdges(30, 10, 3));
    AccessTrace trace(mode);
    Drive(t, trace, true);
    const TraceAudit a = trace.Audit();
    CHECK(a.ok());
    CHECK(a.visits > 0);
    CHECK(a.reads == a.visits * 10);
    CHECK(a.writes == a.visits * 10);
    CHECK((mode == TraceMode::kStream) == trace.accesses().empty());
  }
}

TEST_CASE("trace audit flags accesses without a presynaptic spike") {
  for (TraceMode mode : {TraceMode::kRecord, TraceMode::kStream}) {
    SynapseTable t = SynapseTable::Build(30, 10, DenseEdges(30, 10, 4));
    AccessTrace trace(mode);
    Drive(t, trace, false);
    CHECK(trace.Audit().untriggered_accesses > 0);
    CHECK_FALSE(trace.Audit().ok());
  }
}

TEST_CASE("trace audit flags a visit that misses part of the fan-out") {
  for (TraceMode mode : {TraceMode::kRecord, TraceMode::kStream}) {
    AccessTrace trace(mode);
    trace.set_time(1.0);
    trace.NotePreSpike(0);
    trace.LogAccess(AccessKind::kRead, 0, 0);
    trace.LogVisit(0, 2, 0);
    CHECK(trace.Audit().degree_mismatches == 1);
  }
}

}  // namespace
}  // namespace memplast
