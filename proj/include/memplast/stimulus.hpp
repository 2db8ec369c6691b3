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
#include <iosfwd>
#include <vector>

#include "memplast/synapse_table.hpp"

namespace memplast {

struct InputSpike {
  NeuronId source = 0;
  double time = 0.0;  // ms, a multiple of the grid step

  friend bool operator==(const InputSpike&, const InputSpike&) = default;
};

// Spike times lie on a dt grid in [0, duration), sorted by time then source,
// with no duplicate (source, time) pair.
struct SpikeTrain {
  std::size_t num_sources = 0;
  double duration = 0.0;
  double dt = 0.1;
  std::vector<InputSpike> spikes;

  // Throws std::invalid_argument if the invariants above do not hold.
  void Validate() const;
};

struct Presentation {
  int pattern_id = 0;
  double onset = 0.0;
  double duration = 0.0;

  friend bool operator==(const Presentation&, const Presentation&) = default;
};

// Ground truth for embedded-pattern streams. `patterns[p]` holds pattern p's
// spikes relative to its onset.
struct PatternSchedule {
  std::vector<Presentation> presentations;
  std::vector<SpikeTrain> patterns;
};

struct EmbeddedStream {
  SpikeTrain train;
  PatternSchedule schedule;
};

struct EmbeddedPatternOptions {
  std::size_t num_sources = 225;
  double pattern_len = 40.0;          // ms
  double pattern_rate = 0.02;         // spikes/ms within a pattern
  double presentation_rate = 0.005;   // presentations/ms
  double noise_rate = 0.02;           // spikes/ms between patterns
  double min_gap = 10.0;              // floor on noise interval, ms
  int num_patterns = 1;
  // Place exactly round(pattern_rate * pattern_len * num_sources) spikes
  // uniformly, i.e. a Poisson pattern conditioned on its nominal count.
  bool exact_pattern_count = true;
};

// Mean noise interval between presentations: 1/presentation_rate -
// pattern_len.
double MeanNoiseInterval(const EmbeddedPatternOptions& opts);

// Independent Poisson processes per source, snapped to the dt grid.
SpikeTrain PoissonTrain(std::size_t num_sources, double rate, double duration,
                        std::uint64_t seed, double dt = 0.1);

// Sources [0, num_sync) copy one master Poisson process at sync_rate; the
// rest fire independently at noise_rate.
SpikeTrain SynchronousGroupStream(std::size_t num_sync, std::size_t num_total,
                                  double sync_rate, double noise_rate,
                                  double duration, std::uint64_t seed,
                                  double dt = 0.1);

// Frozen Poisson fragments inserted between exponentially distributed noise
// intervals. Pattern content, schedule and noise draw from separate streams.
EmbeddedStream EmbeddedPatternStream(const EmbeddedPatternOptions& opts,
                                     double duration, std::uint64_t seed,
                                     double dt = 0.1);

// As above with the pattern content drawn from `content_seed` and the
// schedule and noise from `stream_seed`. Streams sharing a content seed
// present identical patterns.
EmbeddedStream EmbeddedPatternStream(const EmbeddedPatternOptions& opts,
                                     double duration,
                                     std::uint64_t content_seed,
                                     std::uint64_t stream_seed,
                                     double dt = 0.1);

// Train restricted to [t0, t1), shifted so t0 maps to 0.
SpikeTrain Window(const SpikeTrain& train, double t0, double t1);

// Stateless seed derivation for independent streams.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index = 0);

void WriteSpikeTrainCsv(std::ostream& os, const SpikeTrain& train);
SpikeTrain ReadSpikeTrainCsv(std::istream& is, std::size_t num_sources,
                             double duration, double dt);
void WriteScheduleCsv(std::ostream& os, const PatternSchedule& schedule);
std::vector<Presentation> ReadScheduleCsv(std::istream& is);

// Grid helpers shared by generators and the simulator.
inline std::int64_t ToStep(double t, double dt) {
  return static_cast<std::int64_t>(t / dt + 0.5);
}
inline double ToTime(std::int64_t step, double dt) {
  return static_cast<double>(step) * dt;
}

}  // namespace memplast
