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

#include "memplast/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include <fmt/format.h>

namespace memplast {

namespace {

enum Stream : std::uint64_t {
  kPoissonSource = 1,
  kMaster = 2,
  kPatternContent = 3,
  kSchedule = 4,
  kPatternChoice = 5,
};

using Rng = std::mt19937_64;

// Grid steps of one Poisson process in [0, num_steps), deduplicated.
std::vector<std::int64_t> PoissonSteps(double rate, double duration, double dt,
                                       Rng& rng) {
  std::vector<std::int64_t> steps;
  if (rate <= 0) return steps;
  const std::int64_t num_steps = ToStep(duration, dt);
  std::exponential_distribution<double> isi(rate);
  double t = isi(rng);
  while (t < duration) {
    const auto step = static_cast<std::int64_t>(std::floor(t / dt));
    if (step < num_steps && (steps.empty() || steps.back() != step)) {
      steps.push_back(step);
    }
    t += isi(rng);
  }
  return steps;
}

void SortSpikes(std::vector<InputSpike>& spikes) {
  std::sort(spikes.begin(), spikes.end(),
            [](const InputSpike& a, const InputSpike& b) {
              return std::pair(a.time, a.source) < std::pair(b.time, b.source);
            });
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index) {
  // splitmix64 over a mix of the three words
  std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ULL) ^
                    (index * 0xD1B54A32D192ED03ULL);
  for (int round = 0; round < 2; ++round) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
  }
  return z;
}

void SpikeTrain::Validate() const {
  if (!(dt > 0)) throw std::invalid_argument("SpikeTrain: dt must be > 0");
  for (std::size_t k = 0; k < spikes.size(); ++k) {
    const InputSpike& s = spikes[k];
    if (s.source >= num_sources) {
      throw std::invalid_argument(
          fmt::format("SpikeTrain: source {} >= {}", s.source, num_sources));
    }
    if (s.time < 0 || s.time >= duration) {
      throw std::invalid_argument(
          fmt::format("SpikeTrain: time {} outside [0, {})", s.time, duration));
    }
    if (k > 0) {
      const InputSpike& p = spikes[k - 1];
      if (std::pair(p.time, p.source) >= std::pair(s.time, s.source)) {
        throw std::invalid_argument(
            "SpikeTrain: spikes not strictly sorted by (time, source)");
      }
    }
  }
}

double MeanNoiseInterval(const EmbeddedPatternOptions& opts) {
  return 1.0 / opts.presentation_rate - opts.pattern_len;
}

SpikeTrain PoissonTrain(std::size_t num_sources, double rate, double duration,
                        std::uint64_t seed, double dt) {
  if (rate < 0) throw std::invalid_argument("PoissonTrain: rate must be >= 0");
  SpikeTrain train{num_sources, duration, dt, {}};
  for (std::size_t s = 0; s < num_sources; ++s) {
    Rng rng(DeriveSeed(seed, kPoissonSource, s));
    for (std::int64_t step : PoissonSteps(rate, duration, dt, rng)) {
      train.spikes.push_back({static_cast<NeuronId>(s), ToTime(step, dt)});
    }
  }
  SortSpikes(train.spikes);
  return train;
}

SpikeTrain SynchronousGroupStream(std::size_t num_sync, std::size_t num_total,
                                  double sync_rate, double noise_rate,
                                  double duration, std::uint64_t seed,
                                  double dt) {
  if (num_sync > num_total) {
    throw std::invalid_argument("SynchronousGroupStream: num_sync > num_total");
  }
  if (sync_rate < 0 || noise_rate < 0) {
    throw std::invalid_argument("SynchronousGroupStream: rates must be >= 0");
  }
  SpikeTrain train{num_total, duration, dt, {}};
  if (num_sync > 0) {
    Rng master_rng(DeriveSeed(seed, kMaster));
    for (std::int64_t step : PoissonSteps(sync_rate, duration, dt, master_rng)) {
      for (std::size_t s = 0; s < num_sync; ++s) {
        train.spikes.push_back({static_cast<NeuronId>(s), ToTime(step, dt)});
      }
    }
  }
  for (std::size_t s = num_sync; s < num_total; ++s) {
    Rng rng(DeriveSeed(seed, kPoissonSource, s));
    for (std::int64_t step : PoissonSteps(noise_rate, duration, dt, rng)) {
      train.spikes.push_back({static_cast<NeuronId>(s), ToTime(step, dt)});
    }
  }
  SortSpikes(train.spikes);
  return train;
}

EmbeddedStream EmbeddedPatternStream(const EmbeddedPatternOptions& opts,
                                     double duration, std::uint64_t seed,
                                     double dt) {
  return EmbeddedPatternStream(opts, duration, seed, seed, dt);
}

EmbeddedStream EmbeddedPatternStream(const EmbeddedPatternOptions& opts,
                                     double duration,
                                     std::uint64_t content_seed,
                                     std::uint64_t stream_seed, double dt) {
  if (opts.num_patterns < 1) {
    throw std::invalid_argument("EmbeddedPatternStream: need >= 1 pattern");
  }
  if (!(opts.pattern_len > 0) || !(opts.presentation_rate > 0) ||
      opts.presentation_rate * opts.pattern_len >= 1.0) {
    throw std::invalid_argument(
        "EmbeddedPatternStream: presentation_rate * pattern_len must be in "
        "(0, 1)");
  }
  const std::int64_t len_steps = ToStep(opts.pattern_len, dt);
  const std::int64_t total_steps = ToStep(duration, dt);

  EmbeddedStream out;
  PatternSchedule& schedule = out.schedule;

  // Pattern content depends only on (content_seed, pattern id).
  std::vector<std::vector<std::pair<std::int64_t, NeuronId>>> fragments;
  for (int p = 0; p < opts.num_patterns; ++p) {
    SpikeTrain frag{opts.num_sources, ToTime(len_steps, dt), dt, {}};
    std::vector<std::pair<std::int64_t, NeuronId>> steps;
    const std::uint64_t pattern_seed =
        DeriveSeed(content_seed, kPatternContent, p);
    if (opts.exact_pattern_count) {
      // Uniform placement of a fixed count on the (step, source) grid.
      const auto cells = static_cast<std::int64_t>(opts.num_sources) * len_steps;
      const auto target = std::min<std::int64_t>(
          cells, std::llround(opts.pattern_rate * frag.duration *
                              static_cast<double>(opts.num_sources)));
      Rng rng(pattern_seed);
      std::uniform_int_distribution<std::int64_t> cell(0, cells - 1);
      std::set<std::int64_t> taken;
      while (static_cast<std::int64_t>(taken.size()) < target) {
        taken.insert(cell(rng));
      }
      const auto n = static_cast<std::int64_t>(opts.num_sources);
      for (std::int64_t c : taken) {
        steps.emplace_back(c / n, static_cast<NeuronId>(c % n));
      }
    } else {
      for (std::size_t src = 0; src < opts.num_sources; ++src) {
        Rng rng(DeriveSeed(pattern_seed, kPoissonSource, src));
        for (std::int64_t step :
             PoissonSteps(opts.pattern_rate, frag.duration, dt, rng)) {
          steps.emplace_back(step, static_cast<NeuronId>(src));
        }
      }
    }
    std::sort(steps.begin(), steps.end());
    for (auto [step, src] : steps) frag.spikes.push_back({src, ToTime(step, dt)});
    schedule.patterns.push_back(std::move(frag));
    fragments.push_back(std::move(steps));
  }

  // Alternate noise gaps and insertions until the next pattern would not fit.
  Rng gap_rng(DeriveSeed(stream_seed, kSchedule));
  Rng choice_rng(DeriveSeed(stream_seed, kPatternChoice));
  std::exponential_distribution<double> gap(1.0 / MeanNoiseInterval(opts));
  std::uniform_int_distribution<int> pick(0, opts.num_patterns - 1);
  std::vector<std::pair<std::int64_t, int>> onsets;
  std::int64_t cursor = 0;
  while (true) {
    const double g = std::max(opts.min_gap, gap(gap_rng));
    const std::int64_t onset = cursor + ToStep(g, dt);
    if (onset + len_steps > total_steps) break;
    const int id = opts.num_patterns == 1 ? 0 : pick(choice_rng);
    onsets.emplace_back(onset, id);
    schedule.presentations.push_back(
        {id, ToTime(onset, dt), ToTime(len_steps, dt)});
    cursor = onset + len_steps;
  }

  // Noise everywhere outside the presentation windows.
  SpikeTrain& train = out.train;
  train = SpikeTrain{opts.num_sources, duration, dt, {}};
  for (std::size_t s = 0; s < opts.num_sources; ++s) {
    Rng rng(DeriveSeed(stream_seed, kPoissonSource, s));
    auto window = onsets.begin();
    for (std::int64_t step :
         PoissonSteps(opts.noise_rate, duration, dt, rng)) {
      while (window != onsets.end() && window->first + len_steps <= step) {
        ++window;
      }
      const bool inside = window != onsets.end() && step >= window->first;
      if (!inside) {
        train.spikes.push_back({static_cast<NeuronId>(s), ToTime(step, dt)});
      }
    }
  }
  for (auto [onset, id] : onsets) {
    for (auto [step, src] : fragments[id]) {
      train.spikes.push_back({src, ToTime(onset + step, dt)});
    }
  }
  SortSpikes(train.spikes);
  return out;
}

SpikeTrain Window(const SpikeTrain& train, double t0, double t1) {
  const std::int64_t s0 = ToStep(t0, train.dt);
  const std::int64_t s1 = ToStep(t1, train.dt);
  SpikeTrain out{train.num_sources, ToTime(s1 - s0, train.dt), train.dt, {}};
  for (const InputSpike& s : train.spikes) {
    const std::int64_t step = ToStep(s.time, train.dt);
    if (step >= s0 && step < s1) {
      out.spikes.push_back({s.source, ToTime(step - s0, train.dt)});
    }
  }
  return out;
}

void WriteSpikeTrainCsv(std::ostream& os, const SpikeTrain& train) {
  os << "source_id,time_ms\n";
  for (const InputSpike& s : train.spikes) {
    os << fmt::format("{},{:.4f}\n", s.source, s.time);
  }
}

SpikeTrain ReadSpikeTrainCsv(std::istream& is, std::size_t num_sources,
                             double duration, double dt) {
  SpikeTrain train{num_sources, duration, dt, {}};
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      if (line.rfind("source_id", 0) == 0) continue;
    }
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("spike csv: expected source_id,time_ms");
    }
    const auto src = static_cast<NeuronId>(std::stoul(line.substr(0, comma)));
    const double t = std::stod(line.substr(comma + 1));
    train.spikes.push_back({src, ToTime(ToStep(t, dt), dt)});
  }
  SortSpikes(train.spikes);
  train.Validate();
  return train;
}

void WriteScheduleCsv(std::ostream& os, const PatternSchedule& schedule) {
  os << "pattern_id,onset_ms,duration_ms\n";
  for (const Presentation& p : schedule.presentations) {
    os << fmt::format("{},{:.4f},{:.4f}\n", p.pattern_id, p.onset, p.duration);
  }
}

std::vector<Presentation> ReadScheduleCsv(std::istream& is) {
  std::vector<Presentation> out;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      if (line.rfind("pattern_id", 0) == 0) continue;
    }
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw std::invalid_argument("schedule csv: expected three columns");
    }
    out.push_back({std::stoi(line.substr(0, c1)),
                   std::stod(line.substr(c1 + 1, c2 - c1 - 1)),
                   std::stod(line.substr(c2 + 1))});
  }
  return out;
}

}  // namespace memplast
