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
#include <optional>
#include <vector>

#include "memplast/network.hpp"
#include "memplast/stimulus.hpp"
#include "memplast/synapse_table.hpp"

namespace memplast {

// Binned weight change against dt = t_pre - t_post.
struct StdpCurve {
  double bin_width = 2.0;
  double window = 100.0;
  std::vector<double> centers;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<std::int64_t> count;

  std::size_t size() const { return centers.size(); }
  // Count-weighted mean over all bins.
  double GrandMean() const;
};

// Bins every log entry by dt to the nearest post spike of its destination.
// Entries beyond the window fall into the edge bins; entries whose
// destination never fired are dropped. `post_times[n]` must be ascending.
StdpCurve ComputeStdpCurve(const std::vector<UpdateLogEntry>& log,
                           const std::vector<std::vector<double>>& post_times,
                           double bin_width = 2.0, double window = 100.0);

// Largest |bin mean - grand mean| in standard errors. Bins with fewer than
// two entries are skipped. Assumes independent entries.
double MaxDeviationZ(const StdpCurve& curve);

// Same against a per-bin null spread, e.g. from ShuffledBinSpread. Bins with
// zero spread are skipped.
double MaxDeviationZ(const StdpCurve& curve, const std::vector<double>& spread);

// Replaces every neuron's post spikes by the same number of uniform times on
// [0, duration) and recomputes the curve.
StdpCurve ShuffledPostCurve(const std::vector<UpdateLogEntry>& log,
                            const std::vector<std::vector<double>>& post_times,
                            double duration, std::uint64_t seed,
                            double bin_width = 2.0, double window = 100.0);

// Standard deviation of each bin's mean across `shuffles` independent
// post-spike shuffles. Entries sharing a destination and time step carry the
// same update, so this is the honest null spread for a bin mean.
std::vector<double> ShuffledBinSpread(
    const std::vector<UpdateLogEntry>& log,
    const std::vector<std::vector<double>>& post_times, double duration,
    std::uint64_t seed, int shuffles, double bin_width = 2.0,
    double window = 100.0);

// A_plus * exp(dt / tau_plus) for dt < 0, -A_minus * exp(-dt / tau_minus)
// for dt > 0.
struct ExponentialStdpFit {
  double a_plus = 0.0;
  double tau_plus = 0.0;
  double a_minus = 0.0;
  double tau_minus = 0.0;
  double residual = 0.0;       // count-weighted sum of squares
  double zero_residual = 0.0;  // same with all parameters zero
};

double ExponentialStdp(const ExponentialStdpFit& fit, double dt);

// Count-weighted least squares on bin means. Empty when either side has
// fewer than three populated bins or every populated mean is zero.
std::optional<ExponentialStdpFit> FitExponentialStdp(const StdpCurve& curve,
                                                     double tau_lo = 0.5,
                                                     double tau_hi = 500.0);

// Potential aligned to post spikes, sampled at the trace resolution.
struct VmemDistribution {
  double dt = 0.1;
  std::int64_t half_width = 0;  // offsets run from -half_width to half_width
  double v_lo = -80.0;
  double v_bin = 1.0;
  std::size_t v_bins = 0;
  std::vector<double> mean;             // per offset
  std::vector<std::int64_t> samples;    // per offset
  std::vector<std::int64_t> histogram;  // offset-major, v_bins per offset

  bool empty() const { return mean.empty(); }
  double OffsetTime(std::size_t i) const {
    return ToTime(static_cast<std::int64_t>(i) - half_width, dt);
  }
  // Mean potential at the offset closest to `t` ms from the spike.
  double MeanAt(double t) const;
};

VmemDistribution ComputeVmemDistribution(const MembraneTrace& trace,
                                         const std::vector<double>& post_times,
                                         double dt, double window,
                                         double v_lo = -80.0,
                                         double v_hi = -50.0,
                                         double v_bin = 1.0);

struct SelectivityReport {
  double lag = 20.0;
  double chance = 0.0;  // fraction of time covered by windows
  double hit_fraction = 0.0;
  double false_alarm_rate = 0.0;  // Hz per neuron outside windows
  std::int64_t spikes = 0;
  std::int64_t hits = 0;
  std::vector<NeuronId> neurons;
  std::vector<std::int64_t> neuron_spikes;
  std::vector<std::int64_t> neuron_hits;
  std::vector<double> neuron_hit_fraction;
  std::vector<double> neuron_false_alarm_rate;
};

// Windows are [onset, onset + duration + lag], clipped to the record. Only
// presentations of `pattern_id` count when it is given. A population with no
// spikes has hit fraction 0.
SelectivityReport Selectivity(const std::vector<OutputSpike>& spikes,
                              const std::vector<Presentation>& presentations,
                              double duration,
                              const std::vector<NeuronId>& neurons,
                              double lag = 20.0,
                              std::optional<int> pattern_id = std::nullopt);

struct PopulationAssignment {
  int pattern = -1;  // -1 when the top two rates tie
  double exclusivity = 0.0;
  std::vector<double> rates;  // Hz per neuron inside each pattern's windows
};

struct WtaAssignment {
  std::vector<PopulationAssignment> populations;
  bool disjoint = false;  // all assigned, no pattern shared
};

WtaAssignment AssignPatterns(const std::vector<OutputSpike>& spikes,
                             const PatternSchedule& schedule, double duration,
                             const std::vector<std::vector<NeuronId>>& populations,
                             double lag = 20.0);

// Per-neuron mean weight of rows [0, num_sync) over rows [num_sync, rows).
std::vector<double> SyncWeightRatios(const WeightMatrix& weights,
                                     std::size_t num_sync);

// Fraction of spikes within `tolerance` ms of an event. `events` ascending.
double FractionNearEvents(const std::vector<OutputSpike>& spikes,
                          const std::vector<double>& events, double tolerance);

// Mean over destinations of final minus initial weight, restricted to
// sources in `sources`.
double MeanWeightChange(const WeightMatrix& before, const WeightMatrix& after,
                        const std::vector<NeuronId>& sources);

// Sources that emit no spike inside any pattern of the schedule.
std::vector<NeuronId> SourcesOutsidePatterns(const PatternSchedule& schedule,
                                             std::size_t num_sources);

}  // namespace memplast
