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
#include <limits>
#include <vector>

#include "memplast/neuron.hpp"
#include "memplast/plasticity.hpp"
#include "memplast/stimulus.hpp"
#include "memplast/synapse_table.hpp"

namespace memplast {

struct RecordingOptions {
  bool spikes = true;
  std::vector<NeuronId> membrane;  // neurons whose potential is sampled
  double snapshot_every = 0.0;     // ms; 0 records only start and end
  bool hypothetical_updates = false;
};

struct SimConfig {
  double dt = 0.1;
  double duration = 1000.0;
  std::uint64_t seed = 1;
  NeuronParams neuron;
  PlasticityParams plasticity;
  bool learning = true;
  RecordingOptions record;

  void Validate() const;
};

// Fixed recurrent connectivity. Weights in `inhibitory` drive g_i.
struct RecurrentTables {
  SynapseTable excitatory;
  SynapseTable inhibitory;
};

struct Network {
  std::size_t num_inputs = 0;
  std::size_t num_neurons = 0;
  SynapseTable feedforward;  // inputs -> neurons, plastic
  RecurrentTables recurrent;  // neurons -> neurons, fixed
  // Neuron ids of each population; one entry for unstructured networks.
  std::vector<std::vector<NeuronId>> populations;

  void Validate() const;
};

// Fully connected feed-forward network with weights
// w_lo + (w_hi - w_lo) * u^power, u uniform on [0, 1). power = 1 gives a
// uniform spread; larger powers skew towards w_lo.
Network MakeFeedForward(std::size_t num_inputs, std::size_t num_neurons,
                        double w_lo, double w_hi, std::uint64_t seed,
                        double power = 1.0);

// Within-population all-to-all excitation (no self loops) and
// across-population all-to-all inhibition. Populations get consecutive ids.
RecurrentTables BuildWta(const std::vector<std::size_t>& population_sizes,
                         double w_self_exc, double w_mutual_inh);

struct OutputSpike {
  NeuronId neuron = 0;
  double time = 0.0;

  friend bool operator==(const OutputSpike&, const OutputSpike&) = default;
};

// Sample k is the potential at step k (time k * dt). Spike steps hold
// v_spike.
struct MembraneTrace {
  NeuronId neuron = 0;
  std::vector<double> v;

  friend bool operator==(const MembraneTrace&, const MembraneTrace&) = default;
};

struct WeightSnapshot {
  double time = 0.0;
  WeightMatrix weights;
};

struct UpdateLogEntry {
  double time = 0.0;
  NeuronId source = 0;
  NeuronId destination = 0;
  double dw = 0.0;
  // t_pre - t_post for the destination's nearest spike; NaN if it never
  // fired.
  double dt_to_nearest_post = std::numeric_limits<double>::quiet_NaN();
};

struct SimRecord {
  double dt = 0.1;
  double duration = 0.0;
  std::size_t num_neurons = 0;
  std::vector<OutputSpike> spikes;
  std::vector<MembraneTrace> membrane;
  std::vector<WeightSnapshot> snapshots;
  std::vector<UpdateLogEntry> updates;
  std::int64_t plasticity_evaluations = 0;

  // Spike times per neuron, ascending.
  std::vector<std::vector<double>> SpikeTimesByNeuron() const;
};

// Steps the network through `stimulus`. Per step: gather input spikes,
// deliver feed-forward and (previous-step) recurrent input, integrate all
// neurons, apply the learning rule to the fan-out of every input spike, then
// queue output spikes for recurrent delivery on the next step. `network`'s
// feed-forward weights are updated in place when learning is enabled.
// Throws NumericalFault with the step index on blow-up.
SimRecord Run(Network& network, const SpikeTrain& stimulus,
              const SimConfig& config);

// Run with weights frozen, additionally logging the weight change the rule
// would have made for every (input spike, synapse) pair. The log carries
// the distance to the destination's nearest output spike.
SimRecord RecordHypotheticalUpdates(Network& network,
                                    const SpikeTrain& stimulus,
                                    SimConfig config);

// t_pre - t_post to the nearest entry of `sorted_posts`; ties go to the
// earlier post. NaN when there are no posts.
double NearestPostDelta(const std::vector<double>& sorted_posts, double t_pre);

// Fills dt_to_nearest_post on every log entry.
void AnnotateNearestPost(SimRecord& record);

void WriteSpikesCsv(std::ostream& os, const std::vector<OutputSpike>& spikes);
void WriteMembraneCsv(std::ostream& os, const SimRecord& record);
void WriteUpdatesCsv(std::ostream& os, const SimRecord& record);

}  // namespace memplast
