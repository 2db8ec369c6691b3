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

#include "memplast/network.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace memplast {

void SimConfig::Validate() const {
  if (!(dt > 0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (!(duration > 0)) {
    throw std::invalid_argument("SimConfig: duration must be > 0");
  }
  if (record.snapshot_every < 0) {
    throw std::invalid_argument("SimConfig: snapshot_every must be >= 0");
  }
  if (record.snapshot_every > 0) {
    const double ratio = record.snapshot_every / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1) {
      throw std::invalid_argument(
          "SimConfig: snapshot_every must be a positive multiple of dt");
    }
  }
  neuron.Validate();
  plasticity.Validate(neuron);
}

void Network::Validate() const {
  if (feedforward.num_sources() != num_inputs ||
      feedforward.num_destinations() != num_neurons) {
    throw std::invalid_argument("Network: feed-forward table shape mismatch");
  }
  for (const SynapseTable* t : {&recurrent.excitatory, &recurrent.inhibitory}) {
    if (t->num_sources() > 0 && (t->num_sources() != num_neurons ||
                          t->num_destinations() != num_neurons)) {
      throw std::invalid_argument("Network: recurrent table shape mismatch");
    }
  }
}

Network MakeFeedForward(std::size_t num_inputs, std::size_t num_neurons,
                        double w_lo, double w_hi, std::uint64_t seed,
                        double power) {
  if (!(w_lo <= w_hi) || w_lo < 0) {
    throw std::invalid_argument("MakeFeedForward: need 0 <= w_lo <= w_hi");
  }
  if (!(power > 0)) {
    throw std::invalid_argument("MakeFeedForward: power must be > 0");
  }
  std::mt19937_64 rng(DeriveSeed(seed, 0x57e1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    const double u = unit(rng);
    return w_lo + (w_hi - w_lo) * (power == 1.0 ? u : std::pow(u, power));
  };
  std::vector<Edge> edges;
  edges.reserve(num_inputs * num_neurons);
  for (std::size_t s = 0; s < num_inputs; ++s) {
    for (std::size_t d = 0; d < num_neurons; ++d) {
      const double w = w_lo == w_hi ? w_lo : draw();
      edges.push_back({static_cast<NeuronId>(s), static_cast<NeuronId>(d), w});
    }
  }
  Network net;
  net.num_inputs = num_inputs;
  net.num_neurons = num_neurons;
  net.feedforward =
      SynapseTable::Build(num_inputs, num_neurons, std::move(edges), 0.0,
                          std::max(w_hi, 1.0));
  net.recurrent.excitatory = SynapseTable::Build(num_neurons, num_neurons, {});
  net.recurrent.inhibitory = SynapseTable::Build(num_neurons, num_neurons, {});
  std::vector<NeuronId> all(num_neurons);
  for (std::size_t i = 0; i < num_neurons; ++i) all[i] = static_cast<NeuronId>(i);
  net.populations.push_back(std::move(all));
  return net;
}

RecurrentTables BuildWta(const std::vector<std::size_t>& population_sizes,
                         double w_self_exc, double w_mutual_inh) {
  if (w_self_exc < 0 || w_mutual_inh < 0) {
    throw std::invalid_argument("BuildWta: weights must be >= 0");
  }
  std::vector<std::size_t> first{0};
  for (std::size_t n : population_sizes) first.push_back(first.back() + n);
  const std::size_t total = first.back();

  std::vector<Edge> exc;
  std::vector<Edge> inh;
  for (std::size_t p = 0; p < population_sizes.size(); ++p) {
    for (std::size_t s = first[p]; s < first[p + 1]; ++s) {
      for (std::size_t q = 0; q < population_sizes.size(); ++q) {
        for (std::size_t d = first[q]; d < first[q + 1]; ++d) {
          const auto src = static_cast<NeuronId>(s);
          const auto dst = static_cast<NeuronId>(d);
          if (p == q) {
            if (s != d) exc.push_back({src, dst, w_self_exc});
          } else {
            inh.push_back({src, dst, w_mutual_inh});
          }
        }
      }
    }
  }
  const double w_top = std::max({w_self_exc, w_mutual_inh, 1.0});
  return {SynapseTable::Build(total, total, std::move(exc), 0.0, w_top),
          SynapseTable::Build(total, total, std::move(inh), 0.0, w_top)};
}

std::vector<std::vector<double>> SimRecord::SpikeTimesByNeuron() const {
  std::vector<std::vector<double>> out(num_neurons);
  for (const OutputSpike& s : spikes) out[s.neuron].push_back(s.time);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

SimRecord Run(Network& network, const SpikeTrain& stimulus,
              const SimConfig& config) {
  config.Validate();
  network.Validate();
  for (const InputSpike& s : stimulus.spikes) {
    if (s.source >= network.num_inputs) {
      throw std::invalid_argument(fmt::format(
          "Run: stimulus source {} >= input size {}", s.source,
          network.num_inputs));
    }
  }

  const double dt = config.dt;
  const std::size_t n = network.num_neurons;
  const std::int64_t num_steps = ToStep(config.duration, dt);
  const std::int64_t snapshot_steps =
      config.record.snapshot_every > 0 ? ToStep(config.record.snapshot_every, dt)
                                       : 0;
  const PlasticityParams& rule = config.plasticity;
  const bool visit_for_rule =
      config.learning || config.record.hypothetical_updates;

  const NeuronStepper stepper(config.neuron, dt);
  std::vector<NeuronState> states(n, NeuronState::AtRest(config.neuron));
  std::vector<double> exc_in(n);
  std::vector<double> inh_in(n);
  std::vector<double> v_next(n);
  std::vector<NeuronId> fired_prev;
  std::vector<NeuronId> fired_now;
  std::vector<std::pair<NeuronId, int>> inputs;

  SimRecord record;
  record.dt = dt;
  record.duration = config.duration;
  record.num_neurons = n;
  for (NeuronId id : config.record.membrane) {
    if (id >= n) throw std::invalid_argument("Run: membrane id out of range");
    record.membrane.push_back({id, {}});
    record.membrane.back().v.reserve(static_cast<std::size_t>(num_steps));
  }
  record.snapshots.push_back({0.0, network.feedforward.Snapshot()});

  SynapseTable& ff = network.feedforward;
  SynapseTable& rec_exc = network.recurrent.excitatory;
  SynapseTable& rec_inh = network.recurrent.inhibitory;

  std::size_t cursor = 0;
  const auto& spikes = stimulus.spikes;
  for (std::int64_t step = 0; step < num_steps; ++step) {
    const double t = ToTime(step, dt);

    // (1) input spikes of this step; repeated sources merge into a count
    inputs.clear();
    while (cursor < spikes.size() && ToStep(spikes[cursor].time, dt) <= step) {
      if (ToStep(spikes[cursor].time, dt) == step) {
        const NeuronId src = spikes[cursor].source;
        auto it = std::find_if(inputs.begin(), inputs.end(),
                               [src](const auto& p) { return p.first == src; });
        if (it == inputs.end()) {
          inputs.emplace_back(src, 1);
        } else {
          ++it->second;
        }
      }
      ++cursor;
    }
    if (AccessTrace* tr = ff.trace()) {
      tr->set_time(t);
      for (const auto& [src, count] : inputs) tr->NotePreSpike(src);
    }
    for (SynapseTable* table : {&rec_exc, &rec_inh}) {
      if (AccessTrace* tr = table->trace()) {
        tr->set_time(t);
        for (NeuronId src : fired_prev) tr->NotePreSpike(src);
      }
    }

    // (2) conductance input
    std::fill(exc_in.begin(), exc_in.end(), 0.0);
    std::fill(inh_in.begin(), inh_in.end(), 0.0);
    for (const auto& [src, count] : inputs) {
      const double c = count;
      ff.OnPreSpike(src, [&](SynapseHandle& h) {
        exc_in[h.destination()] += c * h.weight();
      });
    }
    if (rec_exc.num_sources() > 0) {
      for (NeuronId src : fired_prev) {
        rec_exc.OnPreSpike(src, [&](SynapseHandle& h) {
          exc_in[h.destination()] += h.weight();
        });
      }
    }
    if (rec_inh.num_sources() > 0) {
      for (NeuronId src : fired_prev) {
        rec_inh.OnPreSpike(src, [&](SynapseHandle& h) {
          inh_in[h.destination()] += h.weight();
        });
      }
    }

    // (3) neuron dynamics
    fired_now.clear();
    try {
      for (std::size_t i = 0; i < n; ++i) {
        const StepResult r = stepper.Integrate(states[i], exc_in[i], inh_in[i], t);
        states[i] = stepper.Calcium(r.state, r.spiked);
        v_next[i] = r.v_integrated;
        if (r.spiked) fired_now.push_back(static_cast<NeuronId>(i));
      }
    } catch (const NumericalFault& e) {
      throw NumericalFault(fmt::format("step {}: {}", step, e.what()), step);
    }

    // (4) learning rule on the fan-out of each input spike
    if (visit_for_rule) {
      for (const auto& [src, count] : inputs) {
        ff.OnPreSpike(src, [&, src = src](SynapseHandle& h) {
          const NeuronId d = h.destination();
          const double dw = WeightDelta(v_next[d], states[d].ca, rule);
          ++record.plasticity_evaluations;
          if (config.record.hypothetical_updates) {
            record.updates.push_back({t, src, d, dw});
          }
          if (config.learning) {
            h.set_weight(std::clamp(h.weight() + dw, rule.w_min, rule.w_max));
          }
        });
      }
    }

    // (5) one-step recurrent delay
    std::swap(fired_prev, fired_now);

    // (6) recording
    if (config.record.spikes) {
      for (NeuronId id : fired_prev) record.spikes.push_back({id, t});
    }
    for (MembraneTrace& tr : record.membrane) {
      const bool spiked =
          std::find(fired_prev.begin(), fired_prev.end(), tr.neuron) !=
          fired_prev.end();
      tr.v.push_back(spiked ? config.neuron.v_spike : states[tr.neuron].v);
    }
    if (snapshot_steps > 0 && (step + 1) % snapshot_steps == 0 &&
        step + 1 < num_steps) {
      record.snapshots.push_back({ToTime(step + 1, dt), ff.Snapshot()});
    }
  }
  record.snapshots.push_back({ToTime(num_steps, dt), ff.Snapshot()});
  return record;
}

SimRecord RecordHypotheticalUpdates(Network& network,
                                    const SpikeTrain& stimulus,
                                    SimConfig config) {
  config.learning = false;
  config.record.hypothetical_updates = true;
  SimRecord record = Run(network, stimulus, config);
  AnnotateNearestPost(record);
  return record;
}

double NearestPostDelta(const std::vector<double>& sorted_posts, double t_pre) {
  if (sorted_posts.empty()) return std::numeric_limits<double>::quiet_NaN();
  auto it = std::lower_bound(sorted_posts.begin(), sorted_posts.end(), t_pre);
  if (it == sorted_posts.end()) return t_pre - sorted_posts.back();
  if (it == sorted_posts.begin()) return t_pre - *it;
  const double after = *it;
  const double before = *std::prev(it);
  // Equidistant: the earlier post wins.
  return (after - t_pre < t_pre - before) ? t_pre - after : t_pre - before;
}

void AnnotateNearestPost(SimRecord& record) {
  const auto posts = record.SpikeTimesByNeuron();
  for (UpdateLogEntry& u : record.updates) {
    u.dt_to_nearest_post = NearestPostDelta(posts[u.destination], u.time);
  }
}

void WriteSpikesCsv(std::ostream& os, const std::vector<OutputSpike>& spikes) {
  os << "neuron_id,time_ms\n";
  for (const OutputSpike& s : spikes) {
    os << fmt::format("{},{:.4f}\n", s.neuron, s.time);
  }
}

void WriteMembraneCsv(std::ostream& os, const SimRecord& record) {
  os << "time_ms,neuron_id,v_mv\n";
  for (const MembraneTrace& tr : record.membrane) {
    for (std::size_t k = 0; k < tr.v.size(); ++k) {
      os << fmt::format("{:.4f},{},{:.6f}\n",
                        ToTime(static_cast<std::int64_t>(k), record.dt),
                        tr.neuron, tr.v[k]);
    }
  }
}

void WriteUpdatesCsv(std::ostream& os, const SimRecord& record) {
  os << "time_ms,src,dst,dw,dt_to_nearest_post_ms\n";
  for (const UpdateLogEntry& u : record.updates) {
    os << fmt::format("{:.4f},{},{},{},{:.4f}\n", u.time, u.source,
                      u.destination, u.dw, u.dt_to_nearest_post);
  }
}

}  // namespace memplast
