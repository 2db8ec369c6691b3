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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "memplast/analysis.hpp"
#include "memplast/network.hpp"
#include "memplast/stimulus.hpp"

namespace memplast {
namespace {

using nlohmann::json;

constexpr std::uint64_t kProbeStream = 0x9b0e;
constexpr std::uint64_t kShuffleStream = 0x5f1e;
constexpr int kNullShuffles = 50;
constexpr double kCalibrationWindow = 20000.0;

constexpr std::pair<ExperimentKind, std::string_view> kNames[] = {
    {ExperimentKind::kStdpEquivalence, "stdp-equivalence"},
    {ExperimentKind::kCoincidence, "coincidence"},
    {ExperimentKind::kHiddenPattern, "hidden-pattern"},
    {ExperimentKind::kMultiPattern, "multi-pattern"},
    {ExperimentKind::kCheckStability, "check-stability"},
};

struct Field {
  std::string_view name;
  std::function<void(ExperimentConfig&, const json&)> read;
  std::function<json(const ExperimentConfig&)> write;
};

[[noreturn]] void BadType(std::string_view name, std::string_view want) {
  throw ConfigError(fmt::format("config field '{}' must be {}", name, want));
}

bool IsCount(const json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

template <class Get>
Field Real(std::string_view name, Get get) {
  return {name,
          [=](ExperimentConfig& c, const json& v) {
            if (!v.is_number()) BadType(name, "a number");
            get(c) = v.get<double>();
          },
          [=](const ExperimentConfig& c) {
            return json(get(const_cast<ExperimentConfig&>(c)));
          }};
}

template <class Get>
Field Count(std::string_view name, Get get) {
  return {name,
          [=](ExperimentConfig& c, const json& v) {
            if (!IsCount(v)) BadType(name, "a non-negative integer");
            using T = std::remove_reference_t<decltype(get(c))>;
            get(c) = v.get<T>();
          },
          [=](const ExperimentConfig& c) {
            return json(get(const_cast<ExperimentConfig&>(c)));
          }};
}

template <class Get>
Field Flag(std::string_view name, Get get) {
  return {name,
          [=](ExperimentConfig& c, const json& v) {
            if (!v.is_boolean()) BadType(name, "a boolean");
            get(c) = v.get<bool>();
          },
          [=](const ExperimentConfig& c) {
            return json(get(const_cast<ExperimentConfig&>(c)));
          }};
}

const std::vector<Field>& Fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> fields = {
      Count("seed", [](C& c) -> auto& { return c.seed; }),
      Real("dt", [](C& c) -> auto& { return c.dt; }),
      Real("duration", [](C& c) -> auto& { return c.duration; }),
      Real("probe_duration", [](C& c) -> auto& { return c.probe_duration; }),
      Real("c_m", [](C& c) -> auto& { return c.neuron.c_m; }),
      Real("v_rest", [](C& c) -> auto& { return c.neuron.v_rest; }),
      Real("e_exc", [](C& c) -> auto& { return c.neuron.e_exc; }),
      Real("e_inh", [](C& c) -> auto& { return c.neuron.e_inh; }),
      Real("g_l", [](C& c) -> auto& { return c.neuron.g_l; }),
      Real("tau_s", [](C& c) -> auto& { return c.neuron.tau_s; }),
      Real("tau_ca", [](C& c) -> auto& { return c.neuron.tau_ca; }),
      Real("v_spike", [](C& c) -> auto& { return c.neuron.v_spike; }),
      Real("v_reset", [](C& c) -> auto& { return c.neuron.v_reset; }),
      Real("t_refr", [](C& c) -> auto& { return c.neuron.t_refr; }),
      {"decay",
       [](C& c, const json& v) {
         if (v == "exact") {
           c.neuron.decay = DecayMode::kExact;
         } else if (v == "euler") {
           c.neuron.decay = DecayMode::kEuler;
         } else {
           BadType("decay", "\"exact\" or \"euler\"");
         }
       },
       [](const C& c) {
         return json(c.neuron.decay == DecayMode::kExact ? "exact" : "euler");
       }},
      Real("eta_plus", [](C& c) -> auto& { return c.plasticity.eta_plus; }),
      Real("eta_minus", [](C& c) -> auto& { return c.plasticity.eta_minus; }),
      Real("eta_h", [](C& c) -> auto& { return c.plasticity.eta_h; }),
      Real("v_lth", [](C& c) -> auto& { return c.plasticity.v_lth; }),
      Real("ca_target", [](C& c) -> auto& { return c.plasticity.ca_target; }),
      Real("w_min", [](C& c) -> auto& { return c.plasticity.w_min; }),
      Real("w_max", [](C& c) -> auto& { return c.plasticity.w_max; }),
      Count("num_inputs", [](C& c) -> auto& { return c.num_inputs; }),
      Real("input_rate", [](C& c) -> auto& { return c.input_rate; }),
      Count("num_sync", [](C& c) -> auto& { return c.num_sync; }),
      Real("sync_rate", [](C& c) -> auto& { return c.sync_rate; }),
      Real("pattern_len", [](C& c) -> auto& { return c.pattern_len; }),
      Real("pattern_rate", [](C& c) -> auto& { return c.pattern_rate; }),
      Real("presentation_rate",
           [](C& c) -> auto& { return c.presentation_rate; }),
      Real("min_gap", [](C& c) -> auto& { return c.min_gap; }),
      Count("num_patterns", [](C& c) -> auto& { return c.num_patterns; }),
      Flag("exact_pattern_count",
           [](C& c) -> auto& { return c.exact_pattern_count; }),
      Count("num_neurons", [](C& c) -> auto& { return c.num_neurons; }),
      Count("num_populations", [](C& c) -> auto& { return c.num_populations; }),
      Real("w_init_lo", [](C& c) -> auto& { return c.w_init_lo; }),
      Real("w_init_hi", [](C& c) -> auto& { return c.w_init_hi; }),
      Real("w_init_power", [](C& c) -> auto& { return c.w_init_power; }),
      Real("target_rate", [](C& c) -> auto& { return c.target_rate; }),
      Real("w_self_exc", [](C& c) -> auto& { return c.w_self_exc; }),
      Real("w_mutual_inh", [](C& c) -> auto& { return c.w_mutual_inh; }),
      Real("stability_t_p", [](C& c) -> auto& { return c.stability_t_p; }),
      Real("stability_t_n", [](C& c) -> auto& { return c.stability_t_n; }),
      Real("stability_f", [](C& c) -> auto& { return c.stability_f; }),
      Real("lag", [](C& c) -> auto& { return c.lag; }),
      Real("bin_width", [](C& c) -> auto& { return c.bin_width; }),
      Real("stdp_window", [](C& c) -> auto& { return c.stdp_window; }),
      Real("coincidence_tolerance",
           [](C& c) -> auto& { return c.coincidence_tolerance; }),
      Real("snapshot_every", [](C& c) -> auto& { return c.snapshot_every; }),
      {"membrane_neurons",
       [](C& c, const json& v) {
         if (!v.is_array()) BadType("membrane_neurons", "an array of ids");
         c.membrane_neurons.clear();
         for (const json& id : v) {
           if (!IsCount(id)) {
             BadType("membrane_neurons", "an array of ids");
           }
           c.membrane_neurons.push_back(id.get<NeuronId>());
         }
       },
       [](const C& c) { return json(c.membrane_neurons); }},
      Flag("write_updates", [](C& c) -> auto& { return c.write_updates; }),
      Flag("audit_memory", [](C& c) -> auto& { return c.audit_memory; }),
  };
  return fields;
}

void Require(bool ok, std::string_view what) {
  if (!ok) throw ConfigError(std::string(what));
}

EmbeddedPatternOptions PatternOptions(const ExperimentConfig& c) {
  EmbeddedPatternOptions o;
  o.num_sources = c.num_inputs;
  o.pattern_len = c.pattern_len;
  o.pattern_rate = c.pattern_rate;
  o.presentation_rate = c.presentation_rate;
  o.noise_rate = c.input_rate;
  o.min_gap = c.min_gap;
  o.num_patterns = c.num_patterns;
  o.exact_pattern_count = c.exact_pattern_count;
  return o;
}

SimConfig MakeSim(const ExperimentConfig& c, double duration, bool learning) {
  SimConfig s;
  s.dt = c.dt;
  s.duration = duration;
  s.seed = c.seed;
  s.neuron = c.neuron;
  s.plasticity = c.plasticity;
  s.learning = learning;
  return s;
}

std::size_t TotalNeurons(const ExperimentConfig& c) {
  return c.num_neurons * c.num_populations;
}

Network MakeNetwork(const ExperimentConfig& c) {
  Network net = MakeFeedForward(c.num_inputs, TotalNeurons(c), c.w_init_lo,
                                c.w_init_hi, c.seed, c.w_init_power);
  if (c.num_populations > 1) {
    std::vector<std::size_t> sizes(c.num_populations, c.num_neurons);
    net.recurrent = BuildWta(sizes, c.w_self_exc, c.w_mutual_inh);
    net.populations.clear();
    NeuronId next = 0;
    for (std::size_t p = 0; p < c.num_populations; ++p) {
      std::vector<NeuronId> members;
      for (std::size_t i = 0; i < c.num_neurons; ++i) members.push_back(next++);
      net.populations.push_back(std::move(members));
    }
  }
  return net;
}

double RateHz(std::size_t spikes, std::size_t neurons, double duration) {
  if (neurons == 0 || duration <= 0) return 0.0;
  return static_cast<double>(spikes) / static_cast<double>(neurons) /
         (duration / 1000.0);
}

std::string TimeLabel(double t) {
  return t == std::floor(t) ? fmt::format("{:.0f}", t) : fmt::format("{:.1f}", t);
}

class Output {
 public:
  explicit Output(const std::optional<std::filesystem::path>& dir) : dir_(dir) {
    if (dir_) std::filesystem::create_directories(*dir_);
  }
  bool enabled() const { return dir_.has_value(); }

  template <class Fn>
  void Write(const std::string& name, Fn&& fn) const {
    if (!dir_) return;
    std::ofstream os(*dir_ / name);
    if (!os) throw std::runtime_error(fmt::format("cannot write {}", name));
    fn(os);
  }
  void Json(const std::string& name, const json& j) const {
    Write(name, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
  }

 private:
  std::optional<std::filesystem::path> dir_;
};

void WriteSnapshots(const Output& out, const SimRecord& rec) {
  for (const WeightSnapshot& s : rec.snapshots) {
    out.Write(fmt::format("weights_{}.csv", TimeLabel(s.time)),
              [&](std::ostream& os) { WriteWeightsCsv(os, s.weights); });
  }
}

void WriteCurveCsv(std::ostream& os, const StdpCurve& curve) {
  os << "dt_ms,mean_dw,std_dw,count\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    os << fmt::format("{:.4f},{},{},{}\n", curve.centers[i], curve.mean[i],
                      curve.stddev[i], curve.count[i]);
  }
}

void WriteAlignedCsv(std::ostream& os, const VmemDistribution& d) {
  os << "offset_ms,mean_v_mv,samples\n";
  for (std::size_t i = 0; i < d.mean.size(); ++i) {
    os << fmt::format("{:.4f},{},{}\n", d.OffsetTime(i), d.mean[i],
                      d.samples[i]);
  }
}

void Add(ExperimentResult& r, std::string name, bool pass) {
  r.criteria.push_back({std::move(name), pass});
}

// Bisects w_init_hi so the frozen network fires at c.target_rate over the
// first calibration window of `input`.
double CalibrateWeightScale(const ExperimentConfig& c, const SpikeTrain& input) {
  const double window = std::min(c.duration, kCalibrationWindow);
  const SpikeTrain head = Window(input, 0.0, window);
  auto rate_at = [&](double w_hi) {
    ExperimentConfig trial = c;
    trial.w_init_hi = w_hi;
    Network net = MakeNetwork(trial);
    const SimRecord rec = Run(net, head, MakeSim(c, window, false));
    return static_cast<double>(rec.spikes.size()) /
           static_cast<double>(TotalNeurons(c)) / window;
  };
  double lo = c.w_init_lo, hi = c.plasticity.w_max;
  if (rate_at(hi) < c.target_rate) return hi;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(mid) < c.target_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void RunStdpEquivalence(const ExperimentConfig& config, const Output& out,
                        ExperimentResult& r) {
  const SpikeTrain input = PoissonTrain(config.num_inputs, config.input_rate,
                                        config.duration, config.seed, config.dt);
  ExperimentConfig c = config;
  if (c.target_rate > 0) c.w_init_hi = CalibrateWeightScale(c, input);
  r.metrics["w_init_hi_used"] = c.w_init_hi;
  Network net = MakeNetwork(c);
  SimConfig sim = MakeSim(c, c.duration, false);
  sim.record.membrane = c.membrane_neurons;
  sim.record.snapshot_every = c.snapshot_every;
  SimRecord rec = RecordHypotheticalUpdates(net, input, sim);
  const auto posts = rec.SpikeTimesByNeuron();

  const StdpCurve curve =
      ComputeStdpCurve(rec.updates, posts, c.bin_width, c.stdp_window);
  const StdpCurve shuffled =
      ShuffledPostCurve(rec.updates, posts, c.duration,
                        DeriveSeed(c.seed, kShuffleStream), c.bin_width,
                        c.stdp_window);
  const auto fit = FitExponentialStdp(curve);

  const double eta = c.plasticity.eta_plus;
  bool ltp = true, ltd = true, flat = true;
  double ltp_min = INFINITY, ltd_max = -INFINITY, far_max = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double x = curve.centers[i], m = curve.mean[i];
    if (x > -20 && x < 0) {
      ltp = ltp && curve.count[i] > 0 && m > 0;
      ltp_min = std::min(ltp_min, m);
    }
    if (x > 0 && x < 20) {
      ltd = ltd && curve.count[i] > 0 && m < 0;
      ltd_max = std::max(ltd_max, m);
    }
    if (std::abs(x) > 80) {
      far_max = std::max(far_max, std::abs(m));
      flat = flat && std::abs(m) < 0.2 * eta;
    }
  }
  const bool fit_ok = fit && fit->a_plus > 0 && fit->a_minus > 0 &&
                      fit->tau_plus >= 1 && fit->tau_plus <= 100 &&
                      fit->tau_minus >= 1 && fit->tau_minus <= 100;
  const std::vector<double> spread = ShuffledBinSpread(
      rec.updates, posts, c.duration, DeriveSeed(c.seed, kShuffleStream, 1),
      kNullShuffles, c.bin_width, c.stdp_window);
  const double shuffled_z = MaxDeviationZ(shuffled, spread);
  Add(r, "ltp_before_post", ltp);
  Add(r, "ltd_after_post", ltd);
  Add(r, "flat_far", flat);
  Add(r, "exponential_fit", fit_ok);
  Add(r, "shuffled_control", shuffled_z < 5.0);

  json& m = r.metrics;
  m["output_rate_hz"] = RateHz(rec.spikes.size(), TotalNeurons(c), c.duration);
  m["updates_logged"] = rec.updates.size();
  m["ltp_min_mean_over_eta_plus"] = ltp_min / eta;
  m["ltd_max_mean_over_eta_plus"] = ltd_max / eta;
  m["far_max_abs_mean_over_eta_plus"] = far_max / eta;
  m["curve_max_z"] = MaxDeviationZ(curve, spread);
  m["shuffled_max_z"] = shuffled_z;
  if (fit) {
    m["fit"] = {{"a_plus", fit->a_plus},       {"tau_plus", fit->tau_plus},
                {"a_minus", fit->a_minus},     {"tau_minus", fit->tau_minus},
                {"residual", fit->residual}, {"zero_residual", fit->zero_residual}};
  } else {
    m["fit"] = nullptr;
  }

  std::optional<VmemDistribution> aligned;
  if (!rec.membrane.empty()) {
    const MembraneTrace& trace = rec.membrane.front();
    aligned = ComputeVmemDistribution(trace, posts[trace.neuron], c.dt, 50.0);
    if (!aligned->empty()) {
      m["vmem_mean_before_spike_mv"] = aligned->MeanAt(-c.dt);
      m["vmem_mean_50ms_before_mv"] = aligned->MeanAt(-50.0);
      m["vmem_mean_after_spike_mv"] = aligned->MeanAt(c.dt);
    }
  }

  out.Write("spikes.csv", [&](std::ostream& os) { WriteSpikesCsv(os, rec.spikes); });
  if (c.write_updates) {
    out.Write("updates.csv", [&](std::ostream& os) { WriteUpdatesCsv(os, rec); });
  }
  out.Write("stdp_curve.csv", [&](std::ostream& os) { WriteCurveCsv(os, curve); });
  out.Write("stdp_curve_shuffled.csv",
            [&](std::ostream& os) { WriteCurveCsv(os, shuffled); });
  if (!rec.membrane.empty()) {
    out.Write("vmem.csv", [&](std::ostream& os) { WriteMembraneCsv(os, rec); });
    out.Write("vmem_aligned.csv",
              [&](std::ostream& os) { WriteAlignedCsv(os, *aligned); });
  }
  WriteSnapshots(out, rec);
}

std::vector<double> SourceTimes(const SpikeTrain& train, NeuronId source) {
  std::vector<double> t;
  for (const InputSpike& s : train.spikes) {
    if (s.source == source) t.push_back(s.time);
  }
  return t;
}

void RunCoincidence(const ExperimentConfig& c, const Output& out,
                    ExperimentResult& r) {
  Network net = MakeNetwork(c);
  const SpikeTrain input =
      SynchronousGroupStream(c.num_sync, c.num_inputs, c.sync_rate,
                             c.input_rate, c.duration, c.seed, c.dt);
  SimConfig sim = MakeSim(c, c.duration, true);
  sim.record.membrane = c.membrane_neurons;
  sim.record.snapshot_every = c.snapshot_every;
  const SimRecord rec = Run(net, input, sim);

  const SpikeTrain probe_input = SynchronousGroupStream(
      c.num_sync, c.num_inputs, c.sync_rate, c.input_rate, c.probe_duration,
      DeriveSeed(c.seed, kProbeStream), c.dt);
  const SimRecord probe =
      Run(net, probe_input, MakeSim(c, c.probe_duration, false));

  const auto ratios = SyncWeightRatios(net.feedforward.Snapshot(), c.num_sync);
  const auto strong = static_cast<double>(
      std::count_if(ratios.begin(), ratios.end(), [](double x) { return x >= 2.0; }));
  const double strong_fraction = strong / static_cast<double>(ratios.size());
  const auto events = SourceTimes(probe_input, 0);
  const double near =
      FractionNearEvents(probe.spikes, events, c.coincidence_tolerance);
  Add(r, "sync_weight_ratio", strong_fraction >= 0.9);
  Add(r, "spikes_near_master", !probe.spikes.empty() && near >= 0.8);

  json& m = r.metrics;
  m["neurons_with_ratio_ge_2"] = strong_fraction;
  m["weight_ratios"] = ratios;
  m["probe_spikes"] = probe.spikes.size();
  m["fraction_near_master"] = near;
  m["train_rate_hz"] = RateHz(rec.spikes.size(), TotalNeurons(c), c.duration);
  m["probe_rate_hz"] =
      RateHz(probe.spikes.size(), TotalNeurons(c), c.probe_duration);

  out.Write("spikes.csv", [&](std::ostream& os) { WriteSpikesCsv(os, rec.spikes); });
  out.Write("probe_spikes.csv",
            [&](std::ostream& os) { WriteSpikesCsv(os, probe.spikes); });
  if (!rec.membrane.empty()) {
    out.Write("vmem.csv", [&](std::ostream& os) { WriteMembraneCsv(os, rec); });
  }
  WriteSnapshots(out, rec);
}

json SelectivityJson(const SelectivityReport& s) {
  return {{"hit_fraction", s.hit_fraction},
          {"false_alarm_rate_hz", s.false_alarm_rate},
          {"chance", s.chance},
          {"spikes", s.spikes},
          {"lag_ms", s.lag},
          {"neuron_hit_fraction", s.neuron_hit_fraction},
          {"neuron_false_alarm_rate_hz", s.neuron_false_alarm_rate}};
}

void RunPatterns(const ExperimentConfig& c, const Output& out,
                 ExperimentResult& r) {
  const bool multi = c.kind == ExperimentKind::kMultiPattern;
  const EmbeddedPatternOptions opts = PatternOptions(c);
  const EmbeddedStream stream =
      EmbeddedPatternStream(opts, c.duration, c.seed, c.seed, c.dt);
  Network net = MakeNetwork(c);
  const WeightMatrix before = net.feedforward.Snapshot();

  AccessTrace trace(TraceMode::kStream);
  if (c.audit_memory) net.feedforward.AttachTrace(&trace);
  SimConfig sim = MakeSim(c, c.duration, true);
  sim.record.membrane = c.membrane_neurons;
  sim.record.snapshot_every = c.snapshot_every;
  const SimRecord rec = Run(net, stream.train, sim);
  net.feedforward.AttachTrace(nullptr);

  const EmbeddedStream probe_stream = EmbeddedPatternStream(
      opts, c.probe_duration, c.seed, DeriveSeed(c.seed, kProbeStream), c.dt);
  const SimRecord probe =
      Run(net, probe_stream.train, MakeSim(c, c.probe_duration, false));

  json& m = r.metrics;
  const WeightMatrix after = net.feedforward.Snapshot();
  m["uncorrelated_weight_change"] = MeanWeightChange(
      before, after, SourcesOutsidePatterns(stream.schedule, c.num_inputs));
  m["train_rate_hz"] = RateHz(rec.spikes.size(), TotalNeurons(c), c.duration);
  m["probe_rate_hz"] =
      RateHz(probe.spikes.size(), TotalNeurons(c), c.probe_duration);
  m["presentations"] = stream.schedule.presentations.size();

  json per_population = json::array();
  std::vector<SelectivityReport> reports;
  for (const auto& members : net.populations) {
    reports.push_back(Selectivity(probe.spikes,
                                  probe_stream.schedule.presentations,
                                  c.probe_duration, members, c.lag));
    per_population.push_back(SelectivityJson(reports.back()));
  }
  m["selectivity"] = per_population;

  if (multi) {
    const WtaAssignment wta =
        AssignPatterns(probe.spikes, probe_stream.schedule, c.probe_duration,
                       net.populations, c.lag);
    bool exclusive = !wta.populations.empty();
    json pops = json::array();
    for (const PopulationAssignment& a : wta.populations) {
      exclusive = exclusive && a.pattern >= 0 && a.exclusivity >= 0.5;
      pops.push_back({{"pattern", a.pattern},
                      {"exclusivity", a.exclusivity},
                      {"rates_hz", a.rates}});
    }
    m["assignment"] = {{"disjoint", wta.disjoint}, {"populations", pops}};
    Add(r, "disjoint_assignment", wta.disjoint);
    Add(r, "exclusivity", exclusive);
  } else {
    bool hit = !reports.empty(), quiet = !reports.empty();
    for (const SelectivityReport& s : reports) {
      hit = hit && s.hit_fraction >= 0.9;
      quiet = quiet && s.false_alarm_rate < 2.0;
    }
    Add(r, "hit_fraction", hit);
    Add(r, "false_alarm_rate", quiet);
  }

  if (c.audit_memory) {
    const TraceAudit audit = trace.Audit();
    std::set<std::pair<double, NeuronId>> events;
    for (const InputSpike& s : stream.train.spikes) events.insert({s.time, s.source});
    std::size_t expected_reads = 0;
    for (const auto& [t, src] : events) {
      expected_reads += 2 * net.feedforward.out_degree(src);
    }
    m["memory_audit"] = {{"reads", audit.reads},
                         {"writes", audit.writes},
                         {"visits", audit.visits},
                         {"expected_reads", expected_reads},
                         {"untriggered_accesses", audit.untriggered_accesses},
                         {"degree_mismatches", audit.degree_mismatches}};
    Add(r, "memory_access",
        audit.ok() && audit.visits > 0 && audit.reads == expected_reads);
  }

  out.Write("spikes.csv", [&](std::ostream& os) { WriteSpikesCsv(os, rec.spikes); });
  out.Write("probe_spikes.csv",
            [&](std::ostream& os) { WriteSpikesCsv(os, probe.spikes); });
  out.Write("schedule.csv",
            [&](std::ostream& os) { WriteScheduleCsv(os, stream.schedule); });
  out.Write("probe_schedule.csv", [&](std::ostream& os) {
    WriteScheduleCsv(os, probe_stream.schedule);
  });
  if (!rec.membrane.empty()) {
    out.Write("vmem.csv", [&](std::ostream& os) { WriteMembraneCsv(os, rec); });
  }
  WriteSnapshots(out, rec);
}

}  // namespace

std::optional<ExperimentKind> ParseExperimentKind(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::string_view ExperimentName(ExperimentKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

double ExperimentConfig::EffectiveTp() const {
  return stability_t_p > 0 ? stability_t_p : pattern_len;
}

double ExperimentConfig::EffectiveTn() const {
  return stability_t_n > 0 ? stability_t_n : 1.0 / presentation_rate - pattern_len;
}

double ExperimentConfig::EffectiveF() const {
  return stability_f > 0 ? stability_f : input_rate;
}

void ExperimentConfig::Validate() const {
  try {
    neuron.Validate();
    plasticity.Validate(neuron);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Require(dt > 0, "dt must be > 0");
  Require(duration > 0, "duration must be > 0");
  Require(stability_t_p >= 0 && stability_t_n >= 0 && stability_f >= 0,
          "stability arguments must be >= 0");
  Require(pattern_len > 0, "pattern_len must be > 0");
  Require(presentation_rate > 0 && presentation_rate * pattern_len < 1.0,
          "presentation_rate * pattern_len must lie in (0, 1)");
  Require(input_rate >= 0 && sync_rate >= 0 && pattern_rate >= 0,
          "rates must be >= 0");
  Require(EffectiveTn() > 0 && EffectiveF() > 0,
          "stability arguments must resolve to positive values");
  if (kind == ExperimentKind::kCheckStability) return;

  Require(probe_duration >= 0, "probe_duration must be >= 0");
  if (kind != ExperimentKind::kStdpEquivalence) {
    Require(probe_duration > 0, "probe_duration must be > 0");
  }
  Require(num_inputs > 0, "num_inputs must be > 0");
  Require(num_neurons > 0, "num_neurons must be > 0");
  Require(num_populations >= 1, "num_populations must be >= 1");
  Require(plasticity.w_min <= w_init_lo && w_init_lo <= w_init_hi &&
              w_init_hi <= plasticity.w_max,
          "need w_min <= w_init_lo <= w_init_hi <= w_max");
  Require(w_init_power > 0, "w_init_power must be > 0");
  Require(target_rate >= 0, "target_rate must be >= 0");
  Require(w_self_exc >= 0 && w_mutual_inh >= 0, "WTA weights must be >= 0");
  Require(lag >= 0, "lag must be >= 0");
  Require(bin_width > 0 && stdp_window > 0, "bin_width and stdp_window > 0");
  Require(coincidence_tolerance >= 0, "coincidence_tolerance must be >= 0");
  Require(num_patterns >= 1, "num_patterns must be >= 1");
  for (NeuronId n : membrane_neurons) {
    Require(n < num_neurons * num_populations, "membrane neuron out of range");
  }
  if (kind == ExperimentKind::kCoincidence) {
    Require(num_sync > 0 && num_sync < num_inputs,
            "num_sync must lie in (0, num_inputs)");
  }
  if (kind == ExperimentKind::kMultiPattern) {
    Require(num_patterns >= 2, "multi-pattern needs num_patterns >= 2");
    Require(num_populations >= 2, "multi-pattern needs num_populations >= 2");
  }
  SimConfig sim;
  sim.dt = dt;
  sim.duration = duration;
  sim.neuron = neuron;
  sim.plasticity = plasticity;
  sim.record.snapshot_every = snapshot_every;
  try {
    sim.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig DefaultConfig(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kStdpEquivalence:
      c.duration = 100000.0;
      c.probe_duration = 0.0;
      c.num_neurons = 1;
      c.neuron.g_l = 5.0;
      c.neuron.c_m = 100.0;
      c.plasticity.eta_plus = 0.01;
      c.plasticity.eta_minus = 0.0028;
      c.plasticity.ca_target = 0.004;
      c.plasticity.eta_h = 0.0028 / 0.004;
      c.plasticity.v_lth = -57.0;
      c.w_init_hi = 0.42;
      c.target_rate = 0.006;
      c.w_init_power = 6.0;
      c.membrane_neurons = {0};
      break;
    case ExperimentKind::kCoincidence:
      c.num_neurons = 40;
      c.neuron.g_l = 5.0;
      c.neuron.c_m = 60.0;
      c.neuron.tau_s = 3.0;
      c.plasticity.eta_plus = 0.005;
      c.plasticity.eta_minus = 0.0014;
      c.plasticity.ca_target = 0.008;
      c.plasticity.eta_h = 2.0 * 0.0014 / 0.008;
      c.plasticity.v_lth = -56.5;
      break;
    case ExperimentKind::kHiddenPattern:
    case ExperimentKind::kCheckStability:
      c.neuron.g_l = 30.0;
      c.neuron.c_m = 450.0;
      c.neuron.tau_s = 3.0;
      c.neuron.t_refr = 5.0;
      c.plasticity.eta_plus = 0.000872;
      c.plasticity.eta_minus = 0.000246;
      c.plasticity.ca_target = 0.0015;
      c.plasticity.eta_h = 0.44;
      c.plasticity.v_lth = -57.84;
      c.w_init_hi = 0.203;
      break;
    case ExperimentKind::kMultiPattern:
      c.num_patterns = 2;
      c.num_populations = 2;
      c.neuron.g_l = 30.0;
      c.neuron.c_m = 450.0;
      c.neuron.tau_s = 3.0;
      c.neuron.t_refr = 5.0;
      c.plasticity.eta_plus = 0.000658;
      c.plasticity.eta_minus = 0.000188;
      c.plasticity.ca_target = 0.00186;
      c.plasticity.eta_h = 0.333;
      c.plasticity.v_lth = -57.52;
      c.w_init_hi = 0.241;
      c.w_self_exc = 0.1286;
      c.w_mutual_inh = 331.0;
      break;
  }
  return c;
}

ExperimentConfig ConfigFromJson(const json& j, ExperimentKind kind) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = DefaultConfig(kind);
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") {
      if (!value.is_string() ||
          ParseExperimentKind(value.get<std::string>()) != kind) {
        throw ConfigError(fmt::format(
            "config names experiment {} but {} was requested", value.dump(),
            ExperimentName(kind)));
      }
      continue;
    }
    const auto& fields = Fields();
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const Field& f) { return f.name == key; });
    if (it == fields.end()) {
      throw ConfigError(fmt::format("unknown config field '{}'", key));
    }
    it->read(c, value);
  }
  return c;
}

json ConfigToJson(const ExperimentConfig& config) {
  json j;
  j["experiment"] = ExperimentName(config.kind);
  for (const Field& f : Fields()) j[std::string(f.name)] = f.write(config);
  return j;
}

StabilityReport StabilityFor(const ExperimentConfig& config) {
  try {
    return ValidateStability(config.plasticity, config.EffectiveTp(),
                             config.EffectiveTn(), config.EffectiveF());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

bool ExperimentResult::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const Criterion& c) { return c.pass; });
}

ExperimentResult RunExperiment(
    const ExperimentConfig& config,
    const std::optional<std::filesystem::path>& out_dir) {
  config.Validate();
  ExperimentResult r;
  r.stability = StabilityFor(config);
  const Output out(out_dir);
  out.Json("config.json", ConfigToJson(config));
  out.Json("stability.json", json(r.stability));

  switch (config.kind) {
    case ExperimentKind::kStdpEquivalence:
      RunStdpEquivalence(config, out, r);
      break;
    case ExperimentKind::kCoincidence:
      RunCoincidence(config, out, r);
      break;
    case ExperimentKind::kHiddenPattern:
    case ExperimentKind::kMultiPattern:
      RunPatterns(config, out, r);
      break;
    case ExperimentKind::kCheckStability:
      Add(r, "drift", r.stability.drift_ok);
      Add(r, "retention", r.stability.retention_ok);
      Add(r, "homeostasis", r.stability.homeostasis_ok);
      break;
  }

  json summary;
  summary["experiment"] = ExperimentName(config.kind);
  summary["seed"] = config.seed;
  json flags = json::object();
  for (const Criterion& c : r.criteria) flags[c.name] = c.pass;
  summary["criteria"] = flags;
  summary["all_pass"] = r.all_pass();
  summary["stability"] = json(r.stability);
  summary["metrics"] = r.metrics;
  r.metrics = summary["metrics"];
  out.Json("metrics.json", summary);
  return r;
}

}  // namespace memplast
