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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace memplast {
namespace {

using Interval = std::pair<double, double>;

std::vector<Interval> MergedWindows(
    const std::vector<Presentation>& presentations, double duration,
    double lag, std::optional<int> pattern_id) {
  std::vector<Interval> raw;
  for (const Presentation& p : presentations) {
    if (pattern_id && p.pattern_id != *pattern_id) continue;
    const double lo = std::max(0.0, p.onset);
    const double hi = std::min(duration, p.onset + p.duration + lag);
    if (hi >= lo) raw.emplace_back(lo, hi);
  }
  std::sort(raw.begin(), raw.end());
  std::vector<Interval> merged;
  for (const Interval& w : raw) {
    if (!merged.empty() && w.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, w.second);
    } else {
      merged.push_back(w);
    }
  }
  return merged;
}

double Coverage(const std::vector<Interval>& windows) {
  double total = 0.0;
  for (const auto& [lo, hi] : windows) total += hi - lo;
  return total;
}

bool Inside(const std::vector<Interval>& windows, double t) {
  auto it = std::upper_bound(
      windows.begin(), windows.end(), t,
      [](double x, const Interval& w) { return x < w.first; });
  if (it == windows.begin()) return false;
  return t <= std::prev(it)->second;
}

// Maps neuron ids to their position in `neurons`; -1 for absent ids.
std::vector<int> IndexOf(const std::vector<NeuronId>& neurons) {
  NeuronId top = 0;
  for (NeuronId n : neurons) top = std::max(top, n);
  std::vector<int> index(neurons.empty() ? 0 : top + 1, -1);
  for (std::size_t i = 0; i < neurons.size(); ++i) {
    index[neurons[i]] = static_cast<int>(i);
  }
  return index;
}

struct SideFit {
  double amplitude = 0.0;
  double tau = 0.0;
  double residual = 0.0;
};

// Fits m ~ sign * A * exp(-|c| / tau) on one side of the curve. For fixed
// tau the optimal A is linear, leaving a 1-D search over log tau.
SideFit FitSide(const std::vector<double>& centers,
                const std::vector<double>& means,
                const std::vector<double>& weights, double sign,
                double tau_lo, double tau_hi) {
  double mm = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    mm += weights[i] * means[i] * means[i];
  }
  auto solve = [&](double log_tau) {
    const double tau = std::exp(log_tau);
    double me = 0.0, ee = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double e = sign * std::exp(-std::abs(centers[i]) / tau);
      me += weights[i] * means[i] * e;
      ee += weights[i] * e * e;
    }
    SideFit f;
    f.tau = tau;
    f.amplitude = ee > 0 ? me / ee : 0.0;
    f.residual = ee > 0 ? mm - me * me / ee : mm;
    return f;
  };

  const double a = std::log(tau_lo), b = std::log(tau_hi);
  constexpr int kGrid = 400;
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double r = solve(a + (b - a) * i / kGrid).residual;
    if (r < best_res) {
      best_res = r;
      best = i;
    }
  }
  double lo = a + (b - a) * std::max(0, best - 1) / kGrid;
  double hi = a + (b - a) * std::min(kGrid, best + 1) / kGrid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = solve(x1).residual, f2 = solve(x2).residual;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = solve(x1).residual;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = solve(x2).residual;
    }
  }
  SideFit out = solve(0.5 * (lo + hi));
  const SideFit grid = solve(a + (b - a) * best / kGrid);
  if (grid.residual < out.residual) out = grid;
  // Clamp round-off so the fit never reports worse than the zero model.
  out.residual = std::clamp(out.residual, 0.0, mm);
  return out;
}

}  // namespace

double StdpCurve::GrandMean() const {
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    sum += mean[i] * static_cast<double>(count[i]);
    n += count[i];
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

StdpCurve ComputeStdpCurve(const std::vector<UpdateLogEntry>& log,
                           const std::vector<std::vector<double>>& post_times,
                           double bin_width, double window) {
  if (!(bin_width > 0) || !(window > 0)) {
    throw std::invalid_argument("ComputeStdpCurve: bin width and window > 0");
  }
  StdpCurve curve;
  curve.bin_width = bin_width;
  curve.window = window;
  const auto bins = static_cast<std::size_t>(std::ceil(2.0 * window / bin_width));
  curve.centers.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    curve.centers[i] = -window + (static_cast<double>(i) + 0.5) * bin_width;
  }
  std::vector<double> sum(bins, 0.0), sum_sq(bins, 0.0);
  curve.count.assign(bins, 0);
  for (const UpdateLogEntry& e : log) {
    if (e.destination >= post_times.size()) continue;
    const double delta = NearestPostDelta(post_times[e.destination], e.time);
    if (std::isnan(delta)) continue;
    const auto raw = static_cast<std::int64_t>(
        std::floor((delta + window) / bin_width));
    const auto bin = static_cast<std::size_t>(
        std::clamp<std::int64_t>(raw, 0, static_cast<std::int64_t>(bins) - 1));
    sum[bin] += e.dw;
    sum_sq[bin] += e.dw * e.dw;
    ++curve.count[bin];
  }
  curve.mean.assign(bins, 0.0);
  curve.stddev.assign(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i) {
    if (curve.count[i] == 0) continue;
    const double n = static_cast<double>(curve.count[i]);
    curve.mean[i] = sum[i] / n;
    curve.stddev[i] =
        std::sqrt(std::max(0.0, sum_sq[i] / n - curve.mean[i] * curve.mean[i]));
  }
  return curve;
}

double MaxDeviationZ(const StdpCurve& curve) {
  const double grand = curve.GrandMean();
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.count[i] < 2) continue;
    const double n = static_cast<double>(curve.count[i]);
    const double se = curve.stddev[i] * std::sqrt(n / (n - 1.0)) / std::sqrt(n);
    const double dev = std::abs(curve.mean[i] - grand);
    if (se > 0) {
      worst = std::max(worst, dev / se);
    } else if (dev > 0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

StdpCurve ShuffledPostCurve(const std::vector<UpdateLogEntry>& log,
                            const std::vector<std::vector<double>>& post_times,
                            double duration, std::uint64_t seed,
                            double bin_width, double window) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, duration);
  std::vector<std::vector<double>> shuffled(post_times.size());
  for (std::size_t n = 0; n < post_times.size(); ++n) {
    for (std::size_t k = 0; k < post_times[n].size(); ++k) {
      shuffled[n].push_back(uniform(rng));
    }
    std::sort(shuffled[n].begin(), shuffled[n].end());
  }
  return ComputeStdpCurve(log, shuffled, bin_width, window);
}

double MaxDeviationZ(const StdpCurve& curve, const std::vector<double>& spread) {
  if (spread.size() != curve.size()) {
    throw std::invalid_argument("MaxDeviationZ: spread size mismatch");
  }
  const double grand = curve.GrandMean();
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.count[i] == 0 || !(spread[i] > 0)) continue;
    worst = std::max(worst, std::abs(curve.mean[i] - grand) / spread[i]);
  }
  return worst;
}

std::vector<double> ShuffledBinSpread(
    const std::vector<UpdateLogEntry>& log,
    const std::vector<std::vector<double>>& post_times, double duration,
    std::uint64_t seed, int shuffles, double bin_width, double window) {
  if (shuffles < 2) {
    throw std::invalid_argument("ShuffledBinSpread: need >= 2 shuffles");
  }
  std::vector<double> sum, sum_sq;
  std::vector<int> n;
  for (int k = 0; k < shuffles; ++k) {
    const StdpCurve c = ShuffledPostCurve(
        log, post_times, duration,
        seed + static_cast<std::uint64_t>(k) * 0x9E3779B97F4A7C15ULL,
        bin_width, window);
    if (sum.empty()) {
      sum.assign(c.size(), 0.0);
      sum_sq.assign(c.size(), 0.0);
      n.assign(c.size(), 0);
    }
    // Deviations from each shuffle's own grand mean.
    const double grand = c.GrandMean();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.count[i] == 0) continue;
      const double d = c.mean[i] - grand;
      sum[i] += d;
      sum_sq[i] += d * d;
      ++n[i];
    }
  }
  std::vector<double> spread(sum.size(), 0.0);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (n[i] < 2) continue;
    const double m = sum[i] / n[i];
    spread[i] = std::sqrt(std::max(0.0, (sum_sq[i] - n[i] * m * m) / (n[i] - 1)));
  }
  return spread;
}

double ExponentialStdp(const ExponentialStdpFit& fit, double dt) {
  if (dt < 0) return fit.a_plus * std::exp(dt / fit.tau_plus);
  if (dt > 0) return -fit.a_minus * std::exp(-dt / fit.tau_minus);
  return 0.0;
}

std::optional<ExponentialStdpFit> FitExponentialStdp(const StdpCurve& curve,
                                                     double tau_lo,
                                                     double tau_hi) {
  std::vector<double> c_pre, m_pre, w_pre, c_post, m_post, w_post;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.count[i] == 0) continue;
    const double w = static_cast<double>(curve.count[i]);
    if (curve.mean[i] != 0.0) any_nonzero = true;
    if (curve.centers[i] < 0) {
      c_pre.push_back(curve.centers[i]);
      m_pre.push_back(curve.mean[i]);
      w_pre.push_back(w);
    } else if (curve.centers[i] > 0) {
      c_post.push_back(curve.centers[i]);
      m_post.push_back(curve.mean[i]);
      w_post.push_back(w);
    }
  }
  if (!any_nonzero || c_pre.size() < 3 || c_post.size() < 3) {
    return std::nullopt;
  }
  const SideFit pre = FitSide(c_pre, m_pre, w_pre, 1.0, tau_lo, tau_hi);
  const SideFit post = FitSide(c_post, m_post, w_post, -1.0, tau_lo, tau_hi);
  ExponentialStdpFit fit;
  fit.a_plus = pre.amplitude;
  fit.tau_plus = pre.tau;
  fit.a_minus = post.amplitude;
  fit.tau_minus = post.tau;
  fit.residual = pre.residual + post.residual;
  for (std::size_t i = 0; i < m_pre.size(); ++i) {
    fit.zero_residual += w_pre[i] * m_pre[i] * m_pre[i];
  }
  for (std::size_t i = 0; i < m_post.size(); ++i) {
    fit.zero_residual += w_post[i] * m_post[i] * m_post[i];
  }
  return fit;
}

double VmemDistribution::MeanAt(double t) const {
  if (empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto offset = static_cast<std::int64_t>(std::llround(t / dt));
  const auto i = std::clamp<std::int64_t>(offset + half_width, 0,
                                          2 * half_width);
  return mean[static_cast<std::size_t>(i)];
}

VmemDistribution ComputeVmemDistribution(const MembraneTrace& trace,
                                         const std::vector<double>& post_times,
                                         double dt, double window, double v_lo,
                                         double v_hi, double v_bin) {
  if (!(dt > 0) || !(window >= 0) || !(v_bin > 0) || !(v_hi > v_lo)) {
    throw std::invalid_argument("ComputeVmemDistribution: bad binning");
  }
  VmemDistribution out;
  out.dt = dt;
  out.v_lo = v_lo;
  out.v_bin = v_bin;
  out.half_width = static_cast<std::int64_t>(std::llround(window / dt));
  out.v_bins = static_cast<std::size_t>(std::ceil((v_hi - v_lo) / v_bin));
  if (post_times.empty() || trace.v.empty()) return out;

  const auto offsets = static_cast<std::size_t>(2 * out.half_width + 1);
  std::vector<double> sum(offsets, 0.0);
  out.samples.assign(offsets, 0);
  out.histogram.assign(offsets * out.v_bins, 0);
  const auto length = static_cast<std::int64_t>(trace.v.size());
  for (double t : post_times) {
    const std::int64_t k = ToStep(t, dt);
    for (std::int64_t o = -out.half_width; o <= out.half_width; ++o) {
      const std::int64_t s = k + o;
      if (s < 0 || s >= length) continue;
      const double v = trace.v[static_cast<std::size_t>(s)];
      const auto i = static_cast<std::size_t>(o + out.half_width);
      sum[i] += v;
      ++out.samples[i];
      const auto b = std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor((v - v_lo) / v_bin)), 0,
          static_cast<std::int64_t>(out.v_bins) - 1);
      ++out.histogram[i * out.v_bins + static_cast<std::size_t>(b)];
    }
  }
  out.mean.assign(offsets, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < offsets; ++i) {
    if (out.samples[i] > 0) {
      out.mean[i] = sum[i] / static_cast<double>(out.samples[i]);
    }
  }
  return out;
}

SelectivityReport Selectivity(const std::vector<OutputSpike>& spikes,
                              const std::vector<Presentation>& presentations,
                              double duration,
                              const std::vector<NeuronId>& neurons,
                              double lag, std::optional<int> pattern_id) {
  if (lag < 0) throw std::invalid_argument("Selectivity: lag must be >= 0");
  if (!(duration > 0)) {
    throw std::invalid_argument("Selectivity: duration must be > 0");
  }
  const auto windows = MergedWindows(presentations, duration, lag, pattern_id);
  const double covered = Coverage(windows);
  const double outside_s = (duration - covered) / 1000.0;

  SelectivityReport r;
  r.lag = lag;
  r.chance = covered / duration;
  r.neurons = neurons;
  const std::size_t n = neurons.size();
  r.neuron_spikes.assign(n, 0);
  r.neuron_hits.assign(n, 0);
  const auto index = IndexOf(neurons);
  for (const OutputSpike& s : spikes) {
    if (s.neuron >= index.size() || index[s.neuron] < 0) continue;
    const auto i = static_cast<std::size_t>(index[s.neuron]);
    ++r.neuron_spikes[i];
    if (Inside(windows, s.time)) ++r.neuron_hits[i];
  }
  r.neuron_hit_fraction.assign(n, 0.0);
  r.neuron_false_alarm_rate.assign(n, 0.0);
  double fa_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.spikes += r.neuron_spikes[i];
    r.hits += r.neuron_hits[i];
    if (r.neuron_spikes[i] > 0) {
      r.neuron_hit_fraction[i] = static_cast<double>(r.neuron_hits[i]) /
                                 static_cast<double>(r.neuron_spikes[i]);
    }
    if (outside_s > 0) {
      r.neuron_false_alarm_rate[i] =
          static_cast<double>(r.neuron_spikes[i] - r.neuron_hits[i]) / outside_s;
    }
    fa_sum += r.neuron_false_alarm_rate[i];
  }
  if (r.spikes > 0) {
    r.hit_fraction =
        static_cast<double>(r.hits) / static_cast<double>(r.spikes);
  }
  if (n > 0) r.false_alarm_rate = fa_sum / static_cast<double>(n);
  return r;
}

WtaAssignment AssignPatterns(const std::vector<OutputSpike>& spikes,
                             const PatternSchedule& schedule, double duration,
                             const std::vector<std::vector<NeuronId>>& populations,
                             double lag) {
  int num_patterns = static_cast<int>(schedule.patterns.size());
  for (const Presentation& p : schedule.presentations) {
    num_patterns = std::max(num_patterns, p.pattern_id + 1);
  }
  std::vector<std::vector<Interval>> windows;
  for (int p = 0; p < num_patterns; ++p) {
    windows.push_back(MergedWindows(schedule.presentations, duration, lag, p));
  }

  WtaAssignment out;
  for (const auto& members : populations) {
    const auto index = IndexOf(members);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(num_patterns), 0);
    for (const OutputSpike& s : spikes) {
      if (s.neuron >= index.size() || index[s.neuron] < 0) continue;
      for (int p = 0; p < num_patterns; ++p) {
        if (Inside(windows[static_cast<std::size_t>(p)], s.time)) {
          ++counts[static_cast<std::size_t>(p)];
        }
      }
    }
    PopulationAssignment a;
    for (int p = 0; p < num_patterns; ++p) {
      const double seconds = Coverage(windows[static_cast<std::size_t>(p)]) / 1000.0;
      const double denom = seconds * static_cast<double>(members.size());
      a.rates.push_back(
          denom > 0 ? static_cast<double>(counts[static_cast<std::size_t>(p)]) / denom
                    : 0.0);
    }
    if (!a.rates.empty()) {
      std::vector<double> sorted = a.rates;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      const double top = sorted[0];
      const double second = sorted.size() > 1 ? sorted[1] : 0.0;
      if (top > second) {
        a.pattern = static_cast<int>(
            std::max_element(a.rates.begin(), a.rates.end()) - a.rates.begin());
        a.exclusivity = (top - second) / (top + second);
      }
    }
    out.populations.push_back(std::move(a));
  }

  out.disjoint = !out.populations.empty();
  for (std::size_t i = 0; i < out.populations.size(); ++i) {
    if (out.populations[i].pattern < 0) out.disjoint = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (out.populations[i].pattern == out.populations[j].pattern) {
        out.disjoint = false;
      }
    }
  }
  return out;
}

std::vector<double> SyncWeightRatios(const WeightMatrix& weights,
                                     std::size_t num_sync) {
  if (num_sync == 0 || num_sync >= weights.rows) {
    throw std::invalid_argument("SyncWeightRatios: need 0 < num_sync < rows");
  }
  std::vector<double> ratios;
  for (std::size_t d = 0; d < weights.cols; ++d) {
    double sync = 0.0, rest = 0.0;
    std::size_t n_sync = 0, n_rest = 0;
    for (std::size_t s = 0; s < weights.rows; ++s) {
      const double w = weights.at(s, d);
      if (std::isnan(w)) continue;
      if (s < num_sync) {
        sync += w;
        ++n_sync;
      } else {
        rest += w;
        ++n_rest;
      }
    }
    const double ms = n_sync ? sync / static_cast<double>(n_sync) : 0.0;
    const double mr = n_rest ? rest / static_cast<double>(n_rest) : 0.0;
    ratios.push_back(mr > 0 ? ms / mr
                            : (ms > 0 ? std::numeric_limits<double>::infinity()
                                      : 0.0));
  }
  return ratios;
}

double FractionNearEvents(const std::vector<OutputSpike>& spikes,
                          const std::vector<double>& events, double tolerance) {
  if (spikes.empty()) return 0.0;
  std::size_t near = 0;
  for (const OutputSpike& s : spikes) {
    auto it = std::lower_bound(events.begin(), events.end(), s.time);
    bool hit = it != events.end() && *it - s.time <= tolerance;
    if (!hit && it != events.begin()) hit = s.time - *std::prev(it) <= tolerance;
    if (hit) ++near;
  }
  return static_cast<double>(near) / static_cast<double>(spikes.size());
}

double MeanWeightChange(const WeightMatrix& before, const WeightMatrix& after,
                        const std::vector<NeuronId>& sources) {
  if (before.rows != after.rows || before.cols != after.cols) {
    throw std::invalid_argument("MeanWeightChange: shape mismatch");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (NeuronId s : sources) {
    if (s >= before.rows) continue;
    for (std::size_t d = 0; d < before.cols; ++d) {
      const double a = before.at(s, d), b = after.at(s, d);
      if (std::isnan(a) || std::isnan(b)) continue;
      sum += b - a;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<NeuronId> SourcesOutsidePatterns(const PatternSchedule& schedule,
                                             std::size_t num_sources) {
  std::vector<bool> used(num_sources, false);
  for (const SpikeTrain& p : schedule.patterns) {
    for (const InputSpike& s : p.spikes) {
      if (s.source < num_sources) used[s.source] = true;
    }
  }
  std::vector<NeuronId> out;
  for (std::size_t s = 0; s < num_sources; ++s) {
    if (!used[s]) out.push_back(static_cast<NeuronId>(s));
  }
  return out;
}

}  // namespace memplast
