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
#include <span>
#include <string>
#include <vector>

namespace memplast {

using NeuronId = std::uint32_t;

struct Edge {
  NeuronId source = 0;
  NeuronId destination = 0;
  double weight = 0.0;
};

struct Synapse {
  NeuronId destination = 0;
  double weight = 0.0;
};

enum class AccessKind : std::uint8_t { kRead, kWrite };

struct AccessEntry {
  AccessKind kind = AccessKind::kRead;
  NeuronId source = 0;
  NeuronId destination = 0;
  double time = 0.0;
};

// One OnPreSpike call; [first_access, end_access) indexes the access log.
struct VisitEntry {
  NeuronId source = 0;
  double time = 0.0;
  std::size_t out_degree = 0;
  std::size_t first_access = 0;
  std::size_t end_access = 0;
};

struct TraceAudit {
  std::size_t reads = 0;
  std::size_t writes = 0;
  std::size_t visits = 0;
  // Accesses whose source had no presynaptic spike at the same time.
  std::size_t untriggered_accesses = 0;
  // Visits whose touched-cell count differed from the source's out-degree.
  std::size_t degree_mismatches = 0;

  bool ok() const { return untriggered_accesses == 0 && degree_mismatches == 0; }
};

enum class TraceMode : std::uint8_t {
  kRecord,  // keep every entry; audit on demand
  kStream,  // audit each visit as it closes; keep only the counts
};

// Instrumentation log for a SynapseTable. The simulator reports presynaptic
// spikes through NotePreSpike; the table reports every weight access.
// Simulation time must not decrease between calls.
class AccessTrace {
 public:
  explicit AccessTrace(TraceMode mode = TraceMode::kRecord) : mode_(mode) {}

  TraceMode mode() const { return mode_; }
  void set_time(double t) { time_ = t; }
  double time() const { return time_; }

  void NotePreSpike(NeuronId source);
  void LogAccess(AccessKind kind, NeuronId source, NeuronId destination) {
    ++access_count_;
    (mode_ == TraceMode::kRecord ? accesses_ : pending_)
        .push_back({kind, source, destination, time_});
  }
  std::size_t access_count() const { return access_count_; }
  void LogVisit(NeuronId source, std::size_t out_degree,
                std::size_t first_access);
  void Clear();

  // Empty in stream mode.
  const std::vector<AccessEntry>& accesses() const { return accesses_; }
  const std::vector<VisitEntry>& visits() const { return visits_; }

  // Checks every access against the presynaptic spike log and every visit
  // against its out-degree.
  TraceAudit Audit() const;

 private:
  struct PreSpike {
    NeuronId source;
    double time;
  };
  bool TriggeredNow(NeuronId source, double t) const;
  void CheckVisit(NeuronId source, std::size_t out_degree,
                  const AccessEntry* first, const AccessEntry* last,
                  TraceAudit& audit) const;

  TraceMode mode_;
  double time_ = 0.0;
  std::size_t access_count_ = 0;
  std::vector<PreSpike> pre_spikes_;
  std::vector<AccessEntry> accesses_;
  std::vector<VisitEntry> visits_;
  // Stream mode state.
  double recent_time_ = -1.0;
  std::vector<NeuronId> recent_pre_;
  std::vector<AccessEntry> pending_;
  TraceAudit running_;
};

// Handle given to OnPreSpike visitors for a single fan-out synapse.
class SynapseHandle {
 public:
  NeuronId destination() const { return cell_->destination; }
  double weight() const { return cell_->weight; }
  void set_weight(double w) {
    cell_->weight = w;
    if (trace_ != nullptr) {
      trace_->LogAccess(AccessKind::kWrite, source_, cell_->destination);
    }
  }

 private:
  friend class SynapseTable;
  SynapseHandle(Synapse* cell, NeuronId source, AccessTrace* trace)
      : cell_(cell), source_(source), trace_(trace) {}
  Synapse* cell_;
  NeuronId source_;
  AccessTrace* trace_;
};

// Dense source x destination view of a table; absent synapses hold NaN.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

// Source-indexed weight memory in compressed-sparse-row layout: an offset
// array over contiguous (destination, weight) fan-out lists. There is no
// destination-to-source index; weights are reachable only from their
// presynaptic source.
class SynapseTable {
 public:
  SynapseTable() : offsets_(1, 0) {}

  // Fan-out lists are sorted by destination. Throws std::invalid_argument on
  // out-of-range ids, out-of-bounds weights or duplicate (source,
  // destination) pairs.
  static SynapseTable Build(std::size_t num_sources,
                            std::size_t num_destinations,
                            std::vector<Edge> edges, double w_min = 0.0,
                            double w_max = 1.0);

  // Rebuilds a table from a snapshot; NaN cells become absent synapses.
  static SynapseTable FromSnapshot(const WeightMatrix& m, double w_min = 0.0,
                                   double w_max = 1.0);

  std::size_t num_sources() const { return offsets_.size() - 1; }
  std::size_t num_destinations() const { return num_destinations_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t out_degree(NeuronId source) const {
    return offsets_[source + 1] - offsets_[source];
  }

  // Untraced read-only view for inspection and tests.
  std::span<const Synapse> fanout(NeuronId source) const {
    return {cells_.data() + offsets_[source], out_degree(source)};
  }

  // Visits every fan-out synapse of `source` in destination order. With a
  // trace attached, each visited cell is logged as a read and each
  // set_weight as a write.
  template <typename Visitor>
  void OnPreSpike(NeuronId source, Visitor&& visitor) {
    const std::size_t begin = offsets_[source];
    const std::size_t end = offsets_[source + 1];
    const std::size_t first = trace_ != nullptr ? trace_->access_count() : 0;
    for (std::size_t k = begin; k < end; ++k) {
      if (trace_ != nullptr) {
        trace_->LogAccess(AccessKind::kRead, source, cells_[k].destination);
      }
      SynapseHandle handle(&cells_[k], source, trace_);
      visitor(handle);
    }
    if (trace_ != nullptr) trace_->LogVisit(source, end - begin, first);
  }

  void AttachTrace(AccessTrace* trace) { trace_ = trace; }
  AccessTrace* trace() const { return trace_; }

  WeightMatrix Snapshot() const;

 private:
  std::size_t num_destinations_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Synapse> cells_;
  AccessTrace* trace_ = nullptr;
};

// Rows are sources, columns destinations; absent synapses are empty fields.
void WriteWeightsCsv(std::ostream& os, const WeightMatrix& m);
WeightMatrix ReadWeightsCsv(std::istream& is);

}  // namespace memplast
