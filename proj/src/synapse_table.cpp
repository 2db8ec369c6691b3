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

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace memplast {

void AccessTrace::NotePreSpike(NeuronId source) {
  if (mode_ == TraceMode::kRecord) {
    pre_spikes_.push_back({source, time_});
    return;
  }
  if (time_ != recent_time_) {
    recent_time_ = time_;
    recent_pre_.clear();
  }
  recent_pre_.push_back(source);
}

bool AccessTrace::TriggeredNow(NeuronId source, double t) const {
  return t == recent_time_ &&
         std::find(recent_pre_.begin(), recent_pre_.end(), source) !=
             recent_pre_.end();
}

void AccessTrace::CheckVisit(NeuronId source, std::size_t out_degree,
                             const AccessEntry* first, const AccessEntry* last,
                             TraceAudit& audit) const {
  std::set<NeuronId> cells;
  std::size_t reads = 0;
  for (const AccessEntry* a = first; a != last; ++a) {
    if (a->source != source) ++audit.untriggered_accesses;
    if (a->kind == AccessKind::kRead) ++reads;
    cells.insert(a->destination);
  }
  if (cells.size() != out_degree || reads != out_degree) {
    ++audit.degree_mismatches;
  }
}

void AccessTrace::LogVisit(NeuronId source, std::size_t out_degree,
                           std::size_t first_access) {
  if (mode_ == TraceMode::kRecord) {
    visits_.push_back(
        {source, time_, out_degree, first_access, accesses_.size()});
    return;
  }
  // Accesses since the previous visit belong to this one.
  for (const AccessEntry& a : pending_) {
    (a.kind == AccessKind::kRead ? running_.reads : running_.writes) += 1;
    if (!TriggeredNow(a.source, a.time)) ++running_.untriggered_accesses;
  }
  ++running_.visits;
  CheckVisit(source, out_degree, pending_.data(),
             pending_.data() + pending_.size(), running_);
  pending_.clear();
}

void AccessTrace::Clear() {
  access_count_ = 0;
  pre_spikes_.clear();
  accesses_.clear();
  visits_.clear();
  recent_time_ = -1.0;
  recent_pre_.clear();
  pending_.clear();
  running_ = TraceAudit{};
}

TraceAudit AccessTrace::Audit() const {
  if (mode_ == TraceMode::kStream) {
    TraceAudit audit = running_;
    // Accesses outside any visit.
    for (const AccessEntry& a : pending_) {
      (a.kind == AccessKind::kRead ? audit.reads : audit.writes) += 1;
      if (!TriggeredNow(a.source, a.time)) ++audit.untriggered_accesses;
    }
    return audit;
  }
  TraceAudit audit;
  std::map<double, std::set<NeuronId>> spikes_at;
  for (const PreSpike& p : pre_spikes_) spikes_at[p.time].insert(p.source);

  auto triggered = [&](NeuronId source, double t) {
    auto it = spikes_at.find(t);
    return it != spikes_at.end() && it->second.count(source) > 0;
  };

  for (const AccessEntry& a : accesses_) {
    (a.kind == AccessKind::kRead ? audit.reads : audit.writes) += 1;
    if (!triggered(a.source, a.time)) ++audit.untriggered_accesses;
  }
  audit.visits = visits_.size();
  for (const VisitEntry& v : visits_) {
    CheckVisit(v.source, v.out_degree, accesses_.data() + v.first_access,
               accesses_.data() + v.end_access, audit);
  }
  return audit;
}

SynapseTable SynapseTable::Build(std::size_t num_sources,
                                 std::size_t num_destinations,
                                 std::vector<Edge> edges, double w_min,
                                 double w_max) {
  for (const Edge& e : edges) {
    if (e.source >= num_sources || e.destination >= num_destinations) {
      throw std::invalid_argument(fmt::format(
          "SynapseTable: edge ({}, {}) outside {}x{} population", e.source,
          e.destination, num_sources, num_destinations));
    }
    if (!(e.weight >= w_min && e.weight <= w_max)) {
      throw std::invalid_argument(
          fmt::format("SynapseTable: weight {} of edge ({}, {}) outside [{}, {}]",
                      e.weight, e.source, e.destination, w_min, w_max));
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.source, a.destination) <
           std::pair(b.source, b.destination);
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].source == edges[k - 1].source &&
        edges[k].destination == edges[k - 1].destination) {
      throw std::invalid_argument(
          fmt::format("SynapseTable: duplicate synapse ({}, {})",
                      edges[k].source, edges[k].destination));
    }
  }

  SynapseTable table;
  table.num_destinations_ = num_destinations;
  table.offsets_.assign(num_sources + 1, 0);
  table.cells_.reserve(edges.size());
  for (const Edge& e : edges) {
    ++table.offsets_[e.source + 1];
    table.cells_.push_back({e.destination, e.weight});
  }
  for (std::size_t s = 0; s < num_sources; ++s) {
    table.offsets_[s + 1] += table.offsets_[s];
  }
  return table;
}

SynapseTable SynapseTable::FromSnapshot(const WeightMatrix& m, double w_min,
                                        double w_max) {
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double w = m.at(r, c);
      if (!std::isnan(w)) {
        edges.push_back({static_cast<NeuronId>(r), static_cast<NeuronId>(c), w});
      }
    }
  }
  return Build(m.rows, m.cols, std::move(edges), w_min, w_max);
}

WeightMatrix SynapseTable::Snapshot() const {
  WeightMatrix m;
  m.rows = num_sources();
  m.cols = num_destinations_;
  m.values.assign(m.rows * m.cols, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s = 0; s < m.rows; ++s) {
    for (std::size_t k = offsets_[s]; k < offsets_[s + 1]; ++k) {
      m.at(s, cells_[k].destination) = cells_[k].weight;
    }
  }
  return m;
}

void WriteWeightsCsv(std::ostream& os, const WeightMatrix& m) {
  std::string line;
  for (std::size_t r = 0; r < m.rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c > 0) line += ',';
      const double w = m.at(r, c);
      if (!std::isnan(w)) line += fmt::format("{}", w);
    }
    line += '\n';
    os << line;
  }
}

WeightMatrix ReadWeightsCsv(std::istream& is) {
  WeightMatrix m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(start, comma - start);
      row.push_back(field.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : std::stod(field));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (m.rows == 0) {
      m.cols = row.size();
    } else if (row.size() != m.cols) {
      throw std::invalid_argument("weights csv: ragged rows");
    }
    m.values.insert(m.values.end(), row.begin(), row.end());
    ++m.rows;
  }
  return m;
}

}  // namespace memplast
