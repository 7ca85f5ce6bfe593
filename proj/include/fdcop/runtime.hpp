// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Simulated message-passing kernel. One logical process per agent; engines
// talk only through Kernel::send / Kernel::drain, and reach problem data only
// through an AgentContext that logs every read so a run can be audited for
// isolation afterwards.

#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fdcop/error.hpp"
#include "fdcop/model.hpp"
#include "fdcop/pseudotree.hpp"

namespace fdcop {

enum class MessageKind {
  kUtil,
  kValue,
  kVariableToFunction,
  kFunctionToVariable,
};

inline const char* kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::kUtil: return "UTIL";
    case MessageKind::kValue: return "VALUE";
    case MessageKind::kVariableToFunction: return "MS_VariableToFunction";
    case MessageKind::kFunctionToVariable: return "MS_FunctionToVariable";
  }
  return "?";
}

struct TraceEntry {
  std::size_t step = 0;
  VarIndex sender = 0;
  VarIndex receiver = 0;
  MessageKind kind = MessageKind::kUtil;
  std::size_t scalar_size = 0;
  std::size_t rows = 0;   // table rows or pieces; 0 when not applicable
  std::size_t arity = 0;  // separator width of table payloads

  bool operator==(const TraceEntry&) const = default;
};

enum class DatumKind { kDomain, kUtility, kTreeMetadata, kMessage, kGlobal };

struct AccessRecord {
  VarIndex agent = 0;
  DatumKind kind = DatumKind::kGlobal;
  std::size_t index = 0;

  bool operator==(const AccessRecord&) const = default;
};

struct Trace {
  std::vector<TraceEntry> messages;
  std::vector<AccessRecord> reads;

  /// `step,sender,receiver,kind,scalar_size` per message.
  std::string to_log() const {
    std::ostringstream os;
    for (const auto& m : messages) {
      os << m.step << ',' << m.sender << ',' << m.receiver << ','
         << kind_name(m.kind) << ',' << m.scalar_size << '\n';
    }
    return os.str();
  }

  bool operator==(const Trace&) const = default;
};

struct RunStats {
  std::size_t total_messages = 0;
  std::map<MessageKind, std::size_t> messages_by_kind;
  std::size_t total_scalars = 0;
  std::size_t max_message_scalars = 0;
  /// Messages whose sender and receiver differ.
  std::size_t inter_agent_messages = 0;
  std::size_t max_util_rows = 0;
  std::map<std::string, double> phase_ms;

  std::size_t count(MessageKind kind) const {
    auto it = messages_by_kind.find(kind);
    return it == messages_by_kind.end() ? 0 : it->second;
  }

  /// Equality ignoring wall-clock timings.
  bool same_counts(const RunStats& o) const {
    return total_messages == o.total_messages &&
           messages_by_kind == o.messages_by_kind &&
           total_scalars == o.total_scalars &&
           max_message_scalars == o.max_message_scalars &&
           inter_agent_messages == o.inter_agent_messages &&
           max_util_rows == o.max_util_rows;
  }
};

/// Capacity failure carrying the statistics gathered before it struck.
class CapacityExceeded : public CapacityError {
 public:
  CapacityExceeded(const std::string& what, RunStats partial)
      : CapacityError(what), partial_(std::move(partial)) {}
  const RunStats& partial_stats() const { return partial_; }

 private:
  RunStats partial_;
};

template <class Payload>
struct Envelope {
  std::size_t id = 0;
  VarIndex sender = 0;
  MessageKind kind = MessageKind::kUtil;
  Payload payload;
};

template <class Payload>
class Kernel {
 public:
  explicit Kernel(std::size_t agents) : inboxes_(agents) {}

  std::size_t send(VarIndex from, VarIndex to, MessageKind kind,
                   Payload payload, std::size_t scalar_size,
                   std::size_t rows = 0, std::size_t arity = 0) {
    if (to >= inboxes_.size() || from >= inboxes_.size()) {
      throw ProtocolError("message addressed outside the agent set");
    }
    std::size_t id = trace_.messages.size();
    trace_.messages.push_back(
        TraceEntry{id, from, to, kind, scalar_size, rows, arity});
    ++stats_.total_messages;
    ++stats_.messages_by_kind[kind];
    stats_.total_scalars += scalar_size;
    stats_.max_message_scalars = std::max(stats_.max_message_scalars, scalar_size);
    if (from != to) ++stats_.inter_agent_messages;
    if (kind == MessageKind::kUtil) {
      stats_.max_util_rows = std::max(stats_.max_util_rows, rows);
    }
    inboxes_[to].push_back(Envelope<Payload>{id, from, kind, std::move(payload)});
    return id;
  }

  /// Removes and returns everything queued for `agent`, in arrival order.
  std::vector<Envelope<Payload>> drain(VarIndex agent) {
    std::vector<Envelope<Payload>> out(
        std::make_move_iterator(inboxes_.at(agent).begin()),
        std::make_move_iterator(inboxes_.at(agent).end()));
    inboxes_[agent].clear();
    for (const auto& e : out) {
      trace_.reads.push_back(AccessRecord{agent, DatumKind::kMessage, e.id});
    }
    return out;
  }

  bool idle() const {
    for (const auto& box : inboxes_) {
      if (!box.empty()) return false;
    }
    return true;
  }

  Trace& trace() { return trace_; }
  RunStats& stats() { return stats_; }

 private:
  std::vector<std::deque<Envelope<Payload>>> inboxes_;
  Trace trace_;
  RunStats stats_;
};

/// What a single agent may look at. Every accessor records the read.
class AgentContext {
 public:
  AgentContext(const Problem& problem, const PseudoTree* tree, VarIndex self,
               Trace& trace)
      : problem_(&problem), tree_(tree), self_(self), trace_(&trace) {}

  VarIndex self() const { return self_; }

  const ContinuousDomain& domain(VarIndex v) const {
    log(DatumKind::kDomain, v);
    return problem_->domain(v);
  }

  /// The agent's own utilities, each oriented so `first` is the agent.
  std::vector<std::pair<std::size_t, QuadraticUtility>> utilities() const {
    std::vector<std::pair<std::size_t, QuadraticUtility>> out;
    for (std::size_t u : problem_->incident(self_)) {
      log(DatumKind::kUtility, u);
      out.emplace_back(u, problem_->utility(u).oriented(self_));
    }
    return out;
  }

  /// A specific utility, e.g. a max-sum function node hosted by this agent.
  const QuadraticUtility& utility(std::size_t u) const {
    log(DatumKind::kUtility, u);
    return problem_->utility(u);
  }

  std::optional<VarIndex> parent() const { return tree().parent(self_); }
  const std::vector<VarIndex>& children() const { return tree().children(self_); }
  const std::vector<VarIndex>& pseudo_parents() const {
    return tree().pseudo_parents(self_);
  }
  const std::vector<VarIndex>& pseudo_children() const {
    return tree().pseudo_children(self_);
  }
  const std::vector<VarIndex>& separator() const {
    return tree().separator(self_);
  }
  bool is_leaf() const { return tree().is_leaf(self_); }
  bool is_root() const { return !tree().parent(self_).has_value(); }

  /// Direct access to the whole problem. Always an isolation violation;
  /// exists so audits can be exercised.
  const Problem& global_problem() const {
    log(DatumKind::kGlobal, 0);
    return *problem_;
  }

 private:
  const PseudoTree& tree() const {
    if (!tree_) throw ProtocolError("agent has no pseudo-tree metadata");
    log(DatumKind::kTreeMetadata, self_);
    return *tree_;
  }
  void log(DatumKind kind, std::size_t index) const {
    trace_->reads.push_back(AccessRecord{self_, kind, index});
  }

  const Problem* problem_;
  const PseudoTree* tree_;
  VarIndex self_;
  Trace* trace_;
};

struct IsolationViolation {
  VarIndex agent = 0;
  std::string datum;
};

struct IsolationReport {
  std::vector<IsolationViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Replays a trace and flags every read an agent was not entitled to: only
/// its own and its neighbours' domains, utilities in its scope, its own
/// pseudo-tree entry, and messages addressed to it.
inline IsolationReport audit_isolation(const Problem& problem,
                                       const Trace& trace) {
  IsolationReport report;
  const auto& g = problem.graph();
  for (const auto& r : trace.reads) {
    bool allowed = false;
    std::string datum;
    switch (r.kind) {
      case DatumKind::kDomain:
        datum = "domain:" + problem.variable(r.index).id;
        allowed = r.index == r.agent ||
                  std::binary_search(g.adjacency[r.agent].begin(),
                                     g.adjacency[r.agent].end(), r.index);
        break;
      case DatumKind::kUtility:
        datum = "utility:" + std::to_string(r.index);
        allowed = problem.utility(r.index).involves(r.agent);
        break;
      case DatumKind::kTreeMetadata:
        datum = "tree:" + problem.variable(r.index).id;
        allowed = r.index == r.agent;
        break;
      case DatumKind::kMessage:
        datum = "message:" + std::to_string(r.index);
        allowed = r.index < trace.messages.size() &&
                  trace.messages[r.index].receiver == r.agent;
        break;
      case DatumKind::kGlobal:
        datum = "global:problem";
        allowed = false;
        break;
    }
    if (!allowed) report.violations.push_back({r.agent, datum});
  }
  return report;
}

/// Wall-clock stopwatch in milliseconds.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace fdcop
