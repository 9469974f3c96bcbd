#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "snpkit/guard.hpp"

namespace snpkit {

// E/a^c -> a^b ; d. produced == 0 is a forgetting rule.
struct Rule {
  UnaryGuard guard;
  long consumed = 1;
  long produced = 1;
  int delay = 0;

  bool is_forgetting() const { return produced == 0; }
  bool operator==(const Rule& o) const {
    return guard == o.guard && consumed == o.consumed && produced == o.produced &&
           delay == o.delay;
  }
};

struct Neuron {
  std::string id;
  long initial_spikes = 0;
  std::vector<Rule> rules;

  bool operator==(const Neuron& o) const {
    return id == o.id && initial_spikes == o.initial_spikes && rules == o.rules;
  }
};

// Static description of a system: neurons in declaration order, synapses as
// ordered index pairs, optional declared source and declared sinks.
class SystemDescription {
 public:
  std::vector<Neuron> neurons;
  std::set<std::pair<int, int>> synapses;
  std::optional<int> declared_source;
  std::vector<int> declared_sinks;

  int index_of(const std::string& id) const;
  const Neuron& neuron_by_id(const std::string& id) const;

  // Adds a neuron; id must be unique.
  int add_neuron(Neuron n);
  // Adds a synapse by ids; both must exist, self-loops rejected.
  void add_synapse(const std::string& from, const std::string& to);
  void add_synapse(int from, int to);
  void remove_synapse(int from, int to);

  std::vector<int> out_neighbors(int i) const;
  std::vector<int> in_neighbors(int i) const;
  int out_degree(int i) const;
  int in_degree(int i) const;

  // Declared sinks if any, otherwise all out-degree-0 neurons in order.
  std::vector<int> sinks() const;
  // All in-degree-0 neurons in declaration order.
  std::vector<int> source_candidates() const;
  // The declared source, or the unique in-degree-0 neuron; -1 if ambiguous.
  int source() const;

  int max_delay() const;
  long total_delay() const;
  bool delay_free() const;
  long total_initial_spikes() const;

  // 10 * (1 + sum of delays) * m; generous for every fixture in this repo.
  long default_horizon() const;

  // Derives an id not yet in use, from base, base_2, base_3, ...
  std::string fresh_id(const std::string& base) const;

  bool operator==(const SystemDescription& o) const {
    return neurons == o.neurons && synapses == o.synapses &&
           declared_source == o.declared_source && declared_sinks == o.declared_sinks;
  }
};

enum class ViolationKind {
  MultiRule,
  SourceDegree,
  SinkDegree,
  SpikePlacement,
  NoSink,
  ForgettingDelay,
  LostSpikeRisk,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool ok() const { return items.empty(); }
  bool only_lost_spike_risk() const;
  bool has(ViolationKind k) const;
  std::string to_text() const;
};

// Checks the restricted profile: one rule per neuron, source/sink degrees,
// spike placement (each in-degree-0 neuron holds exactly one spike; any other
// spike carrier sits on a cycle with one spike), forgetting rules without
// delay, and flags every synapse whose head has a smaller delay than its tail
// as lost-spike risk. Violations are data, not failures.
ValidationReport validate_restricted(const SystemDescription& system);

// Problems that prevent execution outright (currently: delayed forgetting
// rules, whose closed-state bookkeeping would be unobservable).
std::vector<std::string> simulability_errors(const SystemDescription& system);

// Splits the edge from->to with the given neuron: from -> n -> to.
SystemDescription insert_on_edge(const SystemDescription& system, const std::string& from,
                                 const std::string& to, Neuron n);

// Redirects every incoming synapse of the sink through a fresh copy of n.
SystemDescription insert_before_sink(const SystemDescription& system,
                                     const std::string& sink_id, Neuron n);

Rule make_relay_rule();                 // a -> a
Rule make_reservoir_rule();             // a+/a -> a
Rule make_accumulator_rule(long n);     // a^n -> a
Neuron make_relay_neuron(const std::string& id);

}  // namespace snpkit
