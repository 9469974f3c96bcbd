#pragma once

#include <optional>
#include <string>
#include <vector>

#include "snpkit/model.hpp"

namespace snpkit {

struct NeuronState {
  long spikes = 0;
  int remaining_closed = 0;            // 0 means open
  std::optional<long> pending;         // spikes held back by a delayed rule

  bool operator==(const NeuronState& o) const {
    return spikes == o.spikes && remaining_closed == o.remaining_closed && pending == o.pending;
  }
};

struct Configuration {
  std::vector<NeuronState> states;  // indexed like SystemDescription.neurons
  long clock = 0;

  bool operator==(const Configuration& o) const { return states == o.states; }
};

enum class EventKind { RuleApplied, SpikesDelivered, SpikesLost, NeuronOpened };

struct TraceEvent {
  long step = 0;
  EventKind kind{};
  int from = -1;
  int to = -1;
  long count = 0;
  int neuron = -1;
  int rule = -1;

  bool operator==(const TraceEvent&) const = default;
};

struct Trace {
  std::vector<TraceEvent> events;
  std::vector<Configuration> configs;  // configs[0] is the initial configuration
};

struct SinkArrival {
  long step = 0;
  long count = 0;
  bool operator==(const SinkArrival&) const = default;
};

struct SinkRecord {
  // One entry per sink neuron, in declaration order; arrivals coalesced per step.
  std::vector<std::pair<int, std::vector<SinkArrival>>> per_sink;
  long total_spikes = 0;
  std::optional<long> first_arrival;
  std::optional<long> total_runtime;  // step of the last arrival seen in the horizon
};

struct RunResult {
  Trace trace;
  SinkRecord sinks;
  bool halted = false;
};

Configuration initial_configuration(const SystemDescription& system);

// Index of the single enabled rule, or nothing. Throws NondeterminismError
// when two rules of the neuron are enabled at once.
std::optional<int> enabled_rule(const Neuron& neuron, const NeuronState& state);

struct StepResult {
  Configuration config;
  std::vector<TraceEvent> events;
};

// One synchronous global step:
//   A  every open neuron without a pending emission applies its enabled rule
//      against start-of-step spike counts; delayed rules close the neuron;
//   B  due emissions (d = 0 this step, or countdown hitting 0 this step) are
//      sent along every outgoing synapse; batches into neurons closed after
//      phase A are lost; delivered spikes become usable next step;
//   C  closed neurons that did not just apply count down; reaching 0 opens.
StepResult step(const SystemDescription& system, const Configuration& config);

// No rule can ever fire again: everything open, nothing pending, nothing enabled.
bool quiescent(const SystemDescription& system, const Configuration& config);

RunResult run(const SystemDescription& system, long horizon);

long lost_spike_count(const Trace& trace);

std::string config_to_text(const Configuration& config);
std::string event_to_text(const SystemDescription& system, const TraceEvent& ev);
// One JSON object per line; fields step, kind, from, to, count, neuron, rule.
std::string event_to_record(const SystemDescription& system, const TraceEvent& ev);

}  // namespace snpkit
