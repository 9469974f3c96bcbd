#include "snpkit/simulator.hpp"

#include <map>
#include <sstream>

#include "snpkit/errors.hpp"

namespace snpkit {

Configuration initial_configuration(const SystemDescription& system) {
  Configuration c;
  c.clock = 0;
  c.states.resize(system.neurons.size());
  for (size_t i = 0; i < system.neurons.size(); ++i)
    c.states[i].spikes = system.neurons[i].initial_spikes;
  return c;
}

std::optional<int> enabled_rule(const Neuron& neuron, const NeuronState& state) {
  if (state.remaining_closed != 0 || state.pending) return std::nullopt;
  std::optional<int> hit;
  for (size_t i = 0; i < neuron.rules.size(); ++i) {
    const Rule& r = neuron.rules[i];
    if (state.spikes >= r.consumed && r.guard.contains(state.spikes)) {
      if (hit)
        throw NondeterminismError("neuron '" + neuron.id + "': rules " + std::to_string(*hit) +
                                  " and " + std::to_string(i) +
                                  " enabled at once; deterministic systems only");
      hit = static_cast<int>(i);
    }
  }
  return hit;
}

StepResult step(const SystemDescription& sys, const Configuration& cur) {
  const int m = static_cast<int>(sys.neurons.size());
  const long t = cur.clock + 1;
  Configuration next = cur;
  next.clock = t;
  std::vector<TraceEvent> events;

  std::vector<char> releases(static_cast<size_t>(m), 0);
  std::vector<char> applied_delayed(static_cast<size_t>(m), 0);
  std::vector<long> release_amount(static_cast<size_t>(m), 0);

  // Phase A: rule application against start-of-step spike counts.
  for (int i = 0; i < m; ++i) {
    const NeuronState& st = cur.states[static_cast<size_t>(i)];
    if (st.remaining_closed == 0 && !st.pending) {
      if (auto ri = enabled_rule(sys.neurons[static_cast<size_t>(i)], st)) {
        const Rule& rule = sys.neurons[static_cast<size_t>(i)].rules[static_cast<size_t>(*ri)];
        next.states[static_cast<size_t>(i)].spikes -= rule.consumed;
        TraceEvent ev;
        ev.step = t;
        ev.kind = EventKind::RuleApplied;
        ev.neuron = i;
        ev.rule = *ri;
        events.push_back(ev);
        if (rule.delay == 0) {
          releases[static_cast<size_t>(i)] = 1;
          release_amount[static_cast<size_t>(i)] = rule.produced;
        } else {
          next.states[static_cast<size_t>(i)].remaining_closed = rule.delay;
          next.states[static_cast<size_t>(i)].pending = rule.produced;
          applied_delayed[static_cast<size_t>(i)] = 1;
        }
      }
    } else if (st.remaining_closed == 1) {
      // countdown reaches 0 this step: the held emission goes out now
      releases[static_cast<size_t>(i)] = 1;
      release_amount[static_cast<size_t>(i)] = st.pending.value_or(0);
    }
  }

  // Phase B: deliveries. A target is open for delivery unless it applied a
  // delayed rule this step or its countdown still has 2+ steps to go (a
  // countdown of 1 means it opens, and may receive, this very step).
  auto open_for_delivery = [&](int j) {
    return !applied_delayed[static_cast<size_t>(j)] &&
           cur.states[static_cast<size_t>(j)].remaining_closed < 2;
  };
  for (int i = 0; i < m; ++i) {
    if (!releases[static_cast<size_t>(i)] || release_amount[static_cast<size_t>(i)] == 0) continue;
    const long b = release_amount[static_cast<size_t>(i)];
    for (int j : sys.out_neighbors(i)) {
      TraceEvent ev;
      ev.step = t;
      ev.from = i;
      ev.to = j;
      ev.count = b;
      if (open_for_delivery(j)) {
        next.states[static_cast<size_t>(j)].spikes += b;
        ev.kind = EventKind::SpikesDelivered;
      } else {
        ev.kind = EventKind::SpikesLost;
      }
      events.push_back(ev);
    }
  }

  // Phase C: countdown for neurons that entered the step closed.
  for (int i = 0; i < m; ++i) {
    int r = cur.states[static_cast<size_t>(i)].remaining_closed;
    if (r == 0) continue;
    next.states[static_cast<size_t>(i)].remaining_closed = r - 1;
    if (r - 1 == 0) {
      next.states[static_cast<size_t>(i)].pending.reset();
      TraceEvent ev;
      ev.step = t;
      ev.kind = EventKind::NeuronOpened;
      ev.neuron = i;
      events.push_back(ev);
    }
  }
  return {std::move(next), std::move(events)};
}

bool quiescent(const SystemDescription& sys, const Configuration& config) {
  for (const NeuronState& st : config.states)
    if (st.remaining_closed != 0 || st.pending) return false;
  for (size_t i = 0; i < sys.neurons.size(); ++i)
    if (enabled_rule(sys.neurons[i], config.states[i])) return false;
  return true;
}

RunResult run(const SystemDescription& sys, long horizon) {
  if (horizon < 1) throw Error("horizon must be >= 1");
  auto errs = simulability_errors(sys);
  if (!errs.empty()) {
    std::string msg = "system is not executable:";
    for (auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }

  RunResult result;
  std::vector<int> sink_ids = sys.sinks();
  std::vector<char> is_sink(sys.neurons.size(), 0);
  for (int s : sink_ids) is_sink[static_cast<size_t>(s)] = 1;
  std::map<std::pair<int, long>, long> arrivals;  // (sink, step) -> count

  Configuration config = initial_configuration(sys);
  result.trace.configs.push_back(config);
  for (long s = 1; s <= horizon; ++s) {
    if (quiescent(sys, config)) {
      // one extra no-op step confirms nothing is left to fire
      StepResult probe = step(sys, config);
      if (!probe.events.empty()) throw Error("quiescence check failed");
      result.halted = true;
      break;
    }
    StepResult sr = step(sys, config);
    config = sr.config;
    for (const TraceEvent& ev : sr.events) {
      if (ev.kind == EventKind::SpikesDelivered && is_sink[static_cast<size_t>(ev.to)])
        arrivals[{ev.to, ev.step}] += ev.count;
      result.trace.events.push_back(ev);
    }
    result.trace.configs.push_back(config);
  }
  if (!result.halted && quiescent(sys, config)) result.halted = true;

  for (int s : sink_ids) {
    std::vector<SinkArrival> list;
    for (auto& [key, count] : arrivals)
      if (key.first == s) list.push_back({key.second, count});
    result.sinks.per_sink.emplace_back(s, std::move(list));
  }
  for (auto& [sink, list] : result.sinks.per_sink) {
    for (const SinkArrival& a : list) {
      result.sinks.total_spikes += a.count;
      if (!result.sinks.first_arrival || a.step < *result.sinks.first_arrival)
        result.sinks.first_arrival = a.step;
      if (!result.sinks.total_runtime || a.step > *result.sinks.total_runtime)
        result.sinks.total_runtime = a.step;
    }
  }
  return result;
}

long lost_spike_count(const Trace& trace) {
  long lost = 0;
  for (const TraceEvent& ev : trace.events)
    if (ev.kind == EventKind::SpikesLost) lost += ev.count;
  return lost;
}

std::string config_to_text(const Configuration& config) {
  std::ostringstream out;
  for (size_t i = 0; i < config.states.size(); ++i) {
    if (i) out << " ";
    out << config.states[i].spikes << "/" << config.states[i].remaining_closed;
  }
  return out.str();
}

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::RuleApplied:
      return "rule-applied";
    case EventKind::SpikesDelivered:
      return "spikes-delivered";
    case EventKind::SpikesLost:
      return "spikes-lost";
    case EventKind::NeuronOpened:
      return "neuron-opened";
  }
  return "?";
}

}  // namespace

std::string event_to_text(const SystemDescription& sys, const TraceEvent& ev) {
  std::ostringstream out;
  out << "t=" << ev.step << " " << kind_name(ev.kind);
  switch (ev.kind) {
    case EventKind::RuleApplied:
      out << " " << sys.neurons[static_cast<size_t>(ev.neuron)].id << " rule=" << ev.rule;
      break;
    case EventKind::SpikesDelivered:
    case EventKind::SpikesLost:
      out << " " << sys.neurons[static_cast<size_t>(ev.from)].id << " -> "
          << sys.neurons[static_cast<size_t>(ev.to)].id << " count=" << ev.count;
      break;
    case EventKind::NeuronOpened:
      out << " " << sys.neurons[static_cast<size_t>(ev.neuron)].id;
      break;
  }
  return out.str();
}

std::string event_to_record(const SystemDescription& sys, const TraceEvent& ev) {
  std::ostringstream out;
  out << "{\"step\":" << ev.step << ",\"kind\":\"" << kind_name(ev.kind) << "\"";
  switch (ev.kind) {
    case EventKind::RuleApplied:
      out << ",\"neuron\":\"" << sys.neurons[static_cast<size_t>(ev.neuron)].id
          << "\",\"rule\":" << ev.rule;
      break;
    case EventKind::SpikesDelivered:
    case EventKind::SpikesLost:
      out << ",\"from\":\"" << sys.neurons[static_cast<size_t>(ev.from)].id << "\",\"to\":\""
          << sys.neurons[static_cast<size_t>(ev.to)].id << "\",\"count\":" << ev.count;
      break;
    case EventKind::NeuronOpened:
      out << ",\"neuron\":\"" << sys.neurons[static_cast<size_t>(ev.neuron)].id << "\"";
      break;
  }
  out << "}";
  return out.str();
}

}  // namespace snpkit
