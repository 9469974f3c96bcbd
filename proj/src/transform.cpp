#include "snpkit/transform.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "snpkit/equivalence.hpp"
#include "snpkit/errors.hpp"

namespace snpkit {

namespace {

bool is_relay(const Neuron& n) {
  return n.rules.size() == 1 && n.rules.front() == make_relay_rule();
}

Neuron accumulator_neuron(const std::string& id, long n) {
  Neuron out;
  out.id = id;
  out.rules.push_back(make_accumulator_rule(n));
  return out;
}

Neuron reservoir_neuron(const std::string& id, long spikes) {
  Neuron out;
  out.id = id;
  out.initial_spikes = spikes;
  out.rules.push_back(make_reservoir_rule());
  return out;
}

Neuron sink_neuron(const std::string& id) {
  Neuron out;
  out.id = id;
  return out;
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Standalone construct rewrites

RewriteResult eliminate_sequential(const std::vector<std::string>& path,
                                   const std::vector<int>& delays) {
  if (path.size() < 2) throw Error("sequential path needs at least two neurons");
  if (delays.size() != path.size()) throw Error("one delay per path neuron required");

  std::vector<size_t> delayed;
  for (size_t i = 0; i < path.size(); ++i)
    if (delays[i] > 0) delayed.push_back(i);
  if (delayed.size() > 2)
    throw OutOfScopeError("sequential path with " + std::to_string(delayed.size()) +
                          " delayed neurons is not covered");
  if (delayed.size() == 2 && delays[delayed[0]] < delays[delayed[1]])
    throw OutOfScopeError("sequential path with d1 < d2 risks lost spikes; left open");

  RewriteResult rr;
  if (delayed.empty()) {
    // identity: plain relay chain
    Neuron head = make_relay_neuron(path[0]);
    head.initial_spikes = 1;
    rr.fragment.add_neuron(head);
    for (size_t i = 1; i + 1 < path.size(); ++i)
      rr.fragment.add_neuron(make_relay_neuron(path[i]));
    rr.fragment.add_neuron(sink_neuron(path.back()));
    for (size_t i = 0; i + 1 < path.size(); ++i) rr.fragment.add_synapse(path[i], path[i + 1]);
    for (const std::string& id : path) rr.boundary[id] = {id};
    rr.expected_offset = 0;
    rr.notes = "sequential, no delay: identity relay chain";
  } else {
    long n = 1;
    for (size_t i : delayed) n *= 1 + delays[i];
    const std::string acc_id = path[0] + "_acc";
    rr.fragment.add_neuron(reservoir_neuron(path[0], n));
    rr.fragment.add_neuron(accumulator_neuron(acc_id, n));
    for (size_t i = 1; i + 1 < path.size(); ++i)
      rr.fragment.add_neuron(make_relay_neuron(path[i]));
    rr.fragment.add_neuron(sink_neuron(path.back()));
    rr.fragment.add_synapse(path[0], acc_id);
    rr.fragment.add_synapse(acc_id, path[1]);
    for (size_t i = 1; i + 1 < path.size(); ++i) rr.fragment.add_synapse(path[i], path[i + 1]);
    rr.boundary[path[0]] = {path[0], acc_id};
    for (size_t i = 1; i < path.size(); ++i) rr.boundary[path[i]] = {path[i]};
    rr.expected_offset =
        delayed.size() == 1 ? 1 : 1 + static_cast<long>(delays[delayed[0]]) * delays[delayed[1]];
    rr.notes = delayed.size() == 1
                   ? "sequential, one delay: reservoir of 1+d spikes and accumulator"
                   : "sequential, two delays: reservoir of (1+d1)(1+d2) spikes and accumulator";
  }
  rr.fragment.declared_source = rr.fragment.index_of(path[0]);
  rr.fragment.declared_sinks = {rr.fragment.index_of(path.back())};
  rr.sink_factors[path.back()] = 1;
  return rr;
}

RewriteResult eliminate_iteration(const std::vector<std::string>& cycle,
                                  const std::vector<std::string>& taps,
                                  const std::vector<int>& delays) {
  if (cycle.size() != 2)
    throw OutOfScopeError("iteration rewrite covers two-neuron cycles only");
  if (delays.size() != cycle.size()) throw Error("one delay per cycle neuron required");
  int delayed = 0;
  long n = 1;
  for (int d : delays)
    if (d > 0) {
      ++delayed;
      n *= 1 + d;
    }
  if (delayed > 2) throw OutOfScopeError("iteration with more than two delayed neurons");

  RewriteResult rr;
  Neuron loop_a = make_relay_neuron(cycle[0]);
  loop_a.initial_spikes = 1;
  rr.fragment.add_neuron(loop_a);
  rr.fragment.add_neuron(make_relay_neuron(cycle[1]));
  rr.fragment.add_synapse(cycle[0], cycle[1]);
  rr.fragment.add_synapse(cycle[1], cycle[0]);

  const std::string gate_id = cycle[0] + "_gate";
  rr.fragment.add_neuron(accumulator_neuron(gate_id, std::max(n, 1L)));
  rr.fragment.add_synapse(cycle[0], gate_id);
  rr.fragment.add_synapse(cycle[1], gate_id);

  std::string feed = gate_id;
  if (delayed == 2) {
    const std::string relay_id = cycle[0] + "_gr";
    rr.fragment.add_neuron(make_relay_neuron(relay_id));
    rr.fragment.add_synapse(gate_id, relay_id);
    feed = relay_id;
  }
  for (const std::string& tap : taps) {
    rr.fragment.add_neuron(sink_neuron(tap));
    rr.fragment.add_synapse(feed, tap);
    rr.fragment.declared_sinks.push_back(rr.fragment.index_of(tap));
    rr.sink_factors[tap] = 1;
  }
  rr.boundary[cycle[0]] = {cycle[0], gate_id};
  rr.boundary[cycle[1]] = {cycle[1]};
  // the gate threshold depends only on the delays, so the same fragment
  // serves whichever cycle neuron carries them
  rr.expected_offset = delayed == 2 ? 1 + static_cast<long>(delays[0]) * delays[1] : 0;
  rr.notes = "iteration: delay-free loop with spike-count gate a^" + std::to_string(n);
  return rr;
}

RewriteResult eliminate_split(const std::string& parent, const std::vector<std::string>& children,
                              int parent_delay, const std::vector<int>& child_delays) {
  if (children.size() < 2) throw Error("split needs at least two children");
  if (child_delays.size() != children.size()) throw Error("one delay per child required");

  std::vector<size_t> delayed_children;
  for (size_t i = 0; i < children.size(); ++i)
    if (child_delays[i] > 0) delayed_children.push_back(i);
  for (size_t i = 1; i < delayed_children.size(); ++i)
    if (child_delays[delayed_children[i]] != child_delays[delayed_children[0]])
      throw OutOfScopeError("split with distinct child delays is not covered");
  if (parent_delay > 0 && !delayed_children.empty())
    throw OutOfScopeError("split with both parent and child delays is not covered");

  RewriteResult rr;
  if (parent_delay > 0) {
    // the split neuron itself is delayed: reservoir feed, parent accumulates
    const long n = 1 + parent_delay;
    const std::string src = parent + "_src";
    rr.fragment.add_neuron(reservoir_neuron(src, n));
    rr.fragment.add_neuron(accumulator_neuron(parent, n));
    rr.fragment.add_synapse(src, parent);
    for (const std::string& c : children) {
      rr.fragment.add_neuron(sink_neuron(c));
      rr.fragment.add_synapse(parent, c);
      rr.fragment.declared_sinks.push_back(rr.fragment.index_of(c));
      rr.sink_factors[c] = 1;
    }
    rr.boundary[parent] = {src, parent};
    for (const std::string& c : children) rr.boundary[c] = {c};
    rr.expected_offset = 0;
    rr.notes = "split, parent delay: reservoir of " + std::to_string(n) + " spikes feeds the split";
  } else if (!delayed_children.empty()) {
    const long d = child_delays[delayed_children[0]];
    const long n = 1 + d;
    const bool all_delayed = delayed_children.size() == children.size();
    rr.fragment.add_neuron(reservoir_neuron(parent, n));
    for (size_t i = 0; i < children.size(); ++i) {
      const std::string& c = children[i];
      if (child_delays[i] > 0)
        rr.fragment.add_neuron(accumulator_neuron(c, n));
      else
        rr.fragment.add_neuron(make_relay_neuron(c));
      rr.fragment.add_synapse(parent, c);
      const std::string out = c + "_sink";
      rr.fragment.add_neuron(sink_neuron(out));
      rr.fragment.add_synapse(c, out);
      rr.fragment.declared_sinks.push_back(rr.fragment.index_of(out));
      rr.sink_factors[out] = child_delays[i] > 0 ? 1 : n;
      rr.boundary[c] = {c};
    }
    rr.boundary[parent] = {parent};
    rr.expected_offset = 0;
    rr.expected_count_factor = all_delayed ? 1 : n;
    rr.notes = all_delayed
                   ? "split, equal child delays: every child accumulates " + std::to_string(n)
                   : "split, one child delay: plain branch carries factor " + std::to_string(n);
  } else {
    // no delay anywhere: identity split
    Neuron p = make_relay_neuron(parent);
    p.initial_spikes = 1;
    rr.fragment.add_neuron(p);
    for (const std::string& c : children) {
      rr.fragment.add_neuron(sink_neuron(c));
      rr.fragment.add_synapse(parent, c);
      rr.fragment.declared_sinks.push_back(rr.fragment.index_of(c));
      rr.sink_factors[c] = 1;
    }
    rr.boundary[parent] = {parent};
    rr.expected_offset = 0;
    rr.notes = "split, no delay: identity";
  }
  if (!rr.fragment.declared_source) rr.fragment.declared_source = rr.fragment.index_of(parent);
  return rr;
}

RewriteResult eliminate_join(const std::vector<std::string>& parents, const std::string& junction,
                             const std::string& child, const std::vector<int>& parent_delays,
                             int junction_delay) {
  if (parents.size() < 2) throw Error("join needs at least two parents");
  if (parent_delays.size() != parents.size()) throw Error("one delay per parent required");

  std::vector<size_t> delayed;
  for (size_t i = 0; i < parents.size(); ++i)
    if (parent_delays[i] > 0) delayed.push_back(i);
  for (size_t i = 1; i < delayed.size(); ++i)
    if (parent_delays[delayed[i]] != parent_delays[delayed[0]])
      throw OutOfScopeError("join with distinct parent delays is not covered");
  if (!delayed.empty() && junction_delay > 0)
    throw OutOfScopeError("join with both parent and junction delays is not covered");

  RewriteResult rr;
  for (size_t i = 0; i < parents.size(); ++i) {
    const std::string& p = parents[i];
    if (parent_delays[i] > 0) {
      const long n = 1 + parent_delays[i];
      const std::string acc = p + "_acc";
      rr.fragment.add_neuron(reservoir_neuron(p, n));
      rr.fragment.add_neuron(accumulator_neuron(acc, n));
      rr.fragment.add_synapse(p, acc);
      rr.boundary[p] = {p, acc};
    } else {
      Neuron relay = make_relay_neuron(p);
      relay.initial_spikes = 1;
      rr.fragment.add_neuron(relay);
      rr.boundary[p] = {p};
    }
  }
  // the junction waits for one spike per parent
  rr.fragment.add_neuron(accumulator_neuron(junction, static_cast<long>(parents.size())));
  for (size_t i = 0; i < parents.size(); ++i) {
    const std::string from = parent_delays[i] > 0 ? parents[i] + "_acc" : parents[i];
    rr.fragment.add_synapse(from, junction);
  }
  rr.boundary[junction] = {junction};

  std::string feed = junction;
  for (int i = 1; i <= junction_delay; ++i) {
    const std::string r = junction + "_r" + std::to_string(i);
    rr.fragment.add_neuron(make_relay_neuron(r));
    rr.fragment.add_synapse(feed, r);
    feed = r;
    rr.boundary[junction].push_back(r);
  }
  rr.fragment.add_neuron(sink_neuron(child));
  rr.fragment.add_synapse(feed, child);
  rr.boundary[child] = {child};
  rr.fragment.declared_sinks = {rr.fragment.index_of(child)};
  rr.sink_factors[child] = 1;
  rr.expected_offset = delayed.empty() ? 0 : 1;
  rr.notes = junction_delay > 0
                 ? "join, junction delay: " + std::to_string(junction_delay) +
                       " relays appended behind the junction"
                 : (delayed.empty() ? "join, no delay: identity"
                                    : "join, parent delay: reservoir and accumulator on the "
                                      "delayed side, one step of offset");
  return rr;
}

SystemDescription make_normalizer(int d) {
  if (d < 1) throw Error("normalizer requires d >= 1");
  SystemDescription frag;
  frag.add_neuron(accumulator_neuron("norm", 1 + d));
  return frag;
}

// ---------------------------------------------------------------------------
// Whole-system transform

namespace {

struct Surgeon {
  SystemDescription sys;
  std::vector<std::string> applied;
  std::map<int, long> reservoirs;  // source index -> drain size already installed

  explicit Surgeon(const SystemDescription& input) : sys(input) {}

  const std::string& id(int i) const { return sys.neurons[static_cast<size_t>(i)].id; }
  Neuron& neuron(int i) { return sys.neurons[static_cast<size_t>(i)]; }

  int delay_of(int i) const {
    const Neuron& n = sys.neurons[static_cast<size_t>(i)];
    return n.rules.empty() ? 0 : n.rules.front().delay;
  }

  void log(const std::string& line) { applied.push_back(line); }

  // Walks backwards from target to the in-degree-0 neuron feeding it through
  // plain relays; returns that source. The walk guards the reservoir
  // conversion: every neuron on the feed must forward the 1-per-step train
  // unchanged.
  int feed_source(int target) {
    int cur = target;
    while (true) {
      auto preds = sys.in_neighbors(cur);
      if (preds.empty()) return cur;
      if (preds.size() != 1)
        throw OutOfScopeError("neuron '" + id(cur) + "' is fed by more than one synapse; "
                              "the reservoir feed must be a simple chain");
      int p = preds[0];
      if (!is_relay(neuron(p)))
        throw OutOfScopeError("neuron '" + id(p) + "' on the feed to '" + id(target) +
                              "' is not a plain relay");
      if (sys.out_degree(p) != 1)
        throw OutOfScopeError("neuron '" + id(p) + "' on the feed to '" + id(target) +
                              "' branches elsewhere");
      cur = p;
    }
  }

  // Turns the in-degree-0 neuron feeding target into a reservoir draining n
  // spikes one per step.
  int install_reservoir(int target, long n) {
    int src = feed_source(target);
    auto it = reservoirs.find(src);
    if (it != reservoirs.end()) {
      if (it->second != n)
        throw OutOfScopeError("two rewrites need reservoirs of different size at source '" +
                              id(src) + "'");
      return src;
    }
    Neuron& s = neuron(src);
    if (s.initial_spikes != 1)
      throw OutOfScopeError("source '" + s.id + "' holds " + std::to_string(s.initial_spikes) +
                            " initial spikes; only single-spike sources are covered");
    if (!is_relay(s))
      throw OutOfScopeError("source '" + s.id +
                            "' is not a plain relay; combined delay patterns at the source "
                            "are not covered");
    s.initial_spikes = n;
    s.rules = {make_reservoir_rule()};
    reservoirs[src] = n;
    return src;
  }

  void make_relay(int i) {
    neuron(i).rules = {make_relay_rule()};
  }

  // fresh relay chain of the given length behind neuron i, re-targeting all
  // current out-edges of i to the chain end
  void append_relay_chain(int i, int length) {
    if (length <= 0) return;
    auto outs = sys.out_neighbors(i);
    for (int t : outs) sys.remove_synapse(i, t);
    int prev = i;
    for (int k = 1; k <= length; ++k) {
      int r = sys.add_neuron(make_relay_neuron(sys.fresh_id(id(i) + "_r" + std::to_string(k))));
      sys.add_synapse(prev, r);
      prev = r;
    }
    for (int t : outs) sys.add_synapse(prev, t);
  }

  void rewrite_sequential(const SequentialConstruct& c, const std::vector<int>& delayed) {
    const std::vector<int>& path = c.path;
    if (sys.in_degree(path.front()) != 0)
      throw OutOfScopeError("delayed chain through '" + id(path.front()) +
                            "' is not fed by the source; not covered");
    std::vector<int> ordered;
    for (int v : path)
      if (delay_of(v) > 0) ordered.push_back(v);
    if (ordered.size() > 2)
      throw OutOfScopeError("sequential path with more than two delayed neurons");
    if (ordered.size() == 2 && delay_of(ordered[0]) < delay_of(ordered[1]))
      throw OutOfScopeError("sequential path with d1 < d2 risks lost spikes; left open");
    long n = 1;
    for (int v : ordered) n *= 1 + delay_of(v);

    int head = path.front();
    Neuron& h = neuron(head);
    if (h.initial_spikes != 1)
      throw OutOfScopeError("source '" + h.id + "' holds " + std::to_string(h.initial_spikes) +
                            " initial spikes; only single-spike sources are covered");
    h.initial_spikes = n;
    h.rules = {make_reservoir_rule()};
    reservoirs[head] = n;

    // accumulator between the head and the rest of the chain
    int next = path[1];
    int acc = sys.add_neuron(accumulator_neuron(sys.fresh_id(id(head) + "_acc"), n));
    sys.remove_synapse(head, next);
    sys.add_synapse(head, acc);
    sys.add_synapse(acc, next);

    for (int v : ordered)
      if (v != head) make_relay(v);
    log("sequential " + id(path.front()) + "->...->" + id(path.back()) + ": reservoir of " +
        std::to_string(n) + " spikes, accumulator a^" + std::to_string(n));
    (void)delayed;
  }

  void rewrite_iteration(const IterationConstruct& c) {
    if (c.cycle.size() != 2)
      throw OutOfScopeError("iteration rewrite covers two-neuron cycles only");
    long n = 1;
    int delayed = 0;
    for (int v : c.cycle)
      if (delay_of(v) > 0) {
        n *= 1 + delay_of(v);
        ++delayed;
      }
    for (int tap : c.taps)
      if (!sys.neurons[static_cast<size_t>(tap)].rules.empty())
        throw OutOfScopeError("iteration tap '" + id(tap) +
                              "' has rules; cycles may only feed sinks");

    for (int v : c.cycle) make_relay(v);
    // collect and detach tap edges
    for (int v : c.cycle)
      for (int t : sys.out_neighbors(v))
        if (std::find(c.cycle.begin(), c.cycle.end(), t) == c.cycle.end())
          sys.remove_synapse(v, t);

    int gate = sys.add_neuron(accumulator_neuron(sys.fresh_id(id(c.cycle[0]) + "_gate"), n));
    for (int v : c.cycle) sys.add_synapse(v, gate);
    int feed = gate;
    if (delayed == 2) {
      feed = sys.add_neuron(make_relay_neuron(sys.fresh_id(id(c.cycle[0]) + "_gr")));
      sys.add_synapse(gate, feed);
    }
    for (int tap : c.taps) sys.add_synapse(feed, tap);
    log("iteration " + id(c.cycle[0]) + "<->" + id(c.cycle[1]) + ": delay-free loop, gate a^" +
        std::to_string(n));
  }

  void rewrite_split(const SplitConstruct& c) {
    const int parent_d = delay_of(c.parent);
    std::vector<int> delayed_children;
    for (int ch : c.children)
      if (delay_of(ch) > 0) delayed_children.push_back(ch);

    if (parent_d > 0 && !delayed_children.empty())
      throw OutOfScopeError("split with both parent and child delays is not covered");

    if (parent_d > 0) {
      const long n = 1 + parent_d;
      if (sys.in_degree(c.parent) == 0) {
        // the delayed split neuron is itself the source: prepend a reservoir
        Neuron& p = neuron(c.parent);
        if (p.initial_spikes != 1)
          throw OutOfScopeError("source '" + p.id + "' holds more than one spike");
        p.initial_spikes = 0;
        int res = sys.add_neuron(reservoir_neuron(sys.fresh_id(p.id + "_src"), n));
        sys.add_synapse(res, c.parent);
        reservoirs[res] = n;
      } else {
        install_reservoir(c.parent, n);
      }
      neuron(c.parent).rules = {make_accumulator_rule(n)};
      log("split at " + id(c.parent) + ": parent delay, reservoir of " + std::to_string(n) +
          " spikes, parent accumulates a^" + std::to_string(n));
      return;
    }
    if (delayed_children.empty()) return;

    const int d = delay_of(delayed_children[0]);
    for (int ch : delayed_children)
      if (delay_of(ch) != d)
        throw OutOfScopeError("split with distinct child delays is not covered");
    const long n = 1 + d;
    install_reservoir(c.parent, n);
    if (!is_relay(neuron(c.parent)) && reservoirs.find(c.parent) == reservoirs.end())
      throw OutOfScopeError("split parent '" + id(c.parent) + "' is not a plain relay");

    for (int ch : delayed_children) {
      if (!sys.neurons[static_cast<size_t>(ch)].rules.front().guard.is_canonical_power())
        throw OutOfScopeError("delayed split child '" + id(ch) + "' has a non-plain rule");
      neuron(ch).rules = {make_accumulator_rule(n)};
    }
    // plain branches now carry 1+d spikes; normalize wherever they feed a
    // rule-bearing neuron, leave sink targets to the declared count factor
    for (int ch : c.children) {
      if (std::find(delayed_children.begin(), delayed_children.end(), ch) != delayed_children.end())
        continue;
      for (int t : sys.out_neighbors(ch)) {
        if (sys.neurons[static_cast<size_t>(t)].rules.empty()) continue;
        int norm =
            sys.add_neuron(accumulator_neuron(sys.fresh_id(id(ch) + "_norm"), n));
        sys.remove_synapse(ch, t);
        sys.add_synapse(ch, norm);
        sys.add_synapse(norm, t);
        log("normalizer a^" + std::to_string(n) + " inserted between " + id(ch) + " and " + id(t));
      }
    }
    log("split at " + id(c.parent) + ": child delay " + std::to_string(d) + ", reservoir of " +
        std::to_string(n) + " spikes, delayed branch accumulates");
  }

  void rewrite_junction(const JoinConstruct& c) {
    const int d = delay_of(c.junction);
    if (d <= 0) return;
    neuron(c.junction).rules.front().delay = 0;
    append_relay_chain(c.junction, d);
    log("join at " + id(c.junction) + ": junction delay " + std::to_string(d) +
        " replaced by a relay chain");
  }

  void rewrite_join_parent(const JoinConstruct& c, int parent) {
    const int d = delay_of(parent);
    const long n = 1 + d;
    if (sys.in_degree(parent) != 0)
      throw OutOfScopeError("delayed join parent '" + id(parent) +
                            "' is not a source; not covered");
    if (sys.out_degree(parent) != 1)
      throw OutOfScopeError("delayed join parent '" + id(parent) + "' branches elsewhere");
    Neuron& p = neuron(parent);
    if (p.initial_spikes != 1)
      throw OutOfScopeError("source '" + p.id + "' holds more than one spike");
    p.initial_spikes = n;
    p.rules = {make_reservoir_rule()};
    reservoirs[parent] = n;
    int acc = sys.add_neuron(accumulator_neuron(sys.fresh_id(p.id + "_acc"), n));
    sys.remove_synapse(parent, c.junction);
    sys.add_synapse(parent, acc);
    sys.add_synapse(acc, c.junction);
    log("join at " + id(c.junction) + ": parent " + id(parent) + " delay " + std::to_string(d) +
        ", reservoir of " + std::to_string(n) + " spikes and accumulator");
  }
};

}  // namespace

std::string TransformResult::report() const {
  std::ostringstream out;
  if (!rewritten) {
    out << "no rewrites: system is already delay-free\n";
  } else {
    out << "rewrites applied:\n";
    for (const std::string& line : applied) out << "  " << line << "\n";
  }
  out << "per-sink contract (measured):\n";
  for (auto& [sink, k] : sink_offsets) {
    out << "  sink " << sink << ": offset " << k;
    auto it = sink_factors.find(sink);
    out << ", count factor " << (it == sink_factors.end() ? 1 : it->second) << "\n";
  }
  return out.str();
}

TransformResult transform(const SystemDescription& input) {
  ValidationReport vr = validate_restricted(input);
  if (vr.has(ViolationKind::LostSpikeRisk)) {
    std::string detail;
    for (const Violation& v : vr.items)
      if (v.kind == ViolationKind::LostSpikeRisk) detail += "\n  " + v.message;
    throw OutOfScopeError(
        "chain with d1 < d2 can lose spikes; its delay-free form is an open problem" + detail);
  }
  if (!vr.ok())
    throw ValidationError("restricted profile violated:\n" + vr.to_text());

  RoutingGraph rg = classify_constructs(input);

  TransformResult out;
  if (input.delay_free()) {
    out.system = input;
    out.rewritten = false;
    for (int s : input.sinks()) {
      const std::string& id = input.neurons[static_cast<size_t>(s)].id;
      out.sink_offsets[id] = 0;
      out.sink_factors[id] = 1;
    }
    return out;
  }

  // Assign every delayed neuron to the construct that rewrites it:
  // cycle > split parent > split child > junction > join parent > chain.
  Surgeon surgeon(input);
  std::vector<char> handled(input.neurons.size(), 0);
  std::vector<int> delayed_neurons;
  for (size_t i = 0; i < input.neurons.size(); ++i)
    if (!input.neurons[i].rules.empty() && input.neurons[i].rules.front().delay > 0)
      delayed_neurons.push_back(static_cast<int>(i));

  auto in_cycle = [&](int v, const IterationConstruct& it) {
    return std::find(it.cycle.begin(), it.cycle.end(), v) != it.cycle.end();
  };

  // iterations
  for (const Construct& c : rg.constructs) {
    auto* it = std::get_if<IterationConstruct>(&c);
    if (!it) continue;
    bool any = false;
    for (int v : it->cycle) any = any || (!handled[static_cast<size_t>(v)] &&
                                          surgeon.delay_of(v) > 0);
    if (!any) continue;
    surgeon.rewrite_iteration(*it);
    for (int v : it->cycle) handled[static_cast<size_t>(v)] = 1;
  }
  // splits (parent or children)
  for (const Construct& c : rg.constructs) {
    auto* sp = std::get_if<SplitConstruct>(&c);
    if (!sp) continue;
    bool parent_delay = !handled[static_cast<size_t>(sp->parent)] && surgeon.delay_of(sp->parent) > 0;
    bool child_delay = false;
    for (int ch : sp->children)
      child_delay = child_delay || (!handled[static_cast<size_t>(ch)] && surgeon.delay_of(ch) > 0);
    if (!parent_delay && !child_delay) continue;
    surgeon.rewrite_split(*sp);
    if (parent_delay) handled[static_cast<size_t>(sp->parent)] = 1;
    for (int ch : sp->children) handled[static_cast<size_t>(ch)] = 1;
  }
  // junctions
  for (const Construct& c : rg.constructs) {
    auto* j = std::get_if<JoinConstruct>(&c);
    if (!j) continue;
    if (!handled[static_cast<size_t>(j->junction)] && surgeon.delay_of(j->junction) > 0) {
      surgeon.rewrite_junction(*j);
      handled[static_cast<size_t>(j->junction)] = 1;
    }
  }
  // join parents
  for (const Construct& c : rg.constructs) {
    auto* j = std::get_if<JoinConstruct>(&c);
    if (!j) continue;
    std::vector<int> delayed;
    for (int p : j->parents)
      if (!handled[static_cast<size_t>(p)] && surgeon.delay_of(p) > 0) delayed.push_back(p);
    for (size_t i = 1; i < delayed.size(); ++i)
      if (surgeon.delay_of(delayed[i]) != surgeon.delay_of(delayed[0]))
        throw OutOfScopeError("join with distinct parent delays is not covered");
    for (int p : delayed) {
      surgeon.rewrite_join_parent(*j, p);
      handled[static_cast<size_t>(p)] = 1;
    }
  }
  // residual chains
  for (const Construct& c : rg.constructs) {
    auto* s = std::get_if<SequentialConstruct>(&c);
    if (!s) continue;
    std::vector<int> delayed;
    for (int v : s->path)
      if (!handled[static_cast<size_t>(v)] && surgeon.delay_of(v) > 0) delayed.push_back(v);
    if (delayed.empty()) continue;
    surgeon.rewrite_sequential(*s, delayed);
    for (int v : s->path) handled[static_cast<size_t>(v)] = 1;
  }

  for (int v : delayed_neurons) {
    bool ok = handled[static_cast<size_t>(v)] || surgeon.delay_of(v) == 0;
    // a neuron handled by one construct may still carry a delay only if a
    // later rewrite was expected to clear it
    if (!ok)
      throw OutOfScopeError("delayed neuron '" + input.neurons[static_cast<size_t>(v)].id +
                            "' does not sit in any covered construct");
  }
  if (!surgeon.sys.delay_free())
    throw Error("internal: rewrite left a delayed rule in place");

  out.system = std::move(surgeon.sys);
  out.applied = std::move(surgeon.applied);
  out.rewritten = true;

  // Verify against the original and record the measured contract.
  long horizon = std::max({compare_horizon(input), input.default_horizon(),
                           out.system.default_horizon()});
  EquivalenceVerdict verdict = compare(input, out.system, horizon);
  if (!verdict.accepted)
    throw Error("internal: rewrite failed verification:\n" + verdict.report());
  out.sink_offsets = verdict.sink_offsets;
  out.sink_factors = verdict.count_factors;
  return out;
}

}  // namespace snpkit
