#include "snpkit/equivalence.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "snpkit/errors.hpp"

namespace snpkit {

std::vector<std::pair<std::string, std::vector<SinkArrival>>> sink_schedule(
    const SystemDescription& system, long horizon) {
  RunResult r = run(system, horizon);
  std::vector<std::pair<std::string, std::vector<SinkArrival>>> out;
  for (auto& [sink, list] : r.sinks.per_sink)
    out.emplace_back(system.neurons[static_cast<size_t>(sink)].id, list);
  return out;
}

long compare_horizon(const SystemDescription& original) {
  long d1 = 0, d2 = 0;
  for (const Neuron& n : original.neurons)
    for (const Rule& r : n.rules) {
      if (r.delay >= d1) {
        d2 = d1;
        d1 = r.delay;
      } else if (r.delay > d2) {
        d2 = r.delay;
      }
    }
  return 4 * (1 + d1) * (1 + d2) + 10;
}

namespace {

std::string schedule_text(const std::vector<SinkArrival>& sched) {
  std::string out = "[";
  for (size_t i = 0; i < sched.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(sched[i].step) + ":" + std::to_string(sched[i].count);
  }
  return out + "]";
}

}  // namespace

EquivalenceVerdict compare(const SystemDescription& original, const SystemDescription& candidate,
                           long horizon, const std::optional<ExpectedRelation>& expected) {
  if (!candidate.delay_free())
    throw ValidationError("candidate system contains a delayed rule; compare() checks delay-free candidates");
  if (horizon < 1) throw Error("horizon must be >= 1");

  EquivalenceVerdict v;
  v.compared_horizon = horizon;

  RunResult ro = run(original, horizon);
  RunResult rc = run(candidate, horizon);
  v.original_halted = ro.halted;
  v.candidate_halted = rc.halted;

  auto to_named = [](const SystemDescription& sys, const RunResult& r) {
    std::vector<std::pair<std::string, std::vector<SinkArrival>>> out;
    for (auto& [sink, list] : r.sinks.per_sink)
      out.emplace_back(sys.neurons[static_cast<size_t>(sink)].id, list);
    return out;
  };
  v.original_schedule = to_named(original, ro);
  v.candidate_schedule = to_named(candidate, rc);

  auto reject = [&](long step, const std::string& why) {
    v.accepted = false;
    v.first_divergence = {step, why};
    return v;
  };

  if (v.original_schedule.size() != v.candidate_schedule.size())
    return reject(0, "sink count mismatch: " + std::to_string(v.original_schedule.size()) +
                         " vs " + std::to_string(v.candidate_schedule.size()));

  bool any_arrival = false;
  for (auto& [id, sched] : v.original_schedule) any_arrival = any_arrival || !sched.empty();
  for (auto& [id, sched] : v.candidate_schedule) any_arrival = any_arrival || !sched.empty();
  if (!any_arrival)
    throw Error("horizon " + std::to_string(horizon) +
                " too small: no sink arrival observed in either system");

  // Allowed count factors: 1, or 1+d for a delay d occurring in the original.
  std::set<long> allowed_factors{1};
  for (const Neuron& n : original.neurons)
    for (const Rule& r : n.rules)
      if (r.delay > 0) allowed_factors.insert(1 + r.delay);

  const bool both_halted = ro.halted && rc.halted;
  // When a side still runs at the horizon its schedule tail is unreliable;
  // ignore arrivals inside the last max-delay+1 steps.
  const long window_end = horizon - (original.max_delay() + 1);

  std::optional<long> global_k;
  for (size_t i = 0; i < v.original_schedule.size(); ++i) {
    const std::string& sink_id = v.original_schedule[i].first;
    std::vector<SinkArrival> a = v.original_schedule[i].second;
    std::vector<SinkArrival> b = v.candidate_schedule[i].second;
    if (!both_halted) {
      auto clip = [&](std::vector<SinkArrival>& s) {
        s.erase(std::remove_if(s.begin(), s.end(),
                               [&](const SinkArrival& x) { return x.step > window_end; }),
                s.end());
      };
      clip(a);
      clip(b);
    }
    if (a.empty() && b.empty()) continue;
    if (a.empty() || b.empty())
      return reject(a.empty() ? b.front().step : a.front().step,
                    "sink " + sink_id + ": arrivals only in " + (a.empty() ? "candidate" : "original"));

    long k = b.front().step - a.front().step;
    long f;
    if (both_halted) {
      long ta = 0, tb = 0;
      for (auto& x : a) ta += x.count;
      for (auto& x : b) tb += x.count;
      if (ta == 0 || tb % ta != 0)
        return reject(b.front().step, "sink " + sink_id + ": totals " + std::to_string(tb) +
                                          " vs " + std::to_string(ta) + " have no integer factor");
      f = tb / ta;
      if (!allowed_factors.count(f))
        return reject(b.front().step,
                      "sink " + sink_id + ": factor " + std::to_string(f) +
                          " is not 1 or 1+d for a delay d of the original");
      if (f == 1) {
        // full pointwise comparison
        if (a.size() != b.size())
          return reject(b.back().step, "sink " + sink_id + ": schedule lengths " +
                                           std::to_string(b.size()) + " vs " +
                                           std::to_string(a.size()));
        for (size_t j = 0; j < a.size(); ++j) {
          if (b[j].step - a[j].step != k)
            return reject(b[j].step, "sink " + sink_id + ": arrival " + std::to_string(j) +
                                         " offset " + std::to_string(b[j].step - a[j].step) +
                                         " differs from " + std::to_string(k));
          if (b[j].count != a[j].count)
            return reject(b[j].step, "sink " + sink_id + ": arrival " + std::to_string(j) +
                                         " count " + std::to_string(b[j].count) + " vs " +
                                         std::to_string(a[j].count));
        }
      }
      // f > 1: the counts arrive smeared over 1+d steps; first arrival and
      // totals carry the contract.
    } else {
      // A side still runs at the horizon: first arrivals are the compared
      // observable, full schedules stay in the report.
      if (b.front().count % a.front().count != 0)
        return reject(b.front().step, "sink " + sink_id + ": first-arrival counts " +
                                          std::to_string(b.front().count) + " vs " +
                                          std::to_string(a.front().count));
      f = b.front().count / a.front().count;
      if (!allowed_factors.count(f))
        return reject(b.front().step,
                      "sink " + sink_id + ": factor " + std::to_string(f) +
                          " is not 1 or 1+d for a delay d of the original");
    }

    v.sink_offsets[sink_id] = k;
    v.count_factors[sink_id] = f;

    if (expected && expected->sink_offsets.count(sink_id)) {
      long want = expected->sink_offsets.at(sink_id);
      if (k != want)
        return reject(b.front().step, "sink " + sink_id + ": offset " + std::to_string(k) +
                                          " differs from declared " + std::to_string(want));
    } else {
      if (global_k && *global_k != k)
        return reject(b.front().step, "sink " + sink_id + ": offset " + std::to_string(k) +
                                          " differs from offset " + std::to_string(*global_k) +
                                          " of an earlier sink");
      global_k = k;
    }
    if (expected) {
      long want_f = 1;
      if (expected->sink_factors.count(sink_id)) want_f = expected->sink_factors.at(sink_id);
      if (f != want_f)
        return reject(b.front().step, "sink " + sink_id + ": factor " + std::to_string(f) +
                                          " differs from declared " + std::to_string(want_f));
    }
  }

  if (expected && expected->offset && global_k && *global_k != *expected->offset)
    return reject(0, "offset " + std::to_string(*global_k) + " differs from declared " +
                         std::to_string(*expected->offset));

  v.accepted = true;
  v.offset = global_k;
  if (!v.offset && !v.sink_offsets.empty()) v.offset = v.sink_offsets.begin()->second;
  return v;
}

std::string EquivalenceVerdict::report() const {
  std::ostringstream out;
  out << (accepted ? "ACCEPT" : "REJECT") << "\n";
  out << "horizon: " << compared_horizon << "\n";
  out << "original halted: " << (original_halted ? "yes" : "no")
      << ", candidate halted: " << (candidate_halted ? "yes" : "no") << "\n";
  if (offset) out << "offset k = " << *offset << "\n";
  for (auto& [sink, k] : sink_offsets) {
    out << "sink " << sink << ": offset " << k;
    auto it = count_factors.find(sink);
    if (it != count_factors.end()) out << ", count factor " << it->second;
    out << "\n";
  }
  if (first_divergence)
    out << "first divergence at step " << first_divergence->first << ": "
        << first_divergence->second << "\n";
  out << "schedules (step:count):\n";
  for (size_t i = 0; i < original_schedule.size(); ++i) {
    out << "  " << original_schedule[i].first << "  original " << schedule_text(original_schedule[i].second);
    if (i < candidate_schedule.size())
      out << "  candidate " << schedule_text(candidate_schedule[i].second);
    out << "\n";
  }
  return out.str();
}

}  // namespace snpkit
