#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snpkit/model.hpp"
#include "snpkit/simulator.hpp"

namespace snpkit {

// Sink arrival schedules within a horizon, keyed by neuron id in declaration order.
std::vector<std::pair<std::string, std::vector<SinkArrival>>> sink_schedule(
    const SystemDescription& system, long horizon);

// Constraints a transform declares for its output; compare() enforces them
// exactly when present.
struct ExpectedRelation {
  std::optional<long> offset;                 // single constant across sinks
  std::map<std::string, long> sink_offsets;   // branch-specific, keyed by original sink id
  std::map<std::string, long> sink_factors;   // per original sink id; absent means 1
};

struct EquivalenceVerdict {
  bool accepted = false;
  std::optional<long> offset;
  std::map<std::string, long> sink_offsets;
  std::map<std::string, long> count_factors;  // per original sink id
  std::optional<std::pair<long, std::string>> first_divergence;
  long compared_horizon = 0;
  bool original_halted = false;
  bool candidate_halted = false;
  // Schedules kept for the report, original then candidate, paired by position.
  std::vector<std::pair<std::string, std::vector<SinkArrival>>> original_schedule;
  std::vector<std::pair<std::string, std::vector<SinkArrival>>> candidate_schedule;

  std::string report() const;
};

// Decides whether the delay-free candidate simulates the original: candidate
// sink arrivals equal the original's shifted by one constant k, and per-sink
// spike counts equal up to a factor from {1} u {1+d : d a delay of the
// original}. Halting pairs with factor 1 are compared pointwise; a factor
// > 1 compares first arrival and totals (the counts arrive smeared over 1+d
// steps); when either side still runs at the horizon only first arrivals are
// compared and both full schedules are reported. Throws ValidationError when
// the candidate carries a delay, Error when the horizon shows no arrival on
// either side.
EquivalenceVerdict compare(const SystemDescription& original, const SystemDescription& candidate,
                           long horizon,
                           const std::optional<ExpectedRelation>& expected = std::nullopt);

// Horizon covering several loop periods: 4*(1+d1)*(1+d2) + 10 over the two
// largest delays of the system.
long compare_horizon(const SystemDescription& original);

}  // namespace snpkit
