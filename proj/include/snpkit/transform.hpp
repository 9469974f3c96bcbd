#pragma once

#include <map>
#include <string>
#include <vector>

#include "snpkit/constructs.hpp"
#include "snpkit/model.hpp"

namespace snpkit {

// Outcome of rewriting one construct into a delay-free fragment. The
// fragment is a complete runnable system in the construct's canonical
// standalone shape; boundary maps original neuron ids to their replacements.
struct RewriteResult {
  SystemDescription fragment;
  std::map<std::string, std::vector<std::string>> boundary;
  long expected_offset = 0;
  long expected_count_factor = 1;          // 1, or 1+d on a split's plain branch
  std::map<std::string, long> sink_factors;  // per fragment sink id
  std::string notes;
};

// Chain rewrite. Zero delayed neurons: identity chain. One or two delayed
// neurons (earlier delay >= later delay): the head becomes a reservoir of
// (1+d) or (1+d1)(1+d2) spikes draining one per step, an accumulator
// a^N -> a is inserted behind it, remaining delayed neurons turn into plain
// relays. Throws OutOfScopeError for d1 < d2 or three or more delays.
RewriteResult eliminate_sequential(const std::vector<std::string>& path,
                                   const std::vector<int>& delays);

// Two-neuron cycle rewrite: a delay-free loop replenishing itself, both loop
// neurons feeding a gate a^N -> a (N = product of (1+d) over the delayed
// cycle neurons) that fires the taps. The fragment depends only on N, so
// either delay position yields the same system. Two delays append one relay
// behind the gate. Throws OutOfScopeError beyond two delays or cycles
// longer than two.
RewriteResult eliminate_iteration(const std::vector<std::string>& cycle,
                                  const std::vector<std::string>& taps,
                                  const std::vector<int>& delays);

// Split rewrite. Parent delay d: the feed becomes a reservoir of 1+d spikes
// and the parent an accumulator, both sinks receive one spike with offset 0.
// One delayed child: the delayed child becomes the accumulator and the plain
// branch receives 1+d spikes (count factor 1+d). Children sharing one equal
// delay are all turned into accumulators (parent-style contract). Distinct
// child delays are out of scope.
RewriteResult eliminate_split(const std::string& parent, const std::vector<std::string>& children,
                              int parent_delay, const std::vector<int>& child_delays);

// Join rewrite. Delay on a parent: that parent becomes a reservoir draining
// into a fresh accumulator, shifting the sink by exactly one step. Delay on
// the junction: the junction loses its delay and a chain of d relays is
// appended behind it, offset 0. The junction keeps its one-spike-per-parent
// guard a^p -> a.
RewriteResult eliminate_join(const std::vector<std::string>& parents, const std::string& junction,
                             const std::string& child, const std::vector<int>& parent_delays,
                             int junction_delay);

// Single neuron with rule a^{1+d} -> a; splicing it onto a branch returns a
// 1+d spike train to one spike at the cost of one extra step.
SystemDescription make_normalizer(int d);

struct TransformResult {
  SystemDescription system;
  std::map<std::string, long> sink_offsets;   // measured per sink id
  std::map<std::string, long> sink_factors;
  std::vector<std::string> applied;           // one line per rewrite
  bool rewritten = false;

  std::string report() const;  // sidecar text
};

// Whole-system delay elimination: classifies the constructs, rewrites every
// delay carrier in place (cycle > split parent > split child > junction >
// join parent > chain when roles overlap), inserts normalizers where a
// multiplied branch feeds a rule-bearing neuron, and verifies the result
// against the original with the equivalence checker, recording the measured
// per-sink offsets and factors. Throws OutOfScopeError for the uncovered
// delay patterns (d1 < d2 chains, sources loaded with more than one spike,
// and the other cases listed on the per-construct operations).
TransformResult transform(const SystemDescription& system);

}  // namespace snpkit
