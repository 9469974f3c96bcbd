#pragma once

#include <string>
#include <variant>
#include <vector>

#include "snpkit/model.hpp"

namespace snpkit {

struct SequentialConstruct {
  std::vector<int> path;  // at least two neurons, consecutive synapses
};

struct IterationConstruct {
  std::vector<int> cycle;  // in cycle order
  std::vector<int> taps;   // targets fed from the cycle
};

struct SplitConstruct {
  int parent = -1;
  std::vector<int> children;
};

struct JoinConstruct {
  std::vector<int> parents;
  int junction = -1;
  int child = -1;  // -1 when the junction is itself a sink
};

using Construct =
    std::variant<SequentialConstruct, IterationConstruct, SplitConstruct, JoinConstruct>;

// A routing: the selected synapses of the base system organised into the four
// primitive constructs. Neurons may belong to more than one construct.
struct RoutingGraph {
  std::set<std::pair<int, int>> selected_synapses;
  std::vector<int> selected_neurons;
  std::vector<Construct> constructs;

  bool covers(int from, int to) const { return selected_synapses.count({from, to}) > 0; }
};

// Decomposes the synapse graph: cycles are found first so that cycle edges do
// not masquerade as branches, then branch points (splits, joins), then the
// residual degree-1 chains. Throws Error when a synapse cannot be covered or
// a strongly connected component is not a simple cycle, naming the synapses.
RoutingGraph classify_constructs(const SystemDescription& system);

std::string construct_to_text(const SystemDescription& system, const Construct& c);

}  // namespace snpkit
