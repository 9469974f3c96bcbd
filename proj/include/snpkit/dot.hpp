#pragma once

#include <string>

#include "snpkit/model.hpp"

namespace snpkit {

// DOT digraph of the topology: one node per neuron labelled with id, initial
// spikes and rules; one edge per synapse.
std::string export_dot(const SystemDescription& system);

}  // namespace snpkit
