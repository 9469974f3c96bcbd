#pragma once

#include <map>
#include <string>

#include "snpkit/model.hpp"

namespace snpkit {

// Parses a system-description document. Format, one item per line:
//   neuron <id> [spikes=<n>]
//   rule "<guard>[/a^<c>] -> a^<b>|a|lambda [; <d>]"   (attaches to the last neuron)
//   synapse <id> -> <id>
//   source <id>
//   sink <id>
// '#' starts a comment. A missing "; d" means d = 0.
SystemDescription parse_system(const std::string& text);

// Deterministic inverse of parse_system: neurons in declaration order,
// synapses sorted, short a^c form when the guard is exactly that power.
std::string serialize_system(const SystemDescription& system);

std::string rule_to_text(const Rule& rule);
Rule parse_rule_text(const std::string& text, int line = 0);

// Replaces $name / ${name} with the given integer values. Unknown names are
// reported as parse errors so fixtures fail loudly when a -set is missing.
std::string substitute(const std::string& text, const std::map<std::string, long>& vars);

std::string read_file(const std::string& path);

}  // namespace snpkit
