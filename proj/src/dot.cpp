#include "snpkit/dot.hpp"

#include <sstream>

#include "snpkit/parser.hpp"

namespace snpkit {

std::string export_dot(const SystemDescription& sys) {
  std::ostringstream out;
  out << "digraph snp {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=ellipse];\n";
  for (const Neuron& n : sys.neurons) {
    std::string label = n.id;
    if (n.initial_spikes > 0) label += "\\nspikes=" + std::to_string(n.initial_spikes);
    for (const Rule& r : n.rules) label += "\\n" + rule_to_text(r);
    out << "  \"" << n.id << "\" [label=\"" << label << "\"];\n";
  }
  for (auto& [f, t] : sys.synapses)
    out << "  \"" << sys.neurons[static_cast<size_t>(f)].id << "\" -> \""
        << sys.neurons[static_cast<size_t>(t)].id << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace snpkit
