#include "snpkit/matrix.hpp"

#include <sstream>

#include "snpkit/errors.hpp"
#include "snpkit/simulator.hpp"

namespace snpkit {

TransitionMatrix build_transition_matrix(const SystemDescription& sys) {
  for (const Neuron& n : sys.neurons)
    for (const Rule& r : n.rules)
      if (r.delay > 0)
        throw ValidationError("neuron '" + n.id +
                              "' has a delayed rule; the matrix form covers delay-free systems only");

  TransitionMatrix mat;
  mat.num_neurons = static_cast<int>(sys.neurons.size());
  for (size_t i = 0; i < sys.neurons.size(); ++i)
    for (size_t r = 0; r < sys.neurons[i].rules.size(); ++r)
      mat.row_index.emplace_back(static_cast<int>(i), static_cast<int>(r));
  mat.num_rules = static_cast<int>(mat.row_index.size());
  mat.entries.assign(static_cast<size_t>(mat.num_rules) * mat.num_neurons, 0);

  for (int row = 0; row < mat.num_rules; ++row) {
    auto [ni, ri] = mat.row_index[static_cast<size_t>(row)];
    const Rule& rule = sys.neurons[static_cast<size_t>(ni)].rules[static_cast<size_t>(ri)];
    mat.entries[static_cast<size_t>(row) * mat.num_neurons + ni] = -rule.consumed;
    for (int j : sys.out_neighbors(ni))
      mat.entries[static_cast<size_t>(row) * mat.num_neurons + j] = rule.produced;
    mat.guard_progressions.push_back(rule.guard.normalize());
    mat.consumed.push_back(rule.consumed);
  }
  return mat;
}

std::vector<int> spiking_vector(const std::vector<long>& config, const SystemDescription& sys,
                                const TransitionMatrix& mat) {
  if (static_cast<int>(config.size()) != mat.num_neurons)
    throw Error("configuration vector size mismatch");
  for (long v : config)
    if (v < 0) throw Error("configuration vector must be componentwise >= 0");

  std::vector<int> s(static_cast<size_t>(mat.num_rules), 0);
  std::vector<int> chosen(sys.neurons.size(), -1);
  for (int row = 0; row < mat.num_rules; ++row) {
    auto [ni, ri] = mat.row_index[static_cast<size_t>(row)];
    long spikes = config[static_cast<size_t>(ni)];
    if (spikes < mat.consumed[static_cast<size_t>(row)]) continue;
    bool member = false;
    for (const Progression& p : mat.guard_progressions[static_cast<size_t>(row)])
      if (p.contains(spikes)) {
        member = true;
        break;
      }
    if (!member) continue;
    if (chosen[static_cast<size_t>(ni)] >= 0)
      throw NondeterminismError("neuron '" + sys.neurons[static_cast<size_t>(ni)].id +
                                "': two rules enabled in one spiking vector");
    chosen[static_cast<size_t>(ni)] = row;
    s[static_cast<size_t>(row)] = 1;
  }
  return s;
}

std::vector<long> matrix_step(const std::vector<long>& config, const SystemDescription& sys,
                              const TransitionMatrix& mat) {
  std::vector<int> s = spiking_vector(config, sys, mat);
  std::vector<long> next = config;
  for (int row = 0; row < mat.num_rules; ++row) {
    if (!s[static_cast<size_t>(row)]) continue;
    for (int col = 0; col < mat.num_neurons; ++col)
      next[static_cast<size_t>(col)] += mat.at(row, col);
  }
  for (long v : next)
    if (v < 0) throw Error("negative spike count after matrix step");
  return next;
}

MatrixRun matrix_run(const SystemDescription& sys, long horizon) {
  if (horizon < 1) throw Error("horizon must be >= 1");
  TransitionMatrix mat = build_transition_matrix(sys);
  MatrixRun out;
  std::vector<long> config(sys.neurons.size(), 0);
  for (size_t i = 0; i < sys.neurons.size(); ++i) config[i] = sys.neurons[i].initial_spikes;
  out.trace.push_back(config);
  for (long step = 1; step <= horizon; ++step) {
    std::vector<int> s = spiking_vector(config, sys, mat);
    bool any = false;
    for (int v : s) any = any || v;
    if (!any) {
      out.halted = true;
      break;
    }
    config = matrix_step(config, sys, mat);
    out.trace.push_back(config);
  }
  if (!out.halted) {
    std::vector<int> s = spiking_vector(config, sys, mat);
    bool any = false;
    for (int v : s) any = any || v;
    out.halted = !any;
  }
  return out;
}

std::string matrix_to_text(const SystemDescription& sys, const TransitionMatrix& mat) {
  std::ostringstream out;
  size_t label_width = 0;
  std::vector<std::string> labels;
  for (int row = 0; row < mat.num_rules; ++row) {
    auto [ni, ri] = mat.row_index[static_cast<size_t>(row)];
    labels.push_back(sys.neurons[static_cast<size_t>(ni)].id + ":" + std::to_string(ri));
    label_width = std::max(label_width, labels.back().size());
  }
  out << std::string(label_width, ' ');
  for (int col = 0; col < mat.num_neurons; ++col) out << "\t" << sys.neurons[static_cast<size_t>(col)].id;
  out << "\n";
  for (int row = 0; row < mat.num_rules; ++row) {
    out << labels[static_cast<size_t>(row)]
        << std::string(label_width - labels[static_cast<size_t>(row)].size(), ' ');
    for (int col = 0; col < mat.num_neurons; ++col) out << "\t" << mat.at(row, col);
    out << "\n";
  }
  return out.str();
}

}  // namespace snpkit
