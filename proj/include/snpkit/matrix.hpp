#pragma once

#include <string>
#include <vector>

#include "snpkit/model.hpp"

namespace snpkit {

// Integer transition matrix of a delay-free system. One row per rule across
// all neurons, one column per neuron: -c in the owner's column, +b in every
// out-neighbor's column, 0 elsewhere.
struct TransitionMatrix {
  int num_rules = 0;
  int num_neurons = 0;
  std::vector<long> entries;  // row-major, num_rules x num_neurons
  std::vector<std::pair<int, int>> row_index;  // row -> (neuron, rule index)
  // Per-row guard in semilinear form for O(1) membership checks per step.
  std::vector<std::vector<Progression>> guard_progressions;
  std::vector<long> consumed;

  long at(int row, int col) const { return entries[static_cast<size_t>(row) * num_neurons + col]; }
};

// Throws ValidationError when any rule carries a delay; the matrix form
// covers delay-free systems only.
TransitionMatrix build_transition_matrix(const SystemDescription& system);

// 0/1 entry per rule row; at most one 1 among rows of one neuron (throws
// NondeterminismError otherwise).
std::vector<int> spiking_vector(const std::vector<long>& config, const SystemDescription& system,
                                const TransitionMatrix& matrix);

// C' = C + s*M for the spiking vector s of the configuration.
std::vector<long> matrix_step(const std::vector<long>& config, const SystemDescription& system,
                              const TransitionMatrix& matrix);

struct MatrixRun {
  std::vector<std::vector<long>> trace;  // trace[0] is the initial vector
  bool halted = false;
};

// Iterates matrix_step from the initial configuration; halts when no rule is
// enabled, like the event simulator restricted to delay-free systems.
MatrixRun matrix_run(const SystemDescription& system, long horizon);

// Text grid: rows labelled <neuron>:<rule-index>, columns labelled by id.
std::string matrix_to_text(const SystemDescription& system, const TransitionMatrix& matrix);

}  // namespace snpkit
