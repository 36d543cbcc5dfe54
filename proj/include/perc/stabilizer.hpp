#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "perc/graph_state.hpp"

namespace perc {

/// Phase-free stabilizer tableau on at most 10 qubits. Row r is the Pauli string with
/// X on the qubits in x[r] and Z on the qubits in z[r].
class StabilizerState {
 public:
  static constexpr std::size_t kMaxQubits = 10;

  static StabilizerState from_graph(const SmallGraph& g);

  std::size_t qubit_count() const { return n_; }
  /// Projects qubit q onto an eigenstate of `p` (outcome sign is irrelevant here).
  void measure(std::size_t q, Pauli p);
  /// Drops a qubit that is in a product state with the rest (e.g. after measuring it).
  void discard(std::size_t q);

  /// LC-equivalent graph, found by Hadamards on a subset of qubits followed by
  /// Gaussian elimination and phase gates that clear the diagonal.
  struct GraphForm {
    SmallGraph graph;
    std::uint32_t hadamards = 0;
    std::uint32_t phases = 0;
  };
  GraphForm to_graph() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> x_;
  std::vector<std::uint32_t> z_;
};

struct OracleMeasurement {
  std::size_t qubit;
  Pauli basis;
};

/// Exact stabilizer simulation of Pauli measurements on the graph state of `g`.
/// Measured qubits are discarded; the survivors keep their relative order.
/// Refuses graphs with more than ten vertices.
StabilizerState::GraphForm stabilizer_oracle(const SmallGraph& g,
                                             std::span<const OracleMeasurement> sequence);

}  // namespace perc
