#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "perc/types.hpp"

namespace perc {

class Configuration;

enum class Pauli : std::uint8_t { x = 0, y = 1, z = 2 };

/// How a physical Pauli on a qubit acts on the underlying graph state once the
/// qubit's accumulated local Clifford is taken into account (signs dropped).
class PauliFrame {
 public:
  Pauli effective(Pauli physical) const { return map_[static_cast<int>(physical)]; }
  /// Appends a local Clifford that exchanges the two given Paulis.
  void then_swap(Pauli a, Pauli b);
  bool is_identity() const { return map_ == kIdentity; }

 private:
  static constexpr std::array<Pauli, 3> kIdentity{Pauli::x, Pauli::y, Pauli::z};
  std::array<Pauli, 3> map_ = kIdentity;
};

/// Graph state over qubit ids [0, capacity). Removed qubits stay addressable but dead.
/// Each qubit carries a Pauli frame and an optional integer tag (-1 when unset).
class GraphState {
 public:
  explicit GraphState(std::size_t capacity = 0);

  /// Open sites become qubits and open bonds become edges; closed sites start removed.
  static GraphState from_configuration(const Configuration& cfg);

  std::size_t capacity() const { return adj_.size(); }
  bool alive(VertexId v) const { return alive_[v]; }
  std::size_t vertex_count() const;
  std::size_t edge_count() const;
  std::vector<VertexId> vertices() const;

  const std::set<VertexId>& neighbors(VertexId v) const { return adj_[v]; }
  bool has_edge(VertexId u, VertexId v) const { return adj_[u].contains(v); }
  void add_edge(VertexId u, VertexId v);
  void remove_edge(VertexId u, VertexId v);
  void toggle_edge(VertexId u, VertexId v);
  void remove_vertex(VertexId v);
  /// Complements the subgraph induced on the neighbourhood of v.
  void local_complement(VertexId v);

  const PauliFrame& frame(VertexId v) const { return frame_[v]; }
  PauliFrame& frame(VertexId v) { return frame_[v]; }
  std::int64_t tag(VertexId v) const { return tag_[v]; }
  void set_tag(VertexId v, std::int64_t t) { tag_[v] = t; }

 private:
  void check(VertexId v) const;

  std::vector<std::set<VertexId>> adj_;
  std::vector<bool> alive_;
  std::vector<PauliFrame> frame_;
  std::vector<std::int64_t> tag_;
};

/// Measures `physical` on v and removes it, using the graph rules for the effective
/// Pauli: Z deletes v; Y complements N(v) then deletes v; X complements at the smallest
/// neighbour b0, applies the Y rule at v, and complements at b0 again (an isolated
/// vertex is simply deleted). Neighbour frames pick up the induced local Cliffords.
void measure_pauli(GraphState& gs, VertexId v, Pauli physical);

/// Small dense graph on n <= 16 vertices; bit j of adjacency[i] marks edge (i, j).
struct SmallGraph {
  std::size_t n = 0;
  std::vector<std::uint32_t> adjacency;

  static SmallGraph empty(std::size_t n) { return {n, std::vector<std::uint32_t>(n, 0)}; }
  void add_edge(std::size_t i, std::size_t j);
  bool has_edge(std::size_t i, std::size_t j) const { return (adjacency[i] >> j) & 1u; }
  friend bool operator==(const SmallGraph&, const SmallGraph&) = default;
};

/// Live qubits of `gs` in ascending id order as a small graph.
SmallGraph to_small_graph(const GraphState& gs);

/// Whether two graph states on the same labelled qubits are related by local Cliffords.
/// Solves the binary linear LC-equivalence conditions and searches the solution space
/// for a choice with a_i d_i + b_i c_i = 1 on every qubit.
bool lc_equivalent(const SmallGraph& a, const SmallGraph& b);

std::string_view to_string(Pauli p);

}  // namespace perc
