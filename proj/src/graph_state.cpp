#include "perc/graph_state.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "perc/percolation.hpp"

namespace perc {

void PauliFrame::then_swap(Pauli a, Pauli b) {
  for (Pauli& p : map_) {
    if (p == a) {
      p = b;
    } else if (p == b) {
      p = a;
    }
  }
}

GraphState::GraphState(std::size_t capacity)
    : adj_(capacity), alive_(capacity, true), frame_(capacity), tag_(capacity, -1) {}

GraphState GraphState::from_configuration(const Configuration& cfg) {
  const LatticeGraph& g = cfg.graph();
  GraphState gs(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!cfg.site_open(v)) gs.alive_[v] = false;
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (cfg.bond_open(e)) gs.add_edge(g.edge(e).u, g.edge(e).v);
  }
  return gs;
}

void GraphState::check(VertexId v) const {
  if (v >= adj_.size() || !alive_[v]) throw std::out_of_range("qubit is not part of the state");
}

std::size_t GraphState::vertex_count() const {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), true));
}

std::size_t GraphState::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : adj_) twice += n.size();
  return twice / 2;
}

std::vector<VertexId> GraphState::vertices() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < adj_.size(); ++v) {
    if (alive_[v]) out.push_back(v);
  }
  return out;
}

void GraphState::add_edge(VertexId u, VertexId v) {
  check(u);
  check(v);
  if (u == v) throw std::invalid_argument("graph states have no self-loops");
  adj_[u].insert(v);
  adj_[v].insert(u);
}

void GraphState::remove_edge(VertexId u, VertexId v) {
  adj_[u].erase(v);
  adj_[v].erase(u);
}

void GraphState::toggle_edge(VertexId u, VertexId v) {
  if (has_edge(u, v)) {
    remove_edge(u, v);
  } else {
    add_edge(u, v);
  }
}

void GraphState::remove_vertex(VertexId v) {
  check(v);
  for (VertexId w : adj_[v]) adj_[w].erase(v);
  adj_[v].clear();
  alive_[v] = false;
}

void GraphState::local_complement(VertexId v) {
  check(v);
  const std::vector<VertexId> nbrs(adj_[v].begin(), adj_[v].end());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbrs.size(); ++j) toggle_edge(nbrs[i], nbrs[j]);
  }
}

void measure_pauli(GraphState& gs, VertexId v, Pauli physical) {
  const Pauli effective = gs.frame(v).effective(physical);
  switch (effective) {
    case Pauli::z:
      gs.remove_vertex(v);
      return;
    case Pauli::y: {
      const std::vector<VertexId> nbrs(gs.neighbors(v).begin(), gs.neighbors(v).end());
      gs.local_complement(v);
      gs.remove_vertex(v);
      for (VertexId w : nbrs) gs.frame(w).then_swap(Pauli::x, Pauli::y);
      return;
    }
    case Pauli::x: {
      if (gs.neighbors(v).empty()) {
        gs.remove_vertex(v);
        return;
      }
      const VertexId b0 = *gs.neighbors(v).begin();
      gs.local_complement(b0);
      gs.local_complement(v);
      gs.remove_vertex(v);
      gs.local_complement(b0);
      gs.frame(b0).then_swap(Pauli::x, Pauli::z);
      return;
    }
  }
}

void SmallGraph::add_edge(std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("self-loop in small graph");
  adjacency[i] |= 1u << j;
  adjacency[j] |= 1u << i;
}

SmallGraph to_small_graph(const GraphState& gs) {
  const auto verts = gs.vertices();
  if (verts.size() > 16) throw std::invalid_argument("small graphs hold at most 16 vertices");
  SmallGraph g = SmallGraph::empty(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t j = i + 1; j < verts.size(); ++j) {
      if (gs.has_edge(verts[i], verts[j])) g.add_edge(i, j);
    }
  }
  return g;
}

namespace {

// Unknown layout for vertex i: a_i = 4i, b_i = 4i+1, c_i = 4i+2, d_i = 4i+3.
constexpr int var_a(int i) { return 4 * i; }
constexpr int var_b(int i) { return 4 * i + 1; }
constexpr int var_c(int i) { return 4 * i + 2; }
constexpr int var_d(int i) { return 4 * i + 3; }

// Basis of the null space of a homogeneous GF(2) system with <= 64 unknowns.
std::vector<std::uint64_t> null_space(std::vector<std::uint64_t> rows, int unknowns) {
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int col = 0; col < unknowns && rank < rows.size(); ++col) {
    const std::uint64_t bit = std::uint64_t{1} << col;
    auto it = std::find_if(rows.begin() + static_cast<long>(rank), rows.end(),
                           [bit](std::uint64_t r) { return (r & bit) != 0; });
    if (it == rows.end()) continue;
    std::iter_swap(rows.begin() + static_cast<long>(rank), it);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<bool> is_pivot(unknowns, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::uint64_t> basis;
  for (int free = 0; free < unknowns; ++free) {
    if (is_pivot[free]) continue;
    std::uint64_t v = std::uint64_t{1} << free;
    for (std::size_t r = 0; r < rank; ++r) {
      if (rows[r] & (std::uint64_t{1} << free)) v |= std::uint64_t{1} << pivot_col[r];
    }
    basis.push_back(v);
  }
  return basis;
}

bool constraints_hold(std::uint64_t x, int n) {
  for (int i = 0; i < n; ++i) {
    const auto bit = [x](int k) { return static_cast<int>((x >> k) & 1u); };
    if (((bit(var_a(i)) & bit(var_d(i))) ^ (bit(var_b(i)) & bit(var_c(i)))) != 1) return false;
  }
  return true;
}

// Searches the span of `basis` for a vector satisfying the per-qubit constraints.
// Gray-code enumeration visits every combination with one XOR per step.
bool search_span(const std::vector<std::uint64_t>& basis, int n) {
  if (basis.size() > 30) throw std::runtime_error("LC-equivalence search space too large");
  std::uint64_t x = 0;
  const std::uint64_t combos = std::uint64_t{1} << basis.size();
  for (std::uint64_t step = 0; step < combos; ++step) {
    if (step > 0) x ^= basis[std::countr_zero(step)];
    if (constraints_hold(x, n)) return true;
  }
  return false;
}

}  // namespace

bool lc_equivalent(const SmallGraph& first, const SmallGraph& second) {
  if (first.n != second.n) return false;
  // Isolated qubits are unentangled; that is LC-invariant, so they must coincide and
  // can then be dropped.
  std::vector<int> keep;
  for (std::size_t i = 0; i < first.n; ++i) {
    const bool iso_a = first.adjacency[i] == 0;
    const bool iso_b = second.adjacency[i] == 0;
    if (iso_a != iso_b) return false;
    if (!iso_a) keep.push_back(static_cast<int>(i));
  }
  const int n = static_cast<int>(keep.size());
  if (n == 0) return true;
  auto t = [&](const SmallGraph& g, int i, int j) {
    return static_cast<int>(g.has_edge(static_cast<std::size_t>(keep[i]),
                                       static_cast<std::size_t>(keep[j])));
  };

  // (A + T B) T' + (C + T D) = 0 for T = first, T' = second, with diagonal A, B, C, D.
  std::vector<std::uint64_t> rows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::uint64_t row = 0;
      if (t(second, i, j)) row ^= std::uint64_t{1} << var_a(i);
      for (int k = 0; k < n; ++k) {
        if (t(first, i, k) && t(second, k, j)) row ^= std::uint64_t{1} << var_b(k);
      }
      if (i == j) row ^= std::uint64_t{1} << var_c(i);
      if (t(first, i, j)) row ^= std::uint64_t{1} << var_d(j);
      if (row) rows.push_back(row);
    }
  }
  return search_span(null_space(std::move(rows), 4 * n), n);
}

std::string_view to_string(Pauli p) {
  switch (p) {
    case Pauli::x: return "X";
    case Pauli::y: return "Y";
    case Pauli::z: return "Z";
  }
  return "?";
}

}  // namespace perc
