#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "perc/types.hpp"

namespace perc {

enum class LatticeKind : std::uint8_t { cubic, diamond, covering_of_cubic, pyrochlore };

std::string_view to_string(LatticeKind kind);
std::optional<LatticeKind> parse_lattice_kind(std::string_view name);

constexpr bool is_covering(LatticeKind kind) {
  return kind == LatticeKind::covering_of_cubic || kind == LatticeKind::pyrochlore;
}

/// The lattice a covering kind was built from; identity for base kinds.
constexpr LatticeKind base_kind(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::covering_of_cubic: return LatticeKind::cubic;
    case LatticeKind::pyrochlore: return LatticeKind::diamond;
    default: return kind;
  }
}

/// Diamond sites live on a grid with four units per conventional cell edge.
inline constexpr int kDiamondCellUnits = 4;

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  friend constexpr bool operator==(Edge, Edge) = default;
  friend constexpr auto operator<=>(Edge, Edge) = default;
};

/// Inclusive axis-aligned box of site coordinates (base-lattice units).
struct Box {
  Coord lo;
  Coord hi;

  constexpr bool contains(Coord c) const {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < lo[a] || c[a] > hi[a]) return false;
    }
    return true;
  }
  constexpr bool contains(const Box& other) const { return contains(other.lo) && contains(other.hi); }
  friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Vertices on one boundary face of a finite block.
struct Face {
  Axis axis = Axis::x;
  Side side = Side::low;
  std::vector<VertexId> vertex_ids;
};

/// A block of the underlying lattice. Origin and extent are in cells: one site for
/// the cubic lattice, one conventional 8-site cell for the diamond lattice.
struct BlockSpec {
  Coord origin;
  Extent extent;
  int block_size_k = 1;
};

/// Finite patch of one of the supported lattices.
///
/// Coordinates are exact integers. Cubic sites use lattice units. Diamond sites use
/// quarter-cell units: the conventional cell at the origin holds the FCC sites
/// (0,0,0) (0,2,2) (2,0,2) (2,2,0) and their (1,1,1) translates. A covering vertex
/// stores the sum of its base edge's endpoint coordinates (twice the midpoint).
///
/// Vertex order for base kinds is row-major over cells (x fastest), then the fixed
/// intra-cell order above. Edges are sorted pairs (u < v) in lexicographic order.
/// Covering vertices follow the base edge order.
class LatticeGraph {
 public:
  struct Neighbor {
    VertexId vertex;
    EdgeId edge;
  };

  LatticeGraph(LatticeKind kind, Extent dims, Box region, std::vector<Coord> coords,
               std::vector<Edge> edges,
               std::vector<std::pair<Coord, Coord>> base_endpoints = {});

  LatticeKind kind() const { return kind_; }
  Extent dims() const { return dims_; }
  /// Site box in base-lattice units; covering vertices lie inside when both endpoints do.
  const Box& region() const { return region_; }

  std::size_t vertex_count() const { return coords_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  Coord coord(VertexId v) const { return coords_[v]; }
  std::span<const Coord> coords() const { return coords_; }
  std::span<const Edge> edges() const { return edges_; }
  Edge edge(EdgeId e) const { return edges_[e]; }

  std::span<const Neighbor> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Endpoint coordinates of the base edge behind a covering vertex.
  std::pair<Coord, Coord> base_endpoints(VertexId v) const { return base_endpoints_.at(v); }

  const std::vector<VertexId>& face_vertices(Axis axis, Side side) const {
    return faces_[2 * index_of(axis) + static_cast<int>(side)];
  }

  /// Vertex at the given coordinate (base kinds only).
  std::optional<VertexId> find_vertex(Coord c) const;

 private:
  void build_adjacency();
  void build_faces();
  bool leaves_through(Coord site, Axis axis, Side side) const;

  LatticeKind kind_;
  Extent dims_;
  Box region_;
  std::vector<Coord> coords_;
  std::vector<Edge> edges_;
  std::vector<std::pair<Coord, Coord>> base_endpoints_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::array<std::vector<VertexId>, 6> faces_;
};

/// Induced subgraph with the ids of its vertices and edges in the parent.
struct SubGraph {
  LatticeGraph graph;
  std::vector<VertexId> parent_vertex;
  std::vector<EdgeId> parent_edge;
};

/// Nearest-neighbour displacements of a site in the infinite base lattice.
std::span<const Coord> lattice_offsets(LatticeKind base, Coord site);

/// Site box covered by `extent` cells starting at cell `origin`.
Box cell_box(LatticeKind kind, Coord origin, Extent extent);

LatticeGraph build_block(LatticeKind kind, Extent extent, Coord origin = {});
LatticeGraph covering_lattice(const LatticeGraph& g);
Face face(const LatticeGraph& g, Axis axis, Side side);
SubGraph slice_block(const LatticeGraph& g, const BlockSpec& spec);

/// `vertices N edges E kind K dims a b c` followed by one zero-based `u v` line per edge.
void write_edge_list(std::ostream& os, const LatticeGraph& g);

}  // namespace perc
