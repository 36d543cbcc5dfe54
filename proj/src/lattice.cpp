#include "perc/lattice.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace perc {
namespace {

constexpr std::array<Coord, 4> kDiamondBasisA{{{0, 0, 0}, {0, 2, 2}, {2, 0, 2}, {2, 2, 0}}};
constexpr std::array<Coord, 4> kDiamondBond{{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
constexpr std::array<Coord, 4> kDiamondBondReversed{
    {{-1, -1, -1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}}};
constexpr std::array<Coord, 6> kCubicOffsets{
    {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

constexpr std::array<Coord, 8> diamond_basis() {
  std::array<Coord, 8> basis{};
  for (int i = 0; i < 4; ++i) {
    basis[i] = kDiamondBasisA[i];
    basis[i + 4] = kDiamondBasisA[i] + Coord{1, 1, 1};
  }
  return basis;
}
constexpr std::array<Coord, 8> kDiamondBasis = diamond_basis();

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

bool is_diamond_a_site(Coord c) { return (c.x & 1) == 0; }

// Sort key matching the canonical vertex order of base kinds.
std::array<int, 4> canonical_key(LatticeKind kind, Coord c) {
  if (kind == LatticeKind::cubic) return {c.z, c.y, c.x, 0};
  const Coord cell{floor_div(c.x, kDiamondCellUnits), floor_div(c.y, kDiamondCellUnits),
                   floor_div(c.z, kDiamondCellUnits)};
  const Coord local = c - kDiamondCellUnits * cell;
  int basis = 0;
  while (basis < 8 && !(kDiamondBasis[basis] == local)) ++basis;
  return {cell.z, cell.y, cell.x, basis};
}

void require_positive(Extent e) {
  if (e.x < 1 || e.y < 1 || e.z < 1) {
    throw std::invalid_argument("block extent must be at least 1 along every axis");
  }
}

}  // namespace

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::cubic: return "cubic";
    case LatticeKind::diamond: return "diamond";
    case LatticeKind::covering_of_cubic: return "covering_cubic";
    case LatticeKind::pyrochlore: return "pyrochlore";
  }
  return "unknown";
}

std::optional<LatticeKind> parse_lattice_kind(std::string_view name) {
  for (auto k : {LatticeKind::cubic, LatticeKind::diamond, LatticeKind::covering_of_cubic,
                 LatticeKind::pyrochlore}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::span<const Coord> lattice_offsets(LatticeKind base, Coord site) {
  switch (base) {
    case LatticeKind::cubic: return kCubicOffsets;
    case LatticeKind::diamond:
      return is_diamond_a_site(site) ? std::span<const Coord>(kDiamondBond)
                                     : std::span<const Coord>(kDiamondBondReversed);
    default: throw std::invalid_argument("lattice offsets are defined for base lattices only");
  }
}

Box cell_box(LatticeKind kind, Coord origin, Extent extent) {
  const Coord ext{extent.x, extent.y, extent.z};
  if (base_kind(kind) == LatticeKind::cubic) {
    return {origin, origin + ext - Coord{1, 1, 1}};
  }
  return {kDiamondCellUnits * origin, kDiamondCellUnits * (origin + ext) - Coord{1, 1, 1}};
}

LatticeGraph::LatticeGraph(LatticeKind kind, Extent dims, Box region, std::vector<Coord> coords,
                           std::vector<Edge> edges,
                           std::vector<std::pair<Coord, Coord>> base_endpoints)
    : kind_(kind),
      dims_(dims),
      region_(region),
      coords_(std::move(coords)),
      edges_(std::move(edges)),
      base_endpoints_(std::move(base_endpoints)) {
  if (is_covering(kind_) && base_endpoints_.size() != coords_.size()) {
    throw std::invalid_argument("covering graph needs base endpoints for every vertex");
  }
  for (const Edge& e : edges_) {
    if (e.u >= e.v || e.v >= coords_.size()) {
      throw std::invalid_argument("edge endpoints must be distinct valid vertices with u < v");
    }
  }
  if (!std::is_sorted(edges_.begin(), edges_.end()) ||
      std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("edges must be sorted and unique");
  }
  build_adjacency();
  build_faces();
}

void LatticeGraph::build_adjacency() {
  offsets_.assign(coords_.size() + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    adjacency_[fill[e.u]++] = {e.v, id};
    adjacency_[fill[e.v]++] = {e.u, id};
  }
}

bool LatticeGraph::leaves_through(Coord site, Axis axis, Side side) const {
  const int a = index_of(axis);
  for (const Coord& d : lattice_offsets(base_kind(kind_), site)) {
    const int w = site[a] + d[a];
    if (side == Side::low ? w < region_.lo[a] : w > region_.hi[a]) return true;
  }
  return false;
}

// A vertex lies on a face when, in the infinite lattice, it has a bond leaving the
// region through that face. For covering vertices either base endpoint may do so.
void LatticeGraph::build_faces() {
  for (Axis axis : kAllAxes) {
    for (Side side : {Side::low, Side::high}) {
      auto& out = faces_[2 * index_of(axis) + static_cast<int>(side)];
      for (VertexId v = 0; v < coords_.size(); ++v) {
        const bool on_face =
            is_covering(kind_)
                ? leaves_through(base_endpoints_[v].first, axis, side) ||
                      leaves_through(base_endpoints_[v].second, axis, side)
                : leaves_through(coords_[v], axis, side);
        if (on_face) out.push_back(v);
      }
    }
  }
}

std::optional<VertexId> LatticeGraph::find_vertex(Coord c) const {
  if (is_covering(kind_)) {
    throw std::invalid_argument("find_vertex is defined for base lattices only");
  }
  if (!region_.contains(c)) return std::nullopt;
  const auto key = canonical_key(kind_, c);
  auto it = std::lower_bound(coords_.begin(), coords_.end(), key,
                             [this](const Coord& lhs, const std::array<int, 4>& k) {
                               return canonical_key(kind_, lhs) < k;
                             });
  if (it == coords_.end() || !(*it == c)) return std::nullopt;
  return static_cast<VertexId>(it - coords_.begin());
}

LatticeGraph build_block(LatticeKind kind, Extent extent, Coord origin) {
  require_positive(extent);
  if (is_covering(kind)) return covering_lattice(build_block(base_kind(kind), extent, origin));

  const Box region = cell_box(kind, origin, extent);
  const int per_cell = kind == LatticeKind::cubic ? 1 : 8;
  const std::size_t cells = static_cast<std::size_t>(extent.x) * extent.y * extent.z;
  auto local_index = [&](Coord cell, int basis) {
    return static_cast<VertexId>(
        ((static_cast<std::size_t>(cell.z) * extent.y + cell.y) * extent.x + cell.x) * per_cell +
        basis);
  };

  std::vector<Coord> coords;
  coords.reserve(cells * per_cell);
  for (int cz = 0; cz < extent.z; ++cz) {
    for (int cy = 0; cy < extent.y; ++cy) {
      for (int cx = 0; cx < extent.x; ++cx) {
        const Coord cell = origin + Coord{cx, cy, cz};
        if (kind == LatticeKind::cubic) {
          coords.push_back(cell);
        } else {
          for (const Coord& b : kDiamondBasis) coords.push_back(kDiamondCellUnits * cell + b);
        }
      }
    }
  }

  std::vector<Edge> edges;
  for (VertexId v = 0; v < coords.size(); ++v) {
    const Coord c = coords[v];
    if (kind == LatticeKind::cubic) {
      const Coord cell = c - origin;
      for (int a = 0; a < 3; ++a) {
        Coord next = cell;
        next[a] += 1;
        if (next[a] < extent[a]) edges.push_back({v, local_index(next, 0)});
      }
    } else if (is_diamond_a_site(c)) {
      for (const Coord& d : kDiamondBond) {
        const Coord w = c + d;
        if (!region.contains(w)) continue;
        const Coord rel = w - region.lo;
        const Coord cell{rel.x / kDiamondCellUnits, rel.y / kDiamondCellUnits,
                         rel.z / kDiamondCellUnits};
        const Coord local = rel - kDiamondCellUnits * cell;
        int basis = 4;
        while (!(kDiamondBasis[basis] == local)) ++basis;
        const VertexId wid = local_index(cell, basis);
        edges.push_back({std::min(v, wid), std::max(v, wid)});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return LatticeGraph(kind, extent, region, std::move(coords), std::move(edges));
}

LatticeGraph covering_lattice(const LatticeGraph& g) {
  if (is_covering(g.kind())) {
    throw std::invalid_argument("covering of a covering lattice is not supported");
  }
  if (g.edge_count() == 0) throw std::invalid_argument("covering lattice of an edgeless graph");

  const LatticeKind kind =
      g.kind() == LatticeKind::cubic ? LatticeKind::covering_of_cubic : LatticeKind::pyrochlore;
  std::vector<Coord> coords;
  std::vector<std::pair<Coord, Coord>> endpoints;
  coords.reserve(g.edge_count());
  endpoints.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    coords.push_back(g.coord(e.u) + g.coord(e.v));
    endpoints.emplace_back(g.coord(e.u), g.coord(e.v));
  }

  std::vector<Edge> edges;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto nbrs = g.neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        const EdgeId a = nbrs[i].edge;
        const EdgeId b = nbrs[j].edge;
        edges.push_back({std::min(a, b), std::max(a, b)});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return LatticeGraph(kind, g.dims(), g.region(), std::move(coords), std::move(edges),
                      std::move(endpoints));
}

Face face(const LatticeGraph& g, Axis axis, Side side) {
  return {axis, side, g.face_vertices(axis, side)};
}

SubGraph slice_block(const LatticeGraph& g, const BlockSpec& spec) {
  require_positive(spec.extent);
  const Box box = cell_box(g.kind(), spec.origin, spec.extent);
  if (!g.region().contains(box)) throw std::invalid_argument("block lies outside the graph");

  auto inside = [&](VertexId v) {
    if (!is_covering(g.kind())) return box.contains(g.coord(v));
    const auto [p, q] = g.base_endpoints(v);
    return box.contains(p) && box.contains(q);
  };

  SubGraph out{LatticeGraph(g.kind(), spec.extent, box, {}, {}, {}), {}, {}};
  std::vector<VertexId> local(g.vertex_count(), kNoVertex);
  std::vector<Coord> coords;
  std::vector<std::pair<Coord, Coord>> endpoints;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!inside(v)) continue;
    local[v] = static_cast<VertexId>(out.parent_vertex.size());
    out.parent_vertex.push_back(v);
    coords.push_back(g.coord(v));
    if (is_covering(g.kind())) endpoints.push_back(g.base_endpoints(v));
  }
  std::vector<Edge> edges;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge pe = g.edge(e);
    if (local[pe.u] == kNoVertex || local[pe.v] == kNoVertex) continue;
    edges.push_back({local[pe.u], local[pe.v]});
    out.parent_edge.push_back(e);
  }
  out.graph = LatticeGraph(g.kind(), spec.extent, box, std::move(coords), std::move(edges),
                           std::move(endpoints));
  return out;
}

void write_edge_list(std::ostream& os, const LatticeGraph& g) {
  const Extent d = g.dims();
  os << "vertices " << g.vertex_count() << " edges " << g.edge_count() << " kind "
     << to_string(g.kind()) << " dims " << d.x << ' ' << d.y << ' ' << d.z << '\n';
  for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

}  // namespace perc
