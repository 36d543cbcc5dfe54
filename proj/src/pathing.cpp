#include "perc/pathing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace perc {
namespace {

// Breadth-first search from `start`; `allowed` filters the vertices that may be entered.
// Returns the parent array (kNoVertex for unreached vertices, start points to itself).
template <class Allowed, class Stop>
std::vector<VertexId> bfs(const LatticeGraph& g, const Configuration& cfg, VertexId start,
                          Allowed&& allowed, Stop&& stop,
                          std::vector<VertexId>* order = nullptr) {
  std::vector<VertexId> parent(g.vertex_count(), kNoVertex);
  parent[start] = start;
  std::deque<VertexId> queue{start};
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (order) order->push_back(v);
    if (stop(v)) break;
    for (const auto& nb : g.neighbors(v)) {
      if (!cfg.bond_open(nb.edge) || parent[nb.vertex] != kNoVertex || !allowed(nb.vertex)) continue;
      parent[nb.vertex] = v;
      queue.push_back(nb.vertex);
    }
  }
  return parent;
}

std::vector<VertexId> trace(const std::vector<VertexId>& parent, VertexId end) {
  std::vector<VertexId> path;
  for (VertexId v = end; ; v = parent[v]) {
    path.push_back(v);
    if (parent[v] == v) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

SiteIndex neighbor_of(SiteIndex s, Direction d) {
  return d == Direction::horizontal ? SiteIndex{s.i + 1, s.j} : SiteIndex{s.i, s.j + 1};
}

std::int64_t site_tag(SiteIndex s, int L) { return s.i + static_cast<std::int64_t>(L) * s.j; }

std::vector<VertexId> midpoint_candidates(const Configuration& cfg, const ClusterLabeling& lab,
                                          ClusterId cluster, std::size_t min_degree) {
  const LatticeGraph& g = cfg.graph();
  auto open_degree = [&](VertexId v) {
    std::size_t d = 0;
    for (const auto& nb : g.neighbors(v)) d += cfg.bond_open(nb.edge) ? 1 : 0;
    return d;
  };
  const Box& box = g.region();
  const Coord centre2 = box.lo + box.hi;
  const int scale = is_covering(g.kind()) ? 1 : 2;
  std::vector<std::pair<long long, VertexId>> ranked;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (lab.label[v] != cluster || open_degree(v) < min_degree) continue;
    const Coord d = scale * g.coord(v) - centre2;
    ranked.emplace_back(1LL * d.x * d.x + 1LL * d.y * d.y + 1LL * d.z * d.z, v);
  }
  if (ranked.empty() && min_degree > 0) return midpoint_candidates(cfg, lab, cluster, 0);
  std::sort(ranked.begin(), ranked.end());
  std::vector<VertexId> out;
  out.reserve(ranked.size());
  for (const auto& [dist, v] : ranked) out.push_back(v);
  return out;
}

}  // namespace

VertexId cluster_midpoint(const Configuration& cfg, const ClusterLabeling& lab, ClusterId cluster,
                          std::size_t min_degree) {
  const auto candidates = midpoint_candidates(cfg, lab, cluster, min_degree);
  return candidates.empty() ? kNoVertex : candidates.front();
}

std::optional<BlockRouting> route_block(const Configuration& cfg, const ClusterLabeling& lab,
                                        std::span<const Axis> axes) {
  const auto cluster = designate_crossing_cluster(lab, axes);
  if (!cluster) return std::nullopt;
  const LatticeGraph& g = cfg.graph();
  BlockRouting out;
  out.cluster = *cluster;
  out.midpoint = cluster_midpoint(cfg, lab, *cluster);
  std::vector<VertexId> order;
  const auto parent = bfs(g, cfg, out.midpoint, [](VertexId) { return true; },
                          [](VertexId) { return false; }, &order);
  // First face vertex in BFS order: nearest to the midpoint, ties by discovery order.
  std::vector<std::uint32_t> rank(g.vertex_count(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<std::uint32_t>(r);
  for (Axis axis : axes) {
    for (Side side : {Side::low, Side::high}) {
      VertexId best = kNoVertex;
      for (VertexId v : g.face_vertices(axis, side)) {
        if (parent[v] == kNoVertex) continue;
        if (best == kNoVertex || rank[v] < rank[best]) best = v;
      }
      if (best != kNoVertex) out.to_face[2 * index_of(axis) + static_cast<int>(side)] = trace(parent, best);
    }
  }
  return out;
}

std::vector<std::pair<SiteIndex, Direction>> hexagonal_bonds(int L) {
  std::vector<std::pair<SiteIndex, Direction>> out;
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) {
      if (i + 1 < L && (i + j) % 2 == 0) out.emplace_back(SiteIndex{i, j}, Direction::horizontal);
      if (j + 1 < L) out.emplace_back(SiteIndex{i, j}, Direction::vertical);
    }
  }
  return out;
}

GraphState hexagonal_target(int L) {
  GraphState gs(static_cast<std::size_t>(L) * L);
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) gs.set_tag(static_cast<VertexId>(site_tag({i, j}, L)), site_tag({i, j}, L));
  }
  for (const auto& [s, d] : hexagonal_bonds(L)) {
    gs.add_edge(static_cast<VertexId>(site_tag(s, L)),
                static_cast<VertexId>(site_tag(neighbor_of(s, d), L)));
  }
  return gs;
}

RoutingResult route_instance(const RenormInstance& inst) {
  const RenormScheme& scheme = inst.scheme;
  const LatticeGraph& g = *inst.region;
  const Configuration& cfg = *inst.config;
  const int L = scheme.L;
  if (!is_full(inst.lattice)) throw std::invalid_argument("routing needs a full renormalised lattice");

  const auto bonds = hexagonal_bonds(L);
  const auto n_sites = static_cast<std::size_t>(L) * L;
  std::vector<std::size_t> arms(n_sites, 0);
  for (const auto& [s, d] : bonds) {
    ++arms[static_cast<std::size_t>(site_tag(s, L))];
    ++arms[static_cast<std::size_t>(site_tag(neighbor_of(s, d), L))];
  }

  struct SiteCluster {
    std::vector<VertexId> candidates;  // midpoint candidates in preference order
    std::vector<VertexId> vertices;    // the designated crossing cluster
  };
  std::vector<SiteCluster> sites(n_sites);
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) {
      const auto sub = slice_block(g, site_block(scheme, {i, j}));
      const Configuration local = restrict_to(sub, cfg);
      const auto lab = label_clusters(local);
      const auto cluster = designate_crossing_cluster(lab, scheme.axes);
      if (!cluster) throw std::logic_error("occupied site without a crossing cluster");
      const auto slot = static_cast<std::size_t>(site_tag({i, j}, L));
      for (VertexId v : midpoint_candidates(local, lab, *cluster, arms[slot])) {
        sites[slot].candidates.push_back(sub.parent_vertex[v]);
      }
      for (VertexId v = 0; v < sub.graph.vertex_count(); ++v) {
        if (lab.label[v] == *cluster) sites[slot].vertices.push_back(sub.parent_vertex[v]);
      }
    }
  }

  // Vertices each bond's route may use.
  std::vector<std::vector<VertexId>> domains;
  for (const auto& [s, d] : bonds) {
    const SiteCluster& a = sites[static_cast<std::size_t>(site_tag(s, L))];
    const SiteCluster& b = sites[static_cast<std::size_t>(site_tag(neighbor_of(s, d), L))];
    std::vector<VertexId> members;
    if (scheme.blocks == BlockScheme::overlapping_cubic) {
      const auto sub = slice_block(g, connection_block(scheme, s, d));
      const auto lab = label_clusters(restrict_to(sub, cfg));
      ClusterId shared = kNoCluster;
      for (VertexId v = 0; v < sub.graph.vertex_count(); ++v) {
        if (sub.parent_vertex[v] == a.candidates.front()) shared = lab.label[v];
      }
      for (VertexId v = 0; v < sub.graph.vertex_count(); ++v) {
        if (shared != kNoCluster && lab.label[v] == shared) members.push_back(sub.parent_vertex[v]);
      }
    } else {
      members = a.vertices;
      members.insert(members.end(), b.vertices.begin(), b.vertices.end());
    }
    domains.push_back(std::move(members));
  }

  // Greedy sequential routing. When a bond fails, the next midpoint candidate of one of
  // its endpoints (alternating) is tried and routing restarts.
  constexpr int kMaxAttempts = 200;
  std::vector<std::size_t> choice(n_sites, 0);
  std::vector<int> bumps(n_sites, 0);
  std::vector<bool> used(g.vertex_count(), false);
  std::vector<bool> domain(g.vertex_count(), false);
  RoutingResult out;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    out = RoutingResult{};
    std::fill(used.begin(), used.end(), false);
    std::vector<VertexId> mid(n_sites);
    for (std::size_t slot = 0; slot < n_sites; ++slot) {
      mid[slot] = sites[slot].candidates[choice[slot]];
      used[mid[slot]] = true;
    }
    for (int j = 0; j < L; ++j) {
      for (int i = 0; i < L; ++i) out.junctions.push_back({mid[static_cast<std::size_t>(site_tag({i, j}, L))], {i, j}, {}});
    }

    std::optional<std::size_t> failed;
    for (std::size_t bi = 0; bi < bonds.size(); ++bi) {
      const auto [s, d] = bonds[bi];
      const SiteIndex t = neighbor_of(s, d);
      const VertexId ms = mid[static_cast<std::size_t>(site_tag(s, L))];
      const VertexId mt = mid[static_cast<std::size_t>(site_tag(t, L))];
      for (VertexId v : domains[bi]) domain[v] = true;
      auto allowed = [&](VertexId w) {
        if (w == mt) return true;
        if (!domain[w] || used[w]) return false;
        for (const auto& nb : g.neighbors(w)) {
          if (cfg.bond_open(nb.edge) && used[nb.vertex] && nb.vertex != ms && nb.vertex != mt) {
            return false;
          }
        }
        return true;
      };
      const auto parent = domain[ms] && domain[mt]
                              ? bfs(g, cfg, ms, allowed, [&](VertexId v) { return v == mt; })
                              : std::vector<VertexId>(g.vertex_count(), kNoVertex);
      for (VertexId v : domains[bi]) domain[v] = false;

      if (parent[mt] == kNoVertex) {
        out.unrouted.emplace_back(s, d);
        if (!failed) failed = bi;
        continue;
      }
      Route route{s, t, trace(parent, mt)};
      for (std::size_t k = 1; k + 1 < route.vertices.size(); ++k) used[route.vertices[k]] = true;
      out.junctions[static_cast<std::size_t>(site_tag(s, L))].arms.push_back(out.routes.size());
      out.junctions[static_cast<std::size_t>(site_tag(t, L))].arms.push_back(out.routes.size());
      out.routes.push_back(std::move(route));
    }
    if (!failed) break;

    const auto [s, d] = bonds[*failed];
    auto slot_s = static_cast<std::size_t>(site_tag(s, L));
    auto slot_t = static_cast<std::size_t>(site_tag(neighbor_of(s, d), L));
    if (bumps[slot_t] < bumps[slot_s]) std::swap(slot_s, slot_t);
    ++bumps[slot_s];
    choice[slot_s] = (choice[slot_s] + 1) % sites[slot_s].candidates.size();
  }
  return out;
}

std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::x: return "X";
    case Basis::y: return "Y";
    case Basis::z: return "Z";
    case Basis::keep: return "KEEP";
  }
  return "?";
}

std::size_t MeasurementPlan::count(Basis b) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [b](const PlanEntry& e) { return e.basis == b; }));
}

IncompletePlan::IncompletePlan(SiteIndex s, Direction d)
    : std::runtime_error("no route for bond at site (" + std::to_string(s.i) + "," +
                         std::to_string(s.j) + ") " +
                         (d == Direction::horizontal ? "horizontal" : "vertical")),
      site(s),
      direction(d) {}

namespace {

MeasurementPlan plan_from_routes(std::span<const VertexId> open_vertices,
                                 std::span<const Route> routes, std::span<const VertexId> keep) {
  std::unordered_map<VertexId, Basis> assigned;
  for (VertexId v : open_vertices) assigned.emplace(v, Basis::z);
  auto claim = [&](VertexId v, Basis b) {
    auto it = assigned.find(v);
    if (it == assigned.end()) throw std::invalid_argument("route uses a qubit that is not open");
    if (it->second != Basis::z && !(it->second == Basis::keep && b == Basis::keep)) {
      throw std::invalid_argument("routes overlap at a qubit");
    }
    it->second = b;
  };
  for (VertexId v : keep) claim(v, Basis::keep);
  for (const Route& r : routes) {
    if (r.vertices.empty()) throw std::invalid_argument("empty route");
    claim(r.vertices.front(), Basis::keep);
    claim(r.vertices.back(), Basis::keep);
  }

  MeasurementPlan plan;
  std::vector<PlanEntry> interiors;
  for (const Route& r : routes) {
    for (std::size_t k = 1; k + 1 < r.vertices.size(); ++k) {
      const Basis b = k == 1 ? Basis::y : Basis::x;
      claim(r.vertices[k], b);
      interiors.push_back({r.vertices[k], b});
    }
  }
  std::vector<VertexId> sorted(open_vertices.begin(), open_vertices.end());
  std::sort(sorted.begin(), sorted.end());
  for (VertexId v : sorted) {
    if (assigned.at(v) == Basis::z) plan.entries.push_back({v, Basis::z});
  }
  plan.entries.insert(plan.entries.end(), interiors.begin(), interiors.end());
  for (VertexId v : sorted) {
    if (assigned.at(v) == Basis::keep) plan.entries.push_back({v, Basis::keep});
  }
  return plan;
}

}  // namespace

MeasurementPlan build_plan(std::span<const VertexId> open_vertices, std::span<const Route> routes) {
  return plan_from_routes(open_vertices, routes, {});
}

MeasurementPlan build_plan(const RenormInstance& inst, const RoutingResult& routing) {
  const int L = inst.scheme.L;
  for (const auto& [s, d] : hexagonal_bonds(L)) {
    const SiteIndex t = neighbor_of(s, d);
    const bool routed = std::any_of(routing.routes.begin(), routing.routes.end(), [&](const Route& r) {
      return r.from == s && r.to == t;
    });
    if (!routed) throw IncompletePlan(s, d);
  }
  std::vector<VertexId> open;
  for (VertexId v = 0; v < inst.region->vertex_count(); ++v) {
    if (inst.config->site_open(v)) open.push_back(v);
  }
  std::vector<VertexId> keep;
  for (const Junction& jn : routing.junctions) keep.push_back(jn.vertex);
  return plan_from_routes(open, routing.routes, keep);
}

GraphState apply_plan(const GraphState& gs, const MeasurementPlan& plan) {
  std::vector<bool> listed(gs.capacity(), false);
  for (const PlanEntry& e : plan.entries) {
    if (e.vertex >= gs.capacity() || !gs.alive(e.vertex)) {
      throw std::invalid_argument("plan names a qubit that is not in the state");
    }
    if (listed[e.vertex]) throw std::invalid_argument("plan lists a qubit twice");
    listed[e.vertex] = true;
  }
  for (VertexId v : gs.vertices()) {
    if (!listed[v]) throw std::invalid_argument("plan does not cover every qubit");
  }

  GraphState out = gs;
  for (const PlanEntry& e : plan.entries) {
    switch (e.basis) {
      case Basis::keep: break;
      case Basis::x: measure_pauli(out, e.vertex, Pauli::x); break;
      case Basis::y: measure_pauli(out, e.vertex, Pauli::y); break;
      case Basis::z: measure_pauli(out, e.vertex, Pauli::z); break;
    }
  }
  return out;
}

bool verify_target(const GraphState& gs, int L) {
  const auto n = static_cast<std::int64_t>(L) * L;
  const auto verts = gs.vertices();
  if (static_cast<std::int64_t>(verts.size()) != n) return false;
  std::vector<VertexId> by_tag(static_cast<std::size_t>(n), kNoVertex);
  for (VertexId v : verts) {
    const std::int64_t t = gs.tag(v);
    if (t < 0 || t >= n || by_tag[static_cast<std::size_t>(t)] != kNoVertex) return false;
    by_tag[static_cast<std::size_t>(t)] = v;
  }
  const auto bonds = hexagonal_bonds(L);
  if (gs.edge_count() != bonds.size()) return false;
  for (const auto& [s, d] : bonds) {
    const VertexId u = by_tag[static_cast<std::size_t>(site_tag(s, L))];
    const VertexId w = by_tag[static_cast<std::size_t>(site_tag(neighbor_of(s, d), L))];
    if (!gs.has_edge(u, w)) return false;
  }
  return true;
}

PlanOutcome plan_instance(const RenormInstance& inst) {
  PlanOutcome out{route_instance(inst), {}, GraphState(0), false};
  if (!out.routing.unrouted.empty()) return out;
  out.plan = build_plan(inst, out.routing);
  GraphState gs = GraphState::from_configuration(*inst.config);
  for (const Junction& jn : out.routing.junctions) gs.set_tag(jn.vertex, site_tag(jn.site, inst.scheme.L));
  out.reduced = apply_plan(gs, out.plan);
  out.verified = verify_target(out.reduced, inst.scheme.L);
  return out;
}

void write_plan(std::ostream& os, const MeasurementPlan& plan) {
  for (const PlanEntry& e : plan.entries) os << e.vertex << ' ' << to_string(e.basis) << '\n';
}

}  // namespace perc
