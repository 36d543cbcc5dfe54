#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perc/graph_state.hpp"
#include "perc/percolation.hpp"
#include "perc/renorm.hpp"

namespace perc {

/// Simple path of open bonds between two block midpoints (region vertex ids).
struct Route {
  SiteIndex from;
  SiteIndex to;
  std::vector<VertexId> vertices;  ///< front() is the midpoint of `from`, back() of `to`
};

/// Meeting point of the routes of one superlattice site (three arms in the bulk).
struct Junction {
  VertexId vertex = kNoVertex;
  SiteIndex site;
  std::vector<std::size_t> arms;  ///< indices into the route list
};

/// Midpoint of a block's crossing cluster and a shortest path from it to each face.
struct BlockRouting {
  VertexId midpoint = kNoVertex;
  ClusterId cluster = kNoCluster;
  /// Indexed by 2 * axis + side; empty for axes that were not requested.
  std::array<std::vector<VertexId>, 6> to_face;
};

/// Routes inside one block (the configuration's graph). Returns nothing when the block
/// has no crossing cluster, which leaves the superlattice site unoccupied.
std::optional<BlockRouting> route_block(const Configuration& cfg, const ClusterLabeling& lab,
                                        std::span<const Axis> axes = kDefaultCrossingAxes);

/// Crossing-cluster vertex closest to the geometric centre of the configuration's region,
/// ties to the lowest vertex id. Only vertices with at least `min_degree` open bonds are
/// candidates (a junction needs one bond per arm) unless none qualifies.
VertexId cluster_midpoint(const Configuration& cfg, const ClusterLabeling& lab, ClusterId cluster,
                          std::size_t min_degree = 0);

/// Edges of the brick-wall hexagonal lattice on the L x L superlattice: every vertical
/// bond, and the horizontal bond (i,j)-(i+1,j) when i + j is even. Sites with i + j
/// even therefore use arms {N, E, S}; the others use {N, W, S}.
std::vector<std::pair<SiteIndex, Direction>> hexagonal_bonds(int L);

/// The hexagonal target as a graph state; qubit i + L*j is tagged i + L*j.
GraphState hexagonal_target(int L);

struct RoutingResult {
  std::vector<Junction> junctions;  ///< one per site, row-major
  std::vector<Route> routes;
  std::vector<std::pair<SiteIndex, Direction>> unrouted;
};

/// Routes every hexagonal bond of a full instance. Routes are BFS-shortest within the
/// clusters that witness the bond and avoid touching earlier routes and midpoints, so
/// all routes together induce a subdivision of the target without chords.
RoutingResult route_instance(const RenormInstance& inst);

enum class Basis : std::uint8_t { x, y, z, keep };
std::string_view to_string(Basis b);

struct PlanEntry {
  VertexId vertex;
  Basis basis;
};

/// Per-qubit bases in measurement order: Z first (ascending ids), then route interiors
/// from each route's start, then the kept junction qubits.
struct MeasurementPlan {
  std::vector<PlanEntry> entries;

  std::size_t count(Basis b) const;
};

class IncompletePlan : public std::runtime_error {
 public:
  IncompletePlan(SiteIndex site, Direction d);
  SiteIndex site;
  Direction direction;
};

/// Plan for an explicit set of routes over the given open qubits. Route endpoints are
/// kept; a route interior is measured Y at its first qubit and X afterwards (each X
/// then acts as Y through the local Clifford left by the previous measurement).
MeasurementPlan build_plan(std::span<const VertexId> open_vertices, std::span<const Route> routes);

/// Plan for a full instance; throws IncompletePlan when a hexagonal bond has no route.
MeasurementPlan build_plan(const RenormInstance& inst, const RoutingResult& routing);

/// Applies the plan in order. Every live qubit must appear in the plan.
GraphState apply_plan(const GraphState& gs, const MeasurementPlan& plan);

/// True iff the surviving qubits carry tags 0..L^2-1 exactly once and their edges are
/// exactly the hexagonal bonds between the tagged sites.
bool verify_target(const GraphState& gs, int L);

struct PlanOutcome {
  RoutingResult routing;
  MeasurementPlan plan;
  GraphState reduced;
  bool verified = false;
};

/// Routing, plan, reduction of the percolated graph state, and verification.
PlanOutcome plan_instance(const RenormInstance& inst);

/// One `vertex_id basis` line per plan entry, in plan order.
void write_plan(std::ostream& os, const MeasurementPlan& plan);

}  // namespace perc
