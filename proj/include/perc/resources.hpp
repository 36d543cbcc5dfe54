#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perc/estimate.hpp"
#include "perc/lattice.hpp"
#include "perc/percolation.hpp"
#include "perc/rng.hpp"

namespace perc {

/// Initial cluster states and the fusion gates that join them.
///   cubic, 7: stars, one per vertex
///   cubic, 5: pairs of 3-arm stars with a redundantly encoded centre, two per vertex
///   covering_cubic, 6: K6 graph states, one per cubic vertex
///   diamond, 5: stars, one per vertex
///   pyrochlore, 4: GHZ states, one per diamond vertex (a tetrahedron of covering sites)
struct ResourceSpec {
  LatticeKind kind = LatticeKind::cubic;
  int initial_state_size = 7;
  double p_fusion = 0.5;

  /// Plain stars for base kinds, K6 / GHZ states for covering kinds.
  static ResourceSpec standard(LatticeKind kind, double p_fusion = 0.5);
  void validate() const;
};

struct LossSpec {
  double p_loss_heralded = 0.0;
  double p_loss_effective = 1e-5;
  std::vector<int> branching{6, 7, 7, 1};

  void validate() const;
};

/// A site built from two redundantly encoded centres survives if either centre fusion
/// succeeds: 1 - (1 - p)^2.
double site_success_prob_5star(double p_fusion);

/// Site and bond probabilities induced by the gate layer.
PercolationParams mixed_params_from_gates(const ResourceSpec& spec);

struct ResourceCount {
  std::uint64_t n_states = 0;
  std::uint64_t n_qubits = 0;
};

/// Initial states needed to assemble the region sampled for an L x L superlattice of
/// blocks of size k (see region_extent). Covering kinds use the region of their base.
ResourceCount resource_count(const ResourceSpec& spec, int L, int k);
/// Same, with the standard resource for `kind`.
ResourceCount resource_count(LatticeKind kind, int L, int k);

/// Vertices of the base lattice (cubic or diamond) in the region used for L and k.
std::uint64_t base_vertex_count(LatticeKind kind, int L, int k);

/// Heralded loss: each site is lost independently with probability p_loss; every site
/// within `radius` graph steps of a lost site is closed together with its bonds.
/// Loss draws are keyed by coordinates, like the percolation draws.
Configuration apply_heralded_loss(const Configuration& cfg, double p_loss, const RngSpec& rng,
                                  int radius = 1);

/// Crossing probability of k^3 blocks sampled with `params` and then subjected to
/// heralded loss. Trial t uses stream `rng.stream_id + t` for both steps.
Estimate estimate_crossing_with_loss(LatticeKind kind, int k, const PercolationParams& params,
                                     double p_loss, std::uint64_t trials, const RngSpec& rng,
                                     std::span<const Axis> axes = kDefaultCrossingAxes,
                                     unsigned workers = 1, int radius = 1);

/// Overall failure rate of one renormalised site: it fails if any of its qubits is lost
/// (effective rate after encoding) or if its block is not crossed:
/// 1 - (1 - p_effective)^qubits * (1 - block_nocross_prob).
double loss_budget(double p_effective, double block_nocross_prob, std::uint64_t qubits_in_use);

/// Largest qubit count whose loss_budget stays strictly below `limit`.
std::uint64_t max_qubits_within_budget(double p_effective, double block_nocross_prob,
                                       double limit = 3e-3);

/// Least-squares fit of log(q) = alpha + beta * k through (k, q) pairs with q > 0.
struct DecayFit {
  double alpha = 0.0;
  double beta = 0.0;

  double at(double k) const;
};
DecayFit fit_exponential_decay(std::span<const int> ks, std::span<const double> probs);

}  // namespace perc
