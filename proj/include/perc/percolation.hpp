#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "perc/estimate.hpp"
#include "perc/lattice.hpp"
#include "perc/rng.hpp"

namespace perc {

enum class PercolationModel : std::uint8_t { bond, site, mixed };

struct PercolationParams {
  double p_bond = 1.0;
  double p_site = 1.0;
  PercolationModel model = PercolationModel::mixed;

  static PercolationParams bond(double p) { return {p, 1.0, PercolationModel::bond}; }
  static PercolationParams site(double p) { return {1.0, p, PercolationModel::site}; }
  static PercolationParams mixed(double p_site, double p_bond) {
    return {p_bond, p_site, PercolationModel::mixed};
  }

  /// Throws std::invalid_argument unless probabilities lie in [0,1] and match the model.
  void validate() const;
};

/// One realisation of the percolation process on a graph.
/// A bond is only ever open when both of its endpoints are open sites.
class Configuration {
 public:
  Configuration(const LatticeGraph& g, std::vector<bool> open_sites, std::vector<bool> open_bonds);

  const LatticeGraph& graph() const { return *graph_; }
  bool site_open(VertexId v) const { return sites_[v]; }
  bool bond_open(EdgeId e) const { return bonds_[e]; }
  const std::vector<bool>& open_sites() const { return sites_; }
  const std::vector<bool>& open_bonds() const { return bonds_; }
  std::size_t open_site_count() const;
  std::size_t open_bond_count() const;

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.graph_ == b.graph_ && a.sites_ == b.sites_ && a.bonds_ == b.bonds_;
  }

 private:
  const LatticeGraph* graph_;
  std::vector<bool> sites_;
  std::vector<bool> bonds_;
};

/// Samples a configuration. Every site and bond gets its own counter-based uniform,
/// keyed by its coordinates (a bond by the sum of its endpoints), so any two graphs
/// covering the same lattice location see the same draw. `shift` translates the
/// graph within the infinite lattice (stored units) before keying.
Configuration sample(const LatticeGraph& g, const PercolationParams& params, const RngSpec& rng,
                     Coord shift = {});

/// Restriction of a parent configuration to a sliced subgraph.
Configuration restrict_to(const SubGraph& sub, const Configuration& parent);

/// Partition of the open sites into open clusters, plus crossing annotations.
struct ClusterLabeling {
  std::vector<ClusterId> label;          ///< kNoCluster for closed sites
  std::vector<std::uint32_t> cluster_sizes;
  std::array<std::vector<ClusterId>, 3> crossing;  ///< clusters touching both faces, per axis

  std::size_t cluster_count() const { return cluster_sizes.size(); }
};

/// Union-find labelling. Cluster ids are dense and ordered by each cluster's smallest
/// vertex id.
ClusterLabeling label_clusters(const Configuration& cfg);

/// Clusters that cross every requested axis.
std::vector<ClusterId> crossing_clusters(const ClusterLabeling& lab, std::span<const Axis> axes);

std::size_t count_crossing_clusters(const ClusterLabeling& lab, Axis axis);

inline constexpr std::array<Axis, 2> kDefaultCrossingAxes{Axis::x, Axis::y};

/// Fraction of k×k×k blocks (cells of the lattice kind) that have a crossing cluster.
/// Trial t uses stream `rng.stream_id + t`.
Estimate estimate_crossing_prob(LatticeKind kind, int k, const PercolationParams& params,
                                std::uint64_t trials, const RngSpec& rng,
                                std::span<const Axis> axes = kDefaultCrossingAxes,
                                unsigned workers = 1);

/// Graph header line, then `sites <hex>` and `bonds <hex>`. Element i is bit (i mod 4)
/// of hex digit i/4, digits written left to right.
void write_configuration(std::ostream& os, const Configuration& cfg);
std::string to_hex_bits(const std::vector<bool>& bits);
std::vector<bool> from_hex_bits(std::string_view hex, std::size_t count);

}  // namespace perc
