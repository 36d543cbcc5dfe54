#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "perc/estimate.hpp"
#include "perc/lattice.hpp"
#include "perc/percolation.hpp"
#include "perc/rng.hpp"

namespace perc {

/// How blocks of the underlying lattice become superlattice sites.
enum class BlockScheme : std::uint8_t {
  /// (2k)^3 cubic blocks at spacing 2k; neighbours are connected through the union of
  /// the two blocks, which contains the overlapping block between them.
  overlapping_cubic,
  /// Disjoint k^3 blocks; neighbours are connected by open bonds through the common face.
  disjoint_face_connected,
};

std::string_view to_string(BlockScheme s);

struct RenormScheme {
  LatticeKind kind = LatticeKind::cubic;
  int L = 1;
  int k = 1;
  BlockScheme blocks = BlockScheme::overlapping_cubic;
  PercolationParams params;
  std::vector<Axis> axes{Axis::x, Axis::y};

  /// Overlapping blocks for the cubic lattice, face-connected disjoint blocks otherwise.
  static RenormScheme standard(LatticeKind kind, int L, int k, PercolationParams params);
  void validate() const;
};

enum class Direction : std::uint8_t { horizontal, vertical };

/// A superlattice site (i, j), both in [0, L).
struct SiteIndex {
  int i = 0;
  int j = 0;
  friend constexpr bool operator==(SiteIndex, SiteIndex) = default;
};

struct SiteProvenance {
  /// Smallest-coordinate vertex of every crossing cluster, in cluster-id order.
  std::vector<Coord> crossing_representatives;
  std::optional<Coord> designated;
  std::uint32_t designated_size = 0;
};

struct BondProvenance {
  /// Designated-cluster vertices joined by the connection: the open face bond for
  /// face-connected blocks, the two cluster representatives for overlapping blocks.
  std::optional<std::pair<Coord, Coord>> witness;
};

class RenormalizedLattice {
 public:
  explicit RenormalizedLattice(int L);

  int L() const { return L_; }
  bool occupied(SiteIndex s) const { return sites_[site_slot(s)]; }
  /// Bond from `s` to its +x (horizontal) or +y (vertical) neighbour.
  bool bond(SiteIndex s, Direction d) const { return bonds_[bond_slot(s, d)]; }
  const SiteProvenance& site_provenance(SiteIndex s) const { return site_prov_[site_slot(s)]; }
  const BondProvenance& bond_provenance(SiteIndex s, Direction d) const {
    return bond_prov_[bond_slot(s, d)];
  }

  void set_site(SiteIndex s, bool occupied, SiteProvenance prov = {});
  void set_bond(SiteIndex s, Direction d, bool present, BondProvenance prov = {});

  bool has_neighbor(SiteIndex s, Direction d) const {
    return d == Direction::horizontal ? s.i + 1 < L_ : s.j + 1 < L_;
  }
  std::size_t occupied_count() const;
  std::size_t bond_count() const;
  std::vector<SiteIndex> missing_sites() const;
  std::vector<std::pair<SiteIndex, Direction>> missing_bonds() const;

 private:
  std::size_t site_slot(SiteIndex s) const { return static_cast<std::size_t>(s.j) * L_ + s.i; }
  std::size_t bond_slot(SiteIndex s, Direction d) const {
    return 2 * site_slot(s) + (d == Direction::vertical ? 1 : 0);
  }

  int L_;
  std::vector<bool> sites_;
  std::vector<bool> bonds_;
  std::vector<SiteProvenance> site_prov_;
  std::vector<BondProvenance> bond_prov_;
};

/// True iff every site is occupied and every nearest-neighbour bond is present.
bool is_full(const RenormalizedLattice& rl);

/// Underlying region (in cells) that a scheme samples. Overlapping cubic blocks use a
/// third extent of 4k once vertical connections exist (L >= 2) and 2k otherwise.
Extent region_extent(const RenormScheme& scheme);
BlockSpec site_block(const RenormScheme& scheme, SiteIndex s);
/// Region searched for the connection between `s` and its neighbour in direction `d`.
BlockSpec connection_block(const RenormScheme& scheme, SiteIndex s, Direction d);

/// Largest crossing cluster over `axes`, ties to the smallest cluster id.
std::optional<ClusterId> designate_crossing_cluster(const ClusterLabeling& lab,
                                                    std::span<const Axis> axes);

/// One sample of the whole underlying region, evaluated block by block.
RenormalizedLattice build_renormalized(const RenormScheme& scheme, const RngSpec& rng);

/// A renormalised sample together with the materialised region graph and configuration.
struct RenormInstance {
  RenormScheme scheme;
  RngSpec rng;
  std::unique_ptr<LatticeGraph> region;
  std::unique_ptr<Configuration> config;
  RenormalizedLattice lattice;
};

RenormInstance build_instance(const RenormScheme& scheme, const RngSpec& rng);

/// Fraction of independent samples that are full. Trial t uses stream `rng.stream_id + t`.
Estimate estimate_P(const RenormScheme& scheme, std::uint64_t trials, const RngSpec& rng,
                    unsigned workers = 1);

struct ScalingRow {
  int L = 0;
  int k = 0;
  Estimate estimate;
};

struct BlockSizeSearch {
  std::vector<ScalingRow> rows;
  std::optional<int> k_min;  ///< empty when no k <= k_max reaches the threshold
};

/// Smallest k in [1, k_max] whose estimate reaches `threshold`, scanning k upwards.
BlockSizeSearch min_block_size(LatticeKind kind, const PercolationParams& params, int L,
                               double threshold, std::uint64_t trials, int k_max,
                               const RngSpec& rng, unsigned workers = 1);

struct BoundConstants {
  double a = 1.0;
  double c = 1.0;
  double d = 1.0;
  double epsilon = 0.5;
  double k0 = 1.0;

  void validate() const;
};

struct LowerBound {
  double full = 0.0;
  double simplified = 0.0;
};

/// Product lower bound on the probability that every superlattice site is occupied,
/// and its single-term simplification (1 - (2k)^6 a e^{-ck})^{5L^2}. Both in [0,1].
LowerBound evaluate_lower_bound(double L, double k, const BoundConstants& constants);

/// Smallest integer k from which the simplified bound stays below the full bound
/// (checked up to k = 10^4).
int smallest_valid_k0(const BoundConstants& constants);

}  // namespace perc
