#include "perc/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perc {
namespace {

int cell_units(LatticeKind kind) { return kind == LatticeKind::diamond ? kDiamondCellUnits : 1; }

Coord to_stored(LatticeKind kind, Coord cells) { return cell_units(kind) * cells; }

// Vertex pair (a in the lower block, b in the upper block) joined by a bond through
// the common face, with the bond key relative to the lower block's origin.
struct FacePair {
  VertexId a;
  VertexId b;
  Coord bond_sum;
};

struct SiteState {
  bool occupied = false;
  Coord representative;  // absolute coordinate, smallest vertex of the designated cluster
  // Membership of face-pair endpoints in the designated cluster, per direction,
  // as the lower (a) and the upper (b) block.
  std::array<std::vector<bool>, 2> as_lower;
  std::array<std::vector<bool>, 2> as_upper;
};

class Assembler {
 public:
  explicit Assembler(const RenormScheme& scheme)
      : scheme_(scheme), block_(build_block(scheme.kind, site_block(scheme, {}).extent)) {
    if (scheme_.blocks == BlockScheme::disjoint_face_connected) {
      for (Direction d : {Direction::horizontal, Direction::vertical}) {
        face_pairs_[static_cast<int>(d)] = find_face_pairs(d);
      }
    } else {
      union_[0] = build_block(scheme_.kind, connection_block(scheme_, {}, Direction::horizontal).extent);
      if (scheme_.L >= 2) {
        union_[1] = build_block(scheme_.kind, connection_block(scheme_, {}, Direction::vertical).extent);
      }
    }
  }

  /// Evaluates one sample; returns is_full. With `stop_early` the first failure ends
  /// the evaluation (and `out` is left partially filled).
  bool run(const RngSpec& rng, RenormalizedLattice* out, bool stop_early) const {
    const int L = scheme_.L;
    std::vector<SiteState> previous_row(L);
    std::vector<SiteState> row(L);
    bool full = true;
    for (int j = 0; j < L; ++j) {
      for (int i = 0; i < L; ++i) {
        const SiteIndex s{i, j};
        SiteProvenance prov;
        row[i] = evaluate_site(s, rng, out ? &prov : nullptr);
        if (out) out->set_site(s, row[i].occupied, std::move(prov));
        if (!row[i].occupied) {
          full = false;
          if (stop_early) return false;
        }
        if (i > 0 && !connect(row[i - 1], row[i], {i - 1, j}, Direction::horizontal, rng, out)) {
          full = false;
          if (stop_early) return false;
        }
        if (j > 0 &&
            !connect(previous_row[i], row[i], {i, j - 1}, Direction::vertical, rng, out)) {
          full = false;
          if (stop_early) return false;
        }
      }
      std::swap(previous_row, row);
    }
    return full;
  }

 private:
  Coord site_shift(SiteIndex s) const {
    return to_stored(scheme_.kind, site_block(scheme_, s).origin);
  }

  std::vector<FacePair> find_face_pairs(Direction d) const {
    const int axis = d == Direction::horizontal ? 0 : 1;
    const Box& box = block_.region();
    Coord step{};
    step[axis] = box.hi[axis] - box.lo[axis] + 1;
    std::vector<FacePair> pairs;
    for (VertexId a : block_.face_vertices(static_cast<Axis>(axis), Side::high)) {
      const Coord ca = block_.coord(a);
      for (const Coord& off : lattice_offsets(scheme_.kind, ca)) {
        const Coord w = ca + off;
        bool crosses_only_this_face = w[axis] > box.hi[axis];
        for (int other = 0; other < 3; ++other) {
          if (other != axis && (w[other] < box.lo[other] || w[other] > box.hi[other])) {
            crosses_only_this_face = false;
          }
        }
        if (!crosses_only_this_face) continue;
        const auto b = block_.find_vertex(w - step);
        if (!b) throw std::logic_error("face partner missing from block template");
        pairs.push_back({a, *b, ca + w});
      }
    }
    return pairs;
  }

  SiteState evaluate_site(SiteIndex s, const RngSpec& rng, SiteProvenance* prov) const {
    const Coord shift = site_shift(s);
    const auto cfg = sample(block_, scheme_.params, rng, shift);
    const auto lab = label_clusters(cfg);
    const auto designated = designate_crossing_cluster(lab, scheme_.axes);

    SiteState state;
    if (prov) {
      const auto crossing = crossing_clusters(lab, scheme_.axes);
      std::vector<Coord> reps(lab.cluster_count());
      std::vector<bool> seen(lab.cluster_count(), false);
      for (VertexId v = 0; v < block_.vertex_count(); ++v) {
        const ClusterId c = lab.label[v];
        if (c != kNoCluster && !seen[c]) {
          seen[c] = true;
          reps[c] = block_.coord(v) + shift;
        }
      }
      for (ClusterId c : crossing) prov->crossing_representatives.push_back(reps[c]);
      if (designated) {
        prov->designated = reps[*designated];
        prov->designated_size = lab.cluster_sizes[*designated];
      }
    }
    if (!designated) return state;

    state.occupied = true;
    for (VertexId v = 0; v < block_.vertex_count(); ++v) {
      if (lab.label[v] == *designated) {
        state.representative = block_.coord(v) + shift;
        break;
      }
    }
    if (scheme_.blocks == BlockScheme::disjoint_face_connected) {
      for (int d = 0; d < 2; ++d) {
        const auto& pairs = face_pairs_[d];
        state.as_lower[d].resize(pairs.size());
        state.as_upper[d].resize(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          state.as_lower[d][p] = lab.label[pairs[p].a] == *designated;
          state.as_upper[d][p] = lab.label[pairs[p].b] == *designated;
        }
      }
    }
    return state;
  }

  bool connect(const SiteState& lower, const SiteState& upper, SiteIndex s, Direction d,
               const RngSpec& rng, RenormalizedLattice* out) const {
    std::optional<std::pair<Coord, Coord>> witness;
    if (lower.occupied && upper.occupied) {
      witness = scheme_.blocks == BlockScheme::disjoint_face_connected
                    ? connect_through_face(lower, upper, s, d, rng)
                    : connect_through_union(lower, upper, s, d, rng);
    }
    if (out) out->set_bond(s, d, witness.has_value(), {witness});
    return witness.has_value();
  }

  std::optional<std::pair<Coord, Coord>> connect_through_face(const SiteState& lower,
                                                              const SiteState& upper, SiteIndex s,
                                                              Direction d,
                                                              const RngSpec& rng) const {
    const int di = static_cast<int>(d);
    const auto& pairs = face_pairs_[di];
    const Coord shift = site_shift(s);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (!lower.as_lower[di][p] || !upper.as_upper[di][p]) continue;
      const bool open =
          scheme_.params.p_bond >= 1.0 ||
          uniform(rng, DrawPurpose::bond, coord_key(pairs[p].bond_sum + 2 * shift)) <
              scheme_.params.p_bond;
      if (open) {
        const Coord a = block_.coord(pairs[p].a) + shift;
        return std::make_pair(a, pairs[p].bond_sum + 2 * shift - a);
      }
    }
    return std::nullopt;
  }

  std::optional<std::pair<Coord, Coord>> connect_through_union(const SiteState& lower,
                                                               const SiteState& upper,
                                                               SiteIndex s, Direction d,
                                                               const RngSpec& rng) const {
    const LatticeGraph& region = *union_[static_cast<int>(d)];
    const Coord shift = to_stored(scheme_.kind, connection_block(scheme_, s, d).origin);
    const auto lab = label_clusters(sample(region, scheme_.params, rng, shift));
    const auto a = region.find_vertex(lower.representative - shift);
    const auto b = region.find_vertex(upper.representative - shift);
    if (!a || !b) throw std::logic_error("designated cluster outside its connection region");
    if (lab.label[*a] == kNoCluster || lab.label[*a] != lab.label[*b]) return std::nullopt;
    return std::make_pair(lower.representative, upper.representative);
  }

  RenormScheme scheme_;
  LatticeGraph block_;
  std::array<std::vector<FacePair>, 2> face_pairs_;
  std::array<std::optional<LatticeGraph>, 2> union_;
};

}  // namespace

std::string_view to_string(BlockScheme s) {
  return s == BlockScheme::overlapping_cubic ? "overlapping" : "disjoint";
}

RenormScheme RenormScheme::standard(LatticeKind kind, int L, int k, PercolationParams params) {
  RenormScheme s;
  s.kind = kind;
  s.L = L;
  s.k = k;
  s.blocks = kind == LatticeKind::cubic ? BlockScheme::overlapping_cubic
                                        : BlockScheme::disjoint_face_connected;
  s.params = params;
  return s;
}

void RenormScheme::validate() const {
  if (L < 1 || k < 1) throw std::invalid_argument("renormalisation needs L >= 1 and k >= 1");
  params.validate();
  if (axes.empty()) throw std::invalid_argument("occupancy needs at least one crossing axis");
  if (blocks == BlockScheme::overlapping_cubic && kind != LatticeKind::cubic) {
    throw std::invalid_argument("overlapping blocks are defined for the cubic lattice");
  }
  if (blocks == BlockScheme::disjoint_face_connected && is_covering(kind)) {
    throw std::invalid_argument("face-connected blocks are defined for cubic and diamond lattices");
  }
}

RenormalizedLattice::RenormalizedLattice(int L)
    : L_(L),
      sites_(static_cast<std::size_t>(L) * L, false),
      bonds_(2 * static_cast<std::size_t>(L) * L, false),
      site_prov_(static_cast<std::size_t>(L) * L),
      bond_prov_(2 * static_cast<std::size_t>(L) * L) {
  if (L < 1) throw std::invalid_argument("superlattice side must be positive");
}

void RenormalizedLattice::set_site(SiteIndex s, bool occupied, SiteProvenance prov) {
  sites_[site_slot(s)] = occupied;
  site_prov_[site_slot(s)] = std::move(prov);
  if (!occupied) {
    for (Direction d : {Direction::horizontal, Direction::vertical}) bonds_[bond_slot(s, d)] = false;
    if (s.i > 0) bonds_[bond_slot({s.i - 1, s.j}, Direction::horizontal)] = false;
    if (s.j > 0) bonds_[bond_slot({s.i, s.j - 1}, Direction::vertical)] = false;
  }
}

void RenormalizedLattice::set_bond(SiteIndex s, Direction d, bool present, BondProvenance prov) {
  if (!has_neighbor(s, d)) throw std::out_of_range("bond leaves the superlattice");
  const SiteIndex t = d == Direction::horizontal ? SiteIndex{s.i + 1, s.j} : SiteIndex{s.i, s.j + 1};
  if (present && !(occupied(s) && occupied(t))) {
    throw std::logic_error("bond between unoccupied superlattice sites");
  }
  bonds_[bond_slot(s, d)] = present;
  bond_prov_[bond_slot(s, d)] = std::move(prov);
}

std::size_t RenormalizedLattice::occupied_count() const {
  return static_cast<std::size_t>(std::count(sites_.begin(), sites_.end(), true));
}

std::size_t RenormalizedLattice::bond_count() const {
  return static_cast<std::size_t>(std::count(bonds_.begin(), bonds_.end(), true));
}

std::vector<SiteIndex> RenormalizedLattice::missing_sites() const {
  std::vector<SiteIndex> out;
  for (int j = 0; j < L_; ++j) {
    for (int i = 0; i < L_; ++i) {
      if (!occupied({i, j})) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<std::pair<SiteIndex, Direction>> RenormalizedLattice::missing_bonds() const {
  std::vector<std::pair<SiteIndex, Direction>> out;
  for (int j = 0; j < L_; ++j) {
    for (int i = 0; i < L_; ++i) {
      for (Direction d : {Direction::horizontal, Direction::vertical}) {
        if (has_neighbor({i, j}, d) && !bond({i, j}, d)) out.emplace_back(SiteIndex{i, j}, d);
      }
    }
  }
  return out;
}

bool is_full(const RenormalizedLattice& rl) {
  return rl.missing_sites().empty() && rl.missing_bonds().empty();
}

Extent region_extent(const RenormScheme& s) {
  if (s.blocks == BlockScheme::overlapping_cubic) {
    return {2 * s.k * s.L, 2 * s.k * s.L, s.L >= 2 ? 4 * s.k : 2 * s.k};
  }
  return {s.k * s.L, s.k * s.L, s.k};
}

BlockSpec site_block(const RenormScheme& s, SiteIndex site) {
  if (s.blocks == BlockScheme::overlapping_cubic) {
    return {{2 * s.k * site.i, 2 * s.k * site.j, 0}, {2 * s.k, 2 * s.k, 2 * s.k}, s.k};
  }
  return {{s.k * site.i, s.k * site.j, 0}, {s.k, s.k, s.k}, s.k};
}

BlockSpec connection_block(const RenormScheme& s, SiteIndex site, Direction d) {
  BlockSpec spec = site_block(s, site);
  const int side = spec.extent.x;
  if (s.blocks == BlockScheme::overlapping_cubic) {
    spec.extent = d == Direction::horizontal ? Extent{2 * side, side, side}
                                             : Extent{side, 2 * side, 2 * side};
  } else {
    spec.extent = d == Direction::horizontal ? Extent{2 * side, side, side}
                                             : Extent{side, 2 * side, side};
  }
  return spec;
}

std::optional<ClusterId> designate_crossing_cluster(const ClusterLabeling& lab,
                                                    std::span<const Axis> axes) {
  std::optional<ClusterId> best;
  for (ClusterId c : crossing_clusters(lab, axes)) {
    if (!best || lab.cluster_sizes[c] > lab.cluster_sizes[*best]) best = c;
  }
  return best;
}

RenormalizedLattice build_renormalized(const RenormScheme& scheme, const RngSpec& rng) {
  scheme.validate();
  RenormalizedLattice rl(scheme.L);
  Assembler(scheme).run(rng, &rl, false);
  return rl;
}

RenormInstance build_instance(const RenormScheme& scheme, const RngSpec& rng) {
  scheme.validate();
  auto region = std::make_unique<LatticeGraph>(build_block(scheme.kind, region_extent(scheme)));
  auto config = std::make_unique<Configuration>(sample(*region, scheme.params, rng));
  return {scheme, rng, std::move(region), std::move(config), build_renormalized(scheme, rng)};
}

Estimate estimate_P(const RenormScheme& scheme, std::uint64_t trials, const RngSpec& rng,
                    unsigned workers) {
  scheme.validate();
  const Assembler assembler(scheme);
  return estimate_bernoulli(trials, workers, [&](std::uint64_t t) {
    return assembler.run(rng.with_stream(rng.stream_id + t), nullptr, true);
  });
}

BlockSizeSearch min_block_size(LatticeKind kind, const PercolationParams& params, int L,
                               double threshold, std::uint64_t trials, int k_max,
                               const RngSpec& rng, unsigned workers) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie strictly between 0 and 1");
  }
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  BlockSizeSearch out;
  for (int k = 1; k <= k_max; ++k) {
    const auto est = estimate_P(RenormScheme::standard(kind, L, k, params), trials, rng, workers);
    out.rows.push_back({L, k, est});
    if (est.value >= threshold) {
      out.k_min = k;
      break;
    }
  }
  return out;
}

void BoundConstants::validate() const {
  if (!(a > 0 && c > 0 && d > 0 && epsilon > 0 && k0 > 0)) {
    throw std::invalid_argument("bound constants must all be positive");
  }
}

namespace {

// log(1 - x) for x in [0, 1); -inf once the factor is no longer a probability.
double log_one_minus(double x) { return x >= 1.0 ? -INFINITY : std::log1p(-x); }

}  // namespace

LowerBound evaluate_lower_bound(double L, double k, const BoundConstants& cst) {
  cst.validate();
  if (L < 1) throw std::invalid_argument("L must be at least 1");
  if (k < cst.k0) throw std::invalid_argument("bound only holds for k >= k0");

  const double crossing_miss = std::exp(-cst.d * k * k);
  const double unique_miss = std::pow(2 * k, 6) * cst.a * std::exp(-cst.c * k);
  const double unique_miss_tall = std::pow(4 * k, 6) * cst.a * std::exp(-2 * cst.c * k);

  // A zero exponent leaves a factor of one even when its base is not a probability.
  auto power = [](double exponent, double log_base) { return exponent == 0 ? 0.0 : exponent * log_base; };
  const double log_full =
      power(2 * L * L - L, log_one_minus(crossing_miss)) +
      power(L * (L - 1), 2 * log_one_minus(unique_miss) + log_one_minus(unique_miss_tall));
  const double log_simplified = power(5 * L * L, log_one_minus(unique_miss));
  auto to_prob = [](double lg) { return std::isfinite(lg) ? std::clamp(std::exp(lg), 0.0, 1.0) : 0.0; };
  return {to_prob(log_full), to_prob(log_simplified)};
}

int smallest_valid_k0(const BoundConstants& cst) {
  // Dominance holds once the uniqueness term is the slowest: it exceeds both the
  // crossing term and the tall-block uniqueness term.
  constexpr int kLimit = 10000;
  int last_bad = 0;
  for (int k = 1; k <= kLimit; ++k) {
    const double log_unique = std::log(cst.a) + 6 * std::log(2.0 * k) - cst.c * k;
    const double log_tall = std::log(cst.a) + 6 * std::log(4.0 * k) - 2 * cst.c * k;
    const double log_cross = -cst.d * static_cast<double>(k) * k;
    if (log_unique < log_tall || log_unique < log_cross) last_bad = k;
  }
  return last_bad + 1;
}

}  // namespace perc
