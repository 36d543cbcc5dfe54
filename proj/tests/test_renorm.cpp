#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perc/renorm.hpp"

using namespace perc;

namespace {

// Transitive closure of the open-bond adjacency matrix, rows packed into 64-bit words.
class Reachability {
 public:
  explicit Reachability(const Configuration& cfg) {
    const LatticeGraph& g = cfg.graph();
    n_ = g.vertex_count();
    words_ = (n_ + 63) / 64;
    rows_.assign(n_ * words_, 0);
    for (VertexId v = 0; v < n_; ++v) {
      if (cfg.site_open(v)) set(v, v);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (cfg.bond_open(e)) set(g.edge(e).u, g.edge(e).v), set(g.edge(e).v, g.edge(e).u);
    }
    for (std::size_t m = 0; m < n_; ++m) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (!(*this)(i, m)) continue;
        for (std::size_t w = 0; w < words_; ++w) rows_[i * words_ + w] |= rows_[m * words_ + w];
      }
    }
  }
  bool operator()(std::size_t i, std::size_t j) const { return (rows_[i * words_ + j / 64] >> (j % 64)) & 1u; }

 private:
  void set(std::size_t i, std::size_t j) { rows_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
  std::size_t n_ = 0, words_ = 0;
  std::vector<std::uint64_t> rows_;
};

// Designated crossing cluster of a slice as a set of region vertex ids, recomputed from
// reachability: largest crossing class, ties to the class with the smallest vertex.
std::vector<bool> designated_by_reachability(const SubGraph& sub, const Configuration& cfg,
                                             std::span<const Axis> axes) {
  const LatticeGraph& g = sub.graph;
  const Reachability r(cfg);
  std::vector<bool> best;
  std::size_t best_size = 0;
  std::vector<bool> done(g.vertex_count(), false);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!cfg.site_open(v) || done[v]) continue;
    std::vector<bool> cls(g.vertex_count(), false);
    std::size_t size = 0;
    for (VertexId w = 0; w < g.vertex_count(); ++w) {
      if (r(v, w)) cls[w] = done[w] = true, ++size;
    }
    bool crossing = true;
    for (Axis a : axes) {
      for (Side s : {Side::low, Side::high}) {
        const auto& f = g.face_vertices(a, s);
        crossing = crossing && std::any_of(f.begin(), f.end(), [&](VertexId w) { return cls[w]; });
      }
    }
    if (crossing && size > best_size) best = cls, best_size = size;
  }
  std::vector<bool> in_region;
  if (best_size == 0) return in_region;
  in_region.assign(*std::max_element(sub.parent_vertex.begin(), sub.parent_vertex.end()) + 1, false);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (best[v]) in_region[sub.parent_vertex[v]] = true;
  }
  return in_region;
}

bool member(const std::vector<bool>& set, VertexId v) { return v < set.size() && set[v]; }

// Oracle lattice for the face-connected scheme from the materialised region configuration.
RenormalizedLattice oracle_lattice(const RenormInstance& inst) {
  const RenormScheme& s = inst.scheme;
  const LatticeGraph& region = *inst.region;
  const int L = s.L;
  std::vector<std::vector<bool>> designated(static_cast<std::size_t>(L) * L);
  RenormalizedLattice rl(L);
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) {
      const auto sub = slice_block(region, site_block(s, {i, j}));
      designated[j * L + i] = designated_by_reachability(sub, restrict_to(sub, *inst.config), s.axes);
      rl.set_site({i, j}, !designated[j * L + i].empty());
    }
  }
  for (int j = 0; j < L; ++j) {
    for (int i = 0; i < L; ++i) {
      for (Direction d : {Direction::horizontal, Direction::vertical}) {
        if (!rl.has_neighbor({i, j}, d)) continue;
        const auto& a = designated[j * L + i];
        const auto& b = designated[d == Direction::horizontal ? j * L + i + 1 : (j + 1) * L + i];
        bool joined = false;
        for (EdgeId e = 0; e < region.edge_count(); ++e) {
          const Edge ed = region.edge(e);
          if (!inst.config->bond_open(e)) continue;
          joined = joined || (member(a, ed.u) && member(b, ed.v)) || (member(a, ed.v) && member(b, ed.u));
        }
        if (joined) rl.set_bond({i, j}, d, true);
      }
    }
  }
  return rl;
}

bool same_lattice(const RenormalizedLattice& a, const RenormalizedLattice& b) {
  if (a.L() != b.L()) return false;
  for (int j = 0; j < a.L(); ++j) {
    for (int i = 0; i < a.L(); ++i) {
      if (a.occupied({i, j}) != b.occupied({i, j})) return false;
      for (Direction d : {Direction::horizontal, Direction::vertical}) {
        if (a.has_neighbor({i, j}, d) && a.bond({i, j}, d) != b.bond({i, j}, d)) return false;
      }
    }
  }
  return true;
}

void check_bonds_need_sites(const RenormalizedLattice& rl) {
  for (int j = 0; j < rl.L(); ++j) {
    for (int i = 0; i < rl.L(); ++i) {
      if (rl.has_neighbor({i, j}, Direction::horizontal) && rl.bond({i, j}, Direction::horizontal)) {
        CHECK((rl.occupied({i, j}) && rl.occupied({i + 1, j})));
      }
      if (rl.has_neighbor({i, j}, Direction::vertical) && rl.bond({i, j}, Direction::vertical)) {
        CHECK((rl.occupied({i, j}) && rl.occupied({i, j + 1})));
      }
    }
  }
}

}  // namespace

TEST_SUITE("renorm") {
  TEST_CASE("block geometry") {
    const auto ov = RenormScheme::standard(LatticeKind::cubic, 3, 2, PercolationParams::bond(0.5));
    CHECK(ov.blocks == BlockScheme::overlapping_cubic);
    CHECK(region_extent(ov) == Extent{12, 12, 8});
    CHECK(site_block(ov, {1, 2}).origin == Coord{4, 8, 0});
    CHECK(site_block(ov, {1, 2}).extent == Extent{4, 4, 4});
    CHECK(connection_block(ov, {0, 0}, Direction::horizontal).extent == Extent{8, 4, 4});
    CHECK(connection_block(ov, {0, 0}, Direction::vertical).extent == Extent{4, 8, 8});
    CHECK(region_extent(RenormScheme::standard(LatticeKind::cubic, 1, 2, {})) == Extent{4, 4, 4});
    const auto dj = RenormScheme::standard(LatticeKind::diamond, 3, 2, PercolationParams::bond(0.5));
    CHECK(dj.blocks == BlockScheme::disjoint_face_connected);
    CHECK(region_extent(dj) == Extent{6, 6, 2});
    CHECK(site_block(dj, {2, 1}).origin == Coord{4, 2, 0});
  }

  TEST_CASE("scheme validation") {
    auto bad = RenormScheme::standard(LatticeKind::cubic, 0, 2, {});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = RenormScheme::standard(LatticeKind::diamond, 2, 2, {});
    bad.blocks = BlockScheme::overlapping_cubic;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(RenormScheme::standard(LatticeKind::pyrochlore, 2, 2, {}).validate(), std::invalid_argument);
  }

  TEST_CASE("lattice bookkeeping") {
    RenormalizedLattice rl(3);
    CHECK_FALSE(is_full(rl));
    CHECK(rl.missing_sites().size() == 9);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) rl.set_site({i, j}, true);
    }
    CHECK(rl.missing_bonds().size() == 12);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        for (Direction d : {Direction::horizontal, Direction::vertical}) {
          if (rl.has_neighbor({i, j}, d)) rl.set_bond({i, j}, d, true);
        }
      }
    }
    CHECK(is_full(rl));
    rl.set_bond({1, 1}, Direction::vertical, false);
    CHECK_FALSE(is_full(rl));
    CHECK(rl.missing_bonds().size() == 1);
    CHECK_THROWS_AS(rl.set_bond({2, 0}, Direction::horizontal, true), std::out_of_range);
    rl.set_site({0, 0}, false);
    CHECK_FALSE(rl.bond({0, 0}, Direction::horizontal));
    CHECK_THROWS(rl.set_bond({0, 0}, Direction::vertical, true));
    CHECK_THROWS_AS(RenormalizedLattice(0), std::invalid_argument);
  }

  TEST_CASE("fully open lattices are full") {
    for (LatticeKind kind : {LatticeKind::cubic, LatticeKind::diamond}) {
      for (int L : {1, 2, 3}) {
        const auto rl = build_renormalized(RenormScheme::standard(kind, L, 2, PercolationParams::mixed(1, 1)), {1, 0});
        CHECK(rl.occupied_count() == static_cast<std::size_t>(L * L));
        CHECK(rl.bond_count() == static_cast<std::size_t>(2 * L * (L - 1)));
        CHECK(is_full(rl));
        check_bonds_need_sites(rl);
        CHECK(rl.site_provenance({0, 0}).designated.has_value());
        if (L > 1) CHECK(rl.bond_provenance({0, 0}, Direction::horizontal).witness.has_value());
      }
    }
  }

  TEST_CASE("closed bonds occupy nothing") {
    for (LatticeKind kind : {LatticeKind::cubic, LatticeKind::diamond}) {
      const auto rl = build_renormalized(RenormScheme::standard(kind, 3, 2, PercolationParams::bond(0)), {1, 0});
      CHECK(rl.occupied_count() == 0);
      CHECK(rl.bond_count() == 0);
    }
  }

  TEST_CASE("designation picks the largest crossing cluster") {
    ClusterLabeling lab;
    lab.cluster_sizes = {5, 9, 9, 20};
    lab.crossing[0] = {0, 1, 2};
    lab.crossing[1] = {0, 1, 2, 3};
    CHECK(designate_crossing_cluster(lab, kDefaultCrossingAxes) == ClusterId{1});
    const std::array<Axis, 1> y{Axis::y};
    CHECK(designate_crossing_cluster(lab, y) == ClusterId{3});
    const std::array<Axis, 1> z{Axis::z};
    CHECK_FALSE(designate_crossing_cluster(lab, z).has_value());
  }

  TEST_CASE("block evaluation agrees with a reachability oracle on the identical sample") {
    const std::uint64_t trials = 1000;
    const auto scheme = RenormScheme::standard(LatticeKind::diamond, 2, 4, PercolationParams::mixed(0.75, 0.5));
    std::uint64_t full = 0, oracle_full = 0, mismatches = 0, occupied = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto inst = build_instance(scheme, {31, t});
      const auto oracle = oracle_lattice(inst);
      mismatches += same_lattice(inst.lattice, oracle) ? 0 : 1;
      full += is_full(inst.lattice) ? 1 : 0;
      oracle_full += is_full(oracle) ? 1 : 0;
      occupied += inst.lattice.occupied_count();
      check_bonds_need_sites(inst.lattice);
    }
    MESSAGE("full " << full << " oracle " << oracle_full << " occupied sites " << occupied);
    CHECK(mismatches == 0);
    const auto a = make_estimate(full, trials), b = make_estimate(oracle_full, trials);
    CHECK(std::abs(a.value - b.value) <= 3 * std::hypot(a.standard_error, b.standard_error));
    CHECK(make_estimate(full, trials).value == estimate_P(scheme, trials, {31, 0}).value);
  }

  TEST_CASE("block evaluation agrees with the oracle at a supercritical point") {
    const auto scheme = RenormScheme::standard(LatticeKind::diamond, 3, 3, PercolationParams::mixed(0.95, 0.7));
    std::uint64_t occupied = 0, bonds = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto inst = build_instance(scheme, {32, t});
      CHECK(same_lattice(inst.lattice, oracle_lattice(inst)));
      occupied += inst.lattice.occupied_count();
      bonds += inst.lattice.bond_count();
    }
    CHECK(occupied > 300);
    CHECK(bonds > 300);
  }

  TEST_CASE("overlapping connections are decided in the union region") {
    const auto scheme = RenormScheme::standard(LatticeKind::cubic, 2, 2, PercolationParams::bond(0.33));
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto inst = build_instance(scheme, {33, t});
      check_bonds_need_sites(inst.lattice);
      for (Direction d : {Direction::horizontal, Direction::vertical}) {
        const SiteIndex s{0, 0};
        const SiteIndex n = d == Direction::horizontal ? SiteIndex{1, 0} : SiteIndex{0, 1};
        if (!inst.lattice.occupied(s) || !inst.lattice.occupied(n)) continue;
        const auto sub = slice_block(*inst.region, connection_block(scheme, s, d));
        const auto lab = label_clusters(restrict_to(sub, *inst.config));
        const auto a = sub.graph.find_vertex(*inst.lattice.site_provenance(s).designated);
        const auto b = sub.graph.find_vertex(*inst.lattice.site_provenance(n).designated);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(inst.lattice.bond(s, d) == (lab.label[*a] == lab.label[*b]));
      }
    }
  }

  TEST_CASE("estimates at the extremes") {
    for (LatticeKind kind : {LatticeKind::cubic, LatticeKind::diamond}) {
      CHECK(estimate_P(RenormScheme::standard(kind, 3, 2, PercolationParams::mixed(1, 1)), 20, {1, 0}).value == 1.0);
      CHECK(estimate_P(RenormScheme::standard(kind, 3, 2, PercolationParams::bond(0)), 20, {1, 0}).value == 0.0);
    }
    const auto est = estimate_P(RenormScheme::standard(LatticeKind::cubic, 2, 2, PercolationParams::bond(0.3)), 200, {2, 0}, 3);
    CHECK(est.value == estimate_P(RenormScheme::standard(LatticeKind::cubic, 2, 2, PercolationParams::bond(0.3)), 200, {2, 0}, 1).value);
  }

  TEST_CASE("estimate_P is non-decreasing in k") {
    const auto check_grid = [](LatticeKind kind, PercolationParams params, int L) {
      Estimate prev;
      bool first = true;
      for (int k : {2, 4, 6, 8}) {
        const auto est = estimate_P(RenormScheme::standard(kind, L, k, params), 1000, {41, 0});
        if (!first) CHECK(est.value >= prev.value - 3 * std::hypot(est.standard_error, prev.standard_error));
        prev = est;
        first = false;
      }
    };
    check_grid(LatticeKind::diamond, PercolationParams::mixed(0.75, 0.5), 2);
    check_grid(LatticeKind::diamond, PercolationParams::mixed(0.9, 0.6), 2);
    check_grid(LatticeKind::cubic, PercolationParams::bond(0.3), 2);
  }

  TEST_CASE("coupled samples are monotone in the probabilities") {
    const std::array<PercolationParams, 4> ladder{PercolationParams::mixed(0.8, 0.6), PercolationParams::mixed(0.9, 0.6),
                                                  PercolationParams::mixed(0.9, 0.7), PercolationParams::mixed(1.0, 0.8)};
    for (LatticeKind kind : {LatticeKind::cubic, LatticeKind::diamond}) {
      int violations = 0, full_any = 0;
      for (std::uint64_t t = 0; t < 300; ++t) {
        bool prev = false;
        for (const auto& p : ladder) {
          const auto scheme = RenormScheme::standard(kind, 2, kind == LatticeKind::cubic ? 1 : 2, p);
          const bool full = is_full(build_renormalized(scheme, {51, t}));
          violations += prev && !full ? 1 : 0;
          full_any += full ? 1 : 0;
          prev = full;
        }
      }
      CHECK(violations == 0);
      CHECK(full_any > 0);
    }
  }

  TEST_CASE("occupancy events are positively correlated") {
    const auto scheme = RenormScheme::standard(LatticeKind::cubic, 2, 2, PercolationParams::bond(0.3));
    const std::uint64_t trials = 2000;
    std::array<std::uint64_t, 4> site{};
    std::uint64_t all = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto rl = build_renormalized(scheme, {61, t});
      for (int s = 0; s < 4; ++s) site[s] += rl.occupied({s % 2, s / 2}) ? 1 : 0;
      all += rl.occupied_count() == 4 ? 1 : 0;
    }
    double product = 1, rel_var = 0;
    for (auto c : site) {
      const auto e = make_estimate(c, trials);
      product *= e.value;
      rel_var += (1 - e.value) / (e.value * trials);
    }
    const auto joint = make_estimate(all, trials);
    const double sigma = std::hypot(joint.standard_error, product * std::sqrt(rel_var));
    MESSAGE("P(all occupied) " << joint.value << " product " << product);
    CHECK(joint.value >= product - 3 * sigma);
  }

  TEST_CASE("minimal block size search") {
    const auto found = min_block_size(LatticeKind::diamond, PercolationParams::mixed(1, 1), 4, 0.5, 10, 5, {1, 0});
    CHECK(found.k_min == 1);
    CHECK(found.rows.size() == 1);
    const auto none = min_block_size(LatticeKind::diamond, PercolationParams::bond(0), 2, 0.5, 10, 3, {1, 0});
    CHECK_FALSE(none.k_min.has_value());
    CHECK(none.rows.size() == 3);
    CHECK_THROWS_AS(min_block_size(LatticeKind::cubic, {}, 2, 1.0, 10, 3, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(min_block_size(LatticeKind::cubic, {}, 2, 0.5, 10, 0, {1, 0}), std::invalid_argument);
  }

  TEST_CASE("minimal block size does not shrink with L") {
    int prev = 0;
    for (int L : {4, 8, 16, 32}) {
      const auto r = min_block_size(LatticeKind::diamond, PercolationParams::mixed(0.95, 0.7), L, 0.5, 200, 12, {71, 0});
      REQUIRE(r.k_min.has_value());
      MESSAGE("L " << L << " k " << *r.k_min);
      // One step of slack absorbs the statistical error at the threshold.
      CHECK(*r.k_min >= prev - 1);
      prev = std::max(prev, *r.k_min);
    }
  }

  TEST_CASE("lower bound properties") {
    const BoundConstants cst{1, 1, 1, 0.5, 1};
    CHECK_THROWS_AS(evaluate_lower_bound(10, 5, {0, 1, 1, 0.5, 1}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_lower_bound(10, 0.5, cst), std::invalid_argument);
    // Vanishing uniqueness penalty leaves only the crossing terms.
    const BoundConstants tiny{1e-300, 1, 1, 0.5, 1};
    const auto b = evaluate_lower_bound(7, 1.5, tiny);
    CHECK(b.full == doctest::Approx(std::pow(1 - std::exp(-2.25), 2 * 49 - 7)).epsilon(1e-12));
    const int k0 = smallest_valid_k0(cst);
    for (double L : {1.0, 3.0, 10.0, 1e3, 1e5}) {
      double prev = -1;
      for (int k = k0; k < k0 + 60; ++k) {
        const auto v = evaluate_lower_bound(L, k, cst);
        CHECK(v.full >= 0.0);
        CHECK(v.full <= 1.0);
        CHECK(v.full >= v.simplified);
        CHECK(v.full >= prev);
        prev = v.full;
      }
    }
    for (double k : {30.0, 40.0}) {
      double prev = 2;
      for (double L = 1; L < 1e6; L *= 3) {
        const double v = evaluate_lower_bound(L, k, cst).full;
        CHECK(v <= prev);
        prev = v;
      }
    }
  }
}
