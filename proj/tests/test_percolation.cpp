#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

#include "perc/percolation.hpp"

using namespace perc;

namespace {

constexpr std::array<LatticeKind, 4> kKinds{LatticeKind::cubic, LatticeKind::diamond,
                                            LatticeKind::covering_of_cubic, LatticeKind::pyrochlore};

// Flood fill over open bonds, numbering clusters in order of their smallest vertex.
std::vector<ClusterId> bfs_partition(const Configuration& cfg) {
  const LatticeGraph& g = cfg.graph();
  std::vector<ClusterId> label(g.vertex_count(), kNoCluster);
  ClusterId next = 0;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (!cfg.site_open(s) || label[s] != kNoCluster) continue;
    std::deque<VertexId> queue{s};
    label[s] = next;
    while (!queue.empty()) {
      const VertexId v = queue.front();
      queue.pop_front();
      for (const auto& nb : g.neighbors(v)) {
        if (cfg.bond_open(nb.edge) && label[nb.vertex] == kNoCluster) {
          label[nb.vertex] = next;
          queue.push_back(nb.vertex);
        }
      }
    }
    ++next;
  }
  return label;
}

bool crosses(const LatticeGraph& g, const ClusterLabeling& lab, ClusterId c, Axis a) {
  auto touches = [&](Side s) {
    const auto& f = g.face_vertices(a, s);
    return std::any_of(f.begin(), f.end(), [&](VertexId v) { return lab.label[v] == c; });
  };
  return touches(Side::low) && touches(Side::high);
}

}  // namespace

TEST_SUITE("percolation") {
  TEST_CASE("parameter validation") {
    CHECK_NOTHROW(PercolationParams::mixed(0.75, 0.5).validate());
    CHECK_THROWS_AS(PercolationParams::bond(1.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(PercolationParams::site(-0.1).validate(), std::invalid_argument);
  }

  TEST_CASE("extreme probabilities") {
    const auto g = build_block(LatticeKind::cubic, {4, 4, 4});
    const auto closed = sample(g, PercolationParams::bond(0.0), {1, 0});
    CHECK(closed.open_bond_count() == 0);
    CHECK(closed.open_site_count() == g.vertex_count());
    const auto open = sample(g, PercolationParams::mixed(1.0, 1.0), {1, 0});
    CHECK(open.open_bond_count() == g.edge_count());
    const auto no_sites = sample(g, PercolationParams::site(0.0), {1, 0});
    CHECK(no_sites.open_site_count() == 0);
    CHECK(no_sites.open_bond_count() == 0);
  }

  TEST_CASE("open-bond fraction is binomial") {
    const auto g = build_block(LatticeKind::cubic, {10, 10, 10});
    std::uint64_t open = 0;
    for (std::uint64_t s = 0; s < 100; ++s) open += sample(g, PercolationParams::bond(0.5), {3, s}).open_bond_count();
    const double n = 100.0 * static_cast<double>(g.edge_count());
    CHECK(std::abs(static_cast<double>(open) / n - 0.5) < 3 * std::sqrt(0.25 / n));
  }

  TEST_CASE("mixed model closes bonds at closed sites") {
    const auto g = build_block(LatticeKind::diamond, {3, 3, 3});
    const auto cfg = sample(g, PercolationParams::mixed(0.6, 0.7), {4, 0});
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (cfg.bond_open(e)) CHECK((cfg.site_open(g.edge(e).u) && cfg.site_open(g.edge(e).v)));
    }
    std::vector<bool> sites(g.vertex_count(), false), bonds(g.edge_count(), true);
    CHECK_THROWS_AS(Configuration(g, sites, bonds), std::invalid_argument);
  }

  TEST_CASE("sampling is reproducible and location keyed") {
    const auto g = build_block(LatticeKind::cubic, {4, 4, 4});
    const auto params = PercolationParams::mixed(0.7, 0.4);
    CHECK(sample(g, params, {8, 2}) == sample(g, params, {8, 2}));
    CHECK_FALSE(sample(g, params, {8, 2}) == sample(g, params, {8, 3}));
    // A slice sees the same draws as the parent region.
    const auto sub = slice_block(g, {{1, 1, 1}, {2, 3, 2}, 1});
    const auto parent = sample(g, params, {8, 2});
    CHECK(sample(sub.graph, params, {8, 2}) == restrict_to(sub, parent));
    // Shifting a block is the same as sampling it at the shifted location.
    const auto moved = build_block(LatticeKind::cubic, {2, 3, 2}, {1, 1, 1});
    const auto origin = build_block(LatticeKind::cubic, {2, 3, 2});
    CHECK(sample(origin, params, {8, 2}, {1, 1, 1}).open_bonds() == sample(moved, params, {8, 2}).open_bonds());
    const auto cov_moved = build_block(LatticeKind::pyrochlore, {1, 1, 1}, {1, 0, 0});
    const auto cov_origin = build_block(LatticeKind::pyrochlore, {1, 1, 1});
    CHECK(sample(cov_origin, PercolationParams::site(0.5), {8, 2}, {4, 0, 0}).open_sites() ==
          sample(cov_moved, PercolationParams::site(0.5), {8, 2}).open_sites());
  }

  TEST_CASE("monotone coupling") {
    const auto g = build_block(LatticeKind::diamond, {3, 3, 3});
    for (std::uint64_t s = 0; s < 50; ++s) {
      bool crossed_before = false;
      std::vector<bool> prev(g.edge_count(), false);
      for (double p : {0.2, 0.3, 0.4, 0.5, 0.7, 0.9}) {
        const auto cfg = sample(g, PercolationParams::bond(p), {11, s});
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
          if (prev[e]) CHECK(cfg.bond_open(e));
        }
        prev = cfg.open_bonds();
        const bool crossed = !crossing_clusters(label_clusters(cfg), kDefaultCrossingAxes).empty();
        if (crossed_before) CHECK(crossed);
        crossed_before = crossed;
      }
    }
  }

  TEST_CASE("labeling basics") {
    const auto g = build_block(LatticeKind::cubic, {3, 3, 3});
    const auto all = label_clusters(sample(g, PercolationParams::mixed(1, 1), {1, 0}));
    CHECK(all.cluster_count() == 1);
    CHECK(all.cluster_sizes[0] == 27);
    const auto none = label_clusters(sample(g, PercolationParams::bond(0), {1, 0}));
    CHECK(none.cluster_count() == 27);
    for (VertexId v = 0; v < 27; ++v) CHECK(none.label[v] == v);
  }

  TEST_CASE("union-find labeling equals BFS flood fill") {
    int cases = 0;
    for (std::uint64_t s = 0; s < 300; ++s) {
      const LatticeKind kind = kKinds[s % 4];
      const int n = 2 + static_cast<int>(s / 4 % 3);
      const auto g = build_block(kind, {n, n - 1, n});
      const double ps = uniform({77, s}, DrawPurpose::coin_a, 0);
      const double pb = uniform({77, s}, DrawPurpose::coin_b, 0);
      const auto cfg = sample(g, PercolationParams::mixed(0.3 + 0.7 * ps, pb), {77, s});
      const auto lab = label_clusters(cfg);
      CHECK(lab.label == bfs_partition(cfg));
      std::vector<std::uint32_t> sizes(lab.cluster_count(), 0);
      for (ClusterId c : lab.label) {
        if (c != kNoCluster) ++sizes[c];
      }
      CHECK(sizes == lab.cluster_sizes);
      for (Axis a : kAllAxes) {
        for (ClusterId c = 0; c < lab.cluster_count(); ++c) {
          const bool listed = std::find(lab.crossing[index_of(a)].begin(), lab.crossing[index_of(a)].end(), c) !=
                              lab.crossing[index_of(a)].end();
          CHECK(listed == crosses(g, lab, c, a));
        }
      }
      ++cases;
    }
    CHECK(cases == 300);
  }

  TEST_CASE("crossing clusters at the extremes") {
    for (LatticeKind kind : kKinds) {
      const auto g = build_block(kind, {3, 3, 3});
      const auto full = label_clusters(sample(g, PercolationParams::mixed(1, 1), {1, 0}));
      CHECK(crossing_clusters(full, kAllAxes) == std::vector<ClusterId>{0});
      const auto params = is_covering(kind) ? PercolationParams::site(0) : PercolationParams::bond(0);
      CHECK(crossing_clusters(label_clusters(sample(g, params, {1, 0})), kDefaultCrossingAxes).empty());
    }
  }

  TEST_CASE("crossing estimates at the extremes") {
    const auto one = estimate_crossing_prob(LatticeKind::cubic, 4, PercolationParams::bond(1), 50, {1, 0});
    CHECK(one.value == 1.0);
    CHECK(one.standard_error == 0.0);
    const auto zero = estimate_crossing_prob(LatticeKind::diamond, 3, PercolationParams::bond(0), 50, {1, 0});
    CHECK(zero.value == 0.0);
  }

  TEST_CASE("cubic crossing probability grows above and shrinks below the threshold") {
    std::vector<double> above, below;
    for (int k : {4, 8, 12}) {
      above.push_back(estimate_crossing_prob(LatticeKind::cubic, k, PercolationParams::bond(0.35), 1000, {21, 0}).value);
      below.push_back(estimate_crossing_prob(LatticeKind::cubic, k, PercolationParams::bond(0.15), 1000, {21, 0}).value);
    }
    CHECK(above[0] < above[1]);
    CHECK(above[1] < above[2]);
    CHECK(below[0] > below[1]);
    CHECK(below[1] >= below[2]);
  }

  TEST_CASE("failure to cross decays at least geometrically") {
    std::vector<double> q;
    for (int k : {4, 8, 16}) {
      q.push_back(1 - estimate_crossing_prob(LatticeKind::cubic, k, PercolationParams::bond(0.35), 4000, {22, 0}).value);
    }
    CHECK(q[1] <= q[0] / 2);
    CHECK(q[2] <= q[1] / 2);
  }

  TEST_CASE("two crossing clusters become rarer in larger overlap regions") {
    std::vector<double> freq;
    const int trials = 1000;
    for (int k : {4, 8, 12}) {
      const auto g = build_block(LatticeKind::cubic, {k, 2 * k, 2 * k});
      int many = 0;
      for (int t = 0; t < trials; ++t) {
        const auto lab = label_clusters(sample(g, PercolationParams::bond(0.35), {23, static_cast<std::uint64_t>(t)}));
        many += count_crossing_clusters(lab, Axis::y) >= 2 ? 1 : 0;
      }
      freq.push_back(static_cast<double>(many) / trials);
    }
    MESSAGE("multiple y-crossing clusters: " << freq[0] << " " << freq[1] << " " << freq[2]);
    CHECK(freq[0] > freq[2]);
    CHECK(freq[1] <= freq[0] + 3 * std::sqrt(freq[0] * (1 - freq[0]) / trials));
  }

  TEST_CASE("configuration export round trip") {
    const auto g = build_block(LatticeKind::cubic, {3, 2, 2});
    const auto cfg = sample(g, PercolationParams::mixed(0.8, 0.5), {5, 5});
    CHECK(from_hex_bits(to_hex_bits(cfg.open_sites()), g.vertex_count()) == cfg.open_sites());
    CHECK(from_hex_bits(to_hex_bits(cfg.open_bonds()), g.edge_count()) == cfg.open_bonds());
    CHECK(to_hex_bits({true, false, false, false, false, true}) == "12");
    CHECK_THROWS(from_hex_bits("1", 6));
    CHECK_THROWS(from_hex_bits("1z", 6));
    std::ostringstream os;
    write_configuration(os, cfg);
    std::istringstream is(os.str());
    std::string header, sites, bonds;
    std::getline(is, header);
    std::getline(is, sites);
    std::getline(is, bonds);
    CHECK(header.rfind("vertices 12 edges 20 kind cubic", 0) == 0);
    CHECK(sites == "sites " + to_hex_bits(cfg.open_sites()));
    CHECK(bonds == "bonds " + to_hex_bits(cfg.open_bonds()));
  }
}
