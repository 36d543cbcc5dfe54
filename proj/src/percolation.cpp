#include "perc/percolation.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "perc/union_find.hpp"

namespace perc {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void PercolationParams::validate() const {
  if (!is_probability(p_bond) || !is_probability(p_site)) {
    throw std::invalid_argument("percolation probabilities must lie in [0,1]");
  }
  if (model == PercolationModel::bond && p_site != 1.0) {
    throw std::invalid_argument("bond model requires p_site = 1");
  }
  if (model == PercolationModel::site && p_bond != 1.0) {
    throw std::invalid_argument("site model requires p_bond = 1");
  }
}

Configuration::Configuration(const LatticeGraph& g, std::vector<bool> open_sites,
                             std::vector<bool> open_bonds)
    : graph_(&g), sites_(std::move(open_sites)), bonds_(std::move(open_bonds)) {
  if (sites_.size() != g.vertex_count() || bonds_.size() != g.edge_count()) {
    throw std::invalid_argument("configuration size does not match its graph");
  }
  for (EdgeId e = 0; e < bonds_.size(); ++e) {
    if (bonds_[e] && !(sites_[g.edge(e).u] && sites_[g.edge(e).v])) {
      throw std::invalid_argument("open bond with a closed endpoint");
    }
  }
}

std::size_t Configuration::open_site_count() const {
  return static_cast<std::size_t>(std::count(sites_.begin(), sites_.end(), true));
}

std::size_t Configuration::open_bond_count() const {
  return static_cast<std::size_t>(std::count(bonds_.begin(), bonds_.end(), true));
}

Configuration sample(const LatticeGraph& g, const PercolationParams& params, const RngSpec& rng,
                     Coord shift) {
  params.validate();
  const Coord site_shift = is_covering(g.kind()) ? 2 * shift : shift;
  std::vector<bool> sites(g.vertex_count(), true);
  if (params.p_site < 1.0) {
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      sites[v] = uniform(rng, DrawPurpose::site, coord_key(g.coord(v) + site_shift)) < params.p_site;
    }
  }
  std::vector<bool> bonds(g.edge_count(), false);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    if (!sites[ed.u] || !sites[ed.v]) continue;
    if (params.p_bond >= 1.0) {
      bonds[e] = true;
      continue;
    }
    const Coord key = g.coord(ed.u) + g.coord(ed.v) + 2 * site_shift;
    bonds[e] = uniform(rng, DrawPurpose::bond, coord_key(key)) < params.p_bond;
  }
  return Configuration(g, std::move(sites), std::move(bonds));
}

Configuration restrict_to(const SubGraph& sub, const Configuration& parent) {
  std::vector<bool> sites(sub.parent_vertex.size());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = parent.site_open(sub.parent_vertex[i]);
  std::vector<bool> bonds(sub.parent_edge.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) bonds[i] = parent.bond_open(sub.parent_edge[i]);
  return Configuration(sub.graph, std::move(sites), std::move(bonds));
}

ClusterLabeling label_clusters(const Configuration& cfg) {
  const LatticeGraph& g = cfg.graph();
  const auto n = static_cast<VertexId>(g.vertex_count());
  UnionFind uf(n);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (cfg.bond_open(e)) uf.unite(g.edge(e).u, g.edge(e).v);
  }

  ClusterLabeling lab;
  lab.label.assign(n, kNoCluster);
  std::vector<ClusterId> by_root(n, kNoCluster);
  for (VertexId v = 0; v < n; ++v) {
    if (!cfg.site_open(v)) continue;
    const auto root = uf.find(v);
    if (by_root[root] == kNoCluster) {
      by_root[root] = static_cast<ClusterId>(lab.cluster_sizes.size());
      lab.cluster_sizes.push_back(0);
    }
    lab.label[v] = by_root[root];
    ++lab.cluster_sizes[by_root[root]];
  }

  std::vector<std::uint8_t> touch(lab.cluster_count());
  for (Axis axis : kAllAxes) {
    std::fill(touch.begin(), touch.end(), 0);
    for (VertexId v : g.face_vertices(axis, Side::low)) {
      if (lab.label[v] != kNoCluster) touch[lab.label[v]] |= 1;
    }
    for (VertexId v : g.face_vertices(axis, Side::high)) {
      if (lab.label[v] != kNoCluster) touch[lab.label[v]] |= 2;
    }
    auto& out = lab.crossing[index_of(axis)];
    for (ClusterId c = 0; c < touch.size(); ++c) {
      if (touch[c] == 3) out.push_back(c);
    }
  }
  return lab;
}

std::vector<ClusterId> crossing_clusters(const ClusterLabeling& lab, std::span<const Axis> axes) {
  if (axes.empty()) throw std::invalid_argument("crossing needs at least one axis");
  std::vector<ClusterId> result = lab.crossing[index_of(axes.front())];
  for (Axis a : axes.subspan(1)) {
    const auto& other = lab.crossing[index_of(a)];
    std::vector<ClusterId> merged;
    std::set_intersection(result.begin(), result.end(), other.begin(), other.end(),
                          std::back_inserter(merged));
    result = std::move(merged);
  }
  return result;
}

std::size_t count_crossing_clusters(const ClusterLabeling& lab, Axis axis) {
  return lab.crossing[index_of(axis)].size();
}

Estimate estimate_crossing_prob(LatticeKind kind, int k, const PercolationParams& params,
                                std::uint64_t trials, const RngSpec& rng,
                                std::span<const Axis> axes, unsigned workers) {
  params.validate();
  const LatticeGraph block = build_block(kind, {k, k, k});
  const std::vector<Axis> axis_set(axes.begin(), axes.end());
  return estimate_bernoulli(trials, workers, [&](std::uint64_t t) {
    const auto cfg = sample(block, params, rng.with_stream(rng.stream_id + t));
    return !crossing_clusters(label_clusters(cfg), axis_set).empty();
  });
}

std::string to_hex_bits(const std::vector<bool>& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out((bits.size() + 3) / 4, '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const auto digit = static_cast<int>(std::string_view(kDigits).find(out[i / 4]));
    out[i / 4] = kDigits[digit | (1 << (i % 4))];
  }
  return out;
}

std::vector<bool> from_hex_bits(std::string_view hex, std::size_t count) {
  if (hex.size() != (count + 3) / 4) throw std::invalid_argument("hex bitset has wrong length");
  std::vector<bool> bits(count);
  for (std::size_t i = 0; i < count; ++i) {
    const char c = hex[i / 4];
    int digit = 0;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      throw std::invalid_argument("invalid hex digit in bitset");
    }
    bits[i] = (digit >> (i % 4)) & 1;
  }
  return bits;
}

void write_configuration(std::ostream& os, const Configuration& cfg) {
  const LatticeGraph& g = cfg.graph();
  const Extent d = g.dims();
  os << "vertices " << g.vertex_count() << " edges " << g.edge_count() << " kind "
     << to_string(g.kind()) << " dims " << d.x << ' ' << d.y << ' ' << d.z << '\n';
  os << "sites " << to_hex_bits(cfg.open_sites()) << '\n';
  os << "bonds " << to_hex_bits(cfg.open_bonds()) << '\n';
}

}  // namespace perc
