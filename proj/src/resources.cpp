#include "perc/resources.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "perc/renorm.hpp"

namespace perc {
namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// Initial states per base vertex for a (kind, size) pair; 0 when unsupported.
int states_per_vertex(LatticeKind kind, int size) {
  switch (kind) {
    case LatticeKind::cubic: return size == 7 ? 1 : size == 5 ? 2 : 0;
    case LatticeKind::covering_of_cubic: return size == 6 ? 1 : 0;
    case LatticeKind::diamond: return size == 5 ? 1 : 0;
    case LatticeKind::pyrochlore: return size == 4 ? 1 : 0;
  }
  return 0;
}

}  // namespace

ResourceSpec ResourceSpec::standard(LatticeKind kind, double p_fusion) {
  switch (kind) {
    case LatticeKind::cubic: return {kind, 7, p_fusion};
    case LatticeKind::covering_of_cubic: return {kind, 6, p_fusion};
    case LatticeKind::diamond: return {kind, 5, p_fusion};
    case LatticeKind::pyrochlore: return {kind, 4, p_fusion};
  }
  throw std::invalid_argument("unknown lattice kind");
}

void ResourceSpec::validate() const {
  check_probability(p_fusion, "p_fusion");
  if (initial_state_size < 4 || initial_state_size > 7) {
    throw std::invalid_argument("initial_state_size must be 4, 5, 6 or 7");
  }
  if (states_per_vertex(kind, initial_state_size) == 0) {
    throw std::invalid_argument("initial_state_size " + std::to_string(initial_state_size) +
                                " is not a resource for the " + std::string(to_string(kind)) +
                                " lattice");
  }
}

void LossSpec::validate() const {
  check_probability(p_loss_heralded, "p_loss_heralded");
  check_probability(p_loss_effective, "p_loss_effective");
}

double site_success_prob_5star(double p_fusion) {
  check_probability(p_fusion, "p_fusion");
  return 1.0 - (1.0 - p_fusion) * (1.0 - p_fusion);
}

PercolationParams mixed_params_from_gates(const ResourceSpec& spec) {
  spec.validate();
  const double p = spec.p_fusion;
  if (is_covering(spec.kind)) return PercolationParams::site(p);
  if (spec.kind == LatticeKind::cubic && spec.initial_state_size == 5) {
    return PercolationParams::mixed(site_success_prob_5star(p), p);
  }
  return PercolationParams::mixed(1.0, p);
}

std::uint64_t base_vertex_count(LatticeKind kind, int L, int k) {
  if (L < 1 || k < 1) throw std::invalid_argument("L and k must be at least 1");
  const LatticeKind base = base_kind(kind);
  const auto scheme = RenormScheme::standard(base, L, k, PercolationParams{});
  const Extent e = region_extent(scheme);
  const auto cells = static_cast<std::uint64_t>(e.x) * static_cast<std::uint64_t>(e.y) *
                     static_cast<std::uint64_t>(e.z);
  // Eight atoms per conventional diamond cell.
  return base == LatticeKind::diamond ? 8 * cells : cells;
}

ResourceCount resource_count(const ResourceSpec& spec, int L, int k) {
  spec.validate();
  const auto states = base_vertex_count(spec.kind, L, k) *
                      static_cast<std::uint64_t>(states_per_vertex(spec.kind, spec.initial_state_size));
  return {states, states * static_cast<std::uint64_t>(spec.initial_state_size)};
}

ResourceCount resource_count(LatticeKind kind, int L, int k) {
  return resource_count(ResourceSpec::standard(kind), L, k);
}

Configuration apply_heralded_loss(const Configuration& cfg, double p_loss, const RngSpec& rng,
                                  int radius) {
  check_probability(p_loss, "p_loss");
  if (radius < 0) throw std::invalid_argument("loss radius must be non-negative");
  const LatticeGraph& g = cfg.graph();
  std::vector<bool> sites = cfg.open_sites();
  std::vector<bool> bonds = cfg.open_bonds();
  if (p_loss == 0.0) return cfg;

  // Multi-source BFS over the lattice graph, up to `radius` steps from lost sites.
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<VertexId> queue;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (p_loss == 1.0 || uniform(rng, DrawPurpose::loss, coord_key(g.coord(v))) < p_loss) {
      dist[v] = 0;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    sites[v] = false;
    if (dist[v] == radius) continue;
    for (const auto& nb : g.neighbors(v)) {
      if (dist[nb.vertex] >= 0) continue;
      dist[nb.vertex] = dist[v] + 1;
      queue.push_back(nb.vertex);
    }
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!sites[g.edge(e).u] || !sites[g.edge(e).v]) bonds[e] = false;
  }
  return Configuration(g, std::move(sites), std::move(bonds));
}

Estimate estimate_crossing_with_loss(LatticeKind kind, int k, const PercolationParams& params,
                                     double p_loss, std::uint64_t trials, const RngSpec& rng,
                                     std::span<const Axis> axes, unsigned workers, int radius) {
  params.validate();
  check_probability(p_loss, "p_loss");
  const LatticeGraph block = build_block(kind, {k, k, k});
  const std::vector<Axis> axis_set(axes.begin(), axes.end());
  return estimate_bernoulli(trials, workers, [&](std::uint64_t t) {
    const RngSpec stream = rng.with_stream(rng.stream_id + t);
    const auto cfg = apply_heralded_loss(sample(block, params, stream), p_loss, stream, radius);
    return !crossing_clusters(label_clusters(cfg), axis_set).empty();
  });
}

double loss_budget(double p_effective, double block_nocross_prob, std::uint64_t qubits_in_use) {
  check_probability(p_effective, "p_effective");
  check_probability(block_nocross_prob, "block_nocross_prob");
  const double survive =
      std::exp(static_cast<double>(qubits_in_use) * std::log1p(-p_effective)) * (1.0 - block_nocross_prob);
  return 1.0 - survive;
}

std::uint64_t max_qubits_within_budget(double p_effective, double block_nocross_prob, double limit) {
  check_probability(limit, "limit");
  if (loss_budget(p_effective, block_nocross_prob, 0) >= limit) {
    throw std::invalid_argument("the block failure alone exceeds the budget");
  }
  if (p_effective == 0.0) throw std::invalid_argument("an unbounded qubit count fits the budget");
  // Closed form, then nudged so the exact evaluation decides the boundary.
  const double n = (std::log1p(-limit) - std::log1p(-block_nocross_prob)) / std::log1p(-p_effective);
  auto best = static_cast<std::uint64_t>(std::max(0.0, std::floor(n)));
  while (best > 0 && loss_budget(p_effective, block_nocross_prob, best) >= limit) --best;
  while (loss_budget(p_effective, block_nocross_prob, best + 1) < limit) ++best;
  return best;
}

double DecayFit::at(double k) const { return std::exp(alpha + beta * k); }

DecayFit fit_exponential_decay(std::span<const int> ks, std::span<const double> probs) {
  if (ks.size() != probs.size()) throw std::invalid_argument("ks and probs differ in length");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(probs[i] > 0.0)) continue;
    const double x = ks[i];
    const double y = std::log(probs[i]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom == 0.0) throw std::invalid_argument("need two distinct k with positive probability");
  const double beta = (n * sxy - sx * sy) / denom;
  return {(sy - beta * sx) / n, beta};
}

}  // namespace perc
