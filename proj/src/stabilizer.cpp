#include "perc/stabilizer.hpp"

#include <algorithm>
#include <stdexcept>

namespace perc {
namespace {

std::uint32_t bit(std::size_t q) { return std::uint32_t{1} << q; }

// Removes bit q and shifts the higher bits down.
std::uint32_t drop_bit(std::uint32_t mask, std::size_t q) {
  const std::uint32_t low = mask & (bit(q) - 1);
  return low | ((mask >> (q + 1)) << q);
}

// Rank of rows seen as vectors over GF(2); rows are reduced in place.
std::size_t reduce(std::vector<std::uint32_t>& x, std::vector<std::uint32_t>& z, std::size_t n) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < x.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < x.size() && !(x[pivot] & bit(col))) ++pivot;
    if (pivot == x.size()) continue;
    std::swap(x[rank], x[pivot]);
    std::swap(z[rank], z[pivot]);
    for (std::size_t r = 0; r < x.size(); ++r) {
      if (r != rank && (x[r] & bit(col))) {
        x[r] ^= x[rank];
        z[r] ^= z[rank];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

StabilizerState StabilizerState::from_graph(const SmallGraph& g) {
  if (g.n > kMaxQubits) throw std::invalid_argument("stabilizer oracle is limited to 10 qubits");
  StabilizerState s;
  s.n_ = g.n;
  for (std::size_t v = 0; v < g.n; ++v) {
    s.x_.push_back(bit(v));
    s.z_.push_back(g.adjacency[v]);
  }
  return s;
}

void StabilizerState::measure(std::size_t q, Pauli p) {
  if (q >= n_) throw std::out_of_range("measured qubit out of range");
  const bool px = p != Pauli::z;
  const bool pz = p != Pauli::x;
  auto anticommutes = [&](std::size_t r) {
    const bool gx = x_[r] & bit(q);
    const bool gz = z_[r] & bit(q);
    return (gx && pz) != (gz && px);
  };
  std::size_t first = n_;
  for (std::size_t r = 0; r < n_; ++r) {
    if (!anticommutes(r)) continue;
    if (first == n_) {
      first = r;
    } else {
      x_[r] ^= x_[first];
      z_[r] ^= z_[first];
    }
  }
  if (first == n_) return;  // outcome already determined
  x_[first] = px ? bit(q) : 0;
  z_[first] = pz ? bit(q) : 0;
}

void StabilizerState::discard(std::size_t q) {
  if (q >= n_) throw std::out_of_range("discarded qubit out of range");
  // Every generator restricted to q is either I or one fixed Pauli P; keep one
  // generator carrying P, clear P from the others with it, then drop it.
  std::size_t carrier = n_;
  for (std::size_t r = 0; r < n_; ++r) {
    if (!((x_[r] | z_[r]) & bit(q))) continue;
    if (carrier == n_) {
      carrier = r;
      continue;
    }
    const bool same = ((x_[r] ^ x_[carrier]) & bit(q)) == 0 && ((z_[r] ^ z_[carrier]) & bit(q)) == 0;
    if (!same) throw std::logic_error("discarded qubit is entangled with the rest");
    x_[r] ^= x_[carrier];
    z_[r] ^= z_[carrier];
  }
  if (carrier == n_) throw std::logic_error("tableau has no support on the discarded qubit");
  x_.erase(x_.begin() + static_cast<long>(carrier));
  z_.erase(z_.begin() + static_cast<long>(carrier));
  for (std::size_t r = 0; r < x_.size(); ++r) {
    x_[r] = drop_bit(x_[r], q);
    z_[r] = drop_bit(z_[r], q);
  }
  --n_;
}

StabilizerState::GraphForm StabilizerState::to_graph() const {
  for (std::uint32_t hadamards = 0; hadamards < bit(n_); ++hadamards) {
    std::vector<std::uint32_t> x(n_), z(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      const std::uint32_t swap = (x_[r] ^ z_[r]) & hadamards;
      x[r] = x_[r] ^ swap;
      z[r] = z_[r] ^ swap;
    }
    if (reduce(x, z, n_) < n_) continue;
    // X block is now the identity with row r pivoting on qubit r.
    GraphForm out{SmallGraph::empty(n_), hadamards, 0};
    for (std::size_t r = 0; r < n_; ++r) {
      if (z[r] & bit(r)) out.phases |= bit(r);
      out.graph.adjacency[r] = z[r] & ~bit(r);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (out.graph.has_edge(i, j) != out.graph.has_edge(j, i)) {
          throw std::logic_error("stabilizer graph form is not symmetric");
        }
      }
    }
    return out;
  }
  throw std::logic_error("no Hadamard pattern yields a graph form");
}

StabilizerState::GraphForm stabilizer_oracle(const SmallGraph& g,
                                             std::span<const OracleMeasurement> sequence) {
  auto state = StabilizerState::from_graph(g);
  std::vector<std::size_t> measured;
  for (const auto& m : sequence) {
    if (m.qubit >= g.n) throw std::out_of_range("measured qubit out of range");
    if (std::find(measured.begin(), measured.end(), m.qubit) != measured.end()) {
      throw std::invalid_argument("qubit measured twice");
    }
    state.measure(m.qubit, m.basis);
    measured.push_back(m.qubit);
  }
  std::sort(measured.rbegin(), measured.rend());
  for (std::size_t q : measured) state.discard(q);
  return state.to_graph();
}

}  // namespace perc
