#pragma once

#include <array>
#include <cstdint>

#include "perc/types.hpp"

namespace perc {

/// Identifies one reproducible random stream: a run seed plus a per-trial stream id.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  RngSpec with_stream(std::uint64_t stream) const { return {master_seed, stream}; }
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// What a draw is used for; keeps uniforms for different decisions independent.
enum class DrawPurpose : std::uint8_t { site = 1, bond = 2, loss = 3, coin_a = 4, coin_b = 5 };

/// Counter-based uniform in [0,1) for (spec, purpose, element key). Pure function.
double uniform(const RngSpec& spec, DrawPurpose purpose, std::uint64_t element);

/// Element key of a lattice location: coordinates must lie in [0, 2^20).
std::uint64_t coord_key(Coord c);

/// Sequential generator on top of the counter-based stream (for coin simulations).
class CounterRng {
 public:
  CounterRng(RngSpec spec, DrawPurpose purpose) : spec_(spec), purpose_(purpose) {}
  double next() { return uniform(spec_, purpose_, index_++); }

 private:
  RngSpec spec_;
  DrawPurpose purpose_;
  std::uint64_t index_ = 0;
};

}  // namespace perc
