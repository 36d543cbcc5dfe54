#include "perc/rng.hpp"

#include <stdexcept>

namespace perc {
namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

constexpr int kCoordBits = 20;
constexpr std::uint64_t kCoordLimit = std::uint64_t{1} << kCoordBits;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

// Counter layout: element key (60 bits) with the purpose in the top nibble, then the
// 64-bit stream id. The master seed is the Philox key. The mapping is injective.
double uniform(const RngSpec& spec, DrawPurpose purpose, std::uint64_t element) {
  const std::uint64_t tagged =
      (element & ((std::uint64_t{1} << 60) - 1)) | (static_cast<std::uint64_t>(purpose) << 60);
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(tagged), static_cast<std::uint32_t>(tagged >> 32),
       static_cast<std::uint32_t>(spec.stream_id), static_cast<std::uint32_t>(spec.stream_id >> 32)},
      {static_cast<std::uint32_t>(spec.master_seed),
       static_cast<std::uint32_t>(spec.master_seed >> 32)});
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32 | out[1]) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::uint64_t coord_key(Coord c) {
  for (int a = 0; a < 3; ++a) {
    if (c[a] < 0 || static_cast<std::uint64_t>(c[a]) >= kCoordLimit) {
      throw std::out_of_range("lattice coordinate outside the keyed range [0, 2^20)");
    }
  }
  return static_cast<std::uint64_t>(c.x) | static_cast<std::uint64_t>(c.y) << kCoordBits |
         static_cast<std::uint64_t>(c.z) << (2 * kCoordBits);
}

}  // namespace perc
