#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace perc {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using ClusterId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr ClusterId kNoCluster = std::numeric_limits<ClusterId>::max();

/// Integer lattice coordinate. Units depend on the lattice kind (see LatticeGraph).
struct Coord {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr int& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Coord operator-(Coord a, Coord b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Coord operator*(int s, Coord a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(Coord, Coord) = default;
};

/// Extent of a block along each axis, in cells.
struct Extent {
  int x = 1;
  int y = 1;
  int z = 1;

  constexpr int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  friend constexpr bool operator==(Extent, Extent) = default;
};

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };
enum class Side : std::uint8_t { low = 0, high = 1 };

inline constexpr std::array<Axis, 3> kAllAxes{Axis::x, Axis::y, Axis::z};

constexpr int index_of(Axis a) { return static_cast<int>(a); }

}  // namespace perc
