#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace windward {

/// Integer lattice vector. One grid unit corresponds to roughly one metre.
struct GridVec {
  int x = 0;
  int y = 0;
  int z = 0;

  friend constexpr GridVec operator+(GridVec a, GridVec b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr GridVec operator-(GridVec a, GridVec b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  constexpr GridVec operator-() const { return {-x, -y, -z}; }
  friend constexpr bool operator==(GridVec, GridVec) = default;
  // Lexicographic (x, y, z); fixes ordering-sensitive tie-breaks.
  friend constexpr auto operator<=>(GridVec, GridVec) = default;

  constexpr int operator[](int axis) const { return axis == 0 ? x : axis == 1 ? y : z; }

  constexpr std::int64_t norm2() const {
    return static_cast<std::int64_t>(x) * x + static_cast<std::int64_t>(y) * y +
           static_cast<std::int64_t>(z) * z;
  }
  constexpr int linf() const {
    int ax = x < 0 ? -x : x, ay = y < 0 ? -y : y, az = z < 0 ? -z : z;
    return std::max(ax, std::max(ay, az));
  }
};

inline std::ostream& operator<<(std::ostream& os, GridVec v) {
  return os << '(' << v.x << ',' << v.y << ',' << v.z << ')';
}

constexpr GridVec min_of(GridVec a, GridVec b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr GridVec max_of(GridVec a, GridVec b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

/// Axis-aligned integer box, inclusive on both ends.
struct Box3 {
  GridVec lo;
  GridVec hi;

  friend constexpr bool operator==(const Box3&, const Box3&) = default;

  constexpr bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
  constexpr bool contains(GridVec p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
           p.z <= hi.z;
  }
  constexpr GridVec clamp(GridVec p) const {
    return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y),
            std::clamp(p.z, lo.z, hi.z)};
  }
  constexpr GridVec extent() const {
    return {hi.x - lo.x + 1, hi.y - lo.y + 1, hi.z - lo.z + 1};
  }
  constexpr std::int64_t cell_count() const {
    if (empty()) return 0;
    GridVec e = extent();
    return static_cast<std::int64_t>(e.x) * e.y * e.z;
  }
  constexpr Box3 padded(int d) const {
    return {{lo.x - d, lo.y - d, lo.z - d}, {hi.x + d, hi.y + d, hi.z + d}};
  }
  constexpr Box3 intersect(const Box3& o) const { return {max_of(lo, o.lo), min_of(hi, o.hi)}; }

  template <typename Fn>
  void for_each_cell(Fn&& fn) const {
    for (int x = lo.x; x <= hi.x; ++x)
      for (int y = lo.y; y <= hi.y; ++y)
        for (int z = lo.z; z <= hi.z; ++z) fn(GridVec{x, y, z});
  }

  static constexpr Box3 cube(GridVec center, int radius) {
    return {{center.x - radius, center.y - radius, center.z - radius},
            {center.x + radius, center.y + radius, center.z + radius}};
  }
  static constexpr Box3 hull(GridVec a, GridVec b) { return {min_of(a, b), max_of(a, b)}; }
};

inline std::ostream& operator<<(std::ostream& os, const Box3& b) {
  return os << '[' << b.lo << ".." << b.hi << ']';
}

/// Box over (position, velocity) space.
struct Box6 {
  Box3 pos;
  Box3 vel;

  friend constexpr bool operator==(const Box6&, const Box6&) = default;
  constexpr bool empty() const { return pos.empty() || vel.empty(); }
  constexpr bool contains(GridVec p, GridVec v) const {
    return pos.contains(p) && vel.contains(v);
  }
  constexpr std::int64_t cell_count() const { return pos.cell_count() * vel.cell_count(); }
};

/// Dense row-major index over a Box3 (x slowest, z fastest).
class Box3Indexer {
 public:
  Box3Indexer() = default;
  explicit Box3Indexer(const Box3& box) : box_(box) {
    GridVec e = box.extent();
    ex_ = e.x;
    ey_ = e.y;
    ez_ = e.z;
  }

  const Box3& box() const { return box_; }
  std::size_t cells() const { return static_cast<std::size_t>(ex_) * ey_ * ez_; }
  bool contains(GridVec p) const { return box_.contains(p); }
  std::size_t index(GridVec p) const {
    return (static_cast<std::size_t>(p.x - box_.lo.x) * ey_ + (p.y - box_.lo.y)) * ez_ +
           (p.z - box_.lo.z);
  }
  GridVec decode(std::size_t i) const {
    int z = static_cast<int>(i % ez_);
    i /= ez_;
    int y = static_cast<int>(i % ey_);
    int x = static_cast<int>(i / ey_);
    return {box_.lo.x + x, box_.lo.y + y, box_.lo.z + z};
  }

 private:
  Box3 box_{};
  int ex_ = 0, ey_ = 0, ez_ = 0;
};

struct GridVecHash {
  std::size_t operator()(GridVec v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int c : {v.x, v.y, v.z}) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace windward
