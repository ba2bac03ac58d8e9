#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <ostream>

namespace windward {

/// Non-negative integer cost with a distinguished maximal element TOP.
/// TOP is absorbing under addition and maximal under ordering; it marks
/// unsafe/infeasible values and is not a large finite number. Addition
/// saturates at TOP so overflow can never produce a false optimum.
class Cost {
 public:
  static constexpr std::uint32_t kTopRaw = 0xFFFFFFFFu;

  constexpr Cost() = default;

  static constexpr Cost top() { return Cost(kTopRaw); }
  static constexpr Cost finite(std::uint64_t v) {
    return v >= kTopRaw ? top() : Cost(static_cast<std::uint32_t>(v));
  }

  constexpr bool is_top() const { return raw_ == kTopRaw; }
  constexpr std::uint32_t raw() const { return raw_; }
  constexpr std::uint32_t value() const {
    assert(!is_top());
    return raw_;
  }

  static constexpr Cost from_raw(std::uint32_t r) { return Cost(r); }

  friend constexpr Cost operator+(Cost a, Cost b) {
    if (a.is_top() || b.is_top()) return top();
    return finite(static_cast<std::uint64_t>(a.raw_) + b.raw_);
  }
  friend constexpr bool operator==(Cost, Cost) = default;
  // Raw comparison suffices: TOP has the maximal representation.
  friend constexpr auto operator<=>(Cost a, Cost b) { return a.raw_ <=> b.raw_; }

 private:
  explicit constexpr Cost(std::uint32_t raw) : raw_(raw) {}
  std::uint32_t raw_ = 0;
};

/// λ + cost-to-go with the stage cost as a plain integer.
constexpr Cost saturating_add(std::int64_t stage, Cost tail) {
  if (tail.is_top()) return Cost::top();
  return Cost::finite(static_cast<std::uint64_t>(stage) + tail.raw());
}

inline std::ostream& operator<<(std::ostream& os, Cost c) {
  if (c.is_top()) return os << "TOP";
  return os << c.value();
}

}  // namespace windward
