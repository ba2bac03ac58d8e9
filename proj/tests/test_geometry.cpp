#include "doctest.h"
#include "windward/cost.hpp"
#include "windward/geometry.hpp"

using namespace windward;

TEST_CASE("grid vector arithmetic and ordering") {
  GridVec a{1, -2, 3}, b{0, 5, -1};
  CHECK(a + b == GridVec{1, 3, 2});
  CHECK(a - b == GridVec{1, -7, 4});
  CHECK((-a) == GridVec{-1, 2, -3});
  CHECK(a.norm2() == 14);
  CHECK(a.linf() == 3);
  CHECK(GridVec{-1, 9, 9} < GridVec{0, -9, -9});  // lexicographic on x first
  CHECK(GridVec{0, 1, 0} < GridVec{0, 1, 1});
}

TEST_CASE("box membership, clamping, intersections") {
  Box3 b{{0, 0, 0}, {4, 3, 2}};
  CHECK(b.contains({0, 0, 0}));
  CHECK(b.contains({4, 3, 2}));
  CHECK(!b.contains({5, 0, 0}));
  CHECK(b.clamp({9, -1, 1}) == GridVec{4, 0, 1});
  CHECK(b.cell_count() == 5 * 4 * 3);
  CHECK(b.padded(1).lo == GridVec{-1, -1, -1});
  CHECK(b.intersect({{2, 2, 2}, {9, 9, 9}}).cell_count() == 3 * 2 * 1);
  CHECK(b.intersect({{8, 8, 8}, {9, 9, 9}}).empty());
  CHECK(Box3::hull({3, 1, 2}, {0, 5, 2}) == Box3{{0, 1, 2}, {3, 5, 2}});
  CHECK(Box3::cube({1, 1, 1}, 2) == Box3{{-1, -1, -1}, {3, 3, 3}});
}

TEST_CASE("box indexer round-trips every cell") {
  Box3 b{{-2, 3, 0}, {1, 5, 2}};
  Box3Indexer idx(b);
  CHECK(idx.cells() == static_cast<std::size_t>(b.cell_count()));
  for (std::size_t i = 0; i < idx.cells(); ++i) {
    GridVec p = idx.decode(i);
    CHECK(b.contains(p));
    CHECK(idx.index(p) == i);
  }
}

TEST_CASE("cost saturates at TOP and TOP absorbs") {
  Cost top = Cost::top();
  Cost c = Cost::finite(7);
  CHECK((top + c).is_top());
  CHECK((c + top).is_top());
  CHECK((c + Cost::finite(5)).value() == 12);
  CHECK(std::min(top, c) == c);
  CHECK(top > c);
  CHECK(Cost::finite(0) < c);
  // near the representation limit, addition saturates instead of wrapping
  Cost big = Cost::finite(0xFFFFFFF0ull);
  CHECK((big + Cost::finite(0x100)).is_top());
  CHECK(saturating_add(50, Cost::finite(10)).value() == 60);
  CHECK(saturating_add(50, top).is_top());
}
