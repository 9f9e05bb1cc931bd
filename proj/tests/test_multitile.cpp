#include <doctest.h>

#include "support.hpp"

#include <algorithm>
#include <set>

using namespace testing;

namespace {

using Parts = std::vector<std::pair<double, double>>;

// k layers; each layer cuts [0, 1) at multiples of 1/8 and moves every piece
// by an integer inside its own band of width 6, so layers stay disjoint.
Parts random_k_tile(Rng& rng, int k) {
  Parts parts;
  for (int j = 0; j < k; ++j) {
    std::vector<int> cuts{0, 8};
    for (int c = 1; c < 8; ++c)
      if (rng.integer(0, 2) == 0) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double shift = static_cast<double>(10 * j + rng.integer(-3, 2));
      parts.emplace_back(cuts[p] / 8.0 + shift, cuts[p + 1] / 8.0 + shift);
    }
  }
  return parts;
}

std::vector<long> as_longs(const LambdaVector& v) {
  std::vector<long> out;
  for (const Vector& p : v.entries) out.push_back(std::lround(p[0]));
  return out;
}

}  // namespace

TEST_CASE("box unions") {
  SUBCASE("invalid boxes") {
    CHECK_THROWS_AS(intervals({{1, 1}}), InvalidSet);
    CHECK_THROWS_AS(intervals({{2, 1}}), InvalidSet);
    CHECK_THROWS_AS(BoxUnion(std::vector<Box>{{vec({0}), vec({1, 2})}}), Error);
  }
  SUBCASE("overlaps are merged") {
    const BoxUnion u = intervals({{0, 2}, {1, 3}});
    CHECK(u.measure() == doctest::Approx(3.0));
    CHECK(u.contains(vec({2.5})));
    CHECK_FALSE(u.contains(vec({3})));
    CHECK(u.contains(vec({0})));
  }
  SUBCASE("random unions agree with a cell count") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      Parts parts;
      std::set<long> cells;
      const int count = static_cast<int>(rng.integer(1, 5));
      for (int b = 0; b < count; ++b) {
        const long lo = rng.integer(-10, 10);
        const long hi = lo + rng.integer(1, 6);
        parts.emplace_back(lo, hi);
        for (long c = lo; c < hi; ++c) cells.insert(c);
      }
      const BoxUnion u = intervals(parts);
      CHECK(u.measure() == doctest::Approx(static_cast<double>(cells.size())));
      for (long c = -12; c <= 18; ++c) {
        CHECK(u.contains(vec({c + 0.5})) == (cells.count(c) == 1));
      }
    }
  }
  SUBCASE("2d difference keeps the measure") {
    const BoxUnion u(std::vector<Box>{{vec({0, 0}), vec({2, 2})}, {vec({1, 1}), vec({3, 3})}});
    CHECK(u.measure() == doctest::Approx(7.0));
    const BoxUnion i = u.intersected(BoxUnion(std::vector<Box>{{vec({1, 0}), vec({4, 1.5})}}));
    CHECK(i.measure() == doctest::Approx(2.0));
  }
}

TEST_CASE("tiling level at a point") {
  CHECK(tiling_level_at(tile_1d({{0, 1}}, 1), vec({0.25})) == 1);
  CHECK(tiling_level_at(tile_1d({{0, 2}}, 2), vec({-0.25})) == 2);
  const MultiTileConfig empty(BoxUnion(1), Lattice::identity(1), 1);
  CHECK(tiling_level_at(empty, vec({0.1})) == 0);
}

TEST_CASE("k-tiling verification on the grid") {
  SUBCASE("interval of length two") {
    const auto cfg = tile_1d({{0, 2}}, 2);
    const auto rep = verify_k_tiling(cfg, make_grid(cfg, 64));
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
  }
  SUBCASE("split interval 1-tile") {
    const auto cfg = tile_1d({{0, 0.5}, {1.5, 2}}, 1);
    CHECK(verify_k_tiling(cfg, make_grid(cfg, 64)).ok);
  }
  SUBCASE("overlapping 1-tile candidate") {
    const auto cfg = tile_1d({{0, 1.5}}, 1);
    const auto grid = make_grid(cfg, 64);
    const auto rep = verify_k_tiling(cfg, grid);
    CHECK_FALSE(rep.ok);
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid.point(i)[0] >= 0.0 && grid.point(i)[0] < 0.5) expected.push_back(i);
    REQUIRE(rep.violations.size() == expected.size());
    for (std::size_t v = 0; v < expected.size(); ++v) {
      CHECK(rep.violations[v].index == expected[v]);
      CHECK(rep.violations[v].count == 2);
    }
    CHECK_FALSE(cfg.measure_consistent());
  }
  SUBCASE("random k-tiles against a brute-force count") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = static_cast<int>(rng.integer(1, 3));
      const Parts parts = random_k_tile(rng, k);
      const auto cfg = tile_1d(parts, k);
      const auto grid = make_grid(cfg, 64);
      CHECK(verify_k_tiling(cfg, grid).ok);
      CHECK(cfg.measure_consistent());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(brute_translates(parts, grid.point(i)[0]).size() == static_cast<std::size_t>(k));
      }
    }
  }
  SUBCASE("2d product tile") {
    const MultiTileConfig cfg(BoxUnion(std::vector<Box>{{vec({0, 0}), vec({2, 1})}}),
                              Lattice::identity(2), 2);
    CHECK(verify_k_tiling(cfg, make_grid(cfg, 16)).ok);
  }
}

TEST_CASE("grid construction") {
  const auto cfg = tile_1d({{0.125, 1.125}}, 1);
  CHECK_THROWS_AS(make_grid(cfg, 4), BoundaryCollision);
  CHECK_NOTHROW(make_grid(cfg, 8));
  const FiberSampleGrid g(Lattice::identity(1), 4);
  CHECK(g.point(0)[0] == doctest::Approx(-0.375));
  CHECK(g.point(3)[0] == doctest::Approx(0.375));
  CHECK(g.cell_weight() == doctest::Approx(0.25));
  CHECK(g.locate(vec({0.125})) == std::optional<std::size_t>(2));
  CHECK_FALSE(g.locate(vec({0.2})).has_value());
  const FiberSampleGrid g2(Lattice(mat({{2, 0}, {0, 1}})), 2);
  REQUIRE(g2.size() == 4);
  CHECK(g2.point(1)[0] == doctest::Approx(-0.5));
  CHECK(g2.point(1)[1] == doctest::Approx(0.25));
}

TEST_CASE("lambda vectors") {
  const auto two = tile_1d({{0, 2}}, 2);
  CHECK(as_longs(lambda_vector(two, vec({0.25}))) == std::vector<long>{0, 1});
  CHECK(as_longs(lambda_vector(two, vec({-0.25}))) == std::vector<long>{1, 2});
  CHECK(as_longs(lambda_vector(tile_1d({{0, 1}}, 1), vec({-0.25}))) == std::vector<long>{1});

  const auto bad = tile_1d({{0, 1.5}}, 1);
  try {
    (void)lambda_vector(bad, vec({0.25}));
    FAIL("expected WrongMultiplicity");
  } catch (const WrongMultiplicity& e) {
    CHECK(e.observed() == 2);
  }

  SUBCASE("random tiles match the brute-force scan") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = static_cast<int>(rng.integer(1, 3));
      const Parts parts = random_k_tile(rng, k);
      const auto cfg = tile_1d(parts, k);
      const auto grid = make_grid(cfg, 64);
      const auto map = lambda_map(cfg, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(as_longs(map[i]) == brute_translates(parts, grid.point(i)[0]));
      }
    }
  }
  SUBCASE("box order does not matter") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      Parts parts = random_k_tile(rng, 2);
      const auto a = tile_1d(parts, 2);
      std::shuffle(parts.begin(), parts.end(), rng.engine());
      const auto b = tile_1d(parts, 2);
      const auto grid = make_grid(a, 64);
      const auto ma = lambda_map(a, grid);
      const auto mb = lambda_map(b, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) CHECK(ma[i] == mb[i]);
    }
  }
}

TEST_CASE("lambda set enumeration") {
  auto check_set = [](const MultiTileConfig& cfg,
                      const std::vector<std::pair<std::vector<long>, double>>& expected) {
    const LambdaSet set = enumerate_lambda_set(cfg, make_grid(cfg, 64));
    REQUIRE(set.size() == expected.size());
    std::size_t i = 0;
    for (const auto& [v, e] : set.items()) {
      CHECK(as_longs(v) == expected[i].first);
      CHECK(e.weight == expected[i].second);
      ++i;
    }
    CHECK(set.weight_sum() == 1.0);
    CHECK(set.total() == 64);
  };
  check_set(tile_1d({{0, 2}}, 2), {{{0, 1}, 0.5}, {{1, 2}, 0.5}});
  check_set(tile_1d({{0, 1}}, 1), {{{0}, 0.5}, {{1}, 0.5}});
  check_set(tile_1d({{0, 0.5}, {1.5, 2}}, 1), {{{0}, 0.5}, {{2}, 0.5}});

  SUBCASE("weights sum to one and shift with the set") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const int k = static_cast<int>(rng.integer(1, 3));
      Parts parts = random_k_tile(rng, k);
      const auto cfg = tile_1d(parts, k);
      const LambdaSet set = enumerate_lambda_set(cfg, make_grid(cfg, 64));
      std::size_t counted = 0;
      for (const auto& [v, e] : set.items()) counted += e.count;
      CHECK(counted == 64);
      CHECK(set.weight_sum() == doctest::Approx(1.0).epsilon(1e-15));

      const long shift = rng.integer(-4, 4);
      for (auto& [lo, hi] : parts) lo += static_cast<double>(shift), hi += static_cast<double>(shift);
      const auto moved = tile_1d(parts, k);
      const LambdaSet moved_set = enumerate_lambda_set(moved, make_grid(moved, 64));
      REQUIRE(moved_set.size() == set.size());
      auto it = moved_set.items().begin();
      for (const auto& [v, e] : set.items()) {
        std::vector<long> expected = as_longs(v);
        for (long& x : expected) x += shift;
        CHECK(as_longs(it->first) == expected);
        CHECK(it->second.count == e.count);
        ++it;
      }
    }
  }
}

TEST_CASE("splitting into 1-tiles") {
  auto piece_points = [](const OneTilePiece& piece, const FiberSampleGrid& grid) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < grid.size(); ++i) xs.push_back(grid.point(i)[0] + piece.translate[i][0]);
    std::sort(xs.begin(), xs.end());
    return xs;
  };

  SUBCASE("interval of length two") {
    const auto cfg = tile_1d({{0, 2}}, 2);
    const auto grid = make_grid(cfg, 64);
    const auto pieces = decompose_into_one_tiles(cfg, grid);
    REQUIRE(pieces.size() == 2);
    for (double x : piece_points(pieces[0], grid)) CHECK((x >= 0 && x < 1));
    for (double x : piece_points(pieces[1], grid)) CHECK((x >= 1 && x < 2));
    REQUIRE(pieces[0].boxes.has_value());
    REQUIRE(pieces[0].boxes->boxes().size() == 1);
    CHECK(pieces[0].boxes->boxes()[0].low[0] == 0.0);
    CHECK(pieces[0].boxes->boxes()[0].high[0] == 1.0);
    CHECK(pieces[1].boxes->boxes()[0].low[0] == 1.0);
    CHECK(pieces[1].boxes->boxes()[0].high[0] == 2.0);
    for (const auto& p : pieces) CHECK(verify_piece_one_tiling(p, cfg, grid).ok);
  }
  SUBCASE("separated unit intervals") {
    const auto cfg = tile_1d({{0, 1}, {2, 3}}, 2);
    const auto grid = make_grid(cfg, 64);
    const auto pieces = decompose_into_one_tiles(cfg, grid);
    REQUIRE(pieces.size() == 2);
    CHECK(pieces[0].boxes->measure() == doctest::Approx(1.0));
    CHECK(pieces[0].boxes->contains(vec({0.5})));
    CHECK(pieces[1].boxes->contains(vec({2.5})));
    CHECK(pieces[1].boxes->measure() == doctest::Approx(1.0));
  }
  SUBCASE("a 1-tile is its own piece") {
    const auto cfg = tile_1d({{0, 0.5}, {1.5, 2}}, 1);
    const auto grid = make_grid(cfg, 64);
    const auto pieces = decompose_into_one_tiles(cfg, grid);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].boxes->measure() == doctest::Approx(1.0));
    CHECK(pieces[0].boxes->intersected(cfg.set()).measure() == doctest::Approx(1.0));
  }
  SUBCASE("pieces partition every coset on random tiles") {
    Rng rng(37);
    for (int trial = 0; trial < 30; ++trial) {
      const int k = static_cast<int>(rng.integer(1, 3));
      const Parts parts = random_k_tile(rng, k);
      const auto cfg = tile_1d(parts, k);
      const auto grid = make_grid(cfg, 64);
      const auto pieces = decompose_into_one_tiles(cfg, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<long> used;
        for (const auto& p : pieces) used.push_back(std::lround(p.translate[i][0]));
        std::sort(used.begin(), used.end());
        CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
        CHECK(used == brute_translates(parts, grid.point(i)[0]));
      }
      double total = 0.0;
      for (const auto& p : pieces) {
        CHECK(verify_piece_one_tiling(p, cfg, grid).ok);
        REQUIRE(p.boxes.has_value());
        CHECK(p.boxes->measure() == doctest::Approx(1.0));
        CHECK(verify_k_tiling(MultiTileConfig(*p.boxes, Lattice::identity(1), 1), grid).ok);
        total += p.boxes->measure();
      }
      CHECK(total == doctest::Approx(cfg.set().measure()));
    }
  }
}
