#include <doctest.h>

#include "support.hpp"

#include <algorithm>
#include <set>

using namespace testing;

namespace {

// Direct evaluation, no phase reduction.
CMatrix oracle_e(const std::vector<double>& a, const std::vector<double>& lambdas) {
  CMatrix e(static_cast<Eigen::Index>(lambdas.size()), static_cast<Eigen::Index>(a.size()));
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    for (std::size_t l = 0; l < a.size(); ++l)
      e(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
          std::exp(Complex(0, 2 * std::numbers::pi * a[l] * lambdas[j]));
  return e;
}

// Extreme eigenvalues of E*E.
std::pair<double, double> oracle_bounds(const CMatrix& e) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(e.adjoint() * e);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double oracle_delta(const std::vector<std::vector<long>>& set, double alpha) {
  double best = 2.0;
  for (const auto& v : set)
    for (std::size_t j = 0; j < v.size(); ++j)
      for (std::size_t l = 0; l < v.size(); ++l)
        if (j != l) best = std::min(best, std::abs(cis(alpha * v[j]) - cis(alpha * v[l])));
  return best;
}

LambdaSet set_of(const std::vector<std::vector<long>>& vectors) {
  std::vector<LambdaVector> vs;
  for (const auto& v : vectors) {
    LambdaVector x;
    for (long e : v) x.entries.push_back(vec({static_cast<double>(e)}));
    vs.push_back(x);
  }
  return LambdaSet::uniform(vs);
}

std::vector<std::vector<long>> random_integer_set(Rng& rng, std::size_t k, std::size_t count) {
  std::vector<std::vector<long>> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::set<long> entries;
    while (entries.size() < k) entries.insert(rng.integer(-12, 12));
    out.emplace_back(entries.begin(), entries.end());
  }
  return out;
}

std::vector<double> as_doubles(const std::vector<long>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("e matrix") {
  CHECK(e_matrix(freqs_1d({0}), lv({5}))(0, 0) == Complex(1, 0));
  const CMatrix e = e_matrix(freqs_1d({0.5, 1}), lv({0, 1}));
  CHECK((e - oracle_e({0.5, 1}, {0, 1})).norm() < 1e-15);
  CHECK(e(1, 0) == Complex(-1, 0));
  CHECK(e(1, 1) == Complex(1, 0));
  const CMatrix s = e_matrix(freqs_1d({1, 2}), lv({0, 1}));
  CHECK(s == CMatrix::Ones(2, 2));
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> a{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const std::vector<double> l{0, static_cast<double>(rng.integer(1, 5)), 7};
    FrequencyVector f;
    for (double x : a) f.entries.push_back(vec({x}));
    CHECK((e_matrix(f, lv({l[0], l[1], l[2]})) - oracle_e(a, l)).norm() < 1e-12);
  }
}

TEST_CASE("t matrix factorization") {
  SUBCASE("omega zero") {
    const auto t = factor_t_matrix(freqs_1d({0.5, 1}), lv({0, 1}), vec({0}));
    CHECK(t.U.isApprox(CMatrix::Identity(2, 2)));
    CHECK(t.T.isApprox(t.E));
  }
  SUBCASE("single frequency") {
    const auto t = factor_t_matrix(freqs_1d({1}), lv({0}), vec({0.25}));
    CHECK(std::abs(t.U(0, 0) - Complex(0, 1)) < 1e-15);
  }
  SUBCASE("entrywise") {
    const auto t = factor_t_matrix(freqs_1d({0.5, 1}), lv({0, 1}), vec({0.25}));
    CHECK(std::abs(t.U(0, 0) - cis(0.125)) < 1e-15);
    CHECK(std::abs(t.U(1, 1) - cis(0.25)) < 1e-15);
    const std::vector<double> a{0.5, 1}, l{0, 1};
    for (int j = 0; j < 2; ++j)
      for (int c = 0; c < 2; ++c)
        CHECK(std::abs(t.T(j, c) - cis(a[c] * (0.25 + l[j]))) < 1e-14);
  }
}

TEST_CASE("riesz bounds") {
  const LambdaSet s = set_of({{0, 1}, {1, 2}});
  SUBCASE("orthogonal rows") {
    const auto r = riesz_bounds(freqs_1d({0.5, 1}), s);
    CHECK(r.A == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.B == doctest::Approx(2.0).epsilon(1e-12));
    const auto [lo, hi] = oracle_bounds(oracle_e({0.5, 1}, {0, 1}));
    CHECK(std::abs(r.A - lo) < 1e-12);
    CHECK(std::abs(r.B - hi) < 1e-12);
  }
  SUBCASE("rank one") {
    const auto r = riesz_bounds(freqs_1d({1, 2}), s);
    CHECK(std::abs(r.A) < 1e-12);
    CHECK(r.B == doctest::Approx(4.0));
  }
  SUBCASE("scalar case") {
    const auto r = riesz_bounds(freqs_1d({0.37}), set_of({{3}, {-4}}));
    CHECK(r.A == doctest::Approx(1.0));
    CHECK(r.B == doctest::Approx(1.0));
  }
  SUBCASE("empty set") { CHECK_THROWS(riesz_bounds(freqs_1d({0.5}), LambdaSet{})); }
  SUBCASE("random sets against the eigen oracle, unitary invariance") {
    Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t k = 2 + trial % 3;
      const auto raw = random_integer_set(rng, k, 4);
      std::vector<double> a;
      for (std::size_t j = 0; j < k; ++j) a.push_back(rng.uniform(-1, 1));
      FrequencyVector f, g;
      const double b = rng.uniform(-2, 2);
      for (double x : a) f.entries.push_back(vec({x})), g.entries.push_back(vec({x + b}));
      const auto r = riesz_bounds(f, set_of(raw));
      double lo = 1e300, hi = 0;
      for (const auto& v : raw) {
        const auto [l, h] = oracle_bounds(oracle_e(a, as_doubles(v)));
        lo = std::min(lo, l), hi = std::max(hi, h);
      }
      CHECK(std::abs(r.A - lo) < 1e-9);
      CHECK(std::abs(r.B - hi) < 1e-9);
      const auto shifted = riesz_bounds(g, set_of(raw));
      CHECK(std::abs(shifted.A - r.A) < 1e-10);
      CHECK(std::abs(shifted.B - r.B) < 1e-10);
    }
  }
}

TEST_CASE("separation") {
  CHECK(check_separation(set_of({{0, 1}, {1, 2}}), vec({0.5})).delta == 2.0);
  CHECK(check_separation(set_of({{0, 1}}), vec({1.0 / 3})).delta ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  const auto collapsed = check_separation(set_of({{0, 1}}), vec({1}));
  CHECK(collapsed.delta == 0.0);
  CHECK_FALSE(collapsed.separated());
  REQUIRE(collapsed.witness.has_value());
  CHECK(collapsed.witness->j == 0);
  CHECK(collapsed.witness->l == 1);

  CHECK(delta_alpha_gap(set_of({{0, 1}}), vec({0.5})) == 2.0);
  CHECK(delta_alpha_gap(set_of({{0, 1}}), vec({1})) == 0.0);
  CHECK(delta_alpha_gap(set_of({{0, 1}, {0, 3}}), vec({0.25})) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  SUBCASE("delta equals the gap and is symmetric in alpha") {
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
      const auto raw = random_integer_set(rng, 2 + trial % 3, 3);
      const double alpha = rng.uniform(-1, 1);
      const LambdaSet s = set_of(raw);
      const double d = check_separation(s, vec({alpha})).delta;
      CHECK(std::abs(d - oracle_delta(raw, alpha)) < 1e-12);
      CHECK(std::abs(d - delta_alpha_gap(s, vec({alpha}))) < 1e-12);
      CHECK(std::abs(d - check_separation(s, vec({-alpha})).delta) < 1e-12);
    }
  }
}

TEST_CASE("admissibility") {
  const auto ok = check_admissibility(set_of({{0, 1}, {1, 2}}), vec({1}), 2);
  CHECK(ok.admissible);
  REQUIRE(ok.rows.size() == 2);
  CHECK(ok.rows[0].residues == std::vector<long>{0, 1});
  CHECK(ok.rows[1].residues == std::vector<long>{1, 0});

  const auto collide = check_admissibility(set_of({{0, 2}}), vec({1}), 2);
  CHECK_FALSE(collide.admissible);
  CHECK(collide.rows[0].residues == std::vector<long>{0, 0});

  const auto frac = check_admissibility(set_of({{0, 1}}), vec({0.5}), 2);
  CHECK_FALSE(frac.admissible);
  CHECK_FALSE(frac.rows[0].integral);

  SUBCASE("agrees with a residue oracle") {
    Rng rng(47);
    for (int trial = 0; trial < 100; ++trial) {
      const auto raw = random_integer_set(rng, 2 + trial % 2, 3);
      const long v = rng.integer(1, 3);
      const long n = rng.integer(2, 7);
      bool expected = true;
      for (const auto& row : raw) {
        std::set<long> res;
        for (long x : row) res.insert(((v * x) % n + n) % n);
        expected = expected && res.size() == row.size();
      }
      CHECK(check_admissibility(set_of(raw), vec({static_cast<double>(v)}), n).admissible == expected);
    }
  }
}

TEST_CASE("vandermonde frequencies") {
  const auto one = vandermonde_frequencies(vec({0.3}), 1);
  REQUIRE(one.size() == 1);
  CHECK(one.entries[0][0] == 0.3);

  const auto half = vandermonde_frequencies(vec({0.5}), 2);
  CHECK(half.entries[1][0] == 1.0);
  const CMatrix e = e_matrix(half, lv({0, 1}));
  CHECK(std::abs(e.determinant()) == doctest::Approx(2.0));

  const auto third = vandermonde_frequencies(vec({1.0 / 3}), 2);
  const double det = std::abs(e_matrix(third, lv({0, 1})).determinant());
  CHECK(det == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(det * det == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("structured basis certificate") {
  const LambdaSet s = set_of({{0, 1}, {1, 2}});
  const auto good = certify_structured_basis(freqs_1d({0.5, 1}), s);
  CHECK(good.pass);
  CHECK(good.min_abs_det == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(good.derived_lower_bound == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(good.A == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(good.det_tolerance == doctest::Approx(2e-8));

  const auto bad = certify_structured_basis(freqs_1d({1, 2}), s);
  CHECK_FALSE(bad.pass);
  CHECK(bad.min_abs_det < 1e-12);

  const auto scalar = certify_structured_basis(freqs_1d({0.2}), set_of({{0}, {1}}));
  CHECK(scalar.pass);
  CHECK(scalar.A == doctest::Approx(1.0));
  CHECK(scalar.B == doctest::Approx(1.0));

  SUBCASE("determinant bound chain on random sets") {
    Rng rng(53);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t k = 2 + trial % 3;
      const auto raw = random_integer_set(rng, k, 3);
      FrequencyVector f;
      for (std::size_t j = 0; j < k; ++j)
        f.entries.push_back(vec({rng.integer(0, 3) == 0 ? static_cast<double>(j) : rng.uniform(-1, 1)}));
      const auto c = certify_structured_basis(f, set_of(raw));
      double min_det = 1e300;
      for (const auto& v : raw) {
        Eigen::PartialPivLU<CMatrix> lu(oracle_e([&] {
          std::vector<double> a;
          for (const auto& x : f.entries) a.push_back(x[0]);
          return a;
        }(), as_doubles(v)));
        min_det = std::min(min_det, std::abs(lu.determinant()));
      }
      CHECK(std::abs(c.min_abs_det - min_det) < 1e-9);
      CHECK((c.A > 1e-12) == (c.min_abs_det > 1e-8));
      CHECK(c.A >= c.min_abs_det * c.min_abs_det / std::pow(c.B, static_cast<double>(k - 1)) - 1e-9);
    }
  }
}

TEST_CASE("two-tile converse") {
  const auto a = two_tile_converse(freqs_1d({0.5, 1}), set_of({{0, 1}, {1, 2}}));
  CHECK(a.alpha[0] == 0.5);
  CHECK(a.delta == 2.0);
  const auto b = two_tile_converse(freqs_1d({0, 1.0 / 3}), set_of({{0, 1}}));
  CHECK(b.alpha[0] == doctest::Approx(1.0 / 3));
  CHECK(b.delta == doctest::Approx(std::sqrt(3.0)));
  const auto c = two_tile_converse(freqs_1d({0, 1}), set_of({{0, 1}}));
  CHECK(c.delta == 0.0);
  CHECK(riesz_bounds(freqs_1d({0, 1}), set_of({{0, 1}})).A < 1e-12);
  CHECK_THROWS_AS(two_tile_converse(freqs_1d({0, 1, 2}), set_of({{0, 1, 2}})), DimensionMismatch);
}

TEST_CASE("frequency search") {
  const auto cfg = tile_1d({{0, 1}, {2, 3}}, 2);
  const LambdaSet set = enumerate_lambda_set(cfg, make_grid(cfg, 64));
  const auto found = search_vandermonde_frequencies(set, 1, 16);
  CHECK(found.certificate.pass);
  CHECK(found.freqs.size() == 2);
  CHECK(found.freqs.entries[1][0] == doctest::Approx(2 * found.alpha[0]));
  // The best alpha for lambda differences {2, 2} is 1/4.
  CHECK(found.alpha[0] == doctest::Approx(0.25));
  CHECK(found.certificate.min_abs_det == doctest::Approx(2.0));
}
