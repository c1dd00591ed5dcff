#include "doctest.h"

#include "polyhls/affine/fm.hpp"
#include "polyhls/affine/text.hpp"
#include "support/oracle.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace polyhls;
using namespace polyhls::affine;
using testing::Point;

namespace {

AffineExpr d(unsigned k) { return AffineExpr::dim(k); }
AffineExpr s(unsigned k) { return AffineExpr::symbol(k); }

IdentResolver dims_syms(std::vector<std::string> dims, std::vector<std::string> syms) {
  return [=](std::string_view n) -> std::optional<AffineExpr> {
    for (unsigned i = 0; i < dims.size(); ++i)
      if (dims[i] == n)
        return AffineExpr::dim(i);
    for (unsigned i = 0; i < syms.size(); ++i)
      if (syms[i] == n)
        return AffineExpr::symbol(i);
    return std::nullopt;
  };
}

IntegerSet box(unsigned n, Int lo, Int hi) {
  IntegerSet set(n, 0);
  for (unsigned k = 0; k < n; ++k) {
    set.add_inequality(d(k) - lo);
    set.add_inequality(AffineExpr(hi) - d(k));
  }
  return set;
}

std::vector<Point> project_points(const std::vector<Point> &pts, unsigned drop) {
  std::set<Point> out;
  for (Point p : pts) {
    p.erase(p.begin() + drop);
    out.insert(p);
  }
  return {out.begin(), out.end()};
}

IntegerSet random_set(std::mt19937_64 &rng, unsigned dims, int rows) {
  std::uniform_int_distribution<Int> coef(-4, 4), cst(-6, 6);
  std::bernoulli_distribution eq(0.15);
  IntegerSet set = box(dims, -5, 5);
  for (int r = 0; r < rows; ++r) {
    AffineExpr e(cst(rng));
    for (unsigned k = 0; k < dims; ++k)
      e += d(k) * coef(rng);
    if (eq(rng))
      set.add_equality(e);
    else
      set.add_inequality(e);
  }
  return set;
}

} // namespace

TEST_CASE("expression evaluation matches the tiled recurrence bounds") {
  auto r = dims_syms({"d0"}, {"s0"});
  AffineExpr m0 = parse_affine_expr("(s0-1) floordiv 16 + 1", r);
  std::vector<Int> syms{32};
  CHECK(m0.evaluate({}, syms) == 2);

  std::vector<Int> dims{0};
  CHECK(d(0).evaluate(dims, {}) == 0);

  AffineExpr lbp = parse_affine_expr("ceild(32*d0 - s0 + 1, 32)", r);
  std::vector<Int> one{1}, forty{40};
  CHECK(lbp.evaluate(one, forty) == testing::ref_ceil_div(32 - 40 + 1, 32));
  CHECK(lbp.evaluate(one, forty) == 0);

  CHECK_THROWS_AS(d(3).evaluate(dims, {}), Error);
}

TEST_CASE("floordiv and ceildiv round toward minus and plus infinity") {
  for (Int a = -100; a <= 100; ++a) {
    for (Int b = 1; b <= 16; ++b) {
      std::vector<Int> pt{a};
      CHECK(d(0).floor_div(b).evaluate(pt, {}) == testing::ref_floor_div(a, b));
      CHECK(d(0).ceil_div(b).evaluate(pt, {}) == testing::ref_ceil_div(a, b));
      CHECK(d(0).ceil_div(b).evaluate(pt, {}) ==
            testing::ref_floor_div(a + b - 1, b));
      Int m = d(0).mod(b).evaluate(pt, {});
      CHECK(m == a - b * testing::ref_floor_div(a, b));
    }
  }
}

TEST_CASE("expression canonicalization") {
  CHECK(d(0) + d(1) - d(0) == d(1));
  CHECK((d(0) * 2 + 4).floor_div(2) == d(0) + 2);
  CHECK((s(0) * 2 - 2).floor_div(32) == (s(0) - 1).floor_div(16));
  CHECK(AffineExpr(7).floor_div(2) == AffineExpr(3));
  CHECK(d(0).floor_div(1) == d(0));
  CHECK_THROWS_AS(d(0).floor_div(0), Error);
  CHECK_THROWS_AS(d(0).mod(-3), Error);
  CHECK(to_string(d(0) * 32 - d(1) * 32 + 32) == "d0*32-d1*32+32");
  CHECK(to_string((s(0) - 1).floor_div(16) + 1) == "(s0-1) floordiv 16 + 1");
  CHECK(to_string((d(0) * 32 - s(0) + 1).ceil_div(32)) == "(d0*32-s0+1) ceildiv 32");
  CHECK(to_string(-(d(0).floor_div(2))) == "-(d0 floordiv 2)");
  CHECK(to_string(AffineExpr(-5)) == "-5");
}

TEST_CASE("tiled recurrence maps round-trip through the printer") {
  const char *maps[] = {
      "affine_map<()[s0] -> ((s0-1) floordiv 16 + 1)>",
      "affine_map<(d0)[s0] -> (0, (d0*32-s0+1) ceildiv 32)>",
      "affine_map<(d0)[s0] -> ((s0-1) floordiv 32 + 1, d0+1)>",
      "affine_map<(d0,d1) -> (1, d0*32-d1*32)>",
      "affine_map<(d0,d1)[s0] -> (s0, d0*32-d1*32+32)>",
      "affine_map<(d0) -> (1, d0*32)>",
      "affine_map<(d0)[s0] -> (s0, d0*32+32)>",
  };
  for (const char *text : maps) {
    AffineMap m = parse_affine_map(text);
    CHECK(print_affine_map(m) == text);
  }
  AffineMap spaced = parse_affine_map(" affine_map< ( a , b ) [ n ] -> ( a * 2 +\n b , n ) > ");
  CHECK(print_affine_map(spaced) == "affine_map<(d0,d1)[s0] -> (d0*2+d1, s0)>");
  CHECK_THROWS_AS(parse_affine_map("(d0) -> (d0*d0)"), Error);
  CHECK_THROWS_AS(parse_affine_map("(d0) -> (d1)"), Error);
  CHECK_THROWS_AS(parse_affine_map("(d0) -> (d0 floordiv 0)"), Error);
}

TEST_CASE("integer set text round-trip") {
  IntegerSet a = parse_integer_set("integer_set<(i,j)[N] : (i >= 1, i <= N-1, j >= 1, N-1 >= j)>");
  std::string text = print_integer_set(a);
  CHECK(text == "integer_set<(d0,d1)[s0] : (d0-1 >= 0, -d0+s0-1 >= 0, d1-1 >= 0, -d1+s0-1 >= 0)>");
  CHECK(parse_integer_set(text) == a);

  IntegerSet even = parse_integer_set("(d0) : (d0 mod 2 == 0, d0 >= 0, 6 - d0 >= 0)");
  CHECK(even.num_exists() == 1);
  CHECK(parse_integer_set(print_integer_set(even)) == even);
  CHECK(enumerate_points(even) == std::vector<Point>{{0}, {2}, {4}, {6}});

  CHECK(print_integer_set(IntegerSet::universe(1, 0)) == "integer_set<(d0) : (0 == 0)>");
  CHECK(parse_integer_set("integer_set<(d0) : (0 == 0)>") == IntegerSet::universe(1, 0));
}

TEST_CASE("constraint normalization") {
  IntegerSet set(1, 0);
  set.add_inequality(d(0) * 2 - 7); // 2i >= 7  ->  i >= 4
  REQUIRE(set.rows().size() == 1);
  CHECK(set.rows()[0].coeffs == std::vector<Int>{1, -4});

  IntegerSet pair(1, 0);
  pair.add_inequality(d(0) - 3);
  pair.add_inequality(AffineExpr(3) - d(0));
  REQUIRE(pair.rows().size() == 1);
  CHECK(pair.rows()[0].equality);

  IntegerSet bad(1, 0);
  bad.add_equality(d(0) * 2 - 3);
  CHECK(bad.is_obviously_empty());
}

TEST_CASE("fm_project examples") {
  CHECK(fm_project(box(2, 1, 3), 1) == box(1, 1, 3));

  IntegerSet diag(2, 0);
  diag.add_equality(d(0) + d(1) - 4);
  diag.add_inequality(d(1) - 1);
  diag.add_inequality(AffineExpr(3) - d(1));
  IntegerSet pi = fm_project(diag, 1);
  CHECK(enumerate_points(pi) == std::vector<Point>{{1}, {2}, {3}});
  CHECK(enumerate_points(pi) == project_points(testing::brute_points(diag, {}, -10, 10), 1));

  IntegerSet s1 = parse_integer_set("(i,j)[N] : (i >= 1, N-1 >= i, j >= 1, N-1 >= j)");
  IntegerSet si = fm_project(s1, 1);
  CHECK(si == parse_integer_set("(i)[N] : (i >= 1, N-1 >= i)"));
}

TEST_CASE("is_empty examples") {
  CHECK(is_empty(parse_integer_set("(i) : (i >= 1, 0 >= i)")));
  IntegerSet eq = parse_integer_set("(i,j)[N] : (i - j == 0, i >= 1, 3 >= j)");
  std::vector<Int> n{5};
  CHECK_FALSE(is_empty(eq.fix_symbols(n)));
  CHECK_FALSE(is_empty(eq));

  // Integer-empty but rationally non-empty: 2 <= 3i <= 2... i in (2/3,2/3].
  IntegerSet narrow = parse_integer_set("(i,j) : (3*i - 2*j == 1, 2*j - 3*i + 1 >= 0, i >= 0, 5 >= i)");
  CHECK_FALSE(is_empty(narrow));
  IntegerSet hole = parse_integer_set("(i,j) : (4*i - 2*j - 1 >= 0, 2*j - 4*i + 2 >= 0, 0 <= j, j <= 10)");
  CHECK(is_empty(hole) == testing::brute_points(hole, {}, -20, 20).empty());
}

TEST_CASE("bounds_for_dim examples") {
  DimBounds b = bounds_for_dim(parse_integer_set("(i)[N] : (i >= 1, N-1 >= i)"), 0);
  CHECK(b.lower == std::vector<AffineExpr>{1});
  CHECK(b.upper == std::vector<AffineExpr>{s(0) - 1});

  IntegerSet tiled = parse_integer_set(
      "(t1,t2,i,j)[N] : (i >= 1, N-1 >= i, j >= 1, N-1 >= j,"
      " i - 32*t1 + 32*t2 >= 0, 32*t1 - 32*t2 + 31 - i >= 0,"
      " j - 32*t2 >= 0, 32*t2 + 31 - j >= 0)");
  DimBounds bj = bounds_for_dim(tiled, 3);
  CHECK(bj.lower == std::vector<AffineExpr>{1, d(1) * 32});
  CHECK(bj.upper == std::vector<AffineExpr>{s(0) - 1, d(1) * 32 + 31});
  DimBounds bi = bounds_for_dim(tiled, 2);
  CHECK(bi.lower == std::vector<AffineExpr>{1, d(0) * 32 - d(1) * 32});

  DimBounds half = bounds_for_dim(parse_integer_set("(i) : (7 - 2*i >= 0, i >= 0)"), 0);
  CHECK(half.lower == std::vector<AffineExpr>{0});
  CHECK(half.upper == std::vector<AffineExpr>{AffineExpr(7).floor_div(2)});

  CHECK_THROWS_AS(bounds_for_dim(parse_integer_set("(i) : (i >= 0)"), 0), Error);
}

TEST_CASE("compose and unimodular transforms") {
  AffineMap m = parse_affine_map("(d0,d1)[s0] -> (d0+s0, d1*2)");
  CHECK(compose(AffineMap::identity(2), m) == m);
  AffineMap skew = parse_affine_map("(d0,d1) -> (d0+d1, d1)");
  CHECK(compose(skew, AffineMap::identity(2)) == skew);

  AffineMap tile = parse_affine_map("(d0) -> (d0 floordiv 32)");
  AffineMap sum = parse_affine_map("(d0,d1) -> (d0+d1)");
  AffineMap c = compose(tile, sum);
  CHECK(c == parse_affine_map("(d0,d1) -> ((d0+d1) floordiv 32)"));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Int> dist(-1000, 1000);
  for (int k = 0; k < 20; ++k) {
    std::vector<Int> x{dist(rng), dist(rng)};
    CHECK(c.evaluate(x, {})[0] == testing::ref_floor_div(x[0] + x[1], 32));
  }
  CHECK_THROWS_AS(compose(sum, tile), Error);

  CHECK(apply_unimodular(box(2, 1, 2), {{1, 0}, {0, 1}}) == box(2, 1, 2));
  IntegerSet skewed = apply_unimodular(box(2, 1, 2), {{1, 1}, {0, 1}});
  std::vector<Point> expect;
  for (const Point &p : testing::brute_points(box(2, 1, 2), {}, 0, 3))
    expect.push_back({p[0] + p[1], p[1]});
  std::sort(expect.begin(), expect.end());
  CHECK(enumerate_points(skewed) == expect);
  CHECK_THROWS_AS(apply_unimodular(box(2, 1, 2), {{2, 0}, {0, 1}}), Error);

  CHECK(determinant({{1, 1}, {0, 1}}) == 1);
  CHECK(determinant({{2, 3}, {1, 2}}) == 1);
  CHECK(determinant({{0, 1}, {1, 0}}) == -1);
  CHECK(unimodular_inverse({{2, 3}, {1, 2}}) == IntMatrix{{2, -3}, {-1, 2}});
}

TEST_CASE("property: enumeration agrees with substitution") {
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 150; ++iter) {
    unsigned dims = 1 + iter % 3;
    IntegerSet set = random_set(rng, dims, 3);
    auto brute = testing::brute_points(set, {}, -6, 6);
    CHECK(enumerate_points(set) == brute);
    CHECK(is_empty(set) == brute.empty());
    for (const Point &p : testing::box_points(dims, -6, 6)) {
      bool in = std::binary_search(brute.begin(), brute.end(), p);
      if (set.contains(p, {}) != in) {
        FAIL("membership mismatch");
        break;
      }
    }
  }
}

TEST_CASE("property: projection commutes with enumeration") {
  std::mt19937_64 rng(1234);
  int exact_cases = 0;
  for (int iter = 0; iter < 150; ++iter) {
    unsigned dims = 2 + iter % 2;
    IntegerSet set = random_set(rng, dims, 3);
    unsigned var = static_cast<unsigned>(iter % dims);
    Projection p = fm_project_exact(set, var);
    auto projected = project_points(testing::brute_points(set, {}, -6, 6), var);
    auto shadow = testing::brute_points(p.set, {}, -6, 6);
    // Always a superset of the true projection.
    CHECK(std::includes(shadow.begin(), shadow.end(), projected.begin(), projected.end()));
    if (p.exact) {
      ++exact_cases;
      CHECK(shadow == projected);
    }
    Projection dark = fm_project_exact(set, var, ShadowKind::Dark);
    auto under = testing::brute_points(dark.set, {}, -6, 6);
    CHECK(std::includes(projected.begin(), projected.end(), under.begin(), under.end()));
  }
  CHECK(exact_cases > 50);
}

TEST_CASE("property: bound reconstruction scans exactly the set") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 100; ++iter) {
    unsigned dims = 1 + iter % 3;
    IntegerSet set = random_set(rng, dims, 2);
    auto brute = testing::brute_points(set, {}, -6, 6);
    std::vector<DimBounds> bounds;
    for (unsigned k = 0; k < dims; ++k)
      bounds.push_back(bounds_for_dim(set, k));
    std::vector<Point> scanned;
    Point cur(dims);
    std::function<void(unsigned)> scan = [&](unsigned k) {
      if (k == dims) {
        if (set.contains(cur, {}))
          scanned.push_back(cur);
        return;
      }
      Int lo = INT64_MIN, hi = INT64_MAX;
      for (const auto &e : bounds[k].lower)
        lo = std::max(lo, e.evaluate(cur, {}));
      for (const auto &e : bounds[k].upper)
        hi = std::min(hi, e.evaluate(cur, {}));
      for (Int v = lo; v <= hi; ++v) {
        cur[k] = v;
        scan(k + 1);
      }
    };
    scan(0);
    CHECK(scanned == brute);
  }
}

TEST_CASE("property: unimodular images preserve point counts") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Int> f(-2, 2);
  for (int iter = 0; iter < 60; ++iter) {
    IntegerSet set = random_set(rng, 2, 2);
    IntMatrix t{{1, 0}, {0, 1}};
    for (int k = 0; k < 3; ++k) {
      Int a = f(rng);
      IntMatrix e = k % 2 ? IntMatrix{{1, a}, {0, 1}} : IntMatrix{{1, 0}, {a, 1}};
      IntMatrix n(2, std::vector<Int>(2, 0));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int l = 0; l < 2; ++l)
            n[i][j] += e[i][l] * t[l][j];
      t = n;
    }
    REQUIRE(std::abs(determinant(t)) == 1);
    auto pts = enumerate_points(set);
    auto img = enumerate_points(apply_unimodular(set, t));
    CHECK(pts.size() == img.size());
    for (const Point &p : pts) {
      Point q{t[0][0] * p[0] + t[0][1] * p[1], t[1][0] * p[0] + t[1][1] * p[1]};
      CHECK(std::binary_search(img.begin(), img.end(), q));
    }
  }
}

TEST_CASE("property: set text round-trip") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 50; ++iter) {
    IntegerSet set = random_set(rng, 1 + iter % 3, 3);
    CHECK(parse_integer_set(print_integer_set(set)) == set);
  }
}
