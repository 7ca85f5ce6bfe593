// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fdcop/piecewise.hpp"
#include "test_util.hpp"

namespace fdcop {
namespace {

using testing::quad;

Box box2(VarIndex u, Interval iu, VarIndex v, Interval iv) {
  return Box({{u, iu}, {v, iv}});
}

Poly2 poly(VarIndex u, VarIndex v, double a, double b, double c, double d,
           double e, double f0) {
  return Poly2::from_utility(quad(u, v, a, b, c, d, e, f0));
}

/// Four pieces over [0,10]^2 split at u = su and v = sv, distinct polynomials.
PiecewiseFunction four_pieces(VarIndex u, VarIndex v, double su, double sv,
                              double seed) {
  std::vector<Piece> pieces;
  int k = 0;
  for (Interval iu : {Interval{0, su}, Interval{su, 10}}) {
    for (Interval iv : {Interval{0, sv}, Interval{sv, 10}}) {
      ++k;
      pieces.push_back({box2(u, iu, v, iv),
                        poly(u, v, -0.5 * k, seed + k, 0.25 * k, -seed, 0.1 * k, k)});
    }
  }
  return PiecewiseFunction(box2(u, {0, 10}, v, {0, 10}), pieces);
}

std::map<VarIndex, double> at(std::initializer_list<std::pair<const VarIndex, double>> xs) {
  return std::map<VarIndex, double>(xs);
}

TEST(Add, AtomicRangesOfSharedVariable) {
  // f12 splits x2 at 6, f23 splits x2 at 3.
  auto f12 = four_pieces(1, 2, 4, 6, 1.0);
  auto f23 = four_pieces(2, 3, 3, 7, 2.0);
  auto f123 = add(f12, f23);
  EXPECT_EQ(f123.variables(), (std::vector<VarIndex>{1, 2, 3}));
  EXPECT_EQ(f123.size(), 2u * 3u * 2u);
  std::set<std::pair<double, double>> x2_ranges;
  for (const auto& p : f123.pieces()) {
    x2_ranges.insert({p.box.at(2).lo, p.box.at(2).hi});
  }
  EXPECT_EQ(x2_ranges, (std::set<std::pair<double, double>>{{0, 3}, {3, 6}, {6, 10}}));
  EXPECT_FALSE(audit_partition(f123).has_value());

  // The first listed pieces pair f12^a with f23^a and f23^b, then f12^c.
  auto check = [&](double x1, double x2, double x3) {
    double want = evaluate(f12, at({{1, x1}, {2, x2}})) + evaluate(f23, at({{2, x2}, {3, x3}}));
    EXPECT_NEAR(evaluate(f123, at({{1, x1}, {2, x2}, {3, x3}})), want, 1e-9 * std::max(1.0, std::abs(want)));
  };
  check(2, 1.5, 3);  // a + a
  check(2, 1.5, 8);  // a + b
  check(7, 1.5, 3);  // c + a
  check(7, 1.5, 8);  // c + b
  check(2, 4.5, 8);
  check(7, 8.0, 1);
}

TEST(Add, ZeroIsIdentity) {
  auto f = four_pieces(0, 1, 4, 6, 3.0);
  auto g = add(f, PiecewiseFunction::constant(0.0));
  EXPECT_EQ(dump(g), dump(f));
  EXPECT_EQ(g.size(), f.size());
}

TEST(Add, SinglePieceSumMatchesPointwise) {
  std::mt19937_64 rng(3);
  Box b = box2(0, {0, 1}, 1, {0, 1});
  auto f = PiecewiseFunction(b, {{b, poly(0, 1, 1.5, -2, 0.5, 3, -1, 0.25)}});
  auto g = PiecewiseFunction(b, {{b, poly(0, 1, -0.75, 1, 2, -3, 4, 1)}});
  auto h = add(f, g);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    auto p = at({{0, u(rng)}, {1, u(rng)}});
    double want = evaluate(f, p) + evaluate(g, p);
    EXPECT_NEAR(evaluate(h, p), want, 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST(Add, RandomPiecewiseSoundness) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = four_pieces(0, 1, u(rng), u(rng), trial);
    auto g = four_pieces(1, 2, u(rng), u(rng), -trial);
    auto h = add(f, g);
    ASSERT_FALSE(audit_partition(h).has_value()) << *audit_partition(h);
    for (int i = 0; i < 1000; ++i) {
      double x0 = u(rng), x1 = u(rng), x2 = u(rng);
      double want = evaluate(f, at({{0, x0}, {1, x1}})) + evaluate(g, at({{1, x1}, {2, x2}}));
      EXPECT_NEAR(evaluate(h, at({{0, x0}, {1, x1}, {2, x2}})), want,
                  1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Add, MismatchedSharedDomain) {
  Box b1 = box2(0, {0, 1}, 1, {0, 1});
  Box b2 = box2(1, {0, 2}, 2, {0, 1});
  PiecewiseFunction f(b1, {{b1, Poly2::constant(1)}});
  PiecewiseFunction g(b2, {{b2, Poly2::constant(1)}});
  EXPECT_THROW(add(f, g), DomainError);
}

TEST(Add, PieceCap) {
  auto f = four_pieces(0, 1, 4, 6, 1.0);
  auto g = four_pieces(1, 2, 3, 7, 2.0);
  EXPECT_THROW(add(f, g, 5), CapacityError);
}

TEST(Project, InteriorCriticalPoint) {
  // -x^2 + 2xy + y on [0,10]^2: best x = y, g(y) = y^2 + y.
  auto f = PiecewiseFunction::from_utility(quad(0, 1, -1, 0, 0, 1, 2), {0, 10}, {0, 10});
  auto proj = project(f, 0);
  ASSERT_EQ(proj.function.size(), 1u);
  const auto& piece = proj.function.pieces()[0];
  EXPECT_DOUBLE_EQ(piece.poly.square(1), 1.0);
  EXPECT_DOUBLE_EQ(piece.poly.linear(1), 1.0);
  EXPECT_DOUBLE_EQ(piece.poly.constant(), 0.0);
  ASSERT_EQ(proj.response.segments.size(), 1u);
  const auto& r = proj.response.segments[0].response;
  EXPECT_EQ(r.kind, Response::Kind::kAffine);
  EXPECT_DOUBLE_EQ(r.slope, 1.0);
  EXPECT_DOUBLE_EQ(r.intercept, 0.0);
  for (int j = 0; j <= 100; ++j) {
    double y = j * 0.1;
    double dense = -INFINITY;
    for (int i = 0; i <= 10000; ++i) {
      double x = i * 0.001;
      dense = std::max(dense, -x * x + 2 * x * y + y);
    }
    EXPECT_NEAR(evaluate(proj.function, at({{1, y}})), dense, 1e-6);
  }
}

TEST(Project, LinearTakesUpperBoundForPositiveSlope) {
  auto f = PiecewiseFunction::from_utility(quad(0, 1, 0, 1, 0, 1, 0), {-5, 5}, {-5, 5});
  auto proj = project(f, 0);
  for (double y : {-5.0, -1.0, 0.0, 2.5, 5.0}) {
    EXPECT_DOUBLE_EQ(evaluate(proj.function, at({{1, y}})), 5 + y);
    EXPECT_DOUBLE_EQ(proj.response.respond(y), 5.0);
  }
  for (const auto& s : proj.response.segments) {
    EXPECT_EQ(s.response.kind, Response::Kind::kUpperBound);
  }
}

TEST(Project, ConvexPrefersEndpoint) {
  auto f = PiecewiseFunction::from_utility(quad(0, 1, 1, 0, 0, 0, 0), {-1, 2}, {0, 1});
  auto proj = project(f, 0);
  for (double y : {0.0, 0.5, 1.0}) {
    EXPECT_DOUBLE_EQ(evaluate(proj.function, at({{1, y}})), 4.0);
    EXPECT_DOUBLE_EQ(proj.response.respond(y), 2.0);
  }
  for (const auto& s : proj.response.segments) {
    EXPECT_EQ(s.response.kind, Response::Kind::kUpperBound);
  }
}

TEST(Project, RejectsWideFunctions) {
  auto f = add(PiecewiseFunction::from_utility(quad(0, 1, -1, 0, -1, 0, 1), {0, 1}, {0, 1}),
               PiecewiseFunction::from_utility(quad(1, 2, -1, 0, -1, 0, 1), {0, 1}, {0, 1}));
  EXPECT_THROW(project(f, 1), UnsupportedError);
  EXPECT_THROW(project(f, 7), ArgumentError);
}

/// Random single-piece quadratic projections against a dense x grid.
TEST(Project, SoundnessAgainstDenseGrid) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> uy(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto q = quad(0, 1, coef(rng), coef(rng), coef(rng), coef(rng), coef(rng), coef(rng));
    auto f = PiecewiseFunction::from_utility(q, {-10, 10}, {-10, 10});
    auto proj = project(f, 0);
    ASSERT_FALSE(audit_partition(proj.function).has_value());
    double delta = 0.0;
    for (double x : {-10.0, 10.0}) {
      for (double y : {-10.0, 10.0}) {
        delta = std::max(delta, std::abs(q.d_first(x, y)) + std::abs(q.d_second(x, y)));
      }
    }
    for (int s = 0; s < 1000; ++s) {
      double y = uy(rng);
      double dense = -INFINITY;
      for (int i = 0; i <= 20000; ++i) dense = std::max(dense, q(-10.0 + i * 1e-3, y));
      double got = evaluate(proj.function, at({{1, y}}));
      EXPECT_LE(std::abs(got - dense), delta * 1e-3 + 1e-9);
      // Never below the endpoint candidates.
      EXPECT_GE(got + 1e-9, q(-10.0, y));
      EXPECT_GE(got + 1e-9, q(10.0, y));
      // The recorded best response reproduces the projected value.
      double x = proj.response.respond(y);
      EXPECT_GE(x, -10.0 - 1e-12);
      EXPECT_LE(x, 10.0 + 1e-12);
      EXPECT_NEAR(q(x, y), got, 1e-9 * std::max(1.0, std::abs(got)));
    }
  }
}

TEST(Project, AcrossPiecesOfTheEliminatedVariable) {
  auto f = four_pieces(0, 1, 4, 6, 2.0);
  auto proj = project(f, 0);
  ASSERT_FALSE(audit_partition(proj.function).has_value());
  for (int j = 0; j <= 200; ++j) {
    double y = 0.0125 + j * 0.049;  // off the split at 6, where both sides tie
    double dense = -INFINITY;
    for (int i = 0; i <= 10000; ++i) {
      dense = std::max(dense, evaluate(f, at({{0, i * 1e-3}, {1, y}})));
    }
    double got = evaluate(proj.function, at({{1, y}}));
    EXPECT_GE(got + 1e-9, dense);
    EXPECT_LE(got - dense, 1e-3 * 30.0);
    // The function jumps across pieces, so the response is scored on the
    // closed piece it was drawn from.
    double x = proj.response.respond(y);
    double closure = -INFINITY;
    for (const auto& p : f.pieces()) {
      if (p.box.contains(at({{0, x}, {1, y}}))) {
        closure = std::max(closure, p.poly.evaluate(at({{0, x}, {1, y}})));
      }
    }
    EXPECT_NEAR(closure, got, 1e-9 * std::max(1.0, std::abs(got)));
  }
}

TEST(Evaluate, LocatesPieces) {
  auto f12 = four_pieces(1, 2, 4, 6, 1.0);
  // x1 in [0,4], x2 in [6,10] is the second piece.
  const auto& b = f12.pieces()[1];
  EXPECT_EQ(b.box.at(1).hi, 4.0);
  EXPECT_EQ(b.box.at(2).lo, 6.0);
  EXPECT_EQ(evaluate(f12, at({{1, 2}, {2, 7}})), b.poly.evaluate(at({{1, 2}, {2, 7}})));
  EXPECT_EQ(evaluate(PiecewiseFunction::constant(5), {}), 5.0);
  EXPECT_THROW(evaluate(f12, at({{1, 11}, {2, 7}})), DomainError);
}

TEST(Evaluate, SharedFacetTieIsDeterministic) {
  // A continuous function split at x0 = 4: both sides agree on the facet.
  auto q = poly(0, 1, -1, 2, 0.5, -3, 1, 4);
  Box left = box2(0, {0, 4}, 1, {0, 10});
  Box right = box2(0, {4, 10}, 1, {0, 10});
  PiecewiseFunction f(box2(0, {0, 10}, 1, {0, 10}), {{right, q}, {left, q}});
  auto p = at({{0, 4}, {1, 3}});
  EXPECT_EQ(left.contains(p), right.contains(p));
  EXPECT_EQ(evaluate(f, p), q.evaluate(p));
  EXPECT_EQ(f.pieces()[0].box.at(0).hi, 4.0);  // lexicographically first
}

TEST(ArgmaxUnary, Examples) {
  Box b({{0, Interval{0, 10}}});
  auto vertex = argmax_unary(PiecewiseFunction(b, {{b, Poly2::univariate(0, -9, 6, -1)}}));
  EXPECT_DOUBLE_EQ(vertex.value, 3.0);
  EXPECT_DOUBLE_EQ(vertex.utility, 0.0);
  auto mono = argmax_unary(PiecewiseFunction(b, {{b, Poly2::univariate(0, 0, 1, 0)}}));
  EXPECT_DOUBLE_EQ(mono.value, 10.0);
  EXPECT_DOUBLE_EQ(mono.utility, 10.0);

  Box b1({{0, Interval{0, 1}}});
  Box b2({{0, Interval{1, 2}}});
  PiecewiseFunction two(Box({{0, Interval{0, 2}}}),
                        {{b1, Poly2::univariate(0, 0, 0, 1)}, {b2, Poly2::univariate(0, 2, -1, 0)}});
  auto best = argmax_unary(two);
  EXPECT_DOUBLE_EQ(best.value, 1.0);
  EXPECT_DOUBLE_EQ(best.utility, 1.0);
  double grid = -INFINITY;
  for (int i = 0; i <= 20000; ++i) grid = std::max(grid, evaluate(two, at({{0, i * 1e-4}})));
  EXPECT_NEAR(best.utility, grid, 1e-9);
}

TEST(Dump, OneLinePerPiece) {
  auto f = PiecewiseFunction::from_utility(quad(0, 1, -1, 0, 0, 1, 2), {0, 10}, {0, 10});
  std::string text = dump(f);
  EXPECT_EQ(text.rfind("[0,10]×[0,10]  : ", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  std::string four = dump(four_pieces(0, 1, 4, 6, 1));
  EXPECT_EQ(std::count(four.begin(), four.end(), '\n'), 4);
}

}  // namespace
}  // namespace fdcop
