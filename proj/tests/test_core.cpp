#include "generators.hpp"
#include "shapehit/core.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace shapehit;

TEST(Core, EvaluateExamples) {
  Shape and2(2, {{1}, {1}}, SymmetricFunction(2, {2}));
  EXPECT_TRUE(evaluate(and2, Point{1, 1}));
  EXPECT_FALSE(evaluate(and2, Point{1, 2}));
  Shape s(3, {{1, 2}, {1, 2}, {1, 2}}, SymmetricFunction(3, {0, 3}));
  EXPECT_TRUE(evaluate(s, Point{3, 3, 3}));
}

TEST(Core, CountAccepting) {
  Shape s(2, {{1}, {1}}, SymmetricFunction::all_of(2));
  EXPECT_EQ(count_accepting(s, Point{1, 1}), 2);
  EXPECT_EQ(count_accepting(s, Point{2, 2}), 0);
  Shape t(3, {{1}, {2}, {3}}, SymmetricFunction::all_of(3));
  EXPECT_EQ(count_accepting(t, Point{1, 2, 1}), 2);
}

TEST(Core, WeightStatsExamples) {
  auto ws = weight_stats({{1}, {1, 2}}, 4);
  EXPECT_EQ(ws.p[0], Rational(1, 4));
  EXPECT_EQ(ws.p[1], Rational(1, 2));
  EXPECT_EQ(ws.w[0], Rational(3, 16));
  EXPECT_EQ(ws.w[1], Rational(1, 4));
  EXPECT_EQ(ws.total_weight, Rational(7, 16));
  EXPECT_EQ(ws.small, (std::vector<int>{0, 1}));

  auto full = weight_stats({{1, 2}}, 2);
  EXPECT_EQ(full.p[0], 1);
  EXPECT_EQ(full.w[0], 0);
  EXPECT_EQ(full.large, (std::vector<int>{0}));
  auto empty = weight_stats({{}}, 2);
  EXPECT_EQ(empty.p[0], 0);
  EXPECT_EQ(empty.w[0], 0);
}

TEST(Core, WeightStatsInvariants) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int n = 1 + static_cast<int>(rng.below(8));
    auto sets = gen::random_sets(rng, m, n);
    auto a = weight_stats(sets, m);
    auto b = weight_stats(sets, m);
    Rational total = 0;
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(a.p[i] + a.q[i], 1);
      EXPECT_LE(a.w[i], Rational(1, 4));
      total += a.w[i];
    }
    EXPECT_EQ(total, a.total_weight);
    EXPECT_EQ(a.small.size() + a.large.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(a.total_weight, b.total_weight);
    EXPECT_EQ(a.mu, b.mu);
  }
}

TEST(Core, EvaluateMatchesCount) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(5));
    const int n = 1 + static_cast<int>(rng.below(7));
    Shape s = gen::random_shape(rng, m, n);
    Point x = gen::random_point(rng, m, n);
    EXPECT_EQ(evaluate(s, x), s.sym().accepts(count_accepting(s, x)));
  }
}

TEST(Core, ThresholdConsistency) {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(2));
    const int n = 1 + static_cast<int>(rng.below(4));
    auto sets = gen::random_sets(rng, m, n);
    for (int theta = 0; theta <= n; ++theta) {
      Shape plus = Threshold{m, sets, Direction::plus, theta}.to_shape();
      Shape minus = Threshold{m, sets, Direction::minus, theta}.to_shape();
      for_each_string(m, n, [&](std::span<const Symbol> x) {
        const int c = count_accepting(plus, x);
        EXPECT_EQ(evaluate(plus, x), c >= theta);
        EXPECT_EQ(evaluate(minus, x), c <= theta);
        return true;
      });
    }
  }
}

TEST(Core, RectangleIsAnd) {
  Shape r = Rectangle{3, {{1}, {2, 3}}}.to_shape();
  EXPECT_EQ(r.sym().accept_counts(), (std::vector<int>{2}));
}

TEST(Core, RejectsBadInput) {
  EXPECT_THROW(Shape(2, {{3}}, SymmetricFunction::all_of(1)), std::invalid_argument);
  EXPECT_THROW(SymmetricFunction(2, {3}), std::invalid_argument);
  EXPECT_THROW(Threshold({2, {{1}}, Direction::plus, 2}).to_shape(), std::invalid_argument);
  PointSet ps(2, 2);
  EXPECT_THROW(ps.push_back(Point{1, 3}), std::invalid_argument);
  EXPECT_THROW(ps.push_back(Point{1}), std::invalid_argument);
}

TEST(Core, ForEachStringOrder) {
  std::vector<Point> seen;
  for_each_string(2, 2, [&](std::span<const Symbol> x) {
    seen.emplace_back(x.begin(), x.end());
    return true;
  });
  EXPECT_EQ(seen, (std::vector<Point>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
  EXPECT_EQ(domain_size(3, 4), 81u);
  EXPECT_THROW(domain_size(10, 10, 1000), CapExceeded);
}

TEST(Core, PointSetDistinctAndBlocks) {
  PointSet ps(2, 2, "test");
  ps.begin_block("a");
  ps.push_back(Point{1, 2});
  ps.push_back(Point{1, 2});
  ps.begin_block("b");
  ps.push_back(Point{2, 2});
  EXPECT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps.label_of(1), "a");
  EXPECT_EQ(ps.label_of(2), "b");
  auto d = ps.distinct();
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(Point(d.point(1).begin(), d.point(1).end()), (Point{2, 2}));
}

TEST(Core, TextRoundTrip) {
  SplitMix64 rng(14);
  std::vector<Shape> corpus;
  for (int i = 0; i < 10; ++i) corpus.push_back(gen::random_shape(rng, 3, 4));
  std::stringstream ss;
  write_corpus(ss, corpus);
  EXPECT_EQ(read_corpus(ss), corpus);

  PointSet ps(3, 4, "p");
  for (int i = 0; i < 5; ++i) ps.push_back(gen::random_point(rng, 3, 4));
  std::stringstream ps_io;
  write_pointset(ps_io, ps);
  EXPECT_TRUE(read_pointset(ps_io).same_points(ps));
}
