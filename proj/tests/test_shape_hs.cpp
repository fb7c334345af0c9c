#include "generators.hpp"
#include "shapehit/corpus.hpp"
#include "shapehit/shape_hs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace shapehit;

namespace {

int count_of(const Shape& s, std::span<const Symbol> x) { return count_accepting(s, x); }

bool accepted_by_any(const PointSet& pts, const Shape& s) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (evaluate(s, pts.point(i))) return true;
  return false;
}

}  // namespace

TEST(Normalize, NoOpInsideTheRange) {
  auto p = normalize(4, 8, Rational(1, 8), 1.0);
  EXPECT_EQ(p.n_padded, 8);
  EXPECT_EQ(p.threshold_eps, Rational(1, 72));
  EXPECT_GE(p.c_effective * std::log2(8.0) + 1e-9, std::log2(72.0));
}

TEST(Normalize, LargeAlphabetSquaresN) {
  EXPECT_EQ(normalize(16, 4, Rational(1, 2), 1.0).n_padded, 16);
  EXPECT_EQ(normalize(256, 4, Rational(1, 2), 2.0).n_padded, 16);
  EXPECT_EQ(normalize(17, 4, Rational(1, 2), 1.0).n_padded, 17);
}

TEST(Normalize, SmallEpsSquaresN) {
  EXPECT_EQ(normalize(2, 4, Rational(1, 16), 1.0).n_padded, 16);
  EXPECT_EQ(normalize(2, 4, Rational(1, 256), 2.0).n_padded, 16);
}

TEST(Normalize, InvariantsOnRandomParameters) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(300));
    const int n = 1 + static_cast<int>(rng.below(40));
    const Rational eps(1, 1 + static_cast<int>(rng.below(5000)));
    const double c = 0.5 + static_cast<double>(rng.below(8)) / 4;
    const auto p = normalize(m, n, eps, c);
    const double lg = std::log2(static_cast<double>(p.n_padded));
    EXPECT_GE(p.n_padded, n);
    EXPECT_GE(c * lg + 1e-9, std::log2(static_cast<double>(m)));
    EXPECT_GE(c * lg + 1e-9, -std::log2(to_double(eps)));
    EXPECT_GE(p.c_effective * lg + 1e-9, -std::log2(to_double(p.threshold_eps)));
    if (p.n_padded > std::max(n, 2)) {
      const double lg1 = std::log2(static_cast<double>(p.n_padded - 1));
      EXPECT_TRUE(c * lg1 < std::log2(static_cast<double>(m)) - 1e-9 ||
                  c * lg1 < -std::log2(to_double(eps)) - 1e-9);
    }
  }
  EXPECT_THROW(normalize(0, 3, Rational(1, 2), 1.0), std::invalid_argument);
  EXPECT_THROW(normalize(2, 3, Rational(0), 1.0), std::invalid_argument);
}

TEST(Interpolate, FlipsOneCoordinateAtATime) {
  const Point y{1, 2, 3}, z{4, 5, 6};
  const std::vector<Point> expect{{1, 2, 3}, {4, 2, 3}, {4, 5, 3}, {4, 5, 6}};
  EXPECT_EQ(interpolate(y, z), expect);
  EXPECT_EQ(interpolate(y, y), std::vector<Point>(4, y));
  const Point a{7}, b{9};
  EXPECT_EQ(interpolate(a, b), (std::vector<Point>{a, b}));
  EXPECT_THROW(interpolate(y, a), std::invalid_argument);
}

TEST(Interpolate, CountChangesByAtMostOne) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const int n = 1 + static_cast<int>(rng.below(12));
    const Shape s = gen::random_shape(rng, m, n);
    const Point y = gen::random_point(rng, m, n), z = gen::random_point(rng, m, n);
    const auto seq = interpolate(y, z);
    ASSERT_EQ(seq.size(), static_cast<std::size_t>(n + 1));
    std::vector<bool> seen(n + 1, false);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      seen[count_of(s, seq[i])] = true;
      if (i > 0) EXPECT_LE(std::abs(count_of(s, seq[i]) - count_of(s, seq[i - 1])), 1);
    }
    const int a = std::min(count_of(s, y), count_of(s, z)), b = std::max(count_of(s, y), count_of(s, z));
    for (int w = a; w <= b; ++w) EXPECT_TRUE(seen[w]);
  }
}

TEST(PadShape, PreservesVerdicts) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(3));
    const int n = 1 + static_cast<int>(rng.below(6));
    const int np = n + static_cast<int>(rng.below(5));
    const Shape s = gen::random_shape(rng, m, n);
    const Shape padded = pad_shape(s, np);
    Point x = gen::random_point(rng, m, np);
    EXPECT_EQ(evaluate(padded, x), evaluate(s, std::span<const Symbol>(x.data(), n)));
  }
  const Shape t = Threshold{3, {{1}, {1, 2}}, Direction::plus, 1}.to_shape();
  const Shape pt = pad_shape(t, 5);
  EXPECT_EQ(pt.sym(), SymmetricFunction::at_least(5, 4));
  EXPECT_EQ(acceptance_probability(pt).exact_prob, acceptance_probability(t).exact_prob);
}

TEST(ShapeHS, SizeAccountingAndDiagonal) {
  ShapeHSConfig cfg;
  cfg.threshold.max_buckets = 2;
  auto hs = build_shape_hs(2, 3, Rational(1, 2), 1.0, cfg);
  const int np = hs.params().n_padded;
  EXPECT_EQ(hs.size(), BigInt(np + 1) * hs.base().size() * hs.base().size());
  const PointSet base = hs.base().materialize(std::uint64_t{1} << 22, true);
  const PointSet all = hs.materialize(false);
  EXPECT_EQ(all.size(), static_cast<std::size_t>(np + 1) * base.size() * base.size());
  const PointSet distinct = hs.materialize(true);
  std::set<Point> out;
  for (std::size_t i = 0; i < distinct.size(); ++i) out.emplace(distinct.point(i).begin(), distinct.point(i).end());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto y = base.point(i);
    EXPECT_TRUE(out.count(Point(y.begin(), y.begin() + 3)));
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    EXPECT_TRUE(out.count(Point(all.point(i).begin(), all.point(i).end())));
}

TEST(ShapeHS, IntermediateCountBetweenThresholdHits) {
  const int m = 3, n = 6;
  auto hs = build_shape_hs(m, n, Rational(1, 6), 1.0);
  SplitMix64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const SetList sets = gen::random_sets(rng, m, n);
    const int w = static_cast<int>(rng.below(n + 1));
    const Shape minus = Threshold{m, sets, Direction::minus, w}.to_shape();
    const Shape plus = Threshold{m, sets, Direction::plus, w}.to_shape();
    const Shape pm = pad_shape(minus, hs.params().n_padded), pp = pad_shape(plus, hs.params().n_padded);
    if (acceptance_probability(pm).exact_prob < hs.params().threshold_eps ||
        acceptance_probability(pp).exact_prob < hs.params().threshold_eps)
      continue;
    auto y = hs.base().find_threshold_hit(pm);
    auto z = hs.base().find_threshold_hit(pp);
    ASSERT_TRUE(y && z);
    const Shape exact = Shape(m, sets, SymmetricFunction::exactly(n, w));
    bool found = false;
    for (const Point& x : interpolate(*y, *z)) found |= evaluate(exact, std::span<const Symbol>(x.data(), n));
    EXPECT_TRUE(found);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(ShapeHS, ImplicitSearchMatchesMaterializedSet) {
  ShapeHSConfig cfg;
  cfg.threshold.max_buckets = 2;
  const int m = 2, n = 3;
  const auto full = build_shape_hs(m, n, Rational(1, 4), 1.0, cfg);
  const ShapeHittingSet rect(full.params(), full.base().filtered([](const WalkFamily& f) {
    return f.branch == HsBranch::rect;
  }), cfg);
  CorpusGrid grid;
  grid.m = m;
  grid.n = n;
  grid.style = SetStyle::all;
  const auto corpus = shape_corpus(grid, AcceptPattern::all);
  int misses = 0;
  for (const ShapeHittingSet* hs : {&full, &rect}) {
    const PointSet pts = hs->materialize(true);
    for (const Shape& s : corpus) {
      auto w = hs->find_hit(s);
      ASSERT_EQ(w.has_value(), accepted_by_any(pts, s));
      if (w)
        EXPECT_TRUE(evaluate(s, *w));
      else
        ++misses;
    }
  }
  EXPECT_GT(misses, 0);
  const Shape never(m, SetList(n), SymmetricFunction(n, {}));
  EXPECT_FALSE(full.find_hit(never));
}

TEST(ShapeHS, DeskInstanceHitsShapeCorpus) {
  const int m = 3, n = 6;
  const Rational eps(1, 6);
  auto hs = build_shape_hs(m, n, eps, 1.0);
  CorpusGrid grid;
  grid.m = m;
  grid.n = n;
  auto corpus = shape_corpus(grid, AcceptPattern::singletons);
  ASSERT_GE(corpus.size(), 10000u);
  auto v = verify_shapes(hs, corpus, eps, 4);
  std::size_t eligible = 0;
  for (const auto& x : v) eligible += x.eligible;
  EXPECT_GT(eligible, 1000u);
  EXPECT_EQ(count_failures(v), 0u);
}

TEST(ShapeHS, RandomShapesWithIntervalAcceptSets) {
  const int m = 4, n = 5;
  const Rational eps(1, 25);
  auto hs = build_shape_hs(m, n, eps, 2.0);
  EXPECT_EQ(hs.params().n_padded, 5);
  SplitMix64 rng(13);
  std::vector<Shape> corpus;
  for (int i = 0; i < 3000; ++i) corpus.push_back(gen::random_shape(rng, m, n));
  EXPECT_EQ(count_failures(verify_shapes(hs, corpus, eps, 4)), 0u);
}

TEST(ShapeHS, PaddedCoordinatesAreProjectedAway) {
  auto hs = build_shape_hs(2, 2, Rational(1, 8), 1.0);
  EXPECT_EQ(hs.params().n_padded, 8);
  EXPECT_EQ(hs.n(), 2);
  const PointSet pts = hs.materialize(true);
  EXPECT_EQ(pts.n(), 2);
  EXPECT_EQ(pts.size(), pts.distinct().size());
  CorpusGrid grid;
  grid.m = 2;
  grid.n = 2;
  grid.style = SetStyle::all;
  const auto corpus = shape_corpus(grid, AcceptPattern::all);
  const auto v = verify_shapes(hs, corpus, Rational(1, 8));
  EXPECT_EQ(count_failures(v), 0u);
  EXPECT_EQ(count_failures(verify_hitting(pts, corpus, Rational(1, 8))), 0u);
  for (const auto& x : v)
    if (x.witness) EXPECT_EQ(x.witness->size(), 2u);
}
