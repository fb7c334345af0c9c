#include "generators.hpp"
#include "shapehit/kwise.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace shapehit;

namespace {

// Exact k-wise count check over every index subset of size <= k.
void expect_kwise_uniform(const KWiseSpace& space) {
  const PointSet all = space.enumerate();
  ASSERT_EQ(all.size(), space.seed_count());
  const int n = space.n(), k = space.k(), m = space.m();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size > k) continue;
    std::map<std::vector<Symbol>, std::uint64_t> counts;
    for (std::size_t s = 0; s < all.size(); ++s) {
      std::vector<Symbol> pattern;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) pattern.push_back(all.point(s)[i]);
      ++counts[pattern];
    }
    std::uint64_t patterns = 1;
    for (int i = 0; i < size; ++i) patterns *= m;
    ASSERT_EQ(counts.size(), patterns) << "mask " << mask;
    for (const auto& [pattern, c] : counts) EXPECT_EQ(c, space.seed_count() / patterns);
  }
}

}  // namespace

TEST(GaloisField, FieldAxioms) {
  for (auto [p, e] : std::vector<std::pair<int, int>>{{2, 1}, {2, 3}, {3, 2}, {5, 1}, {7, 2}}) {
    GaloisField f(p, e);
    for (int a = 1; a < f.order(); ++a) {
      EXPECT_EQ(f.pow(a, f.order() - 1), 1);
      int inv_found = 0;
      for (int b = 1; b < f.order(); ++b) inv_found += f.mul(a, b) == 1;
      EXPECT_EQ(inv_found, 1);
      EXPECT_EQ(f.add(a, 0), a);
    }
    for (int a = 0; a < f.order(); ++a)
      for (int b = 0; b < f.order(); ++b)
        for (int c = 0; c < f.order(); c += 3) EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
  }
}

TEST(KWise, Examples) {
  KWiseSpace s(2, 3, 2);
  EXPECT_EQ(s.seed_count(), 16u);
  expect_kwise_uniform(s);
  KWiseSpace one(3, 1, 1);
  expect_kwise_uniform(one);
  KWiseSpace four(4, 4, 2);
  expect_kwise_uniform(four);
}

TEST(KWise, CompositeAndHigherK) {
  expect_kwise_uniform(KWiseSpace(6, 4, 2));
  expect_kwise_uniform(KWiseSpace(2, 6, 3));
  expect_kwise_uniform(KWiseSpace(3, 4, 3));
  expect_kwise_uniform(KWiseSpace(12, 3, 2));
  expect_kwise_uniform(KWiseSpace(5, 5, 4));
}

TEST(KWise, ZeroSeedIsConstant) {
  KWiseSpace s(5, 4, 3);
  Point x = s.sample(0);
  for (auto xi : x) EXPECT_EQ(xi, x[0]);
}

TEST(KWise, ConstantShiftIsUniformAcrossCoordinates) {
  // Seeds differing only in the constant coefficient differ by the same
  // field shift in every coordinate: for prime m the symbol difference is constant.
  KWiseSpace s(7, 5, 3);
  const std::uint64_t stride = s.seed_count() / 7;  // constant coefficient is most significant
  for (std::uint64_t base = 0; base < stride; base += 13) {
    Point a = s.sample(base);
    Point b = s.sample(base + 3 * stride);
    for (int i = 0; i < 5; ++i) EXPECT_EQ((b[i] - a[i] + 7) % 7, 3);
  }
}

TEST(KWise, SeedCap) {
  EXPECT_THROW(KWiseSpace(7, 10, 10, 1000), CapExceeded);
}

TEST(KWise, RectHitsExhaustively) {
  for (auto [m, n, eps] : std::vector<std::tuple<int, int, Rational>>{
           {2, 4, Rational(1, 16)}, {3, 3, Rational(1, 27)}, {2, 3, Rational(1, 2)}, {4, 2, Rational(1, 16)}}) {
    PointSet ps = rect_hs_kwise(m, n, eps);
    auto verdicts = verify_hitting(ps, gen::all_rectangles(m, n), eps, 1);
    EXPECT_EQ(count_failures(verdicts), 0u) << m << " " << n;
  }
}

TEST(KWise, RectEpsOne) {
  PointSet ps = rect_hs_kwise(3, 4, Rational(1));
  EXPECT_GE(ps.size(), 1u);
}

TEST(KWise, FoolingGapShrinksWithK) {
  // Max |Pr_uniform - Pr_space| over all rectangles of [2]^6.
  auto rects = gen::all_rectangles(2, 6);
  double prev = 2.0;
  for (int k : {2, 4, 6}) {
    KWiseSpace space(2, 6, k);
    PointSet pts = space.enumerate();
    double gap = 0;
    for (const auto& r : rects) {
      std::uint64_t hits = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) hits += evaluate(r, pts.point(i));
      Rational diff = acceptance_probability(r).exact_prob - Rational(BigInt(hits), BigInt(pts.size()));
      gap = std::max(gap, std::abs(to_double(diff)));
    }
    EXPECT_LE(gap, prev);
    prev = gap;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(KWise, PrgVariants) {
  auto ex = make_shape_prg(PrgKind::exhaustive, 2, 3, Rational(1, 4));
  EXPECT_TRUE(ex->range().same_points(full_domain(2, 3)));
  auto kw = make_shape_prg(PrgKind::kwise, 3, 3, Rational(1, 4));
  EXPECT_EQ(kw->range().size(), kw->seed_count());
}
