#include "shapehit/hashing.hpp"
#include "shapehit/oracle.hpp"
#include "shapehit/recorded.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace shapehit;

namespace {

std::vector<std::vector<int>> subsets(int n, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(t);
  std::iota(c.begin(), c.end(), 1);
  while (true) {
    out.push_back(c);
    int i = t - 1;
    while (i >= 0 && c[i] == n - t + i + 1) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < t; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

using recorded::kFracK;
using recorded::kFracKappa;

void expect_fraction_bound(const FractionalCertificate& cert, int t) {
  EXPECT_GT(cert.good, 0u);
  ASSERT_TRUE(cert.witness.has_value());
  EXPECT_GE(to_double(cert.fraction), 1.0 / (kFracK * std::pow(2.0, kFracKappa * t)));
}

}  // namespace

TEST(PerfectHash, SingleBucket) {
  PerfectHashFamily f(5, 1);
  EXPECT_EQ(f.member_count(), 1u);
  for (int j = 1; j <= 5; ++j) EXPECT_EQ(f.eval(0, j), 1);
  std::vector<int> s{3};
  EXPECT_EQ(f.separation_fraction(s), 1);
}

TEST(PerfectHash, ExactSeparationFractions) {
  PerfectHashFamily f63(6, 3);
  for (const auto& s : subsets(6, 3)) EXPECT_EQ(f63.separation_fraction(s), Rational(2, 9));
  PerfectHashFamily f82(8, 2);
  for (const auto& s : subsets(8, 2)) EXPECT_EQ(f82.separation_fraction(s), Rational(1, 2));
  EXPECT_EQ(PerfectHashFamily::exact_fraction(3), Rational(2, 9));
}

TEST(PerfectHash, EverySubsetSeparated) {
  for (auto [n, t] : std::vector<std::pair<int, int>>{{7, 3}, {9, 4}, {5, 5}, {10, 2}}) {
    PerfectHashFamily f(n, t);
    const double bound = PerfectHashFamily::kBeta * std::pow(PerfectHashFamily::kGamma, -t);
    for (const auto& s : subsets(n, t)) {
      auto frac = f.separation_fraction(s);
      EXPECT_GT(frac, 0);
      EXPECT_GE(to_double(frac), bound);
    }
  }
  EXPECT_THROW(PerfectHashFamily(3, 4), std::invalid_argument);
}

TEST(FractionalHash, SingleBucketFamily) {
  FractionalHashFamily f(12, 1);
  for (std::uint64_t i = 0; i < f.member_count(); i += 7)
    for (int b : f.eval_all(f.member(i))) EXPECT_EQ(b, 1);
  auto cert = certify_fractional(f, std::vector<Rational>(12, Rational(1)));
  EXPECT_EQ(cert.fraction, 1);
}

TEST(FractionalHash, TotalAndDisjoint) {
  FractionalConfig cfg;
  cfg.excess = 1;
  FractionalHashFamily f(10, 2, cfg);
  for (std::uint64_t i = 0; i < f.member_count(); i += 9973) {
    auto h = f.eval_all(f.member(i));
    ASSERT_EQ(h.size(), 10u);
    for (int b : h) {
      EXPECT_GE(b, 1);
      EXPECT_LE(b, 2);
    }
  }
}

TEST(FractionalHash, FullImageInIPrime) {
  FractionalConfig cfg;
  cfg.top_buckets = 3;
  FractionalHashFamily f(9, 3, cfg);
  ASSERT_EQ(f.guesses().size(), 1u);
  for (std::uint64_t i = 0; i < f.member_count(); ++i) {
    auto m = f.member(i);
    Point h1 = f.top_level().sample(m.h1_seed);
    auto h = f.eval_all(m);
    for (int j = 0; j < 9; ++j) EXPECT_EQ(h[j], h1[j]);
  }
}

TEST(FractionalHash, MatchesIndependentRecomputation) {
  FractionalConfig cfg;
  cfg.excess = 1;
  FractionalHashFamily f(10, 2, cfg);
  const ExpanderGraph& g = *f.walk_graph();
  for (std::uint64_t i = 3; i < f.member_count(); i += 7919) {
    auto m = f.member(i);
    const auto& guess = f.guesses()[m.guess];
    Point h1 = KWiseSpace(f.top_buckets(), 10, 2).sample(m.h1_seed);
    // Walk vertices, one per second-level bucket.
    std::vector<std::uint64_t> vertex;
    std::uint64_t v = m.walk.start;
    for (auto port : m.walk.ports) vertex.push_back(v = g.neighbor(v, port));
    std::vector<int> expected(10);
    for (int j = 0; j < 10; ++j) {
      const int b = h1[j] - 1;
      auto pos = std::find(guess.iprime.begin(), guess.iprime.end(), b);
      if (pos != guess.iprime.end()) {
        expected[j] = static_cast<int>(pos - guess.iprime.begin()) + 1;
        continue;
      }
      int offset = 0;
      for (int i2 = 0; i2 < b; ++i2)
        if (std::find(guess.iprime.begin(), guess.iprime.end(), i2) == guess.iprime.end()) offset += guess.y[i2];
      int local = 1;
      auto step = std::find(guess.steps.begin(), guess.steps.end(), b);
      if (step != guess.steps.end()) {
        KWiseSpace level2(guess.y[b], 10, 2);
        local = level2.sample(vertex[step - guess.steps.begin()] % level2.seed_count())[j];
      }
      expected[j] = (offset + local - 1) % 2 + 1;
    }
    EXPECT_EQ(f.eval_all(m), expected) << "member " << i;
    for (int j = 1; j <= 10; ++j) EXPECT_EQ(f.eval(m, j), expected[j - 1]);
  }
}

TEST(FractionalHash, UniformLoad) {
  FractionalHashFamily f(40, 2);
  auto cert = certify_fractional(f, std::vector<Rational>(40, Rational(1, 2)));
  expect_fraction_bound(cert, 2);
  auto w = f.eval_all(f.member(*cert.witness));
  std::vector<Rational> load(3);
  for (int j = 0; j < 40; ++j) load[w[j]] += Rational(1, 2);
  auto [lo, hi] = fractional_load_bounds(std::vector<Rational>(40, Rational(1, 2)), 2);
  for (int i = 1; i <= 2; ++i) {
    EXPECT_GE(load[i], lo);
    EXPECT_LE(load[i], hi);
  }
}

TEST(FractionalHash, ZCorpusSharedConstants) {
  std::vector<std::pair<int, std::vector<Rational>>> corpus;
  {
    std::vector<Rational> z(40, Rational(2, 3));  // heavy block of ten full coordinates
    for (int i = 0; i < 10; ++i) z[i] = 1;
    corpus.emplace_back(3, z);
  }
  {
    std::vector<Rational> z(30, Rational(9, 14));  // two-scale: t full coordinates
    z[0] = z[1] = 1;
    corpus.emplace_back(2, z);
  }
  {
    std::vector<Rational> z(36);  // geometric tail on top of a floor
    Rational v = 1;
    for (auto& e : z) {
      e = Rational(3, 4) + v / 4;
      if (v > Rational(1, 1024)) v /= 2;
    }
    corpus.emplace_back(2, z);
  }
  corpus.emplace_back(4, std::vector<Rational>(40, Rational(1)));
  corpus.emplace_back(3, std::vector<Rational>(36, Rational(5, 6)));
  for (const auto& [t, z] : corpus) {
    FractionalHashFamily f(static_cast<int>(z.size()), t);
    expect_fraction_bound(certify_fractional(f, z, 2), t);
  }
}

TEST(FractionalHash, SecondLevelFamily) {
  FractionalConfig cfg;
  cfg.excess = 1;
  FractionalHashFamily f(10, 1, cfg);
  EXPECT_TRUE(f.walk_graph().has_value());
  std::vector<Rational> z(10, Rational(1));
  auto cert = certify_fractional(f, z);
  expect_fraction_bound(cert, 1);
  // Loads decompose as I' bucket plus folded second-level cells.
  for (std::uint64_t i = 0; i < f.member_count(); i += 65537) {
    auto m = f.member(i);
    EXPECT_LE(max_cell_load(f, m, z), 20);
  }
}

TEST(FractionalHash, RejectsLightZ) {
  FractionalHashFamily f(12, 2);
  EXPECT_THROW(certify_fractional(f, std::vector<Rational>(12, Rational(1))), std::invalid_argument);
  EXPECT_THROW(certify_fractional(f, std::vector<Rational>(12, Rational(3, 2))), std::invalid_argument);
}

TEST(FractionalHash, MemberCountRecorded) {
  for (int t : {1, 2, 3}) {
    FractionalHashFamily f(12 * t, t);
    EXPECT_EQ(f.member_count(), f.top_level().seed_count() * f.members_per_top_seed());
    EXPECT_NE(f.label().find("members=" + std::to_string(f.member_count())), std::string::npos);
  }
}

TEST(TopLevel, MediumBucketsGivenE1) {
  // B = 10t exactly, z uniform with sum 10t.
  for (auto [n, t] : std::vector<std::pair<int, int>>{{20, 1}, {12, 1}}) {
    KWiseSpace h1(10 * t, n, 2);
    std::vector<Rational> z(n, Rational(10 * t, n));
    auto st = top_level_stats(h1, z, t);
    EXPECT_GE(2 * st.e1_seeds, st.seeds);
    EXPECT_GE(2 * st.e1_medium_seeds, st.e1_seeds);
    EXPECT_GE(st.min_medium_given_e1, 2 * t);
  }
}

TEST(TopLevel, SkewedZ) {
  KWiseSpace h1(10, 16, 2);
  std::vector<Rational> z(16, Rational(1, 2));
  for (int i = 0; i < 6; ++i) z[i] = 1;
  auto st = top_level_stats(h1, z, 1);
  EXPECT_GE(2 * st.e1_seeds, st.seeds);
  EXPECT_GE(st.min_medium_given_e1, 2);
}

TEST(PairwiseMass, RandomAlpha) {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Rational> a(1 + rng.below(8));
    for (auto& e : a) e = Rational(BigInt(rng.below(17)), BigInt(16));
    EXPECT_TRUE(pairwise_mass_implication(a));
  }
  EXPECT_TRUE(pairwise_mass_implication({Rational(1), Rational(1), Rational(1, 2)}));
  EXPECT_THROW(pairwise_mass_implication({Rational(2)}), std::invalid_argument);
}
