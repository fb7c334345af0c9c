#include "generators.hpp"
#include "shapehit/corpus.hpp"
#include "shapehit/threshold_hs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <iostream>

using namespace shapehit;

namespace {

// Subevent regression: Pr[Zbar = 0, Y >= theta - |L|] >= Pr[f] / n^{kSubeventKappa * c}.
constexpr double kSubeventKappa = 6.0;
// Eta product regression: prod eta_i >= n^{-kEtaKappa} whenever alpha_h >= n^{-2}.
constexpr double kEtaKappa = 3.0;

SetList prefix_sets(const std::vector<int>& sizes) {
  SetList sets;
  for (int s : sizes) {
    std::vector<int> a;
    for (int v = 1; v <= s; ++v) a.push_back(v);
    sets.push_back(a);
  }
  return sets;
}

bool walk_family(const WalkFamily& f) { return f.branch != HsBranch::rect; }
bool rect_family(const WalkFamily& f) { return f.branch == HsBranch::rect; }

double log_n(int n) { return std::log2(static_cast<double>(n)); }

// Random T+ thresholds with weight <= c log2 n and acceptance >= eps.
std::vector<Shape> low_weight_thresholds(SplitMix64& rng, int m, int n, int max_size, bool sparse, int count,
                                         const Rational& eps) {
  std::vector<Shape> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<int> sizes(n);
    for (auto& s : sizes) {
      s = static_cast<int>(rng.below(max_size + 1));
      if (sparse && rng.below(3)) s = 0;
    }
    const SetList sets = prefix_sets(sizes);
    if (to_double(weight_stats(sets, m).total_weight) > log_n(n)) continue;
    const int theta = 1 + static_cast<int>(rng.below(n));
    Shape thr = Threshold{m, sets, Direction::plus, theta}.to_shape();
    if (acceptance_probability(thr).exact_prob < eps) continue;
    out.push_back(std::move(thr));
  }
  return out;
}

}  // namespace

TEST(ThresholdConfig, RejectsConstantsBelowOne) {
  ThresholdHSConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.c3 = 0.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.guess_cap = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ThresholdForm, RecognisesBothDirections) {
  const SetList sets = prefix_sets({1, 2, 0});
  auto plus = threshold_form(Threshold{3, sets, Direction::plus, 2}.to_shape());
  ASSERT_TRUE(plus);
  EXPECT_EQ(plus->first, Direction::plus);
  EXPECT_EQ(plus->second, 2);
  auto minus = threshold_form(Threshold{3, sets, Direction::minus, 1}.to_shape());
  ASSERT_TRUE(minus);
  EXPECT_EQ(minus->first, Direction::minus);
  EXPECT_EQ(minus->second, 1);
  EXPECT_FALSE(threshold_form(Shape(3, sets, SymmetricFunction::exactly(3, 1))));
}

TEST(EtaGuesses, CountsAndBudget) {
  for (int t = 1; t <= 3; ++t)
    for (int budget = 0; budget <= 6; ++budget) {
      auto g = eta_guesses(t, budget, 1 << 20);
      BigInt expect = 1;
      for (int i = 1; i <= t; ++i) expect = expect * (budget + i) / i;
      EXPECT_EQ(BigInt(g.size()), expect);
      for (const auto& e : g) {
        int s = 0;
        for (int v : e) s += v;
        EXPECT_LE(s, budget);
      }
    }
  EXPECT_THROW(eta_guesses(3, 6, 10), CapExceeded);
}

TEST(HighWeight, VacuousAtDeskDefaults) {
  auto hs = build_high_weight(4, 64, ThresholdHSConfig{});
  EXPECT_TRUE(hs.empty());
  ASSERT_EQ(hs.notes().size(), 1u);
  EXPECT_NE(hs.notes()[0].find("high-vacuous"), std::string::npos);
  // Weight is at most n/4, below C log2 n = 24.
  const SetList sets = prefix_sets(std::vector<int>(64, 2));
  EXPECT_LT(to_double(weight_stats(sets, 4).total_weight), 4.0 * 6);
}

TEST(HighWeight, SingleCoordinateIsThePrgRange) {
  ThresholdHSConfig cfg;
  auto hs = build_high_weight(5, 1, cfg);
  ASSERT_EQ(hs.families().size(), 1u);
  EXPECT_EQ(hs.families()[0].buckets, 0);
  auto prg = make_shape_prg(cfg.prg, 5, 1, cfg.prg_alpha / 2);
  EXPECT_TRUE(hs.materialize(1 << 20).same_points(prg->range()));
}

TEST(HighWeight, HitsEveryHeavyThreshold) {
  ThresholdHSConfig cfg;
  cfg.C = 1.0;  // W >= log2 16 = 4 forces p_i = 1/2 on all 16 coordinates
  const int m = 4, n = 16;
  auto hs = build_high_weight(m, n, cfg);
  ASSERT_FALSE(hs.empty());
  EXPECT_EQ(hs.families()[0].buckets, 4);
  SplitMix64 rng(11);
  std::vector<Shape> corpus;
  while (corpus.size() < 40) {
    SetList sets(n);
    for (auto& s : sets) {
      const int a = 1 + static_cast<int>(rng.below(m));
      int b = 1 + static_cast<int>(rng.below(m - 1));
      if (b >= a) ++b;
      s = {std::min(a, b), std::max(a, b)};
    }
    const int theta = static_cast<int>(rng.below(n + 1));
    Shape thr = Threshold{m, sets, rng.below(2) ? Direction::plus : Direction::minus, theta}.to_shape();
    ASSERT_GE(to_double(weight_stats(thr).total_weight), cfg.C * log_n(n));
    if (acceptance_probability(thr).exact_prob >= Rational(1, n)) corpus.push_back(std::move(thr));
  }
  auto v = verify_thresholds(hs, corpus, Rational(1, n));
  EXPECT_EQ(count_failures(v), 0u);
}

TEST(HighWeight, ThetaBeyondChernoffRangeHasSmallProbability) {
  const int m = 2, n = 64;
  const double c = 1.0;
  SplitMix64 rng(5);
  int beyond = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> sizes(n);
    for (auto& s : sizes) s = static_cast<int>(rng.below(3));
    const SetList sets = prefix_sets(sizes);
    const WeightStats ws = weight_stats(sets, m);
    const double W = to_double(ws.total_weight);
    if (W < 4 * log_n(n) / 4) continue;
    const double bound = to_double(ws.mu) + 2 * std::sqrt(c * W * log_n(n));
    for (int theta = static_cast<int>(std::floor(bound)) + 1; theta <= n; theta += 3) {
      const Rational p = acceptance_probability(Threshold{m, sets, Direction::plus, theta}.to_shape()).exact_prob;
      EXPECT_LT(p, Rational(1, n));
      ++beyond;
    }
  }
  EXPECT_GT(beyond, 100);
}

TEST(HighWeight, BucketAdvantageHasPositiveProbability) {
  const int n = 256, t = 8;
  const double c = 1.0, C = 1.0;
  FractionalHashFamily family(n, t);
  SplitMix64 rng(17);
  double alpha_emp = 1.0;
  int buckets_checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Rational> p(n);
    for (auto& x : p) x = Rational(1 + static_cast<int>(rng.below(3)), 4);
    Rational W = 0;
    for (const auto& x : p) W += x * (1 - x);
    const auto parts = family.eval_all(family.member(rng.below(family.member_count())));
    for (int b = 1; b <= t; ++b) {
      std::vector<Rational> pb;
      Rational mu = 0, Wb = 0;
      for (int j = 0; j < n; ++j)
        if (parts[j] == b) {
          pb.push_back(p[j]);
          mu += p[j];
          Wb += p[j] * (1 - p[j]);
        }
      if (Wb < Rational(C) / 100) continue;
      const double target = to_double(mu) + 2 * std::sqrt(c * to_double(W) / t);
      const auto dist = count_distribution(pb);
      double tail = 0;
      for (std::size_t k = 0; k < dist.size(); ++k)
        if (static_cast<double>(k) > target) tail += to_double(dist[k]);
      EXPECT_GT(tail, 0.0);
      alpha_emp = std::min(alpha_emp, tail);
      ++buckets_checked;
    }
  }
  EXPECT_GT(buckets_checked, 50);
  std::cout << "recorded alpha_emp=" << alpha_emp << "\n";
}

TEST(LowSmall, PairwiseSpaceAloneHandlesOneBucket) {
  const int m = 4, n = 16;
  const PointSet pairwise = make_pairwise(m, n).enumerate();
  SplitMix64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> sizes(n);
    for (auto& s : sizes) s = rng.below(4) ? 0 : 1 + static_cast<int>(rng.below(2));
    const Shape sets = Threshold{m, prefix_sets(sizes), Direction::plus, 1}.to_shape();
    Rational mu = 0;
    for (int j = 0; j < n; ++j) mu += Rational(sizes[j], m);
    const Rational eta = bucket_hit_probabilities(pairwise, sets, std::vector<int>(n, 0), 1)[0];
    if (mu <= Rational(1, 2))
      EXPECT_GE(eta, mu / 2);
    else
      EXPECT_GE(eta, Rational(1, 8));
  }
}

TEST(LowSmall, DeskInstanceWalkFamiliesHitEverything) {
  const int m = 4, n = 16;
  auto hs = build_low_weight_small_sets(m, n, ThresholdHSConfig{});
  auto walks = hs.filtered(walk_family);
  SplitMix64 rng(29);
  auto corpus = low_weight_thresholds(rng, m, n, 2, true, 150, Rational(1, n));
  for (const auto& thr : corpus) {
    auto w = walks.find_threshold_hit(thr);
    ASSERT_TRUE(w) << "missed threshold";
    EXPECT_TRUE(evaluate(thr, *w));
  }
  EXPECT_EQ(count_failures(verify_thresholds(hs, corpus, Rational(1, n))), 0u);
}

TEST(LowSmall, MinusThresholdsHitByRectangleBranch) {
  const int m = 4, n = 8;
  auto rect = build_low_weight_small_sets(m, n, ThresholdHSConfig{}).filtered(rect_family);
  ASSERT_EQ(rect.families().size(), 1u);
  CorpusGrid grid;
  grid.m = m;
  grid.n = n;
  grid.sizes = {0, 1, 2};
  auto corpus = threshold_corpus(grid, {}, false, true);
  auto v = verify_thresholds(rect, corpus, Rational(1, n));
  std::size_t eligible = 0;
  for (const auto& x : v) eligible += x.eligible;
  EXPECT_GT(eligible, 10000u);
  EXPECT_EQ(count_failures(v), 0u);
}

TEST(LowSmall, EtaProductForGoodHashMembers) {
  const int m = 4, n = 16;
  const PointSet pairwise = make_pairwise(m, n).enumerate();
  SplitMix64 rng(31);
  double worst = 0;
  int checked = 0;
  for (int theta = 2; theta <= 3; ++theta) {
    PerfectHashFamily family(n, theta);
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<int> sizes(n);
      for (auto& s : sizes) s = rng.below(3) ? 0 : 1 + static_cast<int>(rng.below(2));
      const Shape sets = Threshold{m, prefix_sets(sizes), Direction::plus, theta}.to_shape();
      for (std::uint64_t h = 0; h < family.member_count(); h += 37) {
        std::vector<int> part = family.buckets(h);
        for (int& b : part) --b;
        std::vector<Rational> mu(theta, Rational(0));
        for (int j = 0; j < n; ++j) mu[part[j]] += Rational(sizes[j], m);
        Rational alpha = 1;
        for (const auto& x : mu) alpha *= x;
        if (to_double(alpha) < std::pow(n, -2.0)) continue;
        Rational prod = 1;
        for (const auto& e : bucket_hit_probabilities(pairwise, sets, part, theta)) prod *= e;
        const double kappa = -std::log2(to_double(prod)) / log_n(n);
        worst = std::max(worst, kappa);
        EXPECT_LE(kappa, kEtaKappa);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
  std::cout << "recorded kappa'=" << worst << "\n";
}

TEST(LowGeneral, ZeroBucketBranchIsTheRectangleSet) {
  const int m = 4, n = 6;
  ThresholdHSConfig cfg;
  auto hs = build_general_low_weight(m, n, cfg);
  auto rect = hs.filtered(rect_family);
  ASSERT_EQ(rect.families().size(), 1u);
  EXPECT_EQ(rect.families()[0].buckets, 0);
  CorpusGrid grid;
  grid.m = m;
  grid.n = n;
  const Rational eps(1, 1 << log_budget(cfg.c1 * cfg.c, n));
  int checked = 0;
  for (const auto& thr : threshold_corpus(grid, {}, true, false)) {
    if (canonical_t(thr) != 0) continue;
    // theta <= |L|: the rectangle with A_i on large coordinates suffices.
    SetList sets(n);
    for (int j = 0; j < n; ++j) {
      if (2 * thr.set_size(j) > m) {
        sets[j] = thr.set(j);
      } else {
        for (int a = 1; a <= m; ++a) sets[j].push_back(a);
      }
    }
    const Shape r = Rectangle{m, sets}.to_shape();
    if (acceptance_probability(r).exact_prob < eps) continue;
    auto w = rect.find_threshold_hit(thr);
    ASSERT_TRUE(w);
    ++checked;
  }
  EXPECT_GT(checked, 500);
}

TEST(LowGeneral, CanonicalRhoIsEnumerated) {
  const int m = 8, n = 16;
  ThresholdHSConfig cfg;
  const int budget = static_cast<int>(std::floor(cfg.c2 * cfg.c * log_n(n)));
  SplitMix64 rng(37);
  auto corpus = low_weight_thresholds(rng, m, n, 8, false, 200, Rational(1, n));
  int inside = 0;
  for (const auto& thr : corpus) {
    const int t = canonical_t(thr);
    if (t < 1 || t > 3) continue;
    PerfectHashFamily family(n, t);
    std::vector<int> part = family.buckets(rng.below(family.member_count()));
    for (int& b : part) --b;
    const auto rho = canonical_rho(thr, part, t);
    int sum = 0;
    for (int r : rho) sum += r;
    Rational mass = 0;
    for (int j = 0; j < n; ++j) {
      const Rational p(thr.set_size(j), m);
      mass += p <= Rational(1, 2) ? p : 1 - p;
    }
    EXPECT_LE(Rational(sum), mass + 2 * t);
    EXPECT_LE(mass, 2 * weight_stats(thr).total_weight);
    if (sum <= budget) {
      auto all = eta_guesses(t, budget, 1 << 20);
      EXPECT_NE(std::find(all.begin(), all.end(), rho), all.end());
      ++inside;
    }
  }
  EXPECT_GT(inside, 20);
}

TEST(LowGeneral, SubeventProbabilityBound) {
  const int m = 4, n = 6;
  CorpusGrid grid;
  grid.m = m;
  grid.n = n;
  int checked = 0;
  for (const auto& thr : threshold_corpus(grid, {}, true, false)) {
    if (to_double(weight_stats(thr).total_weight) > log_n(n)) continue;
    const Rational p = acceptance_probability(thr).exact_prob;
    if (p == 0) continue;
    const Rational sub = subevent_probability(thr);
    EXPECT_GE(to_double(sub) * std::pow(n, kSubeventKappa), to_double(p));
    ++checked;
  }
  EXPECT_GT(checked, 5000);
}

TEST(LowGeneral, DeskInstanceWalkFamiliesHitEverything) {
  const int m = 8, n = 16;
  auto hs = build_general_low_weight(m, n, ThresholdHSConfig{});
  auto walks = hs.filtered(walk_family);
  SplitMix64 rng(41);
  auto corpus = low_weight_thresholds(rng, m, n, 8, false, 80, Rational(1, n));
  for (const auto& thr : corpus) EXPECT_TRUE(walks.find_threshold_hit(thr)) << "missed threshold";
  EXPECT_EQ(count_failures(verify_thresholds(hs, corpus, Rational(1, n))), 0u);
}

TEST(ThresholdHS, EpsOneNeedsOnlyCertainThresholds) {
  auto hs = build_threshold_hs(2, 4, Rational(1), ThresholdHSConfig{});
  CorpusGrid grid;
  auto corpus = threshold_corpus(grid);
  auto v = verify_thresholds(hs, corpus, Rational(1));
  for (const auto& x : v)
    if (x.eligible) EXPECT_EQ(x.uniform_prob, 1);
  EXPECT_EQ(count_failures(v), 0u);
}

TEST(ThresholdHS, MatchesMaterializedVerdicts) {
  ThresholdHSConfig cfg;
  cfg.max_buckets = 2;
  auto hs = build_threshold_hs(2, 4, Rational(1, 4), cfg);
  const PointSet pts = hs.materialize(std::uint64_t{1} << 26, true);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NO_THROW(check_point(2, 4, pts.point(i)));
  CorpusGrid grid;
  grid.style = SetStyle::all;
  auto corpus = threshold_corpus(grid);
  auto implicit = verify_thresholds(hs, corpus, Rational(1, 4), 1, true);
  auto direct = verify_hitting(pts, corpus, Rational(1, 4));
  ASSERT_EQ(implicit.size(), direct.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(implicit[i].hit, direct[i].hit) << i;
    EXPECT_EQ(implicit[i].eligible, direct[i].eligible);
  }
}

TEST(ThresholdHS, FullDomainComparison) {
  const int m = 4, n = 6;
  const Rational eps(1, 36);
  ThresholdHSConfig cfg;
  cfg.c = 2.0;
  auto hs = build_threshold_hs(m, n, eps, cfg);
  CorpusGrid grid;
  grid.m = m;
  grid.n = n;
  auto corpus = threshold_corpus(grid);
  auto built = verify_thresholds(hs, corpus, eps);
  auto full = verify_hitting(full_domain(m, n), corpus, eps);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(built[i].eligible, full[i].eligible);
    if (built[i].eligible) EXPECT_EQ(built[i].hit, full[i].hit) << i;
  }
  EXPECT_EQ(count_failures(built), 0u);
}

TEST(ThresholdHS, CorpusSweepDeskInstance) {
  const int m = 4, n = 16;
  auto hs = build_threshold_hs(m, n, Rational(1, 16), ThresholdHSConfig{});
  SplitMix64 rng(43);
  std::vector<Shape> corpus;
  for (int i = 0; i < 300; ++i) {
    const Shape s = gen::random_shape(rng, m, n);
    const int theta = static_cast<int>(rng.below(n + 1));
    corpus.push_back(Threshold{m, s.sets(), rng.below(2) ? Direction::plus : Direction::minus, theta}.to_shape());
  }
  EXPECT_EQ(count_failures(verify_thresholds(hs, corpus, Rational(1, 16))), 0u);
}

TEST(ThresholdHS, UnionIsAMultiset) {
  ThresholdHSConfig cfg;
  cfg.c = 2.0;
  const Rational eps(1, 16);
  auto all = build_threshold_hs(3, 6, eps, cfg);
  BigInt parts = build_general_low_weight(3, 6, cfg).size() + build_low_weight_small_sets(3, 6, cfg).size() +
                 build_high_weight(3, 6, cfg).size();
  EXPECT_EQ(all.size(), parts);
  EXPECT_THROW(build_threshold_hs(3, 6, Rational(1, 1000), cfg), std::invalid_argument);
}

std::set<Point> point_set_of(const PointSet& pts) {
  std::set<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.emplace(pts.point(i).begin(), pts.point(i).end());
  return out;
}

TEST(ThresholdHS, DistinctPointsMatchEnumeration) {
  ThresholdHSConfig cfg;
  cfg.max_buckets = 2;
  for (const auto& [m, n] : {std::pair{2, 4}, std::pair{3, 4}, std::pair{2, 6}}) {
    auto hs = build_threshold_hs(m, n, Rational(1, 4), cfg);
    const PointSet enumerated = hs.materialize(std::uint64_t{1} << 26, true);
    const PointSet dp = hs.distinct_points(std::uint64_t{1} << 24);
    EXPECT_EQ(dp.size(), enumerated.size()) << m << " " << n;
    EXPECT_EQ(point_set_of(dp), point_set_of(enumerated)) << m << " " << n;
    for (auto branch : {HsBranch::high, HsBranch::low_small, HsBranch::low_general}) {
      auto part = hs.filtered([&](const WalkFamily& f) { return f.branch == branch; });
      EXPECT_EQ(point_set_of(part.distinct_points(std::uint64_t{1} << 24)),
                point_set_of(part.materialize(std::uint64_t{1} << 26, true)));
    }
  }
  auto walks = build_threshold_hs(2, 6, Rational(1, 4), cfg).filtered([](const WalkFamily& f) { return f.buckets > 0; });
  ASSERT_GT(walks.families().size(), 0u);
  EXPECT_THROW(walks.distinct_points(1), CapExceeded);
}
