#include "criteria.hpp"

#include "shapehit/corpus.hpp"
#include "shapehit/oracle.hpp"
#include "shapehit/recorded.hpp"
#include "shapehit/rect_hs.hpp"
#include "shapehit/shape_hs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace shapehit::acceptance {

namespace {

constexpr int kInterpolationTriples = 10000;
constexpr int kOracleShapes = 1000;
constexpr std::uint64_t kOracleDomainCap = std::uint64_t{1} << 16;
constexpr int kMonteCarloShapes = 100;
constexpr std::uint64_t kMonteCarloSamples = 100000;
constexpr double kMonteCarloSigmas = 4.0;
constexpr std::size_t kMinShapeCorpus = 10000;
constexpr double kShapeC = 2.0;

SetList random_sets(SplitMix64& rng, int m, int n) {
  SetList sets(n);
  for (auto& a : sets)
    for (int s = 1; s <= m; ++s)
      if (rng.below(2)) a.push_back(s);
  return sets;
}

Point random_point(SplitMix64& rng, int m, int n) {
  Point x(n);
  for (auto& v : x) v = static_cast<Symbol>(1 + rng.below(m));
  return x;
}

Shape random_shape(SplitMix64& rng, int m, int n) {
  std::vector<int> accept;
  for (int w = 0; w <= n; ++w)
    if (rng.below(2)) accept.push_back(w);
  return Shape(m, random_sets(rng, m, n), SymmetricFunction(n, accept));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Outcome strong_rect_regression(int) {
  using recorded::kRectKappa;
  StrongRectConfig cfg;
  cfg.m = 16;
  cfg.n = 16;
  cfg.c = 1.0;
  cfg.rho = 10;
  const StrongRectSet set = build_strong_rect(cfg);
  const SrectEligibility eligible{cfg.c, cfg.rho};
  std::set<std::vector<int>> seen;
  std::size_t checked = 0;
  double worst = INFINITY;
  for (int small : {1, 4, 8, 12, 15}) {
    CorpusGrid grid;
    grid.m = 16;
    grid.n = 16;
    grid.sizes = {small, 16};
    for (const Shape& rect : rectangle_corpus(grid, eligible)) {
      std::vector<int> sizes(16);
      for (int j = 0; j < 16; ++j) sizes[j] = rect.set_size(j);
      if (!seen.insert(sizes).second) continue;
      const Rational p = acceptance_probability(rect).exact_prob;
      const double ratio = to_double(set.accept_fraction(rect)) * std::pow(2.0, kRectKappa * cfg.rho) / to_double(p);
      worst = std::min(worst, ratio);
      ++checked;
    }
  }
  std::ostringstream os;
  os << checked << " eligible rectangles (m=n=16, c=1, rho=10), kappa=" << kRectKappa
     << ", min Pr_S * 2^(kappa rho) / p = " << worst;
  return {checked > 0 && worst >= 1.0, os.str()};
}

Outcome shape_hitting_end_to_end(int jobs) {
  bool ok = true;
  std::ostringstream os;
  for (auto [m, n] : {std::pair{2, 8}, std::pair{3, 6}, std::pair{4, 6}}) {
    CorpusGrid prefix;
    prefix.m = m;
    prefix.n = n;
    std::vector<Shape> corpus = shape_corpus(prefix, AcceptPattern::singletons);
    CorpusGrid single = prefix;
    single.sizes = {1};
    single.style = SetStyle::all;
    for (auto& s : shape_corpus(single, AcceptPattern::singletons)) corpus.push_back(std::move(s));
    for (const Rational& eps : {Rational(1, 4), Rational(1, n), Rational(1, n * n)}) {
      const auto t0 = std::chrono::steady_clock::now();
      const NormalizedParams np = normalize(m, n, eps, kShapeC);
      const ShapeHittingSet hs = build_shape_hs(m, n, eps, kShapeC);
      const auto verdicts = verify_shapes(hs, corpus, eps, jobs);
      std::size_t eligible = 0, misses = 0;
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        eligible += v.eligible;
        if (v.eligible && (!v.witness || !evaluate(corpus[i], *v.witness))) ++misses;
      }
      ok = ok && misses == 0 && corpus.size() >= kMinShapeCorpus && np.eps == eps && np.n_padded == n;
      os << "(" << m << "," << n << ",eps=" << to_string(eps) << "): " << corpus.size() << " shapes, " << eligible
         << " eligible, " << misses << " misses, " << static_cast<int>(seconds_since(t0)) << "s; ";
    }
  }
  return {ok, os.str()};
}

Outcome interpolation_lemma(int) {
  SplitMix64 rng(0x1e7);
  int failures = 0;
  for (int trial = 0; trial < kInterpolationTriples; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const int n = 1 + static_cast<int>(rng.below(12));
    const Shape sets(m, random_sets(rng, m, n), SymmetricFunction(n, {}));
    const Point y = random_point(rng, m, n), z = random_point(rng, m, n);
    const auto path = interpolate(y, z);
    bool ok = path.size() == static_cast<std::size_t>(n + 1) && path.front() == y && path.back() == z;
    std::set<int> counts;
    for (std::size_t i = 0; ok && i < path.size(); ++i) {
      const int c = count_accepting(sets, path[i]);
      counts.insert(c);
      if (i > 0) ok = std::abs(c - count_accepting(sets, path[i - 1])) <= 1;
    }
    const int a = count_accepting(sets, y), b = count_accepting(sets, z);
    for (int c = std::min(a, b); ok && c <= std::max(a, b); ++c) ok = counts.count(c) > 0;
    failures += !ok;
  }
  std::ostringstream os;
  os << kInterpolationTriples << " random (sets, y, z) triples, " << failures << " failures";
  return {failures == 0, os.str()};
}

Outcome oracle_consistency(int) {
  SplitMix64 rng(0x0c1e);
  int dp_mismatch = 0, mc_outside = 0;
  for (int trial = 0; trial < kOracleShapes; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(7));
    int max_n = 0;
    while (domain_size(m, max_n + 1, UINT64_MAX) <= kOracleDomainCap) ++max_n;
    const int n = 1 + static_cast<int>(rng.below(max_n));
    const Shape s = random_shape(rng, m, n);
    std::uint64_t accepted = 0, total = 0;
    for_each_string(m, n, [&](std::span<const Symbol> x) {
      accepted += evaluate(s, x);
      ++total;
      return true;
    });
    dp_mismatch += acceptance_probability(s).exact_prob != Rational(BigInt(accepted), BigInt(total));
  }
  double worst_z = 0;
  for (int trial = 0; trial < kMonteCarloShapes; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const int n = 1 + static_cast<int>(rng.below(20));
    const Shape s = random_shape(rng, m, n);
    const double p = to_double(acceptance_probability(s).exact_prob);
    const double est = to_double(monte_carlo_acceptance(s, kMonteCarloSamples, 1000 + trial).exact_prob);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(kMonteCarloSamples));
    if (sigma == 0) {
      mc_outside += est != p;
      continue;
    }
    const double z = std::abs(est - p) / sigma;
    worst_z = std::max(worst_z, z);
    mc_outside += z > kMonteCarloSigmas;
  }
  std::ostringstream os;
  os << kOracleShapes << " shapes with m^n <= 2^16: " << dp_mismatch << " DP/enumeration mismatches; "
     << kMonteCarloShapes << " shapes at " << kMonteCarloSamples << " samples: " << mc_outside << " beyond "
     << kMonteCarloSigmas << " sigma (max " << worst_z << ")";
  return {dp_mismatch == 0 && mc_outside == 0, os.str()};
}

}  // namespace shapehit::acceptance
