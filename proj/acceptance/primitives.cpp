#include "criteria.hpp"

#include "shapehit/expander.hpp"
#include "shapehit/hashing.hpp"
#include "shapehit/kwise.hpp"
#include "shapehit/oracle.hpp"
#include "shapehit/recorded.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace shapehit::acceptance {

namespace {

constexpr std::uint64_t kKwiseSeedCap = std::uint64_t{1} << 22;
constexpr double kNormTolerance = 1e-9;
constexpr std::uint64_t kWalkEnumerationCap = std::uint64_t{1} << 26;
constexpr int kBucketInstancesPerSpace = 100;
constexpr int kZVectorsPerPair = 20;

// Every pattern on every coordinate subset of size <= k appears equally often.
bool marginals_uniform(const KWiseSpace& space) {
  const PointSet all = space.enumerate();
  if (all.size() != space.seed_count()) return false;
  const int n = space.n(), k = space.k(), m = space.m();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = std::popcount(mask);
    if (size > k) continue;
    std::uint64_t patterns = 1;
    for (int i = 0; i < size; ++i) patterns *= static_cast<std::uint64_t>(m);
    std::vector<std::uint64_t> counts(patterns, 0);
    for (std::size_t s = 0; s < all.size(); ++s) {
      std::uint64_t idx = 0;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) idx = idx * m + static_cast<std::uint64_t>(all.point(s)[i] - 1);
      ++counts[idx];
    }
    if (space.seed_count() % patterns != 0) return false;
    for (auto c : counts)
      if (c != space.seed_count() / patterns) return false;
  }
  return true;
}

std::vector<std::vector<int>> subsets(int n, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(t);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    out.push_back(c);
    int i = t - 1;
    while (i >= 0 && c[i] == n - t + i) --i;
    if (i < 0) return out;
    ++c[i];
    for (int j = i + 1; j < t; ++j) c[j] = c[j - 1] + 1;
  }
}

// Smallest multiple of 1/1000 at or above x, clamped to [0, 1].
Rational ceil_milli(const Rational& x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double v = std::ceil(to_double(x) * 1000.0 - 1e-9);
  Rational r{BigInt(static_cast<long long>(v)), BigInt(1000)};
  while (r < x) r += Rational(1, 1000);
  return std::min(r, Rational(1));
}

std::vector<Rational> permuted(std::vector<Rational> z, SplitMix64& rng) {
  for (std::size_t i = z.size(); i > 1; --i) std::swap(z[i - 1], z[rng.below(i)]);
  return z;
}

// Uniform, geometric, block and two-scale vectors, raised to the
// sum >= 10t requirement; inadmissible and duplicate vectors are dropped.
std::vector<std::vector<Rational>> z_corpus(int n, int t, SplitMix64& rng) {
  const Rational need(10 * t);
  std::set<std::vector<Rational>> seen;
  std::vector<std::vector<Rational>> out;
  auto add = [&](std::vector<Rational> z) {
    Rational sum = 0;
    for (const auto& v : z) {
      if (v < 0 || v > 1) return;
      sum += v;
    }
    if (sum < need) return;
    if (seen.insert(z).second) out.push_back(std::move(z));
  };
  auto floor_for = [&](const std::vector<Rational>& base) {
    // f with sum(f + (1 - f) base_j) >= need.
    Rational s = std::accumulate(base.begin(), base.end(), Rational(0));
    if (s >= need) return Rational(0);
    return ceil_milli((need - s) / (Rational(n) - s));
  };
  for (int round = 0; round < 4 && static_cast<int>(out.size()) < 4 * kZVectorsPerPair; ++round) {
    add(std::vector<Rational>(n, ceil_milli(need / n)));
    for (int r : {2, 3, 5}) {
      std::vector<Rational> g(n);
      Rational v = 1;
      for (auto& e : g) {
        e = v;
        v = v * Rational(r - 1, r);
      }
      const Rational f = floor_for(g);
      for (auto& e : g) e = ceil_milli(f + (1 - f) * e);
      add(round == 0 ? g : permuted(g, rng));
    }
    for (int k : {t, 2 * t, 5 * t}) {
      if (k > n) continue;
      std::vector<Rational> b(n, 0);
      for (int j = 0; j < k; ++j) b[j] = 1;
      const Rational f = floor_for(b);
      for (int j = k; j < n; ++j) b[j] = f;
      add(round == 0 ? b : permuted(b, rng));
    }
    {
      // t full coordinates against many light ones just meeting the mass.
      std::vector<Rational> two(n, ceil_milli((need - t) / std::max(1, n - t)));
      for (int j = 0; j < std::min(t, n); ++j) two[j] = 1;
      add(round == 0 ? two : permuted(two, rng));
    }
  }
  if (static_cast<int>(out.size()) > kZVectorsPerPair) out.resize(kZVectorsPerPair);
  return out;
}

VertexSubset random_subset(SplitMix64& rng, std::uint64_t n, std::uint64_t size) {
  VertexSubset s(n, false);
  for (std::uint64_t placed = 0; placed < size;) {
    const auto v = rng.below(n);
    if (!s[v]) {
      s[v] = true;
      ++placed;
    }
  }
  return s;
}

}  // namespace

Outcome kwise_exactness(int) {
  int checked = 0, skipped_cap = 0, failed = 0;
  std::ostringstream bad;
  for (int m : {2, 3, 4, 6})
    for (int n = 1; n <= 6; ++n)
      for (int k = 1; k <= std::min(3, n); ++k) {
        std::optional<KWiseSpace> space;
        try {
          space.emplace(m, n, k, kKwiseSeedCap);
        } catch (const CapExceeded&) {
          ++skipped_cap;
          continue;
        }
        ++checked;
        if (!marginals_uniform(*space)) {
          ++failed;
          bad << " (" << m << "," << n << "," << k << ")";
        }
      }
  std::ostringstream os;
  os << checked << " spaces exactly uniform on every <=k marginal, " << skipped_cap << " above 2^22 seeds";
  if (failed) os << "; non-uniform:" << bad.str();
  return {failed == 0 && checked > 0, os.str()};
}

Outcome perfect_hash_completeness(int) {
  bool ok = true;
  std::ostringstream os;
  for (auto [n, t] : {std::pair{6, 3}, std::pair{8, 2}, std::pair{8, 3}, std::pair{10, 2}}) {
    const PerfectHashFamily family(n, t);
    const std::uint64_t members = family.member_count();
    std::vector<std::vector<int>> table(members);
    for (std::uint64_t i = 0; i < members; ++i) table[i] = family.buckets(i);
    Rational bound(1);
    for (int i = 1; i <= t; ++i) bound *= Rational(i, t);  // t! / t^t
    Rational worst(1);
    std::size_t unseparated = 0;
    const auto all = subsets(n, t);
    for (const auto& s : all) {
      std::uint64_t good = 0;
      for (const auto& b : table) {
        std::set<int> image;
        for (int j : s) image.insert(b[j]);
        good += image.size() == s.size();
      }
      const Rational frac{BigInt(good), BigInt(members)};
      if (good == 0) ++unseparated;
      worst = std::min(worst, frac);
    }
    ok = ok && unseparated == 0 && worst >= bound;
    os << "(" << n << "," << t << "): " << all.size() << " sets, min fraction " << to_string(worst)
       << " >= " << to_string(bound) << "; ";
  }
  return {ok, os.str()};
}

Outcome fractional_hash_bound(int jobs) {
  using recorded::kFracK;
  using recorded::kFracKappa;
  SplitMix64 rng(0x5eed);
  bool ok = true;
  std::ostringstream os;
  os << "K=" << kFracK << " kappa=" << kFracKappa << "; ";
  for (auto [n, t] : {std::pair{20, 2}, std::pair{40, 2}, std::pair{30, 3}}) {
    const auto corpus = z_corpus(n, t, rng);
    const FractionalHashFamily family(n, t);
    const double floor = 1.0 / (kFracK * std::pow(2.0, kFracKappa * t));
    double worst = 1.0;
    for (const auto& z : corpus) {
      const auto cert = certify_fractional(family, z, jobs);
      const double f = to_double(cert.fraction);
      ok = ok && cert.good > 0 && f >= floor;
      worst = std::min(worst, f);
    }
    ok = ok && !corpus.empty();
    os << "(" << n << "," << t << "): " << corpus.size() << " admissible z";
    if (static_cast<int>(corpus.size()) < kZVectorsPerPair) os << " (sum z >= " << 10 * t << " forces z = 1)";
    os << ", min fraction " << worst << " >= " << floor << "; ";
  }
  return {ok, os.str()};
}

Outcome expander_walk_lemma(int) {
  SplitMix64 rng(0xe7a);
  int sequences = 0, enumerated = 0, failed = 0;
  for (std::uint64_t n : {25u, 36u, 49u, 64u, 81u})
    for (int len = 1; len <= 3; ++len) {
      std::vector<Rational> ps;
      std::vector<VertexSubset> targets;
      std::vector<ExpanderGraph> graphs;
      Rational prev = 1;
      for (int i = 0; i < len; ++i) {
        const std::uint64_t k = n / 2 + rng.below(n - n / 2 + 1);
        const Rational p{BigInt(k), BigInt(n)};
        graphs.push_back(expander_for(n, to_double(p * prev) / 8));
        ps.push_back(p);
        targets.push_back(random_subset(rng, n, k));
        prev = p;
      }
      const WalkSpace ws(graphs);
      if (ws.vertex_count() != n || !walk_lemma_hypothesis(ws, ps)) {
        ++failed;
        continue;
      }
      ++sequences;
      const Rational hit = hitting_fraction(ws, targets);
      bool ok = hit >= walk_hitting_bound(ps);
      if (ws.size() <= BigInt(kWalkEnumerationCap)) {
        ++enumerated;
        ok = ok && hitting_fraction_enumerated(ws, targets, kWalkEnumerationCap) == hit;
      }
      const auto trace = walk_norm_trace(ws, targets);
      for (std::size_t i = 0; i < trace.size(); ++i) {
        const double pi = to_double(ps[i]);
        const double prev_l1 = i == 0 ? 1.0 : trace[i - 1].first;
        ok = ok && trace[i].first >= 0.75 * pi * prev_l1 - kNormTolerance;
        ok = ok && trace[i].second <= 2.0 / std::sqrt(pi * static_cast<double>(n)) * trace[i].first + kNormTolerance;
      }
      failed += !ok;
    }
  std::ostringstream os;
  os << sequences << " certified sequences (N <= 81, l <= 3), " << enumerated
     << " also by full walk enumeration, " << failed << " failures; norm tolerance " << kNormTolerance;
  return {failed == 0 && sequences >= 5, os.str()};
}

Outcome rectangle_buckets(int) {
  const int a = 4, C = 1;
  SplitMix64 rng(0xb0c);
  int instances = 0, failed = 0;
  for (auto [m, n] : {std::pair{4, 5}, std::pair{8, 4}, std::pair{3, 8}, std::pair{2, 8}, std::pair{5, 6}}) {
    const KWiseSpace space(m, n, std::min(a * C, n));
    const PointSet pts = space.enumerate();
    for (int trial = 0; trial < kBucketInstancesPerSpace; ++trial) {
      std::vector<std::pair<int, std::vector<bool>>> bucket;
      Rational mass = 0, product = 1;
      for (int j = 0; j < n; ++j) {
        if (rng.below(4) == 0) continue;
        std::vector<bool> set(m + 1, false);
        int size = 0;
        for (int s = 1; s <= m; ++s)
          if (rng.below(3) != 0) set[s] = true, ++size;
        if (size == 0) set[1] = true, size = 1;
        const Rational q(m - size, m);
        if (mass + q > C) continue;
        mass += q;
        product *= 1 - q;
        bucket.emplace_back(j, std::move(set));
      }
      std::uint64_t accepted = 0;
      for (std::size_t s = 0; s < pts.size(); ++s) {
        bool in = true;
        for (const auto& [j, set] : bucket) in = in && set[pts.point(s)[j]];
        accepted += in;
      }
      ++instances;
      failed += Rational(BigInt(accepted), BigInt(pts.size())) < product / 2;
    }
  }
  std::ostringstream os;
  os << instances << " bucket instances with sum q <= " << C << " against " << a * C
     << "-wise spaces, " << failed << " below half the product";
  return {failed == 0 && instances >= 50, os.str()};
}

}  // namespace shapehit::acceptance
