#include "shapehit/hashing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace shapehit {

// Perfect hashing ---------------------------------------------------------------

PerfectHashFamily::PerfectHashFamily(int n, int t, std::uint64_t seed_cap)
    : n_(n), t_(t), space_((t < 1 || t > n) ? throw std::invalid_argument("perfect hash needs 1 <= t <= n")
                                             : KWiseSpace(t, n, t, seed_cap)) {}

int PerfectHashFamily::eval(std::uint64_t member, int j) const {
  if (j < 1 || j > n_) throw std::out_of_range("element outside [n]");
  return space_.sample(member)[j - 1];
}

std::vector<int> PerfectHashFamily::buckets(std::uint64_t member) const {
  Point x = space_.sample(member);
  return std::vector<int>(x.begin(), x.end());
}

bool PerfectHashFamily::injective_on(std::uint64_t member, std::span<const int> subset) const {
  Point x = space_.sample(member);
  std::vector<bool> used(t_ + 1, false);
  for (int j : subset) {
    if (used[x[j - 1]]) return false;
    used[x[j - 1]] = true;
  }
  return true;
}

Rational PerfectHashFamily::separation_fraction(std::span<const int> subset) const {
  Point x(n_);
  std::uint64_t good = 0;
  std::vector<bool> used(t_ + 1);
  for (std::uint64_t s = 0; s < space_.seed_count(); ++s) {
    space_.sample_into(s, x);
    std::fill(used.begin(), used.end(), false);
    bool ok = true;
    for (int j : subset) {
      if (used[x[j - 1]]) {
        ok = false;
        break;
      }
      used[x[j - 1]] = true;
    }
    good += ok;
  }
  return Rational(BigInt(good), BigInt(space_.seed_count()));
}

Rational PerfectHashFamily::exact_fraction(int t) {
  BigInt num = 1;
  for (int i = 2; i <= t; ++i) num *= i;
  return Rational(num, boost::multiprecision::pow(BigInt(t), static_cast<unsigned>(t)));
}

std::string PerfectHashFamily::label() const {
  return "perfect(n=" + std::to_string(n_) + ",t=" + std::to_string(t_) + ",family=" + space_.label() + ")";
}

// Fractional hashing -------------------------------------------------------------

int next_prime_power(int x) {
  if (x <= 1) return 1;
  for (int v = x;; ++v) {
    auto f = factor_prime_powers(v);
    if (f.size() == 1) return v;
  }
}

namespace {

void enumerate_compositions(int slots, int budget, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == slots) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= budget; ++e) {
    cur.push_back(e);
    enumerate_compositions(slots, budget - e, cur, out);
    cur.pop_back();
  }
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t cap, const char* what) {
  if (a != 0 && b > cap / a) throw CapExceeded(what, "count exceeds cap " + std::to_string(cap));
  return a * b;
}

}  // namespace

FractionalHashFamily::FractionalHashFamily(int n, int t, FractionalConfig config)
    : n_(n), t_(t), config_(config) {
  if (t < 1 || t > n) throw std::invalid_argument("fractional hash needs 1 <= t <= n");
  if (config_.excess < 0) throw std::invalid_argument("excess must be >= 0");
  buckets_ = config_.top_buckets > 0 ? config_.top_buckets : next_prime_power(config_.bucket_factor * t);
  if (buckets_ < t) throw std::invalid_argument("top-level bucket count must be >= t");
  h1_ = std::make_unique<KWiseSpace>(buckets_, n, std::min(2, n), config_.seed_cap);

  std::uint64_t max_seeds = 0;
  for (int y = 2; y <= 1 + config_.excess; ++y) {
    auto space = std::make_unique<KWiseSpace>(y, n, std::min(2, n), config_.seed_cap);
    max_seeds = std::max(max_seeds, space->seed_count());
    level2_table_.emplace(y, space->enumerate());
    level2_.emplace(y, std::move(space));
  }
  if (max_seeds > 0) graph_ = padded_expander(max_seeds, config_.walk_lambda, config_.degree_cap).graph;

  // I' in lexicographic order; y by lexicographic excess vectors.
  std::vector<int> comb(t);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  enumerate_compositions(buckets_ - t, config_.excess, cur, comps);
  while (true) {
    std::vector<bool> in(buckets_, false);
    for (int b : comb) in[b] = true;
    for (const auto& e : comps) {
      Guess g;
      g.iprime = comb;
      g.y.assign(buckets_, 0);
      std::size_t k = 0;
      for (int b = 0; b < buckets_; ++b) {
        if (in[b]) continue;
        g.y[b] = 1 + e[k++];
        if (g.y[b] > 1) g.steps.push_back(b);
      }
      if (!g.steps.empty()) {
        g.walk_count = graph_->vertex_count();
        for (std::size_t s = 0; s < g.steps.size(); ++s)
          g.walk_count = checked_mul(g.walk_count, graph_->degree(), config_.member_cap, "hash-members");
      }
      guess_offset_.push_back(per_h1_);
      per_h1_ += g.walk_count;
      if (per_h1_ > config_.member_cap) throw CapExceeded("hash-members", "guess space exceeds member cap");
      guesses_.push_back(std::move(g));
    }
    int i = t - 1;
    while (i >= 0 && comb[i] == buckets_ - t + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < t; ++j) comb[j] = comb[j - 1] + 1;
  }
  member_count_ = checked_mul(h1_->seed_count(), per_h1_, config_.member_cap, "hash-members");
}

FractionalHashFamily::Member FractionalHashFamily::member(std::uint64_t index) const {
  if (index >= member_count_) throw std::out_of_range("member index");
  Member m;
  m.index = index;
  m.h1_seed = index / per_h1_;
  std::uint64_t r = index % per_h1_;
  auto it = std::upper_bound(guess_offset_.begin(), guess_offset_.end(), r);
  m.guess = static_cast<std::size_t>(it - guess_offset_.begin()) - 1;
  std::uint64_t w = r - guess_offset_[m.guess];
  const Guess& g = guesses_[m.guess];
  m.walk.ports.resize(g.steps.size());
  for (std::size_t i = g.steps.size(); i-- > 0;) {
    m.walk.ports[i] = w % graph_->degree();
    w /= graph_->degree();
  }
  m.walk.start = w;
  return m;
}

const KWiseSpace& FractionalHashFamily::second_level(int y) const {
  auto it = level2_.find(y);
  if (it == level2_.end()) throw std::out_of_range("no second-level space for y=" + std::to_string(y));
  return *it->second;
}

std::uint64_t FractionalHashFamily::second_level_seed(int y, std::uint64_t vertex) const {
  return vertex % second_level(y).seed_count();
}

void FractionalHashFamily::eval_with_top(const Member& m, std::span<const Symbol> h1, std::span<int> out) const {
  const Guess& g = guesses_[m.guess];
  std::vector<int> rank(buckets_, -1), offset(buckets_, 0);
  for (int k = 0; k < t_; ++k) rank[g.iprime[k]] = k;
  int acc = 0;
  for (int b = 0; b < buckets_; ++b) {
    offset[b] = acc;
    if (rank[b] < 0) acc += g.y[b];
  }
  std::vector<const Symbol*> row(buckets_, nullptr);
  std::uint64_t v = m.walk.start;
  for (std::size_t s = 0; s < g.steps.size(); ++s) {
    v = graph_->neighbor(v, m.walk.ports[s]);
    const int b = g.steps[s];
    const PointSet& table = level2_table_.at(g.y[b]);
    row[b] = table.point(second_level_seed(g.y[b], v)).data();
  }
  for (int j = 0; j < n_; ++j) {
    const int b = h1[j] - 1;
    if (rank[b] >= 0) {
      out[j] = rank[b] + 1;
      continue;
    }
    const int local = row[b] ? row[b][j] : 1;
    out[j] = (offset[b] + local - 1) % t_ + 1;
  }
}

std::vector<int> FractionalHashFamily::eval_all(const Member& m) const {
  const Point h1 = h1_->sample(m.h1_seed);
  std::vector<int> out(n_);
  eval_with_top(m, h1, out);
  return out;
}

int FractionalHashFamily::eval(const Member& m, int j) const {
  if (j < 1 || j > n_) throw std::out_of_range("element outside [n]");
  return eval_all(m)[j - 1];
}

std::string FractionalHashFamily::label() const {
  return "fractional(n=" + std::to_string(n_) + ",t=" + std::to_string(t_) + ",B=" + std::to_string(buckets_) +
         ",excess=" + std::to_string(config_.excess) + ",walk_lambda=" + std::to_string(config_.walk_lambda) +
         ",members=" + std::to_string(member_count_) + ")";
}

// Certification -----------------------------------------------------------------

namespace {

struct ScaledZ {
  std::vector<std::int64_t> a;  // z_j * L
  std::int64_t sum = 0;
};

ScaledZ scale_z(const std::vector<Rational>& z) {
  BigInt lcm = 1;
  for (const auto& v : z) {
    if (v < 0 || v > 1) throw std::invalid_argument("z entries must lie in [0,1]");
    lcm = boost::multiprecision::lcm(lcm, BigInt(boost::multiprecision::denominator(v)));
  }
  ScaledZ out;
  BigInt sum = 0;
  for (const auto& v : z) {
    BigInt a = boost::multiprecision::numerator(v) * (lcm / boost::multiprecision::denominator(v));
    sum += a;
    out.a.push_back(static_cast<std::int64_t>(a));
  }
  if (sum > (BigInt(1) << 40)) throw CapExceeded("z-precision", "z denominators too large");
  out.sum = static_cast<std::int64_t>(sum);
  return out;
}

Rational z_total(const std::vector<Rational>& z) {
  Rational s = 0;
  for (const auto& v : z) s += v;
  return s;
}

}  // namespace

FractionalCertificate certify_fractional(const FractionalHashFamily& family, const std::vector<Rational>& z,
                                         int jobs) {
  if (static_cast<int>(z.size()) != family.n()) throw std::invalid_argument("z must have n entries");
  const int t = family.t();
  const Rational total = z_total(z);
  if (total < 10 * t) throw std::invalid_argument("sum of z must be at least 10t");
  const ScaledZ sz = scale_z(z);
  const __int128 s = sz.sum;

  const std::uint64_t seeds = family.top_level().seed_count();
  const std::uint64_t per = family.members_per_top_seed();
  jobs = static_cast<int>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(std::max(jobs, 1), seeds)));
  std::vector<std::uint64_t> good(jobs, 0), witness(jobs, UINT64_MAX);

  auto worker = [&](int w) {
    Point h1(family.n());
    std::vector<int> out(family.n());
    std::vector<std::int64_t> load(t + 1);
    for (std::uint64_t seed = w; seed < seeds; seed += jobs) {
      family.top_level().sample_into(seed, h1);
      for (std::uint64_t r = 0; r < per; ++r) {
        const std::uint64_t idx = seed * per + r;
        const auto m = family.member(idx);
        family.eval_with_top(m, h1, out);
        std::fill(load.begin(), load.end(), 0);
        for (int j = 0; j < family.n(); ++j) load[out[j]] += sz.a[j];
        bool ok = true;
        for (int i = 1; ok && i <= t; ++i) {
          const __int128 l = load[i];
          ok = 100 * static_cast<__int128>(t) * l >= s && static_cast<__int128>(t) * l <= 10 * s;
        }
        if (ok) {
          ++good[w];
          witness[w] = std::min(witness[w], idx);
        }
      }
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& th : threads) th.join();
  }

  FractionalCertificate cert;
  cert.members = family.member_count();
  cert.good = std::accumulate(good.begin(), good.end(), std::uint64_t{0});
  cert.fraction = Rational(BigInt(cert.good), BigInt(cert.members));
  const std::uint64_t wit = *std::min_element(witness.begin(), witness.end());
  if (wit != UINT64_MAX) cert.witness = wit;
  cert.z_sum = total;
  return cert;
}

std::pair<Rational, Rational> fractional_load_bounds(const std::vector<Rational>& z, int t) {
  const Rational total = z_total(z);
  return {Rational(1, 100) * total / t, 10 * total / t};
}

TopLevelStats top_level_stats(const KWiseSpace& h1, const std::vector<Rational>& z, int t) {
  if (static_cast<int>(z.size()) != h1.n()) throw std::invalid_argument("z must have n entries");
  if (z_total(z) < 10 * t) throw std::invalid_argument("sum of z must be at least 10t");
  const ScaledZ sz = scale_z(z);
  const int buckets = h1.m();
  const __int128 s = sz.sum;
  __int128 squares = 0;
  for (auto a : sz.a) squares += static_cast<__int128>(a) * a;

  TopLevelStats st;
  st.seeds = h1.seed_count();
  Point x(h1.n());
  std::vector<__int128> bucket(buckets);
  for (std::uint64_t seed = 0; seed < st.seeds; ++seed) {
    h1.sample_into(seed, x);
    std::fill(bucket.begin(), bucket.end(), 0);
    for (int j = 0; j < h1.n(); ++j) bucket[x[j] - 1] += sz.a[j];
    __int128 sum_sq = 0;
    int medium = 0;
    for (auto b : bucket) {
      sum_sq += b * b;
      medium += (100 * static_cast<__int128>(t) * b >= s) && (static_cast<__int128>(t) * b <= s);
    }
    // Y = (10t/S)^2 (sum A_i^2 - sum a_j^2); E1 is Y <= 2 (10t)^2 / B.
    if (buckets * (sum_sq - squares) > 2 * s * s) continue;
    ++st.e1_seeds;
    if (10 * medium >= 2 * buckets) ++st.e1_medium_seeds;
    if (st.min_medium_given_e1 < 0 || medium < st.min_medium_given_e1) st.min_medium_given_e1 = medium;
  }
  return st;
}

bool pairwise_mass_implication(const std::vector<Rational>& alpha) {
  Rational sum = 0, sq = 0;
  for (const auto& a : alpha) {
    if (a < 0 || a > 1) throw std::invalid_argument("alpha entries must lie in [0,1]");
    sum += a;
    sq += a * a;
  }
  const Rational pairs = sum * sum - sq;  // ordered pairs j1 != j2
  return !(sum > 2) || pairs > 2;
}

Rational max_cell_load(const FractionalHashFamily& family, const FractionalHashFamily::Member& m,
                       const std::vector<Rational>& z) {
  const Rational total = z_total(z);
  const Point h1 = family.top_level().sample(m.h1_seed);
  const auto& g = family.guesses()[m.guess];
  std::map<std::pair<int, int>, Rational> cells;
  std::uint64_t v = m.walk.start;
  for (std::size_t s = 0; s < g.steps.size(); ++s) {
    v = family.walk_graph()->neighbor(v, m.walk.ports[s]);
    const int b = g.steps[s];
    const Point h2 = family.second_level(g.y[b]).sample(family.second_level_seed(g.y[b], v));
    for (int j = 0; j < family.n(); ++j)
      if (h1[j] - 1 == b) cells[{b, h2[j]}] += z[j];
  }
  for (int j = 0; j < family.n(); ++j) {
    const int b = h1[j] - 1;
    if (g.y[b] == 1) cells[{b, 1}] += z[j];
  }
  Rational best = 0;
  for (const auto& [key, load] : cells) best = std::max(best, load);
  return best * 10 * family.t() / total;
}

}  // namespace shapehit
