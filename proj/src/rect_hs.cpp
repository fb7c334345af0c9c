#include "shapehit/rect_hs.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace shapehit {

int StrongRectConfig::L() const {
  return std::max(1, static_cast<int>(std::ceil(c * std::log2(static_cast<double>(n)) - 1e-9)));
}

int StrongRectConfig::independence() const { return std::max(1, std::min(n, a * C)); }

StrongRectSet::StrongRectSet(StrongRectConfig config, KWiseSpace space, PointSet space_points, ExpanderGraph base)
    : config_(std::move(config)), space_(std::move(space)), points_(std::move(space_points)), base_(std::move(base)) {}

BigInt StrongRectSet::block_size(const StrongRectBlock& b) const {
  if (b.r == 0) return BigInt(space_.seed_count());
  BigInt s = base_.vertex_count();
  for (int p : b.powers) s *= boost::multiprecision::pow(BigInt(ExpanderGraph::kBaseDegree), p);
  return s;
}

BigInt StrongRectSet::size() const {
  BigInt s = 0;
  for (const auto& b : blocks_) s += b.multiplicity * block_size(b);
  return s;
}

BigInt StrongRectSet::distinct_block_points() const {
  BigInt s = 0;
  for (const auto& b : blocks_) s += block_size(b);
  return s;
}

std::vector<ExpanderGraph> StrongRectSet::graphs_for(const StrongRectBlock& b) const {
  std::vector<ExpanderGraph> gs;
  for (int p : b.powers) gs.push_back(power(base_, p, UINT64_MAX));
  return gs;
}

std::vector<std::uint64_t> StrongRectSet::outside_masks(const Shape& rect) const {
  if (rect.m() != config_.m || rect.n() != config_.n) throw std::invalid_argument("rectangle parameters");
  const std::size_t words = (config_.n + 63) / 64;
  std::vector<int> partial;
  for (int j = 0; j < config_.n; ++j)
    if (rect.set_size(j) < config_.m) partial.push_back(j);
  std::vector<std::uint64_t> out(points_.size() * words, 0);
  for (std::size_t s = 0; s < points_.size(); ++s) {
    auto x = points_.point(s);
    for (int j : partial)
      if (!rect.contains(j, x[j])) out[s * words + j / 64] |= std::uint64_t{1} << (j % 64);
  }
  return out;
}

Rational StrongRectSet::block_fraction(const StrongRectBlock& b, const Shape& rect,
                                       const std::vector<std::uint64_t>& outside) const {
  const std::uint64_t seeds = points_.size();
  const std::size_t words = (config_.n + 63) / 64;
  auto clear = [&](std::uint64_t s, const std::vector<std::uint64_t>& mask) {
    for (std::size_t w = 0; w < words; ++w)
      if (outside[s * words + w] & mask[w]) return false;
    return true;
  };
  if (b.r == 0) {
    const bool plain = rect.sym() == SymmetricFunction::all_of(config_.n);
    const std::vector<std::uint64_t> all(words, ~std::uint64_t{0});
    std::uint64_t good = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) good += plain ? clear(s, all) : evaluate(rect, points_.point(s));
    return Rational(BigInt(good), BigInt(seeds));
  }
  std::vector<std::vector<std::uint64_t>> bucket(b.r, std::vector<std::uint64_t>(words, 0));
  for (int j = 0; j < config_.n; ++j) bucket[b.partition[j] - 1][j / 64] |= std::uint64_t{1} << (j % 64);
  const std::uint64_t nv = base_.vertex_count();
  std::vector<VertexSubset> targets(b.r, VertexSubset(nv));
  for (int i = 0; i < b.r; ++i) {
    std::vector<bool> ok(seeds);
    for (std::uint64_t s = 0; s < seeds; ++s) ok[s] = clear(s, bucket[i]);
    for (std::uint64_t v = 0; v < nv; ++v) targets[i][v] = ok[v % seeds];
  }
  return hitting_fraction(WalkSpace(graphs_for(b)), targets);
}

Rational StrongRectSet::block_accept_fraction(const StrongRectBlock& b, const Shape& rect) const {
  return block_fraction(b, rect, outside_masks(rect));
}

Rational StrongRectSet::accept_fraction(const Shape& rect) const {
  const auto outside = outside_masks(rect);
  Rational num = 0;
  for (const auto& b : blocks_) num += block_fraction(b, rect, outside) * Rational(b.multiplicity * block_size(b));
  return num / Rational(size());
}

void StrongRectSet::for_each_block_point(const StrongRectBlock& b,
                                         const std::function<void(std::span<const Symbol>)>& visit) const {
  if (b.r == 0) {
    for (std::size_t s = 0; s < points_.size(); ++s) visit(points_.point(s));
    return;
  }
  const WalkSpace ws(graphs_for(b));
  const std::uint64_t total = ws.checked_size(UINT64_MAX >> 1);
  const std::uint64_t seeds = points_.size();
  Point x(config_.n);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    const auto vs = walk_vertices(ws, ws.walk_at(idx));
    for (int j = 0; j < config_.n; ++j) x[j] = points_.point(vs[b.partition[j] - 1] % seeds)[j];
    visit(x);
  }
}

PointSet StrongRectSet::materialize(std::uint64_t cap) const {
  if (distinct_block_points() > cap)
    throw CapExceeded("points", "strong rectangle set has " + distinct_block_points().str() + " block points");
  PointSet out(config_.m, config_.n, provenance());
  out.reserve(static_cast<std::size_t>(distinct_block_points()));
  for (const auto& b : blocks_) {
    out.begin_block(b.label + " mult=" + b.multiplicity.str());
    for_each_block_point(b, [&](std::span<const Symbol> x) { out.push_back(x); });
  }
  return out;
}

std::string StrongRectSet::provenance() const {
  std::ostringstream os;
  os << "srect m=" << config_.m << " n=" << config_.n << " c=" << config_.c << " rho=" << config_.rho
     << " a=" << config_.a << " C=" << config_.C << " L=" << config_.L() << " space=[" << space_.label()
     << "] base_lambda=" << base_.lambda_bound() << " max_walk_power=" << config_.max_walk_power
     << " blocks=" << blocks_.size();
  std::size_t clamped = 0;
  for (const auto& b : blocks_) clamped += b.clamped();
  os << " clamped_blocks=" << clamped;
  if (config_.rho > config_.c * std::log2(static_cast<double>(config_.n))) os << " rho_exceeds_c_log_n=1";
  return os.str();
}

// Guesses ------------------------------------------------------------------------

namespace {

void alpha_rec(int r, int limit, std::vector<int>& cur, std::vector<std::vector<int>>& out, std::uint64_t cap) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    if (out.size() > cap) throw CapExceeded("alpha-guesses", "more than " + std::to_string(cap) + " alpha vectors");
    return;
  }
  const int remaining_slots = r - static_cast<int>(cur.size()) - 1;
  for (int a = 1; a <= limit - remaining_slots; ++a) {
    cur.push_back(a);
    alpha_rec(r, limit - a, cur, out, cap);
    cur.pop_back();
  }
}

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::vector<std::vector<int>> alpha_guesses(int r, int limit, std::uint64_t cap) {
  std::vector<std::vector<int>> out;
  if (r < 1 || limit < r) return out;
  std::vector<int> cur;
  alpha_rec(r, limit, cur, out, cap);
  return out;
}

int alpha_sum_limit(int r, int L) {
  const int lp = std::max(1, L / r);
  return std::max(3 * r, (2 * L + r + lp - 1) / lp);
}

Rational alpha_estimate(int alpha, int L_prime) {
  return Rational(BigInt(1), BigInt(1) << (alpha * L_prime));
}

CanonicalGuess canonical_guess(const Shape& rect, const std::vector<int>& partition, int r, int L) {
  CanonicalGuess g;
  Rational mass = 0;
  for (int j = 0; j < rect.n(); ++j) mass += Rational(rect.m() - rect.set_size(j), rect.m());
  g.r = static_cast<int>(boost::multiprecision::numerator(mass) / boost::multiprecision::denominator(mass)) / 10;
  if (r < 1) return g;
  g.P.assign(r, Rational(1, 2));
  for (int j = 0; j < rect.n(); ++j) g.P[partition[j] - 1] *= Rational(rect.set_size(j), rect.m());
  const int lp = std::max(1, L / r);
  for (const auto& p : g.P) {
    if (p == 0) throw std::invalid_argument("rectangle with an empty set has no finite alpha");
    int a = 1;
    while (alpha_estimate(a, lp) > p) ++a;
    g.alpha.push_back(a);
  }
  return g;
}

Rational bucket_accept_prob(const PointSet& space_points,
                            const std::vector<std::pair<int, std::vector<int>>>& bucket) {
  if (space_points.empty()) throw std::invalid_argument("empty space");
  std::vector<std::vector<bool>> member;
  for (const auto& [coord, set] : bucket) {
    std::vector<bool> in(space_points.m() + 1, false);
    for (int a : set) in.at(a) = true;
    member.push_back(std::move(in));
  }
  std::uint64_t good = 0;
  for (std::size_t s = 0; s < space_points.size(); ++s) {
    auto x = space_points.point(s);
    bool ok = true;
    for (std::size_t b = 0; ok && b < bucket.size(); ++b) ok = member[b][x[bucket[b].first]];
    good += ok;
  }
  return Rational(BigInt(good), BigInt(space_points.size()));
}

// Construction -------------------------------------------------------------------

StrongRectSet build_strong_rect(const StrongRectConfig& cfg) {
  if (cfg.n < 1 || cfg.m < 1) throw std::invalid_argument("m, n must be >= 1");
  if (cfg.rho < 10) throw std::invalid_argument("rho must be >= 10");
  if (cfg.a < 3 || cfg.C < 1) throw std::invalid_argument("need a >= 3 and C >= 1");
  if (cfg.c < 1) throw std::invalid_argument("c must be >= 1");
  if (std::log2(static_cast<double>(cfg.m)) > cfg.c * std::log2(static_cast<double>(cfg.n)) + 1e-9)
    throw std::invalid_argument("m must be at most n^c");

  KWiseSpace space(cfg.m, cfg.n, cfg.independence(), cfg.seed_cap);
  PointSet pts = space.enumerate();
  ExpanderGraph base = base_expander(space.seed_count());
  const double lambda0 = base.lambda_bound();
  const double seeds = static_cast<double>(space.seed_count());
  const double nv = static_cast<double>(base.vertex_count());
  const double shrink = std::floor(nv / seeds) * seeds / nv;

  StrongRectSet out(cfg, std::move(space), std::move(pts), base);
  auto& blocks = out.mutable_blocks();
  {
    StrongRectBlock b;
    b.r = 0;
    b.multiplicity = 1;
    b.label = "r=0 space";
    blocks.push_back(std::move(b));
  }

  const int L = cfg.L();
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::size_t> index;
  for (int r = 1; r <= cfg.rho / 10 && r <= cfg.n; ++r) {
    const int lp = std::max(1, L / r);
    const auto alphas = alpha_guesses(r, alpha_sum_limit(r, L), std::uint64_t{1} << (cfg.alpha_cap_log2 * r));
    std::vector<std::vector<int>> powers(alphas.size()), requested(alphas.size());
    for (std::size_t g = 0; g < alphas.size(); ++g) {
      double prev = 1.0;
      for (int i = 0; i < r; ++i) {
        const double rho_i = std::ldexp(1.0, -alphas[g][i] * lp);
        const double target = rho_i * prev / 8.0 * shrink * shrink;
        const int need = lambda0 <= 0 ? 1 : powers_needed(lambda0, target);
        requested[g].push_back(need);
        powers[g].push_back(std::min(need, cfg.max_walk_power));
        prev = rho_i;
      }
    }
    FractionalHashFamily family(cfg.n, r, cfg.hash);
    for (std::uint64_t mi = 0; mi < family.member_count(); ++mi) {
      const std::vector<int> partition = family.eval_all(family.member(mi));
      for (std::size_t g = 0; g < alphas.size(); ++g) {
        auto key = std::make_pair(partition, powers[g]);
        auto it = index.find(key);
        if (it == index.end()) {
          if (blocks.size() >= cfg.block_cap) throw CapExceeded("blocks", "strong rectangle block cap");
          StrongRectBlock b;
          b.r = r;
          b.partition = partition;
          b.powers = powers[g];
          b.requested = requested[g];
          b.multiplicity = 0;
          b.label = "r=" + std::to_string(r) + " h=" + join(partition, ',') + " powers=" + join(powers[g], ',');
          it = index.emplace(std::move(key), blocks.size()).first;
          blocks.push_back(std::move(b));
        }
        StrongRectBlock& b = blocks[it->second];
        b.multiplicity += 1;
        for (int i = 0; i < r; ++i) b.requested[i] = std::max(b.requested[i], requested[g][i]);
      }
    }
  }
  return out;
}

PointSet llsz_contract_hs(int m, int n, const Rational& eps) {
  PointSet out = rect_hs_kwise(m, n, eps);
  out.set_provenance("llsz-contract " + out.provenance());
  return out;
}

}  // namespace shapehit
