#include "shapehit/shape_hs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace shapehit {

namespace {

// Smallest k >= 1 with k^c >= x.
int root_ceil(double log2_x, double c) {
  int k = std::max(1, static_cast<int>(std::floor(std::exp2(log2_x / c))) - 1);
  while (c * std::log2(static_cast<double>(k)) < log2_x - 1e-9) ++k;
  return k;
}

}  // namespace

NormalizedParams normalize(int m, int n, const Rational& eps, double c) {
  if (m < 1 || n < 1) throw std::invalid_argument("m, n must be >= 1");
  if (eps <= 0 || eps > 1) throw std::invalid_argument("eps must lie in (0, 1]");
  if (!(c > 0)) throw std::invalid_argument("c must be positive");
  NormalizedParams p;
  p.m = m;
  p.n = n;
  p.eps = eps;
  p.c = c;
  p.n_padded = std::max({n, 2, root_ceil(std::log2(static_cast<double>(m)), c),
                         root_ceil(-std::log2(to_double(eps)), c)});
  p.threshold_eps = eps / (p.n_padded + 1);
  const double log_np = std::log2(static_cast<double>(p.n_padded));
  p.c_effective = std::max(c, -std::log2(to_double(p.threshold_eps)) / log_np);
  return p;
}

std::vector<Point> interpolate(std::span<const Symbol> y, std::span<const Symbol> z) {
  if (y.size() != z.size()) throw std::invalid_argument("interpolate: length mismatch");
  std::vector<Point> out;
  Point x(y.begin(), y.end());
  out.push_back(x);
  for (std::size_t i = 0; i < z.size(); ++i) {
    x[i] = z[i];
    out.push_back(x);
  }
  return out;
}

Shape pad_shape(const Shape& shape, int n_padded) {
  if (n_padded < shape.n()) throw std::invalid_argument("pad_shape: n' < n");
  const int extra = n_padded - shape.n();
  SetList sets = shape.sets();
  std::vector<int> full;
  for (int a = 1; a <= shape.m(); ++a) full.push_back(a);
  sets.resize(n_padded, full);
  std::vector<int> counts;
  for (int w : shape.sym().accept_counts()) counts.push_back(w + extra);
  return Shape(shape.m(), sets, SymmetricFunction(n_padded, counts));
}

ShapeHittingSet::ShapeHittingSet(NormalizedParams params, ThresholdHittingSet base, ShapeHSConfig cfg)
    : params_(std::move(params)), base_(std::move(base)), cfg_(std::move(cfg)) {
  if (base_.n() != params_.n_padded || base_.m() != params_.m)
    throw std::invalid_argument("threshold set does not match the normalized parameters");
}

BigInt ShapeHittingSet::size() const {
  const BigInt s = base_.size();
  return BigInt(params_.n_padded + 1) * s * s;
}

const PointSet& ShapeHittingSet::base_points() const {
  std::call_once(lazy_->once, [&] {
    try {
      lazy_->points = base_.distinct_points(cfg_.dp_word_cap);
    } catch (const CapExceeded&) {
      if (base_.block_points() > cfg_.enumeration_cap) throw;
      lazy_->points = base_.materialize(cfg_.enumeration_cap, true);
    }
  });
  return lazy_->points;
}

std::optional<Point> ShapeHittingSet::find_hit(const Shape& shape) const {
  if (shape.m() != params_.m || shape.n() != params_.n) throw std::invalid_argument("shape parameters differ");
  const Shape padded = pad_shape(shape, params_.n_padded);
  const std::vector<int> accept = padded.sym().accept_counts();
  if (accept.empty() || base_.empty()) return std::nullopt;
  int lower = 0, upper = params_.n_padded;
  for (int j = 0; j < params_.n_padded; ++j) {
    lower += padded.set_size(j) == params_.m;
    upper -= padded.set_size(j) == 0;
  }
  const auto lo = base_.extreme_count(padded, false, std::max(accept.front(), lower));
  const auto target = std::lower_bound(accept.begin(), accept.end(), lo->count);
  if (target != accept.end()) {
    const auto hi = base_.extreme_count(padded, true, std::min(*target, upper));
    for (const Point& x : interpolate(lo->witness, hi->witness))
      if (padded.sym().accepts(count_accepting(padded, x))) return Point(x.begin(), x.begin() + params_.n);
  }
  return exact_hit(padded);
}

// String i of interpolate(y, z) takes its first i coordinates from z and the
// rest from y, so its count is a prefix count of z plus a suffix count of y.
std::optional<Point> ShapeHittingSet::exact_hit(const Shape& padded) const {
  const int np = params_.n_padded;
  auto restricted = [&](int lo, int hi) {
    SetList sets(np);
    for (int j = lo; j < hi; ++j) sets[j] = padded.set(j);
    return Shape(params_.m, sets, SymmetricFunction::at_least(np, 0));
  };
  for (int i = 0; i <= np; ++i) {
    const auto prefix = base_.reachable_counts(restricted(0, i));
    const auto suffix = base_.reachable_counts(restricted(i, np));
    for (int p = 0; p <= i; ++p) {
      if (!prefix[p]) continue;
      for (int q = 0; q <= np - i; ++q) {
        if (!suffix[q] || !padded.sym().accepts(p + q)) continue;
        Point x(params_.n);
        for (int j = 0; j < params_.n; ++j) x[j] = j < i ? (*prefix[p])[j] : (*suffix[q])[j];
        return x;
      }
    }
  }
  return std::nullopt;
}

PointSet ShapeHittingSet::materialize(bool distinct) const {
  const PointSet& pts = base_points();
  const double total = static_cast<double>(pts.size()) * static_cast<double>(pts.size()) * (params_.n_padded + 1);
  if (!distinct && total > static_cast<double>(cfg_.pair_cap))
    throw CapExceeded("pairs", std::to_string(pts.size()) + "^2 pairs exceed the pair cap");
  PointSet out(params_.m, params_.n, provenance());
  std::unordered_set<std::u16string> seen;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = 0; b < pts.size(); ++b)
      for (const Point& x : interpolate(pts.point(a), pts.point(b))) {
        const std::span<const Symbol> proj(x.data(), params_.n);
        if (distinct && !seen.emplace(proj.begin(), proj.end()).second) continue;
        if (out.size() >= cfg_.pair_cap)
          throw CapExceeded("pairs", "more than " + std::to_string(cfg_.pair_cap) + " points");
        out.push_back(proj);
      }
  return out;
}

std::string ShapeHittingSet::provenance() const {
  std::ostringstream os;
  os << "shape-hs m=" << params_.m << " n=" << params_.n << " eps=" << to_string(params_.eps)
     << " c=" << params_.c << " n'=" << params_.n_padded << " c_eff=" << params_.c_effective
     << " size=" << size().str() << " base={" << base_.provenance() << "}";
  return os.str();
}

ShapeHittingSet build_shape_hs(int m, int n, const Rational& eps, double c, const ShapeHSConfig& cfg) {
  NormalizedParams p = normalize(m, n, eps, c);
  ShapeHSConfig local = cfg;
  local.threshold.c = p.c_effective + 1e-9;
  ThresholdHittingSet base = build_threshold_hs(m, p.n_padded, p.threshold_eps, local.threshold);
  return ShapeHittingSet(std::move(p), std::move(base), std::move(local));
}

std::vector<HittingVerdict> verify_shapes(const ShapeHittingSet& hs, const std::vector<Shape>& corpus,
                                          const Rational& eps, int jobs) {
  std::vector<HittingVerdict> out(corpus.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < corpus.size() && !failed;) {
      try {
        HittingVerdict& v = out[i];
        v.shape_id = i;
        v.eps = eps;
        v.uniform_prob = acceptance_probability(corpus[i]).exact_prob;
        v.eligible = v.uniform_prob >= eps;
        if (v.eligible) {
          auto w = hs.find_hit(corpus[i]);
          if (w) {
            if (!evaluate(corpus[i], *w)) throw std::logic_error("shape witness is not accepted");
            v.hit = true;
            v.witness = std::move(w);
          }
        }
        v.failure = v.eligible && !v.hit;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(corpus.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace shapehit
