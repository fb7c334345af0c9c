#include "shapehit/oracle.hpp"

#include <algorithm>
#include <thread>

namespace shapehit {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

std::vector<Rational> count_distribution(std::span<const Rational> p) {
  std::vector<Rational> dist{Rational(1)};
  for (const Rational& pi : p) {
    if (pi < 0 || pi > 1) throw std::invalid_argument("probability outside [0,1]");
    std::vector<Rational> next(dist.size() + 1);
    const Rational qi = 1 - pi;
    for (std::size_t w = 0; w < dist.size(); ++w) {
      next[w] += dist[w] * qi;
      next[w + 1] += dist[w] * pi;
    }
    dist = std::move(next);
  }
  return dist;
}

std::vector<BigInt> count_histogram(const Shape& shape) {
  // Coefficients of prod_i (|A_i| x + (m - |A_i|)).
  std::vector<BigInt> hist{BigInt(1)};
  for (int i = 0; i < shape.n(); ++i) {
    const int in = shape.set_size(i);
    const int out = shape.m() - in;
    std::vector<BigInt> next(hist.size() + 1);
    for (std::size_t w = 0; w < hist.size(); ++w) {
      if (hist[w] == 0) continue;
      if (out) next[w] += hist[w] * out;
      if (in) next[w + 1] += hist[w] * in;
    }
    hist = std::move(next);
  }
  return hist;
}

AcceptanceReport acceptance_probability(const Shape& shape) {
  auto hist = count_histogram(shape);
  BigInt accepted = 0;
  for (int w = 0; w <= shape.n(); ++w)
    if (shape.sym().accepts(w)) accepted += hist[w];
  BigInt total = boost::multiprecision::pow(BigInt(shape.m()), static_cast<unsigned>(shape.n()));
  return {Rational(accepted, total), OracleMethod::dp, 0};
}

AcceptanceReport acceptance_exhaustive(const Shape& shape, std::uint64_t cutoff) {
  const std::uint64_t total = domain_size(shape.m(), shape.n(), cutoff);
  std::uint64_t accepted = 0;
  for_each_string(shape.m(), shape.n(), [&](std::span<const Symbol> x) {
    if (evaluate(shape, x)) ++accepted;
    return true;
  });
  return {Rational(BigInt(accepted), BigInt(total)), OracleMethod::exhaustive, 0};
}

AcceptanceReport monte_carlo_acceptance(const Shape& shape, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  SplitMix64 rng(seed);
  Point x(shape.n());
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& xi : x) xi = static_cast<Symbol>(1 + rng.below(static_cast<std::uint64_t>(shape.m())));
    if (evaluate(shape, x)) ++hits;
  }
  return {Rational(BigInt(hits), BigInt(samples)), OracleMethod::monte_carlo, samples};
}

namespace {

HittingVerdict verdict_for(const PointSet& points, const Shape& shape, std::size_t id, const Rational& eps) {
  HittingVerdict v;
  v.shape_id = id;
  v.eps = eps;
  v.uniform_prob = acceptance_probability(shape).exact_prob;
  v.eligible = v.uniform_prob >= eps;
  const int n = shape.n();
  const auto& raw = points.raw();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Symbol* x = raw.data() + i * n;
    int count = 0;
    for (int j = 0; j < n; ++j) count += shape.contains(j, x[j]);
    if (shape.sym().accepts(count)) {
      v.hit = true;
      v.witness = Point(x, x + n);
      break;
    }
  }
  v.failure = v.eligible && !v.hit;
  return v;
}

}  // namespace

std::vector<HittingVerdict> verify_hitting(const PointSet& points, const std::vector<Shape>& corpus,
                                           const Rational& eps, int jobs) {
  for (const auto& s : corpus)
    if (s.m() != points.m() || s.n() != points.n())
      throw std::invalid_argument("corpus/point set parameter mismatch");
  // First-occurrence dedup keeps the earliest witness in enumeration order.
  const PointSet distinct = points.distinct();
  std::vector<HittingVerdict> out(corpus.size());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(corpus.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) out[i] = verdict_for(distinct, corpus[i], i, eps);
    return out;
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < corpus.size(); i += jobs) out[i] = verdict_for(distinct, corpus[i], i, eps);
    });
  }
  for (auto& t : workers) t.join();
  return out;
}

std::size_t count_failures(const std::vector<HittingVerdict>& verdicts) {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const HittingVerdict& v) { return v.failure; }));
}

std::string format_point(std::span<const Symbol> x, char sep) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(x[i]);
  }
  return out;
}

std::string format_verdict(const HittingVerdict& v) {
  return std::to_string(v.shape_id) + " prob=" + to_string(v.uniform_prob) + " eps=" + to_string(v.eps) +
         " hit=" + (v.hit ? "1" : "0") + " witness=" + (v.witness ? format_point(*v.witness) : "-");
}

}  // namespace shapehit
