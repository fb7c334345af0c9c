#include "shapehit/expander.hpp"

#include "shapehit/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace shapehit {

namespace {

int ceil_sqrt(std::uint64_t n) {
  std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 1 && (r - 1) * (r - 1) >= n) --r;
  return static_cast<int>(std::max<std::uint64_t>(r, 1));
}

Eigen::MatrixXd dense_base(int r) {
  const int n = r * r;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  auto mod = [r](long long v) { return static_cast<int>(((v % r) + r) % r); };
  for (int x = 0; x < r; ++x)
    for (int y = 0; y < r; ++y) {
      const int v = x * r + y;
      const int nb[8][2] = {{mod(x + 2LL * y), y},     {mod(x - 2LL * y), y},
                            {mod(x + 2LL * y + 1), y}, {mod(x - 2LL * y - 1), y},
                            {x, mod(y + 2LL * x)},     {x, mod(y - 2LL * x)},
                            {x, mod(y + 2LL * x + 1)}, {x, mod(y - 2LL * x - 1)}};
      for (const auto& p : nb) a(v, p[0] * r + p[1]) += 1.0 / 8.0;
    }
  return a;
}

double second_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() <= 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending; the top one is the trivial 1
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 2)));
}

SpectralCertificate iterative_certificate(const ExpanderGraph& g) {
  const std::uint64_t n = g.vertex_count();
  SplitMix64 rng(0x5eed ^ n);
  std::vector<double> x(n);
  for (auto& xi : x) xi = static_cast<double>(rng.next() >> 11) / 9007199254740992.0 - 0.5;
  auto deflate_normalise = [](std::vector<double>& v) {
    double mean = 0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    double norm = 0;
    for (double& e : v) {
      e -= mean;
      norm += e * e;
    }
    norm = std::sqrt(norm);
    for (double& e : v) e /= norm;
  };
  deflate_normalise(x);
  const auto nb = g.base_table();
  std::vector<double> tmp(n), y(n);
  auto step = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::uint64_t v = 0; v < n; ++v) {
      const std::uint32_t* row = &nb[v * ExpanderGraph::kBaseDegree];
      double acc = 0;
      for (int d = 0; d < ExpanderGraph::kBaseDegree; ++d) acc += in[row[d]];
      out[v] = acc / ExpanderGraph::kBaseDegree;
    }
  };
  double estimate = 0.0;
  for (int it = 0; it < 5000; ++it) {
    step(x, tmp);
    step(tmp, y);
    double dot = 0;
    for (std::uint64_t i = 0; i < n; ++i) dot += x[i] * y[i];
    const double next = std::sqrt(std::max(0.0, dot));
    x.swap(y);
    deflate_normalise(x);
    if (it > 50 && std::abs(next - estimate) < 1e-10) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return {estimate + kIterativeTolerance, "iterative", kIterativeTolerance};
}

std::mutex cache_mutex;
std::map<int, SpectralCertificate>& certificate_cache() {
  static std::map<int, SpectralCertificate> cache;
  return cache;
}

}  // namespace

std::uint64_t ExpanderGraph::base_neighbor(std::uint64_t v, int d) const {
  const long long r = side_;
  long long x = static_cast<long long>(v / r), y = static_cast<long long>(v % r);
  switch (d) {
    case 0: x += 2 * y; break;
    case 1: x -= 2 * y; break;
    case 2: x += 2 * y + 1; break;
    case 3: x -= 2 * y + 1; break;
    case 4: y += 2 * x; break;
    case 5: y -= 2 * x; break;
    case 6: y += 2 * x + 1; break;
    case 7: y -= 2 * x + 1; break;
    default: throw std::out_of_range("base port");
  }
  x = ((x % r) + r) % r;
  y = ((y % r) + r) % r;
  return static_cast<std::uint64_t>(x * r + y);
}

std::span<const std::uint32_t> ExpanderGraph::base_table() const {
  std::call_once(table_->once, [&] {
    const std::uint64_t n = vertex_count();
    if (n > UINT32_MAX) throw CapExceeded("vertices", "neighbour table needs N < 2^32");
    table_->next.resize(n * kBaseDegree);
    for (std::uint64_t v = 0; v < n; ++v)
      for (int d = 0; d < kBaseDegree; ++d) table_->next[v * kBaseDegree + d] = static_cast<std::uint32_t>(base_neighbor(v, d));
  });
  return table_->next;
}

std::uint64_t ExpanderGraph::neighbor(std::uint64_t v, std::uint64_t port) const {
  if (port >= degree_) throw std::out_of_range("port");
  for (int i = 0; i < power_; ++i) {
    v = base_neighbor(v, static_cast<int>(port % kBaseDegree));
    port /= kBaseDegree;
  }
  return v;
}

std::vector<double> ExpanderGraph::apply(std::span<const double> x) const {
  const std::uint64_t n = vertex_count();
  if (x.size() != n) throw std::invalid_argument("vector size");
  std::vector<double> cur(x.begin(), x.end()), next(n);
  for (int s = 0; s < power_; ++s) {
    for (std::uint64_t v = 0; v < n; ++v) {
      double acc = 0;
      for (int d = 0; d < kBaseDegree; ++d) acc += cur[base_neighbor(v, d)];
      next[v] = acc / kBaseDegree;
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<BigInt> ExpanderGraph::apply_counts(std::span<const BigInt> x) const {
  const std::uint64_t n = vertex_count();
  if (x.size() != n) throw std::invalid_argument("vector size");
  std::vector<BigInt> cur(x.begin(), x.end()), next(n);
  for (int s = 0; s < power_; ++s) {
    for (std::uint64_t v = 0; v < n; ++v) {
      BigInt acc = 0;
      for (int d = 0; d < kBaseDegree; ++d) acc += cur[base_neighbor(v, d)];
      next[v] = std::move(acc);
    }
    cur.swap(next);
  }
  return cur;
}

ExpanderGraph base_expander(std::uint64_t n_target) {
  ExpanderGraph g;
  g.side_ = ceil_sqrt(std::max<std::uint64_t>(n_target, 1));
  g.power_ = 1;
  g.degree_ = ExpanderGraph::kBaseDegree;
  if (g.side_ == 1) {
    g.cert_ = {0.0, "trivial", 0.0};
    g.base_cert_ = g.cert_;
    return g;
  }
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = certificate_cache().find(g.side_);
    if (it != certificate_cache().end()) {
      g.cert_ = g.base_cert_ = it->second;
      return g;
    }
  }
  SpectralCertificate cert;
  if (g.vertex_count() <= kExactSpectrumLimit) {
    const double lambda = second_eigenvalue(dense_base(g.side_));
    cert = {lambda + kExactTolerance, "exact", kExactTolerance};
  } else {
    cert = iterative_certificate(g);
  }
  if (cert.lambda >= 1.0) throw std::runtime_error("expander certification failed: lambda >= 1");
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    certificate_cache()[g.side_] = cert;
  }
  g.cert_ = g.base_cert_ = cert;
  return g;
}

ExpanderGraph power(const ExpanderGraph& g, int t, std::uint64_t degree_cap) {
  if (t < 1) throw std::invalid_argument("power must be >= 1");
  ExpanderGraph out = g;
  out.power_ = g.power_ * t;
  std::uint64_t degree = 1;
  for (int i = 0; i < out.power_; ++i) {
    if (degree > degree_cap / ExpanderGraph::kBaseDegree)
      throw CapExceeded("degree", "8^" + std::to_string(out.power_) + " exceeds degree cap " +
                                      std::to_string(degree_cap));
    degree *= ExpanderGraph::kBaseDegree;
  }
  out.degree_ = degree;
  out.cert_ = {std::pow(g.cert_.lambda, t), g.cert_.method == "trivial" ? "trivial" : "power",
               g.cert_.tolerance};
  return out;
}

int powers_needed(double lambda0, double lambda_target) {
  if (lambda_target <= 0) throw std::invalid_argument("lambda target must be positive");
  if (lambda0 <= lambda_target) return 1;
  if (lambda0 >= 1) throw std::invalid_argument("base lambda must be < 1");
  int t = 1;
  double cur = lambda0;
  while (cur > lambda_target) {
    cur *= lambda0;
    ++t;
  }
  return t;
}

ExpanderGraph expander_for(std::uint64_t n_target, double lambda_target, std::uint64_t degree_cap) {
  ExpanderGraph base = base_expander(n_target);
  return power(base, powers_needed(base.lambda_bound(), lambda_target), degree_cap);
}

double exact_second_eigenvalue(const ExpanderGraph& g) {
  if (g.vertex_count() > kExactSpectrumLimit) throw CapExceeded("spectrum", "graph too large for dense spectrum");
  const Eigen::MatrixXd a = dense_base(g.side());
  Eigen::MatrixXd m = a;
  for (int i = 1; i < g.power(); ++i) m = m * a;
  return second_eigenvalue(m);
}

double rayleigh_check(const ExpanderGraph& g, int trials, std::uint64_t seed) {
  const std::uint64_t n = g.vertex_count();
  if (n <= 1) return 0.0;
  SplitMix64 rng(seed);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(n);
    double mean = 0;
    for (auto& xi : x) {
      xi = static_cast<double>(rng.next() >> 11) / 9007199254740992.0 - 0.5;
      mean += xi;
    }
    mean /= static_cast<double>(n);
    double nx = 0;
    for (auto& xi : x) {
      xi -= mean;
      nx += xi * xi;
    }
    if (nx == 0) continue;
    const auto y = g.apply(x);
    double ny = 0;
    for (double yi : y) ny += yi * yi;
    best = std::max(best, std::sqrt(ny / nx));
  }
  return best;
}

// Walk spaces -----------------------------------------------------------------

WalkSpace::WalkSpace(std::vector<ExpanderGraph> graphs, std::uint64_t vertex_count)
    : graphs_(std::move(graphs)), n_(vertex_count) {
  if (!graphs_.empty()) {
    if (n_ == 0) n_ = graphs_.front().vertex_count();
    for (const auto& g : graphs_)
      if (g.vertex_count() != n_) throw std::invalid_argument("walk space graphs must share a vertex set");
  }
  if (n_ == 0) throw std::invalid_argument("walk space needs at least one vertex");
}

BigInt WalkSpace::size() const {
  BigInt s = n_;
  for (const auto& g : graphs_) s *= g.degree();
  return s;
}

std::uint64_t WalkSpace::checked_size(std::uint64_t cap) const {
  const BigInt s = size();
  if (s > cap) throw CapExceeded("walks", "walk space of size " + s.str() + " exceeds cap");
  return static_cast<std::uint64_t>(s);
}

Walk WalkSpace::walk_at(std::uint64_t idx) const {
  Walk w;
  w.ports.resize(graphs_.size());
  for (std::size_t i = graphs_.size(); i-- > 0;) {
    w.ports[i] = idx % graphs_[i].degree();
    idx /= graphs_[i].degree();
  }
  if (idx >= n_) throw std::out_of_range("walk index");
  w.start = idx;
  return w;
}

std::vector<std::uint64_t> walk_vertices(const WalkSpace& ws, const Walk& w) {
  if (w.ports.size() != ws.length()) throw std::invalid_argument("walk length");
  std::vector<std::uint64_t> out(ws.length());
  std::uint64_t v = w.start;
  for (std::size_t i = 0; i < ws.length(); ++i) {
    v = ws.graphs()[i].neighbor(v, w.ports[i]);
    out[i] = v;
  }
  return out;
}

namespace {

void check_targets(const WalkSpace& ws, const std::vector<VertexSubset>& targets) {
  if (targets.size() != ws.length()) throw std::invalid_argument("one target set per step required");
  for (const auto& t : targets)
    if (t.size() != ws.vertex_count()) throw std::invalid_argument("target set size");
}

}  // namespace

Rational hitting_fraction(const WalkSpace& ws, const std::vector<VertexSubset>& targets) {
  check_targets(ws, targets);
  if (ws.size() < (BigInt(1) << 63)) {
    // Every partial count is at most the walk-space size.
    std::vector<std::uint64_t> count(ws.vertex_count(), 1), next(ws.vertex_count());
    for (std::size_t i = 0; i < ws.length(); ++i) {
      const ExpanderGraph& g = ws.graphs()[i];
      const auto nb = g.base_table();
      // Regular graphs map the all-ones start to the constant degree.
      const int first = i == 0 ? g.power() : 0;
      if (i == 0) std::fill(count.begin(), count.end(), g.degree());
      for (int s = first; s < g.power(); ++s) {
        for (std::uint64_t v = 0; v < ws.vertex_count(); ++v) {
          std::uint64_t acc = 0;
          const std::uint32_t* row = &nb[v * ExpanderGraph::kBaseDegree];
          for (int d = 0; d < ExpanderGraph::kBaseDegree; ++d) acc += count[row[d]];
          next[v] = acc;
        }
        count.swap(next);
      }
      for (std::uint64_t v = 0; v < ws.vertex_count(); ++v)
        if (!targets[i][v]) count[v] = 0;
    }
    std::uint64_t total = 0;
    for (auto c : count) total += c;
    return Rational(BigInt(total), ws.size());
  }
  std::vector<BigInt> count(ws.vertex_count(), BigInt(1));
  for (std::size_t i = 0; i < ws.length(); ++i) {
    count = ws.graphs()[i].apply_counts(count);
    for (std::uint64_t v = 0; v < ws.vertex_count(); ++v)
      if (!targets[i][v]) count[v] = 0;
  }
  BigInt total = 0;
  for (const auto& c : count) total += c;
  return Rational(total, ws.size());
}

Rational hitting_fraction_enumerated(const WalkSpace& ws, const std::vector<VertexSubset>& targets,
                                     std::uint64_t cap) {
  check_targets(ws, targets);
  const std::uint64_t size = ws.checked_size(cap);
  std::uint64_t good = 0;
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    const auto vs = walk_vertices(ws, ws.walk_at(idx));
    bool ok = true;
    for (std::size_t i = 0; ok && i < vs.size(); ++i) ok = targets[i][vs[i]];
    good += ok;
  }
  return Rational(BigInt(good), BigInt(size));
}

std::vector<std::pair<double, double>> walk_norm_trace(const WalkSpace& ws,
                                                       const std::vector<VertexSubset>& targets) {
  check_targets(ws, targets);
  std::vector<double> u(ws.vertex_count(), 1.0 / static_cast<double>(ws.vertex_count()));
  std::vector<std::pair<double, double>> trace;
  for (std::size_t i = 0; i < ws.length(); ++i) {
    u = ws.graphs()[i].apply(u);
    double l1 = 0, l2 = 0;
    for (std::uint64_t v = 0; v < ws.vertex_count(); ++v) {
      if (!targets[i][v]) u[v] = 0;
      l1 += std::abs(u[v]);
      l2 += u[v] * u[v];
    }
    trace.emplace_back(l1, std::sqrt(l2));
  }
  return trace;
}

Rational walk_hitting_bound(const std::vector<Rational>& densities) {
  Rational out = 1;
  for (const auto& p : densities) out *= Rational(3, 4) * p;
  return out;
}

bool walk_lemma_hypothesis(const WalkSpace& ws, const std::vector<Rational>& densities) {
  if (densities.size() != ws.length()) throw std::invalid_argument("one density per step required");
  Rational prev = 1;
  for (std::size_t i = 0; i < ws.length(); ++i) {
    if (Rational(ws.graphs()[i].lambda_bound()) > densities[i] * prev / 8) return false;
    prev = densities[i];
  }
  return true;
}

std::vector<double> parallel_component(std::span<const double> x) {
  double mean = 0;
  for (double e : x) mean += e;
  if (!x.empty()) mean /= static_cast<double>(x.size());
  return std::vector<double>(x.size(), mean);
}

PaddedExpander padded_expander(std::uint64_t set_size, double lambda_target, std::uint64_t degree_cap) {
  if (set_size < 1) throw std::invalid_argument("set size must be >= 1");
  const std::uint64_t r = static_cast<std::uint64_t>(ceil_sqrt(set_size));
  const std::uint64_t n = r * r;
  // Each element has at least floor(n/s) preimages, so a density p becomes at
  // least p * floor(n/s) * s / n.
  const double shrink = static_cast<double>((n / set_size) * set_size) / static_cast<double>(n);
  return {expander_for(set_size, lambda_target * shrink * shrink, degree_cap), set_size};
}

}  // namespace shapehit
