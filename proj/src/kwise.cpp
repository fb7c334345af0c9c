#include "shapehit/kwise.hpp"

#include <map>
#include <mutex>

namespace shapehit {

namespace {

using Poly = std::vector<int>;  // coefficients over GF(p), low degree first

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int inverse_mod(int a, int p) {
  // p is prime; Fermat.
  long long r = 1, b = a % p;
  for (int e = p - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
  }
  return static_cast<int>(r);
}

// Remainder of a mod b over GF(p); b nonzero.
Poly poly_mod(Poly a, const Poly& b, int p) {
  trim(a);
  const int db = static_cast<int>(b.size()) - 1;
  const int inv_lead = inverse_mod(b.back(), p);
  while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
    const int shift = static_cast<int>(a.size()) - 1 - db;
    const int factor = a.back() * inv_lead % p;
    for (int i = 0; i <= db; ++i) a[shift + i] = ((a[shift + i] - factor * b[i]) % p + p) % p;
    trim(a);
  }
  return a;
}

bool is_irreducible(const Poly& f, int p) {
  const int e = static_cast<int>(f.size()) - 1;
  for (int d = 1; d <= e / 2; ++d) {
    // All monic polynomials of degree d.
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
      Poly g(d + 1);
      long long v = idx;
      for (int i = 0; i < d; ++i) {
        g[i] = static_cast<int>(v % p);
        v /= p;
      }
      g[d] = 1;
      if (poly_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

Poly to_digits(int a, int p, int e) {
  Poly d(e);
  for (int i = 0; i < e; ++i) {
    d[i] = a % p;
    a /= p;
  }
  return d;
}

int from_digits(const Poly& d, int p) {
  int v = 0;
  for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) v = v * p + d[i];
  return v;
}

int int_pow(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return static_cast<int>(r);
}

}  // namespace

GaloisField::GaloisField(int p, int e) : p_(p), e_(e), q_(int_pow(p, e)) {
  if (p < 2 || e < 1) throw std::invalid_argument("GaloisField needs prime p >= 2 and e >= 1");
  if (q_ > (1 << 20)) throw CapExceeded("field-order", "GF(" + std::to_string(p) + "^" + std::to_string(e) + ")");

  // Lowest monic irreducible polynomial of degree e in base-p order.
  for (int idx = 0; idx < q_; ++idx) {
    Poly f = to_digits(idx, p, e);
    f.push_back(1);
    if (e > 1 && f[0] == 0) continue;
    if (is_irreducible(f, p)) {
      modulus_ = f;
      break;
    }
  }
  if (modulus_.empty()) throw std::logic_error("no irreducible polynomial found");

  auto slow_mul = [&](int a, int b) {
    Poly da = to_digits(a, p, e), db = to_digits(b, p, e);
    Poly prod(2 * e, 0);
    for (int i = 0; i < e; ++i)
      for (int j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
    Poly r = poly_mod(prod, modulus_, p);
    r.resize(e, 0);
    return from_digits(r, p);
  };

  exp_.assign(q_, 0);
  log_.assign(q_, 0);
  for (int g = (q_ == 2 ? 1 : 2); g < q_; ++g) {
    int x = 1;
    int order = 0;
    bool ok = true;
    for (int i = 0; i < q_ - 1; ++i) {
      if (x == 1 && i > 0) {
        ok = false;
        break;
      }
      exp_[i] = x;
      x = slow_mul(x, g);
      ++order;
    }
    if (ok && x == 1 && order == q_ - 1) break;
    if (g == q_ - 1) throw std::logic_error("no primitive element found");
  }
  for (int i = 0; i < q_ - 1; ++i) log_[exp_[i]] = i;

  if (p_ != 2 && q_ <= 2048) {
    add_table_.resize(static_cast<std::size_t>(q_) * q_);
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b) {
        int v = 0, scale = 1, x = a, y = b;
        for (int i = 0; i < e_; ++i) {
          v += ((x % p_ + y % p_) % p_) * scale;
          x /= p_;
          y /= p_;
          scale *= p_;
        }
        add_table_[static_cast<std::size_t>(a) * q_ + b] = static_cast<std::uint16_t>(v);
      }
  }
}

int GaloisField::add(int a, int b) const {
  if (p_ == 2) return a ^ b;
  if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * q_ + b];
  int v = 0, scale = 1;
  for (int i = 0; i < e_; ++i) {
    v += ((a % p_ + b % p_) % p_) * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return v;
}

int GaloisField::pow(int a, int k) const {
  if (k == 0) return 1;
  if (a == 0) return 0;
  long long s = static_cast<long long>(log_[a]) * k % (q_ - 1);
  return exp_[s];
}

std::shared_ptr<const GaloisField> GaloisField::get(int p, int e) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const GaloisField>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, e}];
  if (!slot) slot = std::make_shared<const GaloisField>(p, e);
  return slot;
}

std::vector<std::pair<int, int>> factor_prime_powers(int m) {
  std::vector<std::pair<int, int>> out;
  for (int p = 2; static_cast<long long>(p) * p <= m; ++p) {
    if (m % p) continue;
    int a = 0;
    while (m % p == 0) {
      m /= p;
      ++a;
    }
    out.emplace_back(p, a);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

// KWiseSpace ----------------------------------------------------------------

KWiseSpace::KWiseSpace(int m, int n, int k, std::uint64_t seed_cap) : m_(m), n_(n), k_(k) {
  if (m < 1) throw std::invalid_argument("k-wise space needs m >= 1");
  if (n < 1) throw std::invalid_argument("k-wise space needs n >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("k-wise space needs 1 <= k <= n");
  for (auto [p, a] : factor_prime_powers(m)) {
    // Smallest e >= a with p^e >= n, so n distinct evaluation points exist
    // and the first a digits give a balanced projection onto [p^a].
    int e = a;
    while (int_pow(p, e) < n) ++e;
    Factor f{p, a, int_pow(p, a), GaloisField::get(p, e)};
    for (int i = 0; i < k; ++i) {
      const auto q = static_cast<std::uint64_t>(f.field->order());
      if (seed_count_ > seed_cap / q)
        throw CapExceeded("kwise-seeds", "k-wise space m=" + std::to_string(m) + " n=" + std::to_string(n) +
                                             " k=" + std::to_string(k) + " exceeds seed cap " +
                                             std::to_string(seed_cap));
      seed_count_ *= q;
    }
    factors_.push_back(std::move(f));
  }
  for (const auto& f : factors_) {
    std::vector<std::vector<int>> table(n, std::vector<int>(k));
    for (int j = 0; j < n; ++j)
      for (int d = 0; d < k; ++d) table[j][d] = f.field->pow(j, d);
    powers_.push_back(std::move(table));
    // CRT weight: e_f = (m/M) * ((m/M)^{-1} mod M).
    const long long rest = m / f.modulus;
    long long inv = 0;
    for (long long c = 0; c < f.modulus; ++c)
      if ((rest * c) % f.modulus == 1 % f.modulus) {
        inv = c;
        break;
      }
    crt_weight_.push_back(static_cast<std::uint64_t>(rest * inv % m));
  }
}

std::vector<std::vector<int>> KWiseSpace::coefficients(std::uint64_t seed_index) const {
  if (seed_index >= seed_count_) throw std::out_of_range("seed index out of range");
  std::vector<std::vector<int>> coeffs(factors_.size(), std::vector<int>(k_));
  // Least significant digit is the last coefficient of the last factor.
  for (std::size_t fi = factors_.size(); fi-- > 0;) {
    const auto q = static_cast<std::uint64_t>(factors_[fi].field->order());
    for (int d = k_; d-- > 0;) {
      coeffs[fi][d] = static_cast<int>(seed_index % q);
      seed_index /= q;
    }
  }
  return coeffs;
}

void KWiseSpace::sample_into(std::uint64_t seed_index, std::span<Symbol> out) const {
  if (static_cast<int>(out.size()) != n_) throw std::invalid_argument("output span has wrong length");
  const auto coeffs = coefficients(seed_index);
  std::vector<std::uint64_t> acc(n_, 0);
  for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
    const auto& f = factors_[fi];
    const GaloisField& field = *f.field;
    for (int j = 0; j < n_; ++j) {
      int v = 0;
      for (int d = 0; d < k_; ++d) v = field.add(v, field.mul(coeffs[fi][d], powers_[fi][j][d]));
      const auto residue = static_cast<std::uint64_t>(v % f.modulus);
      acc[j] = (acc[j] + residue * crt_weight_[fi]) % static_cast<std::uint64_t>(m_);
    }
  }
  for (int j = 0; j < n_; ++j) out[j] = static_cast<Symbol>(acc[j] + 1);
}

Point KWiseSpace::sample(std::uint64_t seed_index) const {
  Point x(n_);
  sample_into(seed_index, x);
  return x;
}

PointSet KWiseSpace::enumerate() const {
  PointSet out(m_, n_, label());
  out.reserve(seed_count_);
  Point x(n_);
  for (std::uint64_t s = 0; s < seed_count_; ++s) {
    sample_into(s, x);
    out.push_back(x);
  }
  return out;
}

std::string KWiseSpace::label() const {
  std::string fields;
  for (const auto& f : factors_) {
    if (!fields.empty()) fields += "*";
    fields += "GF(" + std::to_string(f.field->order()) + ")";
  }
  return "kwise m=" + std::to_string(m_) + " n=" + std::to_string(n_) + " k=" + std::to_string(k_) +
         " fields=" + (fields.empty() ? "-" : fields);
}

KWiseSpace make_pairwise(int m, int n, std::uint64_t seed_cap) { return KWiseSpace(m, n, std::min(2, n), seed_cap); }

int rect_kwise_independence(int n, const Rational& eps, int kappa) {
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  const int k = kappa * ceil_log2_inverse(eps);
  return std::max(1, std::min(n, k));
}

PointSet rect_hs_kwise(int m, int n, const Rational& eps, int kappa, std::uint64_t seed_cap) {
  if (eps <= 0 || eps > 1) throw std::invalid_argument("eps must lie in (0,1]");
  KWiseSpace space(m, n, rect_kwise_independence(n, eps, kappa), seed_cap);
  PointSet out = space.enumerate();
  out.set_provenance("rect-hs " + space.label() + " eps=" + to_string(eps) + " kappa=" + std::to_string(kappa));
  return out;
}

// ShapePrg ------------------------------------------------------------------

PointSet ShapePrg::range() const {
  PointSet out(m(), n(), label());
  out.reserve(seed_count());
  Point x(n());
  for (std::uint64_t s = 0; s < seed_count(); ++s) {
    sample_into(s, x);
    out.push_back(x);
  }
  return out;
}

namespace {

int prg_independence(int n, const Rational& error) {
  const int k = std::max(4, (2 * ceil_log2_inverse(error)));
  return std::min(n, k);
}

}  // namespace

KWisePrg::KWisePrg(int m, int n, const Rational& error, std::uint64_t seed_cap)
    : space_(m, n, prg_independence(n, error), seed_cap) {}

KWisePrg::KWisePrg(int m, int n, int k, std::uint64_t seed_cap) : space_(m, n, std::min(k, n), seed_cap) {}

ExhaustivePrg::ExhaustivePrg(int m, int n, std::uint64_t cap) : m_(m), n_(n), size_(domain_size(m, n, cap)) {}

void ExhaustivePrg::sample_into(std::uint64_t seed, std::span<Symbol> out) const {
  if (seed >= size_) throw std::out_of_range("seed out of range");
  for (int j = n_; j-- > 0;) {
    out[j] = static_cast<Symbol>(seed % static_cast<std::uint64_t>(m_) + 1);
    seed /= static_cast<std::uint64_t>(m_);
  }
}

std::string ExhaustivePrg::label() const {
  return "prg:exhaustive m=" + std::to_string(m_) + " n=" + std::to_string(n_);
}

std::unique_ptr<ShapePrg> make_shape_prg(PrgKind kind, int m, int n, const Rational& error, std::uint64_t cap) {
  if (kind == PrgKind::exhaustive) return std::make_unique<ExhaustivePrg>(m, n, cap);
  return std::make_unique<KWisePrg>(m, n, error, cap);
}

}  // namespace shapehit
