#pragma once

// Explicit k-wise independent spaces over [m]^n: random polynomials of degree
// < k over GF(p^e), evaluated at n distinct points and projected onto
// [p^a]; general m is handled by CRT over its prime-power factors.

#include "shapehit/core.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace shapehit {

/// GF(p^e) with elements encoded as integers in [0, q): the base-p digits
/// are the coefficients in the polynomial basis {1, x, x^2, ...}.
class GaloisField {
 public:
  GaloisField(int p, int e);

  int characteristic() const { return p_; }
  int degree() const { return e_; }
  int order() const { return q_; }

  int add(int a, int b) const;
  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    int s = log_[a] + log_[b];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }
  int pow(int a, int k) const;

  const std::vector<int>& modulus() const { return modulus_; }

  /// Shared instance per (p, e).
  static std::shared_ptr<const GaloisField> get(int p, int e);

 private:
  int p_, e_, q_;
  std::vector<int> modulus_;  // monic irreducible, low degree first, size e+1
  std::vector<int> exp_, log_;
  std::vector<std::uint16_t> add_table_;  // odd p, small q
};

/// Prime-power factorisation of m, ascending primes.
std::vector<std::pair<int, int>> factor_prime_powers(int m);

class KWiseSpace {
 public:
  struct Factor {
    int prime = 0;
    int exponent = 0;   // factor = prime^exponent
    int modulus = 0;
    std::shared_ptr<const GaloisField> field;
  };

  /// Throws CapExceeded("kwise-seeds") when the seed count exceeds seed_cap.
  KWiseSpace(int m, int n, int k, std::uint64_t seed_cap = std::uint64_t{1} << 32);

  int m() const { return m_; }
  int n() const { return n_; }
  int k() const { return k_; }
  std::uint64_t seed_count() const { return seed_count_; }
  const std::vector<Factor>& factors() const { return factors_; }

  /// Seeds are ordered lexicographically over the concatenated coefficient
  /// vectors (factor by ascending prime; constant coefficient first).
  Point sample(std::uint64_t seed_index) const;
  void sample_into(std::uint64_t seed_index, std::span<Symbol> out) const;

  /// Coefficients (per factor, constant first) of a seed.
  std::vector<std::vector<int>> coefficients(std::uint64_t seed_index) const;

  /// The full multiset of outputs, in seed order.
  PointSet enumerate() const;

  std::string label() const;

 private:
  int m_, n_, k_;
  std::uint64_t seed_count_ = 1;
  std::vector<Factor> factors_;
  std::vector<std::vector<std::vector<int>>> powers_;  // [factor][coord][degree]
  std::vector<std::uint64_t> crt_weight_;
};

/// Pairwise independent space (k = 2, clamped to n).
KWiseSpace make_pairwise(int m, int n, std::uint64_t seed_cap = std::uint64_t{1} << 32);

/// Independence used by the rectangle hitting set: min(n, kappa*ceil(log2(1/eps))), at least 1.
int rect_kwise_independence(int n, const Rational& eps, int kappa);

/// Full enumeration of a k-wise space that hits every rectangle with
/// uniform acceptance >= eps.
PointSet rect_hs_kwise(int m, int n, const Rational& eps, int kappa = 4,
                       std::uint64_t seed_cap = std::uint64_t{1} << 24);

/// Pluggable generator for shapes; the default is a k-wise space, the
/// alternative the exhaustive domain.
class ShapePrg {
 public:
  virtual ~ShapePrg() = default;
  virtual int m() const = 0;
  virtual int n() const = 0;
  virtual std::uint64_t seed_count() const = 0;
  virtual void sample_into(std::uint64_t seed, std::span<Symbol> out) const = 0;
  virtual std::string label() const = 0;

  PointSet range() const;
};

class KWisePrg final : public ShapePrg {
 public:
  /// k = max(4, ceil(2*log2(1/error))), clamped to n.
  KWisePrg(int m, int n, const Rational& error, std::uint64_t seed_cap = std::uint64_t{1} << 24);
  KWisePrg(int m, int n, int k, std::uint64_t seed_cap = std::uint64_t{1} << 24);

  int m() const override { return space_.m(); }
  int n() const override { return space_.n(); }
  std::uint64_t seed_count() const override { return space_.seed_count(); }
  void sample_into(std::uint64_t seed, std::span<Symbol> out) const override { space_.sample_into(seed, out); }
  std::string label() const override { return "prg:" + space_.label(); }
  const KWiseSpace& space() const { return space_; }

 private:
  KWiseSpace space_;
};

class ExhaustivePrg final : public ShapePrg {
 public:
  ExhaustivePrg(int m, int n, std::uint64_t cap = std::uint64_t{1} << 24);

  int m() const override { return m_; }
  int n() const override { return n_; }
  std::uint64_t seed_count() const override { return size_; }
  void sample_into(std::uint64_t seed, std::span<Symbol> out) const override;
  std::string label() const override;

 private:
  int m_, n_;
  std::uint64_t size_;
};

enum class PrgKind { kwise, exhaustive };

std::unique_ptr<ShapePrg> make_shape_prg(PrgKind kind, int m, int n, const Rational& error,
                                         std::uint64_t cap = std::uint64_t{1} << 24);

}  // namespace shapehit
