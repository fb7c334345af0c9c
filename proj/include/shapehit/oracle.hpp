#pragma once

// Ground truth for every construction: exact acceptance probabilities by the
// Poisson-binomial recurrence, exhaustive cross-checks, hitting verdicts, and
// a seeded Monte Carlo estimator used only for diagnostics.

#include "shapehit/core.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapehit {

/// SplitMix64 (Steele, Lea, Flood). Deterministic given the seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by rejection; bound >= 1.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

enum class OracleMethod { dp, exhaustive, monte_carlo };

struct AcceptanceReport {
  Rational exact_prob;  // for monte_carlo: hits / samples
  OracleMethod method = OracleMethod::dp;
  std::uint64_t sample_count = 0;
};

/// Distribution of sum X_i for independent X_i ~ Bernoulli(p_i); entry w is
/// Pr[sum = w].
std::vector<Rational> count_distribution(std::span<const Rational> p);

/// Number of strings x in [m]^n with exactly w accepting coordinates, for
/// w = 0..n. Summing to m^n.
std::vector<BigInt> count_histogram(const Shape& shape);

AcceptanceReport acceptance_probability(const Shape& shape);

/// Enumerates [m]^n; throws CapExceeded("domain") above `cutoff` strings.
AcceptanceReport acceptance_exhaustive(const Shape& shape, std::uint64_t cutoff = std::uint64_t{1} << 20);

AcceptanceReport monte_carlo_acceptance(const Shape& shape, std::uint64_t samples, std::uint64_t seed);

struct HittingVerdict {
  std::size_t shape_id = 0;
  Rational uniform_prob;
  Rational eps;
  bool eligible = false;  // uniform_prob >= eps
  bool hit = false;
  std::optional<Point> witness;
  bool failure = false;   // eligible && !hit
};

/// For each shape, reports whether the point set contains an accepted point
/// (first witness in enumeration order). Shapes whose uniform acceptance is
/// below eps carry no obligation but are still scanned.
std::vector<HittingVerdict> verify_hitting(const PointSet& points, const std::vector<Shape>& corpus,
                                           const Rational& eps, int jobs = 1);

std::size_t count_failures(const std::vector<HittingVerdict>& verdicts);

/// "<id> prob=<rational> eps=<rational> hit=<0|1> witness=<point|->", with
/// the witness written as comma-separated symbols.
std::string format_verdict(const HittingVerdict& v);

std::string format_point(std::span<const Symbol> x, char sep = ',');

}  // namespace shapehit
