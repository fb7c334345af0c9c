#pragma once

// Perfect hash families [n] -> [t] and the two-level fractional perfect hash
// family: pairwise top-level hashing into B buckets, guessed bucket sizes,
// expander-walk correlated second-level hashes, and a canonical folding map.

#include "shapehit/core.hpp"
#include "shapehit/expander.hpp"
#include "shapehit/kwise.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapehit {

/// The t-wise independent family [n] -> [t]; each member is 1-1 on a fixed
/// t-set with probability exactly t!/t^t >= e^{-t}.
class PerfectHashFamily {
 public:
  PerfectHashFamily(int n, int t, std::uint64_t seed_cap = std::uint64_t{1} << 24);

  int n() const { return n_; }
  int t() const { return t_; }
  std::uint64_t member_count() const { return space_.seed_count(); }

  /// Bucket in [1, t] of element j in [1, n].
  int eval(std::uint64_t member, int j) const;
  std::vector<int> buckets(std::uint64_t member) const;
  bool injective_on(std::uint64_t member, std::span<const int> subset) const;
  /// Fraction of members that are 1-1 on `subset`.
  Rational separation_fraction(std::span<const int> subset) const;

  /// Recorded guarantee: every t-set is separated by >= beta * gamma^{-t}.
  static constexpr double kBeta = 1.0;
  static constexpr double kGamma = 2.718281828459045;
  /// t!/t^t.
  static Rational exact_fraction(int t);

  std::string label() const;

 private:
  int n_, t_;
  KWiseSpace space_;
};

struct FractionalConfig {
  /// Number of top-level buckets; 0 picks the smallest prime power >= bucket_factor * t.
  int top_buckets = 0;
  int bucket_factor = 2;
  /// Bucket-size guesses: y_i = 1 + e_i on buckets outside I', with sum e_i <= excess.
  int excess = 0;
  /// Second-level walks use an expander with lambda at or below this value.
  double walk_lambda = 0.75;
  std::uint64_t degree_cap = std::uint64_t{1} << 12;
  std::uint64_t member_cap = std::uint64_t{1} << 32;
  std::uint64_t seed_cap = std::uint64_t{1} << 24;
};

class FractionalHashFamily {
 public:
  struct Guess {
    std::vector<int> iprime;  // t top-level buckets, 0-based, increasing
    std::vector<int> y;       // per bucket; 0 on I'
    std::vector<int> steps;   // buckets with y > 1, increasing; one walk step each
    std::uint64_t walk_count = 1;
  };

  struct Member {
    std::uint64_t index = 0;
    std::uint64_t h1_seed = 0;
    std::size_t guess = 0;
    Walk walk;
  };

  FractionalHashFamily(int n, int t, FractionalConfig config = {});

  int n() const { return n_; }
  int t() const { return t_; }
  int top_buckets() const { return buckets_; }
  const FractionalConfig& config() const { return config_; }
  const KWiseSpace& top_level() const { return *h1_; }
  const std::vector<Guess>& guesses() const { return guesses_; }
  std::uint64_t members_per_top_seed() const { return per_h1_; }
  std::uint64_t member_count() const { return member_count_; }
  /// Second-level expander (absent when no guess needs a walk).
  const std::optional<ExpanderGraph>& walk_graph() const { return graph_; }

  Member member(std::uint64_t index) const;

  /// Pairwise space [n] -> [y] for second-level hashing.
  const KWiseSpace& second_level(int y) const;
  /// Seed of h_{2,i} selected by walk vertex v.
  std::uint64_t second_level_seed(int y, std::uint64_t vertex) const;

  /// h(j) in [1, t] for j in [1, n].
  int eval(const Member& m, int j) const;
  /// h(1..n), computed in one pass.
  std::vector<int> eval_all(const Member& m) const;

  /// eval_all with the top-level hash h1 = top_level().sample(m.h1_seed) supplied.
  void eval_with_top(const Member& m, std::span<const Symbol> h1, std::span<int> out) const;

  std::string label() const;

 private:

  int n_, t_, buckets_;
  FractionalConfig config_;
  std::unique_ptr<KWiseSpace> h1_;
  std::vector<Guess> guesses_;
  std::vector<std::uint64_t> guess_offset_;
  std::uint64_t per_h1_ = 0;
  std::uint64_t member_count_ = 0;
  std::optional<ExpanderGraph> graph_;
  std::map<int, std::unique_ptr<KWiseSpace>> level2_;
  std::map<int, PointSet> level2_table_;
};

/// Smallest prime power >= x (x >= 1; returns 1 for x = 1).
int next_prime_power(int x);

struct FractionalCertificate {
  std::uint64_t members = 0;
  std::uint64_t good = 0;
  Rational fraction;
  std::optional<std::uint64_t> witness;
  Rational z_sum;
};

/// Fraction of members h with z(h^{-1}(i)) in [0.1, 100] for all i after
/// scaling z to total 10t. Throws std::invalid_argument when sum z < 10t or
/// some z_j lies outside [0, 1].
FractionalCertificate certify_fractional(const FractionalHashFamily& family, const std::vector<Rational>& z,
                                         int jobs = 1);

/// The interval [0.01 sum/t, 10 sum/t] for unnormalised loads.
std::pair<Rational, Rational> fractional_load_bounds(const std::vector<Rational>& z, int t);

/// Top-level statistics over all seeds of a pairwise space [n] -> [B].
struct TopLevelStats {
  std::uint64_t seeds = 0;
  std::uint64_t e1_seeds = 0;          // Y <= 2 (10t)^2 / B
  std::uint64_t e1_medium_seeds = 0;   // ... and >= 0.2 B buckets with X_i in [0.1, 10]
  int min_medium_given_e1 = -1;
};

TopLevelStats top_level_stats(const KWiseSpace& h1, const std::vector<Rational>& z, int t);

/// For alpha in [0,1]^m: sum alpha > 2 implies sum_{j1 != j2} alpha_j1 alpha_j2 > 2.
bool pairwise_mass_implication(const std::vector<Rational>& alpha);

/// Largest normalised cell load z(S_{i,k}) over buckets i outside I'.
Rational max_cell_load(const FractionalHashFamily& family, const FractionalHashFamily::Member& m,
                       const std::vector<Rational>& z);

}  // namespace shapehit
