#pragma once

// Hitting sets for combinatorial thresholds. Every branch is a union of walk
// blocks: a hash member splits [n] into buckets, a walk on an expander whose
// vertices index a point table picks one table point per bucket, and the
// output takes the coordinates of bucket i from the i-th walk vertex.
// Blocks are enumerated lazily; extreme accepting counts over the whole
// multiset are found by dynamic programming over walks.

#include "shapehit/expander.hpp"
#include "shapehit/hashing.hpp"
#include "shapehit/kwise.hpp"
#include "shapehit/oracle.hpp"
#include "shapehit/rect_hs.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shapehit {

struct ThresholdHSConfig {
  double c = 1.0;
  /// High weight means w(f) >= C log2 n.
  double C = 4.0;
  /// Multipliers of c: c_1 = c1 * c and so on.
  double c1 = 2.0;
  double c2 = 2.0;
  double c3 = 2.0;
  double c4 = 2.0;
  double c_prime = 3.0;
  double c4_prime = 2.0;
  /// eta' guesses satisfy prod 1/eta'_i <= n^{g c}.
  double g = 3.0;

  PrgKind prg = PrgKind::kwise;
  /// The shape generator is built with error prg_alpha / 2.
  Rational prg_alpha{1, 2};

  /// Bucket counts (theta in the small-set branch, t in the general branch) stop here.
  int max_buckets = 3;
  int max_walk_power = 1;
  /// Rectangle tables: independence min(rect_k_cap, rect_kappa * ceil(log2 n^{c_1})).
  int rect_kappa = 1;
  int rect_k_cap = 4;
  /// Per-bucket rectangle tables in the general branch (aC-wise spaces).
  int table_a = 4;
  int table_C = 1;
  FractionalConfig hash;

  std::uint64_t seed_cap = std::uint64_t{1} << 24;
  std::uint64_t member_cap = std::uint64_t{1} << 24;
  std::uint64_t guess_cap = std::uint64_t{1} << 20;
  std::uint64_t table_cap = std::uint64_t{1} << 22;

  /// Throws std::invalid_argument unless every constant is >= 1 and caps are positive.
  void validate() const;
};

enum class HsBranch { high, low_small, low_general, rect };
std::string to_string(HsBranch b);

/// Guess tuples of one hash member that share tables and walk graphs.
struct WalkGroup {
  std::vector<int> tables;     // table index per bucket
  std::vector<int> powers;     // walk-graph exponent per bucket
  std::vector<int> requested;  // exponent the spectral target asks for
  BigInt multiplicity = 1;
  std::string label;
};

struct WalkFamily {
  HsBranch branch = HsBranch::rect;
  int buckets = 0;  // 0: the table tables[groups[0].tables[0]] itself
  std::shared_ptr<const PerfectHashFamily> perfect;
  std::shared_ptr<const FractionalHashFamily> fractional;
  std::shared_ptr<const ExpanderGraph> base;  // on N >= every table of the family
  std::vector<WalkGroup> groups;
  std::string label;

  std::uint64_t member_count() const;
  /// 0-based bucket of every coordinate under the given member.
  std::vector<int> partition(std::uint64_t member) const;
  /// Walks per (member, group) copy.
  BigInt walk_count(const WalkGroup& g) const;
};

struct CountExtreme {
  int count = 0;
  Point witness;
  std::string block;
};

class ThresholdHittingSet {
 public:
  ThresholdHittingSet() = default;
  ThresholdHittingSet(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }

  /// Registers a vertex table; returns its index.
  int add_table(std::shared_ptr<const PointSet> table);
  void add_family(WalkFamily family);
  void add_note(std::string note) { notes_.push_back(std::move(note)); }
  /// Multiset union.
  void append(const ThresholdHittingSet& other);
  /// The families accepted by `keep` (tables are shared).
  ThresholdHittingSet filtered(const std::function<bool(const WalkFamily&)>& keep) const;

  const std::vector<std::shared_ptr<const PointSet>>& tables() const { return tables_; }
  const std::vector<WalkFamily>& families() const { return families_; }
  const std::vector<std::string>& notes() const { return notes_; }
  bool empty() const { return families_.empty(); }

  /// Size of the multiset (guess tuples counted with multiplicity).
  BigInt size() const;
  /// Points when every (member, group) block is emitted once.
  BigInt block_points() const;

  /// Largest (or smallest) number of coordinates with x_i in A_i over the
  /// whole multiset, with a witness. Stops early once `stop` is reached
  /// (count >= stop when maximising, <= stop otherwise). Empty set: nullopt.
  std::optional<CountExtreme> extreme_count(const Shape& sets, bool maximize, std::optional<int> stop = {}) const;

  /// For each count 0..n, a point of the set with exactly that many
  /// coordinates in A_i, if there is one. Needs n <= 255.
  std::vector<std::optional<Point>> reachable_counts(const Shape& sets) const;

  /// Distinct points of the set in index order (x_0 least significant),
  /// found by a walk DP over subsets of [m]^n; each point is labelled with
  /// the first family producing it. Throws CapExceeded("points")
  /// when a DP layer would need more than `word_cap` 64-bit words.
  PointSet distinct_points(std::uint64_t word_cap) const;

  /// A point accepted by a T+ or T- threshold shape, if the set has one.
  std::optional<Point> find_threshold_hit(const Shape& threshold) const;

  /// Visits every block point once, in family, member, group, walk order.
  void for_each_point(const std::function<void(std::span<const Symbol>, const std::string&)>& visit) const;
  /// Block points as a PointSet (each block once, label carries mult=);
  /// with `distinct` only the first occurrence of each string is kept.
  /// Throws CapExceeded("points") when more than `cap` points would be emitted.
  PointSet materialize(std::uint64_t cap, bool distinct = false) const;

  std::string provenance() const;

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<std::shared_ptr<const PointSet>> tables_;
  std::vector<WalkFamily> families_;
  std::vector<std::string> notes_;
};

/// Validates the threshold form of a shape: returns (direction, theta).
std::optional<std::pair<Direction, int>> threshold_form(const Shape& shape);

/// Verdicts for threshold shapes using extreme_count. Shapes below eps are
/// only searched when `check_ineligible` is set.
std::vector<HittingVerdict> verify_thresholds(const ThresholdHittingSet& hs, const std::vector<Shape>& corpus,
                                              const Rational& eps, int jobs = 1, bool check_ineligible = false);

/// ceil(x log2 n), at least 1.
int log_budget(double x, int n);

/// Threshold tests of weight >= C log2 n. Vacuous (empty, with a note) when
/// C log2 n exceeds n/4, the largest possible weight.
ThresholdHittingSet build_high_weight(int m, int n, const ThresholdHSConfig& cfg);

/// Thresholds with w(f) <= c log2 n and every p_i <= 1/2, plus the
/// rectangle set for T-.
ThresholdHittingSet build_low_weight_small_sets(int m, int n, const ThresholdHSConfig& cfg);

/// General low-weight thresholds: t = 0 rectangle branch and per-bucket
/// rectangle tables combined by walks for t >= 1.
ThresholdHittingSet build_general_low_weight(int m, int n, const ThresholdHSConfig& cfg);

enum class ThresholdBranchSel { high, low_small, low_general, all };

/// Union of the selected builders; requires m, 1/eps <= n^c.
ThresholdHittingSet build_threshold_hs(int m, int n, const Rational& eps, const ThresholdHSConfig& cfg,
                                       ThresholdBranchSel sel = ThresholdBranchSel::all);

/// Dyadic exponent vectors e (eta'_i = 2^{-e_i}) with sum e_i <= budget.
std::vector<std::vector<int>> eta_guesses(int buckets, int budget, std::uint64_t cap);

/// rho_i = ceil(sum_{j in B_i, small} p_j + sum_{k in B_i, large} q_k) + 1.
std::vector<int> canonical_rho(const Shape& threshold, const std::vector<int>& partition, int buckets);

/// max(theta - |L|, 0) for a T+ threshold, |L| = #{i : p_i > 1/2}.
int canonical_t(const Shape& threshold);

/// Exact Pr[Zbar = 0 and Y >= theta - |L|] for uniform x (T+ thresholds).
Rational subevent_probability(const Shape& threshold);

/// Exact eta_i = Pr_{x in space}[some j in bucket i has x_j in A_j].
std::vector<Rational> bucket_hit_probabilities(const PointSet& space, const Shape& sets,
                                               const std::vector<int>& partition, int buckets);

}  // namespace shapehit
