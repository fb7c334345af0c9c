#pragma once

// Hitting sets for rectangles with small total rejection mass: guess r,
// hash the coordinates into r buckets with the fractional family, and walk
// on expanders whose vertices are seeds of an aC-wise independent space.
// Walk sets sharing a partition and a graph sequence are stored once as a
// block together with their multiplicity.

#include "shapehit/expander.hpp"
#include "shapehit/hashing.hpp"
#include "shapehit/kwise.hpp"

#include <functional>
#include <string>
#include <vector>

namespace shapehit {

struct StrongRectConfig {
  int m = 0;
  int n = 0;
  double c = 1.0;
  int rho = 10;
  /// Independence is a*C (clamped to n); C bounds the per-bucket rejection mass.
  int a = 4;
  int C = 1;
  /// Walk graphs are powers of the base graph clamped to this exponent.
  int max_walk_power = 1;
  FractionalConfig hash;
  std::uint64_t alpha_cap_log2 = 6;  // at most 2^{6r} alpha vectors per r
  std::uint64_t seed_cap = std::uint64_t{1} << 24;
  std::uint64_t block_cap = std::uint64_t{1} << 20;

  /// ceil(c log2 n).
  int L() const;
  int independence() const;
};

struct StrongRectBlock {
  int r = 0;                       // 0: the aC-wise space alone
  std::vector<int> partition;      // bucket in [1, r] per coordinate (empty for r = 0)
  std::vector<int> powers;         // walk-graph exponent per bucket
  std::vector<int> requested;      // exponent needed for lambda_i <= rho_i rho_{i-1} / 8
  BigInt multiplicity;             // number of (member, alpha) tuples producing this block
  std::string label;

  bool clamped() const { return powers != requested; }
};

class StrongRectSet {
 public:
  StrongRectSet(StrongRectConfig config, KWiseSpace space, PointSet space_points, ExpanderGraph base);

  const StrongRectConfig& config() const { return config_; }
  const KWiseSpace& space() const { return space_; }
  const PointSet& space_points() const { return points_; }
  const ExpanderGraph& base_graph() const { return base_; }
  const std::vector<StrongRectBlock>& blocks() const { return blocks_; }
  std::vector<StrongRectBlock>& mutable_blocks() { return blocks_; }

  /// Points contributed by one copy of a block.
  BigInt block_size(const StrongRectBlock& b) const;
  /// Points in the multiset (blocks weighted by multiplicity).
  BigInt size() const;
  /// Points when every block is emitted once.
  BigInt distinct_block_points() const;

  /// Exact fraction of the multiset accepted by `rect` (an AND shape).
  Rational accept_fraction(const Shape& rect) const;
  Rational block_accept_fraction(const StrongRectBlock& b, const Shape& rect) const;

  /// Visits every point of one copy of a block, in walk order.
  void for_each_block_point(const StrongRectBlock& b, const std::function<void(std::span<const Symbol>)>& visit) const;
  /// All blocks once each; throws CapExceeded("points") above cap.
  PointSet materialize(std::uint64_t cap) const;

  std::string provenance() const;

 private:
  std::vector<ExpanderGraph> graphs_for(const StrongRectBlock& b) const;
  /// Per seed, the coordinates whose symbol lies outside the rectangle's set.
  std::vector<std::uint64_t> outside_masks(const Shape& rect) const;
  Rational block_fraction(const StrongRectBlock& b, const Shape& rect, const std::vector<std::uint64_t>& outside) const;

  StrongRectConfig config_;
  KWiseSpace space_;
  PointSet points_;
  ExpanderGraph base_;
  std::vector<StrongRectBlock> blocks_;
};

/// Enumerates every r in {0, ..., floor(rho/10)}, every fractional-hash
/// member for r buckets, and every alpha guess. Requires m <= n^c.
StrongRectSet build_strong_rect(const StrongRectConfig& config);

/// Exact fraction of the space whose coordinates in the bucket lie in the
/// given sets. `bucket` lists (0-based coordinate, accepting set).
Rational bucket_accept_prob(const PointSet& space_points,
                            const std::vector<std::pair<int, std::vector<int>>>& bucket);

/// All alpha vectors (alpha_i >= 1) with sum <= limit, lexicographic.
std::vector<std::vector<int>> alpha_guesses(int r, int limit, std::uint64_t cap);

/// Upper limit on sum alpha for r buckets: max(3r, ceil((2L + r) / L')).
int alpha_sum_limit(int r, int L);

/// r = floor(sum q / 10) and the canonical alpha_i = ceil(log2(1/P_i) / L')
/// for the buckets of `partition`, P_i = (1/2) prod_{j in B_i} (1 - q_j).
struct CanonicalGuess {
  int r = 0;
  std::vector<int> alpha;
  std::vector<Rational> P;
};
CanonicalGuess canonical_guess(const Shape& rect, const std::vector<int>& partition, int r, int L);

/// rho_i = 2^{-alpha_i L'}.
Rational alpha_estimate(int alpha, int L_prime);

/// Rectangle hitting set with the LLSZ contract, realised by rect_hs_kwise.
PointSet llsz_contract_hs(int m, int n, const Rational& eps);

}  // namespace shapehit
