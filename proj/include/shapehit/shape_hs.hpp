#pragma once

// Hitting sets for arbitrary combinatorial shapes, built from a threshold
// hitting set S on n' >= n coordinates: every pair (y, z) of S contributes
// the n'+1 strings that switch y into z one coordinate at a time, projected
// to the first n coordinates.

#include "shapehit/threshold_hs.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace shapehit {

struct NormalizedParams {
  int m = 0;
  int n = 0;
  Rational eps;
  double c = 1.0;
  int n_padded = 0;
  /// Exponent handed to the threshold construction, which runs at eps / (n'+1).
  double c_effective = 1.0;
  Rational threshold_eps;
};

/// n' = max(n, ceil(m^{1/c}), ceil((1/eps)^{1/c}), 2).
NormalizedParams normalize(int m, int n, const Rational& eps, double c);

/// y, (z_1, y_2..y_n), ..., z: n+1 strings.
std::vector<Point> interpolate(std::span<const Symbol> y, std::span<const Symbol> z);

/// Pads a shape on n coordinates to n' >= n with always-accepting coordinates;
/// accept counts shift by n' - n.
Shape pad_shape(const Shape& shape, int n_padded);

struct ShapeHSConfig {
  ThresholdHSConfig threshold;
  /// Largest number of points materialize() may emit.
  std::uint64_t pair_cap = std::uint64_t{1} << 26;
  /// Block points of S that materialize() may enumerate.
  std::uint64_t enumeration_cap = std::uint64_t{1} << 28;
  /// Distinct points of S come from a walk DP whose layers may hold this
  /// many 64-bit words; larger instances enumerate up to enumeration_cap.
  std::uint64_t dp_word_cap = std::uint64_t{1} << 24;
};

class ShapeHittingSet {
 public:
  ShapeHittingSet(NormalizedParams params, ThresholdHittingSet base, ShapeHSConfig cfg);

  int m() const { return params_.m; }
  int n() const { return params_.n; }
  const NormalizedParams& params() const { return params_; }
  const ThresholdHittingSet& base() const { return base_; }

  /// (n'+1) |S|^2.
  BigInt size() const;

  /// A point of the set accepted by `shape` (on n coordinates), if any.
  std::optional<Point> find_hit(const Shape& shape) const;

  /// Pairs in row-major order over the distinct points of S, projected.
  /// Throws CapExceeded("pairs") above cfg.pair_cap points.
  PointSet materialize(bool distinct = true) const;

  std::string provenance() const;

 private:
  std::optional<Point> exact_hit(const Shape& padded) const;
  const PointSet& base_points() const;

  NormalizedParams params_;
  ThresholdHittingSet base_;
  ShapeHSConfig cfg_;
  struct Lazy {
    std::once_flag once;
    PointSet points;
  };
  std::shared_ptr<Lazy> lazy_ = std::make_shared<Lazy>();
};

ShapeHittingSet build_shape_hs(int m, int n, const Rational& eps, double c, const ShapeHSConfig& cfg = {});

std::vector<HittingVerdict> verify_shapes(const ShapeHittingSet& hs, const std::vector<Shape>& corpus,
                                          const Rational& eps, int jobs = 1);

}  // namespace shapehit
