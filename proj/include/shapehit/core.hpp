#pragma once

// Domain types shared by every construction: symmetric tests over [m]^n
// (shapes, thresholds, rectangles), weight statistics, and point multisets.
// Alphabet symbols are 1-based throughout.

#include "shapehit/rational.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapehit {

using Symbol = std::uint16_t;
using Point = std::vector<Symbol>;
using SetList = std::vector<std::vector<int>>;

/// Thrown when a construction would exceed a configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::string cap, const std::string& detail)
      : std::runtime_error("cap exceeded [" + cap + "]: " + detail), cap_(std::move(cap)) {}
  const std::string& cap() const { return cap_; }

 private:
  std::string cap_;
};

/// h : {0,1}^n -> {0,1} depending only on the number of ones, stored as
/// the set of accepted counts.
class SymmetricFunction {
 public:
  SymmetricFunction() = default;
  SymmetricFunction(int n, const std::vector<int>& accept_counts);

  static SymmetricFunction all_of(int n);                 // AND
  static SymmetricFunction at_least(int n, int theta);    // T+_theta
  static SymmetricFunction at_most(int n, int theta);     // T-_theta
  static SymmetricFunction exactly(int n, int count);

  int arity() const { return n_; }
  bool accepts(int count) const { return count >= 0 && count <= n_ && accept_[count]; }
  std::vector<int> accept_counts() const;

  bool operator==(const SymmetricFunction&) const = default;

 private:
  int n_ = 0;
  std::vector<bool> accept_;
};

/// f(x) = h(1_{A_1}(x_1), ..., 1_{A_n}(x_n)).
class Shape {
 public:
  Shape() = default;
  Shape(int m, const SetList& sets, SymmetricFunction sym);

  int m() const { return m_; }
  int n() const { return n_; }
  const SymmetricFunction& sym() const { return sym_; }

  bool contains(int coord, Symbol s) const { return member_[coord * m_ + (s - 1)] != 0; }
  int set_size(int coord) const { return sizes_[coord]; }
  std::vector<int> set(int coord) const;
  SetList sets() const;

  /// Same accepting sets, different symmetric function.
  Shape with_sym(SymmetricFunction sym) const;

  bool operator==(const Shape&) const = default;

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<std::uint8_t> member_;
  std::vector<int> sizes_;
  SymmetricFunction sym_;
};

enum class Direction { plus, minus };

struct Threshold {
  int m = 0;
  SetList sets;
  Direction direction = Direction::plus;
  int theta = 0;

  Shape to_shape() const;
};

struct Rectangle {
  int m = 0;
  SetList sets;

  Shape to_shape() const;
};

/// Exact per-coordinate statistics p_i = |A_i|/m, q_i, w_i = p_i q_i.
struct WeightStats {
  std::vector<Rational> p;
  std::vector<Rational> q;
  std::vector<Rational> w;
  Rational mu;
  Rational total_weight;
  std::vector<int> small;  // {i : p_i <= 1/2}
  std::vector<int> large;
};

WeightStats weight_stats(const SetList& sets, int m);
WeightStats weight_stats(const Shape& shape);

/// Multiset of strings in [m]^n, stored contiguously. Points are grouped
/// into labelled blocks recording the construction that emitted them.
class PointSet {
 public:
  struct Block {
    std::size_t begin = 0;
    std::string label;
  };

  PointSet() = default;
  PointSet(int m, int n, std::string provenance = {});

  int m() const { return m_; }
  int n() const { return n_; }
  std::size_t size() const { return n_ == 0 ? 0 : data_.size() / n_; }
  bool empty() const { return size() == 0; }

  std::span<const Symbol> point(std::size_t i) const {
    return {data_.data() + i * n_, static_cast<std::size_t>(n_)};
  }

  void reserve(std::size_t points) { data_.reserve(points * n_); }
  void push_back(std::span<const Symbol> x);
  /// Starts a new provenance block; subsequent points belong to it.
  void begin_block(std::string label);
  /// Multiset union; blocks of `other` are carried over.
  void append(const PointSet& other);

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }
  const std::vector<Block>& blocks() const { return blocks_; }
  /// Label of the block containing point i ("" when unlabelled).
  std::string label_of(std::size_t i) const;

  const std::vector<Symbol>& raw() const { return data_; }

  /// Points in first-occurrence order with duplicates removed.
  PointSet distinct() const;

  bool same_points(const PointSet& other) const {
    return m_ == other.m_ && n_ == other.n_ && size() == other.size() && data_ == other.data_;
  }

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<Symbol> data_;
  std::vector<Block> blocks_;
  std::string provenance_;
};

/// Number of coordinates with x_i in A_i.
int count_accepting(const Shape& shape, std::span<const Symbol> x);
bool evaluate(const Shape& shape, std::span<const Symbol> x);

/// Validates |x| == n and every symbol in [m]; throws std::invalid_argument.
void check_point(int m, int n, std::span<const Symbol> x);

/// Visits every string of [m]^n in lexicographic order (first coordinate
/// most significant). The callback may return false to stop early.
void for_each_string(int m, int n, const std::function<bool(std::span<const Symbol>)>& visit);

/// m^n, throwing CapExceeded("domain") when it exceeds `cap`.
std::uint64_t domain_size(int m, int n, std::uint64_t cap = UINT64_MAX);

/// The whole domain [m]^n as a point set.
PointSet full_domain(int m, int n);

// Text formats -------------------------------------------------------------

void write_shape(std::ostream& out, const Shape& shape);
void write_corpus(std::ostream& out, const std::vector<Shape>& corpus);
std::vector<Shape> read_corpus(std::istream& in);

void write_pointset(std::ostream& out, const PointSet& points);
PointSet read_pointset(std::istream& in);
/// One line per point: the label of the block that generated it.
void write_provenance(std::ostream& out, const PointSet& points);

}  // namespace shapehit
