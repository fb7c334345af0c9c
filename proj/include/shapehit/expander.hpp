#pragma once

// Explicit expanders (degree-8 Gabber-Galil graphs on Z_r x Z_r and their
// powers) with spectral certificates computed at construction, walk spaces
// over sequences of such graphs, and exact walk statistics.

#include "shapehit/core.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace shapehit {

struct SpectralCertificate {
  double lambda = 0.0;      // certified bound on the second |eigenvalue|
  std::string method;       // "exact", "iterative", "trivial", "power"
  double tolerance = 0.0;
};

class ExpanderGraph {
 public:
  static constexpr int kBaseDegree = 8;

  std::uint64_t vertex_count() const { return static_cast<std::uint64_t>(side_) * side_; }
  int side() const { return side_; }
  int power() const { return power_; }
  std::uint64_t degree() const { return degree_; }
  double lambda_bound() const { return cert_.lambda; }
  const SpectralCertificate& certificate() const { return cert_; }
  const SpectralCertificate& base_certificate() const { return base_cert_; }

  /// The port-th neighbour; port digits in base 8 (least significant first)
  /// select successive base-graph steps.
  std::uint64_t neighbor(std::uint64_t v, std::uint64_t port) const;
  std::uint64_t base_neighbor(std::uint64_t v, int d) const;
  /// base_neighbor(v, d) at index 8 v + d; built on first use, shared by copies.
  std::span<const std::uint32_t> base_table() const;

  /// y = A x for the normalised adjacency matrix A of this graph.
  std::vector<double> apply(std::span<const double> x) const;
  /// y[v] = sum over ports of x[neighbor(v, port)] (walk counting).
  std::vector<BigInt> apply_counts(std::span<const BigInt> x) const;

  friend ExpanderGraph base_expander(std::uint64_t n_target);
  friend ExpanderGraph power(const ExpanderGraph& g, int t, std::uint64_t degree_cap);

 private:
  int side_ = 1;
  int power_ = 1;
  std::uint64_t degree_ = kBaseDegree;
  SpectralCertificate cert_;
  SpectralCertificate base_cert_;
  struct Table {
    std::once_flag once;
    std::vector<std::uint32_t> next;
  };
  std::shared_ptr<Table> table_ = std::make_shared<Table>();
};

inline constexpr std::uint64_t kDefaultDegreeCap = std::uint64_t{1} << 30;

/// Graph on Z_r x Z_r with r = ceil(sqrt(n_target)); spectrally certified.
ExpanderGraph base_expander(std::uint64_t n_target);

/// t-step walks of g as single edges; lambda^t. CapExceeded("degree").
ExpanderGraph power(const ExpanderGraph& g, int t, std::uint64_t degree_cap = kDefaultDegreeCap);

/// Smallest power of the base graph certified at or below lambda_target.
ExpanderGraph expander_for(std::uint64_t n_target, double lambda_target,
                           std::uint64_t degree_cap = kDefaultDegreeCap);

/// Number of powers of a base graph with bound lambda0 needed to reach target.
int powers_needed(double lambda0, double lambda_target);

/// Second largest |eigenvalue| of the dense normalised adjacency matrix
/// (power applied), for N <= 2000.
double exact_second_eigenvalue(const ExpanderGraph& g);

/// max ||A x|| / ||x|| over `trials` seeded random x orthogonal to the
/// all-ones vector; an independent lower estimate of lambda.
double rayleigh_check(const ExpanderGraph& g, int trials, std::uint64_t seed);

/// Certification thresholds used by base_expander.
inline constexpr std::uint64_t kExactSpectrumLimit = 2000;
inline constexpr double kExactTolerance = 1e-9;
inline constexpr double kIterativeTolerance = 1e-6;

// Walk spaces -----------------------------------------------------------------

struct Walk {
  std::uint64_t start = 0;
  std::vector<std::uint64_t> ports;
};

/// All tuples (u, y_1, ..., y_l) for graphs G_1..G_l on a common vertex set.
class WalkSpace {
 public:
  explicit WalkSpace(std::vector<ExpanderGraph> graphs, std::uint64_t vertex_count = 0);

  std::uint64_t vertex_count() const { return n_; }
  std::size_t length() const { return graphs_.size(); }
  const std::vector<ExpanderGraph>& graphs() const { return graphs_; }

  /// N * prod D_i.
  BigInt size() const;
  /// size() as uint64, throwing CapExceeded("walks") above cap.
  std::uint64_t checked_size(std::uint64_t cap) const;

  /// Walk with index idx in lexicographic order of (u, y_1, ..., y_l).
  Walk walk_at(std::uint64_t idx) const;

 private:
  std::vector<ExpanderGraph> graphs_;
  std::uint64_t n_;
};

/// (v_1, ..., v_l) with v_1 = G_1-neighbour y_1 of u, v_i = G_i-neighbour y_i of v_{i-1}.
std::vector<std::uint64_t> walk_vertices(const WalkSpace& ws, const Walk& w);

using VertexSubset = std::vector<bool>;

/// Exact fraction of walks with v_i in V_i for all i, by counting walks
/// vertex-by-vertex (BigInt), i.e. without materialising the walks.
Rational hitting_fraction(const WalkSpace& ws, const std::vector<VertexSubset>& targets);

/// Same quantity by enumerating every walk; CapExceeded("walks") above cap.
Rational hitting_fraction_enumerated(const WalkSpace& ws, const std::vector<VertexSubset>& targets,
                                     std::uint64_t cap = std::uint64_t{1} << 26);

/// (||u_t||_1, ||u_t||_2) for u_t = I_{V_t} A_t ... I_{V_1} A_1 (1/N, ..., 1/N).
std::vector<std::pair<double, double>> walk_norm_trace(const WalkSpace& ws,
                                                       const std::vector<VertexSubset>& targets);

/// 0.75^l * prod p_i.
Rational walk_hitting_bound(const std::vector<Rational>& densities);

/// True iff lambda_i <= p_i p_{i-1} / 8 for every step, with p_0 = 1.
bool walk_lemma_hypothesis(const WalkSpace& ws, const std::vector<Rational>& densities);

/// The component of x along the all-ones direction: every entry mean(x).
std::vector<double> parallel_component(std::span<const double> x);

/// Expander over an arbitrary set of `set_size` elements: vertex v maps to
/// element v mod set_size; the graph has N = r^2 >= set_size vertices.
struct PaddedExpander {
  ExpanderGraph graph;
  std::uint64_t set_size = 1;

  std::uint64_t element(std::uint64_t v) const { return v % set_size; }
  /// N / set_size as a rational.
  Rational padding_ratio() const { return Rational(BigInt(graph.vertex_count()), BigInt(set_size)); }
};

/// Chooses lambda below `lambda_target` after dividing by the padding ratio
/// bound (densities shrink by at most N / set_size).
PaddedExpander padded_expander(std::uint64_t set_size, double lambda_target, std::uint64_t degree_cap);

}  // namespace shapehit
