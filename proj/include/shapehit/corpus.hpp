#pragma once

// Deterministic shape corpora: every combination of per-coordinate accepting
// sets drawn from a grid, crossed with thresholds, rectangles, or accept-count
// patterns.

#include "shapehit/core.hpp"

#include <optional>
#include <vector>

namespace shapehit {

enum class SetStyle { prefix, suffix, all };

struct CorpusGrid {
  int m = 2;
  int n = 4;
  /// Allowed |A_i|; empty means 0..m.
  std::vector<int> sizes;
  /// prefix: {1..s}; suffix: {m-s+1..m}; all: every subset with an allowed size.
  SetStyle style = SetStyle::prefix;
  std::uint64_t cap = std::uint64_t{1} << 22;
};

/// Candidate accepting sets for one coordinate.
std::vector<std::vector<int>> grid_sets(const CorpusGrid& grid);

/// Every n-tuple of candidate sets, first coordinate most significant.
/// Throws CapExceeded("corpus") above grid.cap.
std::vector<SetList> set_patterns(const CorpusGrid& grid);

/// Pattern x theta x direction; thetas defaults to 0..n.
std::vector<Shape> threshold_corpus(const CorpusGrid& grid, const std::vector<int>& thetas = {},
                                    bool plus = true, bool minus = true);

/// Hypotheses of the strong rectangle construction: sum q_i <= rho and
/// uniform acceptance >= n^{-c}.
struct SrectEligibility {
  double c = 1.0;
  int rho = 10;
};

bool srect_eligible(const Shape& rect, const SrectEligibility& e);

std::vector<Shape> rectangle_corpus(const CorpusGrid& grid, const std::optional<SrectEligibility>& filter = {});

enum class AcceptPattern { singletons, thresholds, intervals, all };

/// Pattern x accept-count sets. `all` uses every nonempty subset of 0..n.
std::vector<Shape> shape_corpus(const CorpusGrid& grid, AcceptPattern accept = AcceptPattern::singletons);

/// Accept-count sets of a pattern for n coordinates.
std::vector<SymmetricFunction> accept_patterns(int n, AcceptPattern accept);

SetStyle parse_set_style(const std::string& s);
AcceptPattern parse_accept_pattern(const std::string& s);

}  // namespace shapehit
