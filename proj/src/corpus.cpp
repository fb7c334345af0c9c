#include "shapehit/corpus.hpp"

#include "shapehit/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace shapehit {

std::vector<std::vector<int>> grid_sets(const CorpusGrid& grid) {
  if (grid.m < 1 || grid.n < 1) throw std::invalid_argument("corpus needs m, n >= 1");
  std::vector<int> sizes = grid.sizes;
  if (sizes.empty())
    for (int s = 0; s <= grid.m; ++s) sizes.push_back(s);
  std::vector<bool> allowed(grid.m + 1, false);
  for (int s : sizes) {
    if (s < 0 || s > grid.m) throw std::invalid_argument("set size outside [0, m]");
    allowed[s] = true;
  }
  std::vector<std::vector<int>> out;
  if (grid.style == SetStyle::all) {
    if (grid.m > 16) throw CapExceeded("corpus", "all-subsets style needs m <= 16");
    for (std::uint32_t mask = 0; mask < (1u << grid.m); ++mask) {
      std::vector<int> s;
      for (int a = 0; a < grid.m; ++a)
        if (mask >> a & 1) s.push_back(a + 1);
      if (allowed[s.size()]) out.push_back(std::move(s));
    }
    return out;
  }
  for (int s = 0; s <= grid.m; ++s) {
    if (!allowed[s]) continue;
    std::vector<int> set;
    for (int a = 1; a <= s; ++a) set.push_back(grid.style == SetStyle::prefix ? a : grid.m - s + a);
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<SetList> set_patterns(const CorpusGrid& grid) {
  const auto sets = grid_sets(grid);
  if (sets.empty()) return {};
  const double total = std::pow(static_cast<double>(sets.size()), grid.n);
  if (total > static_cast<double>(grid.cap))
    throw CapExceeded("corpus", "grid has " + std::to_string(total) + " set patterns");
  std::vector<SetList> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(grid.n, 0);
  while (true) {
    SetList pattern(grid.n);
    for (int j = 0; j < grid.n; ++j) pattern[j] = sets[idx[j]];
    out.push_back(std::move(pattern));
    int j = grid.n - 1;
    while (j >= 0 && ++idx[j] == sets.size()) idx[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

namespace {

void check_size(std::size_t size, std::uint64_t cap) {
  if (size > cap) throw CapExceeded("corpus", "more than " + std::to_string(cap) + " shapes");
}

}  // namespace

std::vector<Shape> threshold_corpus(const CorpusGrid& grid, const std::vector<int>& thetas, bool plus, bool minus) {
  std::vector<int> th = thetas;
  if (th.empty())
    for (int t = 0; t <= grid.n; ++t) th.push_back(t);
  std::vector<Shape> out;
  for (const auto& pattern : set_patterns(grid))
    for (int t : th) {
      if (plus) out.push_back(Threshold{grid.m, pattern, Direction::plus, t}.to_shape());
      if (minus) out.push_back(Threshold{grid.m, pattern, Direction::minus, t}.to_shape());
      check_size(out.size(), grid.cap);
    }
  return out;
}

bool srect_eligible(const Shape& rect, const SrectEligibility& e) {
  Rational q_sum = 0;
  for (int j = 0; j < rect.n(); ++j) q_sum += Rational(rect.m() - rect.set_size(j), rect.m());
  if (q_sum > e.rho) return false;
  const double log_p = std::log2(to_double(acceptance_probability(rect).exact_prob));
  return log_p >= -e.c * std::log2(static_cast<double>(rect.n())) - 1e-9;
}

std::vector<Shape> rectangle_corpus(const CorpusGrid& grid, const std::optional<SrectEligibility>& filter) {
  std::vector<Shape> out;
  for (const auto& pattern : set_patterns(grid)) {
    Shape r = Rectangle{grid.m, pattern}.to_shape();
    if (filter && !srect_eligible(r, *filter)) continue;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SymmetricFunction> accept_patterns(int n, AcceptPattern accept) {
  std::vector<SymmetricFunction> out;
  switch (accept) {
    case AcceptPattern::singletons:
      for (int w = 0; w <= n; ++w) out.push_back(SymmetricFunction::exactly(n, w));
      break;
    case AcceptPattern::thresholds:
      for (int w = 0; w <= n; ++w) {
        out.push_back(SymmetricFunction::at_least(n, w));
        out.push_back(SymmetricFunction::at_most(n, w));
      }
      break;
    case AcceptPattern::intervals:
      for (int a = 0; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
          std::vector<int> w;
          for (int v = a; v <= b; ++v) w.push_back(v);
          out.emplace_back(n, w);
        }
      break;
    case AcceptPattern::all:
      if (n > 20) throw CapExceeded("corpus", "all accept sets needs n <= 20");
      for (std::uint32_t mask = 1; mask < (1u << (n + 1)); ++mask) {
        std::vector<int> w;
        for (int v = 0; v <= n; ++v)
          if (mask >> v & 1) w.push_back(v);
        out.emplace_back(n, w);
      }
      break;
  }
  return out;
}

std::vector<Shape> shape_corpus(const CorpusGrid& grid, AcceptPattern accept) {
  const auto syms = accept_patterns(grid.n, accept);
  std::vector<Shape> out;
  for (const auto& pattern : set_patterns(grid))
    for (const auto& h : syms) {
      out.emplace_back(grid.m, pattern, h);
      check_size(out.size(), grid.cap);
    }
  return out;
}

SetStyle parse_set_style(const std::string& s) {
  if (s == "prefix") return SetStyle::prefix;
  if (s == "suffix") return SetStyle::suffix;
  if (s == "all") return SetStyle::all;
  throw std::invalid_argument("unknown set style '" + s + "'");
}

AcceptPattern parse_accept_pattern(const std::string& s) {
  if (s == "singletons") return AcceptPattern::singletons;
  if (s == "thresholds") return AcceptPattern::thresholds;
  if (s == "intervals") return AcceptPattern::intervals;
  if (s == "all") return AcceptPattern::all;
  throw std::invalid_argument("unknown accept pattern '" + s + "'");
}

}  // namespace shapehit
