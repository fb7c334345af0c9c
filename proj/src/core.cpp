#include "shapehit/core.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace shapehit {

// SymmetricFunction ---------------------------------------------------------

SymmetricFunction::SymmetricFunction(int n, const std::vector<int>& accept_counts)
    : n_(n), accept_(static_cast<std::size_t>(n) + 1, false) {
  if (n < 0) throw std::invalid_argument("negative arity");
  for (int w : accept_counts) {
    if (w < 0 || w > n) throw std::invalid_argument("accept count out of range 0..n");
    accept_[w] = true;
  }
}

SymmetricFunction SymmetricFunction::all_of(int n) { return SymmetricFunction(n, {n}); }

SymmetricFunction SymmetricFunction::at_least(int n, int theta) {
  if (theta < 0 || theta > n) throw std::invalid_argument("theta out of range");
  std::vector<int> counts;
  for (int w = theta; w <= n; ++w) counts.push_back(w);
  return SymmetricFunction(n, counts);
}

SymmetricFunction SymmetricFunction::at_most(int n, int theta) {
  if (theta < 0 || theta > n) throw std::invalid_argument("theta out of range");
  std::vector<int> counts;
  for (int w = 0; w <= theta; ++w) counts.push_back(w);
  return SymmetricFunction(n, counts);
}

SymmetricFunction SymmetricFunction::exactly(int n, int count) { return SymmetricFunction(n, {count}); }

std::vector<int> SymmetricFunction::accept_counts() const {
  std::vector<int> out;
  for (int w = 0; w <= n_; ++w)
    if (accept_[w]) out.push_back(w);
  return out;
}

// Shape ---------------------------------------------------------------------

Shape::Shape(int m, const SetList& sets, SymmetricFunction sym)
    : m_(m), n_(static_cast<int>(sets.size())), sym_(std::move(sym)) {
  if (m < 1) throw std::invalid_argument("alphabet size must be >= 1");
  if (n_ < 1) throw std::invalid_argument("dimension must be >= 1");
  if (sym_.arity() != n_) throw std::invalid_argument("symmetric function arity != number of sets");
  member_.assign(static_cast<std::size_t>(n_) * m_, 0);
  sizes_.assign(n_, 0);
  for (int i = 0; i < n_; ++i) {
    for (int s : sets[i]) {
      if (s < 1 || s > m) throw std::invalid_argument("set element outside [m]");
      auto& cell = member_[static_cast<std::size_t>(i) * m_ + (s - 1)];
      if (!cell) {
        cell = 1;
        ++sizes_[i];
      }
    }
  }
}

std::vector<int> Shape::set(int coord) const {
  std::vector<int> out;
  for (int s = 1; s <= m_; ++s)
    if (contains(coord, static_cast<Symbol>(s))) out.push_back(s);
  return out;
}

SetList Shape::sets() const {
  SetList out;
  for (int i = 0; i < n_; ++i) out.push_back(set(i));
  return out;
}

Shape Shape::with_sym(SymmetricFunction sym) const {
  if (sym.arity() != n_) throw std::invalid_argument("arity mismatch");
  Shape out = *this;
  out.sym_ = std::move(sym);
  return out;
}

Shape Threshold::to_shape() const {
  int n = static_cast<int>(sets.size());
  return Shape(m, sets,
               direction == Direction::plus ? SymmetricFunction::at_least(n, theta)
                                            : SymmetricFunction::at_most(n, theta));
}

Shape Rectangle::to_shape() const {
  return Shape(m, sets, SymmetricFunction::all_of(static_cast<int>(sets.size())));
}

// WeightStats ---------------------------------------------------------------

namespace {

WeightStats stats_from_sizes(const std::vector<int>& sizes, int m) {
  WeightStats ws;
  const Rational half(1, 2);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Rational p(sizes[i], m);
    Rational q = 1 - p;
    ws.p.push_back(p);
    ws.q.push_back(q);
    ws.w.push_back(p * q);
    ws.mu += p;
    ws.total_weight += p * q;
    (p <= half ? ws.small : ws.large).push_back(static_cast<int>(i));
  }
  return ws;
}

}  // namespace

WeightStats weight_stats(const SetList& sets, int m) {
  if (m < 1) throw std::invalid_argument("alphabet size must be >= 1");
  std::vector<int> sizes;
  for (const auto& a : sets) {
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (int s : sorted)
      if (s < 1 || s > m) throw std::invalid_argument("set element outside [m]");
    sizes.push_back(static_cast<int>(sorted.size()));
  }
  return stats_from_sizes(sizes, m);
}

WeightStats weight_stats(const Shape& shape) {
  std::vector<int> sizes;
  for (int i = 0; i < shape.n(); ++i) sizes.push_back(shape.set_size(i));
  return stats_from_sizes(sizes, shape.m());
}

// PointSet ------------------------------------------------------------------

PointSet::PointSet(int m, int n, std::string provenance) : m_(m), n_(n), provenance_(std::move(provenance)) {
  if (m < 1 || n < 1) throw std::invalid_argument("point set needs m >= 1 and n >= 1");
}

void PointSet::push_back(std::span<const Symbol> x) {
  check_point(m_, n_, x);
  data_.insert(data_.end(), x.begin(), x.end());
}

void PointSet::begin_block(std::string label) {
  std::size_t at = size();
  if (!blocks_.empty() && blocks_.back().begin == at) {
    blocks_.back().label = std::move(label);
    return;
  }
  blocks_.push_back({at, std::move(label)});
}

void PointSet::append(const PointSet& other) {
  if (other.m_ != m_ || other.n_ != n_) throw std::invalid_argument("point set parameter mismatch");
  std::size_t offset = size();
  if (other.blocks_.empty() || other.blocks_.front().begin != 0)
    blocks_.push_back({offset, other.provenance_});
  for (const auto& b : other.blocks_) blocks_.push_back({offset + b.begin, b.label});
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

std::string PointSet::label_of(std::size_t i) const {
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), i,
                             [](std::size_t v, const Block& b) { return v < b.begin; });
  if (it == blocks_.begin()) return provenance_;
  return std::prev(it)->label;
}

PointSet PointSet::distinct() const {
  PointSet out(m_, n_, provenance_ + " [distinct]");
  std::unordered_map<std::string, char> seen;
  seen.reserve(size() * 2);
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    std::string key(reinterpret_cast<const char*>(p.data()), p.size() * sizeof(Symbol));
    if (seen.emplace(std::move(key), 0).second) out.data_.insert(out.data_.end(), p.begin(), p.end());
  }
  return out;
}

// Evaluation ----------------------------------------------------------------

void check_point(int m, int n, std::span<const Symbol> x) {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("dimension mismatch");
  for (Symbol s : x)
    if (s < 1 || s > m) throw std::invalid_argument("symbol outside alphabet");
}

int count_accepting(const Shape& shape, std::span<const Symbol> x) {
  check_point(shape.m(), shape.n(), x);
  int count = 0;
  for (int i = 0; i < shape.n(); ++i) count += shape.contains(i, x[i]) ? 1 : 0;
  return count;
}

bool evaluate(const Shape& shape, std::span<const Symbol> x) {
  return shape.sym().accepts(count_accepting(shape, x));
}

std::uint64_t domain_size(int m, int n, std::uint64_t cap) {
  std::uint64_t size = 1;
  for (int i = 0; i < n; ++i) {
    if (size > cap / static_cast<std::uint64_t>(m))
      throw CapExceeded("domain", std::to_string(m) + "^" + std::to_string(n) + " exceeds cap");
    size *= static_cast<std::uint64_t>(m);
  }
  if (size > cap) throw CapExceeded("domain", "domain exceeds cap");
  return size;
}

void for_each_string(int m, int n, const std::function<bool(std::span<const Symbol>)>& visit) {
  Point x(n, 1);
  while (true) {
    if (!visit(x)) return;
    int i = n - 1;
    while (i >= 0 && x[i] == m) x[i--] = 1;
    if (i < 0) return;
    ++x[i];
  }
}

PointSet full_domain(int m, int n) {
  PointSet out(m, n, "full-domain m=" + std::to_string(m) + " n=" + std::to_string(n));
  out.reserve(domain_size(m, n, std::uint64_t{1} << 28));
  for_each_string(m, n, [&](std::span<const Symbol> x) {
    out.push_back(x);
    return true;
  });
  return out;
}

// Text formats --------------------------------------------------------------

void write_shape(std::ostream& out, const Shape& shape) {
  out << "shape m=" << shape.m() << " n=" << shape.n() << "\nW";
  for (int w : shape.sym().accept_counts()) out << ' ' << w;
  out << '\n';
  for (int i = 0; i < shape.n(); ++i) {
    out << 'A' << (i + 1);
    for (int s : shape.set(i)) out << ' ' << s;
    out << '\n';
  }
}

void write_corpus(std::ostream& out, const std::vector<Shape>& corpus) {
  for (const auto& s : corpus) write_shape(out, s);
}

namespace {

int parse_kv(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw std::invalid_argument("expected " + key + "=<int>, got " + token);
  return std::stoi(token.substr(key.size() + 1));
}

std::vector<int> parse_ints(std::istringstream& in) {
  std::vector<int> out;
  int v;
  while (in >> v) out.push_back(v);
  return out;
}

}  // namespace

std::vector<Shape> read_corpus(std::istream& in) {
  std::vector<Shape> corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream header(line);
    std::string tag, mt, nt;
    header >> tag >> mt >> nt;
    if (tag != "shape") throw std::invalid_argument("expected 'shape' header, got: " + line);
    int m = parse_kv(mt, "m");
    int n = parse_kv(nt, "n");
    if (!std::getline(in, line)) throw std::invalid_argument("truncated shape record");
    std::istringstream wline(line);
    wline >> tag;
    if (tag != "W") throw std::invalid_argument("expected W line");
    auto counts = parse_ints(wline);
    SetList sets;
    for (int i = 1; i <= n; ++i) {
      if (!std::getline(in, line)) throw std::invalid_argument("truncated shape record");
      std::istringstream aline(line);
      aline >> tag;
      if (tag != "A" + std::to_string(i)) throw std::invalid_argument("expected A" + std::to_string(i));
      sets.push_back(parse_ints(aline));
    }
    corpus.emplace_back(m, sets, SymmetricFunction(n, counts));
  }
  return corpus;
}

void write_pointset(std::ostream& out, const PointSet& points) {
  out << "points m=" << points.m() << " n=" << points.n() << " count=" << points.size() << '\n';
  std::string line;
  for (std::size_t i = 0; i < points.size(); ++i) {
    line.clear();
    auto p = points.point(i);
    for (int j = 0; j < points.n(); ++j) {
      if (j) line += ' ';
      line += std::to_string(p[j]);
    }
    line += '\n';
    out << line;
  }
}

PointSet read_pointset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty point file");
  std::istringstream header(line);
  std::string tag, mt, nt, ct;
  header >> tag >> mt >> nt >> ct;
  if (tag != "points") throw std::invalid_argument("expected 'points' header");
  int m = parse_kv(mt, "m");
  int n = parse_kv(nt, "n");
  long long count = std::stoll(ct.substr(ct.find('=') + 1));
  PointSet out(m, n);
  out.reserve(static_cast<std::size_t>(count));
  Point x(n);
  for (long long i = 0; i < count; ++i) {
    for (int j = 0; j < n; ++j) {
      int v;
      if (!(in >> v)) throw std::invalid_argument("truncated point file");
      x[j] = static_cast<Symbol>(v);
      if (v < 1 || v > m) throw std::invalid_argument("symbol outside alphabet in point file");
    }
    out.push_back(x);
  }
  return out;
}

void write_provenance(std::ostream& out, const PointSet& points) {
  const auto& blocks = points.blocks();
  std::size_t b = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    while (b < blocks.size() && blocks[b].begin <= i) ++b;
    const std::string& label = b == 0 ? points.provenance() : blocks[b - 1].label;
    out << label << " #" << (i - (b == 0 ? 0 : blocks[b - 1].begin)) << '\n';
  }
}

}  // namespace shapehit
