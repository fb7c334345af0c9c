#include "shapehit/threshold_hs.hpp"

#include <algorithm>
#include <bit>
#include <atomic>
#include <bitset>
#include <climits>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace shapehit {

void ThresholdHSConfig::validate() const {
  for (double v : {c, C, c1, c2, c3, c4, c_prime, c4_prime, g})
    if (!(v >= 1.0)) throw std::invalid_argument("threshold constants must be >= 1");
  if (prg_alpha <= 0 || prg_alpha > 1) throw std::invalid_argument("prg_alpha must lie in (0, 1]");
  if (max_buckets < 1 || max_walk_power < 1 || rect_kappa < 1 || rect_k_cap < 1 || table_a < 1 || table_C < 1)
    throw std::invalid_argument("threshold integer parameters must be >= 1");
  if (seed_cap == 0 || member_cap == 0 || guess_cap == 0 || table_cap == 0)
    throw std::invalid_argument("caps must be positive");
}

std::string to_string(HsBranch b) {
  switch (b) {
    case HsBranch::high: return "high";
    case HsBranch::low_small: return "low-small";
    case HsBranch::low_general: return "low-general";
    case HsBranch::rect: return "rect";
  }
  return "?";
}

std::uint64_t WalkFamily::member_count() const {
  if (fractional) return fractional->member_count();
  if (perfect) return perfect->member_count();
  return 1;
}

std::vector<int> WalkFamily::partition(std::uint64_t member) const {
  std::vector<int> out;
  if (fractional)
    out = fractional->eval_all(fractional->member(member));
  else if (perfect)
    out = perfect->buckets(member);
  else
    return out;
  for (int& b : out) --b;
  return out;
}

BigInt WalkFamily::walk_count(const WalkGroup& g) const {
  if (buckets == 0) return 0;
  BigInt s = base->vertex_count();
  for (int p : g.powers) s *= boost::multiprecision::pow(BigInt(ExpanderGraph::kBaseDegree), p);
  return s;
}

ThresholdHittingSet::ThresholdHittingSet(int m, int n) : m_(m), n_(n) {}

int ThresholdHittingSet::add_table(std::shared_ptr<const PointSet> table) {
  if (table->m() != m_ || table->n() != n_) throw std::invalid_argument("table parameters differ from the set");
  if (table->empty()) throw std::invalid_argument("empty table");
  tables_.push_back(std::move(table));
  return static_cast<int>(tables_.size()) - 1;
}

void ThresholdHittingSet::add_family(WalkFamily family) {
  for (const auto& g : family.groups) {
    if (family.buckets == 0 ? g.tables.size() != 1 : static_cast<int>(g.tables.size()) != family.buckets)
      throw std::invalid_argument("walk group has the wrong number of tables");
    for (int t : g.tables)
      if (t < 0 || t >= static_cast<int>(tables_.size())) throw std::out_of_range("unknown table");
    if (family.buckets > 0 && static_cast<int>(g.powers.size()) != family.buckets)
      throw std::invalid_argument("walk group has the wrong number of graphs");
  }
  if (family.buckets > 0 && !family.base) throw std::invalid_argument("walk family without a graph");
  families_.push_back(std::move(family));
}

void ThresholdHittingSet::append(const ThresholdHittingSet& other) {
  if (m_ == 0 && n_ == 0) {
    m_ = other.m_;
    n_ = other.n_;
  }
  if (other.m_ != m_ || other.n_ != n_) throw std::invalid_argument("union of sets with different parameters");
  const int offset = static_cast<int>(tables_.size());
  tables_.insert(tables_.end(), other.tables_.begin(), other.tables_.end());
  for (WalkFamily f : other.families_) {
    for (auto& g : f.groups)
      for (int& t : g.tables) t += offset;
    families_.push_back(std::move(f));
  }
  notes_.insert(notes_.end(), other.notes_.begin(), other.notes_.end());
}

ThresholdHittingSet ThresholdHittingSet::filtered(const std::function<bool(const WalkFamily&)>& keep) const {
  ThresholdHittingSet out(m_, n_);
  out.tables_ = tables_;
  out.notes_ = notes_;
  for (const auto& f : families_)
    if (keep(f)) out.families_.push_back(f);
  return out;
}

BigInt ThresholdHittingSet::size() const {
  BigInt s = 0;
  for (const auto& f : families_) {
    BigInt per = 0;
    for (const auto& g : f.groups)
      per += g.multiplicity * (f.buckets == 0 ? BigInt(tables_[g.tables[0]]->size()) : f.walk_count(g));
    s += per * f.member_count();
  }
  return s;
}

BigInt ThresholdHittingSet::block_points() const {
  BigInt s = 0;
  for (const auto& f : families_) {
    BigInt per = 0;
    for (const auto& g : f.groups) per += f.buckets == 0 ? BigInt(tables_[g.tables[0]]->size()) : f.walk_count(g);
    s += per * f.member_count();
  }
  return s;
}

namespace {

constexpr int kNegInf = INT_MIN / 4;

std::string block_label(const WalkFamily& f, std::uint64_t member, const WalkGroup& g) {
  std::string s = f.label;
  if (f.buckets > 0) s += " member=" + std::to_string(member);
  if (!g.label.empty()) s += " " + g.label;
  return s + " mult=" + g.multiplicity.str();
}

// Per-member cache of accepting counts: cnt[b][s] for table point s restricted to bucket b.
class BucketCounts {
 public:
  BucketCounts(const Shape& sets, const std::vector<int>& partition, int buckets)
      : sets_(sets), partition_(partition), buckets_(buckets) {}

  const std::vector<std::vector<int>>& of(int table_id, const PointSet& table) {
    auto it = cache_.find(table_id);
    if (it != cache_.end()) return it->second;
    std::vector<std::vector<int>> cnt(buckets_, std::vector<int>(table.size(), 0));
    for (std::size_t s = 0; s < table.size(); ++s) {
      auto x = table.point(s);
      for (int j = 0; j < sets_.n(); ++j)
        if (sets_.contains(j, x[j])) ++cnt[partition_[j]][s];
    }
    return cache_.emplace(table_id, std::move(cnt)).first->second;
  }

 private:
  const Shape& sets_;
  const std::vector<int>& partition_;
  int buckets_;
  std::map<int, std::vector<std::vector<int>>> cache_;
};

}  // namespace

std::optional<CountExtreme> ThresholdHittingSet::extreme_count(const Shape& sets, bool maximize,
                                                               std::optional<int> stop) const {
  if (sets.m() != m_ || sets.n() != n_) throw std::invalid_argument("shape parameters differ from the set");
  const int sign = maximize ? 1 : -1;
  std::optional<CountExtreme> best;
  auto reached = [&] { return best && stop && sign * best->count >= sign * *stop; };

  for (const auto& f : families_) {
    const std::uint64_t members = f.member_count();
    for (std::uint64_t mi = 0; mi < members; ++mi) {
      const std::vector<int> partition = f.buckets > 0 ? f.partition(mi) : std::vector<int>(n_, 0);
      BucketCounts counts(sets, partition, std::max(1, f.buckets));
      for (const auto& g : f.groups) {
        if (f.buckets == 0) {
          const PointSet& table = *tables_[g.tables[0]];
          const auto& cnt = counts.of(g.tables[0], table)[0];
          std::size_t arg = 0;
          for (std::size_t s = 1; s < table.size(); ++s)
            if (sign * cnt[s] > sign * cnt[arg]) arg = s;
          if (!best || sign * cnt[arg] > sign * best->count) {
            auto x = table.point(arg);
            best = CountExtreme{cnt[arg], Point(x.begin(), x.end()), block_label(f, mi, g)};
          }
          if (reached()) return best;
          continue;
        }
        const int t = f.buckets;
        const ExpanderGraph& base = *f.base;
        const std::uint64_t nv = base.vertex_count();
        std::vector<const std::vector<int>*> val(t);
        for (int b = 0; b < t; ++b) val[b] = &counts.of(g.tables[b], *tables_[g.tables[b]])[b];
        auto value = [&](int b, std::uint64_t v) { return sign * (*val[b])[v % val[b]->size()]; };
        const auto nb = base.base_table();

        std::vector<int> cur(nv), next(nv);
        for (std::uint64_t v = 0; v < nv; ++v) cur[v] = value(0, v);
        std::vector<std::vector<std::uint32_t>> pred;
        for (int b = 1; b < t; ++b) {
          for (int step = 0; step < g.powers[b]; ++step) {
            std::fill(next.begin(), next.end(), kNegInf);
            std::vector<std::uint32_t> from(nv, 0);
            for (std::uint64_t u = 0; u < nv; ++u)
              for (int d = 0; d < ExpanderGraph::kBaseDegree; ++d) {
                const std::uint64_t w = nb[u * ExpanderGraph::kBaseDegree + d];
                if (cur[u] > next[w]) {
                  next[w] = cur[u];
                  from[w] = static_cast<std::uint32_t>(u);
                }
              }
            pred.push_back(std::move(from));
            cur.swap(next);
          }
          for (std::uint64_t v = 0; v < nv; ++v) cur[v] += value(b, v);
        }
        const std::uint64_t arg = static_cast<std::uint64_t>(std::max_element(cur.begin(), cur.end()) - cur.begin());
        const int score = cur[arg];
        if (best && score <= sign * best->count) continue;

        std::vector<std::uint64_t> vs(t);
        std::uint64_t v = arg;
        std::size_t p = pred.size();
        for (int b = t - 1; b >= 1; --b) {
          vs[b] = v;
          for (int step = 0; step < g.powers[b]; ++step) v = pred[--p][v];
        }
        vs[0] = v;
        Point x(n_);
        for (int j = 0; j < n_; ++j) {
          const PointSet& table = *tables_[g.tables[partition[j]]];
          x[j] = table.point(vs[partition[j]] % table.size())[j];
        }
        best = CountExtreme{sign * score, std::move(x), block_label(f, mi, g)};
        if (reached()) return best;
      }
    }
  }
  return best;
}

std::optional<std::pair<Direction, int>> threshold_form(const Shape& shape) {
  const auto acc = shape.sym().accept_counts();
  const int n = shape.n();
  if (acc.empty()) return std::nullopt;
  const bool contiguous = acc.back() - acc.front() + 1 == static_cast<int>(acc.size());
  if (!contiguous) return std::nullopt;
  if (acc.back() == n) return std::make_pair(Direction::plus, acc.front());
  if (acc.front() == 0) return std::make_pair(Direction::minus, acc.back());
  return std::nullopt;
}

std::optional<Point> ThresholdHittingSet::find_threshold_hit(const Shape& threshold) const {
  const auto form = threshold_form(threshold);
  if (!form) {
    if (threshold.sym().accept_counts().empty()) return std::nullopt;
    throw std::invalid_argument("shape is not a threshold");
  }
  const bool plus = form->first == Direction::plus;
  const auto ext = extreme_count(threshold, plus, form->second);
  if (!ext) return std::nullopt;
  if (plus ? ext->count >= form->second : ext->count <= form->second) return ext->witness;
  return std::nullopt;
}

void ThresholdHittingSet::for_each_point(
    const std::function<void(std::span<const Symbol>, const std::string&)>& visit) const {
  Point x(n_);
  for (const auto& f : families_) {
    std::vector<std::vector<ExpanderGraph>> graphs;
    if (f.buckets > 0)
      for (const auto& g : f.groups) {
        std::vector<ExpanderGraph> gs;
        for (int p : g.powers) gs.push_back(p == 1 ? *f.base : power(*f.base, p, UINT64_MAX));
        graphs.push_back(std::move(gs));
      }
    for (std::uint64_t mi = 0; mi < f.member_count(); ++mi) {
      const std::vector<int> partition = f.partition(mi);
      for (std::size_t gi = 0; gi < f.groups.size(); ++gi) {
        const WalkGroup& g = f.groups[gi];
        const std::string label = block_label(f, mi, g);
        if (f.buckets == 0) {
          const PointSet& table = *tables_[g.tables[0]];
          for (std::size_t s = 0; s < table.size(); ++s) visit(table.point(s), label);
          continue;
        }
        const WalkSpace ws(graphs[gi]);
        const std::uint64_t total = ws.checked_size(UINT64_MAX >> 1);
        for (std::uint64_t idx = 0; idx < total; ++idx) {
          const auto vs = walk_vertices(ws, ws.walk_at(idx));
          for (int j = 0; j < n_; ++j) {
            const PointSet& table = *tables_[g.tables[partition[j]]];
            x[j] = table.point(vs[partition[j]] % table.size())[j];
          }
          visit(x, label);
        }
      }
    }
  }
}

PointSet ThresholdHittingSet::materialize(std::uint64_t cap, bool distinct) const {
  if (!distinct && block_points() > cap)
    throw CapExceeded("points", "threshold hitting set has " + block_points().str() + " block points");
  PointSet out(m_, n_, provenance());
  std::unordered_set<std::u16string> seen;
  std::string current;
  for_each_point([&](std::span<const Symbol> x, const std::string& label) {
    if (distinct && !seen.emplace(x.begin(), x.end()).second) return;
    if (out.size() >= cap) throw CapExceeded("points", "more than " + std::to_string(cap) + " points");
    if (label != current || out.blocks().empty()) {
      out.begin_block(label);
      current = label;
    }
    out.push_back(x);
  });
  return out;
}

std::string ThresholdHittingSet::provenance() const {
  std::ostringstream os;
  os << "thr-hs m=" << m_ << " n=" << n_ << " families=" << families_.size() << " size=" << size().str();
  for (const auto& f : families_) os << " [" << f.label << "]";
  for (const auto& note : notes_) os << " note=" << note;
  return os.str();
}

std::vector<HittingVerdict> verify_thresholds(const ThresholdHittingSet& hs, const std::vector<Shape>& corpus,
                                              const Rational& eps, int jobs, bool check_ineligible) {
  std::vector<HittingVerdict> out(corpus.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < corpus.size() && !failed;) {
      try {
        HittingVerdict& v = out[i];
        v.shape_id = i;
        v.eps = eps;
        v.uniform_prob = acceptance_probability(corpus[i]).exact_prob;
        v.eligible = v.uniform_prob >= eps;
        if (v.eligible || check_ineligible) {
          auto w = hs.find_threshold_hit(corpus[i]);
          if (w) {
            if (!evaluate(corpus[i], *w)) throw std::logic_error("threshold witness is not accepted");
            v.hit = true;
            v.witness = std::move(w);
          }
        }
        v.failure = v.eligible && !v.hit;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(corpus.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace shapehit

namespace shapehit {

namespace {

using CountMask = std::bitset<256>;

CountMask shifted(const CountMask& m, int by) { return m << by; }

}  // namespace

std::vector<std::optional<Point>> ThresholdHittingSet::reachable_counts(const Shape& sets) const {
  if (sets.m() != m_ || sets.n() != n_) throw std::invalid_argument("shape parameters differ from the set");
  if (n_ > 255) throw CapExceeded("counts", "reachable counts need n <= 255");
  std::vector<std::optional<Point>> out(n_ + 1);
  int missing = n_ + 1;
  auto record = [&](int count, Point x) {
    if (!out[count]) {
      out[count] = std::move(x);
      --missing;
    }
  };

  for (const auto& f : families_) {
    const std::uint64_t members = f.member_count();
    for (std::uint64_t mi = 0; mi < members && missing > 0; ++mi) {
      const std::vector<int> partition = f.buckets > 0 ? f.partition(mi) : std::vector<int>(n_, 0);
      BucketCounts counts(sets, partition, std::max(1, f.buckets));
      for (const auto& g : f.groups) {
        if (f.buckets == 0) {
          const PointSet& table = *tables_[g.tables[0]];
          const auto& cnt = counts.of(g.tables[0], table)[0];
          for (std::size_t s = 0; s < table.size(); ++s)
            if (!out[cnt[s]]) record(cnt[s], Point(table.point(s).begin(), table.point(s).end()));
          continue;
        }
        const int t = f.buckets;
        const ExpanderGraph& base = *f.base;
        const std::uint64_t nv = base.vertex_count();
        std::vector<const std::vector<int>*> val(t);
        for (int b = 0; b < t; ++b) val[b] = &counts.of(g.tables[b], *tables_[g.tables[b]])[b];
        auto value = [&](int b, std::uint64_t v) { return (*val[b])[v % val[b]->size()]; };
        const auto nb = base.base_table();

        // layers[k]: reachable partial counts per vertex after k graph steps, before the bucket value is added.
        std::vector<std::vector<CountMask>> layers;
        std::vector<CountMask> cur(nv);
        for (std::uint64_t v = 0; v < nv; ++v) cur[v].set(value(0, v));
        for (int b = 1; b < t; ++b) {
          for (int step = 0; step < g.powers[b]; ++step) {
            layers.push_back(cur);
            std::vector<CountMask> next(nv);
            for (std::uint64_t u = 0; u < nv; ++u)
              for (int d = 0; d < ExpanderGraph::kBaseDegree; ++d) next[nb[u * ExpanderGraph::kBaseDegree + d]] |= cur[u];
            cur.swap(next);
          }
          for (std::uint64_t v = 0; v < nv; ++v) cur[v] = shifted(cur[v], value(b, v));
        }
        CountMask all;
        for (const auto& m : cur) all |= m;
        for (int c = 0; c <= n_; ++c) {
          if (!all.test(c) || out[c]) continue;
          std::uint64_t v = 0;
          while (!cur[v].test(c)) ++v;
          std::vector<std::uint64_t> vs(t);
          int need = c;
          std::size_t k = layers.size();
          for (int b = t - 1; b >= 1; --b) {
            vs[b] = v;
            need -= value(b, v);
            for (int step = 0; step < g.powers[b]; ++step) {
              const auto& prev = layers[--k];
              bool found = false;
              for (std::uint64_t u = 0; u < nv && !found; ++u)
                for (int d = 0; d < ExpanderGraph::kBaseDegree && !found; ++d)
                  if (nb[u * ExpanderGraph::kBaseDegree + d] == v && prev[u].test(need)) {
                    v = u;
                    found = true;
                  }
              if (!found) throw std::logic_error("reachable count backtrack failed");
            }
          }
          vs[0] = v;
          Point x(n_);
          for (int j = 0; j < n_; ++j) {
            const PointSet& table = *tables_[g.tables[partition[j]]];
            x[j] = table.point(vs[partition[j]] % table.size())[j];
          }
          record(c, std::move(x));
        }
      }
    }
  }
  return out;
}

}  // namespace shapehit

namespace shapehit {

namespace {

// Rows of `words` 64-bit words; row |= other row shifted up by `by` bits.
void or_shifted(std::uint64_t* dst, const std::uint64_t* src, std::size_t words, std::uint64_t by) {
  const std::size_t ws = by / 64;
  const unsigned bs = by % 64;
  for (std::size_t i = words; i-- > ws;) {
    std::uint64_t w = src[i - ws] << bs;
    if (bs && i - ws > 0) w |= src[i - ws - 1] >> (64 - bs);
    dst[i] |= w;
  }
}

}  // namespace

PointSet ThresholdHittingSet::distinct_points(std::uint64_t word_cap) const {
  const std::uint64_t domain = domain_size(m_, n_, word_cap * 64);
  const std::size_t words = static_cast<std::size_t>((domain + 63) / 64);
  std::vector<std::uint64_t> seen(words, 0);
  std::vector<std::uint64_t> place(n_, 1);
  for (int j = 1; j < n_; ++j) place[j] = place[j - 1] * static_cast<std::uint64_t>(m_);
  auto index_of = [&](std::span<const Symbol> x, const std::vector<int>* partition, int bucket) {
    std::uint64_t idx = 0;
    for (int j = 0; j < n_; ++j)
      if (!partition || (*partition)[j] == bucket) idx += static_cast<std::uint64_t>(x[j] - 1) * place[j];
    return idx;
  };

  std::uint64_t found = 0;
  auto saturated = [&] {
    found = 0;
    for (auto w : seen) found += static_cast<std::uint64_t>(std::popcount(w));
    return found == domain;
  };
  std::vector<std::uint64_t> cur, next, before;
  std::unordered_map<std::uint64_t, std::size_t> owner;
  for (std::size_t fi = 0; fi < families_.size(); ++fi) {
    const WalkFamily& f = families_[fi];
    if (saturated()) break;
    before = seen;
    const std::uint64_t members = f.member_count();
    for (std::uint64_t mi = 0; mi < members && found < domain; ++mi) {
      const std::vector<int> partition = f.buckets > 0 ? f.partition(mi) : std::vector<int>(n_, 0);
      for (const auto& g : f.groups) {
        if (f.buckets == 0) {
          const PointSet& table = *tables_[g.tables[0]];
          for (std::size_t s = 0; s < table.size(); ++s) {
            const std::uint64_t idx = index_of(table.point(s), nullptr, 0);
            seen[idx / 64] |= std::uint64_t{1} << (idx % 64);
          }
          continue;
        }
        const int t = f.buckets;
        const ExpanderGraph& base = *f.base;
        const std::uint64_t nv = base.vertex_count();
        if (nv * words > word_cap)
          throw CapExceeded("points", "distinct-point DP needs " + std::to_string(nv * words) + " words");
        std::vector<std::vector<std::uint64_t>> offset(t, std::vector<std::uint64_t>(nv));
        for (int b = 0; b < t; ++b) {
          const PointSet& table = *tables_[g.tables[b]];
          std::vector<std::uint64_t> per(table.size());
          for (std::size_t s = 0; s < table.size(); ++s) per[s] = index_of(table.point(s), &partition, b);
          for (std::uint64_t v = 0; v < nv; ++v) offset[b][v] = per[v % per.size()];
        }
        const auto nb = base.base_table();
        cur.assign(nv * words, 0);
        next.resize(nv * words);
        for (std::uint64_t v = 0; v < nv; ++v) cur[v * words + offset[0][v] / 64] |= std::uint64_t{1} << (offset[0][v] % 64);
        for (int b = 1; b < t; ++b) {
          for (int step = 0; step < g.powers[b]; ++step) {
            std::fill(next.begin(), next.end(), 0);
            for (std::uint64_t u = 0; u < nv; ++u) {
              const std::uint64_t* src = &cur[u * words];
              for (int d = 0; d < ExpanderGraph::kBaseDegree; ++d) {
                std::uint64_t* dst = &next[nb[u * ExpanderGraph::kBaseDegree + d] * words];
                for (std::size_t w = 0; w < words; ++w) dst[w] |= src[w];
              }
            }
            cur.swap(next);
          }
          std::fill(next.begin(), next.end(), 0);
          for (std::uint64_t v = 0; v < nv; ++v) or_shifted(&next[v * words], &cur[v * words], words, offset[b][v]);
          cur.swap(next);
        }
        for (std::uint64_t v = 0; v < nv; ++v)
          for (std::size_t w = 0; w < words; ++w) seen[w] |= cur[v * words + w];
      }
      saturated();
    }
    for (std::size_t w = 0; w < words; ++w)
      for (std::uint64_t diff = seen[w] & ~before[w]; diff; diff &= diff - 1)
        owner.emplace(w * 64 + static_cast<std::uint64_t>(std::countr_zero(diff)), fi);
  }

  PointSet out(m_, n_, provenance());
  Point x(n_);
  std::size_t last = families_.size();
  for (std::uint64_t idx = 0; idx < domain; ++idx) {
    if (!(seen[idx / 64] >> (idx % 64) & 1)) continue;
    if (const std::size_t fi = owner.at(idx); fi != last) {
      out.begin_block(families_[fi].label);
      last = fi;
    }
    std::uint64_t r = idx;
    for (int j = 0; j < n_; ++j) {
      x[j] = static_cast<Symbol>(r % m_ + 1);
      r /= m_;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace shapehit
