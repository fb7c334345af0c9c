#include "shapehit/threshold_hs.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace shapehit {

int log_budget(double x, int n) {
  return std::max(1, static_cast<int>(std::ceil(x * std::log2(static_cast<double>(n)) - 1e-9)));
}

namespace {

int floor_budget(double x, int n) {
  return static_cast<int>(std::floor(x * std::log2(static_cast<double>(n)) + 1e-9));
}

void compositions_rec(int parts, int budget, std::vector<int>& cur, std::vector<std::vector<int>>& out,
                      std::uint64_t cap) {
  if (static_cast<int>(cur.size()) == parts) {
    out.push_back(cur);
    if (out.size() > cap) throw CapExceeded("guesses", "more than " + std::to_string(cap) + " guess vectors");
    return;
  }
  for (int v = 0; v <= budget; ++v) {
    cur.push_back(v);
    compositions_rec(parts, budget - v, cur, out, cap);
    cur.pop_back();
  }
}

// Non-negative integer vectors of the given length with sum <= budget.
std::vector<std::vector<int>> bounded_vectors(int parts, int budget, std::uint64_t cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (budget >= 0) compositions_rec(parts, budget, cur, out, cap);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

int clamped_power(double lambda0, double target, int max_power, int& requested) {
  requested = lambda0 <= 0 ? 1 : powers_needed(lambda0, target);
  return std::min(requested, max_power);
}

std::shared_ptr<const PointSet> rect_table(int m, int n, const ThresholdHSConfig& cfg) {
  const int c1_bits = log_budget(cfg.c1 * cfg.c, n);
  const int k = std::max(1, std::min({n, cfg.rect_k_cap, cfg.rect_kappa * c1_bits}));
  KWiseSpace space(m, n, k, cfg.table_cap);
  auto pts = std::make_shared<PointSet>(space.enumerate());
  pts->set_provenance("llsz-contract eps=2^-" + std::to_string(c1_bits) + " " + space.label());
  return pts;
}

WalkFamily plain_family(HsBranch branch, int table, std::string label) {
  WalkFamily f;
  f.branch = branch;
  f.buckets = 0;
  WalkGroup g;
  g.tables = {table};
  f.groups.push_back(std::move(g));
  f.label = std::move(label);
  return f;
}

void check_members(std::uint64_t members, const ThresholdHSConfig& cfg, const std::string& what) {
  if (members > cfg.member_cap)
    throw CapExceeded("hash-members", what + " has " + std::to_string(members) + " members");
}

}  // namespace

std::vector<std::vector<int>> eta_guesses(int buckets, int budget, std::uint64_t cap) {
  return bounded_vectors(buckets, budget, cap);
}

ThresholdHittingSet build_high_weight(int m, int n, const ThresholdHSConfig& cfg) {
  cfg.validate();
  ThresholdHittingSet hs(m, n);
  const double cutoff = cfg.C * std::log2(static_cast<double>(n));
  if (cutoff > n / 4.0) {
    std::ostringstream os;
    os << "high-vacuous(C*log2(n)=" << cutoff << ">n/4)";
    hs.add_note(os.str());
    return hs;
  }
  auto prg = make_shape_prg(cfg.prg, m, n, cfg.prg_alpha / 2, cfg.table_cap);
  auto table = std::make_shared<PointSet>(prg->range());
  table->set_provenance(prg->label());
  const int id = hs.add_table(table);
  const int t = n <= 1 ? 0 : ceil_log2(static_cast<std::uint64_t>(n));
  if (t <= 1) {
    hs.add_family(plain_family(HsBranch::high, id, "high buckets=1 " + prg->label()));
    return hs;
  }
  WalkFamily f;
  f.branch = HsBranch::high;
  f.buckets = t;
  f.fractional = std::make_shared<FractionalHashFamily>(n, t, cfg.hash);
  check_members(f.fractional->member_count(), cfg, "fractional hash family");
  f.base = std::make_shared<ExpanderGraph>(base_expander(table->size()));
  const double p = to_double(cfg.prg_alpha) / 2;
  WalkGroup g;
  g.tables.assign(t, id);
  for (int b = 0; b < t; ++b) {
    int req = 0;
    g.powers.push_back(clamped_power(f.base->lambda_bound(), p * p / 8, cfg.max_walk_power, req));
    g.requested.push_back(req);
  }
  g.label = "powers=" + join(g.powers);
  f.groups.push_back(std::move(g));
  f.label = "high buckets=" + std::to_string(t) + " " + prg->label();
  hs.add_family(std::move(f));
  return hs;
}

ThresholdHittingSet build_low_weight_small_sets(int m, int n, const ThresholdHSConfig& cfg) {
  cfg.validate();
  ThresholdHittingSet hs(m, n);
  auto rect = rect_table(m, n, cfg);
  hs.add_family(plain_family(HsBranch::rect, hs.add_table(rect), "low-small T- " + rect->provenance()));

  KWiseSpace pairwise = make_pairwise(m, n, cfg.seed_cap);
  auto table = std::make_shared<PointSet>(pairwise.enumerate());
  const int id = hs.add_table(table);
  auto base = std::make_shared<ExpanderGraph>(base_expander(table->size()));
  const double lambda0 = base->lambda_bound();
  const int theta_max = std::min({n, cfg.max_buckets, log_budget(cfg.c_prime * cfg.c, n)});
  const int eta_budget = floor_budget(cfg.g * cfg.c, n);

  for (int theta = 1; theta <= theta_max; ++theta) {
    WalkFamily f;
    f.branch = HsBranch::low_small;
    f.buckets = theta;
    f.perfect = std::make_shared<PerfectHashFamily>(n, theta, cfg.seed_cap);
    check_members(f.perfect->member_count(), cfg, "perfect hash family");
    f.base = base;
    std::map<std::vector<int>, WalkGroup> groups;
    for (const auto& e : eta_guesses(theta, eta_budget, cfg.guess_cap)) {
      std::vector<int> powers, requested;
      for (int i = 0; i < theta; ++i) {
        const int prev = i == 0 ? 0 : e[i - 1];
        int req = 0;
        powers.push_back(clamped_power(lambda0, std::ldexp(1.0, -e[i] - prev) / 100, cfg.max_walk_power, req));
        requested.push_back(req);
      }
      auto [it, fresh] = groups.try_emplace(powers);
      WalkGroup& g = it->second;
      if (fresh) {
        g.tables.assign(theta, id);
        g.powers = powers;
        g.requested = requested;
        g.multiplicity = 0;
        g.label = "powers=" + join(powers);
      }
      g.multiplicity += 1;
      for (int i = 0; i < theta; ++i) g.requested[i] = std::max(g.requested[i], requested[i]);
    }
    for (auto& [key, g] : groups) f.groups.push_back(std::move(g));
    f.label = "low-small theta=" + std::to_string(theta) + " " + pairwise.label();
    hs.add_family(std::move(f));
  }
  return hs;
}

ThresholdHittingSet build_general_low_weight(int m, int n, const ThresholdHSConfig& cfg) {
  cfg.validate();
  ThresholdHittingSet hs(m, n);
  auto rect = rect_table(m, n, cfg);
  hs.add_family(plain_family(HsBranch::rect, hs.add_table(rect), "low-general t=0 " + rect->provenance()));

  const int aC = std::max(1, std::min(n, cfg.table_a * cfg.table_C));
  KWiseSpace space(m, n, aC, cfg.table_cap);
  const int small_table = hs.add_table(std::make_shared<PointSet>(space.enumerate()));
  std::map<int, int> rect_tables;  // floor(rho / 10) -> table id
  auto table_for = [&](int rho) {
    if (rho < 10) return small_table;
    auto it = rect_tables.find(rho / 10);
    if (it != rect_tables.end()) return it->second;
    StrongRectConfig rc;
    rc.m = m;
    rc.n = n;
    rc.c = cfg.c4 * cfg.c;
    rc.rho = 10 * (rho / 10);
    rc.a = cfg.table_a;
    rc.C = cfg.table_C;
    rc.max_walk_power = cfg.max_walk_power;
    rc.hash = cfg.hash;
    rc.seed_cap = cfg.seed_cap;
    const int id = hs.add_table(std::make_shared<PointSet>(build_strong_rect(rc).materialize(cfg.table_cap)));
    rect_tables.emplace(rho / 10, id);
    return id;
  };

  const int t_max = std::min({n, cfg.max_buckets, floor_budget(15 * cfg.c, n)});
  const int rho_budget = floor_budget(cfg.c2 * cfg.c, n);
  const int a_budget = floor_budget(cfg.c3 * cfg.c, n);

  for (int t = 1; t <= t_max; ++t) {
    std::map<std::vector<int>, BigInt> rho_groups;
    for (const auto& rho : bounded_vectors(t, rho_budget, cfg.guess_cap)) {
      std::vector<int> ids;
      for (int r : rho) ids.push_back(table_for(r));
      rho_groups[ids] += 1;
    }
    std::uint64_t nv = 1;
    for (const auto& [ids, count] : rho_groups)
      for (int id : ids) nv = std::max<std::uint64_t>(nv, hs.tables()[id]->size());

    WalkFamily f;
    f.branch = HsBranch::low_general;
    f.buckets = t;
    f.perfect = std::make_shared<PerfectHashFamily>(n, t, cfg.seed_cap);
    check_members(f.perfect->member_count(), cfg, "perfect hash family");
    f.base = std::make_shared<ExpanderGraph>(base_expander(nv));
    const double lambda0 = f.base->lambda_bound();

    std::map<std::vector<int>, std::pair<std::vector<int>, BigInt>> a_groups;  // powers -> (requested, count)
    for (const auto& a : bounded_vectors(t, a_budget, cfg.guess_cap)) {
      std::vector<int> powers, requested;
      for (int i = 0; i < t; ++i) {
        const int nxt = i + 1 < t ? a[i + 1] : 0;
        int req = 0;
        powers.push_back(clamped_power(lambda0, std::ldexp(1.0, -a[i] - nxt) / 10, cfg.max_walk_power, req));
        requested.push_back(req);
      }
      auto& slot = a_groups[powers];
      if (slot.first.empty()) slot.first = requested;
      for (int i = 0; i < t; ++i) slot.first[i] = std::max(slot.first[i], requested[i]);
      slot.second += 1;
    }
    for (const auto& [ids, rho_count] : rho_groups)
      for (const auto& [powers, info] : a_groups) {
        WalkGroup g;
        g.tables = ids;
        g.powers = powers;
        g.requested = info.first;
        g.multiplicity = rho_count * info.second;
        g.label = "tables=" + join(ids) + " powers=" + join(powers);
        f.groups.push_back(std::move(g));
      }
    f.label = "low-general t=" + std::to_string(t) + " " + space.label();
    hs.add_family(std::move(f));
  }
  return hs;
}

ThresholdHittingSet build_threshold_hs(int m, int n, const Rational& eps, const ThresholdHSConfig& cfg,
                                       ThresholdBranchSel sel) {
  cfg.validate();
  if (m < 1 || n < 1) throw std::invalid_argument("m, n must be >= 1");
  if (eps <= 0 || eps > 1) throw std::invalid_argument("eps must lie in (0, 1]");
  const double limit = cfg.c * std::log2(static_cast<double>(n)) + 1e-9;
  if (std::log2(static_cast<double>(m)) > limit || -std::log2(to_double(eps)) > limit)
    throw std::invalid_argument("need m, 1/eps <= n^c");
  ThresholdHittingSet hs(m, n);
  if (sel == ThresholdBranchSel::all || sel == ThresholdBranchSel::low_general)
    hs.append(build_general_low_weight(m, n, cfg));
  if (sel == ThresholdBranchSel::all || sel == ThresholdBranchSel::low_small)
    hs.append(build_low_weight_small_sets(m, n, cfg));
  if (sel == ThresholdBranchSel::all || sel == ThresholdBranchSel::high) hs.append(build_high_weight(m, n, cfg));
  hs.add_note("eps=" + to_string(eps));
  return hs;
}

std::vector<int> canonical_rho(const Shape& threshold, const std::vector<int>& partition, int buckets) {
  std::vector<Rational> mass(buckets, Rational(0));
  for (int j = 0; j < threshold.n(); ++j) {
    const Rational p(threshold.set_size(j), threshold.m());
    mass.at(partition[j]) += p <= Rational(1, 2) ? p : 1 - p;
  }
  std::vector<int> rho;
  for (const auto& x : mass) {
    BigInt q = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
    if (Rational(q) < x) q += 1;
    rho.push_back(static_cast<int>(q) + 1);
  }
  return rho;
}

int canonical_t(const Shape& threshold) {
  const auto form = threshold_form(threshold);
  if (!form || form->first != Direction::plus) throw std::invalid_argument("canonical t needs a T+ threshold");
  int large = 0;
  for (int j = 0; j < threshold.n(); ++j) large += 2 * threshold.set_size(j) > threshold.m();
  return std::max(form->second - large, 0);
}

Rational subevent_probability(const Shape& threshold) {
  const auto form = threshold_form(threshold);
  if (!form || form->first != Direction::plus) throw std::invalid_argument("subevent needs a T+ threshold");
  Rational zbar_zero = 1;
  std::vector<Rational> small;
  int large = 0;
  for (int j = 0; j < threshold.n(); ++j) {
    const Rational p(threshold.set_size(j), threshold.m());
    if (p > Rational(1, 2)) {
      zbar_zero *= p;
      ++large;
    } else {
      small.push_back(p);
    }
  }
  const auto dist = count_distribution(small);
  Rational tail = 0;
  for (int y = std::max(form->second - large, 0); y < static_cast<int>(dist.size()); ++y) tail += dist[y];
  return zbar_zero * tail;
}

std::vector<Rational> bucket_hit_probabilities(const PointSet& space, const Shape& sets,
                                               const std::vector<int>& partition, int buckets) {
  std::vector<std::uint64_t> good(buckets, 0);
  std::vector<bool> hit(buckets);
  for (std::size_t s = 0; s < space.size(); ++s) {
    auto x = space.point(s);
    std::fill(hit.begin(), hit.end(), false);
    for (int j = 0; j < sets.n(); ++j)
      if (sets.contains(j, x[j])) hit[partition[j]] = true;
    for (int b = 0; b < buckets; ++b) good[b] += hit[b];
  }
  std::vector<Rational> out;
  for (auto g : good) out.emplace_back(BigInt(g), BigInt(space.size()));
  return out;
}

}  // namespace shapehit
