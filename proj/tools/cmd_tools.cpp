#include "cli.hpp"

#include "shapehit/corpus.hpp"
#include "shapehit/hashing.hpp"
#include "shapehit/oracle.hpp"

#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

namespace shapehit::cli {

namespace {

/// Writes to `out` (with manifest) or to stdout when no path was given.
void emit_text(const Context& ctx, const std::string& sub, const Params& params, const std::string& out,
               const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  write_outputs(ctx, sub, params, {{out, text}});
}

struct VerifyOpts {
  std::string points, corpus, eps, report;
};

struct CorpusOpts {
  int m = 2, n = 4, rho = 10;
  double c = 1.0;
  std::string sizes, style = "prefix", thetas, dirs = "both", accept = "singletons", out;
  bool srect_eligible = false;
  std::uint64_t cap = 0;
};

struct CertOpts {
  std::uint64_t n = 0;
  int t = 2;
  double lambda = 0.5;
  std::string kind = "perfect", z_file, out;
};

struct MonteCarloOpts {
  std::string corpus, out;
  std::uint64_t samples = 100000, seed = 0;
};

CorpusGrid make_grid(const Context& ctx, const CorpusOpts& o) {
  CorpusGrid g;
  g.m = o.m;
  g.n = o.n;
  if (!o.sizes.empty()) g.sizes = parse_int_list(o.sizes);
  g.style = parse_set_style(o.style);
  g.cap = o.cap ? o.cap : ctx.config.corpus_cap;
  return g;
}

std::vector<Rational> read_z_vector(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Rational> z;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      z.push_back(parse_rational(line));
    } catch (const std::exception&) {
      throw UsageError("bad rational '" + line + "' in " + path);
    }
  }
  return z;
}

/// Visits every t-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(int n, int t, F&& visit) {
  std::vector<int> s(t);
  for (int i = 0; i < t; ++i) s[i] = i;
  while (true) {
    visit(std::span<const int>(s));
    int i = t - 1;
    while (i >= 0 && s[i] == n - t + i) --i;
    if (i < 0) return;
    ++s[i];
    for (int j = i + 1; j < t; ++j) s[j] = s[j - 1] + 1;
  }
}

std::uint64_t binomial(int n, int t) {
  long double r = 1;
  for (int i = 1; i <= t; ++i) r = r * (n - t + i) / i;
  return static_cast<std::uint64_t>(std::llround(r));
}

}  // namespace

void add_verify(CLI::App& app, Context& ctx, Handlers& handlers) {
  auto o = std::make_shared<VerifyOpts>();
  auto* v = app.add_subcommand("verify", "check that a point set hits every eligible shape of a corpus");
  v->add_option("--points", o->points)->required()->check(CLI::ExistingFile);
  v->add_option("--corpus", o->corpus)->required()->check(CLI::ExistingFile);
  v->add_option("--eps", o->eps)->required();
  v->add_option("--report", o->report, "report file (default: stdout)");
  handlers.emplace_back(v, [&ctx, o] {
    const Rational eps = parse_eps(o->eps);
    const PointSet pts = load_pointset(o->points);
    const auto corpus = load_corpus(o->corpus);
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (corpus[i].m() != pts.m() || corpus[i].n() != pts.n())
        throw UsageError("shape " + std::to_string(i) + " is over [" + std::to_string(corpus[i].m()) + "]^" +
                         std::to_string(corpus[i].n()) + " but the point set is over [" + std::to_string(pts.m()) +
                         "]^" + std::to_string(pts.n()));
    const auto verdicts = verify_hitting(pts, corpus, eps, ctx.jobs);
    std::ostringstream os;
    for (const auto& verdict : verdicts) os << format_verdict(verdict) << "\n";
    const std::size_t misses = count_failures(verdicts);
    emit_text(ctx, "verify",
              {{"points", file_sha256(o->points)}, {"corpus", file_sha256(o->corpus)}, {"eps", o->eps}},
              o->report, os.str());
    std::cerr << verdicts.size() << " shapes, " << misses << " missed obligations\n";
    return misses == 0 ? kOk : kMiss;
  });
}

void add_corpus(CLI::App& app, Context& ctx, Handlers& handlers) {
  auto o = std::make_shared<CorpusOpts>();
  auto* corpus = app.add_subcommand("corpus", "deterministic shape corpora");
  corpus->require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--m", o->m)->required()->check(CLI::Range(1, 255));
    sub->add_option("--n", o->n)->required()->check(CLI::PositiveNumber);
    sub->add_option("--sizes", o->sizes, "allowed set sizes, comma separated (default 0..m)");
    sub->add_option("--style", o->style)->check(CLI::IsMember({"prefix", "suffix", "all"}));
    sub->add_option("--cap", o->cap, "largest corpus size (default from config)");
    sub->add_option("-o,--out", o->out, "corpus file (default: stdout)");
  };
  auto params = [o] {
    return Params{{"m", std::to_string(o->m)}, {"n", std::to_string(o->n)}, {"sizes", o->sizes},
                  {"style", o->style}};
  };

  auto* th = corpus->add_subcommand("thresholds", "set patterns x theta x direction");
  common(th);
  th->add_option("--thetas", o->thetas, "comma separated (default 0..n)");
  th->add_option("--dirs", o->dirs)->check(CLI::IsMember({"plus", "minus", "both"}));
  handlers.emplace_back(th, [&ctx, o, params] {
    const auto thetas = o->thetas.empty() ? std::vector<int>{} : parse_int_list(o->thetas);
    const auto shapes = threshold_corpus(make_grid(ctx, *o), thetas, o->dirs != "minus", o->dirs != "plus");
    std::ostringstream os;
    write_corpus(os, shapes);
    auto p = params();
    p.emplace_back("thetas", o->thetas);
    p.emplace_back("dirs", o->dirs);
    emit_text(ctx, "corpus thresholds", p, o->out, os.str());
    return kOk;
  });

  auto* re = corpus->add_subcommand("rectangles", "set patterns accepted when every coordinate lands");
  common(re);
  re->add_flag("--srect-eligible", o->srect_eligible, "keep only rectangles meeting the strong-rectangle hypotheses");
  re->add_option("--c", o->c)->check(CLI::PositiveNumber);
  re->add_option("--rho", o->rho)->check(CLI::PositiveNumber);
  handlers.emplace_back(re, [&ctx, o, params] {
    std::optional<SrectEligibility> filter;
    if (o->srect_eligible) filter = SrectEligibility{o->c, o->rho};
    const auto shapes = rectangle_corpus(make_grid(ctx, *o), filter);
    std::ostringstream os;
    write_corpus(os, shapes);
    auto p = params();
    p.emplace_back("srect_eligible", o->srect_eligible ? "1" : "0");
    if (o->srect_eligible) {
      p.emplace_back("c", std::to_string(o->c));
      p.emplace_back("rho", std::to_string(o->rho));
    }
    emit_text(ctx, "corpus rectangles", p, o->out, os.str());
    return kOk;
  });

  auto* sh = corpus->add_subcommand("shapes", "set patterns x accept-count sets");
  common(sh);
  sh->add_option("--accept", o->accept)->check(CLI::IsMember({"singletons", "thresholds", "intervals", "all"}));
  handlers.emplace_back(sh, [&ctx, o, params] {
    const auto shapes = shape_corpus(make_grid(ctx, *o), parse_accept_pattern(o->accept));
    std::ostringstream os;
    write_corpus(os, shapes);
    auto p = params();
    p.emplace_back("accept", o->accept);
    emit_text(ctx, "corpus shapes", p, o->out, os.str());
    return kOk;
  });
}

void add_cert(CLI::App& app, Context& ctx, Handlers& handlers) {
  auto o = std::make_shared<CertOpts>();
  auto* cert = app.add_subcommand("cert", "machine-readable certificates");
  cert->alias("certify");
  cert->require_subcommand(1);

  auto* ex = cert->add_subcommand("expander", "spectral certificate for the smallest adequate expander");
  ex->add_option("--n", o->n, "lower bound on the vertex count")->required()->check(CLI::PositiveNumber);
  ex->add_option("--lambda", o->lambda, "target bound on the second eigenvalue")->required()->check(CLI::Range(0.0, 1.0));
  ex->add_option("-o,--out", o->out, "certificate file (default: stdout)");
  handlers.emplace_back(ex, [&ctx, o] {
    const ExpanderGraph g = expander_for(o->n, o->lambda, ctx.config.degree_cap);
    const auto& cert = g.certificate();
    std::ostringstream os;
    os << "N = " << g.vertex_count() << "\nD = " << g.degree() << "\npower = " << g.power()
       << "\nlambda = " << cert.lambda << "\nmethod = " << cert.method << "\ntolerance = " << cert.tolerance
       << "\ntarget = " << o->lambda << "\n";
    const bool ok = cert.lambda <= o->lambda;
    os << "certified = " << (ok ? 1 : 0) << "\n";
    emit_text(ctx, "cert expander", {{"n", std::to_string(o->n)}, {"lambda", std::to_string(o->lambda)}}, o->out,
              os.str());
    return ok ? kOk : kMiss;
  });

  auto* hf = cert->add_subcommand("hashfam", "separation certificate for a hash family");
  hf->add_option("--kind", o->kind)->check(CLI::IsMember({"perfect", "fractional"}));
  hf->add_option("--n", o->n)->required()->check(CLI::Range(1, 100000));
  hf->add_option("--t", o->t)->required()->check(CLI::Range(1, 64));
  hf->add_option("--z-file", o->z_file, "weights, one rational per line (fractional)")->check(CLI::ExistingFile);
  hf->add_option("-o,--out", o->out, "certificate file (default: stdout)");
  handlers.emplace_back(hf, [&ctx, o] {
    const int n = static_cast<int>(o->n);
    std::ostringstream os;
    Params params{{"kind", o->kind}, {"n", std::to_string(n)}, {"t", std::to_string(o->t)}};
    bool ok = false;
    if (o->kind == "perfect") {
      if (o->t > n) throw UsageError("t must not exceed n");
      const std::uint64_t subsets = binomial(n, o->t);
      if (subsets > ctx.config.corpus_cap) throw CapExceeded("corpus", std::to_string(subsets) + " subsets");
      const PerfectHashFamily family(n, o->t);
      Rational worst(1);
      std::uint64_t unseparated = 0;
      for_each_subset(n, o->t, [&](std::span<const int> s) {
        const Rational f = family.separation_fraction(s);
        if (f == 0) ++unseparated;
        if (f < worst) worst = f;
      });
      ok = unseparated == 0;
      os << "members = " << family.member_count() << "\nsubsets = " << subsets << "\nunseparated = " << unseparated
         << "\nmin_fraction = " << to_string(worst) << "\nexpected_fraction = "
         << to_string(PerfectHashFamily::exact_fraction(o->t)) << "\n";
    } else {
      if (o->z_file.empty()) throw UsageError("--z-file is required for fractional families");
      const auto z = read_z_vector(o->z_file);
      if (static_cast<int>(z.size()) != n)
        throw UsageError("z-file has " + std::to_string(z.size()) + " entries, expected n = " + std::to_string(n));
      const FractionalHashFamily family(n, o->t, ctx.config.hashfam);
      const auto c = certify_fractional(family, z, ctx.jobs);
      ok = c.good > 0;
      os << "members = " << c.members << "\ngood = " << c.good << "\nfraction = " << to_string(c.fraction)
         << "\nz_sum = " << to_string(c.z_sum) << "\nwitness = " << (c.witness ? std::to_string(*c.witness) : "-")
         << "\n";
      params.emplace_back("z_file", file_sha256(o->z_file));
    }
    os << "certified = " << (ok ? 1 : 0) << "\n";
    emit_text(ctx, "cert hashfam", params, o->out, os.str());
    return ok ? kOk : kMiss;
  });
}

void add_monte_carlo(CLI::App& app, Context& ctx, Handlers& handlers) {
  auto o = std::make_shared<MonteCarloOpts>();
  auto* mc = app.add_subcommand("monte-carlo", "sampled acceptance estimates next to the exact values");
  mc->add_option("--corpus", o->corpus)->required()->check(CLI::ExistingFile);
  mc->add_option("--samples", o->samples)->check(CLI::PositiveNumber);
  mc->add_option("--seed", o->seed)->required();
  mc->add_option("-o,--out", o->out, "report file (default: stdout)");
  handlers.emplace_back(mc, [&ctx, o] {
    const auto corpus = load_corpus(o->corpus);
    std::ostringstream os;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const double exact = to_double(acceptance_probability(corpus[i]).exact_prob);
      const double est = to_double(monte_carlo_acceptance(corpus[i], o->samples, o->seed + i).exact_prob);
      const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(o->samples));
      os << i << " estimate=" << est << " exact=" << exact << " sigma=" << sigma
         << " z=" << (sigma > 0 ? (est - exact) / sigma : 0.0) << "\n";
    }
    emit_text(ctx, "monte-carlo",
              {{"corpus", file_sha256(o->corpus)}, {"samples", std::to_string(o->samples)},
               {"seed", std::to_string(o->seed)}},
              o->out, os.str());
    return kOk;
  });
}

}  // namespace shapehit::cli
