#include "cli.hpp"

#include "shapehit/hashing.hpp"
#include "shapehit/kwise.hpp"
#include "shapehit/rect_hs.hpp"
#include "shapehit/shape_hs.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace shapehit::cli {

namespace {

std::string pointset_text(const PointSet& pts) {
  std::ostringstream os;
  write_pointset(os, pts);
  return os.str();
}

std::string provenance_text(const PointSet& pts) {
  std::ostringstream os;
  write_provenance(os, pts);
  return os.str();
}

std::filesystem::path sidecar(const std::string& out, const char* ext) {
  std::filesystem::path p = out;
  p += ext;
  return p;
}

void emit_points(const Context& ctx, const std::string& sub, const Params& params, const std::string& out,
                 const PointSet& pts, bool with_provenance) {
  std::vector<OutputFile> files{{out, pointset_text(pts)}};
  if (with_provenance) files.push_back({sidecar(out, ".prov"), provenance_text(pts)});
  write_outputs(ctx, sub, params, files);
}

ThresholdBranchSel parse_branch(const std::string& s) {
  if (s == "high") return ThresholdBranchSel::high;
  if (s == "low-small") return ThresholdBranchSel::low_small;
  if (s == "low-general") return ThresholdBranchSel::low_general;
  if (s == "all") return ThresholdBranchSel::all;
  throw UsageError("unknown branch '" + s + "'");
}

struct GenOpts {
  int m = 2, n = 4, k = 2, t = 2, rho = 10;
  double c = 1.0;
  std::string eps = "1/4", kind = "perfect", branch = "all", out;
  bool multiset = false;
  std::uint64_t cap = std::uint64_t{1} << 24;
};

void default_out(GenOpts& o, const std::string& kind) {
  if (o.out.empty()) o.out = kind + ".txt";
}

}  // namespace

void add_gen(CLI::App& app, Context& ctx, Handlers& handlers) {
  auto* gen = app.add_subcommand("gen", "generate point sets and hash families");
  gen->require_subcommand(1);
  auto o = std::make_shared<GenOpts>();

  auto* kw = gen->add_subcommand("kwise", "k-wise independent space over [m]^n");
  kw->add_option("--m", o->m)->required()->check(CLI::PositiveNumber);
  kw->add_option("--n", o->n)->required()->check(CLI::PositiveNumber);
  kw->add_option("--k", o->k)->required()->check(CLI::PositiveNumber);
  kw->add_option("-o,--out", o->out, "output file (default: <kind>.txt)");
  handlers.emplace_back(kw, [&ctx, o] {
    default_out(*o, "kwise");
    KWiseSpace space(o->m, o->n, o->k, o->cap);
    emit_points(ctx, "gen kwise", {{"m", std::to_string(o->m)}, {"n", std::to_string(o->n)}, {"k", std::to_string(o->k)}},
                o->out, space.enumerate(), true);
    return kOk;
  });

  auto* hf = gen->add_subcommand("hashfam", "perfect or fractional perfect hash family");
  hf->add_option("--kind", o->kind)->check(CLI::IsMember({"perfect", "fractional"}));
  hf->add_option("--n", o->n)->required()->check(CLI::PositiveNumber);
  hf->add_option("--t", o->t)->required()->check(CLI::PositiveNumber);
  hf->add_option("--cap", o->cap, "largest member count written");
  hf->add_option("-o,--out", o->out, "output file (default: <kind>.txt)");
  handlers.emplace_back(hf, [&ctx, o] {
    default_out(*o, "hashfam");
    std::ostringstream os;
    std::uint64_t members = 0;
    std::unique_ptr<PerfectHashFamily> perfect;
    std::unique_ptr<FractionalHashFamily> fractional;
    if (o->kind == "perfect") {
      perfect = std::make_unique<PerfectHashFamily>(o->n, o->t);
      members = perfect->member_count();
    } else {
      fractional = std::make_unique<FractionalHashFamily>(o->n, o->t, ctx.config.hashfam);
      members = fractional->member_count();
    }
    if (members > o->cap) throw CapExceeded("members", std::to_string(members) + " hash members");
    os << "hashfam kind=" << o->kind << " n=" << o->n << " t=" << o->t << " members=" << members << "\n";
    for (std::uint64_t i = 0; i < members; ++i) {
      const auto b = perfect ? perfect->buckets(i) : fractional->eval_all(fractional->member(i));
      for (int j = 0; j < o->n; ++j) os << (j ? " " : "") << b[j];
      os << "\n";
    }
    write_outputs(ctx, "gen hashfam",
                  {{"kind", o->kind}, {"n", std::to_string(o->n)}, {"t", std::to_string(o->t)}},
                  {{o->out, os.str()}});
    return kOk;
  });

  auto* sr = gen->add_subcommand("srect", "hitting set for strong rectangles (m = n^c)");
  sr->add_option("--n", o->n)->required()->check(CLI::PositiveNumber);
  sr->add_option("--c", o->c)->required()->check(CLI::PositiveNumber);
  sr->add_option("--rho", o->rho)->required()->check(CLI::PositiveNumber);
  sr->add_option("--cap", o->cap, "largest number of points written");
  sr->add_option("-o,--out", o->out, "output file (default: <kind>.txt)");
  handlers.emplace_back(sr, [&ctx, o] {
    default_out(*o, "srect");
    const double mc = std::pow(static_cast<double>(o->n), o->c);
    const long long m = std::llround(mc);
    if (std::abs(mc - static_cast<double>(m)) > 1e-9 * mc || m < 1 || m > 65535)
      throw UsageError("n^c must be an integer alphabet size");
    StrongRectConfig rc = ctx.config.srect;
    rc.m = static_cast<int>(m);
    rc.n = o->n;
    rc.c = o->c;
    rc.rho = o->rho;
    const PointSet pts = build_strong_rect(rc).materialize(o->cap);
    emit_points(ctx, "gen srect",
                {{"m", std::to_string(m)}, {"n", std::to_string(o->n)}, {"c", std::to_string(o->c)},
                 {"rho", std::to_string(o->rho)}},
                o->out, pts, true);
    return kOk;
  });

  auto* th = gen->add_subcommand("thr-hs", "hitting set for combinatorial thresholds");
  th->add_option("--m", o->m)->required()->check(CLI::PositiveNumber);
  th->add_option("--n", o->n)->required()->check(CLI::PositiveNumber);
  th->add_option("--eps", o->eps)->required();
  th->add_option("--c", o->c)->required()->check(CLI::PositiveNumber);
  th->add_option("--branch", o->branch)->check(CLI::IsMember({"high", "low-small", "low-general", "all"}));
  th->add_flag("--multiset", o->multiset, "write every block point instead of distinct points");
  th->add_option("--cap", o->cap, "largest number of points written");
  th->add_option("-o,--out", o->out, "output file (default: <kind>.txt)");
  handlers.emplace_back(th, [&ctx, o] {
    default_out(*o, "thr-hs");
    ThresholdHSConfig cfg = ctx.config.shape.threshold;
    cfg.c = o->c;
    const auto hs = build_threshold_hs(o->m, o->n, parse_eps(o->eps), cfg, parse_branch(o->branch));
    PointSet pts;
    if (o->multiset) {
      pts = hs.materialize(o->cap);
    } else {
      try {
        pts = hs.distinct_points(ctx.config.shape.dp_word_cap);
      } catch (const CapExceeded&) {
        pts = hs.materialize(o->cap, true);
      }
    }
    emit_points(ctx, "gen thr-hs",
                {{"m", std::to_string(o->m)}, {"n", std::to_string(o->n)}, {"eps", o->eps},
                 {"c", std::to_string(o->c)}, {"branch", o->branch}, {"multiset", o->multiset ? "1" : "0"}},
                o->out, pts, true);
    return kOk;
  });

  auto* sh = gen->add_subcommand("shape-hs", "hitting set for combinatorial shapes");
  sh->add_option("--m", o->m)->required()->check(CLI::PositiveNumber);
  sh->add_option("--n", o->n)->required()->check(CLI::PositiveNumber);
  sh->add_option("--eps", o->eps)->required();
  sh->add_option("--c", o->c)->required()->check(CLI::PositiveNumber);
  sh->add_flag("--multiset", o->multiset, "write every pair string instead of distinct points");
  sh->add_option("-o,--out", o->out, "output file (default: <kind>.txt)");
  handlers.emplace_back(sh, [&ctx, o] {
    default_out(*o, "shape-hs");
    const auto hs = build_shape_hs(o->m, o->n, parse_eps(o->eps), o->c, ctx.config.shape);
    emit_points(ctx, "gen shape-hs",
                {{"m", std::to_string(o->m)}, {"n", std::to_string(o->n)}, {"eps", o->eps},
                 {"c", std::to_string(o->c)}, {"multiset", o->multiset ? "1" : "0"}},
                o->out, hs.materialize(!o->multiset), false);
    return kOk;
  });
}

}  // namespace shapehit::cli
