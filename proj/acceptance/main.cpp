#include "criteria.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <vector>

using namespace shapehit::acceptance;

namespace {

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome(int)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one pass/fail line per criterion"};
  std::vector<int> only;
  int jobs = 4;
  app.add_option("criteria", only, "criterion numbers to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "k-wise exactness", 120, kwise_exactness},
      {2, "perfect hash completeness", 60, perfect_hash_completeness},
      {3, "fractional hash bound", 300, fractional_hash_bound},
      {4, "expander walk lemma", 180, expander_walk_lemma},
      {5, "rectangle buckets", 180, rectangle_buckets},
      {6, "strong rectangle regression", 600, strong_rect_regression},
      {7, "shape hitting end to end", 1800, shape_hitting_end_to_end},
      {8, "interpolation lemma", 60, interpolation_lemma},
      {9, "oracle self-consistency", 300, oracle_consistency},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(jobs);
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("criterion %d %s: %s [%.1fs of %.0fs] %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                c.budget_seconds, out.detail.c_str(), in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
