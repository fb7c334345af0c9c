#pragma once

#include "shapehit/config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shapehit::cli {

enum ExitCode { kOk = 0, kMiss = 1, kUsage = 2, kCap = 3 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Context {
  std::string config_path;
  ArtifactConfig config;
  std::string config_digest;
  int jobs = 1;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  /// Loads the config file (or defaults) and records its digest.
  void load();
};

using Params = std::vector<std::pair<std::string, std::string>>;

/// Primary output plus optional sidecars; the manifest goes to <primary>.manifest.
struct OutputFile {
  std::filesystem::path path;
  std::string content;
};

void write_outputs(const Context& ctx, const std::string& subcommand, const Params& params,
                   const std::vector<OutputFile>& files);

Rational parse_eps(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

std::string read_file(const std::filesystem::path& path);
PointSet load_pointset(const std::filesystem::path& path);
std::vector<Shape> load_corpus(const std::filesystem::path& path);

/// Leaf subcommands and the action run when one of them was parsed.
using Handlers = std::vector<std::pair<CLI::App*, std::function<int()>>>;

void add_gen(CLI::App& app, Context& ctx, Handlers& handlers);
void add_verify(CLI::App& app, Context& ctx, Handlers& handlers);
void add_corpus(CLI::App& app, Context& ctx, Handlers& handlers);
void add_cert(CLI::App& app, Context& ctx, Handlers& handlers);
void add_monte_carlo(CLI::App& app, Context& ctx, Handlers& handlers);

}  // namespace shapehit::cli
