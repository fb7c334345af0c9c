#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace shapehit::cli {

void Context::load() {
  if (config_path.empty()) {
    config = ArtifactConfig{};
  } else {
    config = load_config(config_path);
  }
  config_digest = sha256_hex(format_config(config));
}

void write_outputs(const Context& ctx, const std::string& subcommand, const Params& params,
                   const std::vector<OutputFile>& files) {
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.params = params;
  manifest.params.emplace_back("jobs", std::to_string(ctx.jobs));
  manifest.config_digest = ctx.config_digest;
  for (const auto& f : files) {
    atomic_write(f.path, f.content);
    manifest.outputs.emplace_back(f.path.filename().string(), sha256_hex(f.content));
  }
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  std::filesystem::path mpath = files.front().path;
  mpath += ".manifest";
  atomic_write(mpath, manifest.format());
}

Rational parse_eps(const std::string& text) {
  Rational eps;
  try {
    eps = parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError("cannot parse eps '" + text + "'");
  }
  if (eps <= 0 || eps > 1) throw UsageError("eps must lie in (0, 1]");
  return eps;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad integer list '" + text + "'");
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

PointSet load_pointset(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_pointset(in);
}

std::vector<Shape> load_corpus(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_corpus(in);
}

}  // namespace shapehit::cli

int main(int argc, char** argv) {
  using namespace shapehit::cli;
  CLI::App app{"Explicit hitting sets for combinatorial shapes"};
  app.require_subcommand(1);
  Context ctx;
  Handlers handlers;
  app.add_option("--config", ctx.config_path, "key = value constants file")->check(CLI::ExistingFile);
  app.add_option("--jobs", ctx.jobs, "worker threads")->check(CLI::Range(1, 256));
  add_gen(app, ctx, handlers);
  add_verify(app, ctx, handlers);
  add_corpus(app, ctx, handlers);
  add_cert(app, ctx, handlers);
  add_monte_carlo(app, ctx, handlers);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    ctx.load();
    for (auto& [sub, run] : handlers)
      if (sub->parsed()) return run();
    std::cerr << "error: no command given\n";
    return kUsage;
  } catch (const shapehit::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
