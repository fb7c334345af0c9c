#pragma once

// Artifact configuration ("key = value" text holding every tunable constant
// and cap), content digests, atomic file output and run manifests.

#include "shapehit/expander.hpp"
#include "shapehit/rect_hs.hpp"
#include "shapehit/shape_hs.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shapehit {

inline constexpr std::string_view kConstantsVersion = "shapehit-constants-1";

struct ArtifactConfig {
  /// k = kwise_kappa * ceil(log2(1/eps)) for the k-wise rectangle hitting set.
  int kwise_kappa = 4;
  /// Template for gen srect; m, n, c and rho come from the command line.
  StrongRectConfig srect;
  /// Hash family used by gen hashfam --kind fractional.
  FractionalConfig hashfam;
  ShapeHSConfig shape;
  std::uint64_t degree_cap = kDefaultDegreeCap;
  std::uint64_t corpus_cap = std::uint64_t{1} << 22;
  std::uint64_t domain_cutoff = std::uint64_t{1} << 20;
};

/// Lines "key = value"; '#' starts a comment. Unknown keys and malformed
/// values throw std::invalid_argument naming the line.
ArtifactConfig parse_config(std::istream& in);
ArtifactConfig load_config(const std::filesystem::path& path);

/// Every key in a fixed order; parse_config(format_config(c)) == c.
std::string format_config(const ArtifactConfig& config);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> params;
  std::string config_digest;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
  double wall_seconds = 0.0;
  std::string constants_version{kConstantsVersion};

  std::string format() const;
};

}  // namespace shapehit
