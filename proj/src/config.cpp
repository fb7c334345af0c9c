#include "shapehit/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace shapehit {

namespace {

struct Binding {
  std::string key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

Binding binding(std::string key, int& v) {
  return {std::move(key), [&v] { return std::to_string(v); }, [&v](const std::string& s) { v = parse_number<int>(s); }};
}

Binding binding(std::string key, std::uint64_t& v) {
  return {std::move(key), [&v] { return std::to_string(v); },
          [&v](const std::string& s) { v = parse_number<std::uint64_t>(s); }};
}

Binding binding(std::string key, double& v) {
  return {std::move(key), [&v] { return format_double(v); },
          [&v](const std::string& s) { v = parse_number<double>(s); }};
}

Binding binding(std::string key, Rational& v) {
  return {std::move(key), [&v] { return to_string(v); }, [&v](const std::string& s) { v = parse_rational(s); }};
}

Binding binding(std::string key, PrgKind& v) {
  return {std::move(key), [&v] { return std::string(v == PrgKind::kwise ? "kwise" : "exhaustive"); },
          [&v](const std::string& s) {
            if (s == "kwise")
              v = PrgKind::kwise;
            else if (s == "exhaustive")
              v = PrgKind::exhaustive;
            else
              throw std::invalid_argument("unknown prg '" + s + "'");
          }};
}

void bind_hash(std::vector<Binding>& out, const std::string& prefix, FractionalConfig& h) {
  out.push_back(binding(prefix + "top_buckets", h.top_buckets));
  out.push_back(binding(prefix + "bucket_factor", h.bucket_factor));
  out.push_back(binding(prefix + "excess", h.excess));
  out.push_back(binding(prefix + "walk_lambda", h.walk_lambda));
  out.push_back(binding(prefix + "degree_cap", h.degree_cap));
  out.push_back(binding(prefix + "member_cap", h.member_cap));
  out.push_back(binding(prefix + "seed_cap", h.seed_cap));
}

std::vector<Binding> bindings(ArtifactConfig& c) {
  std::vector<Binding> b;
  b.push_back(binding("kwise.kappa", c.kwise_kappa));
  b.push_back(binding("srect.a", c.srect.a));
  b.push_back(binding("srect.C", c.srect.C));
  b.push_back(binding("srect.max_walk_power", c.srect.max_walk_power));
  b.push_back(binding("srect.alpha_cap_log2", c.srect.alpha_cap_log2));
  b.push_back(binding("srect.seed_cap", c.srect.seed_cap));
  b.push_back(binding("srect.block_cap", c.srect.block_cap));
  bind_hash(b, "srect.hash.", c.srect.hash);
  bind_hash(b, "hashfam.", c.hashfam);
  ThresholdHSConfig& t = c.shape.threshold;
  b.push_back(binding("thr.C", t.C));
  b.push_back(binding("thr.c1", t.c1));
  b.push_back(binding("thr.c2", t.c2));
  b.push_back(binding("thr.c3", t.c3));
  b.push_back(binding("thr.c4", t.c4));
  b.push_back(binding("thr.c_prime", t.c_prime));
  b.push_back(binding("thr.c4_prime", t.c4_prime));
  b.push_back(binding("thr.g", t.g));
  b.push_back(binding("thr.prg", t.prg));
  b.push_back(binding("thr.prg_alpha", t.prg_alpha));
  b.push_back(binding("thr.max_buckets", t.max_buckets));
  b.push_back(binding("thr.max_walk_power", t.max_walk_power));
  b.push_back(binding("thr.rect_kappa", t.rect_kappa));
  b.push_back(binding("thr.rect_k_cap", t.rect_k_cap));
  b.push_back(binding("thr.table_a", t.table_a));
  b.push_back(binding("thr.table_C", t.table_C));
  bind_hash(b, "thr.hash.", t.hash);
  b.push_back(binding("thr.seed_cap", t.seed_cap));
  b.push_back(binding("thr.member_cap", t.member_cap));
  b.push_back(binding("thr.guess_cap", t.guess_cap));
  b.push_back(binding("thr.table_cap", t.table_cap));
  b.push_back(binding("shape.pair_cap", c.shape.pair_cap));
  b.push_back(binding("shape.enumeration_cap", c.shape.enumeration_cap));
  b.push_back(binding("shape.dp_word_cap", c.shape.dp_word_cap));
  b.push_back(binding("degree_cap", c.degree_cap));
  b.push_back(binding("corpus_cap", c.corpus_cap));
  b.push_back(binding("domain_cutoff", c.domain_cutoff));
  return b;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ArtifactConfig parse_config(std::istream& in) {
  ArtifactConfig c;
  auto table = bindings(c);
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto it = std::find_if(table.begin(), table.end(), [&](const Binding& b) { return b.key == key; });
    if (it == table.end()) throw std::invalid_argument("config line " + std::to_string(no) + ": unknown key '" + key + "'");
    try {
      it->set(value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(no) + ": " + e.what());
    }
  }
  c.shape.threshold.validate();
  return c;
}

ArtifactConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  return parse_config(in);
}

std::string format_config(const ArtifactConfig& config) {
  ArtifactConfig copy = config;
  std::ostringstream os;
  os << "# " << kConstantsVersion << "\n";
  for (const auto& b : bindings(copy)) os << b.key << " = " << b.get() << "\n";
  return os.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return sha256_hex(os.str());
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

std::string RunManifest::format() const {
  std::ostringstream os;
  os << "subcommand = " << subcommand << "\n";
  for (const auto& [k, v] : params) os << "param." << k << " = " << v << "\n";
  os << "config_digest = " << config_digest << "\n";
  for (const auto& [p, d] : outputs) os << "output." << p << " = " << d << "\n";
  os << "constants_version = " << constants_version << "\n";
  os << "wall_seconds = " << std::fixed << std::setprecision(3) << wall_seconds << "\n";
  return os.str();
}

}  // namespace shapehit
