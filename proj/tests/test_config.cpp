#include "shapehit/config.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace shapehit;

TEST(Config, DefaultsRoundTrip) {
  const ArtifactConfig def;
  const std::string text = format_config(def);
  std::istringstream in(text);
  const ArtifactConfig back = parse_config(in);
  EXPECT_EQ(format_config(back), text);
  EXPECT_NE(text.find("thr.C = 4\n"), std::string::npos);
  EXPECT_NE(text.find("kwise.kappa = 4\n"), std::string::npos);
  EXPECT_NE(text.find("thr.prg_alpha = 1/2\n"), std::string::npos);
  EXPECT_EQ(text.rfind("# shapehit-constants-1\n", 0), 0u);
}

TEST(Config, OverridesAndComments) {
  std::istringstream in("# tuned\nthr.C = 1.5   # weight cutoff\n\n  srect.a=6\nthr.prg = exhaustive\nthr.prg_alpha = 1/4\n");
  const ArtifactConfig c = parse_config(in);
  EXPECT_DOUBLE_EQ(c.shape.threshold.C, 1.5);
  EXPECT_EQ(c.srect.a, 6);
  EXPECT_EQ(c.shape.threshold.prg, PrgKind::exhaustive);
  EXPECT_EQ(c.shape.threshold.prg_alpha, Rational(1, 4));
  EXPECT_EQ(c.kwise_kappa, 4);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"nonsense = 3\n", "thr.C\n", "srect.a = x\n", "srect.a = 3.5\n", "thr.c1 = 0.5\n",
                           "thr.prg = gmrz\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in), std::invalid_argument) << text;
  }
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "shapehit_config_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  atomic_write(path, "first\n");
  atomic_write(path, "second\n");
  std::ifstream in(path);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(s, "second\n");
  EXPECT_EQ(file_sha256(path), sha256_hex("second\n"));
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
  EXPECT_THROW(atomic_write(dir / "missing" / "x.txt", "x"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Manifest, KeyValueLines) {
  RunManifest m;
  m.subcommand = "gen kwise";
  m.params = {{"m", "2"}, {"n", "3"}};
  m.config_digest = "abc";
  m.outputs = {{"out.txt", "d1"}};
  m.wall_seconds = 0.25;
  EXPECT_EQ(m.format(),
            "subcommand = gen kwise\nparam.m = 2\nparam.n = 3\nconfig_digest = abc\noutput.out.txt = d1\n"
            "constants_version = shapehit-constants-1\nwall_seconds = 0.250\n");
}
