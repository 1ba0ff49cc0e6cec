#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "oligo/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result oligosim(std::vector<std::string> args) {
  args.insert(args.begin(), "oligosim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = oligo::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

const std::string kSample = std::string(OLIGOSIM_SOURCE_DIR) + "/data/sample_market.csv";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ranges are inclusive and land on the decimal grid") {
  const auto r = oligo::cli::parse_range("0.1:0.9:0.1");
  REQUIRE(r.size() == 9);
  const double expected[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  for (std::size_t i = 0; i < 9; ++i) CHECK(r[i] == expected[i]);
  CHECK(oligo::cli::parse_range("0.1:0.9:0.05").size() == 17);
  CHECK(oligo::cli::parse_range("0.05:0.45:0.05").back() == 0.45);
  CHECK(oligo::cli::parse_range("0.4") == std::vector<double>{0.4});
  CHECK(oligo::cli::parse_range("0.2:0.2:0.1") == std::vector<double>{0.2});
  CHECK_THROWS_AS(oligo::cli::parse_range("0.5:0.1:0.1"), oligo::DomainError);
  CHECK_THROWS_AS(oligo::cli::parse_range("0.1:0.5:0"), oligo::DomainError);
  CHECK_THROWS_AS(oligo::cli::parse_range("0.1:0.5"), oligo::DomainError);
  CHECK_THROWS_AS(oligo::cli::parse_range("abc"), oligo::DomainError);
}

TEST_CASE("triples") {
  CHECK(oligo::cli::parse_triple("0.3") == oligo::Triple{0.3, 0.3, 1.0 - 0.6});
  CHECK(oligo::cli::parse_triple("0.4,0.25,0.35") == oligo::Triple{0.4, 0.25, 0.35});
  CHECK_THROWS_AS(oligo::cli::parse_triple("0.4,0.6"), oligo::DomainError);
}

TEST_CASE("mfa prints the fixed point") {
  const auto r = oligosim({"mfa", "--model", "cap", "--p", "0", "--h", "0.4,0.25,0.35", "--c0", "0.2,0.5,0.3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("0.400000000,0.250000000,0.350000000,2,") != std::string::npos);
  const auto scan = oligosim({"mfa", "--model", "cf", "--p", "0.1:0.3:0.1", "--h", "0.2:0.3:0.1"});
  CHECK(scan.code == 0);
  CHECK(std::count(scan.out.begin(), scan.out.end(), '\n') == 7);
}

TEST_CASE("usage and domain errors exit with 2") {
  CHECK(oligosim({}).code == 2);
  CHECK(oligosim({"simulate", "--bogus"}).code == 2);
  CHECK(oligosim({"frobnicate"}).code == 2);
  CHECK(oligosim({"mfa", "--p", "1.5"}).code == 2);
  CHECK(oligosim({"mfa", "--p", "0.5", "--model", "ising"}).code == 2);
  CHECK(oligosim({"sweep", "--p", "0.2", "--h", "0.6", "--L", "8", "--n", "2"}).code == 2);
  CHECK(oligosim({"steady", "--L", "3", "--n", "2"}).code == 2);
  CHECK(oligosim({"fit", "--data", "/nonexistent.csv"}).code == 2);
  CHECK(oligosim({"bands", "--data", kSample, "--adjust", "2:17:24:0.9", "--no-adjust"}).code == 2);
  CHECK(oligosim({"bands", "--data", kSample, "--updates", "4219", "--n", "2", "--L", "8"}).code == 2);
  CHECK(oligosim({"--manifest", "/nonexistent.json"}).code == 2);
  const auto help = oligosim({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("sweep") != std::string::npos);
}

TEST_CASE("sweep writes CSV and manifest; replay is byte-identical") {
  TempDir dir("oligosim_cli_sweep");
  const auto out = dir / "pd.csv";
  auto r = oligosim({"sweep", "--model", "cf", "--p", "0.1:0.9:0.4", "--h", "0.05:0.45:0.2", "--c0", "0.3",
                     "--L", "8", "--n", "3", "--seed", "7", "--delta-T", "10", "--threads", "1", "--out", out});
  REQUIRE(r.code == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind("p,h,c0,c1_inf,c2_inf,c3_inf,se1,se2,se3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
  CHECK(manifest["command"] == "sweep");
  CHECK(manifest["config"]["seed"] == 7);
  CHECK(manifest["config"]["n"] == 3);
  CHECK(manifest["config"]["max_sweeps"] == 5000);
  CHECK(manifest["config"]["p"].get<std::vector<double>>() == oligo::cli::parse_range("0.1:0.9:0.4"));
  CHECK(manifest["outputs"]["csv"] == out);
  CHECK(manifest.contains("wall_seconds"));

  CHECK(oligosim({"sweep", "--p", "0.2", "--h", "0.2", "--L", "8", "--n", "2", "--out", out}).code == 2);
  CHECK(slurp(out) == csv);

  const auto replay = dir / "replay.csv";
  REQUIRE(oligosim({"--manifest", out + ".manifest.json", "--out", replay, "--threads", "3"}).code == 0);
  CHECK(slurp(replay) == csv);
  CHECK(oligosim({"--manifest", out + ".manifest.json", "--out", replay}).code == 2);
  REQUIRE(oligosim({"--manifest", out + ".manifest.json", "--out", replay, "--force", "--threads", "1"}).code == 0);
  CHECK(slurp(replay) == csv);
}

TEST_CASE("seed falls back to the environment") {
  ::setenv("OLIGOSIM_SEED", "11", 1);
  const auto env = oligosim({"simulate", "--L", "8", "--updates", "640"});
  ::unsetenv("OLIGOSIM_SEED");
  const auto flag = oligosim({"simulate", "--L", "8", "--updates", "640", "--seed", "11"});
  const auto other = oligosim({"simulate", "--L", "8", "--updates", "640", "--seed", "12"});
  CHECK(env.code == 0);
  CHECK(env.out == flag.out);
  CHECK(env.out != other.out);
  ::setenv("OLIGOSIM_SEED", "eleven", 1);
  CHECK(oligosim({"simulate", "--L", "8", "--updates", "640"}).code == 2);
  ::unsetenv("OLIGOSIM_SEED");
}

TEST_CASE("steady with one replica") {
  const auto r = oligosim({"steady", "--p", "0.5", "--L", "10", "--n", "1", "--delta-T", "10", "--seed", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find(",0.00000000,0.00000000,0.00000000,1\n") != std::string::npos);
}

TEST_CASE("fit on the shipped data reports best_p") {
  TempDir dir("oligosim_cli_fit");
  const auto out = dir / "fit.csv";
  const auto r = oligosim({"fit", "--data", kSample, "--model", "cf", "--p-grid", "0.1:0.9:0.2", "--n", "20",
                           "--L", "40", "--seed", "7", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("best_p=", 0) == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind("p,score\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
  CHECK(manifest["config"]["adjust"] == nlohmann::json::array({"2:17:24:0.900000000"}));
  CHECK(manifest["config"]["updates"] == 4212);
  CHECK(manifest["results"].contains("best_p"));

  const auto replay = dir / "again.csv";
  REQUIRE(oligosim({"--manifest", out + ".manifest.json", "--out", replay}).code == 0);
  CHECK(slurp(replay) == csv);
}

TEST_CASE("bands and hc write their schemas") {
  const auto b = oligosim({"bands", "--data", kSample, "--n", "4", "--L", "20", "--no-adjust"});
  CHECK(b.code == 0);
  CHECK(b.out.rfind("quarter,op,lo,med,hi\n", 0) == 0);
  CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 1 + 27 * 3);

  const auto h = oligosim({"hc", "--model", "cf", "--p", "0.5", "--L", "8", "--n", "2", "--delta-T", "10",
                           "--extinction-threshold", "0"});
  CHECK(h.code == 0);
  CHECK(h.out.rfind("h,incumbent,se,extinct\n", 0) == 0);
  CHECK(h.err.find("h_c=none") != std::string::npos);
}

}
