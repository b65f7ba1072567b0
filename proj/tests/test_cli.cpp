// End-to-end checks of the command-line tool: determinism of outputs,
// manifest contents and file formats.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rectnet/io.hpp"

#ifndef RECTNET_BIN
#define RECTNET_BIN "rectnet"
#endif

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RECTNET_BIN) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool xml_well_formed(const std::string& text) {
  // minimal check: prolog, balanced angle brackets, matching svg tags
  if (text.rfind("<?xml", 0) != 0) return false;
  long depth = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '<') ++depth;
    if (text[i] == '>') --depth;
    if (depth < 0 || depth > 1) return false;
  }
  return depth == 0 && text.find("</svg>") != std::string::npos;
}

}  // namespace

TEST_CASE("identical configurations give byte-identical outputs") {
  REQUIRE(run("simulate-rectangles --seed 7 --t-max 20 --out cli_a") == 0);
  REQUIRE(run("simulate-rectangles --seed 7 --t-max 20 --out cli_b") == 0);
  CHECK(rectnet::file_checksum("cli_a/rectangles.jsonl") ==
        rectnet::file_checksum("cli_b/rectangles.jsonl"));
  CHECK(rectnet::file_checksum("cli_a/frozen_histograms.csv") ==
        rectnet::file_checksum("cli_b/frozen_histograms.csv"));
  CHECK(slurp("cli_a/summary.json") == slurp("cli_b/summary.json"));
}

TEST_CASE("manifest records config, status and checksums") {
  REQUIRE(run("simulate-rectangles --seed 3 --t-max 10 --out cli_m") == 0);
  auto j = nlohmann::json::parse(slurp("cli_m/manifest.json"));
  CHECK(j["command"] == "simulate-rectangles");
  CHECK(j["status"] == "ok");
  CHECK(j["config"]["seed"] == "3");
  CHECK(j["outputs"].size() >= 3);
  for (const auto& o : j["outputs"]) {
    CHECK(o["bytes"].get<uint64_t>() > 0);
    CHECK(o["fnv64"].get<std::string>().size() == 16);
  }
}

TEST_CASE("jsonl dump is one well-formed record per line") {
  REQUIRE(run("simulate-network --seed 5 --t-max 8 --out cli_n --check") == 0);
  std::ifstream in("cli_n/branches.jsonl");
  std::string line;
  size_t lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("label"));
    CHECK(j.contains("birth"));
    CHECK(j.contains("inact_time"));
    CHECK(j["origin"].size() == 2);
    ++lines;
  }
  CHECK(lines > 10);
  auto checks = nlohmann::json::parse(slurp("cli_n/network_checks.json"));
  CHECK(checks["bad"].get<size_t>() == 0);
  CHECK(checks["fusion_violations"].get<size_t>() == 0);
  CHECK(checks["crossings"].get<size_t>() == 0);
}

TEST_CASE("svg output is well-formed xml") {
  REQUIRE(run("simulate-network --seed 5 --t-max 8 --out cli_svg") == 0);
  CHECK(xml_well_formed(slurp("cli_svg/network.svg")));
}

TEST_CASE("density table includes the origin value") {
  REQUIRE(run("density --grid 0:5:0.1 --tol 1e-10 --out cli_d") == 0);
  std::ifstream in("cli_d/density.csv");
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("0,0,", 0) == 0) {
      const double v = std::stod(line.substr(4));
      CHECK(v == doctest::Approx(21.6307).epsilon(1e-3));
      found = true;
    }
  }
  CHECK(found);
  auto j = nlohmann::json::parse(slurp("cli_d/pi_moments.json"));
  CHECK(j["pi_h"] == 1.0);
  CHECK(j["limit_constant"].get<double>() == doctest::Approx(1.93511).epsilon(1e-4));
}

TEST_CASE("histogram headers carry the bin edges") {
  REQUIRE(run("simulate-rectangles --seed 9 --t-max 15 --out cli_h") == 0);
  const std::string text = slurp("cli_h/frozen_histograms.csv");
  CHECK(text.find("# bin edges") != std::string::npos);
  CHECK(text.find("bin_lo,bin_hi,count_L") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(WEXITSTATUS(run("no-such-command")) == 2);
  CHECK(WEXITSTATUS(run("")) == 2);
}

TEST_CASE("failed runs leave a diagnosable manifest") {
  CHECK(WEXITSTATUS(run("pde --which p --t-max 10 --step 0.5 --out cli_f")) == 1);
  auto j = nlohmann::json::parse(slurp("cli_f/manifest.json"));
  CHECK(j["status"] == "failed");
  CHECK(j["message"].get<std::string>().find("step") != std::string::npos);
}

TEST_CASE("format flags select the outputs") {
  REQUIRE(run("simulate-rectangles --seed 4 --t-max 10 --format csv --out cli_fmt") == 0);
  CHECK(!std::ifstream("cli_fmt/rectangles.jsonl").good());
  CHECK(std::ifstream("cli_fmt/frozen_histograms.csv").good());
}

TEST_CASE("single-criterion validation runs and reports") {
  REQUIRE(run("validate --criterion 5 --out cli_v") == 0);
  auto j = nlohmann::json::parse(slurp("cli_v/validation.json"));
  CHECK(j["all_pass"] == true);
  CHECK(j["results"].size() == 1);
  CHECK(j["results"][0]["id"] == 5);
}
