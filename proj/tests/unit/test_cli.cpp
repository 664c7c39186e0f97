#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "susysep");
  std::ostringstream out;
  std::ostringstream err;
  const int code = susysep::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("spectrum qes as JSON") {
  const auto r = run({"spectrum", "--branch", "qes", "--A", "30.25", "--alpha", "1", "--a", "-1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["levels"].size() == 3);
  CHECK(j["levels"][0]["E"] == -30.0);
  CHECK(j["levels"][1]["E"] == -16.0);
  CHECK(j["levels"][2]["E"] == -6.0);
}

TEST_CASE("spectrum exact as CSV") {
  const auto r = run({"spectrum", "--branch", "exact", "--A", "30.25", "--alpha", "1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n,m,E,retained\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
}

TEST_CASE("exact branch precondition") {
  const auto r = run({"spectrum", "--branch", "exact", "--a", "-1"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error:", 0) == 0);
  CHECK(r.err.find("exact branch requires a = -0.5") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("hierarchy branch") {
  const auto r = run({"spectrum", "--branch", "hierarchy:1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
  const auto same = run({"spectrum", "--branch", "hierarchy", "--k", "1", "--format", "csv"});
  CHECK(same.out == r.out);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"spectrum", "--branch", "nosuch"}).code == 2);
  CHECK(run({"spectrum", "--A", "-1"}).code == 2);
  CHECK(run({"spectrum", "--format", "xml"}).code == 2);
  CHECK(run({"spectrum", "--nx", "10"}).code == 2);
  CHECK(run({"spectrum", "--domain", "3,1"}).code == 2);
  CHECK(run({}).code == 2);
  const auto r = run({"verify", "--suite", "nosuch"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error:", 0) == 0);
}

TEST_CASE("wavefunction of a vanishing state") {
  const auto r = run({"wavefunction", "--branch", "exact", "--n", "0", "--m", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("state vanishes (r = 0)") != std::string::npos);
}

TEST_CASE("wavefunction (0,2) is normalized and exchange symmetric") {
  const auto r = run({"wavefunction", "--branch", "exact", "--n", "0", "--m", "2", "--nx", "200", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("x1,x2,psi\n", 0) == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE_FALSE(rows.empty());
  const double h = 14.0 / 199.0;
  double sum = 0.0;
  std::map<std::pair<long, long>, double> by_node;
  double peak = 0.0;
  for (const auto& row : rows) {
    sum += row[2] * row[2] * h * h;
    by_node[{std::lround((row[0] + 2.0) / h), std::lround((row[1] + 2.0) / h)}] = row[2];
    peak = std::max(peak, std::abs(row[2]));
  }
  CHECK(std::abs(sum - 1.0) < 1e-4);
  double worst = 0.0;
  for (const auto& [key, v] : by_node) {
    const auto it = by_node.find({key.second, key.first});
    REQUIRE(it != by_node.end());
    worst = std::max(worst, std::abs(v - it->second));
  }
  CHECK(worst <= 1e-3 * peak);
}

TEST_CASE("verify shape exits 0 and writes the report to --out") {
  const std::string path = "cli_shape_report.json";
  const auto r = run({"verify", "--suite", "shape", "--a", "-1", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto j = nlohmann::json::parse(ss.str());
  CHECK(j["suite"] == "shape");
  std::remove(path.c_str());
}

TEST_CASE("verify oracle-calibration reports the five-level table") {
  const auto r = run({"verify", "--suite", "oracle-calibration"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& c : j["checks"])
    if (c["id"] == "oracle.morse_levels") {
      found = true;
      CHECK(c["details"].size() == 5);
    }
  CHECK(found);
}

TEST_CASE("failed checks exit with 1") {
  // too coarse for the second-order zero-mode residual to reach its asymptotic order
  const auto r = run({"verify", "--suite", "zeromodes", "--nx", "64", "--a", "-1"});
  CHECK(r.code == 1);
}

TEST_CASE("oracle h1 at the separable point") {
  const auto r = run({"oracle", "--hamiltonian", "h1", "--a", "-0.5", "--k", "6", "--nx", "200"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["levels"].size() == 6);
  const double expected[] = {-50, -41, -41, -34, -34, -32};
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(j["levels"][i]["E"].get<double>() - expected[i]) < 1e-2);
    CHECK(j["levels"][i]["predicted"] == expected[i]);
  }
}

TEST_CASE("oracle h0 at the separable point") {
  const auto r = run({"oracle", "--hamiltonian", "h0", "--a", "-0.5", "--k", "3", "--nx", "200"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["levels"].size() == 3);
  const double expected[] = {-34, -29, -26};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(j["levels"][i]["E"].get<double>() - expected[i]) < 1e-2);
}

TEST_CASE("identical config gives byte-identical output") {
  const std::vector<std::string> args = {"oracle", "--hamiltonian", "h0", "--a", "-1", "--k", "3", "--nx", "120", "--format", "csv"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("config file supplies defaults and flags override") {
  const std::string path = "cli_test.conf";
  {
    std::ofstream f(path);
    f << "a = -1\nbranch = qes\nformat = csv\n";
  }
  const auto r = run({"spectrum", "--config", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("k,E,retained\n", 0) == 0);
  const auto o = run({"spectrum", "--config", path, "--format", "json"});
  REQUIRE(o.code == 0);
  CHECK(o.out.front() == '{');
  std::remove(path.c_str());
}
