#include <doctest.h>

#include <set>

#include <json.hpp>

#include "susysep/error.hpp"
#include "susysep/verify.hpp"

using namespace susysep;

TEST_CASE("tolerance table") {
  std::set<std::string_view> ids;
  for (const auto& t : verify::tolerance_table()) {
    CHECK(ids.insert(t.id).second);
    CHECK(t.value > 0.0);
  }
  CHECK(verify::tolerance("order_min") == 1.9);
  CHECK_THROWS_AS(verify::tolerance("nope"), Error);
}

TEST_CASE("unknown suite") {
  try {
    verify::run_suite("nosuch", {});
    FAIL("expected UnknownSuite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownSuite);
  }
}

TEST_CASE("shape suite is a single passing check") {
  verify::SuiteConfig c;
  c.a = -1.0;
  const auto r = verify::run_suite("shape", c);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].id == "shape.identity");
  CHECK(r.checks[0].pass);
  CHECK(r.checks[0].measured < 1e-10);
  CHECK(r.passed());
}

TEST_CASE("report JSON has stable field names") {
  const auto r = verify::run_suite("shape", {});
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["suite"] == "shape");
  const auto& c = j["checks"][0];
  for (const char* key : {"id", "anchor", "tag", "measured", "target", "tol", "pass"}) CHECK(c.contains(key));
  CHECK(c["tag"] == "analytic");
  CHECK(j["tolerances"]["roundoff"] == 1e-10);
}

TEST_CASE("reports are deterministic") {
  verify::SuiteConfig c;
  CHECK(verify::run_suite("shape", c).to_json() == verify::run_suite("shape", c).to_json());
  CHECK(verify::run_suite("oracle-calibration", c).to_json() ==
        verify::run_suite("oracle-calibration", c).to_json());
}

TEST_CASE("oracle calibration suite") {
  const auto r = verify::run_suite("oracle-calibration", {});
  CHECK(r.passed());
  const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                               [](const verify::Check& c) { return c.id == "oracle.morse_levels"; });
  REQUIRE(it != r.checks.end());
  CHECK(it->details.size() == 5);
}

TEST_CASE("intertwining and zero-mode suites pass") {
  CHECK(verify::run_suite("intertwining", {}).passed());
  CHECK(verify::run_suite("zeromodes", {}).passed());
}

TEST_CASE("inadmissible coupling is recorded as skipped, never dropped") {
  verify::SuiteConfig c;
  c.a = -0.3;
  const auto r = verify::run_suite("zeromodes", c);
  REQUIRE_FALSE(r.checks.empty());
  for (const auto& ch : r.checks) {
    CHECK(ch.skipped);
    CHECK_FALSE(ch.reason.empty());
  }
  const auto e = verify::run_suite("exact", c);
  for (const auto& ch : e.checks) CHECK(ch.reason.find("exact branch requires a = -0.5") != std::string::npos);
}

TEST_CASE("check ids are unique across suites") {
  std::set<std::string> seen;
  for (const char* s : {"shape", "oracle-calibration", "intertwining", "zeromodes"}) {
    for (const auto& c : verify::run_suite(s, {}).checks) CHECK(seen.insert(c.id).second);
  }
}

TEST_CASE("fit_order") {
  const std::vector<double> h = {0.4, 0.2, 0.1};
  const auto r = verify::fit_order(h, {1.6e-3, 4e-4, 1e-4});
  REQUIRE(r.order.has_value());
  CHECK(*r.order == doctest::Approx(2.0));
  const auto ex = verify::fit_order(h, {1e-15, 2e-16, 0.0});
  CHECK(ex.exact);
  CHECK_FALSE(ex.order.has_value());
  try {
    verify::fit_order({0.1, 0.05}, {1.0, 0.25});
    FAIL("expected InsufficientLevels");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientLevels);
  }
}

TEST_CASE("convergence studies") {
  const auto inter = verify::convergence_study("intertwining.residual", {101, 201, 401});
  REQUIRE(inter.order.has_value());
  CHECK(*inter.order >= 1.9);
  const auto zm = verify::convergence_study("zeromodes.residual", {200, 400, 800});
  REQUIRE(zm.order.has_value());
  CHECK(*zm.order >= 1.9);
  const auto shape = verify::convergence_study("shape.identity", {100, 1000, 10000});
  CHECK(shape.exact);
  CHECK_THROWS_AS(verify::convergence_study("intertwining.residual", {101, 201}), Error);
  CHECK_THROWS_AS(verify::convergence_study("nothing", {101, 201, 401}), Error);
}
