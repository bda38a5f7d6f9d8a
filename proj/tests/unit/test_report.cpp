#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "octaframe/error.hpp"
#include "octaframe/report.hpp"

using namespace octaframe;
using testing::Gen;

TEST_CASE("report keeps insertion order and replaces repeated keys") {
  RunReport r;
  r.set("b", 1);
  r.set("a", std::string("x"));
  r.set("b", 2);
  REQUIRE(r.entries().size() == 2);
  CHECK(r.entries()[0].first == "b");
  CHECK(r.get("b") == "2");
  CHECK(r.get("missing") == std::nullopt);
  r.set("flag", true);
  CHECK(r.get("flag") == "true");
  r.set("multi", "line one\nline two");
  CHECK(r.get("multi") == "line one line two");
}

TEST_CASE("property: report text round-trips, doubles bit-exact") {
  Gen g(101);
  RunReport r;
  std::vector<double> values;
  for (int i = 0; i < 200; ++i) {
    const double v = g.normal() * std::pow(10.0, g.integer(-20, 20));
    values.push_back(v);
    r.set("value_" + std::to_string(i), v);
  }
  r.warn("first warning");
  r.warn("second: with colon");
  r.time("solve", 1.25);
  std::istringstream in(r.to_text());
  const auto parsed = parse_report(in);
  REQUIRE(parsed.size() == values.size() + 3);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(parsed[i].first == "value_" + std::to_string(i));
    CHECK(std::stod(parsed[i].second) == values[i]);
  }
  CHECK(parsed[values.size()].second == "2");
  CHECK(parsed[values.size() + 2].second == "second: with colon");
  CHECK(r.to_text().find("time.") == std::string::npos);
  CHECK(r.to_text(true).find("time.solve: 1.25") != std::string::npos);
}

TEST_CASE("report file round-trip and parse errors") {
  RunReport r;
  r.set("chains", 3);
  r.set("status", "ok");
  const auto path = testing::scratch_dir("report") / "report.txt";
  r.write(path);
  const auto m = read_report(path);
  CHECK(m.at("chains") == "3");
  CHECK(m.at("status") == "ok");
  CHECK(m.at("warnings") == "0");
  std::istringstream bad("chains: 3\nno separator here\n");
  CHECK_THROWS_AS(parse_report(bad), Error);
}

TEST_CASE("valence histograms from graphs and polylines agree") {
  SingularityGraph g;
  const int ends[][2] = {{3, 3}, {5, 3}, {3, 5}, {5, 5}, {3, 3}};
  std::vector<Polyline> lines;
  for (const auto& e : ends) {
    SingularChain c;
    c.valence_start = e[0];
    c.valence_end = e[1];
    g.chains.push_back(c);
    Polyline l;
    l.valence = 10 * e[0] + e[1];
    lines.push_back(l);
  }
  const auto a = valence_histogram(g);
  CHECK(a.at("33") == 2);
  CHECK(a.at("35") == 2);
  CHECK(a.at("55") == 1);
  CHECK(a == valence_histogram(lines));
}

TEST_CASE("plan summary lists every diagnostic") {
  CorrectionPlan p;
  p.strategy = Strategy::Snap;
  p.diagnostics.push_back("note");
  p.fail("broken");
  RunReport r;
  add_plan_summary(r, "plan", p);
  CHECK(r.get("plan.applicable") == "false");
  CHECK(r.get("plan.failures") == "1");
  CHECK(r.get("plan.diagnostics") == "2");
  CHECK(r.get("plan.diagnostic_1") == "broken");
  CHECK(r.get("plan.snap_iterations") == "0");
}
