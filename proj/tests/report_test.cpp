#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "genorb/errors.hpp"
#include "genorb/report.hpp"
#include "support.hpp"

namespace genorb {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig config_from(const std::string& text) { return RunConfig::parse(text); }

std::string generating_csv(const RunConfig& config) {
  std::ostringstream out;
  write_generating_csv(out, generating_table(config));
  return out.str();
}

RunConfig draw_config(testing::Draw& draw) {
  RunConfig c;
  const char* commands[] = {"gen-table", "continue", "orbit-dump", "verify", ""};
  c.command = commands[draw.integer(0, 4)];
  c.mode = static_cast<TableMode>(draw.integer(0, 3));
  const double first = draw.integer(0, 18) * 10.0 + (draw.coin() ? 0.0 : draw.uniform(0.0, 1.0));
  const int steps = draw.integer(0, 5);
  const double step = steps ? draw.uniform(0.1, 20.0) : 0.0;
  c.theta_deg = {first, first + steps * step, step};
  c.theta_deg = parse_angle_range(to_string(c.theta_deg));
  const int I = draw.integer(1, 30);
  c.I = {I, I + draw.integer(0, 10)};
  if (draw.coin()) c.b = draw.uniform(0.1, 3.0);
  if (draw.coin()) c.c0 = -draw.uniform(0.0, 1.4);
  for (int n = draw.integer(0, 4); n > 0; --n) c.mu.push_back(draw.uniform(0.0, 0.5));
  c.frame = draw.coin() ? Frame::barycentric : Frame::m1_centered;
  c.rotation = draw.coin() ? Rotation::direct : Rotation::retrograde;
  c.rtol = std::pow(10.0, -draw.uniform(6.0, 14.0));
  c.atol = std::pow(10.0, -draw.uniform(6.0, 14.0));
  c.samples = static_cast<std::size_t>(draw.integer(2, 100000));
  c.out = draw.coin() ? "out/table " + std::to_string(draw.integer(0, 99)) + ".csv" : "";
  c.fixtures = draw.coin() ? "tests/data" : "";
  return c;
}

TEST(RunConfigProperty, CanonicalFormRoundTrips) {
  testing::Draw draw(601);
  for (int n = 0; n < 500; ++n) {
    const RunConfig c = draw_config(draw);
    const std::string text = c.canonical();
    const RunConfig back = RunConfig::parse(text);
    EXPECT_EQ(back, c) << text;
    EXPECT_EQ(back.canonical(), text);
  }
}

TEST(RunConfig, ParsesCommentsAndNames) {
  const RunConfig c = config_from(
      "# Table 2 style sweep\n"
      "  command = continue \n"
      "mode=fixed-theta-scan\n"
      "theta_deg = 0:180:10   # every ten degrees\n"
      "\n"
      "mu = sun-jupiter, earth-moon,0.2\n"
      "frame=m1\n");
  EXPECT_EQ(c.command, "continue");
  EXPECT_EQ(c.theta_deg.values().size(), 19u);
  EXPECT_EQ(c.theta_deg.values().back(), 180.0);
  ASSERT_EQ(c.mu.size(), 3u);
  EXPECT_EQ(c.mu[0], kSunJupiter);
  EXPECT_EQ(c.mu[1], kEarthMoon);
  EXPECT_EQ(c.frame, Frame::m1_centered);
  EXPECT_EQ(config_from(c.canonical()).canonical(), c.canonical());
}

TEST(RunConfig, RejectsMalformedInput) {
  EXPECT_THROW(config_from("colour=blue"), ConfigError);
  EXPECT_THROW(config_from("rtol"), ConfigError);
  EXPECT_THROW(config_from("rtol=1e-9\nrtol=1e-10"), ConfigError);
  EXPECT_THROW(config_from("rtol=abc"), ConfigError);
  EXPECT_THROW(config_from("rtol=-1"), ConfigError);
  EXPECT_THROW(config_from("theta_deg=0:180:7"), ConfigError);
  EXPECT_THROW(config_from("theta_deg=10:0:10"), ConfigError);
  EXPECT_THROW(config_from("I=0"), ConfigError);
  EXPECT_THROW(config_from("I=5:2"), ConfigError);
  EXPECT_THROW(config_from("mu=1.2"), ConfigError);
  EXPECT_THROW(config_from("frame=heliocentric"), ConfigError);
  EXPECT_THROW(config_from("mode=scan"), ConfigError);
  EXPECT_THROW(config_from("samples=1"), ConfigError);
  EXPECT_THROW(RunConfig::load("/nonexistent/run.cfg"), ConfigError);
}

TEST(Report, RangesAndLabels) {
  EXPECT_EQ(parse_index_range("1:20").values().size(), 20u);
  EXPECT_EQ(to_string(parse_index_range(" 7 ")), "7");
  EXPECT_EQ(to_string(parse_angle_range("0:180:10")), "0:180:10");
  EXPECT_EQ(to_string(parse_angle_range("45")), "45");
  EXPECT_EQ(mu_label(kPlutoCharon), "pluto_charon");
  EXPECT_EQ(mu_label(0.2), "mu0.2");
  EXPECT_EQ(sidecar_path("out/t2.csv"), "out/t2.json");
  EXPECT_EQ(sidecar_path("out.d/table"), "out.d/table.json");
}

TEST(ReportProperty, ShortestReadsBack) {
  testing::Draw draw(602);
  for (int n = 0; n < 1000; ++n) {
    const double v = draw.uniform(-1e3, 1e3) * std::pow(10.0, draw.integer(-12, 6));
    EXPECT_EQ(std::stod(shortest(v)), v);
  }
}

TEST(Report, GeneratingTablesMatchFixtures) {
  struct Case {
    const char* config;
    const char* fixture;
  };
  for (const Case& c : {Case{"mode=fixed-theta-scan\nI=1\ntheta_deg=0:180:10", "generating_I1.csv"},
                        Case{"mode=fixed-theta\ntheta_deg=10\nI=1:20", "generating_theta10.csv"}}) {
    const auto rows = csv_rows(generating_csv(config_from(c.config)));
    const Fixture fx = testing::fixture(c.fixture);
    ASSERT_EQ(rows.size(), fx.rows.size() + 1);
    EXPECT_EQ(rows[0], fx.header);
    for (std::size_t i = 0; i < fx.rows.size(); ++i) {
      ASSERT_EQ(rows[i + 1].size(), 5u);
      EXPECT_EQ(std::stod(rows[i + 1][0]), *fx.rows[i][0]);
      for (std::size_t j = 1; j < 5; ++j) {
        EXPECT_EQ(rows[i + 1][j].size() - rows[i + 1][j].find('.'), 7u) << "six decimals";
        EXPECT_NEAR(std::stod(rows[i + 1][j]), *fx.rows[i][j], 5e-6) << c.fixture << " row " << i;
      }
    }
  }
}

TEST(Report, FixedBTableRisesTowardZero) {
  const auto rows = csv_rows(generating_csv(config_from("mode=fixed-b\nb=1\nI=1:20")));
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_EQ(rows[0][0], "I");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_GT(std::stod(rows[i][3]), std::stod(rows[i - 1][3]));
    EXPECT_LT(std::stod(rows[i][3]), 0.0);
  }
}

TEST(Report, InfeasibleRowsAreMarked) {
  const auto rows = csv_rows(generating_csv(config_from("mode=fixed-energy\nc0=-0.5\nI=1:5")));
  ASSERT_EQ(rows.size(), 6u);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(rows[i], (std::vector<std::string>{std::to_string(i), "x", "x", "x", "x"}));
  EXPECT_NEAR(std::stod(rows[4][3]), -0.5, 1e-6);
  EXPECT_THROW(generating_table(config_from("mode=fixed-energy\nI=1:5")), ConfigError);
  EXPECT_THROW(generating_table(config_from("mode=fixed-b\nI=1:5")), ConfigError);
  EXPECT_THROW(generating_table(config_from("mode=fixed-theta\ntheta_deg=0:20:10")), ConfigError);
}

TEST(Report, OutputIsDeterministic) {
  const RunConfig c = config_from("mode=fixed-theta-scan\ntheta_deg=0:180:10\nI=1");
  EXPECT_EQ(generating_csv(c), generating_csv(c));
  const Table t = generating_table(c);
  EXPECT_EQ(generating_json(t, c), generating_json(generating_table(c), c));

  const RunConfig cont = config_from("command=continue\nmode=fixed-theta\ntheta_deg=10\nI=1:2\nmu=sun-jupiter,0.2");
  std::ostringstream a, b;
  write_continuation_csv(a, continuation_table(cont));
  write_continuation_csv(b, continuation_table(cont));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Report, ContinuationTableShapeAndMarkers) {
  const RunConfig c = config_from("command=continue\nmode=fixed-theta-scan\ntheta_deg=0:10:10\nI=1\nmu=0.2,0.5");
  const ContinuationTable table = continuation_table(c);
  std::ostringstream out;
  write_continuation_csv(out, table);
  const auto rows = csv_rows(out.str());
  const Fixture fx = testing::fixture("continued_I1_nonastro.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], fx.header);
  // theta = 0 at mu = 0.5 has no orbit in the reference table either
  EXPECT_EQ(rows[1][3], "x");
  EXPECT_EQ(rows[1][4], "x");
  for (std::size_t r = 1; r < 3; ++r) {
    for (std::size_t j = 1; j < 5; ++j) {
      if (!fx.rows[r - 1][j]) continue;
      EXPECT_NEAR(std::stod(rows[r][j]), *fx.rows[r - 1][j], 5e-6) << r << "," << j;
    }
  }
  const auto doc = nlohmann::json::parse(continuation_json(table, c));
  EXPECT_EQ(doc["config"]["mu"], "0.2,0.5");
  EXPECT_FALSE(doc["rows"][0]["cells"][1]["found"].get<bool>());
  EXPECT_FALSE(doc["rows"][0]["cells"][1]["reason"].get<std::string>().empty());
  EXPECT_EQ(doc["rows"][1]["cells"][0]["orbit"]["beta0"], -1);
  EXPECT_THROW(continuation_table(config_from("theta_deg=10")), ConfigError);
}

TEST(Report, ContinuedDumpConservesEnergy) {
  const RunConfig c = config_from("command=orbit-dump\ntheta_deg=60\nI=1\nmu=earth-moon\nsamples=400");
  const OrbitDump dump = orbit_dump(c);
  std::ostringstream out;
  write_dump_csv(out, dump, c.samples);
  const auto rows = csv_rows(out.str());
  ASSERT_EQ(rows.size(), 401u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "q1", "q2", "p1", "p2", "H", "Q1", "Q2", "P1", "P2"}));
  const double h0 = std::stod(rows[1][5]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 10u);
    EXPECT_NEAR(std::stod(rows[i][5]), h0, 1e-9);
    // inertial radius equals rotating radius about the barycentre
    EXPECT_NEAR(std::hypot(std::stod(rows[i][6]), std::stod(rows[i][7])),
                std::hypot(std::stod(rows[i][1]), std::stod(rows[i][2])), 1e-12);
  }
  EXPECT_NEAR(std::stod(rows.back()[1]), std::stod(rows[1][1]), 1e-8);

  const auto meta = nlohmann::json::parse(dump_json(dump, c));
  for (const char* key : {"a", "eps", "theta", "I", "mu", "c", "action", "beta0"}) EXPECT_TRUE(meta.contains(key)) << key;
  EXPECT_EQ(meta["beta0"], -1);
  EXPECT_EQ(meta["mu"], kEarthMoon);
  EXPECT_NEAR(meta["c"].get<double>(), h0, 1e-12);
}

TEST(Report, GeneratingDumpHitsUnitCircleAtTheta) {
  const double deg = 60.0;
  const RunConfig c = config_from("command=orbit-dump\ntheta_deg=60\nI=1\nsamples=201");
  const OrbitDump dump = orbit_dump(c);
  std::ostringstream out;
  write_dump_csv(out, dump, c.samples);
  const auto rows = csv_rows(out.str());
  ASSERT_EQ(rows.size(), 202u);
  // the collision with the second primary sits at half the period
  const auto& mid = rows[101];
  EXPECT_NEAR(std::stod(mid[0]), dump.arc.tau / 2.0, 1e-12);
  const double x = std::stod(mid[6]), y = std::stod(mid[7]);
  EXPECT_NEAR(std::hypot(x, y), 1.0, 1e-9);
  const double apo = std::atan2(std::stod(rows[1][7]), std::stod(rows[1][6]));
  const double angle = std::remainder(std::atan2(y, x) - apo, 2.0 * kPi);
  EXPECT_NEAR(std::abs(angle), deg * kPi / 180.0, 1e-9);
  const auto meta = nlohmann::json::parse(dump_json(dump, c));
  EXPECT_TRUE(meta["beta0"].is_null());
  EXPECT_NEAR(meta["action"].get<double>(), dump.arc.action, 0.0);
}

TEST(Report, DumpNeedsASingleOrbit) {
  EXPECT_THROW(orbit_dump(config_from("theta_deg=10:20:10")), ConfigError);
  EXPECT_THROW(orbit_dump(config_from("theta_deg=10\nI=1:2")), ConfigError);
  EXPECT_THROW(orbit_dump(config_from("theta_deg=10\nmu=0.1,0.2")), ConfigError);
}

}  // namespace
}  // namespace genorb
