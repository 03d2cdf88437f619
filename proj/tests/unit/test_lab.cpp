#include "doctest.h"

#include "imcf/error.hpp"
#include "imcf/convex_geom.hpp"
#include "imcf/io/geometry_io.hpp"
#include "imcf/lab/battery.hpp"
#include "imcf/lab/config.hpp"
#include "imcf/lab/report.hpp"
#include "imcf/lab/scenario.hpp"
#include "imcf/polytope.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace imcf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("imcf_test_lab_" + name);
  fs::remove_all(p);
  return p;
}

std::string usage_message(const std::string& yaml) {
  try {
    lab::parse_config(yaml);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

lab::ScenarioConfig small_latitude() {
  auto c = lab::preset(lab::Scenario::latitude_circle);
  c.solver.samples = 32;
  c.solver.t_end = 0.1;
  c.solver.delta_stop = 1e-3;
  c.checks = {"measure_law"};
  return c;
}

}  // namespace

TEST_CASE("curve and profile files round trip bit for bit") {
  const auto tri = geom::cube_corner_triangle(30);
  std::stringstream ss;
  io::write_curve(ss, tri);
  const auto back = io::read_curve(ss);
  REQUIRE(back.size() == tri.size());
  for (std::size_t i = 0; i < tri.size(); ++i) CHECK(back[i] == tri[i]);
  CHECK(back.corner_flags() == tri.corner_flags());

  const auto cone = geom::ice_cream_cone(1.0, 1.0, 64);
  std::stringstream sp;
  io::write_profile(sp, cone);
  const auto pb = io::read_profile(sp);
  REQUIRE(pb.size() == cone.size());
  CHECK(pb.tip_index() == cone.tip_index());
  CHECK(pb.closed() == cone.closed());
  for (std::size_t i = 0; i < cone.size(); ++i) CHECK(pb[i] == cone[i]);
}

TEST_CASE("OFF round trip keeps the smoothing time") {
  const auto cube = geom::unit_cube();
  std::stringstream ss;
  io::write_off(ss, cube);
  const auto back = io::read_off(ss);
  CHECK(back.vertices() == cube.vertices());
  CHECK(back.faces() == cube.faces());
}

TEST_CASE("malformed geometry files name the problem") {
  std::istringstream count("# format imcf-s2-curve\n# dimension 3\n# count 4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n");
  CHECK_THROWS_WITH_AS(io::read_curve(count), doctest::Contains("count 4"), MalformedInput);
  std::istringstream record("# format imcf-s2-curve\n# dimension 3\n# count 3\n1 0 0 0\n0 1 x 0\n0 0 1 0\n");
  CHECK_THROWS_WITH_AS(io::read_curve(record), doctest::Contains("line 5"), MalformedInput);
  std::istringstream format("# format imcf-rz-profile\n# dimension 3\n# count 0\n");
  CHECK_THROWS_AS(io::read_curve(format), MalformedInput);
  std::istringstream off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  CHECK_THROWS_WITH_AS(io::read_off(off), doctest::Contains("out of range"), MalformedInput);
}

TEST_CASE("trace CSV carries the fixed columns, the monitor union and 17 digits") {
  flows::Diagnostics a, b;
  a.t = 0.1;
  a.measure = 2.0 / 3.0;
  a.set_monitor("dt", 1e-3);
  b.step = 1;
  b.set_monitor("gap", 0.5);
  std::stringstream ss;
  io::write_trace_csv(ss, {a, b});
  std::string header, row1, row2;
  std::getline(ss, header);
  std::getline(ss, row1);
  std::getline(ss, row2);
  CHECK(header == "step,t,length_or_area,kappa_min,kappa_max,tip_r,tip_z,dt,gap");
  CHECK(row1.find("0.66666666666666663") != std::string::npos);
  CHECK(row1.back() == ',');
  CHECK(row2.substr(row2.size() - 4) == ",0.5");
}

TEST_CASE("config round trip is the identity for every preset and shipped file") {
  for (auto s : lab::all_scenarios()) {
    const auto c = lab::preset(s);
    const auto back = lab::parse_config(lab::emit_config(c));
    CHECK(back == c);
    CHECK(lab::emit_config(back) == lab::emit_config(c));
    CHECK(lab::config_hash(back) == lab::config_hash(c));
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(IMCF_SCENARIO_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    ++files;
    const auto c = lab::load_config(e.path());
    CHECK(lab::parse_config(lab::emit_config(c)) == c);
  }
  CHECK(files >= 9);
}

TEST_CASE("config errors name the offending field") {
  CHECK(usage_message("scenario: sphere\nsolver: {samples: 64}\n").find("geometry") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\nsolver: {sampels: 64}\n").find("solver.sampels") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\nsolver: {samples: 8}\n").find("solver.samples") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\nsolver: {samples: -3}\n").find("solver.samples") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {}\n").find("geometry.radius") == 0);
  CHECK(usage_message("scenario: cone\ngeometry: {}\n").find("scenario") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\nsolver: {scheme: rk4}\n").find("solver.scheme") == 0);
  CHECK(usage_message("scenario: cube_link\ngeometry: {}\nepsilon_schedule: {epsilons: [0.02, 0.04]}\n")
            .find("epsilon_schedule.epsilons") == 0);
  CHECK(usage_message("scenario: cube_link\ngeometry: {}\n").find("epsilon_schedule.epsilons") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\noutputs: {trace: /tmp/x.csv}\n").find("outputs.trace") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\noutputs: {trace: ../x.csv}\n").find("outputs.trace") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\nchecks: [area_law]\n").find("checks[0]") == 0);
  CHECK(usage_message("scenario: [sphere\n").find("config") == 0);
  CHECK(usage_message("scenario: sphere\ngeometry: {radius: 1}\nname: a/b\n").find("name") == 0);

  auto c = lab::preset(lab::Scenario::sphere);
  c.checks = {"tip_waiting_time"};
  CHECK_THROWS_WITH_AS(lab::run_scenario(c, {scratch("na")}), doctest::Contains("checks[0]"), UsageError);
}

TEST_CASE("identical config and seed give bit-identical outputs") {
  const auto c = small_latitude();
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto ra = lab::run_scenario(c, {a});
  const auto rb = lab::run_scenario(c, {b});
  CHECK(ra.passed());
  CHECK(ra.config_hash == rb.config_hash);
  const auto csv = slurp(a / c.name / "trace.csv");
  CHECK(csv.size() > 100);
  CHECK(csv == slurp(b / c.name / "trace.csv"));
  CHECK(slurp(a / c.name / "snapshots" / "snapshot_0003.curve") == slurp(b / c.name / "snapshots" / "snapshot_0003.curve"));
  const auto cfg = lab::load_config(a / c.name / "config.yaml");
  CHECK(cfg == c);
}

TEST_CASE("solver failure dumps the last valid state and fails the run") {
  auto c = lab::preset(lab::Scenario::sphere);
  c.name = "floor";
  c.solver.samples = 64;
  c.solver.dt.curvature_floor = 1.99;
  c.checks = {"measure_law"};
  const auto out = scratch("failure");
  const auto r = lab::run_scenario(c, {out});
  CHECK_FALSE(r.passed());
  CHECK(r.failure.find("floor") != std::string::npos);
  const auto state = io::load_profile(out / "floor" / "failure" / "last_state_0.profile");
  CHECK(state.size() == 64);
  CHECK(fs::exists(out / "floor" / "failure" / "failure.txt"));
  std::ifstream in(out / "floor" / "summary.json");
  CHECK_FALSE(lab::read_summary(in).passed());
}

TEST_CASE("summaries round trip and batches reject duplicate names") {
  lab::ScenarioReport r;
  r.scenario = "sphere";
  r.name = "s";
  r.config_hash = 0xfedcba9876543210ull;
  r.checks.push_back({"x", "label", {{"a", 1.0 / 3.0}, {"b", std::nan("")}}, 1e-6, true, "note"});
  std::stringstream ss;
  lab::write_summary(ss, r);
  const auto back = lab::read_summary(ss);
  CHECK(back.config_hash == r.config_hash);
  REQUIRE(back.checks.size() == 1);
  CHECK(back.checks[0].value("a") == 1.0 / 3.0);
  CHECK(std::isnan(back.checks[0].value("b")));
  CHECK(back.passed());

  const auto c = small_latitude();
  CHECK_THROWS_AS(lab::run_batch({{c, "."}, {c, "."}}, {scratch("dup")}, 2), UsageError);
}

TEST_CASE("random convex polygons are convex and shorter than a great circle") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto p = lab::random_convex_polygon(rng, 128);
    CHECK(geom::convexity_check(p).is_convex);
    CHECK(geom::spherical_length(p) < kTwoPi);
  }
  CHECK_THROWS_AS(lab::suite_from_string("nightly"), UsageError);
}
