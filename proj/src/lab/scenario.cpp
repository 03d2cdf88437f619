#include "imcf/lab/scenario.hpp"

#include "imcf/analysis/analysis.hpp"
#include "imcf/convex_geom.hpp"
#include "imcf/error.hpp"
#include "imcf/flows/axisym_flow.hpp"
#include "imcf/flows/cone.hpp"
#include "imcf/flows/exact.hpp"
#include "imcf/flows/spherical_flow.hpp"
#include "imcf/flows/weak_flow.hpp"
#include "imcf/io/geometry_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <variant>

namespace imcf::lab {

namespace fs = std::filesystem;

namespace {

bool is_profile(Scenario s) {
  return s == Scenario::ice_cream_cone || s == Scenario::sphere || s == Scenario::custom_profile;
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw UsageError("outputs: cannot write " + p.string());
  return out;
}

std::string snapshot_name(std::size_t k, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu.%s", k, ext);
  return buf;
}

/// Closed-form or corner-based length of the initial curve.
double reference_length(const geom::SphericalCurve& c) {
  if (c.exact_length()) return *c.exact_length();
  if (!c.polygon_corners().empty()) {
    const auto& v = c.polygon_corners();
    double L = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) L += arc_angle(v[i], v[(i + 1) % v.size()]);
    return L;
  }
  return geom::spherical_length(c);
}

double measure_of(const flows::Diagnostics& d) {
  const double ext = d.monitor("length_extrapolated");
  return std::isnan(ext) ? d.measure : ext;
}

CheckResult measure_law(const std::vector<flows::Diagnostics>& rows) {
  CheckResult c{"measure_law", "max |ln(measure(t)/measure(0)) - t| against the exponential law", {}, 1e-3, false, ""};
  double worst = 0.0, at = 0.0;
  for (const auto& d : rows) {
    const double r = std::abs(std::log(measure_of(d) / measure_of(rows.front())) - d.t);
    if (!(r <= worst)) {
      worst = r;
      at = d.t;
    }
  }
  c.values = {{"max_residual", worst}, {"at_t", at}, {"rows", static_cast<double>(rows.size())}};
  c.pass = worst <= c.tolerance;
  return c;
}

CheckResult compare(std::string name, std::string label, const std::string& observed_key, double observed,
                    const std::string& expected_key, double expected, double tol) {
  CheckResult c{std::move(name), std::move(label), {}, tol, false, ""};
  const double err = std::abs(observed - expected);
  c.values = {{observed_key, observed}, {expected_key, expected}, {"error", err}};
  c.pass = err <= tol;
  return c;
}

CheckResult not_applicable(const std::string& name, Scenario s) {
  throw UsageError("checks: '" + name + "' does not apply to scenario " + to_string(s));
}

struct Geometry {
  std::optional<geom::SphericalCurve> curve;
  std::optional<geom::AxisymProfile> profile;
};

Geometry build(const ScenarioConfig& c, const fs::path& config_dir) {
  const auto& g = c.geometry;
  const std::size_t n = c.solver.samples;
  Geometry out;
  switch (c.scenario) {
    case Scenario::latitude_circle:
      out.curve = geom::latitude_circle(*g.colatitude_rad, n);
      break;
    case Scenario::round_cone:
      out.curve = geom::latitude_circle(kPi / 2.0 - *g.cone_angle_rad, n);
      break;
    case Scenario::cube_link:
      out.curve = geom::cube_corner_triangle(n);
      break;
    case Scenario::tetra_link:
      out.curve = *geom::vertex_link(geom::regular_tetrahedron(), 0, n).curve;
      break;
    case Scenario::wedge:
      out.curve = geom::wedge_curve(*g.dihedral_angle_rad, n);
      break;
    case Scenario::custom_curve:
      out.curve = io::load_curve(config_dir / *g.file);
      break;
    case Scenario::ice_cream_cone:
      out.profile = geom::ice_cream_cone(*g.cone_angle_rad, *g.slant_length, n);
      break;
    case Scenario::sphere:
      if (g.polar_radius && *g.polar_radius != *g.radius) out.profile = geom::spheroid_profile(*g.radius, *g.polar_radius, n);
      else out.profile = geom::sphere_profile(*g.radius, n);
      break;
    case Scenario::custom_profile:
      out.profile = io::load_profile(config_dir / *g.file);
      break;
  }
  return out;
}

/// Last state seen by the observers, per weak-flow member (index 0 for direct flows).
template <class State>
class LastState {
 public:
  void record(std::size_t member, const State& s) {
    std::lock_guard lock(mu_);
    states_[member] = s;
  }
  std::map<std::size_t, State> snapshot() const {
    std::lock_guard lock(mu_);
    return states_;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::size_t, State> states_;
};

void write_state_file(const fs::path& p, const geom::SphericalCurve& c) {
  auto out = open_out(p);
  io::write_curve(out, c);
}
void write_state_file(const fs::path& p, const geom::AxisymProfile& c) {
  auto out = open_out(p);
  io::write_profile(out, c);
}

template <class State>
void dump_failure(const fs::path& dir, const LastState<State>& last, const std::string& what, const char* ext) {
  auto info = open_out(dir / "failure.txt");
  info << "error: " << what << '\n';
  for (const auto& [member, s] : last.snapshot()) {
    const std::string file = "last_state_" + std::to_string(member) + "." + ext;
    write_state_file(dir / file, s.geometry);
    info << "member " << member << ": t " << io::format_double(s.t) << " step " << s.step_index << " file " << file
         << '\n';
  }
}

template <class Geometry>
void write_snapshots(const fs::path& dir, const flows::FlowTrace<Geometry>& trace, bool svg, const char* ext) {
  std::vector<Geometry> shapes;
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    write_state_file(dir / snapshot_name(k, ext), trace.states[k].geometry);
    shapes.push_back(trace.states[k].geometry);
  }
  if (svg) {
    auto out = open_out(dir / "snapshots.svg");
    io::write_svg(out, shapes);
  }
}

void write_csv(const fs::path& p, const std::vector<flows::Diagnostics>& rows) {
  auto out = open_out(p);
  io::write_trace_csv(out, rows);
}

// ------------------------------------------------------------------ runs

struct CurveRun {
  flows::SphericalTrace trace;  // direct flow, or the weak limit
  std::optional<flows::WeakFlowResult> weak;
};

CheckResult curve_check(const std::string& name, const ScenarioConfig& cfg, const geom::SphericalCurve& initial,
                        const CurveRun& run) {
  const Scenario s = cfg.scenario;
  const auto& tr = run.trace;
  if (name == "measure_law") return measure_law(run.weak ? tr.diagnostics : tr.step_log);
  if (name == "equator_time") {
    const auto rep = flows::equator_convergence_time(tr);
    const double tol = s == Scenario::latitude_circle ? 1e-4 : 5e-3;
    auto c = compare(name, "equator time from the length law against ln 2pi - ln|initial link|", "T_observed",
                     rep.T_observed, "T_expected", flows::equator_time(reference_length(initial)), tol);
    c.values.emplace_back("snapshots_used", static_cast<double>(rep.samples_used));
    return c;
  }
  if (name == "great_circle_residual") {
    const double r = flows::great_circle_residual(tr.states.back().geometry.points());
    CheckResult c{name, "C0 distance of the final curve to its best-fit great circle", {}, 1e-3, r <= 1e-3, ""};
    c.values = {{"residual", r}, {"t_final", tr.t_end()}};
    c.note = "stop reason " + tr.stop_reason;
    return c;
  }
  if (name == "nesting") {
    if (!run.weak) return not_applicable(name, s);
    double worst = 0.0, ratio = 0.0;
    for (const auto& n : run.weak->nesting) {
      worst = std::max(worst, n.violation);
      ratio = std::max(ratio, n.violation / n.tolerance);
    }
    CheckResult c{name, "containment of the larger-epsilon member in the smaller-epsilon member", {}, 1.0, ratio <= 1.0, ""};
    c.values = {{"max_violation", worst},
                {"max_violation_over_tolerance", ratio},
                {"pairs_checked", static_cast<double>(run.weak->nesting.size())}};
    return c;
  }
  if (name == "smoothing_time") {
    if (s != Scenario::cube_link && s != Scenario::tetra_link) return not_applicable(name, s);
    const auto body = s == Scenario::cube_link ? geom::unit_cube() : geom::regular_tetrahedron();
    const auto ts = analysis::smoothing_time(body);
    return compare(name, "vertex waiting time from the link density against the observed equator time", "T_observed",
                   flows::equator_convergence_time(tr).T_observed, "T_smooth", ts.T_smooth, 5e-3);
  }
  if (name == "cone_exact") {
    if (s != Scenario::round_cone) return not_applicable(name, s);
    const double theta0 = *cfg.geometry.cone_angle_rad;
    const auto cones = flows::lift_cone_flow(tr);
    double worst = 0.0;
    std::size_t used = 0;
    for (const auto& st : cones.states) {
      if (st.t >= flows::cone_flat_time(theta0)) break;
      worst = std::max(worst, std::abs(st.geometry.equivalent_angle() - flows::round_cone_exact(theta0, st.t)));
      ++used;
    }
    CheckResult c{name, "lifted link cone angle against acos(e^t cos theta0)", {}, 1e-4, worst <= 1e-4, ""};
    c.values = {{"max_angle_error", worst}, {"snapshots_used", static_cast<double>(used)}};
    return c;
  }
  if (name == "maximal_time") {
    if (s != Scenario::round_cone) return not_applicable(name, s);
    const double theta0 = *cfg.geometry.cone_angle_rad;
    const double T = analysis::maximal_time({initial, std::nullopt});
    return compare(name, "maximal time of the link region against the cone flattening time -ln cos theta0", "T_star",
                   T, "T_flat", flows::cone_flat_time(theta0), 1e-12);
  }
  if (name == "cd_monitor") {
    if (s != Scenario::round_cone) return not_applicable(name, s);
    const auto rep = analysis::cd_monitor(flows::lift_cone_flow(tr), analysis::MonitorParams{}, 0.05, 0.6);
    CheckResult c{name, "1/(H|F|) normalized by 1 + t^-1/2 on the lifted cone: bounded, no upward trend", {}, 1.6449,
                  rep.bounded, ""};
    c.values = {{"fit_C", rep.fit_C}, {"mann_kendall_Z", rep.trend.Z}, {"star_margin", rep.star_margin}};
    return c;
  }
  if (name == "wedge_classify") {
    if (s != Scenario::wedge) return not_applicable(name, s);
    const auto cl = geom::wedge_or_equator_classify(initial);
    const double theta = cl.wedge ? cl.wedge->dihedral_angle : std::nan("");
    auto c = compare(name, "full-length link classified as a wedge with the constructed dihedral angle",
                     "dihedral_recovered", theta, "dihedral_constructed", *cfg.geometry.dihedral_angle_rad, 1e-6);
    c.values.emplace_back("length", cl.length);
    c.pass = c.pass && cl.kind == geom::ShapeClass::Wedge;
    c.note = "class " + geom::to_string(cl.kind);
    return c;
  }
  if (name == "splitting") {
    const auto r = analysis::splitting_check(tr);
    const bool expected = s == Scenario::wedge;
    CheckResult c{name, "antipodal pair along a common axis in every snapshot, expected only for wedges", {}, 1e-6,
                  r.splits == expected, ""};
    c.values = {{"splits", r.splits ? 1.0 : 0.0}, {"residual", r.residual}};
    return c;
  }
  if (name == "area_comparison") {
    const Vec3 corner = s == Scenario::wedge ? Vec3::UnitZ() : initial[0];
    const auto r = geom::area_comparison_check(initial, corner);
    CheckResult c{name, "|link|/2pi <= 1 with equality only for split cones", {}, 1e-6,
                  r.inequality_holds && r.equality_implies_split, ""};
    c.values = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"splits", r.splits ? 1.0 : 0.0}};
    return c;
  }
  return not_applicable(name, s);
}

CheckResult profile_check(const std::string& name, const ScenarioConfig& cfg, const geom::AxisymProfile& initial,
                          const flows::ProfileTrace& tr) {
  const Scenario s = cfg.scenario;
  const bool tip = initial.tip_index().has_value();
  if (name == "measure_law") return measure_law(tr.step_log);
  if (name == "cone_angle") {
    if (!tip || !cfg.geometry.cone_angle_rad) return not_applicable(name, s);
    const auto series = analysis::cone_angle_series(tr, cfg.solver.tip_window, 0.05, 0.6);
    CheckResult c{name, "fitted tip angle against the exact round cone over [0.05, 0.6]", {}, 2e-2, false, ""};
    c.values = {{"max_deviation", series.max_deviation},
                {"theta0_fit", series.theta0},
                {"truncated_at", series.truncated_at.value_or(std::nan(""))}};
    c.pass = series.defined && series.max_deviation <= c.tolerance;
    return c;
  }
  if (name == "tip_waiting_time") {
    if (!tip || !cfg.geometry.cone_angle_rad) return not_applicable(name, s);
    const auto w = analysis::waiting_time(tr, initial[*initial.tip_index()]);
    auto c = compare(name, "tip waiting time against -ln cos theta0", "t_wait", w.t_wait, "T_expected",
                     flows::cone_flat_time(*cfg.geometry.cone_angle_rad), 5e-2);
    c.values.emplace_back("t_onset", w.t_onset);
    c.values.emplace_back("displacement_tol", w.tolerance);
    if (w.censored) {
      c.pass = false;
      c.note = "censored: no displacement before the end of the run";
    }
    return c;
  }
  if (name == "splitting") {
    const auto r = analysis::splitting_check(tr);
    CheckResult c{name, "every snapshot a cylinder about the axis, not expected for closed bodies or cones", {}, 1e-6,
                  !r.splits, ""};
    c.values = {{"splits", r.splits ? 1.0 : 0.0}, {"residual", r.residual}};
    return c;
  }
  if (name == "h_residual") {
    if (tip) return not_applicable(name, s);
    const auto r = analysis::h_evolution_residual(tr);
    const bool round = s == Scenario::sphere && (!cfg.geometry.polar_radius || *cfg.geometry.polar_radius == *cfg.geometry.radius);
    const double tol = round ? 1e-6 : 1e-2;
    CheckResult c{name, "max residual of the mean curvature evolution equation", {}, tol, r.overall_max <= tol, ""};
    c.values = {{"max_residual", r.overall_max}, {"snapshots_used", static_cast<double>(r.t.size())}};
    if (!round) c.note = "discretization-level bound for non-round bodies";
    return c;
  }
  if (name == "cd_monitor") {
    if (tip) return not_applicable(name, s);
    analysis::MonitorParams p;
    const bool round = s == Scenario::sphere && (!cfg.geometry.polar_radius || *cfg.geometry.polar_radius == *cfg.geometry.radius);
    p.enforce_star_shape = !round;
    p.fit_C = round ? 0.5 + 1e-6 : 0.0;
    const auto rep = analysis::cd_monitor(tr, p);
    CheckResult c{name, "1/(H|F|) normalized by 1 + t^-1/2: bounded, no upward trend", {}, p.fit_C, rep.bounded, ""};
    c.values = {{"fit_C", rep.fit_C}, {"mann_kendall_Z", rep.trend.Z}, {"star_margin", rep.star_margin}};
    return c;
  }
  return not_applicable(name, s);
}

bool applicable(const std::string& name, const ScenarioConfig& c) {
  const Scenario s = c.scenario;
  const bool weak = !c.epsilon_schedule.epsilons.empty();
  if (name == "splitting") return true;
  if (s == Scenario::wedge) return name == "wedge_classify" || name == "area_comparison";
  if (is_profile(s)) {
    if (name == "measure_law") return true;
    if (name == "cone_angle" || name == "tip_waiting_time") return s == Scenario::ice_cream_cone;
    if (name == "h_residual" || name == "cd_monitor") return s != Scenario::ice_cream_cone;
    return false;
  }
  if (name == "measure_law" || name == "equator_time" || name == "great_circle_residual" || name == "area_comparison")
    return true;
  if (name == "nesting") return weak;
  if (name == "smoothing_time") return s == Scenario::cube_link || s == Scenario::tetra_link;
  if (name == "cone_exact" || name == "maximal_time" || name == "cd_monitor") return s == Scenario::round_cone;
  return false;
}

template <class F>
CheckResult guarded(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    CheckResult c{name, "check could not be evaluated", {}, 0.0, false, e.what()};
    return c;
  }
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config, const RunContext& ctx) {
  validate(config);
  const auto checks = config.checks.empty() ? default_checks(config.scenario) : config.checks;
  for (std::size_t i = 0; i < checks.size(); ++i)
    if (!applicable(checks[i], config))
      throw UsageError("checks[" + std::to_string(i) + "]: '" + checks[i] + "' does not apply to scenario " +
                       to_string(config.scenario));
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioReport rep;
  rep.scenario = to_string(config.scenario);
  rep.name = config.name;
  rep.config_hash = config_hash(config);
  rep.seed = ctx.seed_override.value_or(config.seed);

  const fs::path dir = ctx.out_root / config.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("outputs: cannot create " + dir.string());
  {
    auto cfg_out = open_out(dir / "config.yaml");
    cfg_out << emit_config(config);
  }

  const auto& o = config.outputs;
  const auto& sv = config.solver;
  const Geometry g = build(config, ctx.config_dir);

  if (g.curve) {
    CurveRun run;
    LastState<flows::SphericalState> last;
    if (config.scenario == Scenario::wedge) {
      // No flow: the sides of a full-length link have zero curvature.
      run.trace.states.push_back(flows::make_spherical_state(*g.curve));
      flows::Diagnostics d;
      d.measure = geom::spherical_length(*g.curve);
      const auto& k = run.trace.states[0].curvature;
      d.kappa_min = *std::min_element(k.begin(), k.end());
      d.kappa_max = *std::max_element(k.begin(), k.end());
      run.trace.diagnostics = {d};
      run.trace.step_log = {d};
      run.trace.stop_reason = "static";
    } else {
      flows::SphericalRunOptions ro;
      ro.dt = sv.dt;
      ro.t_end = sv.t_end;
      ro.snapshot_interval = o.snapshot_interval;
      ro.delta_stop = sv.delta_stop;
      try {
        if (config.epsilon_schedule.epsilons.empty()) {
          ro.observer = [&](const flows::SphericalState& st) { last.record(0, st); };
          run.trace = flows::evolve_spherical(*g.curve, ro);
        } else {
          flows::WeakFlowOptions wo;
          wo.run = ro;
          wo.samples = sv.samples;
          wo.richardson_order = sv.richardson_order;
          wo.workers = config.workers;
          wo.member_observer = [&](std::size_t i, const flows::SphericalState& st) { last.record(i, st); };
          run.weak = flows::run_weak_flow(*g.curve, config.epsilon_schedule, wo);
          run.trace = run.weak->limit;
        }
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        rep.failure = e.what();
        dump_failure(dir / "failure", last, e.what(), "curve");
      }
    }
    if (rep.failure.empty()) {
      run.trace.config_hash = rep.config_hash;
      rep.stop_reason = run.trace.stop_reason;
      write_csv(dir / o.trace, run.weak ? run.trace.diagnostics : run.trace.step_log);
      if (run.weak)
        for (std::size_t i = 0; i < run.weak->members.size(); ++i)
          write_csv(dir / "members" / ("member_" + std::to_string(i) + ".csv"), run.weak->members[i].step_log);
      write_snapshots(dir / o.snapshot_dir, run.trace, o.svg, "curve");
      for (const auto& name : checks)
        rep.checks.push_back(guarded(name, [&] { return curve_check(name, config, *g.curve, run); }));
    }
  } else {
    flows::AxisymRunOptions ao;
    ao.dt = sv.dt;
    ao.t_end = sv.t_end;
    ao.snapshot_interval = o.snapshot_interval;
    ao.release = sv.tip_release;
    ao.release_time = sv.release_time;
    ao.release_angle = sv.release_angle_rad;
    ao.tip_window = sv.tip_window;
    ao.smooth_window = sv.smooth_window;
    LastState<flows::ProfileState> last;
    ao.observer = [&](const flows::ProfileState& st) { last.record(0, st); };
    flows::ProfileTrace trace;
    try {
      trace = flows::evolve_axisym(*g.profile, ao);
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      rep.failure = e.what();
      dump_failure(dir / "failure", last, e.what(), "profile");
    }
    if (rep.failure.empty()) {
      trace.config_hash = rep.config_hash;
      rep.stop_reason = trace.stop_reason;
      write_csv(dir / o.trace, trace.step_log);
      write_snapshots(dir / o.snapshot_dir, trace, o.svg, "profile");
      for (const auto& name : checks)
        rep.checks.push_back(guarded(name, [&] { return profile_check(name, config, *g.profile, trace); }));
    }
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    auto out = open_out(dir / o.report);
    write_text(out, rep);
  }
  {
    auto out = open_out(dir / o.summary);
    write_summary(out, rep);
  }
  return rep;
}

std::vector<ScenarioReport> run_batch(const std::vector<BatchItem>& items, const RunContext& ctx, std::size_t workers) {
  std::set<std::string> names;
  for (const auto& it : items)
    if (!names.insert(it.config.name).second)
      throw UsageError("name: duplicate scenario name '" + it.config.name + "' in one batch");
  std::vector<ScenarioReport> out(items.size());
  workers = std::max<std::size_t>(1, workers);
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= items.size()) return;
        i = next++;
      }
      RunContext c = ctx;
      c.config_dir = items[i].config_dir;
      out[i] = run_scenario(items[i].config, c);
    }
  };
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < std::min(workers, items.size()); ++w) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  return out;
}

}  // namespace imcf::lab
