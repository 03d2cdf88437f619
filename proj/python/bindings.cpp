#include "imcf/analysis/analysis.hpp"
#include "imcf/convex_geom.hpp"
#include "imcf/error.hpp"
#include "imcf/flows/axisym_flow.hpp"
#include "imcf/flows/exact.hpp"
#include "imcf/flows/spherical_flow.hpp"
#include "imcf/lab/battery.hpp"
#include "imcf/lab/config.hpp"
#include "imcf/lab/scenario.hpp"
#include "imcf/polytope.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>

namespace py = pybind11;
using namespace imcf;

namespace {

using RowsX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using RowsX2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

RowsX3 curve_points(const geom::SphericalCurve& c) {
  RowsX3 out(static_cast<Eigen::Index>(c.size()), 3);
  for (std::size_t i = 0; i < c.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = c[i].transpose();
  return out;
}

RowsX2 profile_samples(const geom::AxisymProfile& p) {
  RowsX2 out(static_cast<Eigen::Index>(p.size()), 2);
  for (std::size_t i = 0; i < p.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = p[i].transpose();
  return out;
}

std::vector<Vec3> to_vec3(const RowsX3& m) {
  std::vector<Vec3> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
  return out;
}

py::dict diagnostics_table(const std::vector<flows::Diagnostics>& rows) {
  std::vector<double> t, measure, kmin, kmax;
  for (const auto& d : rows) {
    t.push_back(d.t);
    measure.push_back(d.measure);
    kmin.push_back(d.kappa_min);
    kmax.push_back(d.kappa_max);
  }
  py::dict out;
  out["t"] = py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
  out["measure"] = py::array_t<double>(static_cast<py::ssize_t>(measure.size()), measure.data());
  out["kappa_min"] = py::array_t<double>(static_cast<py::ssize_t>(kmin.size()), kmin.data());
  out["kappa_max"] = py::array_t<double>(static_cast<py::ssize_t>(kmax.size()), kmax.data());
  return out;
}

py::dict check_dict(const lab::CheckResult& c) {
  py::dict values;
  for (const auto& [k, v] : c.values) values[py::str(k)] = v;
  py::dict out;
  out["name"] = c.name;
  out["label"] = c.label;
  out["values"] = values;
  out["tolerance"] = c.tolerance;
  out["pass"] = c.pass;
  out["note"] = c.note;
  return out;
}

py::dict report_dict(const lab::ScenarioReport& r) {
  py::list checks;
  for (const auto& c : r.checks) checks.append(check_dict(c));
  py::dict out;
  out["scenario"] = r.scenario;
  out["name"] = r.name;
  out["config_hash"] = r.config_hash;
  out["seed"] = r.seed;
  out["stop_reason"] = r.stop_reason;
  out["failure"] = r.failure;
  out["seconds"] = r.seconds;
  out["passed"] = r.passed();
  out["checks"] = checks;
  return out;
}

flows::DtPolicy policy(double error_tol, double dt_max) {
  flows::DtPolicy p;
  p.error_tol = error_tol;
  p.dt_max = dt_max;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inverse mean curvature flow of convex curves on S^2 and axisymmetric surfaces";

  const auto& error = py::register_exception<Error>(m, "Error");
  py::register_exception<MalformedInput>(m, "MalformedInput", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<UsageError>(m, "UsageError", error.ptr());

  py::class_<geom::SphericalCurve>(m, "SphericalCurve")
      .def(py::init([](const RowsX3& pts) { return geom::SphericalCurve(to_vec3(pts)); }), py::arg("points"))
      .def_property_readonly("points", &curve_points)
      .def_property_readonly("corner_flags", &geom::SphericalCurve::corner_flags)
      .def_property_readonly("length", &geom::spherical_length)
      .def("__len__", &geom::SphericalCurve::size)
      .def("reversed", &geom::SphericalCurve::reversed);

  py::class_<geom::AxisymProfile>(m, "AxisymProfile")
      .def_property_readonly("samples", &profile_samples)
      .def_property_readonly("closed", &geom::AxisymProfile::closed)
      .def_property_readonly("tip_index", &geom::AxisymProfile::tip_index)
      .def_property_readonly("surface_area", &geom::AxisymProfile::surface_area)
      .def_property_readonly("volume", &geom::AxisymProfile::volume)
      .def("__len__", &geom::AxisymProfile::size);

  py::class_<geom::ConvexPolytope>(m, "ConvexPolytope")
      .def_property_readonly("vertices", [](const geom::ConvexPolytope& p) { return p.vertices(); })
      .def_property_readonly("faces", [](const geom::ConvexPolytope& p) { return p.faces(); });

  m.def("latitude_circle", [](double alpha, std::size_t n) { return geom::latitude_circle(alpha, n); },
        py::arg("colatitude"), py::arg("samples"));
  m.def("great_circle", [](std::size_t n) { return geom::great_circle(n); }, py::arg("samples"));
  m.def("spherical_polygon", [](const RowsX3& corners, std::size_t n) { return geom::spherical_polygon(to_vec3(corners), n); },
        py::arg("corners"), py::arg("samples"));
  m.def("cube_corner_triangle", &geom::cube_corner_triangle, py::arg("samples"));
  m.def("wedge_curve", [](double theta0, std::size_t n) { return geom::wedge_curve(theta0, n); },
        py::arg("dihedral_angle"), py::arg("samples"));
  m.def("random_convex_polygon", [](std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    return lab::random_convex_polygon(rng, n);
  }, py::arg("seed"), py::arg("samples"));

  m.def("sphere_profile", [](double r, std::size_t n) { return geom::sphere_profile(r, n); }, py::arg("radius"),
        py::arg("samples"));
  m.def("spheroid_profile", &geom::spheroid_profile, py::arg("a"), py::arg("b"), py::arg("samples"));
  m.def("ice_cream_cone", &geom::ice_cream_cone, py::arg("cone_angle"), py::arg("slant"), py::arg("samples"));

  m.def("unit_cube", &geom::unit_cube);
  m.def("regular_tetrahedron", &geom::regular_tetrahedron);
  m.def("regular_octahedron", &geom::regular_octahedron);
  m.def("vertex_link", [](const geom::ConvexPolytope& p, std::size_t v, std::size_t n) {
    return *geom::vertex_link(p, v, n).curve;
  }, py::arg("polytope"), py::arg("vertex"), py::arg("samples") = 384);

  m.def("convexity_check", [](const geom::SphericalCurve& c) {
    const auto r = geom::convexity_check(c);
    py::dict out;
    out["is_convex"] = r.is_convex;
    out["simple"] = r.simple;
    out["worst_violation"] = r.worst_violation;
    return out;
  });
  m.def("hemisphere_report", [](const geom::SphericalCurve& c) {
    const auto r = geom::hemisphere_report(c);
    py::dict out;
    out["contained_in_open_hemisphere"] = r.contained_in_open_hemisphere;
    out["has_antipodal_pair"] = r.has_antipodal_pair;
    out["witness_direction"] = Eigen::Vector3d(r.witness_direction);
    out["margin"] = r.margin;
    return out;
  });
  m.def("smoothing_time", [](const geom::ConvexPolytope& p) { return analysis::smoothing_time(p).T_smooth; });

  m.def("round_cone_exact", &flows::round_cone_exact, py::arg("theta0"), py::arg("t"));
  m.def("cone_flat_time", &flows::cone_flat_time, py::arg("theta0"));
  m.def("latitude_circle_exact", &flows::latitude_circle_exact, py::arg("alpha0"), py::arg("t"));
  m.def("equator_time", &flows::equator_time, py::arg("length"));

  m.def("evolve_spherical", [](const geom::SphericalCurve& c, double t_end, double snapshot_interval, double delta_stop,
                               double error_tol, double dt_max) {
    flows::SphericalRunOptions o;
    o.t_end = t_end;
    o.snapshot_interval = snapshot_interval;
    o.delta_stop = delta_stop;
    o.dt = policy(error_tol, dt_max);
    flows::SphericalTrace tr;
    {
      py::gil_scoped_release release;
      tr = flows::evolve_spherical(c, o);
    }
    py::dict out = diagnostics_table(tr.diagnostics);
    py::list snaps;
    for (const auto& s : tr.states) snaps.append(s.geometry);
    out["snapshots"] = snaps;
    out["stop_reason"] = tr.stop_reason;
    out["steps"] = tr.step_log.size();
    return out;
  }, py::arg("curve"), py::arg("t_end"), py::arg("snapshot_interval") = 0.01, py::arg("delta_stop") = 1e-3,
        py::arg("error_tol") = 1e-7, py::arg("dt_max") = 1e-2);

  m.def("evolve_axisym", [](const geom::AxisymProfile& p, double t_end, double snapshot_interval, double error_tol,
                            double dt_max) {
    flows::AxisymRunOptions o;
    o.t_end = t_end;
    o.snapshot_interval = snapshot_interval;
    o.dt = policy(error_tol, dt_max);
    flows::ProfileTrace tr;
    {
      py::gil_scoped_release release;
      tr = flows::evolve_axisym(p, o);
    }
    py::dict out = diagnostics_table(tr.diagnostics);
    py::list snaps;
    for (const auto& s : tr.states) snaps.append(s.geometry);
    out["snapshots"] = snaps;
    out["stop_reason"] = tr.stop_reason;
    out["steps"] = tr.step_log.size();
    out["tip_release_time"] = tr.tip_release_time;
    return out;
  }, py::arg("profile"), py::arg("t_end"), py::arg("snapshot_interval") = 0.01, py::arg("error_tol") = 1e-7,
        py::arg("dt_max") = 1e-2);

  py::class_<lab::ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &lab::ScenarioConfig::name)
      .def_readwrite("checks", &lab::ScenarioConfig::checks)
      .def_property_readonly("scenario", [](const lab::ScenarioConfig& c) { return lab::to_string(c.scenario); })
      .def_property_readonly("hash", &lab::config_hash)
      .def("emit", &lab::emit_config)
      .def("__eq__", [](const lab::ScenarioConfig& a, const lab::ScenarioConfig& b) { return a == b; });

  m.def("parse_config", &lab::parse_config, py::arg("text"));
  m.def("load_config", &lab::load_config, py::arg("path"));
  m.def("preset", [](const std::string& s) { return lab::preset(lab::scenario_from_string(s)); }, py::arg("scenario"));
  m.def("known_checks", &lab::known_checks);

  m.def("run_scenario", [](const lab::ScenarioConfig& c, const std::filesystem::path& out_root,
                           const std::filesystem::path& config_dir) {
    lab::RunContext ctx;
    ctx.out_root = out_root;
    ctx.config_dir = config_dir;
    lab::ScenarioReport r;
    {
      py::gil_scoped_release release;
      r = lab::run_scenario(c, ctx);
    }
    return report_dict(r);
  }, py::arg("config"), py::arg("out_root"), py::arg("config_dir") = ".");

  m.def("run_battery", [](const std::string& suite, const std::vector<int>& only, std::uint64_t seed,
                          std::size_t workers) {
    lab::BatteryOptions o;
    o.only = only;
    o.seed = seed;
    o.workers = workers;
    const auto s = lab::suite_from_string(suite);
    std::vector<lab::CriterionResult> rs;
    {
      py::gil_scoped_release release;
      rs = lab::run_battery(s, o);
    }
    py::list out;
    for (const auto& r : rs) {
      py::dict d = check_dict(r.check);
      d["id"] = r.id;
      d["title"] = r.title;
      d["unattainable"] = r.unattainable;
      d["seconds"] = r.seconds;
      out.append(d);
    }
    return out;
  }, py::arg("suite") = "fast", py::arg("only") = std::vector<int>{}, py::arg("seed") = 1, py::arg("workers") = 1);
}
