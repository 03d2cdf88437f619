#include "imcf/lab/config.hpp"

#include "imcf/error.hpp"
#include "imcf/sphere_math.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace imcf::lab {

namespace {

constexpr const char* kScenarioNames[] = {"latitude_circle", "round_cone", "cube_link",      "tetra_link",    "ice_cream_cone",
                                          "sphere",          "wedge",      "custom_curve",   "custom_profile"};

/// Mapping node with typed accessors; every key must be consumed.
class Block {
 public:
  Block(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) throw UsageError(where() + "expected a mapping");
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  Block block(const std::string& key) {
    seen_.insert(key);
    const YAML::Node n = node_[key];
    if (!n) throw UsageError(field(key) + ": missing block");
    return Block(n, field(key));
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  template <class T>
  T require(const std::string& key) {
    auto v = get<T>(key);
    if (!v) throw UsageError(field(key) + ": required");
    return *v;
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    seen_.insert(key);
    const YAML::Node n = node_[key];
    if (!n || n.IsNull()) return std::nullopt;
    return convert<T>(n, field(key));
  }

  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw UsageError(field(key) + ": unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  template <class T>
  static T convert(const YAML::Node& n, const std::string& path) {
    if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<std::string>>) {
      if (!n.IsSequence()) throw UsageError(path + ": expected a list");
      T out;
      for (std::size_t i = 0; i < n.size(); ++i)
        out.push_back(convert<typename T::value_type>(n[i], path + "[" + std::to_string(i) + "]"));
      return out;
    } else {
      if (!n.IsScalar()) throw UsageError(path + ": expected a scalar");
      try {
        if constexpr (std::is_same_v<T, double>) {
          const double v = n.as<double>();
          if (!std::isfinite(v)) throw UsageError(path + ": must be finite");
          return v;
        } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
          const std::string s = n.Scalar();
          if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError(path + ": expected a nonnegative integer, found '" + s + "'");
          return n.as<T>();
        } else {
          return n.as<T>();
        }
      } catch (const YAML::BadConversion&) {
        throw UsageError(path + ": cannot read '" + n.Scalar() + "'");
      }
    }
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto enum_field(const std::string& path, const std::string& value, F&& parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

bool is_profile(Scenario s) {
  return s == Scenario::ice_cream_cone || s == Scenario::sphere || s == Scenario::custom_profile;
}

void check_path(const std::string& field, const std::string& p) {
  if (p.empty()) throw UsageError(field + ": empty path");
  const std::filesystem::path path(p);
  if (path.is_absolute()) throw UsageError(field + ": must be relative to the scenario output directory");
  for (const auto& part : path)
    if (part == "..") throw UsageError(field + ": must stay inside the scenario output directory");
}

void positive(const std::string& field, double v) {
  if (!(v > 0.0)) throw UsageError(field + ": must be positive");
}

void in_open(const std::string& field, double v, double lo, double hi) {
  if (!(v > lo && v < hi))
    throw UsageError(field + ": must lie in (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

template <class T>
const T& need(const std::optional<T>& v, const std::string& field, Scenario s) {
  if (!v) throw UsageError(field + ": required for scenario " + to_string(s));
  return *v;
}

}  // namespace

std::string to_string(Scenario s) { return kScenarioNames[static_cast<int>(s)]; }

Scenario scenario_from_string(const std::string& s) {
  for (int i = 0; i < 9; ++i)
    if (s == kScenarioNames[i]) return static_cast<Scenario>(i);
  throw UsageError("unknown scenario '" + s + "'");
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    for (int i = 0; i < 9; ++i) v.push_back(static_cast<Scenario>(i));
    return v;
  }();
  return all;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "measure_law", "equator_time",     "great_circle_residual", "nesting",    "smoothing_time",
      "cone_exact",  "maximal_time",     "cd_monitor",            "cone_angle", "tip_waiting_time",
      "h_residual",  "wedge_classify",   "area_comparison",       "splitting"};
  return names;
}

std::vector<std::string> default_checks(Scenario s) {
  switch (s) {
    case Scenario::latitude_circle:
      return {"measure_law", "equator_time", "great_circle_residual"};
    case Scenario::round_cone:
      return {"measure_law", "cone_exact", "maximal_time"};
    case Scenario::cube_link:
    case Scenario::tetra_link:
      return {"measure_law", "equator_time", "nesting", "smoothing_time"};
    case Scenario::ice_cream_cone:
      return {"measure_law", "cone_angle", "tip_waiting_time"};
    case Scenario::sphere:
      return {"measure_law", "h_residual", "cd_monitor"};
    case Scenario::wedge:
      return {"wedge_classify", "area_comparison", "splitting"};
    case Scenario::custom_curve:
      return {"measure_law", "equator_time"};
    case Scenario::custom_profile:
      return {"measure_law"};
  }
  return {};
}

ScenarioConfig preset(Scenario s) {
  ScenarioConfig c;
  c.name = to_string(s);
  c.scenario = s;
  auto& g = c.geometry;
  auto& sv = c.solver;
  switch (s) {
    case Scenario::latitude_circle:
      g.colatitude_rad = kPi / 6.0;
      sv.t_end = 1.0;
      sv.delta_stop = 2e-7;
      break;
    case Scenario::round_cone:
      g.cone_angle_rad = kPi / 3.0;
      sv.t_end = 0.6;
      break;
    case Scenario::cube_link:
    case Scenario::tetra_link:
      sv.samples = 512;
      sv.t_end = 0.25;
      sv.richardson_order = 2;
      c.epsilon_schedule.epsilons = {0.08, 0.04, 0.02};
      break;
    case Scenario::ice_cream_cone:
      g.cone_angle_rad = kPi / 3.0;
      g.slant_length = 1.0;
      sv.samples = 8192;
      sv.t_end = 0.85;
      break;
    case Scenario::sphere:
      g.radius = 1.0;
      sv.samples = 512;
      sv.t_end = 0.1;
      c.outputs.snapshot_interval = 0.002;
      break;
    case Scenario::wedge:
      g.dihedral_angle_rad = kPi / 2.0;
      break;
    case Scenario::custom_curve:
      g.file = "curve.txt";
      break;
    case Scenario::custom_profile:
      g.file = "profile.txt";
      break;
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  if (c.name.empty()) throw UsageError("name: required");
  if (c.name.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_.-") !=
          std::string::npos ||
      c.name == "." || c.name == "..")
    throw UsageError("name: only letters, digits, '_', '.' and '-' are allowed");

  const Scenario s = c.scenario;
  const auto& g = c.geometry;
  switch (s) {
    case Scenario::latitude_circle:
      in_open("geometry.colatitude_rad", need(g.colatitude_rad, "geometry.colatitude_rad", s), 0.0, kPi / 2.0);
      break;
    case Scenario::round_cone:
      in_open("geometry.cone_angle_rad", need(g.cone_angle_rad, "geometry.cone_angle_rad", s), 0.0, kPi / 2.0);
      break;
    case Scenario::ice_cream_cone:
      in_open("geometry.cone_angle_rad", need(g.cone_angle_rad, "geometry.cone_angle_rad", s), 0.0, kPi / 2.0);
      positive("geometry.slant_length", need(g.slant_length, "geometry.slant_length", s));
      break;
    case Scenario::sphere:
      positive("geometry.radius", need(g.radius, "geometry.radius", s));
      if (g.polar_radius) positive("geometry.polar_radius", *g.polar_radius);
      break;
    case Scenario::wedge:
      in_open("geometry.dihedral_angle_rad", need(g.dihedral_angle_rad, "geometry.dihedral_angle_rad", s), 0.0, kPi);
      break;
    case Scenario::custom_curve:
    case Scenario::custom_profile:
      if (need(g.file, "geometry.file", s).empty()) throw UsageError("geometry.file: empty path");
      break;
    case Scenario::cube_link:
    case Scenario::tetra_link:
      break;
  }

  const auto& sv = c.solver;
  if (sv.samples < 16) throw UsageError("solver.samples: must be at least 16");
  if (!(sv.t_end >= 0.0)) throw UsageError("solver.t_end: must be nonnegative");
  in_open("solver.delta_stop", sv.delta_stop, 0.0, 1.0);
  in_open("solver.safety", sv.dt.safety, 0.0, 1e6);
  positive("solver.dt_initial", sv.dt.dt_initial);
  positive("solver.dt_max", sv.dt.dt_max);
  positive("solver.dt_min", sv.dt.dt_min);
  if (sv.dt.dt_min > sv.dt.dt_max) throw UsageError("solver.dt_min: exceeds solver.dt_max");
  positive("solver.error_tol", sv.dt.error_tol);
  if (!(sv.dt.curvature_floor >= 0.0)) throw UsageError("solver.curvature_floor: must be nonnegative");
  if (sv.dt.max_steps == 0) throw UsageError("solver.max_steps: must be positive");
  if (sv.release_time && !(*sv.release_time >= 0.0)) throw UsageError("solver.release_time: must be nonnegative");
  in_open("solver.release_angle_rad", sv.release_angle_rad, 0.0, kPi / 2.0);
  positive("solver.tip_window", sv.tip_window);
  positive("solver.smooth_window", sv.smooth_window);
  if (sv.richardson_order != 1 && sv.richardson_order != 2) throw UsageError("solver.richardson_order: must be 1 or 2");

  const bool weak = !c.epsilon_schedule.epsilons.empty();
  if (weak) {
    try {
      c.epsilon_schedule.validate();
    } catch (const Error& e) {
      throw UsageError(std::string("epsilon_schedule.epsilons: ") + e.what());
    }
    if (c.epsilon_schedule.epsilons.size() < static_cast<std::size_t>(c.solver.richardson_order) + 1)
      throw UsageError("epsilon_schedule.epsilons: richardson order " + std::to_string(c.solver.richardson_order) +
                       " needs " + std::to_string(c.solver.richardson_order + 1) + " entries");
  }
  if (weak && (is_profile(s) || s == Scenario::wedge))
    throw UsageError("epsilon_schedule: not supported for scenario " + to_string(s));
  if (!weak && (s == Scenario::cube_link || s == Scenario::tetra_link))
    throw UsageError("epsilon_schedule.epsilons: required for scenario " + to_string(s));

  const auto& o = c.outputs;
  check_path("outputs.trace", o.trace);
  check_path("outputs.report", o.report);
  check_path("outputs.summary", o.summary);
  check_path("outputs.snapshot_dir", o.snapshot_dir);
  positive("outputs.snapshot_interval", o.snapshot_interval);
  if (c.workers == 0) throw UsageError("workers: must be at least 1");

  const auto& known = known_checks();
  for (std::size_t i = 0; i < c.checks.size(); ++i)
    if (std::find(known.begin(), known.end(), c.checks[i]) == known.end())
      throw UsageError("checks[" + std::to_string(i) + "]: unknown check '" + c.checks[i] + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw UsageError(std::string("config: not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw UsageError("config: empty document");
  Block top(root, "");

  ScenarioConfig c;
  c.scenario = enum_field("scenario", top.require<std::string>("scenario"), scenario_from_string);
  c.name = top.get<std::string>("name").value_or(to_string(c.scenario));

  {
    Block g = top.block("geometry");
    g.read("colatitude_rad", c.geometry.colatitude_rad);
    g.read("cone_angle_rad", c.geometry.cone_angle_rad);
    g.read("slant_length", c.geometry.slant_length);
    g.read("radius", c.geometry.radius);
    g.read("polar_radius", c.geometry.polar_radius);
    g.read("dihedral_angle_rad", c.geometry.dihedral_angle_rad);
    g.read("file", c.geometry.file);
    g.finish();
  }
  if (top.has("solver")) {
    Block b = top.block("solver");
    auto& sv = c.solver;
    b.read("samples", sv.samples);
    if (auto v = b.get<std::string>("scheme"))
      sv.dt.scheme = enum_field(b.field("scheme"), *v, flows::time_scheme_from_string);
    b.read("safety", sv.dt.safety);
    b.read("dt_initial", sv.dt.dt_initial);
    b.read("dt_max", sv.dt.dt_max);
    b.read("dt_min", sv.dt.dt_min);
    b.read("error_tol", sv.dt.error_tol);
    b.read("adaptive", sv.dt.adaptive);
    b.read("curvature_floor", sv.dt.curvature_floor);
    b.read("max_steps", sv.dt.max_steps);
    b.read("t_end", sv.t_end);
    b.read("delta_stop", sv.delta_stop);
    if (auto v = b.get<std::string>("tip_release"))
      sv.tip_release = enum_field(b.field("tip_release"), *v, flows::tip_release_from_string);
    b.read("release_time", sv.release_time);
    b.read("release_angle_rad", sv.release_angle_rad);
    b.read("tip_window", sv.tip_window);
    b.read("smooth_window", sv.smooth_window);
    b.read("richardson_order", sv.richardson_order);
    b.finish();
  }
  if (top.has("epsilon_schedule")) {
    Block b = top.block("epsilon_schedule");
    b.read("epsilons", c.epsilon_schedule.epsilons);
    if (auto v = b.get<std::string>("rounding_rule"))
      c.epsilon_schedule.rounding_rule = enum_field(b.field("rounding_rule"), *v, flows::rounding_rule_from_string);
    b.finish();
  }
  if (top.has("outputs")) {
    Block b = top.block("outputs");
    auto& o = c.outputs;
    b.read("trace", o.trace);
    b.read("snapshot_interval", o.snapshot_interval);
    b.read("report", o.report);
    b.read("summary", o.summary);
    b.read("snapshot_dir", o.snapshot_dir);
    b.read("svg", o.svg);
    b.finish();
  }
  top.read("seed", c.seed);
  top.read("workers", c.workers);
  top.read("checks", c.checks);
  top.finish();
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const UsageError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

std::string emit_config(const ScenarioConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "scenario" << YAML::Value << to_string(c.scenario);

  out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) out << YAML::Key << key << YAML::Value << *v;
  };
  opt("colatitude_rad", c.geometry.colatitude_rad);
  opt("cone_angle_rad", c.geometry.cone_angle_rad);
  opt("slant_length", c.geometry.slant_length);
  opt("radius", c.geometry.radius);
  opt("polar_radius", c.geometry.polar_radius);
  opt("dihedral_angle_rad", c.geometry.dihedral_angle_rad);
  if (c.geometry.file) out << YAML::Key << "file" << YAML::Value << *c.geometry.file;
  out << YAML::EndMap;

  const auto& sv = c.solver;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "samples" << YAML::Value << sv.samples;
  out << YAML::Key << "scheme" << YAML::Value << flows::to_string(sv.dt.scheme);
  out << YAML::Key << "safety" << YAML::Value << sv.dt.safety;
  out << YAML::Key << "dt_initial" << YAML::Value << sv.dt.dt_initial;
  out << YAML::Key << "dt_max" << YAML::Value << sv.dt.dt_max;
  out << YAML::Key << "dt_min" << YAML::Value << sv.dt.dt_min;
  out << YAML::Key << "error_tol" << YAML::Value << sv.dt.error_tol;
  out << YAML::Key << "adaptive" << YAML::Value << sv.dt.adaptive;
  out << YAML::Key << "curvature_floor" << YAML::Value << sv.dt.curvature_floor;
  out << YAML::Key << "max_steps" << YAML::Value << sv.dt.max_steps;
  out << YAML::Key << "t_end" << YAML::Value << sv.t_end;
  out << YAML::Key << "delta_stop" << YAML::Value << sv.delta_stop;
  out << YAML::Key << "tip_release" << YAML::Value << flows::to_string(sv.tip_release);
  opt("release_time", sv.release_time);
  out << YAML::Key << "release_angle_rad" << YAML::Value << sv.release_angle_rad;
  out << YAML::Key << "tip_window" << YAML::Value << sv.tip_window;
  out << YAML::Key << "smooth_window" << YAML::Value << sv.smooth_window;
  out << YAML::Key << "richardson_order" << YAML::Value << sv.richardson_order;
  out << YAML::EndMap;

  if (!c.epsilon_schedule.epsilons.empty()) {
    out << YAML::Key << "epsilon_schedule" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "epsilons" << YAML::Value << YAML::Flow << c.epsilon_schedule.epsilons;
    out << YAML::Key << "rounding_rule" << YAML::Value << flows::to_string(c.epsilon_schedule.rounding_rule);
    out << YAML::EndMap;
  }

  const auto& o = c.outputs;
  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "trace" << YAML::Value << o.trace;
  out << YAML::Key << "snapshot_interval" << YAML::Value << o.snapshot_interval;
  out << YAML::Key << "report" << YAML::Value << o.report;
  out << YAML::Key << "summary" << YAML::Value << o.summary;
  out << YAML::Key << "snapshot_dir" << YAML::Value << o.snapshot_dir;
  out << YAML::Key << "svg" << YAML::Value << o.svg;
  out << YAML::EndMap;

  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  if (!c.checks.empty()) out << YAML::Key << "checks" << YAML::Value << YAML::Flow << c.checks;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::uint64_t config_hash(const ScenarioConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : emit_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace imcf::lab
