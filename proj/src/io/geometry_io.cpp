#include "imcf/io/geometry_io.hpp"

#include "imcf/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace imcf::io {

namespace {

struct Header {
  std::map<std::string, std::string> keys;
  std::vector<std::pair<std::size_t, std::string>> records;  // (line number, text)
};

Header read_header(std::istream& is) {
  Header h;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream ss(line.substr(first + 1));
      std::string key, value;
      if (ss >> key >> value && h.records.empty()) h.keys.emplace(key, value);
      continue;
    }
    h.records.emplace_back(n, line);
  }
  return h;
}

const std::string& require(const Header& h, const std::string& key) {
  auto it = h.keys.find(key);
  if (it == h.keys.end()) throw MalformedInput("missing header key '" + key + "'");
  return it->second;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw MalformedInput("");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw MalformedInput("bad " + what + " '" + s + "'");
  }
}

void check_format(const Header& h, const std::string& format, const std::string& dimension) {
  if (require(h, "format") != format)
    throw MalformedInput("expected format " + format + ", found " + require(h, "format"));
  if (require(h, "dimension") != dimension)
    throw MalformedInput("expected dimension " + dimension + ", found " + require(h, "dimension"));
  const std::size_t count = parse_count(require(h, "count"), "count");
  if (count != h.records.size())
    throw MalformedInput("header count " + std::to_string(count) + " but " + std::to_string(h.records.size()) +
                         " records");
}

template <std::size_t K>
std::array<double, K> parse_record(const std::pair<std::size_t, std::string>& rec) {
  std::istringstream ss(rec.second);
  std::array<double, K> v{};
  for (auto& x : v)
    if (!(ss >> x)) throw MalformedInput("line " + std::to_string(rec.first) + ": expected " + std::to_string(K) + " numbers");
  std::string extra;
  if (ss >> extra) throw MalformedInput("line " + std::to_string(rec.first) + ": trailing field '" + extra + "'");
  return v;
}

template <class T, class F>
T load(const std::filesystem::path& path, F&& read) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path.string());
  try {
    return read(in);
  } catch (const MalformedInput& e) {
    throw MalformedInput(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve(std::ostream& os, const geom::SphericalCurve& curve) {
  os << "# format imcf-s2-curve\n# dimension 3\n# count " << curve.size() << "\n";
  const auto& flags = curve.corner_flags();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Vec3& p = curve[i];
    const bool c = i < flags.size() && flags[i];
    os << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << ' ' << (c ? 1 : 0)
       << '\n';
  }
}

geom::SphericalCurve read_curve(std::istream& is) {
  const Header h = read_header(is);
  check_format(h, "imcf-s2-curve", "3");
  std::vector<Vec3> pts;
  std::vector<bool> corners;
  bool any = false;
  for (const auto& rec : h.records) {
    const auto v = parse_record<4>(rec);
    if (v[3] != 0.0 && v[3] != 1.0)
      throw MalformedInput("line " + std::to_string(rec.first) + ": corner flag must be 0 or 1");
    pts.emplace_back(v[0], v[1], v[2]);
    corners.push_back(v[3] == 1.0);
    any = any || corners.back();
  }
  if (!any) corners.clear();
  return geom::SphericalCurve(std::move(pts), std::move(corners));
}

void write_profile(std::ostream& os, const geom::AxisymProfile& profile) {
  os << "# format imcf-rz-profile\n# dimension 2\n# count " << profile.size() << "\n# closed "
     << (profile.closed() ? 1 : 0) << "\n# tip ";
  if (profile.tip_index()) os << *profile.tip_index();
  else os << "none";
  os << '\n';
  for (const auto& p : profile.samples()) os << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
}

geom::AxisymProfile read_profile(std::istream& is) {
  const Header h = read_header(is);
  check_format(h, "imcf-rz-profile", "2");
  const std::string& closed = require(h, "closed");
  if (closed != "0" && closed != "1") throw MalformedInput("closed must be 0 or 1, found '" + closed + "'");
  std::optional<std::size_t> tip;
  if (const std::string& t = require(h, "tip"); t != "none") tip = parse_count(t, "tip index");
  std::vector<Vec2> pts;
  for (const auto& rec : h.records) {
    const auto v = parse_record<2>(rec);
    pts.emplace_back(v[0], v[1]);
  }
  return geom::AxisymProfile(std::move(pts), closed == "1", tip);
}

void write_off(std::ostream& os, const geom::ConvexPolytope& polytope) {
  os << "OFF\n" << polytope.vertices().size() << ' ' << polytope.faces().size() << " 0\n";
  for (const auto& v : polytope.vertices())
    os << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
  for (const auto& f : polytope.faces()) {
    os << f.size();
    for (auto i : f) os << ' ' << i;
    os << '\n';
  }
}

geom::ConvexPolytope read_off(std::istream& is) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(is, line)) {
    if (auto c = line.find('#'); c != std::string::npos) line.resize(c);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
  }
  std::size_t at = 0;
  auto next = [&](const char* what) -> const std::string& {
    if (at >= tokens.size()) throw MalformedInput(std::string("OFF: unexpected end while reading ") + what);
    return tokens[at++];
  };
  auto number = [&](const char* what) {
    const std::string& s = next(what);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw MalformedInput("");
      return v;
    } catch (const std::exception&) {
      throw MalformedInput(std::string("OFF: bad ") + what + " '" + s + "'");
    }
  };
  if (next("header") != "OFF") throw MalformedInput("OFF: missing OFF header");
  const std::size_t nv = parse_count(next("vertex count"), "vertex count");
  const std::size_t nf = parse_count(next("face count"), "face count");
  parse_count(next("edge count"), "edge count");
  std::vector<Vec3> verts(nv);
  for (auto& v : verts) {
    const double x = number("coordinate");
    const double y = number("coordinate");
    const double z = number("coordinate");
    v = Vec3(x, y, z);
  }
  std::vector<std::vector<std::size_t>> faces(nf);
  for (auto& f : faces) {
    const std::size_t k = parse_count(next("face size"), "face size");
    if (k < 3) throw MalformedInput("OFF: face with fewer than 3 vertices");
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t idx = parse_count(next("face index"), "face index");
      if (idx >= nv) throw MalformedInput("OFF: face index " + std::to_string(idx) + " out of range");
      f.push_back(idx);
    }
  }
  if (at != tokens.size()) throw MalformedInput("OFF: trailing data");
  return geom::ConvexPolytope(std::move(verts), std::move(faces));
}

geom::SphericalCurve load_curve(const std::filesystem::path& path) {
  return load<geom::SphericalCurve>(path, [](std::istream& is) { return read_curve(is); });
}

geom::AxisymProfile load_profile(const std::filesystem::path& path) {
  return load<geom::AxisymProfile>(path, [](std::istream& is) { return read_profile(is); });
}

geom::ConvexPolytope load_off(const std::filesystem::path& path) {
  return load<geom::ConvexPolytope>(path, [](std::istream& is) { return read_off(is); });
}

std::vector<std::string> monitor_columns(const std::vector<flows::Diagnostics>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.monitors)
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  return names;
}

void write_trace_csv(std::ostream& os, const std::vector<flows::Diagnostics>& rows) {
  const auto names = monitor_columns(rows);
  os << "step,t,length_or_area,kappa_min,kappa_max,tip_r,tip_z";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (const auto& r : rows) {
    os << r.step << ',' << format_double(r.t) << ',' << format_double(r.measure) << ',' << format_double(r.kappa_min)
       << ',' << format_double(r.kappa_max) << ',' << format_double(r.tip_r) << ',' << format_double(r.tip_z);
    for (const auto& n : names) {
      os << ',';
      auto it = std::find_if(r.monitors.begin(), r.monitors.end(), [&](const auto& m) { return m.first == n; });
      if (it != r.monitors.end()) os << format_double(it->second);
    }
    os << '\n';
  }
}

namespace {

void svg_open(std::ostream& os, double xmin, double ymin, double w, double h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(xmin) << ' ' << format_double(ymin)
     << ' ' << format_double(w) << ' ' << format_double(h) << "\" width=\"600\" height=\""
     << static_cast<int>(600.0 * h / w) << "\">\n";
}

void svg_polyline(std::ostream& os, const std::vector<Vec2>& pts, bool closed, double stroke) {
  os << (closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"black\" stroke-width=\""
     << format_double(stroke) << "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    // SVG y grows downward.
    os << format_double(pts[i].x()) << ',' << format_double(-pts[i].y());
  }
  os << "\"/>\n";
}

}  // namespace

void write_svg(std::ostream& os, const std::vector<geom::SphericalCurve>& curves, const Vec3& view) {
  const auto [e1, e2] = orthonormal_complement(view.normalized());
  svg_open(os, -1.1, -1.1, 2.2, 2.2);
  os << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"gray\" stroke-width=\"0.004\"/>\n";
  for (const auto& c : curves) {
    std::vector<Vec2> pts;
    for (const auto& p : c.points()) pts.emplace_back(p.dot(e1), p.dot(e2));
    svg_polyline(os, pts, true, 0.006);
  }
  os << "</svg>\n";
}

void write_svg(std::ostream& os, const std::vector<geom::AxisymProfile>& profiles) {
  double rmax = 1e-9, zmin = 1e300, zmax = -1e300;
  for (const auto& p : profiles)
    for (const auto& s : p.samples()) {
      rmax = std::max(rmax, s.x());
      zmin = std::min(zmin, s.y());
      zmax = std::max(zmax, s.y());
    }
  if (profiles.empty()) zmin = zmax = 0.0;
  const double pad = 0.05 * std::max(2.0 * rmax, zmax - zmin);
  const double w = 2.0 * rmax + 2.0 * pad;
  const double h = std::max(zmax - zmin, 1e-9) + 2.0 * pad;
  svg_open(os, -rmax - pad, -zmax - pad, w, h);
  const double stroke = 0.003 * std::max(w, h);
  for (const auto& p : profiles) {
    std::vector<Vec2> pts(p.samples().begin(), p.samples().end());
    std::vector<Vec2> mirror;
    for (auto it = p.samples().rbegin(); it != p.samples().rend(); ++it) mirror.emplace_back(-it->x(), it->y());
    if (p.closed()) {
      pts.insert(pts.end(), mirror.begin(), mirror.end());
      svg_polyline(os, pts, true, stroke);
    } else {
      svg_polyline(os, pts, false, stroke);
      svg_polyline(os, mirror, false, stroke);
    }
  }
  os << "</svg>\n";
}

}  // namespace imcf::io
