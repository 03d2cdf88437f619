#include "imcf/polytope.hpp"

#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace imcf::geom {

ConvexPolytope::ConvexPolytope(std::vector<Vec3> vertices, std::vector<std::vector<std::size_t>> faces,
                               bool allow_flat_vertices, double tolerance)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), tolerance_(tolerance) {
  if (vertices_.size() < 4 && !allow_flat_vertices) throw MalformedInput("polytope needs at least 4 vertices");
  if (faces_.size() < 2) throw MalformedInput("polytope needs at least 2 faces");

  double scale = 0.0;
  for (const auto& v : vertices_) scale = std::max(scale, v.norm());
  const double tol = tolerance_ * std::max(scale, 1.0);

  std::set<std::pair<std::size_t, std::size_t>> edge_set;
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    if (face.size() < 3) throw MalformedInput("face " + std::to_string(f) + " has fewer than 3 vertices");
    for (auto idx : face)
      if (idx >= vertices_.size()) throw MalformedInput("face " + std::to_string(f) + " references a missing vertex");
    // Newell normal.
    Vec3 n = Vec3::Zero();
    for (std::size_t k = 0; k < face.size(); ++k) {
      const Vec3& a = vertices_[face[k]];
      const Vec3& b = vertices_[face[(k + 1) % face.size()]];
      n += a.cross(b);
    }
    if (n.norm() <= tol) throw MalformedInput("face " + std::to_string(f) + " has zero area");
    n.normalize();
    double d = 0.0;
    for (auto idx : face) d += n.dot(vertices_[idx]);
    d /= static_cast<double>(face.size());
    for (auto idx : face)
      if (std::abs(n.dot(vertices_[idx]) - d) > tol) throw MalformedInput("face " + std::to_string(f) + " is not planar");
    normals_.push_back(n);
    offsets_.push_back(d);
    for (std::size_t k = 0; k < face.size(); ++k) {
      const std::size_t a = face[k];
      const std::size_t b = face[(k + 1) % face.size()];
      if (++directed[{a, b}] > 1) throw MalformedInput("edge traversed twice in the same direction");
      edge_set.insert({std::min(a, b), std::max(a, b)});
    }
  }
  for (const auto& [key, count] : directed) {
    if (!directed.count({key.second, key.first})) throw MalformedInput("face complex is not closed");
  }
  edges_.assign(edge_set.begin(), edge_set.end());

  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (const auto& v : vertices_) {
      if (normals_[f].dot(v) > offsets_[f] + tol)
        throw MalformedInput("face " + std::to_string(f) + " is not outward oriented or the body is not convex");
    }
  }

  const long euler = static_cast<long>(vertices_.size()) - static_cast<long>(edges_.size()) +
                     static_cast<long>(faces_.size());
  if (euler != 2) throw MalformedInput("face complex has Euler characteristic " + std::to_string(euler));

  if (!allow_flat_vertices) {
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (is_flat_vertex(v)) throw MalformedInput("vertex " + std::to_string(v) + " is not an extreme point");
    }
  }
}

Vec3 ConvexPolytope::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

std::vector<std::size_t> ConvexPolytope::faces_containing(const Vec3& p) const {
  double scale = std::max(p.norm(), 1.0);
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    if (std::abs(normals_[f].dot(p) - offsets_[f]) <= tolerance_ * scale * 10.0) out.push_back(f);
  return out;
}

std::vector<std::size_t> ConvexPolytope::faces_around_vertex(std::size_t v) const {
  // For a face traversed ... -> prev -> v -> next -> ..., the face across the
  // edge (v, next) traverses it as next -> v, so there `prev` equals our `next`.
  std::map<std::size_t, std::size_t> by_prev;
  std::map<std::size_t, std::size_t> next_of;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (std::size_t k = 0; k < face.size(); ++k) {
      if (face[k] != v) continue;
      const std::size_t prev = face[(k + face.size() - 1) % face.size()];
      const std::size_t next = face[(k + 1) % face.size()];
      by_prev[prev] = f;
      next_of[f] = next;
    }
  }
  std::vector<std::size_t> ring;
  if (next_of.empty()) return ring;
  std::size_t f = next_of.begin()->first;
  for (std::size_t guard = 0; guard <= next_of.size(); ++guard) {
    ring.push_back(f);
    auto it = by_prev.find(next_of[f]);
    if (it == by_prev.end()) throw MalformedInput("vertex neighbourhood is not a closed fan");
    f = it->second;
    if (f == ring.front()) break;
  }
  if (ring.size() != next_of.size()) throw MalformedInput("vertex neighbourhood is not a single fan");
  return ring;
}

bool ConvexPolytope::is_flat_vertex(std::size_t v) const {
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (std::find(faces_[f].begin(), faces_[f].end(), v) != faces_[f].end())
      scatter += normals_[f] * normals_[f].transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(scatter);
  return es.eigenvalues()(0) < 1e-10;
}

ConvexPolytope unit_cube() {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // Index = x + 2y + 4z. Faces counterclockwise seen from outside.
  std::vector<std::vector<std::size_t>> f = {
      {0, 2, 3, 1},  // z = 0
      {4, 5, 7, 6},  // z = 1
      {0, 1, 5, 4},  // y = 0
      {2, 6, 7, 3},  // y = 1
      {0, 4, 6, 2},  // x = 0
      {1, 3, 7, 5},  // x = 1
  };
  return ConvexPolytope(std::move(v), std::move(f));
}

ConvexPolytope regular_tetrahedron() {
  const double s = 1.0 / (2.0 * std::sqrt(2.0));
  std::vector<Vec3> v = {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)};
  std::vector<std::vector<std::size_t>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return ConvexPolytope(std::move(v), std::move(f));
}

ConvexPolytope regular_octahedron() {
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<Vec3> v = {Vec3(a, 0, 0), Vec3(-a, 0, 0), Vec3(0, a, 0), Vec3(0, -a, 0), Vec3(0, 0, a), Vec3(0, 0, -a)};
  std::vector<std::vector<std::size_t>> f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return ConvexPolytope(std::move(v), std::move(f));
}

ConvexPolytope cube_with_face_centre_vertex() {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  v.emplace_back(0.5, 0.5, 1.0);  // index 8
  std::vector<std::vector<std::size_t>> f = {
      {0, 2, 3, 1}, {4, 5, 8}, {5, 7, 8}, {7, 6, 8}, {6, 4, 8},
      {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5},
  };
  return ConvexPolytope(std::move(v), std::move(f), true);
}

ConvexPolytope degenerate_square() {
  std::vector<Vec3> v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  std::vector<std::vector<std::size_t>> f = {{0, 1, 2, 3}, {3, 2, 1, 0}};
  return ConvexPolytope(std::move(v), std::move(f), true);
}

}  // namespace imcf::geom
