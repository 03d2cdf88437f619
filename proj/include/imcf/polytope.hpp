#pragma once

#include "imcf/sphere_math.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace imcf::geom {

/// Convex body in R^3 given by vertices and outward (counterclockwise seen
/// from outside) faces.
///
/// Construction checks planarity, outward orientation and Euler
/// characteristic 2. Every vertex must be an extreme point unless
/// `allow_flat_vertices` is set, which admits vertices lying inside a face or
/// an edge (used to probe flat tangent cones).
class ConvexPolytope {
 public:
  ConvexPolytope() = default;
  ConvexPolytope(std::vector<Vec3> vertices, std::vector<std::vector<std::size_t>> faces,
                 bool allow_flat_vertices = false, double tolerance = 1e-9);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::vector<std::size_t>>& faces() const { return faces_; }
  const std::vector<Vec3>& face_normals() const { return normals_; }
  /// Plane offsets: face f is { x : normal_f . x = offset_f }, body is normal_f . x <= offset_f.
  const std::vector<double>& face_offsets() const { return offsets_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  double tolerance() const { return tolerance_; }

  Vec3 centroid() const;
  /// Faces whose plane contains p (within tolerance).
  std::vector<std::size_t> faces_containing(const Vec3& p) const;
  /// Faces incident to vertex v in cyclic order around it.
  std::vector<std::size_t> faces_around_vertex(std::size_t v) const;
  /// True when the incident face normals at v do not span R^3.
  bool is_flat_vertex(std::size_t v) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::vector<std::size_t>> faces_;
  std::vector<Vec3> normals_;
  std::vector<double> offsets_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  double tolerance_ = 1e-9;
};

/// Unit cube [0,1]^3.
ConvexPolytope unit_cube();
/// Regular tetrahedron with unit edges.
ConvexPolytope regular_tetrahedron();
/// Regular octahedron with unit edges.
ConvexPolytope regular_octahedron();
/// Unit cube whose top face is split into four triangles around an extra
/// vertex at its centre. That vertex has a flat tangent cone.
ConvexPolytope cube_with_face_centre_vertex();
/// Flat unit square with two opposite faces and no interior.
ConvexPolytope degenerate_square();

}  // namespace imcf::geom
