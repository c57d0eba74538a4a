#pragma once

#include <Eigen/Geometry>

#include "conjmatch/contour.hpp"
#include "conjmatch/errors.hpp"
#include "conjmatch/trimesh.hpp"

namespace conjmatch {

using Quat = Eigen::Quaterniond;

/// Right-handed orthonormal frame: columns are (edge direction, outward
/// normal, their cross product).
struct LocalFrame {
  Vec3 origin;
  Eigen::Matrix3d axes;
};

namespace detail {

inline LocalFrame makeFrame(const Vec3& origin, const Vec3& edge_dir, const Vec3& normal_hint) {
  const double len = edge_dir.norm();
  if (len < 1e-300) throw DegenerateFrame("zero-length edge");
  const Vec3 t = edge_dir / len;
  Vec3 n = normal_hint - normal_hint.dot(t) * t;  // orthogonalise against the edge
  const double nlen = n.norm();
  if (nlen < 1e-12) {
    // normal parallel to the edge; pick a deterministic perpendicular
    int least = 0;
    for (int a = 1; a < 3; ++a)
      if (std::abs(t[a]) < std::abs(t[least])) least = a;
    n = Vec3::Unit(least).cross(t);
    n.normalize();
  } else {
    n /= nlen;
  }
  LocalFrame f;
  f.origin = origin;
  f.axes.col(0) = t;
  f.axes.col(1) = n;
  f.axes.col(2) = t.cross(n);
  return f;
}

}  // namespace detail

/// Frame of a contour edge, embedded at z=0: direction in-plane, outward edge
/// normal in-plane, binormal +z (for a counter-clockwise contour).
inline LocalFrame contourEdgeFrame(const Contour& c, int edge) {
  const Vec2 a = c.vertex(c.edgeFrom(edge));
  const Vec2 d2 = c.edgeVector(edge);
  const Vec2 n2 = c.edgeNormal(edge);
  return detail::makeFrame(Vec3(a.x(), a.y(), 0.0), Vec3(d2.x(), d2.y(), 0.0),
                           Vec3(n2.x(), n2.y(), 0.0));
}

/// Frame of a directed mesh edge; the outward normal hint is the mean of the
/// endpoint vertex normals.
inline LocalFrame meshEdgeFrame(const TriMesh& mesh, int directed_edge) {
  const int a = mesh.edgeFrom(directed_edge);
  const int b = mesh.edgeTo(directed_edge);
  const Vec3 hint = mesh.vertexNormal(a) + mesh.vertexNormal(b);
  return detail::makeFrame(mesh.vertex(a), mesh.edgeVector(directed_edge), hint);
}

/// Rotation aligning a 2D-edge frame to a 3D-edge frame. For two orthonormal
/// frames the orthogonal Procrustes solution is exactly F3d * F2d^T. Returned
/// as a unit quaternion with nonnegative scalar part.
inline Quat frameRotation(const LocalFrame& frame2d, const LocalFrame& frame3d) {
  const Eigen::Matrix3d rot = frame3d.axes * frame2d.axes.transpose();
  Quat q(rot);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

inline Quat frameRotation(const Contour& c, int contour_edge, const TriMesh& mesh,
                          int mesh_directed_edge) {
  return frameRotation(contourEdgeFrame(c, contour_edge), meshEdgeFrame(mesh, mesh_directed_edge));
}

/// Geodesic-style quaternion distance arccos(|<q1,q2>|); the absolute value
/// folds the double cover so q and -q are the same rotation.
inline double quaternionAngle(const Quat& q1, const Quat& q2) {
  const double dot = std::abs(q1.coeffs().dot(q2.coeffs()));
  return std::acos(std::clamp(dot, 0.0, 1.0));
}

}  // namespace conjmatch
