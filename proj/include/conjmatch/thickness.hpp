#pragma once

#include <optional>

#include "conjmatch/contour.hpp"
#include "conjmatch/geodesic.hpp"
#include "conjmatch/trimesh.hpp"

namespace conjmatch {

struct RayHit {
  double t;             // ray parameter of the hit
  Vec3 barycentric;     // w.r.t. the triangle's three vertices
};

/// Moeller-Trumbore ray-triangle intersection. Returns the hit with the
/// smallest t > eps_ray, accepting points within eps_bary outside an edge.
inline std::optional<RayHit> rayTriangleIntersect(const Vec3& origin, const Vec3& dir,
                                                  const Vec3& v0, const Vec3& v1, const Vec3& v2,
                                                  double eps_ray = 1e-12,
                                                  double eps_bary = 1e-12) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;  // parallel to the plane
  const double invDet = 1.0 / det;
  const Vec3 s = origin - v0;
  const double u = s.dot(p) * invDet;
  if (u < -eps_bary || u > 1.0 + eps_bary) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * invDet;
  if (v < -eps_bary || u + v > 1.0 + eps_bary) return std::nullopt;
  const double t = e2.dot(q) * invDet;
  if (t <= eps_ray) return std::nullopt;
  return RayHit{t, Vec3(1.0 - u - v, u, v)};
}

/// Per-vertex local thickness: distance along the inverted vertex normal to
/// the first intersection with the rest of the shape. Vertices whose ray
/// misses carry the shape's graph-geodesic diameter and hit=false, which the
/// saturating data loss treats as "very different".
struct ThicknessField {
  std::vector<double> value;
  std::vector<char> hit;

  int size() const { return static_cast<int>(value.size()); }
};

inline ThicknessField thickness2d(const Contour& c) {
  const int m = c.numVertices();
  const double epsRay = 1e-6 * c.bboxDiagonal();
  ThicknessField field;
  field.value.assign(m, 0.0);
  field.hit.assign(m, 0);
  const double fallback = c.graphDiameter();
  for (int i = 0; i < m; ++i) {
    const Vec2 origin = c.vertex(i);
    const Vec2 dir = -c.vertexNormal(i);
    double best = kInf;
    for (int e = 0; e < c.numEdges(); ++e) {
      if (c.edgeFrom(e) == i || c.edgeTo(e) == i) continue;
      // ray/segment intersection: origin + t*dir = a + s*(b-a)
      const Vec2 a = c.vertex(c.edgeFrom(e));
      const Vec2 b = c.vertex(c.edgeTo(e));
      const Vec2 ab = b - a;
      const double det = dir.x() * (-ab.y()) - dir.y() * (-ab.x());
      if (std::abs(det) < 1e-300) continue;
      const Vec2 rhs = a - origin;
      const double t = (rhs.x() * (-ab.y()) - rhs.y() * (-ab.x())) / det;
      const double s = (dir.x() * rhs.y() - dir.y() * rhs.x()) / det;
      if (t > epsRay && s >= -1e-12 && s <= 1.0 + 1e-12) best = std::min(best, t);
    }
    if (best < kInf) {
      field.value[i] = best;
      field.hit[i] = 1;
    } else {
      field.value[i] = fallback;
    }
  }
  return field;
}

namespace detail {

/// Axis-aligned BVH over mesh faces, median split. Used as an accelerator for
/// the brute-force closest-hit query; both must return identical results.
class FaceBvh {
 public:
  explicit FaceBvh(const TriMesh& mesh) : mesh_(&mesh) {
    // boxes are padded because the triangle test accepts hits marginally
    // outside a face; a tight box could prune the winning face
    pad_ = 1e-9 * mesh.bboxDiagonal();
    const int nf = mesh.numFaces();
    faceIds_.resize(nf);
    for (int f = 0; f < nf; ++f) faceIds_[f] = f;
    if (nf > 0) root_ = build(0, nf);
  }

  template <class Skip>
  std::optional<std::pair<int, RayHit>> closestHit(const Vec3& origin, const Vec3& dir,
                                                   double eps_ray, Skip skip) const {
    std::optional<std::pair<int, RayHit>> best;
    if (root_ >= 0) query(root_, origin, dir, eps_ray, skip, best);
    return best;
  }

 private:
  struct Node {
    Vec3 lo, hi;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range in faceIds_
  };

  Vec3 faceCentroid(int f) const {
    const auto& t = mesh_->face(f);
    return (mesh_->vertex(t[0]) + mesh_->vertex(t[1]) + mesh_->vertex(t[2])) / 3.0;
  }

  int build(int begin, int end) {
    Node node;
    node.lo = Vec3::Constant(kInf);
    node.hi = Vec3::Constant(-kInf);
    for (int k = begin; k < end; ++k) {
      const auto& t = mesh_->face(faceIds_[k]);
      for (int j = 0; j < 3; ++j) {
        node.lo = node.lo.cwiseMin(mesh_->vertex(t[j]));
        node.hi = node.hi.cwiseMax(mesh_->vertex(t[j]));
      }
    }
    node.lo -= Vec3::Constant(pad_);
    node.hi += Vec3::Constant(pad_);
    if (end - begin <= 4) {
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    int axis = 0;
    const Vec3 extent = node.hi - node.lo;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;
    const int mid = (begin + end) / 2;
    std::nth_element(faceIds_.begin() + begin, faceIds_.begin() + mid, faceIds_.begin() + end,
                     [&](int a, int b) { return faceCentroid(a)[axis] < faceCentroid(b)[axis]; });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  bool hitBox(const Node& n, const Vec3& origin, const Vec3& dir, double tmax) const {
    double t0 = 0.0, t1 = tmax;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(dir[a]) < 1e-300) {
        if (origin[a] < n.lo[a] - 1e-12 || origin[a] > n.hi[a] + 1e-12) return false;
        continue;
      }
      double ta = (n.lo[a] - origin[a]) / dir[a];
      double tb = (n.hi[a] - origin[a]) / dir[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    return t0 <= t1 + 1e-12;
  }

  template <class Skip>
  void query(int id, const Vec3& origin, const Vec3& dir, double eps_ray, Skip skip,
             std::optional<std::pair<int, RayHit>>& best) const {
    const Node& n = nodes_[id];
    const double tmax = best ? best->second.t : kInf;
    if (!hitBox(n, origin, dir, tmax)) return;
    if (n.left < 0) {
      for (int k = n.begin; k < n.end; ++k) {
        const int f = faceIds_[k];
        if (skip(f)) continue;
        const auto& t = mesh_->face(f);
        auto hit = rayTriangleIntersect(origin, dir, mesh_->vertex(t[0]), mesh_->vertex(t[1]),
                                        mesh_->vertex(t[2]), eps_ray);
        // tie-break on face id so BVH and brute force agree exactly
        if (hit && (!best || hit->t < best->second.t ||
                    (hit->t == best->second.t && f < best->first)))
          best = {f, *hit};
      }
      return;
    }
    query(n.left, origin, dir, eps_ray, skip, best);
    query(n.right, origin, dir, eps_ray, skip, best);
  }

  const TriMesh* mesh_;
  double pad_ = 0.0;
  mutable std::vector<int> faceIds_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Largest finite graph distance; tolerates disconnected meshes (only used
/// for the thickness miss fallback, where a large in-units sentinel is all
/// that matters).
inline double lenientMeshDiameter(const TriMesh& mesh) {
  double best = 0.0;
  const int n = mesh.numVertices();
  const int step = std::max(1, n / 512);
  for (int v = 0; v < n; v += step) {
    auto dist = meshGraphGeodesic(mesh, {v});
    for (double d : dist)
      if (d < kInf) best = std::max(best, d);
  }
  return best > 0.0 ? best : mesh.bboxDiagonal();
}

}  // namespace detail

inline ThicknessField thickness3d(const TriMesh& mesh, bool use_bvh = true) {
  const int n = mesh.numVertices();
  const double epsRay = 1e-6 * mesh.bboxDiagonal();
  ThicknessField field;
  field.value.assign(n, 0.0);
  field.hit.assign(n, 0);
  const double fallback = detail::lenientMeshDiameter(mesh);

  std::optional<detail::FaceBvh> bvh;
  if (use_bvh) bvh.emplace(mesh);

  for (int j = 0; j < n; ++j) {
    const Vec3 origin = mesh.vertex(j);
    const Vec3 dir = -mesh.vertexNormal(j);
    auto skip = [&](int f) {
      const auto& t = mesh.face(f);
      return t[0] == j || t[1] == j || t[2] == j;
    };
    std::optional<std::pair<int, RayHit>> best;
    if (bvh) {
      best = bvh->closestHit(origin, dir, epsRay, skip);
    } else {
      for (int f = 0; f < mesh.numFaces(); ++f) {
        if (skip(f)) continue;
        const auto& t = mesh.face(f);
        auto hit = rayTriangleIntersect(origin, dir, mesh.vertex(t[0]), mesh.vertex(t[1]),
                                        mesh.vertex(t[2]), epsRay);
        if (hit && (!best || hit->t < best->second.t ||
                    (hit->t == best->second.t && f < best->first)))
          best = {f, *hit};
      }
    }
    if (best) {
      field.value[j] = best->second.t;
      field.hit[j] = 1;
    } else {
      field.value[j] = fallback;
    }
  }
  return field;
}

}  // namespace conjmatch
