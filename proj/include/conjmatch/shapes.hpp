#pragma once

#include <cmath>
#include <map>
#include <random>

#include "conjmatch/contour.hpp"
#include "conjmatch/trimesh.hpp"

namespace conjmatch::shapes {

inline Contour regularPolygon(int n, double radius = 1.0) {
  std::vector<Vec2> v(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    v[i] = radius * Vec2(std::cos(a), std::sin(a));
  }
  return Contour(std::move(v), true);
}

inline Contour unitSquare() {
  return Contour({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
}

/// Regular tetrahedron with unit edge length, outward-oriented faces.
inline TriMesh tetrahedron() {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Vec3> v = {{1, 0, -s}, {-1, 0, -s}, {0, 1, s}, {0, -1, s}};
  for (auto& p : v) p *= 0.5;  // edge length 1
  std::vector<std::array<int, 3>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return TriMesh(std::move(v), std::move(f));
}

inline TriMesh octahedron(double radius = 1.0) {
  std::vector<Vec3> v = {{radius, 0, 0}, {-radius, 0, 0}, {0, radius, 0},
                         {0, -radius, 0}, {0, 0, radius}, {0, 0, -radius}};
  std::vector<std::array<int, 3>> f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                       {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return TriMesh(std::move(v), std::move(f));
}

/// Icosphere by midpoint subdivision of an icosahedron, projected to the
/// sphere. Subdivision 0 is the icosahedron (12 vertices); each level
/// quadruples the face count.
inline TriMesh icosphere(int subdivisions, double radius = 1.0) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> nf;
    nf.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      nf.push_back({t[0], ab, ca});
      nf.push_back({t[1], bc, ab});
      nf.push_back({t[2], ca, bc});
      nf.push_back({ab, bc, ca});
    }
    f = std::move(nf);
  }
  if (radius != 1.0)
    for (auto& p : v) p *= radius;
  return TriMesh(std::move(v), std::move(f));
}

/// Latitude-longitude sphere; vertex count = rings*segments + 2.
inline TriMesh uvSphere(int rings, int segments, double radius = 1.0) {
  std::vector<Vec3> v;
  v.emplace_back(0, 0, radius);  // north pole
  for (int r = 1; r <= rings; ++r) {
    const double theta = M_PI * r / (rings + 1);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * M_PI * s / segments;
      v.emplace_back(radius * std::sin(theta) * std::cos(phi),
                     radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta));
    }
  }
  v.emplace_back(0, 0, -radius);  // south pole
  const int south = static_cast<int>(v.size()) - 1;
  auto ring = [&](int r, int s) { return 1 + r * segments + (s % segments); };
  std::vector<std::array<int, 3>> f;
  for (int s = 0; s < segments; ++s) f.push_back({0, ring(0, s), ring(0, s + 1)});
  for (int r = 0; r + 1 < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      f.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      f.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  for (int s = 0; s < segments; ++s) f.push_back({south, ring(rings - 1, s + 1), ring(rings - 1, s)});
  return TriMesh(std::move(v), std::move(f));
}

/// Convex hull of a small point set by brute-force face enumeration.
/// Assumes general position (no 4 coplanar points); intended for randomized
/// test instances with at most a few dozen points.
inline TriMesh convexHull(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw DomainError("convex hull needs at least 4 points");
  std::vector<std::array<int, 3>> faces;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Vec3 nrm = (points[j] - points[i]).cross(points[k] - points[i]);
        if (nrm.norm() < 1e-12) continue;
        bool allNeg = true, allPos = true;
        for (int l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          const double s = nrm.dot(points[l] - points[i]);
          allNeg &= s < 0.0;
          allPos &= s > 0.0;
        }
        if (allNeg)
          faces.push_back({i, j, k});
        else if (allPos)
          faces.push_back({i, k, j});
      }
  // drop interior points, reindex
  std::vector<int> remap(n, -1);
  std::vector<Vec3> hullVerts;
  for (auto& f : faces)
    for (int& idx : f) {
      if (remap[idx] < 0) {
        remap[idx] = static_cast<int>(hullVerts.size());
        hullVerts.push_back(points[idx]);
      }
      idx = remap[idx];
    }
  return TriMesh(std::move(hullVerts), std::move(faces));
}

/// Random convex polytope with up to `max_points` generating points on a
/// jittered sphere.
inline TriMesh randomConvexHull(unsigned seed, int max_points = 10) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> countDist(4, max_points);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radial(0.6, 1.4);
  const int n = countDist(rng);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) {
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    p = radial(rng) * dir.normalized();
  }
  return convexHull(pts);
}

}  // namespace conjmatch::shapes
