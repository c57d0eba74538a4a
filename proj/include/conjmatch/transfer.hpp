#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "conjmatch/errors.hpp"
#include "conjmatch/geodesic.hpp"
#include "conjmatch/solver.hpp"

namespace conjmatch {

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Least-squares rigid (optionally similarity) alignment T minimising
/// sum_k ||T(source_k) - target_k||^2 with det(rotation) = +1.
inline RigidTransform procrustesAlign(const std::vector<Vec3>& source,
                                      const std::vector<Vec3>& target, bool with_scale = false) {
  if (source.size() != target.size()) throw DomainError("point count mismatch");
  const int n = static_cast<int>(source.size());
  if (n < 3) throw DegenerateConfiguration("need at least 3 point pairs");
  Vec3 sc = Vec3::Zero(), tc = Vec3::Zero();
  for (int k = 0; k < n; ++k) {
    sc += source[k];
    tc += target[k];
  }
  sc /= n;
  tc /= n;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double sourceVar = 0.0;
  for (int k = 0; k < n; ++k) {
    cov += (target[k] - tc) * (source[k] - sc).transpose();
    sourceVar += (source[k] - sc).squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  // rank >= 2 is required for a unique proper rotation
  if (sigma[1] <= 1e-12 * std::max(sigma[0], 1e-12) || sourceVar <= 0.0)
    throw DegenerateConfiguration("collinear or coincident points");
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  RigidTransform t;
  t.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  if (with_scale) t.scale = (sigma[0] + sigma[1] + d(2, 2) * sigma[2]) / sourceVar;
  t.translation = tc - t.scale * (t.rotation * sc);
  return t;
}

struct DeformationInput {
  const Contour* rest = nullptr;
  const Contour* deformed = nullptr;
  const MatchPath* match = nullptr;
  const TriMesh* mesh = nullptr;
  int anchor_count = 12;
  bool procrustes_scale = false;
};

struct TransferResult {
  TriMesh mesh;
  int anchors_used = 0;
  bool anchors_clamped = false;
  int iterations = 0;
  std::vector<double> energy_trace;  // nonincreasing across local-global iterations
};

namespace detail {

/// Symmetric cotangent weight per undirected mesh edge, clamped from below.
inline std::vector<double> cotangentWeights(const TriMesh& mesh, double clamp = 1e-6) {
  std::vector<double> w(mesh.numUndirectedEdges(), 0.0);
  for (int f = 0; f < mesh.numFaces(); ++f) {
    const auto& face = mesh.face(f);
    for (int k = 0; k < 3; ++k) {
      const int a = face[k], b = face[(k + 1) % 3], opp = face[(k + 2) % 3];
      const Vec3 u = mesh.vertex(a) - mesh.vertex(opp);
      const Vec3 v = mesh.vertex(b) - mesh.vertex(opp);
      const double cross = u.cross(v).norm();
      const double cot = cross > 1e-300 ? u.dot(v) / cross : 0.0;
      w[mesh.directedEdgeId(a, b) / 2] += 0.5 * cot;
    }
  }
  for (double& x : w) x = std::max(x, clamp);
  return w;
}

inline double arapEnergy(const TriMesh& mesh, const std::vector<Vec3>& pos,
                         const std::vector<double>& weights,
                         const std::vector<Eigen::Matrix3d>& rot) {
  double e = 0.0;
  for (int k = 0; k < mesh.numUndirectedEdges(); ++k) {
    const int a = mesh.edgeFrom(2 * k), b = mesh.edgeTo(2 * k);
    const Vec3 rest = mesh.vertex(b) - mesh.vertex(a);
    e += weights[k] * ((pos[b] - pos[a]) - rot[a] * rest).squaredNorm();
    e += weights[k] * ((pos[a] - pos[b]) - rot[b] * -rest).squaredNorm();
  }
  return e;
}

}  // namespace detail

/// Transfer a 2D contour deformation onto the matched mesh. The rest contour
/// is aligned to its matched mesh vertices by Procrustes; per-vertex contour
/// displacements are rotated into mesh space and imposed on farthest-point
/// sampled anchor vertices; the rest of the mesh follows by an
/// as-rigid-as-possible solve with hard anchor constraints.
inline TransferResult transferDeformationDetailed(const DeformationInput& inp) {
  const Contour& rest = *inp.rest;
  const Contour& deformed = *inp.deformed;
  const TriMesh& mesh = *inp.mesh;
  if (deformed.numVertices() != rest.numVertices())
    throw DomainError("deformed contour vertex count differs from rest contour");
  if (inp.anchor_count <= 0) throw DomainError("anchor count must be positive");

  const std::vector<int> matched = matchedMeshVertices(*inp.match, rest, mesh);
  std::vector<int> contourIdx;
  std::vector<Vec3> restPts, meshPts;
  for (int i = 0; i < rest.numVertices(); ++i) {
    if (matched[i] < 0) continue;
    contourIdx.push_back(i);
    restPts.push_back(Vec3(rest.vertex(i).x(), rest.vertex(i).y(), 0.0));
    meshPts.push_back(mesh.vertex(matched[i]));
  }
  const RigidTransform align = procrustesAlign(restPts, meshPts, inp.procrustes_scale);

  // one anchor candidate per distinct matched mesh vertex (first contour hit wins)
  std::vector<int> candidateVerts;
  std::vector<Vec3> candidateTargets;
  {
    std::vector<char> seen(mesh.numVertices(), 0);
    for (size_t k = 0; k < contourIdx.size(); ++k) {
      const int j = matched[contourIdx[k]];
      if (seen[j]) continue;
      seen[j] = 1;
      const Vec2 d2 = deformed.vertex(contourIdx[k]) - rest.vertex(contourIdx[k]);
      const Vec3 delta = align.scale * (align.rotation * Vec3(d2.x(), d2.y(), 0.0));
      candidateVerts.push_back(j);
      candidateTargets.push_back(mesh.vertex(j) + delta);
    }
  }

  TransferResult result{mesh, 0, false, 0, {}};
  result.anchors_clamped = inp.anchor_count > static_cast<int>(candidateVerts.size());
  const int anchorCount = std::min<int>(inp.anchor_count, static_cast<int>(candidateVerts.size()));
  const std::vector<int> anchorVerts = farthestPointSample(mesh, candidateVerts, anchorCount);
  result.anchors_used = static_cast<int>(anchorVerts.size());

  std::vector<char> isAnchor(mesh.numVertices(), 0);
  std::vector<Vec3> anchorTarget(mesh.numVertices(), Vec3::Zero());
  for (int v : anchorVerts) {
    for (size_t k = 0; k < candidateVerts.size(); ++k)
      if (candidateVerts[k] == v) {
        anchorTarget[v] = candidateTargets[k];
        break;
      }
    isAnchor[v] = 1;
  }

  // initial guess: best rigid motion of the whole mesh onto the anchor targets
  std::vector<Vec3> pos(mesh.vertices());
  {
    std::vector<Vec3> a, b;
    for (int v : anchorVerts) {
      a.push_back(mesh.vertex(v));
      b.push_back(anchorTarget[v]);
    }
    try {
      const RigidTransform init = procrustesAlign(a, b, false);
      for (auto& p : pos) p = init.apply(p);
    } catch (const DegenerateConfiguration&) {
      Vec3 shift = Vec3::Zero();
      for (size_t k = 0; k < a.size(); ++k) shift += b[k] - a[k];
      if (!a.empty()) shift /= static_cast<double>(a.size());
      for (auto& p : pos) p += shift;
    }
  }
  for (int v : anchorVerts) pos[v] = anchorTarget[v];

  const int n = mesh.numVertices();
  const std::vector<double> weights = detail::cotangentWeights(mesh);

  std::vector<int> freeIndex(n, -1);
  std::vector<int> freeVerts;
  for (int v = 0; v < n; ++v)
    if (!isAnchor[v]) {
      freeIndex[v] = static_cast<int>(freeVerts.size());
      freeVerts.push_back(v);
    }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  if (!freeVerts.empty()) {
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> diag(freeVerts.size(), 0.0);
    for (int k = 0; k < mesh.numUndirectedEdges(); ++k) {
      const int a = mesh.edgeFrom(2 * k), b = mesh.edgeTo(2 * k);
      const double w = 2.0 * weights[k];  // both orientations contribute
      if (freeIndex[a] >= 0) diag[freeIndex[a]] += w;
      if (freeIndex[b] >= 0) diag[freeIndex[b]] += w;
      if (freeIndex[a] >= 0 && freeIndex[b] >= 0) {
        trip.emplace_back(freeIndex[a], freeIndex[b], -w);
        trip.emplace_back(freeIndex[b], freeIndex[a], -w);
      }
    }
    for (size_t k = 0; k < diag.size(); ++k)
      trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag[k]);
    Eigen::SparseMatrix<double> lap(static_cast<int>(freeVerts.size()),
                                    static_cast<int>(freeVerts.size()));
    lap.setFromTriplets(trip.begin(), trip.end());
    solver.compute(lap);
    if (solver.info() != Eigen::Success) throw ARAPDiverged("Laplacian factorisation failed");
  }

  std::vector<Eigen::Matrix3d> rot(n, Eigen::Matrix3d::Identity());
  double prevEnergy = kInf;
  for (int iter = 0; iter < 200; ++iter) {
    // local step: per-vertex rotation fit
    for (int v = 0; v < n; ++v) {
      Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
      for (int d : mesh.outEdges(v)) {
        const int u = mesh.edgeTo(d);
        s += weights[d / 2] * (pos[u] - pos[v]) * (mesh.vertex(u) - mesh.vertex(v)).transpose();
      }
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
      if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
      rot[v] = svd.matrixU() * d * svd.matrixV().transpose();
    }
    // global step: positions from the fixed rotations
    if (!freeVerts.empty()) {
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<int>(freeVerts.size()), 3);
      for (int k = 0; k < mesh.numUndirectedEdges(); ++k) {
        const int a = mesh.edgeFrom(2 * k), b = mesh.edgeTo(2 * k);
        const Vec3 restEdge = mesh.vertex(b) - mesh.vertex(a);
        const Vec3 target = weights[k] * ((rot[a] + rot[b]) * restEdge);
        const double w = 2.0 * weights[k];
        if (freeIndex[b] >= 0) {
          rhs.row(freeIndex[b]) += target.transpose();
          if (freeIndex[a] < 0) rhs.row(freeIndex[b]) += w * pos[a].transpose();
        }
        if (freeIndex[a] >= 0) {
          rhs.row(freeIndex[a]) -= target.transpose();
          if (freeIndex[b] < 0) rhs.row(freeIndex[a]) += w * pos[b].transpose();
        }
      }
      const Eigen::MatrixXd sol = solver.solve(rhs);
      if (solver.info() != Eigen::Success) throw ARAPDiverged("linear solve failed");
      for (size_t k = 0; k < freeVerts.size(); ++k) pos[freeVerts[k]] = sol.row(k).transpose();
    }
    const double energy = detail::arapEnergy(mesh, pos, weights, rot);
    result.energy_trace.push_back(energy);
    result.iterations = iter + 1;
    if (energy > prevEnergy * (1.0 + 1e-9) + 1e-12)
      throw ARAPDiverged("energy increased across an iteration");
    if (prevEnergy < kInf && std::abs(prevEnergy - energy) < 1e-6 * std::max(prevEnergy, 1e-12))
      break;
    prevEnergy = energy;
  }

  result.mesh = TriMesh(std::move(pos), mesh.faces());
  return result;
}

inline TriMesh transferDeformation(const DeformationInput& inp) {
  return transferDeformationDetailed(inp).mesh;
}

}  // namespace conjmatch
