#pragma once

#include <vector>

#include "conjmatch/errors.hpp"
#include "conjmatch/geodesic.hpp"
#include "conjmatch/trimesh.hpp"

namespace conjmatch {

/// Ground truth for evaluating a contour-to-mesh matching. `gt[i]` is the
/// true mesh vertex for contour vertex i (-1 when unknown). Segment labels
/// are nonnegative integers; `sym_perms` lists label permutations considered
/// equally correct (intrinsic symmetries). Each permutation maps label l to
/// perm[l].
struct GroundTruth {
  std::vector<int> gt;
  std::vector<int> seg2d;
  std::vector<int> seg3d;
  std::vector<std::vector<int>> sym_perms;
};

/// Geodesic distance from the matched mesh vertex to the ground-truth one,
/// normalised by the mesh diameter.
inline double geodesicError(int contour_vertex, int mesh_vertex, const GroundTruth& gt,
                            const TriMesh& mesh, double mesh_diameter) {
  if (contour_vertex < 0 || contour_vertex >= static_cast<int>(gt.gt.size()) ||
      gt.gt[contour_vertex] < 0)
    throw MissingGroundTruth("no ground-truth vertex for contour vertex " +
                             std::to_string(contour_vertex));
  const auto dist = meshGraphGeodesic(mesh, {gt.gt[contour_vertex]});
  return dist[mesh_vertex] / mesh_diameter;
}

inline double geodesicError(int contour_vertex, int mesh_vertex, const GroundTruth& gt,
                            const TriMesh& mesh) {
  return geodesicError(contour_vertex, mesh_vertex, gt, mesh, meshDiameter(mesh).diameter);
}

/// Normalised geodesic distance from the matched mesh vertex to the nearest
/// mesh vertex carrying the contour vertex's segment label, minimised over
/// the supplied symmetry permutations (identity always included).
inline double segmentationError(int contour_vertex, int mesh_vertex, const GroundTruth& gt,
                                const TriMesh& mesh, double mesh_diameter) {
  if (contour_vertex < 0 || contour_vertex >= static_cast<int>(gt.seg2d.size()))
    throw MissingGroundTruth("no 2D segment label for contour vertex " +
                             std::to_string(contour_vertex));
  if (gt.seg3d.size() != static_cast<size_t>(mesh.numVertices()))
    throw MissingGroundTruth("3D segment labels missing or mismatched");
  const int label = gt.seg2d[contour_vertex];

  std::vector<int> wanted{label};
  for (const auto& perm : gt.sym_perms)
    if (label >= 0 && label < static_cast<int>(perm.size())) wanted.push_back(perm[label]);

  std::vector<int> targets;
  for (int v = 0; v < mesh.numVertices(); ++v)
    for (int w : wanted)
      if (gt.seg3d[v] == w) {
        targets.push_back(v);
        break;
      }
  if (targets.empty())
    throw EmptyTargetSegment("no mesh vertex carries segment label " + std::to_string(label));
  const auto dist = meshGraphGeodesic(mesh, targets);
  return dist[mesh_vertex] / mesh_diameter;
}

inline double segmentationError(int contour_vertex, int mesh_vertex, const GroundTruth& gt,
                                const TriMesh& mesh) {
  return segmentationError(contour_vertex, mesh_vertex, gt, mesh, meshDiameter(mesh).diameter);
}

struct ErrorCurve {
  std::vector<double> thresholds;
  std::vector<double> fraction;  // fraction of errors <= threshold
  double auc = 0.0;              // trapezoid integral over [0, thresholds.back()], normalised
};

inline std::vector<double> defaultThresholdGrid() {
  std::vector<double> grid(200);
  for (int k = 0; k < 200; ++k) grid[k] = static_cast<double>(k) / 199.0;
  return grid;
}

inline ErrorCurve cumulativeCurve(std::vector<double> errors,
                                  std::vector<double> grid = defaultThresholdGrid()) {
  if (errors.empty()) throw EmptyInput("no errors to accumulate");
  std::sort(errors.begin(), errors.end());
  ErrorCurve curve;
  curve.thresholds = std::move(grid);
  curve.fraction.reserve(curve.thresholds.size());
  for (double tau : curve.thresholds) {
    const auto it = std::upper_bound(errors.begin(), errors.end(), tau);
    curve.fraction.push_back(static_cast<double>(it - errors.begin()) / errors.size());
  }
  double area = 0.0;
  for (size_t k = 1; k < curve.thresholds.size(); ++k)
    area += 0.5 * (curve.fraction[k] + curve.fraction[k - 1]) *
            (curve.thresholds[k] - curve.thresholds[k - 1]);
  const double span = curve.thresholds.back() - curve.thresholds.front();
  curve.auc = span > 0.0 ? area / span : curve.fraction.front();
  return curve;
}

}  // namespace conjmatch
