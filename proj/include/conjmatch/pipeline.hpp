#pragma once

#include <chrono>

#include "conjmatch/config.hpp"
#include "conjmatch/energy.hpp"
#include "conjmatch/geodesic.hpp"
#include "conjmatch/match_io.hpp"
#include "conjmatch/solver.hpp"

namespace conjmatch {

/// End-to-end matching on already-parsed shapes: optional unit-diameter
/// normalization of both inputs, thickness computation, graph construction,
/// and the configured solve. Normalization makes thickness values and frame
/// scales comparable across shapes.
struct PipelineResult {
  Contour contour;  // as matched (possibly rescaled)
  TriMesh mesh;
  double contour_scale = 1.0;
  double mesh_scale = 1.0;
  MatchPath path;
  SolveStats stats;
  double wall_time_seconds = 0.0;
};

inline PipelineResult runMatchPipeline(const Contour& contour, const TriMesh& mesh,
                                       const Config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  double contourScale = 1.0, meshScale = 1.0;
  if (cfg.normalize) {
    contourScale = 1.0 / contour.graphDiameter();
    meshScale = 1.0 / meshDiameter(mesh).diameter;
  }
  PipelineResult result{contour.scaled(contourScale), mesh.scaled(meshScale),
                        contourScale,                 meshScale,
                        {},                           {},
                        0.0};

  const LayeredGraph graph(result.contour, result.mesh, cfg.prune);
  const EnergyModel model =
      EnergyModel::withComputedThickness(result.contour, result.mesh, cfg.psi1, cfg.psi2);
  if (cfg.mode == SolveMode::Cyclic)
    result.path = solveCyclic(graph, model, &result.stats);
  else
    result.path = solveOpen(graph, model, &result.stats);

  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

inline MatchDocument documentFromPipeline(const PipelineResult& r, const Config& cfg) {
  const LayeredGraph graph(r.contour, r.mesh, cfg.prune);
  const EnergyModel model =
      EnergyModel::withComputedThickness(r.contour, r.mesh, cfg.psi1, cfg.psi2);
  return buildMatchDocument(r.path, graph, model, r.stats, r.wall_time_seconds, r.contour_scale,
                            r.mesh_scale);
}

}  // namespace conjmatch
