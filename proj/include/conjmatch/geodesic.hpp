#pragma once

#include <limits>
#include <queue>
#include <vector>

#include "conjmatch/errors.hpp"
#include "conjmatch/trimesh.hpp"

namespace conjmatch {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Graph geodesic: Dijkstra over mesh edges with Euclidean weights.
/// Unreachable vertices get +infinity.
inline std::vector<double> meshGraphGeodesic(const TriMesh& mesh, const std::vector<int>& sources) {
  if (sources.empty()) throw DomainError("geodesic source set must be non-empty");
  std::vector<double> dist(mesh.numVertices(), kInf);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (int s : sources) {
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int e : mesh.outEdges(v)) {
      const int w = mesh.edgeTo(e);
      const double nd = d + mesh.edgeLength(e);
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

struct DiameterResult {
  double diameter = 0.0;
  bool exact = true;      // false when estimated from a sampled source subset
  int sources_used = 0;
};

/// Maximum graph-geodesic eccentricity. Exact all-pairs up to
/// `exact_vertex_limit` vertices, otherwise a sampled max over
/// `sample_sources` well-spread source vertices (farthest-point order).
inline DiameterResult meshDiameter(const TriMesh& mesh, int exact_vertex_limit = 4000,
                                   int sample_sources = 64) {
  const int n = mesh.numVertices();
  DiameterResult result;
  if (n <= exact_vertex_limit) {
    for (int v = 0; v < n; ++v) {
      auto dist = meshGraphGeodesic(mesh, {v});
      for (double d : dist) {
        if (d == kInf) throw DisconnectedMesh("mesh is not connected");
        result.diameter = std::max(result.diameter, d);
      }
    }
    result.sources_used = n;
    return result;
  }
  // farthest-point sampling of source vertices
  result.exact = false;
  std::vector<double> minDist(n, kInf);
  int next = 0;
  for (int k = 0; k < sample_sources; ++k) {
    auto dist = meshGraphGeodesic(mesh, {next});
    int far = 0;
    for (int v = 0; v < n; ++v) {
      if (dist[v] == kInf) throw DisconnectedMesh("mesh is not connected");
      result.diameter = std::max(result.diameter, dist[v]);
      minDist[v] = std::min(minDist[v], dist[v]);
      if (minDist[v] > minDist[far]) far = v;
    }
    next = far;
    ++result.sources_used;
  }
  return result;
}

/// Farthest-point sampling over a candidate vertex subset; the first seed is
/// the smallest candidate id, subsequent seeds maximise graph distance to the
/// already chosen set. Deterministic and candidate-order independent.
inline std::vector<int> farthestPointSample(const TriMesh& mesh, std::vector<int> candidates,
                                            int count) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  count = std::min<int>(count, static_cast<int>(candidates.size()));
  std::vector<int> picked;
  if (count <= 0) return picked;
  picked.push_back(candidates.front());
  std::vector<double> minDist = meshGraphGeodesic(mesh, {picked.front()});
  while (static_cast<int>(picked.size()) < count) {
    int best = -1;
    for (int v : candidates) {
      if (std::find(picked.begin(), picked.end(), v) != picked.end()) continue;
      if (best < 0 || minDist[v] > minDist[best]) best = v;
    }
    picked.push_back(best);
    auto dist = meshGraphGeodesic(mesh, {best});
    for (int v = 0; v < mesh.numVertices(); ++v) minDist[v] = std::min(minDist[v], dist[v]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace conjmatch
