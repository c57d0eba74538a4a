#pragma once

#include <cstdint>
#include <vector>

#include "conjmatch/contour.hpp"
#include "conjmatch/trimesh.hpp"

namespace conjmatch {

/// One product edge, i.e. a vertex of the conjugate product graph. A step
/// pairs a contour move with a mesh move; one side may pause (degenerate
/// self-edge) while the other advances, but never both.
enum class StepKind : std::uint8_t {
  Advance,      // contour edge paired with a directed mesh edge
  MeshHold,     // contour edge paired with a paused mesh vertex
  ContourHold,  // paused contour vertex paired with a directed mesh edge
};

/// Vertex of the conjugate product graph.
///
/// contour_index is a contour *edge* index for Advance/MeshHold and a contour
/// *vertex* index for ContourHold. mesh_edge is a directed mesh edge id; for
/// MeshHold it is the reference edge carrying the direction last travelled on
/// the mesh (the paused mesh vertex is that edge's head), which the rigidity
/// term needs. Identity includes the reference edge.
struct ConjugateVertex {
  StepKind kind = StepKind::Advance;
  int contour_index = 0;
  int mesh_edge = 0;

  friend bool operator==(const ConjugateVertex&, const ConjugateVertex&) = default;
};

struct ConjugateEdge {
  ConjugateVertex tail;
  ConjugateVertex head;
  bool layer_advance = false;  // head consumes a contour edge
};

struct PruneOptions {
  bool turning_points = true;   // drop immediate mesh-edge reversals
  bool degenerate_pairs = true; // drop contour-pause followed by mesh-pause and vice versa
  // Emit one MeshHold head per incident incoming mesh edge instead of only
  // the edge the path arrived through.
  bool mesh_hold_all_incident = false;
};

/// First-layer vertex in untagged form: either an Advance over a directed
/// mesh edge or a MeshHold over a mesh vertex (all its reference-edge
/// variants collectively).
struct FirstLayerVertex {
  bool mesh_hold = false;
  int index = 0;  // directed mesh edge id, or held mesh vertex id

  friend bool operator==(const FirstLayerVertex&, const FirstLayerVertex&) = default;
  friend auto operator<=>(const FirstLayerVertex&, const FirstLayerVertex&) = default;
};

/// Implicit layered conjugate product graph. Nothing is materialised; the
/// neighbour generator enumerates out-edges in O(degree). Immutable and safe
/// for concurrent reads.
class LayeredGraph {
 public:
  LayeredGraph(const Contour& contour, const TriMesh& mesh, PruneOptions prune = {})
      : contour_(&contour), mesh_(&mesh), prune_(prune) {}

  const Contour& contour() const { return *contour_; }
  const TriMesh& mesh() const { return *mesh_; }
  const PruneOptions& prune() const { return prune_; }

  int numLayers() const { return contour_->numEdges(); }
  int numDirectedMeshEdges() const { return mesh_->numDirectedEdges(); }

  /// Dense per-layer id block: [0,D) Advance, [D,2D) MeshHold by reference
  /// edge, [2D,3D) ContourHold.
  int blockStride() const { return 3 * numDirectedMeshEdges(); }

  int localId(const ConjugateVertex& v) const {
    const int d = numDirectedMeshEdges();
    switch (v.kind) {
      case StepKind::Advance: return v.mesh_edge;
      case StepKind::MeshHold: return d + v.mesh_edge;
      default: return 2 * d + v.mesh_edge;
    }
  }

  ConjugateVertex fromLocalId(int contour_index, int local) const {
    const int d = numDirectedMeshEdges();
    if (local < d) return {StepKind::Advance, contour_index, local};
    if (local < 2 * d) return {StepKind::MeshHold, contour_index, local - d};
    return {StepKind::ContourHold, contour_index, local - 2 * d};
  }

  /// Contour vertex at which the step begins.
  int contourStart(const ConjugateVertex& v) const { return v.contour_index; }

  /// Contour vertex at which the step ends.
  int contourEnd(const ConjugateVertex& v) const {
    if (v.kind == StepKind::ContourHold) return v.contour_index;
    return (v.contour_index + 1) % contour_->numVertices();
  }

  /// Mesh vertex at which the step begins.
  int meshStart(const ConjugateVertex& v) const {
    if (v.kind == StepKind::MeshHold) return mesh_->edgeTo(v.mesh_edge);
    return mesh_->edgeFrom(v.mesh_edge);
  }

  /// Mesh vertex at which the step ends.
  int meshEnd(const ConjugateVertex& v) const { return mesh_->edgeTo(v.mesh_edge); }

  /// Contour edge providing the 2D direction for the rigidity term: the
  /// step's own edge, or for a paused contour the unique preceding edge.
  int effectiveContourEdge(const ConjugateVertex& v) const {
    if (v.kind != StepKind::ContourHold) return v.contour_index;
    const int e = v.contour_index - 1;
    return e >= 0 ? e : contour_->numEdges() - 1;
  }

  /// Directed mesh edge providing the 3D direction: the step's own edge, or
  /// for a paused mesh vertex the tagged reference edge.
  int effectiveMeshEdge(const ConjugateVertex& v) const { return v.mesh_edge; }

  bool hasNextContourEdge(int edge) const {
    return contour_->closed() || edge + 1 < contour_->numEdges();
  }

  /// Enumerate out-neighbours of v after pruning. fn(head, layer_advance);
  /// for closed contours, contour indices wrap (the cyclic solver layers the
  /// traversal itself).
  template <class Fn>
  void forEachOutNeighbor(const ConjugateVertex& v, Fn&& fn) const {
    const int m = contour_->numEdges();
    switch (v.kind) {
      case StepKind::Advance:
      case StepKind::MeshHold: {
        if (!hasNextContourEdge(v.contour_index)) return;
        const int nextEdge = (v.contour_index + 1) % m;
        const int j = meshEnd(v);  // mesh vertex reached so far
        const bool tailMeshMoves = v.kind == StepKind::Advance;
        const int rev = tailMeshMoves ? mesh_->reverseEdge(v.mesh_edge) : -1;
        for (int d : mesh_->outEdges(j)) {
          if (prune_.turning_points && tailMeshMoves && d == rev) continue;
          fn(ConjugateVertex{StepKind::Advance, nextEdge, d}, true);
          // pausing the contour right after a mesh pause collapses to a plain step
          if (!(prune_.degenerate_pairs && v.kind == StepKind::MeshHold)) {
            const int holdVertex = contourEnd(v);
            if (contour_->closed() || (holdVertex >= 1 && holdVertex + 1 < contour_->numVertices()))
              fn(ConjugateVertex{StepKind::ContourHold, holdVertex, d}, false);
          }
        }
        emitMeshHolds(nextEdge, v.mesh_edge, j, fn);
        break;
      }
      case StepKind::ContourHold: {
        const int edge = v.contour_index;  // the contour edge this pause precedes
        const int b = meshEnd(v);
        const int rev = mesh_->reverseEdge(v.mesh_edge);
        for (int d : mesh_->outEdges(b)) {
          if (prune_.turning_points && d == rev) continue;
          fn(ConjugateVertex{StepKind::Advance, edge, d}, true);
          if (contour_->closed() || (v.contour_index >= 1 && v.contour_index + 1 < contour_->numVertices()))
            fn(ConjugateVertex{StepKind::ContourHold, v.contour_index, d}, false);
        }
        if (!prune_.degenerate_pairs) emitMeshHolds(edge, v.mesh_edge, b, fn);
        break;
      }
    }
  }

  std::vector<ConjugateEdge> outNeighbors(const ConjugateVertex& v) const {
    std::vector<ConjugateEdge> out;
    forEachOutNeighbor(v, [&](const ConjugateVertex& head, bool advance) {
      out.push_back({v, head, advance});
    });
    return out;
  }

  /// All first-layer vertices (contour edge 0, non-degenerate contour
  /// component), with mesh pauses in untagged form. |result| = 2|E_N|+|V_N|.
  std::vector<FirstLayerVertex> firstLayerVertices() const {
    std::vector<FirstLayerVertex> out;
    out.reserve(numDirectedMeshEdges() + mesh_->numVertices());
    for (int d = 0; d < numDirectedMeshEdges(); ++d) out.push_back({false, d});
    for (int j = 0; j < mesh_->numVertices(); ++j) out.push_back({true, j});
    return out;
  }

  /// Tagged conjugate vertices behind an untagged first-layer vertex.
  std::vector<ConjugateVertex> expandFirstLayerVertex(const FirstLayerVertex& v) const {
    std::vector<ConjugateVertex> out;
    if (!v.mesh_hold) {
      out.push_back({StepKind::Advance, 0, v.index});
    } else {
      for (int d : mesh_->inEdges(v.index)) out.push_back({StepKind::MeshHold, 0, d});
    }
    return out;
  }

  FirstLayerVertex untag(const ConjugateVertex& v) const {
    if (v.kind == StepKind::MeshHold) return {true, mesh_->edgeTo(v.mesh_edge)};
    return {false, v.mesh_edge};
  }

  // Closed-form sizes (per-layer vertices counted before reference-edge
  // duplication, matching the usual product/conjugate graph accounting).
  long long productVertexCount() const {
    return static_cast<long long>(contour_->numVertices()) * mesh_->numVertices();
  }
  long long productEdgeCount() const {
    return static_cast<long long>(contour_->numVertices()) *
           (numDirectedMeshEdges() + mesh_->numVertices());
  }
  long long conjugateVertexCount() const { return productEdgeCount(); }

  /// Measured per-layer conjugate vertex count before duplication.
  long long measuredConjugateVertexCount() const {
    long long perLayer = 0;
    perLayer += numDirectedMeshEdges();  // Advance
    perLayer += mesh_->numVertices();    // MeshHold, one per held vertex
    return perLayer * contour_->numEdges();
  }

  struct DegreeStats {
    long long vertices = 0;       // enumerated vertices incl. tags and pauses
    long long edges = 0;          // out-edges after pruning
    double mean_out_degree = 0.0;
  };

  /// Exhaustive out-degree measurement over every enumerated vertex of one
  /// layer (identical across layers by symmetry), scaled to the whole graph.
  DegreeStats measureDegrees() const {
    DegreeStats s;
    long long verts = 0, edges = 0;
    const int layer = 0;
    auto count = [&](const ConjugateVertex& v) {
      ++verts;
      forEachOutNeighbor(v, [&](const ConjugateVertex&, bool) { ++edges; });
    };
    for (int d = 0; d < numDirectedMeshEdges(); ++d) {
      count({StepKind::Advance, layer, d});
      count({StepKind::MeshHold, layer, d});
      count({StepKind::ContourHold, (layer + 1) % contour_->numVertices(), d});
    }
    s.vertices = verts * numLayers();
    s.edges = edges * numLayers();
    s.mean_out_degree = verts > 0 ? static_cast<double>(edges) / verts : 0.0;
    return s;
  }

 private:
  template <class Fn>
  void emitMeshHolds(int next_edge, int arrival_edge, int held_vertex, Fn&& fn) const {
    if (prune_.mesh_hold_all_incident) {
      for (int d : mesh_->inEdges(held_vertex))
        fn(ConjugateVertex{StepKind::MeshHold, next_edge, d}, true);
    } else {
      fn(ConjugateVertex{StepKind::MeshHold, next_edge, arrival_edge}, true);
    }
  }

  const Contour* contour_;
  const TriMesh* mesh_;
  PruneOptions prune_;
};

}  // namespace conjmatch
