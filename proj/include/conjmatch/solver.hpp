#pragma once

#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "conjmatch/energy.hpp"
#include "conjmatch/errors.hpp"
#include "conjmatch/geodesic.hpp"
#include "conjmatch/product_graph.hpp"

namespace conjmatch {

/// An ordered sequence of product edges (conjugate vertices) with its total
/// energy. For cyclic paths the last vertex is the duplicate of the first.
struct MatchPath {
  std::vector<ConjugateVertex> vertices;
  double total_energy = 0.0;
  bool cyclic = false;
};

struct SolveStats {
  long long dijkstra_runs = 0;
  long long branches_processed = 0;
  long long branches_created = 0;
  std::vector<double> popped_lower_bounds;
  std::vector<double> upper_bound_trace;  // every accepted b_upper, nonincreasing
};

/// Shortest paths through the layered conjugate product graph, processed one
/// layer at a time so the active heap never spans more than a layer. Layers
/// advance when a contour edge is consumed; paused-contour steps are relaxed
/// inside the layer until its heap drains. For closed contours the first
/// layer is virtually duplicated after the last one, so a path from a vertex
/// to its own duplicate is a cyclic matching.
class LayeredDijkstra {
 public:
  LayeredDijkstra(const LayeredGraph& graph, const EnergyModel& model)
      : graph_(&graph), model_(&model) {
    stride_ = graph.blockStride();
    phaseCount_ = graph.contour().closed() ? graph.numLayers() + 1 : graph.numLayers();
    dist_.assign(static_cast<size_t>(phaseCount_) * stride_, kInf);
    pred_.assign(dist_.size(), -1);
  }

  int lastPhase() const { return phaseCount_ - 1; }

  /// Sources must be first-layer vertices (contour edge 0). Vertices whose
  /// tentative distance exceeds `bound` are not expanded.
  void run(const std::vector<ConjugateVertex>& sources, double bound = kInf) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(pred_.begin(), pred_.end(), -1);
    const int m = graph_->numLayers();

    using Entry = std::pair<double, long long>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (const auto& s : sources) {
      const long long gid = graph_->localId(s);  // phase 0
      dist_[gid] = 0.0;
      heap.push({0.0, gid});
    }
    for (int phase = 0; phase < phaseCount_; ++phase) {
      while (!heap.empty()) {
        auto [d, gid] = heap.top();
        heap.pop();
        if (d > dist_[gid]) continue;
        if (d > bound) continue;
        const int local = static_cast<int>(gid - static_cast<long long>(phase) * stride_);
        const ConjugateVertex tail = graph_->fromLocalId(canonicalIndex(phase), local);
        const int headPhase = tail.kind == StepKind::ContourHold ? phase : phase + 1;
        if (headPhase >= phaseCount_ && tail.kind != StepKind::ContourHold) continue;  // target layer
        graph_->forEachOutNeighbor(tail, [&](const ConjugateVertex& head, bool) {
          const long long hid = static_cast<long long>(headPhase) * stride_ + graph_->localId(head);
          const double nd = d + model_->edgeCost(tail, head);
          if (nd < dist_[hid]) {
            dist_[hid] = nd;
            pred_[hid] = gid;
            if (headPhase == phase) heap.push({nd, hid});
          }
        });
      }
      // seed the next layer's heap with everything reached across the boundary
      if (phase + 1 < phaseCount_) {
        const long long base = static_cast<long long>(phase + 1) * stride_;
        for (int local = 0; local < stride_; ++local)
          if (dist_[base + local] < kInf) heap.push({dist_[base + local], base + local});
      }
    }
    (void)m;
  }

  /// Distance to a vertex of the final layer. `target` is given in canonical
  /// (first-layer or last-edge) form.
  double targetDistance(const ConjugateVertex& target) const {
    return dist_[static_cast<long long>(lastPhase()) * stride_ + graph_->localId(target)];
  }

  std::vector<ConjugateVertex> extractPath(const ConjugateVertex& target) const {
    std::vector<ConjugateVertex> path;
    long long gid = static_cast<long long>(lastPhase()) * stride_ + graph_->localId(target);
    if (dist_[gid] == kInf) throw NoPath("target not reached");
    while (gid >= 0) {
      const int phase = static_cast<int>(gid / stride_);
      const int local = static_cast<int>(gid % stride_);
      path.push_back(graph_->fromLocalId(canonicalIndex(phase), local));
      gid = pred_[gid];
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  ConjugateVertex pathStart(const ConjugateVertex& target) const {
    long long gid = static_cast<long long>(lastPhase()) * stride_ + graph_->localId(target);
    if (dist_[gid] == kInf) throw NoPath("target not reached");
    while (pred_[gid] >= 0) gid = pred_[gid];
    return graph_->fromLocalId(0, static_cast<int>(gid % stride_));
  }

 private:
  int canonicalIndex(int phase) const {
    const int m = graph_->numLayers();
    return graph_->contour().closed() ? phase % m : phase;
  }

  const LayeredGraph* graph_;
  const EnergyModel* model_;
  int stride_ = 0;
  int phaseCount_ = 0;
  std::vector<double> dist_;
  std::vector<long long> pred_;
};

/// Extended mesh edge: a directed edge or a paused vertex.
struct ExtendedMeshEdge {
  bool degenerate = false;
  int edge_or_vertex = 0;  // directed edge id, or held vertex id when degenerate

  friend bool operator==(const ExtendedMeshEdge&, const ExtendedMeshEdge&) = default;
};

inline ExtendedMeshEdge meshComponent(const LayeredGraph& g, const ConjugateVertex& v) {
  if (v.kind == StepKind::MeshHold) return {true, g.mesh().edgeTo(v.mesh_edge)};
  return {false, v.mesh_edge};
}

/// Partition first-layer vertices into the Voronoi cells of two seed edges on
/// the mesh (graph geodesics; a member's proxy distance is the minimum over
/// its endpoint distances). Ties go to the first cell.
inline std::pair<std::vector<FirstLayerVertex>, std::vector<FirstLayerVertex>> voronoiSplit(
    const TriMesh& mesh, const ExtendedMeshEdge& seed_a, const ExtendedMeshEdge& seed_b,
    const std::vector<FirstLayerVertex>& members) {
  auto seedVerts = [&](const ExtendedMeshEdge& s) {
    std::vector<int> v{s.degenerate ? s.edge_or_vertex : mesh.edgeFrom(s.edge_or_vertex)};
    if (!s.degenerate) v.push_back(mesh.edgeTo(s.edge_or_vertex));
    return v;
  };
  const auto da = meshGraphGeodesic(mesh, seedVerts(seed_a));
  const auto db = meshGraphGeodesic(mesh, seedVerts(seed_b));
  auto proxy = [&](const std::vector<double>& dist, const FirstLayerVertex& v) {
    if (v.mesh_hold) return dist[v.index];
    return std::min(dist[mesh.edgeFrom(v.index)], dist[mesh.edgeTo(v.index)]);
  };
  std::pair<std::vector<FirstLayerVertex>, std::vector<FirstLayerVertex>> out;
  for (const auto& v : members) {
    if (proxy(da, v) <= proxy(db, v))
      out.first.push_back(v);
    else
      out.second.push_back(v);
  }
  if (out.first.empty() || out.second.empty())
    throw InvalidSplit("voronoi split produced an empty part");
  return out;
}

namespace detail {

struct Branch {
  std::vector<ConjugateVertex> sources;  // tagged first-layer vertices
  double lower_bound = 0.0;
  long long seq = 0;  // FIFO order among equal bounds
};

struct BranchOrder {
  bool operator()(const Branch& a, const Branch& b) const {
    if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
    return a.seq > b.seq;
  }
};

inline std::vector<FirstLayerVertex> untagged(const LayeredGraph& g,
                                              const std::vector<ConjugateVertex>& sources) {
  std::vector<FirstLayerVertex> out;
  for (const auto& s : sources) out.push_back(g.untag(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Globally optimal cyclic matching by branch and bound over the first layer.
/// Branches are sets of potential start vertices; each iteration solves one
/// bounded multi-source shortest-path problem. A branch whose cheapest path
/// closes on itself yields an upper bound; otherwise the branch is split by
/// Voronoi cells around the path's start and end mesh edges and both halves
/// inherit the path cost as lower bound. Every path found along the way is
/// scanned for incidental cycles to tighten the upper bound early.
inline MatchPath solveCyclic(const LayeredGraph& graph, const EnergyModel& model,
                             SolveStats* stats = nullptr) {
  if (!graph.contour().closed()) throw DomainError("cyclic solve needs a closed contour");
  SolveStats localStats;
  SolveStats& st = stats ? *stats : localStats;

  LayeredDijkstra dijkstra(graph, model);

  // first branch: the complete first layer, tag-expanded
  detail::Branch b0;
  for (const auto& v : graph.firstLayerVertices())
    for (const auto& tagged : graph.expandFirstLayerVertex(v)) b0.sources.push_back(tagged);

  std::priority_queue<detail::Branch, std::vector<detail::Branch>, detail::BranchOrder> queue;
  long long seq = 0;
  b0.seq = seq++;
  queue.push(std::move(b0));
  st.branches_created = 1;

  double upper = kInf;
  std::optional<MatchPath> best;

  auto considerCycle = [&](const ConjugateVertex& target, double d) {
    if (d < upper && dijkstra.pathStart(target) == target) {
      upper = d;
      st.upper_bound_trace.push_back(d);
      best = MatchPath{dijkstra.extractPath(target), d, true};
    }
  };

  while (!queue.empty() && queue.top().lower_bound < upper) {
    detail::Branch branch = queue.top();
    queue.pop();
    ++st.branches_processed;
    st.popped_lower_bounds.push_back(branch.lower_bound);

    dijkstra.run(branch.sources, upper);
    ++st.dijkstra_runs;

    // every path from the branch to its own duplicate is a cycle candidate;
    // scanning cheapest-first tightens the upper bound as early as possible
    std::vector<std::pair<double, ConjugateVertex>> reached;
    for (const auto& s : branch.sources) {
      const double d = dijkstra.targetDistance(s);
      if (d < upper) reached.push_back({d, s});
    }
    std::sort(reached.begin(), reached.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return graph.localId(a.second) < graph.localId(b.second);
    });
    for (const auto& [d, s] : reached)
      if (d < upper) considerCycle(s, d);

    // a start whose bounded distance already meets the upper bound can never
    // begin an improving cycle; drop it from all descendants
    std::vector<std::pair<double, ConjugateVertex>> live;
    for (const auto& [d, s] : reached)
      if (d < upper) live.push_back({d, s});
    if (live.empty()) continue;  // branch resolved or exhausted

    const ConjugateVertex bestTarget = live.front().second;
    const ConjugateVertex start = dijkstra.pathStart(bestTarget);

    // bootstrap: force one cyclic path so pruning has a finite bound
    if (upper == kInf) {
      dijkstra.run({bestTarget}, kInf);
      ++st.dijkstra_runs;
      const double d = dijkstra.targetDistance(bestTarget);
      if (d < upper) considerCycle(bestTarget, d);
      std::erase_if(live, [&](const auto& e) { return e.first >= upper; });
      if (live.empty()) continue;
    }

    // split the branch
    std::vector<ConjugateVertex> members;
    for (const auto& [d, s] : live) members.push_back(s);
    const ExtendedMeshEdge seedStart = meshComponent(graph, start);
    const ExtendedMeshEdge seedEnd = meshComponent(graph, bestTarget);
    std::vector<ConjugateVertex> part1, part2;
    bool split = false;
    if (!(seedStart == seedEnd)) {
      try {
        auto groups =
            voronoiSplit(graph.mesh(), seedStart, seedEnd, detail::untagged(graph, members));
        std::vector<char> inFirst(graph.numDirectedMeshEdges() + graph.mesh().numVertices(), 0);
        auto key = [&](const FirstLayerVertex& v) {
          return v.mesh_hold ? graph.numDirectedMeshEdges() + v.index : v.index;
        };
        for (const auto& v : groups.first) inFirst[key(v)] = 1;
        for (const auto& s : members)
          (inFirst[key(graph.untag(s))] ? part1 : part2).push_back(s);
        split = !part1.empty() && !part2.empty();
      } catch (const InvalidSplit&) {
        split = false;
      }
    }
    if (!split) {
      // singleton split on the path's end vertex (tag group first, then exact tag)
      part1.clear();
      part2.clear();
      const FirstLayerVertex endGroup = graph.untag(bestTarget);
      for (const auto& s : members) (graph.untag(s) == endGroup ? part2 : part1).push_back(s);
      if (part1.empty()) {
        // all sources share the untagged identity; split off the exact tag
        part1.clear();
        part2.clear();
        for (const auto& s : members) (s == bestTarget ? part2 : part1).push_back(s);
      }
    }

    // child bound: cheapest bounded distance among its own candidate starts
    std::unordered_map<long long, double> liveDist;
    for (const auto& [d, s] : live) liveDist[graph.localId(s)] = d;
    auto childBound = [&](const std::vector<ConjugateVertex>& part) {
      double lb = kInf;
      for (const auto& s : part) lb = std::min(lb, liveDist.at(graph.localId(s)));
      return std::max(lb, branch.lower_bound);
    };

    for (auto* part : {&part1, &part2}) {
      if (part->empty()) continue;
      detail::Branch child;
      child.lower_bound = childBound(*part);
      child.sources = std::move(*part);
      child.seq = seq++;
      if (child.lower_bound < upper) {
        queue.push(std::move(child));
        ++st.branches_created;
      }
    }
  }

  if (!best) throw NoPath("no cyclic path exists (disconnected or over-pruned graph)");
  return *best;
}

/// Minimum-energy open path from any first-layer vertex to any final-layer
/// vertex; the cyclic constraint is dropped (partial matching).
inline MatchPath solveOpen(const LayeredGraph& graph, const EnergyModel& model,
                           SolveStats* stats = nullptr) {
  LayeredDijkstra dijkstra(graph, model);
  std::vector<ConjugateVertex> sources;
  for (const auto& v : graph.firstLayerVertices())
    for (const auto& tagged : graph.expandFirstLayerVertex(v)) sources.push_back(tagged);
  if (sources.empty()) throw NoPath("empty product graph");
  dijkstra.run(sources);
  if (stats) ++stats->dijkstra_runs;

  const int lastEdge = graph.contour().closed() ? 0 : graph.numLayers() - 1;
  std::optional<ConjugateVertex> bestTarget;
  double bestDist = kInf;
  auto consider = [&](const ConjugateVertex& t) {
    const double d = dijkstra.targetDistance(t);
    if (d < bestDist) {
      bestDist = d;
      bestTarget = t;
    }
  };
  for (int d = 0; d < graph.numDirectedMeshEdges(); ++d) {
    consider({StepKind::Advance, lastEdge, d});
    consider({StepKind::MeshHold, lastEdge, d});
  }
  if (!bestTarget) throw NoPath("no open path reaches the final layer");
  return MatchPath{dijkstra.extractPath(*bestTarget), bestDist, false};
}

/// Reduce a path to one mesh vertex per contour vertex (the first mesh vertex
/// of that contour vertex's step sequence). Unmatched entries are -1, which
/// only happens for the final vertex of nothing: every contour vertex of a
/// solved path is covered.
inline std::vector<int> matchedMeshVertices(const MatchPath& path, const Contour& contour,
                                            const TriMesh& mesh) {
  std::vector<int> out(contour.numVertices(), -1);
  auto record = [&](int i, int j) {
    if (i >= 0 && i < static_cast<int>(out.size()) && out[i] < 0) out[i] = j;
  };
  for (const auto& v : path.vertices) {
    const int j = v.kind == StepKind::MeshHold ? mesh.edgeTo(v.mesh_edge) : mesh.edgeFrom(v.mesh_edge);
    record(v.contour_index, j);
  }
  if (!path.vertices.empty()) {
    const auto& last = path.vertices.back();
    const int endContour = last.kind == StepKind::ContourHold
                               ? last.contour_index
                               : (last.contour_index + 1) % contour.numVertices();
    record(endContour, mesh.edgeTo(last.mesh_edge));
  }
  return out;
}

}  // namespace conjmatch
