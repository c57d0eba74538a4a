#pragma once

#include <mutex>
#include <vector>

#include "conjmatch/frames.hpp"
#include "conjmatch/product_graph.hpp"
#include "conjmatch/robust_loss.hpp"
#include "conjmatch/thickness.hpp"

namespace conjmatch {

/// Second-order step cost d = d_data + d_reg evaluated on conjugate edges:
/// thickness difference at the shared vertices under psi1, plus the rotation
/// change between consecutive frame alignments under psi2.
///
/// Frame rotations are memoised per contour edge (one row of directed mesh
/// edges at a time); the cyclic solver revisits layers many times. Cost
/// evaluation is pure and safe for concurrent use.
class EnergyModel {
 public:
  EnergyModel(const Contour& contour, const TriMesh& mesh, ThicknessField thickness_2d,
              ThicknessField thickness_3d, RobustLossParams psi1 = defaultDataLoss(),
              RobustLossParams psi2 = defaultRigidityLoss())
      : contour_(&contour),
        mesh_(&mesh),
        t2d_(std::move(thickness_2d)),
        t3d_(std::move(thickness_3d)),
        psi1_(psi1),
        psi2_(psi2),
        rows_(contour.numEdges()),
        rowOnce_(contour.numEdges()) {
    if (t2d_.size() != contour.numVertices() || t3d_.size() != mesh.numVertices())
      throw DomainError("thickness field size mismatch");
  }

  static EnergyModel withComputedThickness(const Contour& contour, const TriMesh& mesh,
                                           RobustLossParams psi1 = defaultDataLoss(),
                                           RobustLossParams psi2 = defaultRigidityLoss()) {
    return EnergyModel(contour, mesh, thickness2d(contour), thickness3d(mesh), psi1, psi2);
  }

  const Contour& contour() const { return *contour_; }
  const TriMesh& mesh() const { return *mesh_; }
  const ThicknessField& thicknessField2d() const { return t2d_; }
  const ThicknessField& thicknessField3d() const { return t3d_; }
  const RobustLossParams& psi1() const { return psi1_; }
  const RobustLossParams& psi2() const { return psi2_; }

  const Quat& rotation(int contour_edge, int mesh_directed_edge) const {
    std::call_once(rowOnce_[contour_edge], [&] {
      auto& row = rows_[contour_edge];
      row.resize(mesh_->numDirectedEdges());
      const LocalFrame f2d = contourEdgeFrame(*contour_, contour_edge);
      for (int d = 0; d < mesh_->numDirectedEdges(); ++d)
        row[d] = frameRotation(f2d, meshEdgeFrame(*mesh_, d));
    });
    return rows_[contour_edge][mesh_directed_edge];
  }

  const Quat& rotation(const ConjugateVertex& v) const {
    return rotation(effectiveContourEdge(v), v.mesh_edge);
  }

  double dData(const ConjugateVertex& tail, const ConjugateVertex& head) const {
    (void)tail;  // shared vertices are determined by the head (= where the steps join)
    const int i = head.contour_index;  // contour vertex shared by both contour components
    const int j = head.kind == StepKind::MeshHold ? mesh_->edgeTo(head.mesh_edge)
                                                  : mesh_->edgeFrom(head.mesh_edge);
    return robustLoss(std::abs(t2d_.value[i] - t3d_.value[j]), psi1_);
  }

  double dReg(const ConjugateVertex& tail, const ConjugateVertex& head) const {
    return robustLoss(quaternionAngle(rotation(tail), rotation(head)), psi2_);
  }

  double edgeCost(const ConjugateVertex& tail, const ConjugateVertex& head) const {
    return dData(tail, head) + dReg(tail, head);
  }

  double dData(const ConjugateEdge& e) const { return dData(e.tail, e.head); }
  double dReg(const ConjugateEdge& e) const { return dReg(e.tail, e.head); }
  double edgeCost(const ConjugateEdge& e) const { return edgeCost(e.tail, e.head); }

 private:
  int effectiveContourEdge(const ConjugateVertex& v) const {
    if (v.kind != StepKind::ContourHold) return v.contour_index;
    const int e = v.contour_index - 1;
    return e >= 0 ? e : contour_->numEdges() - 1;
  }

  const Contour* contour_;
  const TriMesh* mesh_;
  ThicknessField t2d_, t3d_;
  RobustLossParams psi1_, psi2_;
  mutable std::vector<std::vector<Quat>> rows_;
  mutable std::vector<std::once_flag> rowOnce_;
};

}  // namespace conjmatch
