#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "conjmatch/shapes.hpp"
#include "conjmatch/transfer.hpp"

using namespace conjmatch;

namespace {

struct RingSetup {
  TriMesh mesh = shapes::uvSphere(5, 12);
  Contour rest;
  MatchPath path;  // contour vertex i matched to ring vertex i
  std::vector<int> ringVerts;

  RingSetup() {
    const int segments = 12, ring = 2;
    std::vector<Vec2> pts;
    for (int s = 0; s < segments; ++s) {
      const int v = 1 + ring * segments + s;
      ringVerts.push_back(v);
      pts.push_back({mesh.vertex(v).x(), mesh.vertex(v).y()});
    }
    rest = Contour(std::move(pts), true);
    for (int s = 0; s < segments; ++s)
      path.vertices.push_back({StepKind::Advance, s, mesh.outEdges(ringVerts[s]).front()});
    path.cyclic = true;
  }
};

}  // namespace

TEST_CASE("procrustes alignment") {
  std::vector<Vec3> source = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.3, 0.4, 1.1}, {-1, 0.2, 0.5}};
  SECTION("identity for identical point sets") {
    const RigidTransform t = procrustesAlign(source, source);
    CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(t.translation.norm() < 1e-12);
    CHECK(t.scale == 1.0);
  }
  SECTION("recovers a known rigid transform") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Matrix3d rot =
          Eigen::AngleAxisd(u(rng) * M_PI, Vec3(u(rng), u(rng), u(rng)).normalized())
              .toRotationMatrix();
      const Vec3 shift(u(rng), u(rng), u(rng));
      std::vector<Vec3> target;
      for (const auto& p : source) target.push_back(rot * p + shift);
      const RigidTransform t = procrustesAlign(source, target);
      CHECK((t.rotation - rot).norm() < 1e-9);
      CHECK((t.translation - shift).norm() < 1e-9);
      for (size_t k = 0; k < source.size(); ++k)
        CHECK((t.apply(source[k]) - target[k]).norm() < 1e-9);
    }
  }
  SECTION("similarity mode recovers uniform scale") {
    std::vector<Vec3> target;
    for (const auto& p : source) target.push_back(2.5 * p + Vec3(1, 2, 3));
    const RigidTransform t = procrustesAlign(source, target, /*with_scale=*/true);
    CHECK(t.scale == Catch::Approx(2.5).margin(1e-9));
    for (size_t k = 0; k < source.size(); ++k)
      CHECK((t.apply(source[k]) - target[k]).norm() < 1e-9);
  }
  SECTION("rotation is never a reflection") {
    std::vector<Vec3> target;
    for (const auto& p : source) target.push_back({p.x(), p.y(), -p.z()});  // mirrored
    const RigidTransform t = procrustesAlign(source, target);
    CHECK(t.rotation.determinant() == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("degenerate configurations are rejected") {
    CHECK_THROWS_AS(procrustesAlign({{0, 0, 0}, {1, 0, 0}}, {{0, 0, 0}, {0, 1, 0}}),
                    DegenerateConfiguration);
    std::vector<Vec3> line = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    CHECK_THROWS_AS(procrustesAlign(line, line), DegenerateConfiguration);
    std::vector<Vec3> coincident(4, Vec3(1, 1, 1));
    CHECK_THROWS_AS(procrustesAlign(coincident, coincident), DegenerateConfiguration);
  }
  SECTION("count mismatch") {
    CHECK_THROWS_AS(procrustesAlign(source, {{0, 0, 0}}), DomainError);
  }
}

TEST_CASE("deformation transfer") {
  RingSetup s;
  DeformationInput inp;
  inp.rest = &s.rest;
  inp.mesh = &s.mesh;
  inp.match = &s.path;

  SECTION("zero deformation is a fixed point") {
    inp.deformed = &s.rest;
    inp.anchor_count = 6;
    const TransferResult r = transferDeformationDetailed(inp);
    for (int v = 0; v < s.mesh.numVertices(); ++v)
      CHECK((r.mesh.vertex(v) - s.mesh.vertex(v)).norm() < 1e-6);
    for (size_t k = 1; k < r.energy_trace.size(); ++k)
      CHECK(r.energy_trace[k] <= r.energy_trace[k - 1] + 1e-12);
  }
  SECTION("rigid contour motion rotates the whole mesh") {
    const double angle = 0.7;
    const Eigen::Rotation2Dd q2(angle);
    std::vector<Vec2> moved;
    for (const auto& p : s.rest.vertices()) moved.push_back(q2 * p + Vec2(0.3, -0.2));
    const Contour deformed(std::move(moved), true);
    inp.deformed = &deformed;
    inp.anchor_count = 1000;  // every matched vertex anchors (clamped)
    const TransferResult r = transferDeformationDetailed(inp);
    CHECK(r.anchors_clamped);
    const Eigen::Matrix3d q3 = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
    const Vec3 shift(0.3, -0.2, 0.0);
    for (int v = 0; v < s.mesh.numVertices(); ++v) {
      const Vec3 expect = q3 * s.mesh.vertex(v) + shift;
      CHECK((r.mesh.vertex(v) - expect).norm() < 1e-4);
    }
  }
  SECTION("anchors are met exactly and energy never increases") {
    std::vector<Vec2> stretched;
    for (const auto& p : s.rest.vertices()) stretched.push_back(1.2 * p);
    const Contour deformed(std::move(stretched), true);
    inp.deformed = &deformed;
    inp.anchor_count = 5;
    const TransferResult r = transferDeformationDetailed(inp);
    CHECK(r.anchors_used == 5);
    CHECK_FALSE(r.anchors_clamped);
    for (size_t k = 1; k < r.energy_trace.size(); ++k)
      CHECK(r.energy_trace[k] <= r.energy_trace[k - 1] + 1e-12);
    // reconstruct anchor targets the same way the implementation does
    // (procrustes alignment of the rest contour onto the matched ring is a
    // pure z-shift here, so mapped displacements live in the xy-plane)
    int met = 0;
    for (int v : farthestPointSample(s.mesh, s.ringVerts, 5)) {
      const int idx =
          static_cast<int>(std::find(s.ringVerts.begin(), s.ringVerts.end(), v) - s.ringVerts.begin());
      const Vec2 delta = deformed.vertex(idx) - s.rest.vertex(idx);
      const Vec3 expect = s.mesh.vertex(v) + Vec3(delta.x(), delta.y(), 0.0);
      CHECK((r.mesh.vertex(v) - expect).norm() < 1e-9);
      ++met;
    }
    CHECK(met == 5);
  }
  SECTION("deformed contour of the wrong size is rejected") {
    const Contour wrong = shapes::regularPolygon(5);
    inp.deformed = &wrong;
    CHECK_THROWS_AS(transferDeformation(inp), DomainError);
  }
}
