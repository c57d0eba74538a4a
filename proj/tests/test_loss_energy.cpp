#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"

using namespace conjmatch;

TEST_CASE("robust loss values") {
  SECTION("zero input gives zero for all parameter sets") {
    for (const auto& p : {defaultDataLoss(), defaultRigidityLoss(),
                          RobustLossParams{0.0, 0.3, LossBowl::Quadratic},
                          RobustLossParams{2.0, 0.5, LossBowl::Cubic}})
      CHECK(robustLoss(0.0, p) == 0.0);
  }
  SECTION("data loss at x = c") {
    CHECK(robustLoss(0.15, defaultDataLoss()) == Catch::Approx(0.4).margin(1e-12));
  }
  SECTION("saturation for alpha = -2") {
    CHECK(robustLoss(100.0 * 0.15, defaultDataLoss()) == Catch::Approx(2.0).epsilon(0.01));
    CHECK(robustLoss(1e9, defaultDataLoss()) == Catch::Approx(2.0).epsilon(1e-6));
  }
  SECTION("analytic special cases") {
    // alpha = 2: plain half bowl
    CHECK(robustLoss(0.3, {2.0, 0.3, LossBowl::Quadratic}) == Catch::Approx(0.5));
    // alpha = 0: log form
    CHECK(robustLoss(0.3, {0.0, 0.3, LossBowl::Quadratic}) == Catch::Approx(std::log(1.5)));
    // continuity at the special cases
    CHECK(robustLoss(0.2, {1e-13, 0.3, LossBowl::Quadratic}) ==
          Catch::Approx(robustLoss(0.2, {1e-6, 0.3, LossBowl::Quadratic})).margin(1e-5));
  }
  SECTION("cubic bowl is flatter near zero") {
    const RobustLossParams quad{0.7, 0.6, LossBowl::Quadratic};
    const RobustLossParams cubic{0.7, 0.6, LossBowl::Cubic};
    CHECK(robustLoss(0.05, cubic) < robustLoss(0.05, quad));
  }
  SECTION("monotone nondecreasing on a grid") {
    for (const auto& p : {defaultDataLoss(), defaultRigidityLoss(),
                          RobustLossParams{0.0, 0.3, LossBowl::Quadratic},
                          RobustLossParams{2.0, 0.5, LossBowl::Cubic}}) {
      double prev = 0.0;
      for (int k = 1; k <= 1000; ++k) {
        const double x = 5.0 * k / 1000.0;
        const double v = robustLoss(x, p);
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
  }
  SECTION("domain errors") {
    CHECK_THROWS_AS(robustLoss(-0.1, defaultDataLoss()), DomainError);
    CHECK_THROWS_AS(robustLoss(0.1, {1.0, 0.0, LossBowl::Quadratic}), DomainError);
  }
}

TEST_CASE("frame rotations") {
  SECTION("identical frames give the identity quaternion") {
    const Contour c(std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
    // edge 0 runs along +x with outward normal -y; build a matching 3D frame
    const LocalFrame f2d = contourEdgeFrame(c, 0);
    const Quat q = frameRotation(f2d, f2d);
    CHECK(q.w() == Catch::Approx(1.0).margin(1e-12));
    CHECK(q.vec().norm() == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("90 degrees about z") {
    const Contour c(std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
    const LocalFrame f2d = contourEdgeFrame(c, 0);
    LocalFrame rotated = f2d;
    rotated.axes = Eigen::AngleAxisd(M_PI / 2.0, Vec3::UnitZ()).toRotationMatrix() * f2d.axes;
    const Quat q = frameRotation(f2d, rotated);
    CHECK(std::abs(q.w()) == Catch::Approx(std::cos(M_PI / 4.0)).margin(1e-12));
    CHECK(std::abs(q.z()) == Catch::Approx(std::sin(M_PI / 4.0)).margin(1e-12));
    CHECK(std::abs(q.x()) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("random rotations are recovered") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Contour c = shapes::regularPolygon(5);
    const LocalFrame f2d = contourEdgeFrame(c, 1);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Matrix3d rot =
          Eigen::AngleAxisd(u(rng) * M_PI, Vec3(u(rng), u(rng), u(rng)).normalized())
              .toRotationMatrix();
      LocalFrame f3d = f2d;
      f3d.axes = rot * f2d.axes;
      Quat expect(rot);
      expect.normalize();
      if (expect.w() < 0.0) expect.coeffs() = -expect.coeffs();
      const Quat got = frameRotation(f2d, f3d);
      CHECK((got.coeffs() - expect.coeffs()).norm() < 1e-9);
    }
  }
  SECTION("zero-length edge is rejected") {
    CHECK_THROWS_AS(detail::makeFrame(Vec3::Zero(), Vec3::Zero(), Vec3::UnitY()), DegenerateFrame);
  }
  SECTION("quaternion angle handles the double cover") {
    const Quat q1 = Quat::Identity();
    Quat q2(Eigen::AngleAxisd(M_PI / 2.0, Vec3::UnitZ()));
    CHECK(quaternionAngle(q1, q1) == 0.0);
    Quat neg = q1;
    neg.coeffs() = -neg.coeffs();
    CHECK(quaternionAngle(q1, neg) == 0.0);
    CHECK(quaternionAngle(q1, q2) == Catch::Approx(M_PI / 4.0));
  }
}

TEST_CASE("energy terms") {
  const Contour contour = shapes::regularPolygon(4);
  const TriMesh mesh = shapes::tetrahedron();
  ThicknessField t2d, t3d;
  t2d.value = {1.0, 0.5, 2.0, 0.25};
  t2d.hit.assign(4, 1);
  t3d.value = {1.0, 0.65, 2.0, 1.9};
  t3d.hit.assign(4, 1);
  const EnergyModel model(contour, mesh, t2d, t3d);
  const LayeredGraph graph(contour, mesh);

  SECTION("d_data at the shared vertices") {
    // head advance step: shared contour vertex = its contour index, shared
    // mesh vertex = the directed edge's source
    const int d = 0;
    const int j = mesh.edgeFrom(d);
    const ConjugateVertex tail{StepKind::Advance, 0, 0};
    const ConjugateVertex head{StepKind::Advance, 1, d};
    const double expect = robustLoss(std::abs(t2d.value[1] - t3d.value[j]), defaultDataLoss());
    CHECK(model.dData(tail, head) == Catch::Approx(expect).margin(1e-15));
  }
  SECTION("equal thickness gives zero data cost") {
    ThicknessField flat2d, flat3d;
    flat2d.value.assign(4, 1.3);
    flat2d.hit.assign(4, 1);
    flat3d.value.assign(4, 1.3);
    flat3d.hit.assign(4, 1);
    const EnergyModel flat(contour, mesh, flat2d, flat3d);
    const ConjugateVertex tail{StepKind::Advance, 0, 0};
    const ConjugateVertex head{StepKind::Advance, 1, 2};
    CHECK(flat.dData(tail, head) == 0.0);
  }
  SECTION("miss fallback saturates the data loss") {
    const double x = std::abs(4.0 - 2.0);  // fallback-sized difference at unit scale
    CHECK(robustLoss(x, defaultDataLoss()) > 0.95 * 2.0);
  }
  SECTION("identical rotations give zero regularity cost") {
    const ConjugateVertex v{StepKind::Advance, 0, 3};
    CHECK(model.dReg(v, {StepKind::MeshHold, 1, 3}) ==
          Catch::Approx(robustLoss(quaternionAngle(model.rotation(0, 3), model.rotation(1, 3)),
                                   defaultRigidityLoss()))
              .margin(1e-15));
    // same contour edge, same mesh edge: pausing the contour keeps the frame
    const ConjugateVertex hold{StepKind::ContourHold, 1, 3};
    CHECK(model.rotation(hold).coeffs() == model.rotation(0, 3).coeffs());
  }
  SECTION("edge cost is the sum of both terms") {
    std::mt19937 rng(7);
    const auto verts = oracle::allVertices(contour, mesh);
    std::uniform_int_distribution<size_t> pick(0, verts.size() - 1);
    int checked = 0;
    while (checked < 25) {
      const auto& tail = verts[pick(rng)];
      const auto& head = verts[pick(rng)];
      if (!oracle::adjacent(contour, mesh, {}, tail, head)) continue;
      CHECK(model.edgeCost(tail, head) ==
            Catch::Approx(model.dData(tail, head) + model.dReg(tail, head)).margin(1e-15));
      ++checked;
    }
  }
}

TEST_CASE("energy rigid invariance") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto inst = oracle::randomInstance(77);
  const EnergyModel model(inst.contour, inst.mesh, inst.t2d, inst.t3d);
  const LayeredGraph graph(inst.contour, inst.mesh);

  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(u(rng) * M_PI, Vec3(u(rng), u(rng), u(rng)).normalized())
            .toRotationMatrix();
    const Vec3 t(u(rng), u(rng), u(rng));
    const TriMesh moved = inst.mesh.transformed(rot, t);
    const EnergyModel movedModel(inst.contour, moved, inst.t2d, inst.t3d);

    const auto verts = oracle::allVertices(inst.contour, inst.mesh);
    for (const auto& tail : verts) {
      if (tail.contour_index > 1) continue;  // a couple of layers is plenty
      graph.forEachOutNeighbor(tail, [&](const ConjugateVertex& head, bool) {
        CHECK(movedModel.edgeCost(tail, head) ==
              Catch::Approx(model.edgeCost(tail, head)).margin(1e-9));
      });
    }
  }
}
