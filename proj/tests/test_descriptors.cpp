#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "conjmatch/shapes.hpp"
#include "conjmatch/thickness.hpp"

using namespace conjmatch;

TEST_CASE("ray triangle intersection") {
  const Vec3 v0(0, 0, 0), v1(1, 0, 0), v2(0, 1, 0);
  SECTION("axis-aligned hit with barycentrics") {
    const auto hit = rayTriangleIntersect({0.2, 0.2, -1}, {0, 0, 1}, v0, v1, v2);
    REQUIRE(hit);
    CHECK(hit->t == Catch::Approx(1.0));
    CHECK(hit->barycentric.x() == Catch::Approx(0.6));
    CHECK(hit->barycentric.y() == Catch::Approx(0.2));
    CHECK(hit->barycentric.z() == Catch::Approx(0.2));
  }
  SECTION("miss outside the triangle") {
    CHECK_FALSE(rayTriangleIntersect({2, 2, -1}, {0, 0, 1}, v0, v1, v2));
  }
  SECTION("parallel ray") {
    CHECK_FALSE(rayTriangleIntersect({0.2, 0.2, 1}, {1, 0, 0}, v0, v1, v2));
  }
  SECTION("behind the origin") {
    CHECK_FALSE(rayTriangleIntersect({0.2, 0.2, 1}, {0, 0, 1}, v0, v1, v2));
  }
  SECTION("edge grazing accepted within tolerance") {
    const auto hit = rayTriangleIntersect({0.5, 0.0, -1}, {0, 0, 1}, v0, v1, v2);
    REQUIRE(hit);
    CHECK(hit->barycentric.z() == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("2d thickness") {
  SECTION("regular 36-gon is about 2 across") {
    const auto f = thickness2d(shapes::regularPolygon(36));
    for (int i = 0; i < f.size(); ++i) {
      CHECK(f.hit[i]);
      CHECK(f.value[i] >= 1.9);
      CHECK(f.value[i] <= 2.0 + 1e-12);  // supremum 2 reached at antipodes
    }
  }
  SECTION("unit square corner sees the diagonal") {
    const auto f = thickness2d(shapes::unitSquare());
    for (int i = 0; i < 4; ++i) {
      CHECK(f.hit[i]);
      CHECK(f.value[i] == Catch::Approx(std::sqrt(2.0)));
    }
  }
  SECTION("open arc misses everywhere") {
    std::vector<Vec2> pts;
    for (int k = 0; k <= 8; ++k) {
      const double a = M_PI * k / 8.0;
      pts.push_back({std::cos(a), std::sin(a)});
    }
    const Contour arc(std::move(pts), false);
    const auto f = thickness2d(arc);
    for (int i = 0; i < f.size(); ++i) {
      CHECK_FALSE(f.hit[i]);
      CHECK(f.value[i] == Catch::Approx(arc.graphDiameter()));
    }
  }
}

TEST_CASE("3d thickness") {
  SECTION("icosphere is about 2 across") {
    const auto f = thickness3d(shapes::icosphere(2));
    for (int i = 0; i < f.size(); ++i) {
      CHECK(f.hit[i]);
      CHECK(f.value[i] >= 1.85);
      CHECK(f.value[i] <= 2.0 + 1e-12);
    }
  }
  SECTION("single triangle misses") {
    const TriMesh tri({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    const auto f = thickness3d(tri);
    for (int i = 0; i < 3; ++i) CHECK_FALSE(f.hit[i]);
  }
  SECTION("thin slab interior thickness is the gap") {
    // two parallel unit squares at z=0 and z=d, closed with side walls
    const double d = 0.1;
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                           {0, 0, d}, {1, 0, d}, {1, 1, d}, {0, 1, d}};
    std::vector<std::array<int, 3>> f = {
        {0, 2, 1}, {0, 3, 2},  // bottom, normal -z
        {4, 5, 6}, {4, 6, 7},  // top, normal +z
        {0, 1, 5}, {0, 5, 4},  // sides
        {1, 2, 6}, {1, 6, 5},
        {2, 3, 7}, {2, 7, 6},
        {3, 0, 4}, {3, 4, 7}};
    const auto field = thickness3d(TriMesh(v, f));
    for (int j = 0; j < 8; ++j) {
      CHECK(field.hit[j]);
      // corner normals tilt the ray, but the first hit is still nearby
      CHECK(field.value[j] < 3.0 * d);
    }
  }
}

TEST_CASE("thickness invariances") {
  const TriMesh base = shapes::icosphere(1);
  const auto reference = thickness3d(base);
  SECTION("rigid transforms leave thickness alone") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::Matrix3d rot =
          Eigen::AngleAxisd(u(rng) * M_PI, Vec3(u(rng), u(rng), u(rng)).normalized())
              .toRotationMatrix();
      const Vec3 t(u(rng), u(rng), u(rng));
      const auto moved = thickness3d(base.transformed(rot, t));
      for (int j = 0; j < reference.size(); ++j)
        CHECK(moved.value[j] == Catch::Approx(reference.value[j]).margin(1e-9));
    }
  }
  SECTION("uniform scale scales thickness") {
    const auto scaled = thickness3d(base.scaled(2.5));
    for (int j = 0; j < reference.size(); ++j)
      CHECK(scaled.value[j] == Catch::Approx(2.5 * reference.value[j]).epsilon(1e-9));
  }
  SECTION("vertex and face order permutation invariance") {
    std::mt19937 rng(5);
    std::vector<int> perm(base.numVertices());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vec3> verts(base.numVertices());
    for (int v = 0; v < base.numVertices(); ++v) verts[perm[v]] = base.vertex(v);
    std::vector<std::array<int, 3>> faces;
    for (int f = 0; f < base.numFaces(); ++f)
      faces.push_back({perm[base.face(f)[0]], perm[base.face(f)[1]], perm[base.face(f)[2]]});
    std::shuffle(faces.begin(), faces.end(), rng);
    const auto shuffled = thickness3d(TriMesh(verts, faces));
    for (int v = 0; v < base.numVertices(); ++v)
      CHECK(shuffled.value[perm[v]] == Catch::Approx(reference.value[v]).margin(1e-9));
  }
}

TEST_CASE("bvh matches brute force bit for bit") {
  for (const TriMesh& mesh : {shapes::icosphere(2), shapes::octahedron(), shapes::uvSphere(9, 14),
                              shapes::randomConvexHull(3, 10)}) {
    const auto fast = thickness3d(mesh, /*use_bvh=*/true);
    const auto slow = thickness3d(mesh, /*use_bvh=*/false);
    REQUIRE(fast.size() == slow.size());
    for (int j = 0; j < fast.size(); ++j) {
      CHECK(fast.hit[j] == slow.hit[j]);
      CHECK(fast.value[j] == slow.value[j]);  // exact, including tie-breaks
    }
  }
}
