#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "octaframe/error.hpp"
#include "octaframe/features.hpp"
#include "octaframe/generate.hpp"

using namespace octaframe;
using testing::Gen;

namespace {

int count_valence(const FeatureSet& fs, int valence) {
  int n = 0;
  for (const FeatureCurve& c : fs.curves) n += c.target_valence == valence ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("valence bins") {
  CHECK_THROWS_AS(classify_feature_valence(44.9), Error);
  CHECK(classify_feature_valence(45.0) == 1);
  CHECK(classify_feature_valence(90.0) == 1);
  CHECK(classify_feature_valence(134.9) == 1);
  CHECK(classify_feature_valence(135.0) == 2);
  CHECK(classify_feature_valence(180.0) == 2);
  CHECK(classify_feature_valence(224.9) == 2);
  CHECK(classify_feature_valence(225.0) == 3);
  CHECK(classify_feature_valence(270.0) == 3);
  CHECK(classify_feature_valence(315.0) == 4);
  CHECK(classify_feature_valence(360.0) == 4);
  try {
    classify_feature_valence(10.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDihedral);
  }
}

TEST_CASE("property: wedge angles of swapped rays add up to a full turn") {
  Gen g(41);
  for (int i = 0; i < 500; ++i) {
    const Vec3 t = g.unit();
    const Vec3 u = t.unitOrthogonal();
    const Vec3 w = t.cross(u);
    const double a = g.uniform(0.0, 2 * std::numbers::pi), b = g.uniform(0.0, 2 * std::numbers::pi);
    const Vec3 r0 = std::cos(a) * u + std::sin(a) * w, r1 = std::cos(b) * u + std::sin(b) * w;
    const double s = wedge_angle(t, r0, r1) + wedge_angle(t, r1, r0);
    CHECK(s == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
    const double d = wedge_angle(t, r0, r1);
    CHECK(d >= 0.0);
    CHECK(d < 2 * std::numbers::pi);
    CHECK(std::abs(std::remainder(std::abs(d - (a - b)), 2 * std::numbers::pi)) < 1e-9);
  }
}

TEST_CASE("box edges form 12 straight curves of valence 1 and 8 corners") {
  const TetMesh m = generate_box(3, 3, 3);
  const Topology topo(m);
  for (FeatureSource src : {FeatureSource::TagsOnly, FeatureSource::DetectionOnly, FeatureSource::TagsAndDetection}) {
    const FeatureSet fs = detect_features(m, topo, 30.0, src);
    CHECK(fs.curves.size() == 12);
    CHECK(fs.corners.size() == 8);
    CHECK(fs.edges.size() == 36);
    CHECK(count_valence(fs, 1) == 12);
    CHECK(fs.patches.size() == 6);
    CHECK(fs.total_patch_area() == doctest::Approx(6.0));
    for (const FeatureCurve& c : fs.curves) {
      CHECK(c.dihedral_angle == doctest::Approx(90.0));
      CHECK(c.size() == 4);
      CHECK_FALSE(c.closed);
    }
  }
}

TEST_CASE("edge wedge of a box edge is a right angle between the two faces") {
  const TetMesh m = generate_box(2, 2, 2);
  const Topology topo(m);
  const FeatureSet fs = detect_features(m, topo);
  for (const auto& e : fs.edges) {
    const EdgeWedge w = edge_wedge(m, topo, e[0], e[1]);
    CHECK(w.interior_angle_deg == doctest::Approx(90.0));
    CHECK(std::abs(w.rays[0].dot(w.rays[1])) < 1e-12);
    CHECK(std::abs(w.normals[0].dot(w.normals[1])) < 1e-12);
    CHECK(wedge_angle(w.tangent, w.rays[0], w.rays[1]) * 180 / std::numbers::pi == doctest::Approx(90.0));
    for (int s = 0; s < 2; ++s) {
      CHECK(std::abs(w.rays[s].dot(w.tangent)) < 1e-12);
      CHECK(std::abs(w.rays[s].dot(w.normals[s])) < 1e-12);
    }
  }
}

TEST_CASE("L-shaped domain: one concave valence-3 curve") {
  const TetMesh m = testing::l_shape_mesh();
  const Topology topo(m);
  const FeatureSet fs = build_features(m, topo);
  CHECK(fs.curves.size() == 18);
  CHECK(fs.corners.size() == 12);
  CHECK(count_valence(fs, 3) == 1);
  CHECK(count_valence(fs, 1) == 17);
  for (const FeatureCurve& c : fs.curves) {
    if (c.target_valence != 3) continue;
    CHECK(c.dihedral_angle == doctest::Approx(270.0));
    for (int v : c.vertices) {
      CHECK(m.vertices[v].x() == doctest::Approx(0.5));
      CHECK(m.vertices[v].y() == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("flat boundary edges are not features below the threshold") {
  BoxOptions o;
  o.deformation = BoxDeformation::Bulge;
  o.amplitude = 0.05;
  const TetMesh m = generate_box(6, 6, 2, o);
  const Topology topo(m);
  const FeatureSet fs = detect_features(m, topo, 30.0, FeatureSource::DetectionOnly);
  CHECK(fs.curves.size() == 12);
  CHECK(fs.corners.size() == 8);
}

TEST_CASE("vertex classification covers every boundary vertex") {
  const TetMesh m = generate_box(3, 4, 2);
  const Topology topo(m);
  const FeatureSet fs = build_features(m, topo);
  for (int v = 0; v < static_cast<int>(m.num_vertices()); ++v) {
    if (!topo.is_boundary_vertex(v)) continue;
    const bool feature = fs.is_feature_vertex(v);
    CHECK(feature != (fs.vertex_patch[v] >= 0));
    CHECK(fs.vertex_normal[v].norm() == doctest::Approx(1.0));
  }
}
