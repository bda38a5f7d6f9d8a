#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "octaframe/error.hpp"
#include "octaframe/generate.hpp"
#include "octaframe/io.hpp"

using namespace octaframe;
using testing::Gen;

namespace {

const char* kTwoTets = R"(MeshVersionFormatted 2
Dimension 3
Vertices
5
0 0 0 0
1 0 0 0
0 1 0 0
0 0 1 0
0 0 -1 0
Tetrahedra
2
1 2 3 4 1
1 3 2 5 1
Edges
2
1 2 7
2 3 8
Corners
1
1
End
)";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("MEDIT: two tets sharing a face") {
  std::istringstream in(kTwoTets);
  const TetMesh m = parse_medit(in);
  CHECK(m.num_vertices() == 5);
  CHECK(m.num_tets() == 2);
  CHECK(m.boundary_tris.size() == 6);
  for (int t = 0; t < 2; ++t) CHECK(m.tet_volume(t) == doctest::Approx(1.0 / 6.0));
  REQUIRE(m.feature_edges.size() == 2);
  CHECK(m.feature_edges[0].v == std::array<int, 2>{0, 1});
  CHECK(m.feature_edges[0].curve == 7);
  CHECK(m.feature_edges[1].curve == 8);
  CHECK(m.corners == std::vector<int>{0});
}

TEST_CASE("MEDIT: malformed input") {
  std::string truncated(kTwoTets);
  truncated = truncated.substr(0, truncated.find("Tetrahedra") + 14);
  std::istringstream a(truncated);
  CHECK(kind_of([&] { parse_medit(a); }) == ErrorKind::ParseError);

  std::string bad_index(kTwoTets);
  bad_index.replace(bad_index.find("1 3 2 5 1"), 9, "1 3 2 9 1");
  std::istringstream b(bad_index);
  CHECK(kind_of([&] { parse_medit(b); }) == ErrorKind::IndexOutOfRange);

  std::string junk(kTwoTets);
  junk.replace(junk.find("0 0 -1 0"), 8, "0 0 x 0");
  std::istringstream c(junk);
  CHECK(kind_of([&] { parse_medit(c); }) == ErrorKind::ParseError);

  CHECK(kind_of([] { read_medit("/nonexistent/mesh.mesh"); }) == ErrorKind::IoError);
}

TEST_CASE("MEDIT: write and read back a generated box") {
  const TetMesh m = generate_box(3, 2, 2);
  const auto path = testing::scratch_dir("io_medit") / "box.mesh";
  write_medit(m, path);
  const TetMesh r = read_medit(path);
  REQUIRE(r.num_vertices() == m.num_vertices());
  for (std::size_t v = 0; v < m.num_vertices(); ++v) CHECK(r.vertices[v] == m.vertices[v]);
  CHECK(r.tets == m.tets);
  CHECK(r.boundary_tris.size() == m.boundary_tris.size());
  CHECK(r.feature_edges.size() == m.feature_edges.size());
  for (std::size_t e = 0; e < m.feature_edges.size(); ++e) {
    CHECK(r.feature_edges[e].v == m.feature_edges[e].v);
    CHECK(r.feature_edges[e].curve == m.feature_edges[e].curve);
  }
  CHECK(r.corners == m.corners);
}

TEST_CASE("VTK: empty graph writes a valid file") {
  const auto path = testing::scratch_dir("io_vtk") / "empty.vtk";
  write_vtk_polylines({}, path);
  CHECK(read_vtk_polylines(path).empty());
}

TEST_CASE("VTK: polylines round-trip") {
  Gen g(51);
  std::vector<Polyline> lines(3);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t k = 0; k < 5 + i; ++k) lines[i].points.push_back(Vec3(g.normal(), g.normal(), g.normal()));
    lines[i].valence = i == 0 ? 35 : 33;
    lines[i].is_35 = i == 0;
  }
  const auto path = testing::scratch_dir("io_vtk") / "lines.vtk";
  write_vtk_polylines(lines, path);
  const std::vector<Polyline> back = read_vtk_polylines(path);
  REQUIRE(back.size() == lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    REQUIRE(back[i].points.size() == lines[i].points.size());
    for (std::size_t k = 0; k < lines[i].points.size(); ++k) CHECK((back[i].points[k] - lines[i].points[k]).norm() < 1e-15);
    CHECK(back[i].valence == lines[i].valence);
    CHECK(back[i].is_35 == lines[i].is_35);
  }
}

TEST_CASE("field: bit-exact round-trip and count check") {
  const Domain d = testing::box_domain(3, 3, 2);
  Gen g(52);
  FrameField f;
  for (std::size_t v = 0; v < d.mesh.num_vertices(); ++v) f.coeffs.push_back(g.coeffs());
  update_projection(f);
  const auto path = testing::scratch_dir("io_field") / "field.txt";
  write_field(f, path);
  const FrameField r = read_field(path, d.mesh);
  REQUIRE(r.size() == f.size());
  for (std::size_t v = 0; v < f.size(); ++v) {
    CHECK(r.coeffs[v] == f.coeffs[v]);
    CHECK(r.frames[v] == f.frames[v]);
  }
  const Domain other = testing::box_domain(2, 2, 2);
  CHECK(kind_of([&] { read_field(path, other.mesh); }) == ErrorKind::CountMismatch);
}
