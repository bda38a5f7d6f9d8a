#include "octaframe/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "octaframe/error.hpp"

namespace octaframe {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string word;
    while (ss >> word) tokens.push_back({word, number});
  }
  return tokens;
}

class TokenReader {
 public:
  TokenReader(std::vector<Token> tokens, std::string source) : tokens_(std::move(tokens)), source_(std::move(source)) {}

  [[nodiscard]] bool done() const { return pos_ >= tokens_.size(); }
  const Token& next(const std::string& section) {
    if (done()) fail(section, "unexpected end of file", last_line());
    return tokens_[pos_++];
  }
  long long next_int(const std::string& section) {
    const Token& t = next(section);
    long long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(section, "expected an integer, got '" + t.text + "'", t.line);
    return v;
  }
  double next_double(const std::string& section) {
    const Token& t = next(section);
    double v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(section, "expected a number, got '" + t.text + "'", t.line);
    return v;
  }
  [[noreturn]] void fail(const std::string& section, const std::string& what, int line) const {
    throw Error(ErrorKind::ParseError,
                source_ + ":" + std::to_string(line) + ": " + what + " in section " + section);
  }
  [[nodiscard]] int last_line() const { return tokens_.empty() ? 0 : tokens_.back().line; }
  [[nodiscard]] int line() const { return done() ? last_line() : tokens_[pos_].line; }

 private:
  std::vector<Token> tokens_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  return in;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

TetMesh parse_medit(std::istream& in, const std::string& source) {
  TokenReader r(tokenize(in), source);
  TetMesh mesh;
  bool ended = false;
  auto count = [&](const std::string& section) {
    const long long n = r.next_int(section);
    if (n < 0) r.fail(section, "negative count", r.line());
    return n;
  };
  auto vertex_ref = [&](const std::string& section) {
    const int line = r.line();
    const long long id = r.next_int(section);
    if (id < 1 || id > static_cast<long long>(mesh.vertices.size())) {
      throw Error(ErrorKind::IndexOutOfRange, source + ":" + std::to_string(line) + ": vertex " + std::to_string(id) +
                                                  " out of range in section " + section);
    }
    return static_cast<int>(id - 1);
  };
  while (!r.done() && !ended) {
    const Token& kw = r.next("header");
    const std::string& s = kw.text;
    if (s == "MeshVersionFormatted") {
      r.next_int(s);
    } else if (s == "Dimension") {
      if (r.next_int(s) != 3) r.fail(s, "only 3D meshes are supported", kw.line);
    } else if (s == "Vertices") {
      const long long n = count(s);
      mesh.vertices.reserve(static_cast<std::size_t>(n));
      for (long long i = 0; i < n; ++i) {
        Vec3 p;
        p.x() = r.next_double(s);
        p.y() = r.next_double(s);
        p.z() = r.next_double(s);
        r.next_int(s);
        mesh.vertices.push_back(p);
      }
    } else if (s == "Tetrahedra") {
      const long long n = count(s);
      mesh.tets.reserve(static_cast<std::size_t>(n));
      for (long long i = 0; i < n; ++i) {
        std::array<int, 4> t{};
        for (int& v : t) v = vertex_ref(s);
        r.next_int(s);
        mesh.tets.push_back(t);
      }
    } else if (s == "Triangles") {
      const long long n = count(s);
      for (long long i = 0; i < n; ++i) {
        BoundaryTriangle bt;
        for (int& v : bt.v) v = vertex_ref(s);
        bt.patch = static_cast<int>(r.next_int(s));
        mesh.boundary_tris.push_back(bt);
      }
    } else if (s == "Edges") {
      const long long n = count(s);
      for (long long i = 0; i < n; ++i) {
        FeatureEdge fe;
        for (int& v : fe.v) v = vertex_ref(s);
        fe.curve = static_cast<int>(r.next_int(s));
        mesh.feature_edges.push_back(fe);
      }
    } else if (s == "Corners") {
      const long long n = count(s);
      for (long long i = 0; i < n; ++i) mesh.corners.push_back(vertex_ref(s));
    } else if (s == "End") {
      ended = true;
    } else {
      r.fail("header", "unknown keyword '" + s + "'", kw.line);
    }
  }
  if (!ended) r.fail("End", "missing End keyword", r.last_line());
  if (mesh.tets.empty()) r.fail("Tetrahedra", "mesh has no tetrahedra", r.last_line());
  finalize_mesh(mesh);
  return mesh;
}

TetMesh read_medit(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_medit(in, path.string());
}

void write_medit(const TetMesh& mesh, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "MeshVersionFormatted 2\nDimension 3\n\nVertices\n" << mesh.vertices.size() << '\n';
  for (const auto& p : mesh.vertices) out << fmt17(p.x()) << ' ' << fmt17(p.y()) << ' ' << fmt17(p.z()) << " 0\n";
  out << "\nTetrahedra\n" << mesh.tets.size() << '\n';
  for (const auto& t : mesh.tets) out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' ' << t[3] + 1 << " 0\n";
  out << "\nTriangles\n" << mesh.boundary_tris.size() << '\n';
  for (const auto& bt : mesh.boundary_tris) {
    out << bt.v[0] + 1 << ' ' << bt.v[1] + 1 << ' ' << bt.v[2] + 1 << ' ' << bt.patch << '\n';
  }
  if (!mesh.feature_edges.empty()) {
    out << "\nEdges\n" << mesh.feature_edges.size() << '\n';
    for (const auto& e : mesh.feature_edges) out << e.v[0] + 1 << ' ' << e.v[1] + 1 << ' ' << e.curve << '\n';
  }
  if (!mesh.corners.empty()) {
    out << "\nCorners\n" << mesh.corners.size() << '\n';
    for (int c : mesh.corners) out << c + 1 << '\n';
  }
  out << "\nEnd\n";
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_vtk_polylines(const std::vector<Polyline>& lines, const std::filesystem::path& path,
                         const std::string& title) {
  auto out = open_output(path);
  std::size_t npts = 0;
  for (const auto& l : lines) npts += l.points.size();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << npts << " double\n";
  for (const auto& l : lines) {
    for (const auto& p : l.points) out << fmt17(p.x()) << ' ' << fmt17(p.y()) << ' ' << fmt17(p.z()) << '\n';
  }
  out << "LINES " << lines.size() << ' ' << npts + lines.size() << '\n';
  std::size_t offset = 0;
  for (const auto& l : lines) {
    out << l.points.size();
    for (std::size_t i = 0; i < l.points.size(); ++i) out << ' ' << offset + i;
    out << '\n';
    offset += l.points.size();
  }
  if (!lines.empty()) {
    out << "CELL_DATA " << lines.size() << "\nSCALARS valence int 1\nLOOKUP_TABLE default\n";
    for (const auto& l : lines) out << l.valence << '\n';
    out << "SCALARS is_35 int 1\nLOOKUP_TABLE default\n";
    for (const auto& l : lines) out << l.is_35 << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<Polyline> read_vtk_polylines(const std::filesystem::path& path) {
  auto in = open_input(path);
  // Skip the version and title lines, which may contain arbitrary text.
  std::string header, title;
  std::getline(in, header);
  std::getline(in, title);
  if (header.rfind("# vtk DataFile", 0) != 0) throw Error(ErrorKind::ParseError, path.string() + ":1: not a VTK file");
  TokenReader r(tokenize(in), path.string());
  std::vector<Vec3> points;
  std::vector<Polyline> lines;
  std::vector<std::vector<long long>> ids;
  std::string scalar;
  while (!r.done()) {
    const Token& kw = r.next("header");
    const std::string& s = kw.text;
    if (s == "ASCII" || s == "LOOKUP_TABLE") {
      if (s == "LOOKUP_TABLE") r.next(s);
    } else if (s == "DATASET") {
      if (r.next(s).text != "POLYDATA") r.fail(s, "expected POLYDATA", kw.line);
    } else if (s == "POINTS") {
      const long long n = r.next_int(s);
      r.next(s);
      points.resize(static_cast<std::size_t>(n));
      for (auto& p : points) {
        p.x() = r.next_double(s);
        p.y() = r.next_double(s);
        p.z() = r.next_double(s);
      }
    } else if (s == "LINES") {
      const long long n = r.next_int(s);
      r.next_int(s);
      for (long long i = 0; i < n; ++i) {
        const long long k = r.next_int(s);
        Polyline l;
        for (long long j = 0; j < k; ++j) {
          const long long id = r.next_int(s);
          if (id < 0 || id >= static_cast<long long>(points.size())) {
            throw Error(ErrorKind::IndexOutOfRange, path.string() + ": point id out of range in LINES");
          }
          l.points.push_back(points[static_cast<std::size_t>(id)]);
        }
        lines.push_back(std::move(l));
      }
    } else if (s == "CELL_DATA") {
      r.next_int(s);
    } else if (s == "SCALARS") {
      const std::string name = r.next(s).text;
      r.next(s);
      r.next_int(s);
      if (r.next(s).text != "LOOKUP_TABLE") r.fail(s, "expected LOOKUP_TABLE", kw.line);
      r.next(s);
      for (auto& l : lines) {
        const int v = static_cast<int>(r.next_int(s));
        if (name == "valence") l.valence = v;
        if (name == "is_35") l.is_35 = v;
      }
    } else {
      r.fail("header", "unknown keyword '" + s + "'", kw.line);
    }
  }
  return lines;
}

std::vector<Polyline> graph_polylines(const TetMesh& mesh, const SingularityGraph& graph) {
  std::vector<Polyline> out;
  out.reserve(graph.chains.size());
  for (const auto& c : graph.chains) {
    Polyline l;
    l.points = c.polyline(mesh, graph.faces);
    l.valence = 10 * c.valence_start + c.valence_end;
    l.is_35 = c.is_35 ? 1 : 0;
    out.push_back(std::move(l));
  }
  return out;
}

void write_vtk_graph(const TetMesh& mesh, const SingularityGraph& graph, const std::filesystem::path& path) {
  write_vtk_polylines(graph_polylines(mesh, graph), path, "octaframe singularity graph");
}

void write_field(const FrameField& field, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "octaframe-field " << field.coeffs.size() << '\n';
  for (std::size_t v = 0; v < field.coeffs.size(); ++v) {
    for (int i = 0; i < 9; ++i) out << (i ? " " : "") << fmt17(field.coeffs[v][i]);
    const Mat3 R = v < field.frames.size() ? field.frames[v] : Mat3::Identity();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out << ' ' << fmt17(R(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

FrameField read_field(const std::filesystem::path& path, const TetMesh& mesh) {
  auto in = open_input(path);
  TokenReader r(tokenize(in), path.string());
  if (r.next("header").text != "octaframe-field") r.fail("header", "not a field file", 1);
  const long long n = r.next_int("header");
  if (n != static_cast<long long>(mesh.num_vertices())) {
    throw Error(ErrorKind::CountMismatch, path.string() + ": field has " + std::to_string(n) + " vertices, mesh has " +
                                              std::to_string(mesh.num_vertices()));
  }
  FrameField field;
  field.coeffs.resize(static_cast<std::size_t>(n));
  field.frames.resize(static_cast<std::size_t>(n));
  field.quality.resize(static_cast<std::size_t>(n));
  for (long long v = 0; v < n; ++v) {
    for (int i = 0; i < 9; ++i) field.coeffs[v][i] = r.next_double("field");
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) field.frames[v](i, j) = r.next_double("field");
    }
    const double norm = field.coeffs[v].norm();
    field.quality[v] = norm < 1e-9 ? 0.0 : field.coeffs[v].dot(rotate_reference(field.frames[v])) / norm;
  }
  return field;
}

}  // namespace octaframe
