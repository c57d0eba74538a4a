#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "conjmatch/errors.hpp"

namespace conjmatch {

using Vec3 = Eigen::Vector3d;

/// Manifold triangle mesh with directed-edge adjacency. Both orientations of
/// every undirected edge are stored as directed edges; reverse(d) flips
/// orientation. Immutable after construction.
class TriMesh {
 public:
  TriMesh() = default;

  TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces)
      : verts_(std::move(vertices)), faces_(std::move(faces)) {
    buildAdjacency();
    computeNormals();
  }

  int numVertices() const { return static_cast<int>(verts_.size()); }
  int numFaces() const { return static_cast<int>(faces_.size()); }
  int numUndirectedEdges() const { return static_cast<int>(edgeFrom_.size()) / 2; }
  int numDirectedEdges() const { return static_cast<int>(edgeFrom_.size()); }

  const Vec3& vertex(int i) const { return verts_[i]; }
  const std::vector<Vec3>& vertices() const { return verts_; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const Vec3& vertexNormal(int i) const { return normals_[i]; }

  int edgeFrom(int d) const { return edgeFrom_[d]; }
  int edgeTo(int d) const { return edgeTo_[d]; }
  int reverseEdge(int d) const { return d ^ 1; }
  Vec3 edgeVector(int d) const { return verts_[edgeTo_[d]] - verts_[edgeFrom_[d]]; }
  double edgeLength(int d) const { return edgeVector(d).norm(); }

  /// Directed edges leaving vertex v.
  const std::vector<int>& outEdges(int v) const { return outEdges_[v]; }
  /// Directed edges arriving at vertex v.
  const std::vector<int>& inEdges(int v) const { return inEdges_[v]; }

  int directedEdgeId(int from, int to) const {
    for (int d : outEdges_[from])
      if (edgeTo_[d] == to) return d;
    return -1;
  }

  Vec3 bboxMin() const { return reduce([](double a, double b) { return std::min(a, b); }); }
  Vec3 bboxMax() const { return reduce([](double a, double b) { return std::max(a, b); }); }
  double bboxDiagonal() const { return (bboxMax() - bboxMin()).norm(); }

  TriMesh scaled(double s) const {
    std::vector<Vec3> v = verts_;
    for (auto& p : v) p *= s;
    return TriMesh(std::move(v), faces_);
  }

  TriMesh transformed(const Eigen::Matrix3d& R, const Vec3& t) const {
    std::vector<Vec3> v = verts_;
    for (auto& p : v) p = R * p + t;
    return TriMesh(std::move(v), faces_);
  }

 private:
  template <class F>
  Vec3 reduce(F f) const {
    Vec3 r = verts_.at(0);
    for (const auto& p : verts_)
      for (int k = 0; k < 3; ++k) r[k] = f(r[k], p[k]);
    return r;
  }

  void buildAdjacency() {
    if (verts_.empty()) throw ParseError("mesh has no vertices");
    for (const auto& f : faces_)
      for (int v : f)
        if (v < 0 || v >= numVertices()) throw ParseError("face references invalid vertex");

    // undirected edge -> number of incident faces, keyed on sorted pair
    std::map<std::pair<int, int>, int> faceCount;
    std::map<std::pair<int, int>, int> halfCount;  // oriented half-edge occurrences
    for (const auto& f : faces_) {
      for (int k = 0; k < 3; ++k) {
        const int a = f[k], b = f[(k + 1) % 3];
        if (a == b) throw NonManifold("degenerate face with repeated vertex");
        ++faceCount[{std::min(a, b), std::max(a, b)}];
        if (++halfCount[{a, b}] > 1)
          throw NonManifold("inconsistent orientation or duplicated face");
      }
    }
    for (const auto& [e, n] : faceCount)
      if (n > 2)
        throw NonManifold("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                          ") borders " + std::to_string(n) + " faces");

    // directed edges stored pairwise: 2k = (a,b), 2k+1 = (b,a), a < b
    edgeFrom_.clear();
    edgeTo_.clear();
    for (const auto& [e, n] : faceCount) {
      (void)n;
      edgeFrom_.push_back(e.first);
      edgeTo_.push_back(e.second);
      edgeFrom_.push_back(e.second);
      edgeTo_.push_back(e.first);
    }
    outEdges_.assign(verts_.size(), {});
    inEdges_.assign(verts_.size(), {});
    for (int d = 0; d < numDirectedEdges(); ++d) {
      outEdges_[edgeFrom_[d]].push_back(d);
      inEdges_[edgeTo_[d]].push_back(d);
    }
  }

  void computeNormals() {
    normals_.assign(verts_.size(), Vec3::Zero());
    for (const auto& f : faces_) {
      const Vec3& a = verts_[f[0]];
      const Vec3& b = verts_[f[1]];
      const Vec3& c = verts_[f[2]];
      Vec3 n = (b - a).cross(c - a);
      const double len = n.norm();
      if (len < 1e-300) continue;
      n /= len;
      // angle-weighted accumulation
      for (int k = 0; k < 3; ++k) {
        const Vec3& p = verts_[f[k]];
        const Vec3& q = verts_[f[(k + 1) % 3]];
        const Vec3& r = verts_[f[(k + 2) % 3]];
        Vec3 u = (q - p).normalized();
        Vec3 v = (r - p).normalized();
        const double angle = std::acos(std::clamp(u.dot(v), -1.0, 1.0));
        normals_[f[k]] += angle * n;
      }
    }
    for (auto& n : normals_) {
      const double len = n.norm();
      if (len > 1e-14) n /= len;
    }
  }

  std::vector<Vec3> verts_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<Vec3> normals_;
  std::vector<int> edgeFrom_, edgeTo_;
  std::vector<std::vector<int>> outEdges_, inEdges_;
};

namespace detail {

inline TriMesh parseOff(std::istream& in, const std::string& path) {
  std::string tok;
  if (!(in >> tok) || tok != "OFF") throw ParseError(path + ": missing OFF header");
  int nv, nf, ne;
  if (!(in >> nv >> nf >> ne)) throw ParseError(path + ": bad OFF counts");
  std::vector<Vec3> verts(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> verts[i].x() >> verts[i].y() >> verts[i].z()))
      throw ParseError(path + ": bad vertex line");
  std::vector<std::array<int, 3>> faces(nf);
  for (int i = 0; i < nf; ++i) {
    int k;
    if (!(in >> k)) throw ParseError(path + ": bad face line");
    if (k != 3) throw NonTriangular(path + ": face with " + std::to_string(k) + " vertices");
    if (!(in >> faces[i][0] >> faces[i][1] >> faces[i][2]))
      throw ParseError(path + ": bad face line");
  }
  return TriMesh(std::move(verts), std::move(faces));
}

inline TriMesh parseObj(std::istream& in, const std::string& path) {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw ParseError(path + ": bad vertex line");
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string ref;
      while (ls >> ref) {
        // take the vertex index before any '/'
        idx.push_back(std::stoi(ref.substr(0, ref.find('/'))));
      }
      if (idx.size() != 3) throw NonTriangular(path + ": non-triangular face");
      std::array<int, 3> f;
      for (int k = 0; k < 3; ++k) f[k] = idx[k] > 0 ? idx[k] - 1 : static_cast<int>(verts.size()) + idx[k];
      faces.push_back(f);
    }
  }
  return TriMesh(std::move(verts), std::move(faces));
}

inline TriMesh parsePly(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw ParseError(path + ": not a PLY file");
  int nv = -1, nf = -1;
  int xyzProps = 0;
  bool inVertexElement = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw ParseError(path + ": only ASCII PLY is supported");
    } else if (tag == "element") {
      std::string name;
      int count;
      ls >> name >> count;
      inVertexElement = (name == "vertex");
      if (name == "vertex") nv = count;
      if (name == "face") nf = count;
    } else if (tag == "property" && inVertexElement) {
      ++xyzProps;
    } else if (tag == "end_header") {
      break;
    }
  }
  if (nv < 0 || nf < 0) throw ParseError(path + ": incomplete PLY header");
  std::vector<Vec3> verts(nv);
  for (int i = 0; i < nv; ++i) {
    std::getline(in, line);
    std::istringstream ls(line);
    if (!(ls >> verts[i].x() >> verts[i].y() >> verts[i].z()))
      throw ParseError(path + ": bad vertex line");
  }
  std::vector<std::array<int, 3>> faces(nf);
  for (int i = 0; i < nf; ++i) {
    std::getline(in, line);
    std::istringstream ls(line);
    int k;
    if (!(ls >> k)) throw ParseError(path + ": bad face line");
    if (k != 3) throw NonTriangular(path + ": face with " + std::to_string(k) + " vertices");
    if (!(ls >> faces[i][0] >> faces[i][1] >> faces[i][2]))
      throw ParseError(path + ": bad face line");
  }
  return TriMesh(std::move(verts), std::move(faces));
}

}  // namespace detail

inline TriMesh loadMesh(const std::string& path, const std::string& format = "") {
  std::string fmt = format;
  if (fmt.empty()) {
    auto ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (!ext.empty()) fmt = ext.substr(1);
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  if (fmt == "off") return detail::parseOff(in, path);
  if (fmt == "obj") return detail::parseObj(in, path);
  if (fmt == "ply") return detail::parsePly(in, path);
  throw ParseError("unknown mesh format: " + fmt);
}

inline void saveMesh(const TriMesh& mesh, const std::string& path, const std::string& format = "") {
  std::string fmt = format;
  if (fmt.empty()) {
    auto ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (!ext.empty()) fmt = ext.substr(1);
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  char buf[128];
  if (fmt == "off") {
    out << "OFF\n" << mesh.numVertices() << " " << mesh.numFaces() << " 0\n";
    for (const auto& v : mesh.vertices()) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
      out << buf;
    }
    for (const auto& f : mesh.faces()) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
  } else if (fmt == "obj") {
    for (const auto& v : mesh.vertices()) {
      std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
      out << buf;
    }
    for (const auto& f : mesh.faces())
      out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  } else if (fmt == "ply") {
    out << "ply\nformat ascii 1.0\nelement vertex " << mesh.numVertices()
        << "\nproperty double x\nproperty double y\nproperty double z\nelement face "
        << mesh.numFaces() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (const auto& v : mesh.vertices()) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
      out << buf;
    }
    for (const auto& f : mesh.faces()) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
  } else {
    throw ParseError("unknown mesh format: " + fmt);
  }
}

}  // namespace conjmatch
