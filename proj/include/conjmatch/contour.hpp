#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "conjmatch/errors.hpp"
#include "json.hpp"

namespace conjmatch {

using Vec2 = Eigen::Vector2d;

/// Closed (or open, in partial mode) polygonal contour. Edge k connects
/// vertex k to vertex k+1; for closed contours the last edge wraps around.
/// Closed contours are normalised to counter-clockwise orientation.
class Contour {
 public:
  Contour() = default;

  Contour(std::vector<Vec2> vertices, bool closed) : verts_(std::move(vertices)), closed_(closed) {
    validate();
    if (closed_ && signedArea() < 0.0) std::reverse(verts_.begin(), verts_.end());
    computeNormals();
  }

  int numVertices() const { return static_cast<int>(verts_.size()); }
  int numEdges() const { return closed_ ? numVertices() : numVertices() - 1; }
  bool closed() const { return closed_; }

  const Vec2& vertex(int i) const { return verts_[i]; }
  const std::vector<Vec2>& vertices() const { return verts_; }
  const Vec2& vertexNormal(int i) const { return normals_[i]; }

  int edgeFrom(int e) const { return e; }
  int edgeTo(int e) const { return (e + 1) % numVertices(); }
  Vec2 edgeVector(int e) const { return verts_[edgeTo(e)] - verts_[edgeFrom(e)]; }
  double edgeLength(int e) const { return edgeVector(e).norm(); }

  /// Outward unit normal of edge e (to the right of the edge direction for a
  /// counter-clockwise contour).
  Vec2 edgeNormal(int e) const {
    Vec2 d = edgeVector(e).normalized();
    return Vec2(d.y(), -d.x());
  }

  double perimeter() const {
    double p = 0.0;
    for (int e = 0; e < numEdges(); ++e) p += edgeLength(e);
    return p;
  }

  Vec2 bboxMin() const { return reduce([](double a, double b) { return std::min(a, b); }); }
  Vec2 bboxMax() const { return reduce([](double a, double b) { return std::max(a, b); }); }
  double bboxDiagonal() const { return (bboxMax() - bboxMin()).norm(); }

  /// Shortest along-contour distance between two vertices.
  double graphDistance(int a, int b) const {
    if (a == b) return 0.0;
    if (a > b) std::swap(a, b);
    double fwd = 0.0;
    for (int e = a; e < b; ++e) fwd += edgeLength(e);
    if (!closed_) return fwd;
    return std::min(fwd, perimeter() - fwd);
  }

  double graphDiameter() const {
    double d = 0.0;
    for (int a = 0; a < numVertices(); ++a)
      for (int b = a + 1; b < numVertices(); ++b) d = std::max(d, graphDistance(a, b));
    return d;
  }

  Contour scaled(double s) const {
    std::vector<Vec2> v = verts_;
    for (auto& p : v) p *= s;
    return Contour(std::move(v), closed_);
  }

 private:
  template <class F>
  Vec2 reduce(F f) const {
    Vec2 r = verts_.at(0);
    for (const auto& p : verts_) {
      r.x() = f(r.x(), p.x());
      r.y() = f(r.y(), p.y());
    }
    return r;
  }

  double signedArea() const {
    double a = 0.0;
    for (int e = 0; e < numEdges(); ++e) {
      const Vec2& p = verts_[edgeFrom(e)];
      const Vec2& q = verts_[edgeTo(e)];
      a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
  }

  void validate() const {
    if (numVertices() < 3) throw DegenerateContour("contour needs at least 3 vertices");
    const double tol = 1e-9 * bboxDiagonal();
    for (int a = 0; a < numVertices(); ++a)
      for (int b = a + 1; b < numVertices(); ++b)
        if ((verts_[a] - verts_[b]).norm() <= tol)
          throw DegenerateContour("duplicate contour vertices " + std::to_string(a) + ", " +
                                  std::to_string(b));
  }

  void computeNormals() {
    normals_.resize(verts_.size());
    const int m = numVertices();
    for (int i = 0; i < m; ++i) {
      Vec2 n = Vec2::Zero();
      // incident edges: edge i-1 (into i) and edge i (out of i)
      const bool hasIn = closed_ || i > 0;
      const bool hasOut = closed_ || i < m - 1;
      if (hasIn) n += edgeNormal((i - 1 + m) % m);
      if (hasOut) n += edgeNormal(i % m);
      const double len = n.norm();
      if (len < 1e-14) {
        // 180-degree fold; fall back to the outgoing edge normal
        n = hasOut ? edgeNormal(i) : edgeNormal(i - 1);
      } else {
        n /= len;
      }
      normals_[i] = n;
    }
  }

  std::vector<Vec2> verts_;
  std::vector<Vec2> normals_;
  bool closed_ = true;
};

/// Split every edge into an integer number of equal pieces so edge lengths
/// come out near the target. Original vertices are kept, so the shape and
/// total perimeter are preserved exactly.
inline Contour resampleContour(const Contour& c, double target_edge_length) {
  if (target_edge_length <= 0.0) throw DegenerateContour("target edge length must be positive");
  if (target_edge_length >= c.perimeter() / 3.0)
    throw DegenerateContour("target edge length too coarse; result would have <3 vertices");
  std::vector<Vec2> out;
  for (int e = 0; e < c.numEdges(); ++e) {
    const Vec2 a = c.vertex(c.edgeFrom(e));
    const Vec2 b = c.vertex(c.edgeTo(e));
    const long pieces = std::max<long>(1, std::lround(c.edgeLength(e) / target_edge_length));
    for (long k = 0; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      out.push_back((1.0 - t) * a + t * b);
    }
  }
  if (!c.closed()) out.push_back(c.vertex(c.numVertices() - 1));
  if (static_cast<int>(out.size()) < 3) throw DegenerateContour("resampled contour too small");
  return Contour(std::move(out), c.closed());
}

namespace detail {
inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace detail

/// CSV: one `x,y` per line, implicit closure. JSON: {"vertices": [[x,y],...], "closed": true}.
inline Contour loadContour(const std::string& path, const std::string& format = "") {
  std::string fmt = format;
  if (fmt.empty()) {
    const auto ext = std::filesystem::path(path).extension().string();
    fmt = (ext == ".json") ? "json" : "csv";
  }
  std::vector<Vec2> verts;
  bool closed = true;
  if (fmt == "csv") {
    std::istringstream in(detail::slurp(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      double x, y;
      if (std::sscanf(line.c_str(), "%lf ,%lf", &x, &y) != 2 &&
          std::sscanf(line.c_str(), "%lf%lf", &x, &y) != 2)
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected `x,y`");
      verts.emplace_back(x, y);
    }
  } else if (fmt == "json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(detail::slurp(path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    if (!j.contains("vertices")) throw ParseError(path + ": missing \"vertices\"");
    for (const auto& v : j["vertices"]) verts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    closed = j.value("closed", true);
  } else {
    throw ParseError("unknown contour format: " + fmt);
  }
  return Contour(std::move(verts), closed);
}

inline void saveContour(const Contour& c, const std::string& path, const std::string& format = "") {
  std::string fmt = format;
  if (fmt.empty()) {
    const auto ext = std::filesystem::path(path).extension().string();
    fmt = (ext == ".json") ? "json" : "csv";
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  if (fmt == "csv") {
    char buf[80];
    for (const auto& v : c.vertices()) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", v.x(), v.y());
      out << buf;
    }
  } else {
    nlohmann::json j;
    j["closed"] = c.closed();
    auto arr = nlohmann::json::array();
    for (const auto& v : c.vertices()) arr.push_back({v.x(), v.y()});
    j["vertices"] = std::move(arr);
    out << j.dump(2) << "\n";
  }
}

}  // namespace conjmatch
