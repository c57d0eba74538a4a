#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conjmatch/energy.hpp"
#include "conjmatch/evaluation.hpp"
#include "conjmatch/solver.hpp"

namespace conjmatch {

/// One realized product edge of a matching, as written to the output JSON.
/// Degenerate components repeat their endpoint ([i,i] pauses the contour,
/// [j,j] pauses the mesh). Costs are those of the conjugate edge entering the
/// step; a cyclic matching attributes the closing edge to step 0 and an open
/// path's first step costs nothing.
struct MatchStep {
  std::array<int, 2> contour_edge{0, 0};
  std::array<int, 2> mesh_edge{0, 0};
  double d_data = 0.0;
  double d_reg = 0.0;
};

struct MatchDocument {
  std::string mode = "cyclic";
  bool cyclic = true;
  double total_energy = 0.0;
  std::vector<MatchStep> steps;
  SolveStats stats;
  double wall_time_seconds = 0.0;
  double contour_scale = 1.0;  // factor applied to reach unit diameter
  double mesh_scale = 1.0;
};

inline MatchDocument buildMatchDocument(const MatchPath& path, const LayeredGraph& graph,
                                        const EnergyModel& model, const SolveStats& stats,
                                        double wall_time_seconds, double contour_scale = 1.0,
                                        double mesh_scale = 1.0) {
  MatchDocument doc;
  doc.mode = path.cyclic ? "cyclic" : "open";
  doc.cyclic = path.cyclic;
  doc.total_energy = path.total_energy;
  doc.stats = stats;
  doc.wall_time_seconds = wall_time_seconds;
  doc.contour_scale = contour_scale;
  doc.mesh_scale = mesh_scale;

  const auto& verts = path.vertices;
  const size_t count = path.cyclic ? verts.size() - 1 : verts.size();
  for (size_t k = 0; k < count; ++k) {
    const auto& v = verts[k];
    MatchStep step;
    step.contour_edge = {graph.contourStart(v), graph.contourEnd(v)};
    step.mesh_edge = {graph.meshStart(v), graph.meshEnd(v)};
    if (k > 0) {
      step.d_data = model.dData(verts[k - 1], v);
      step.d_reg = model.dReg(verts[k - 1], v);
    } else if (path.cyclic && verts.size() >= 2) {
      step.d_data = model.dData(verts[verts.size() - 2], verts.back());
      step.d_reg = model.dReg(verts[verts.size() - 2], verts.back());
    }
    doc.steps.push_back(step);
  }
  return doc;
}

inline nlohmann::json toJson(const MatchDocument& doc) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : doc.steps)
    steps.push_back({{"contour_edge", s.contour_edge},
                     {"mesh_edge", s.mesh_edge},
                     {"d_data", s.d_data},
                     {"d_reg", s.d_reg}});
  return nlohmann::json{
      {"schema", "v1"},
      {"mode", doc.mode},
      {"cyclic", doc.cyclic},
      {"total_energy", doc.total_energy},
      {"steps", std::move(steps)},
      {"stats",
       {{"branches_processed", doc.stats.branches_processed},
        {"branches_created", doc.stats.branches_created},
        {"dijkstra_runs", doc.stats.dijkstra_runs}}},
      {"wall_time_seconds", doc.wall_time_seconds},
      {"normalization", {{"contour_scale", doc.contour_scale}, {"mesh_scale", doc.mesh_scale}}}};
}

inline MatchDocument matchDocumentFromJson(const nlohmann::json& j) {
  if (!j.contains("schema") || j.at("schema") != "v1")
    throw ParseError("match document: missing or unsupported schema");
  MatchDocument doc;
  doc.mode = j.at("mode").get<std::string>();
  doc.cyclic = j.at("cyclic").get<bool>();
  doc.total_energy = j.at("total_energy").get<double>();
  for (const auto& s : j.at("steps")) {
    MatchStep step;
    step.contour_edge = s.at("contour_edge").get<std::array<int, 2>>();
    step.mesh_edge = s.at("mesh_edge").get<std::array<int, 2>>();
    step.d_data = s.at("d_data").get<double>();
    step.d_reg = s.at("d_reg").get<double>();
    doc.steps.push_back(step);
  }
  if (j.contains("stats")) {
    const auto& st = j.at("stats");
    doc.stats.branches_processed = st.value("branches_processed", 0LL);
    doc.stats.branches_created = st.value("branches_created", 0LL);
    doc.stats.dijkstra_runs = st.value("dijkstra_runs", 0LL);
  }
  doc.wall_time_seconds = j.value("wall_time_seconds", 0.0);
  if (j.contains("normalization")) {
    doc.contour_scale = j.at("normalization").value("contour_scale", 1.0);
    doc.mesh_scale = j.at("normalization").value("mesh_scale", 1.0);
  }
  return doc;
}

inline void writeMatchJson(const std::string& path, const MatchDocument& doc) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  out << toJson(doc).dump(2) << "\n";
}

inline MatchDocument readMatchJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open match file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return matchDocumentFromJson(j);
}

/// First matched mesh vertex per contour vertex, recovered from a serialized
/// document (same reduction as matchedMeshVertices on a live path).
inline std::vector<int> matchedMeshVerticesFromDocument(const MatchDocument& doc,
                                                        int contour_vertex_count) {
  std::vector<int> out(contour_vertex_count, -1);
  auto record = [&](int i, int j) {
    if (i >= 0 && i < contour_vertex_count && out[i] < 0) out[i] = j;
  };
  for (const auto& s : doc.steps) record(s.contour_edge[0], s.mesh_edge[0]);
  if (!doc.steps.empty()) {
    const auto& last = doc.steps.back();
    record(last.contour_edge[1], last.mesh_edge[1]);
  }
  return out;
}

inline GroundTruth groundTruthFromJson(const nlohmann::json& j) {
  GroundTruth gt;
  if (j.contains("gt")) gt.gt = j.at("gt").get<std::vector<int>>();
  if (j.contains("seg2d")) gt.seg2d = j.at("seg2d").get<std::vector<int>>();
  if (j.contains("seg3d")) gt.seg3d = j.at("seg3d").get<std::vector<int>>();
  if (j.contains("sym_perms")) gt.sym_perms = j.at("sym_perms").get<std::vector<std::vector<int>>>();
  for (const auto& perm : gt.sym_perms) {
    std::vector<char> seen(perm.size(), 0);
    for (int v : perm) {
      if (v < 0 || v >= static_cast<int>(perm.size()) || seen[v])
        throw ParseError("sym_perms entries must be permutations of the label set");
      seen[v] = 1;
    }
  }
  return gt;
}

inline GroundTruth readGroundTruthJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ground-truth file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return groundTruthFromJson(j);
}

}  // namespace conjmatch
