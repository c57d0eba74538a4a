#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "conjmatch/conjmatch.hpp"
#include "conjmatch/shapes.hpp"

namespace {

using namespace conjmatch;

Config makeConfig(const std::string& config_path, const std::string& mode_flag) {
  Config cfg;
  if (!config_path.empty()) cfg = loadConfig(config_path);
  if (!mode_flag.empty()) cfg.mode = parseMode(mode_flag);
  if (const char* env = std::getenv("CONJMATCH_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      throw ParseError("CONJMATCH_THREADS is not an integer");
    }
  }
  return cfg;
}

int runMatch(const std::string& contour_path, const std::string& mesh_path,
             const std::string& config_path, const std::string& mode_flag,
             const std::string& out_path) {
  const Config cfg = makeConfig(config_path, mode_flag);
  const Contour contour = loadContour(contour_path);
  const TriMesh mesh = loadMesh(mesh_path);
  const PipelineResult result = runMatchPipeline(contour, mesh, cfg);
  writeMatchJson(out_path, documentFromPipeline(result, cfg));
  if (cfg.verbosity > 0)
    std::cerr << "energy " << result.path.total_energy << ", " << result.stats.branches_processed
              << " branches, " << result.wall_time_seconds << " s\n";
  return 0;
}

int runEval(const std::string& match_path, const std::string& gt_path,
            const std::string& contour_path, const std::string& mesh_path,
            const std::string& curve_path, const std::string& out_path) {
  const MatchDocument doc = readMatchJson(match_path);
  const GroundTruth gt = readGroundTruthJson(gt_path);
  const Contour contour = loadContour(contour_path);
  const TriMesh mesh = loadMesh(mesh_path);
  const double diam = meshDiameter(mesh).diameter;
  const std::vector<int> matched = matchedMeshVerticesFromDocument(doc, contour.numVertices());

  std::vector<double> geo, seg;
  for (int i = 0; i < contour.numVertices(); ++i) {
    if (matched[i] < 0) continue;
    if (i < static_cast<int>(gt.gt.size()) && gt.gt[i] >= 0)
      geo.push_back(geodesicError(i, matched[i], gt, mesh, diam));
    if (i < static_cast<int>(gt.seg2d.size()) && !gt.seg3d.empty())
      seg.push_back(segmentationError(i, matched[i], gt, mesh, diam));
  }
  if (geo.empty() && seg.empty()) throw EmptyInput("ground truth covers no matched vertex");

  nlohmann::json summary{{"schema", "v1"}};
  std::ofstream curveOut;
  if (!curve_path.empty()) {
    curveOut.open(curve_path);
    if (!curveOut) throw ParseError("cannot open curve output: " + curve_path);
    curveOut << "metric,threshold,fraction\n";
  }
  auto report = [&](const char* name, const std::vector<double>& errors) {
    if (errors.empty()) return;
    const ErrorCurve curve = cumulativeCurve(errors);
    summary[name] = {{"count", errors.size()}, {"auc", curve.auc}};
    if (curveOut.is_open())
      for (size_t k = 0; k < curve.thresholds.size(); ++k)
        curveOut << name << "," << curve.thresholds[k] << "," << curve.fraction[k] << "\n";
  };
  report("geodesic_error", geo);
  report("segmentation_error", seg);

  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open output file: " + out_path);
  out << summary.dump(2) << "\n";
  return 0;
}

int runThickness(const std::string& contour_path, const std::string& mesh_path,
                 const std::string& out_path) {
  ThicknessField field;
  if (!contour_path.empty())
    field = thickness2d(loadContour(contour_path));
  else
    field = thickness3d(loadMesh(mesh_path));
  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open output file: " + out_path);
  out << "vertex,thickness,ray_hit\n";
  for (size_t i = 0; i < field.value.size(); ++i)
    out << i << "," << field.value[i] << "," << int(field.hit[i]) << "\n";
  return 0;
}

int runTransfer(const std::string& rest_path, const std::string& deformed_path,
                const std::string& match_path, const std::string& mesh_path, int anchors,
                const std::string& out_path) {
  const Contour rest = loadContour(rest_path);
  const Contour deformed = loadContour(deformed_path);
  const TriMesh mesh = loadMesh(mesh_path);
  const MatchDocument doc = readMatchJson(match_path);

  // rebuild a path-equivalent correspondence straight from the document
  MatchPath path;
  path.cyclic = doc.cyclic;
  path.total_energy = doc.total_energy;
  const std::vector<int> matched = matchedMeshVerticesFromDocument(doc, rest.numVertices());

  DeformationInput inp;
  inp.rest = &rest;
  inp.deformed = &deformed;
  inp.mesh = &mesh;
  inp.anchor_count = anchors;
  // feed the reduced correspondences through a synthetic path of advance steps
  std::vector<ConjugateVertex> verts;
  for (int i = 0; i < rest.numVertices(); ++i) {
    if (matched[i] < 0) continue;
    const auto& outs = mesh.outEdges(matched[i]);
    if (outs.empty()) continue;
    verts.push_back({StepKind::Advance, i, outs.front()});
  }
  // a trailing pause keeps the final step from inventing an extra correspondence
  if (!verts.empty()) verts.back().kind = StepKind::ContourHold;
  path.vertices = std::move(verts);
  inp.match = &path;

  const TransferResult result = transferDeformationDetailed(inp);
  if (result.anchors_clamped)
    std::cerr << "warning: anchor count clamped to " << result.anchors_used
              << " matched vertices\n";
  saveMesh(result.mesh, out_path);
  return 0;
}

int runInfo(const std::string& contour_path, const std::string& mesh_path) {
  nlohmann::json out{{"schema", "v1"}};
  if (!contour_path.empty()) {
    const Contour c = loadContour(contour_path);
    out["contour"] = {{"vertices", c.numVertices()},
                      {"edges", c.numEdges()},
                      {"closed", c.closed()},
                      {"perimeter", c.perimeter()},
                      {"graph_diameter", c.graphDiameter()}};
  }
  if (!mesh_path.empty()) {
    const TriMesh m = loadMesh(mesh_path);
    out["mesh"] = {{"vertices", m.numVertices()},
                   {"edges", m.numUndirectedEdges()},
                   {"faces", m.numFaces()},
                   {"graph_diameter", meshDiameter(m).diameter}};
  }
  if (!contour_path.empty() && !mesh_path.empty()) {
    const Contour c = loadContour(contour_path);
    const TriMesh m = loadMesh(mesh_path);
    const LayeredGraph g(c, m);
    const auto deg = g.measureDegrees();
    out["product_graph"] = {{"vertices", g.productVertexCount()},
                            {"edges", g.productEdgeCount()}};
    out["conjugate_graph"] = {{"vertices", g.conjugateVertexCount()},
                              {"measured_vertices", g.measuredConjugateVertexCount()},
                              {"edges_after_pruning", deg.edges},
                              {"mean_out_degree", deg.mean_out_degree}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int runBench(const std::string& out_path, const std::string& config_path,
             std::vector<int> contour_sizes) {
  Config cfg = makeConfig(config_path, "");
  if (contour_sizes.empty()) contour_sizes = {25, 50, 100};

  const TriMesh meshRaw = shapes::uvSphere(18, 28);
  const TriMesh mesh = meshRaw.scaled(1.0 / meshDiameter(meshRaw).diameter);
  const ThicknessField t3d = thickness3d(mesh);

  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open output file: " + out_path);
  out << "m,product_vertices,conjugate_vertices,dijkstra_seconds,solve_seconds,"
         "branches_processed,total_energy\n";
  for (int m : contour_sizes) {
    const Contour raw = shapes::regularPolygon(m);
    const Contour contour = raw.scaled(1.0 / raw.graphDiameter());
    const LayeredGraph graph(contour, mesh, cfg.prune);
    const EnergyModel model(contour, mesh, thickness2d(contour), t3d, cfg.psi1, cfg.psi2);

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    LayeredDijkstra dijkstra(graph, model);
    std::vector<ConjugateVertex> sources;
    for (const auto& v : graph.firstLayerVertices())
      for (const auto& tagged : graph.expandFirstLayerVertex(v)) sources.push_back(tagged);
    dijkstra.run(sources);
    const double dijkstraSec = std::chrono::duration<double>(clock::now() - t0).count();

    t0 = clock::now();
    SolveStats stats;
    const MatchPath path = solveCyclic(graph, model, &stats);
    const double solveSec = std::chrono::duration<double>(clock::now() - t0).count();

    out << m << "," << graph.productVertexCount() << "," << graph.conjugateVertexCount() << ","
        << dijkstraSec << "," << solveSec << "," << stats.branches_processed << ","
        << path.total_energy << "\n";
    out.flush();
    std::cerr << "m=" << m << ": dijkstra " << dijkstraSec << " s, solve " << solveSec << " s, "
              << stats.branches_processed << " branches\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D contour to 3D mesh matching via cyclic shortest paths"};
  app.require_subcommand(1);

  std::string contourPath, meshPath, configPath, modeFlag, outPath;
  std::string matchPath, gtPath, curvePath, restPath, deformedPath;
  int anchors = 12;
  std::vector<int> benchSizes;

  auto* match = app.add_subcommand("match", "solve a contour-to-mesh matching");
  match->add_option("--contour", contourPath)->required();
  match->add_option("--mesh", meshPath)->required();
  match->add_option("--config", configPath);
  match->add_option("--mode", modeFlag)->check(CLI::IsMember({"cyclic", "open"}));
  match->add_option("--out", outPath)->required();

  auto* eval = app.add_subcommand("eval", "evaluate a matching against ground truth");
  eval->add_option("--match", matchPath)->required();
  eval->add_option("--gt", gtPath)->required();
  eval->add_option("--contour", contourPath)->required();
  eval->add_option("--mesh", meshPath)->required();
  eval->add_option("--curve", curvePath);
  eval->add_option("--out", outPath)->required();

  auto* thick = app.add_subcommand("thickness", "per-vertex local thickness");
  auto* thickContour = thick->add_option("--contour", contourPath);
  auto* thickMesh = thick->add_option("--mesh", meshPath);
  thickContour->excludes(thickMesh);
  thick->add_option("--out", outPath)->required();

  auto* transfer = app.add_subcommand("transfer", "transfer a contour deformation to the mesh");
  transfer->add_option("--rest", restPath)->required();
  transfer->add_option("--deformed", deformedPath)->required();
  transfer->add_option("--match", matchPath)->required();
  transfer->add_option("--mesh", meshPath)->required();
  transfer->add_option("--anchors", anchors);
  transfer->add_option("--out", outPath)->required();

  auto* info = app.add_subcommand("info", "print shape and graph statistics");
  info->add_option("--contour", contourPath);
  info->add_option("--mesh", meshPath);

  auto* bench = app.add_subcommand("bench", "runtime scaling sweep over contour sizes");
  bench->add_option("--out", outPath)->required();
  bench->add_option("--config", configPath);
  bench->add_option("--sizes", benchSizes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (match->parsed()) return runMatch(contourPath, meshPath, configPath, modeFlag, outPath);
    if (eval->parsed()) return runEval(matchPath, gtPath, contourPath, meshPath, curvePath, outPath);
    if (thick->parsed()) {
      if (contourPath.empty() == meshPath.empty()) {
        std::cerr << "thickness: exactly one of --contour/--mesh required\n";
        return 1;
      }
      return runThickness(contourPath, meshPath, outPath);
    }
    if (transfer->parsed())
      return runTransfer(restPath, deformedPath, matchPath, meshPath, anchors, outPath);
    if (info->parsed()) return runInfo(contourPath, meshPath);
    if (bench->parsed()) return runBench(outPath, configPath, benchSizes);
  } catch (const conjmatch::NoPath& e) {
    std::cerr << "NoPath: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
