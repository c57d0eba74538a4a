// End-to-end smoke test for the command-line tool. Expects the binary path as
// argv[1]; drives it through every subcommand on small generated fixtures.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include "conjmatch/conjmatch.hpp"
#include "conjmatch/shapes.hpp"

namespace fs = std::filesystem;

namespace {

std::string gBinary;
int gFailures = 0;

void expect(bool cond, const std::string& what) {
  if (!cond) {
    ++gFailures;
    std::fprintf(stderr, "cli_smoke: FAIL %s\n", what.c_str());
  }
}

int run(const std::string& args) {
  const std::string cmd = gBinary + " " + args;
  const int status = std::system(cmd.c_str());
#ifdef _WIN32
  return status;
#else
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string withoutWallTime(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("wall_time_seconds") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_smoke <binary>\n");
    return 2;
  }
  gBinary = argv[1];

  const fs::path dir = fs::temp_directory_path() / "conjmatch_cli_smoke";
  fs::create_directories(dir);
  const auto at = [&](const char* name) { return (dir / name).string(); };

  using namespace conjmatch;
  saveContour(shapes::regularPolygon(12), at("contour.csv"));
  saveMesh(shapes::icosphere(1), at("mesh.off"));
  {
    nlohmann::json gt;
    gt["gt"] = std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    gt["seg2d"] = std::vector<int>(12, 0);
    gt["seg3d"] = std::vector<int>(42, 0);
    std::ofstream(at("gt.json")) << gt.dump(2) << "\n";
  }

  // match
  expect(run("match --contour " + at("contour.csv") + " --mesh " + at("mesh.off") + " --out " +
             at("match.json")) == 0,
         "match exit code");
  expect(fs::exists(at("match.json")), "match output exists");
  {
    nlohmann::json j = nlohmann::json::parse(slurp(at("match.json")));
    expect(j.at("schema") == "v1", "match schema");
    expect(j.at("cyclic").get<bool>(), "match is cyclic");
    expect(!j.at("steps").empty(), "match has steps");
  }

  // determinism across runs, modulo wall time
  expect(run("match --contour " + at("contour.csv") + " --mesh " + at("mesh.off") + " --out " +
             at("match2.json")) == 0,
         "second match exit code");
  expect(withoutWallTime(slurp(at("match.json"))) == withoutWallTime(slurp(at("match2.json"))),
         "repeated runs produce identical output");

  // open mode
  expect(run("match --mode open --contour " + at("contour.csv") + " --mesh " + at("mesh.off") +
             " --out " + at("open.json")) == 0,
         "open match exit code");
  {
    nlohmann::json j = nlohmann::json::parse(slurp(at("open.json")));
    expect(j.at("mode") == "open", "open mode recorded");
  }

  // config file feeds the pipeline
  std::ofstream(at("conf.toml")) << "[pipeline]\nnormalize = false\n[solver]\nmode = cyclic\n";
  expect(run("match --config " + at("conf.toml") + " --contour " + at("contour.csv") + " --mesh " +
             at("mesh.off") + " --out " + at("match3.json")) == 0,
         "configured match exit code");

  // eval
  expect(run("eval --match " + at("match.json") + " --gt " + at("gt.json") + " --contour " +
             at("contour.csv") + " --mesh " + at("mesh.off") + " --curve " + at("curve.csv") +
             " --out " + at("eval.json")) == 0,
         "eval exit code");
  {
    nlohmann::json j = nlohmann::json::parse(slurp(at("eval.json")));
    expect(j.contains("geodesic_error") && j.at("geodesic_error").contains("auc"), "eval auc");
    const std::string curve = slurp(at("curve.csv"));
    expect(curve.rfind("metric,threshold,fraction", 0) == 0, "curve header");
    expect(curve.find("geodesic_error,") != std::string::npos, "curve rows");
  }

  // thickness
  expect(run("thickness --contour " + at("contour.csv") + " --out " + at("thick.csv")) == 0,
         "contour thickness exit code");
  expect(run("thickness --mesh " + at("mesh.off") + " --out " + at("thick3.csv")) == 0,
         "mesh thickness exit code");
  expect(slurp(at("thick.csv")).rfind("vertex,thickness,ray_hit", 0) == 0, "thickness header");

  // transfer (identity deformation)
  expect(run("transfer --rest " + at("contour.csv") + " --deformed " + at("contour.csv") +
             " --match " + at("match.json") + " --mesh " + at("mesh.off") + " --anchors 6 --out " +
             at("transfer.off") + " 2>" + at("transfer.log")) == 0,
         "transfer exit code");
  expect(fs::exists(at("transfer.off")), "transfer output exists");
  {
    const TriMesh out = loadMesh(at("transfer.off"));
    expect(out.numVertices() == 42, "transfer preserves the vertex count");
  }

  // info
  expect(run("info --contour " + at("contour.csv") + " --mesh " + at("mesh.off") + " >" +
             at("info.json")) == 0,
         "info exit code");
  {
    nlohmann::json j = nlohmann::json::parse(slurp(at("info.json")));
    expect(j.at("contour").at("vertices") == 12, "info contour vertices");
    expect(j.at("mesh").at("vertices") == 42, "info mesh vertices");
    expect(j.at("conjugate_graph").at("vertices") ==
               j.at("conjugate_graph").at("measured_vertices"),
           "info counts agree");
  }

  // bench with tiny sizes
  expect(run("bench --sizes 4 6 --out " + at("bench.csv") + " 2>" + at("bench.log")) == 0,
         "bench exit code");
  expect(slurp(at("bench.csv")).rfind("m,", 0) == 0, "bench header");

  // error paths
  expect(run("match --bogus 2>/dev/null") == 1, "unknown flag exits 1");
  expect(run("2>/dev/null") == 1, "missing subcommand exits 1");
  std::ofstream(at("garbage.off")) << "not a mesh\n";
  expect(run("match --contour " + at("contour.csv") + " --mesh " + at("garbage.off") + " --out " +
             at("bad.json") + " 2>/dev/null") == 2,
         "parse failure exits 2");

  if (gFailures == 0) std::printf("cli_smoke: all checks passed\n");
  return gFailures == 0 ? 0 : 1;
}
