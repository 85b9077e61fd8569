#include <doctest.h>

#include <fstream>
#include <regex>

#include "support/testers.hpp"

using namespace ncshape::testing;

namespace {

std::string strip_wall_ms(std::string text) {
  // Timing fields are environment noise; everything else must reproduce.
  text = std::regex_replace(text, std::regex("\"wall_ms\": [^,}\n]+"), "\"wall_ms\": X");
  return std::regex_replace(text, std::regex("wall_ms=[^ \n]+"), "wall_ms=X");
}

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = test_path(name);
  std::ofstream out(path);
  out << body;
  return path;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("info prints the counts line for a single triangle") {
  const auto path = write_temp("cli_tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  const ToolRun run = run_tool("info " + path);
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("vertices=3 triangles=1 edges=3 boundary=3 nc_deltas=6") != std::string::npos);
  CHECK(run.output.find("config:") != std::string::npos);
  CHECK(run.output.find("seed=0") != std::string::npos);
}

TEST_CASE("info on a corrupt OBJ exits 2 and cites the line") {
  const auto path = write_temp("cli_bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 zz\n");
  const ToolRun run = run_tool("info " + path);
  CHECK(run.exit_code == 2);
  CHECK(run.output.find(":4:") != std::string::npos);
}

TEST_CASE("unknown flags are errors") {
  const ToolRun run = run_tool("info --frobnicate x.obj");
  CHECK(run.exit_code == 2);
}

TEST_CASE("metric of a mesh against itself is zero with zero deviation") {
  const auto sphere = test_path("cli_sphere.obj");
  CHECK(run_tool("gen --kind sphere --res 2 --out " + sphere).exit_code == 0);
  const ToolRun run = run_tool("metric " + sphere + " " + sphere + " --sigma 0.4");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("distance_sq=0") != std::string::npos);
  CHECK(run.output.find("relative_deviation=0") != std::string::npos);
  // Both representations are printed side by side.
  CHECK(run.output.find("currents_distance_sq=") != std::string::npos);
  CHECK(run.output.find("ncycle_distance_sq=") != std::string::npos);
}

TEST_CASE("gen sphere reports no boundary through info") {
  const auto path = test_path("cli_gen.obj");
  CHECK(run_tool("gen --kind sphere --res 3 --out " + path).exit_code == 0);
  const ToolRun info = run_tool("info " + path);
  CHECK(info.output.find("boundary=0") != std::string::npos);
}

TEST_CASE("compress writes deterministic outputs for a fixed seed") {
  const auto sphere = test_path("cli_c_sphere.obj");
  REQUIRE(run_tool("gen --kind sphere --res 4 --out " + sphere).exit_code == 0);

  const auto out1 = test_path("cli_c1");
  const auto out2 = test_path("cli_c2");
  const ToolRun r1 = run_tool("compress " + sphere + " --m 48 --sigma 0.5 --seed 7 --out " + out1);
  const ToolRun r2 =
      run_tool("--threads 1 compress " + sphere + " --m 48 --sigma 0.5 --seed 7 --out " + out2);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(r1.output.find("rel_error=") != std::string::npos);

  CHECK(read_file(out1 + ".df") == read_file(out2 + ".df"));
  CHECK(strip_wall_ms(read_file(out1 + ".json")) == strip_wall_ms(read_file(out2 + ".json")));
}

TEST_CASE("compress rejects invalid m with exit 2") {
  const auto sphere = test_path("cli_c_sphere2.obj");
  REQUIRE(run_tool("gen --kind sphere --res 2 --out " + sphere).exit_code == 0);
  const ToolRun run = run_tool("compress " + sphere + " --m 100000 --out " + test_path("cli_bad_m"));
  CHECK(run.exit_code == 2);
}

TEST_CASE("decay CSV header is exact and runs are reproducible") {
  const auto sphere = test_path("cli_d_sphere.obj");
  REQUIRE(run_tool("gen --kind sphere --res 3 --out " + sphere).exit_code == 0);
  const auto csv1 = test_path("cli_d1.csv");
  const auto csv2 = test_path("cli_d2.csv");
  REQUIRE(run_tool("decay " + sphere + " --m-list 20,40 --seeds 0,1 --sigma 0.5 --out " + csv1).exit_code == 0);
  REQUIRE(run_tool("--threads 2 decay " + sphere + " --m-list 20,40 --seeds 0,1 --sigma 0.5 --out " + csv2)
              .exit_code == 0);

  const std::string body1 = read_file(csv1);
  CHECK(body1.rfind("method,seed,m,error_sq,rel_error,trace_bound,wall_ms\n", 0) == 0);

  // All but the timing column must be byte-identical.
  const auto strip_last_column = [](const std::string& body) {
    std::string out;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      out += line.substr(0, line.rfind(',')) + "\n";
    }
    return out;
  };
  CHECK(strip_last_column(body1) == strip_last_column(read_file(csv2)));
}

TEST_CASE("match improves the Hausdorff distance and writes the report") {
  const auto tmpl = test_path("cli_m_tmpl.obj");
  const auto target = test_path("cli_m_target.obj");
  REQUIRE(run_tool("gen --kind sphere --res 2 --out " + tmpl).exit_code == 0);
  REQUIRE(run_tool("gen --kind ellipsoid --res 2 --size 1.25,1.0,0.8 --out " + target).exit_code == 0);

  const auto out = test_path("cli_m_out");
  const ToolRun run = run_tool("match " + tmpl + " " + target +
                               " --sigma 0.35 --reg-weight 0.1 --iters 15 --out " + out);
  REQUIRE(run.exit_code == 0);

  const std::string report = read_file(out + ".json");
  for (const char* key : {"iters", "final_objective", "data_term", "reg_term", "hausdorff_init",
                          "hausdorff_final", "wall_ms", "objective_trace"}) {
    CHECK(report.find(std::string("\"") + key + "\"") != std::string::npos);
  }

  const auto value_of = [&](const std::string& key) {
    const auto pos = report.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    return std::stod(report.substr(pos + key.size() + 3));
  };
  CHECK(value_of("hausdorff_final") < value_of("hausdorff_init"));

  // Deformed mesh is written and loads back through the tool.
  const ToolRun info = run_tool("info " + out + ".obj");
  CHECK(info.exit_code == 0);
  CHECK(info.output.find("boundary=0") != std::string::npos);
}

TEST_CASE("polyline pipeline: gen, info, metric") {
  const auto line = test_path("cli_line.lines");
  REQUIRE(run_tool("gen --kind line_polyline --res 4 --out " + line).exit_code == 0);
  const ToolRun info = run_tool("info " + line);
  CHECK(info.output.find("vertices=5 segments=4") != std::string::npos);
  const ToolRun metric = run_tool("metric " + line + " " + line + " --sigma 0.5");
  CHECK(metric.exit_code == 0);
  CHECK(metric.output.find("relative_deviation=0") != std::string::npos);
}

} // TEST_SUITE
