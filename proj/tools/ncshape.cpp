// ncshape: build, compare, compress, and register discrete shape
// representations (currents and normal cycles) from the command line.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ncshape/compression.hpp"
#include "ncshape/dirac.hpp"
#include "ncshape/geometry.hpp"
#include "ncshape/hausdorff.hpp"
#include "ncshape/json_writer.hpp"
#include "ncshape/kernels.hpp"
#include "ncshape/match.hpp"
#include "ncshape/parallel.hpp"
#include "ncshape/representations.hpp"
#include "ncshape/shapes.hpp"
#include "ncshape/stopwatch.hpp"
#include "ncshape/text_format.hpp"

namespace {

using namespace ncshape;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

enum class InputKind { Mesh, Polyline, Functional };

InputKind sniff_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream iss(line);
    std::string tok;
    if (!(iss >> tok)) continue;
    if (tok == "#") {
      std::string marker;
      if (iss >> marker && marker == "dirac-functional") return InputKind::Functional;
      continue;
    }
    if (tok == "f") return InputKind::Mesh;
    if (tok == "l") return InputKind::Polyline;
  }
  return InputKind::Mesh; // vertex-only files parse as empty meshes
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

DiracFunctional functional_from_path(const std::string& path, const std::string& rep) {
  switch (sniff_input(path)) {
    case InputKind::Functional: return read_dirac(path);
    case InputKind::Polyline: {
      if (rep == "currents") throw std::runtime_error("currents representation is only defined for meshes");
      return normal_cycle_of_curve(load_polyline(path));
    }
    case InputKind::Mesh: {
      const TriangleMesh mesh = load_obj(path);
      return rep == "currents" ? currents_of_mesh(mesh) : normal_cycle_of_mesh(mesh);
    }
  }
  throw std::logic_error("unreachable");
}

struct CommonFlags {
  int threads = 0;
  std::uint64_t seed = 0;
};

void print_config(const std::string& line) { std::cout << "config: " << line << "\n"; }

int run_info(const std::string& path, const CommonFlags& common) {
  print_config("cmd=info input=" + path + " threads=" + std::to_string(max_threads()) +
               " seed=" + std::to_string(common.seed));
  const InputKind kind = sniff_input(path);
  if (kind == InputKind::Functional) {
    const DiracFunctional f = read_dirac(path);
    const Aabb box = bounding_box(RowMat3(f.points));
    std::cout << "kind=" << functional_kind_name(f.kind) << " d=" << f.dim << " k=" << f.weight_dim
              << " n=" << f.rows() << "\n";
    std::cout << "bbox=[" << fmt17(box.lo[0]) << "," << fmt17(box.lo[1]) << "," << fmt17(box.lo[2]) << "].."
              << "[" << fmt17(box.hi[0]) << "," << fmt17(box.hi[1]) << "," << fmt17(box.hi[2]) << "]\n";
    return 0;
  }
  if (kind == InputKind::Polyline) {
    const Polyline line = load_polyline(path);
    const Aabb box = bounding_box(line.vertices);
    std::cout << "vertices=" << line.vertex_count() << " segments=" << line.segment_count()
              << " nc_deltas=" << line.vertex_count() << "\n";
    std::cout << "bbox=[" << fmt17(box.lo[0]) << "," << fmt17(box.lo[1]) << "," << fmt17(box.lo[2]) << "].."
              << "[" << fmt17(box.hi[0]) << "," << fmt17(box.hi[1]) << "," << fmt17(box.hi[2]) << "]\n";
    return 0;
  }
  const TriangleMesh mesh = load_obj(path);
  const EdgeTable edges = build_edge_table(mesh);
  const BoundaryInfo boundary = boundary_vertices(mesh, edges);
  const OrientationReport orient = check_orientation(mesh, edges);
  const Aabb box = bounding_box(mesh.vertices);
  std::cout << "vertices=" << mesh.vertex_count() << " triangles=" << mesh.triangle_count()
            << " edges=" << edges.edge_count() << " boundary=" << boundary.count()
            << " nc_deltas=" << edges.edge_count() + boundary.count() << "\n";
  std::cout << "orientation=" << (orient.consistent() ? "consistent" : "inconsistent") << "\n";
  std::cout << "bbox=[" << fmt17(box.lo[0]) << "," << fmt17(box.lo[1]) << "," << fmt17(box.lo[2]) << "].."
            << "[" << fmt17(box.hi[0]) << "," << fmt17(box.hi[1]) << "," << fmt17(box.hi[2]) << "]\n";
  return 0;
}

int run_metric(const std::string& path_a, const std::string& path_b, double sigma, const std::string& rep,
               const std::string& out_path, const CommonFlags& common) {
  print_config("cmd=metric a=" + path_a + " b=" + path_b + " sigma=" + fmt17(sigma) + " rep=" + rep +
               " threads=" + std::to_string(max_threads()) + " seed=" + std::to_string(common.seed));
  const GaussianKernel kernel{sigma};
  const InputKind kind_a = sniff_input(path_a);
  const InputKind kind_b = sniff_input(path_b);
  if (kind_a != kind_b) throw std::runtime_error("metric: inputs must both be meshes or both polylines");

  JsonWriter json;
  json.field("sigma", sigma);
  json.field("rep", rep);
  double primary = 0.0;

  if (kind_a == InputKind::Polyline) {
    if (rep == "currents") throw std::runtime_error("currents representation is only defined for meshes");
    const Polyline a = load_polyline(path_a);
    const Polyline b = load_polyline(path_b);
    const DiracFunctional na = normal_cycle_of_curve(a);
    const DiracFunctional nb = normal_cycle_of_curve(b);
    const double delta_form = dual_distance_sq(kernel, na, nb);
    const double theorem_form =
        std::max(0.0, nc_inner_theorem_curve(kernel, a, a) - 2.0 * nc_inner_theorem_curve(kernel, a, b) +
                          nc_inner_theorem_curve(kernel, b, b));
    const double deviation = std::abs(delta_form - theorem_form) / (1.0 + std::abs(theorem_form));
    std::cout << "ncycle_distance_sq=" << fmt17(delta_form) << "\n";
    std::cout << "ncycle_theorem_distance_sq=" << fmt17(theorem_form) << "\n";
    std::cout << "relative_deviation=" << fmt17(deviation) << "\n";
    json.field("ncycle_distance_sq", delta_form);
    json.field("ncycle_theorem_distance_sq", theorem_form);
    json.field("relative_deviation", deviation);
    primary = delta_form;
  } else {
    const TriangleMesh a = load_obj(path_a);
    const TriangleMesh b = load_obj(path_b);
    const double curr = dual_distance_sq(kernel, currents_of_mesh(a), currents_of_mesh(b));
    const DiracFunctional na = normal_cycle_of_mesh(a);
    const DiracFunctional nb = normal_cycle_of_mesh(b);
    const double ncyc = dual_distance_sq(kernel, na, nb);
    const double theorem_form =
        std::max(0.0, nc_inner_theorem_surface(kernel, a, a) - 2.0 * nc_inner_theorem_surface(kernel, a, b) +
                          nc_inner_theorem_surface(kernel, b, b));
    const double deviation = std::abs(ncyc - theorem_form) / (1.0 + std::abs(theorem_form));
    std::cout << "currents_distance_sq=" << fmt17(curr) << "\n";
    std::cout << "ncycle_distance_sq=" << fmt17(ncyc) << "\n";
    std::cout << "ncycle_theorem_distance_sq=" << fmt17(theorem_form) << "\n";
    std::cout << "relative_deviation=" << fmt17(deviation) << "\n";
    json.field("currents_distance_sq", curr);
    json.field("ncycle_distance_sq", ncyc);
    json.field("ncycle_theorem_distance_sq", theorem_form);
    json.field("relative_deviation", deviation);
    primary = rep == "currents" ? curr : ncyc;
  }
  json.field("distance_sq", primary);
  std::cout << "distance_sq=" << fmt17(primary) << "\n";
  if (!out_path.empty()) json.write(out_path);
  return 0;
}

int run_compress(const std::string& input, const std::string& rep, int m, const std::string& method,
                 double sigma, std::optional<double> lambda, double oversample, const std::string& out_base,
                 const CommonFlags& common) {
  print_config("cmd=compress input=" + input + " rep=" + rep + " m=" + std::to_string(m) +
               " method=" + method + " sigma=" + fmt17(sigma) +
               " lambda=" + (lambda ? fmt17(*lambda) : std::string("auto")) + " oversample=" +
               fmt17(oversample) + " threads=" + std::to_string(max_threads()) +
               " seed=" + std::to_string(common.seed));
  const GaussianKernel kernel{sigma};
  const DiracFunctional mu = functional_from_path(input, rep);
  if (m < 1 || m > mu.rows()) {
    throw std::invalid_argument("compress: need 1 <= m <= " + std::to_string(mu.rows()));
  }

  CompressConfig cfg;
  cfg.method = parse_sample_method(method);
  cfg.target_m = m;
  cfg.lambda = lambda;
  cfg.seed = common.seed;
  cfg.oversample = oversample;
  const CompressionResult result = compress(kernel, mu, cfg);

  write_dirac(result.compressed, out_base + ".df");
  write_compression_sidecar(result, out_base + ".json");

  const double rel =
      result.source_norm_sq > 0.0 ? std::sqrt(result.error_sq / result.source_norm_sq) : 0.0;
  std::cout << "n=" << mu.rows() << " m=" << m << " lambda=" << fmt17(result.lambda) << "\n";
  std::cout << "rel_error=" << fmt17(rel) << " error_sq=" << fmt17(result.error_sq)
            << " wall_ms=" << fmt17(result.wall_ms) << "\n";
  std::cout << "wrote " << out_base << ".df and " << out_base << ".json\n";
  return 0;
}

int run_decay(const std::string& input, const std::string& rep, const std::string& m_list_csv,
              const std::string& methods_csv, const std::string& seeds_csv, double sigma,
              std::optional<double> lambda, const std::string& out_path, const CommonFlags& common) {
  print_config("cmd=decay input=" + input + " rep=" + rep + " m_list=" + m_list_csv + " methods=" +
               methods_csv + " seeds=" + seeds_csv + " sigma=" + fmt17(sigma) +
               " lambda=" + (lambda ? fmt17(*lambda) : std::string("auto")) +
               " threads=" + std::to_string(max_threads()) + " seed=" + std::to_string(common.seed));
  const GaussianKernel kernel{sigma};
  const DiracFunctional mu = functional_from_path(input, rep);

  const std::vector<int> m_list = parse_int_list(m_list_csv);
  std::vector<SampleMethod> methods;
  {
    std::stringstream ss(methods_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) methods.push_back(parse_sample_method(item));
    }
  }
  const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_csv);
  if (m_list.empty() || methods.empty() || seeds.empty()) {
    throw std::invalid_argument("decay: m-list, methods, and seeds must be non-empty");
  }

  DecayOptions options;
  options.lambda = lambda;
  const std::vector<DecayRow> rows = decay_curve(kernel, mu, m_list, methods, seeds, options);
  write_decay_csv(rows, out_path);
  std::cout << "n=" << mu.rows() << " rows=" << rows.size() << " wrote " << out_path << "\n";
  return 0;
}

int run_match(const std::string& template_path, const std::string& target_path, double sigma,
              const std::string& sigmas_csv, int steps, double reg_weight, int iters, int cp_grid, int m,
              const std::string& compress_template, const std::string& out_base, const CommonFlags& common) {
  print_config("cmd=match template=" + template_path + " target=" + target_path + " sigma=" + fmt17(sigma) +
               " sigmas=" + sigmas_csv + " steps=" + std::to_string(steps) + " reg_weight=" +
               fmt17(reg_weight) + " iters=" + std::to_string(iters) + " cp_grid=" + std::to_string(cp_grid) +
               " m=" + std::to_string(m) + " compress_template=" + compress_template +
               " threads=" + std::to_string(max_threads()) + " seed=" + std::to_string(common.seed));
  Stopwatch total;

  const TriangleMesh template_mesh = load_obj(template_path);

  // Target: a mesh gets its normal cycle built (and optionally compressed);
  // a functional file is used as-is.
  DiracFunctional target;
  std::optional<RowMat3> target_vertices;
  const GaussianKernel data_kernel{sigma};
  if (sniff_input(target_path) == InputKind::Functional) {
    target = read_dirac(target_path);
  } else {
    const TriangleMesh target_mesh = load_obj(target_path);
    target_vertices = target_mesh.vertices;
    target = normal_cycle_of_mesh(target_mesh);
  }
  if (m > 0 && m < target.rows()) {
    CompressConfig cfg;
    cfg.method = SampleMethod::RlsRecursive;
    cfg.target_m = m;
    cfg.seed = common.seed;
    cfg.with_trace_bound = false;
    const CompressionResult cr = compress(data_kernel, target, cfg);
    const double rel = cr.source_norm_sq > 0.0 ? std::sqrt(cr.error_sq / cr.source_norm_sq) : 0.0;
    std::cout << "target compressed: n=" << target.rows() << " m=" << m << " rel_error=" << fmt17(rel)
              << "\n";
    target = cr.compressed;
  }

  MatchProblem problem;
  problem.template_mesh = template_mesh;
  problem.target = std::move(target);
  problem.data_kernel = data_kernel;
  problem.seed = common.seed;
  problem.shooting.kernel.sigmas = parse_double_list(sigmas_csv);
  problem.shooting.steps = steps;
  problem.shooting.reg_weight = reg_weight;
  problem.shooting.control_points = make_control_grid(bounding_box(template_mesh.vertices), cp_grid,
                                                      cp_grid, cp_grid);
  if (compress_template == "none") {
    problem.template_compression = TemplateCompression::None;
  } else if (compress_template == "target-only") {
    problem.template_compression = TemplateCompression::TargetOnly;
  } else if (compress_template.rfind("frozen:", 0) == 0) {
    problem.template_compression = TemplateCompression::FrozenSupport;
    problem.frozen_m = std::stoi(compress_template.substr(7));
  } else {
    throw std::invalid_argument("unknown --compress-template mode: " + compress_template);
  }
  prepare_match_problem(problem);

  const RowMat3 compare_target = target_vertices ? *target_vertices : RowMat3(problem.target.points);
  const double hausdorff_init = hausdorff_distance(template_mesh.vertices, compare_target);

  const MatchResult result = optimize_match(problem, iters, common.seed);
  const double hausdorff_final = hausdorff_distance(result.deformed.vertices, compare_target);
  const double wall_ms = total.elapsed_ms();

  save_obj(result.deformed, out_base + ".obj");
  JsonWriter json;
  json.field("iters", result.iterations);
  json.field("final_objective", result.final_parts.total);
  json.field("data_term", result.final_parts.data);
  json.field("reg_term", result.final_parts.reg);
  json.field("hausdorff_init", hausdorff_init);
  json.field("hausdorff_final", hausdorff_final);
  json.field("wall_ms", wall_ms);
  json.field("objective_trace", result.objective_trace);
  json.write(out_base + ".json");

  std::cout << "iters=" << result.iterations << " objective=" << fmt17(result.final_parts.total)
            << " data=" << fmt17(result.final_parts.data) << " reg=" << fmt17(result.final_parts.reg) << "\n";
  std::cout << "hausdorff_init=" << fmt17(hausdorff_init) << " hausdorff_final=" << fmt17(hausdorff_final)
            << "\n";
  std::cout << "objective_evals=" << result.objective_evals << " mean_eval_ms=" << fmt17(result.mean_eval_ms)
            << " wall_ms=" << fmt17(wall_ms) << "\n";
  std::cout << "wrote " << out_base << ".obj and " << out_base << ".json\n";
  return 0;
}

int run_gen(const std::string& kind_name, int res, const std::string& size_csv, double jitter, double warp,
            const std::string& out_path, const CommonFlags& common) {
  print_config("cmd=gen kind=" + kind_name + " res=" + std::to_string(res) + " size=" + size_csv +
               " jitter=" + fmt17(jitter) + " warp=" + fmt17(warp) + " out=" + out_path +
               " threads=" + std::to_string(max_threads()) + " seed=" + std::to_string(common.seed));
  const ShapeKind kind = parse_shape_kind(kind_name);
  ShapeParams params;
  params.resolution = res;
  params.size = parse_double_list(size_csv);
  params.seed = common.seed;
  params.jitter = jitter;
  params.pole_warp = warp;
  const auto shape = make_shape(kind, params);
  if (std::holds_alternative<TriangleMesh>(shape)) {
    const auto& mesh = std::get<TriangleMesh>(shape);
    save_obj(mesh, out_path);
    std::cout << "vertices=" << mesh.vertex_count() << " triangles=" << mesh.triangle_count() << " wrote "
              << out_path << "\n";
  } else {
    const auto& line = std::get<Polyline>(shape);
    save_polyline(line, out_path);
    std::cout << "vertices=" << line.vertex_count() << " segments=" << line.segment_count() << " wrote "
              << out_path << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac-delta shape representations: normal-cycle metrics, RLS compression, LDDMM matching"};
  app.require_subcommand(1);

  CommonFlags common;
  app.add_option("--threads", common.threads, "cap worker threads (0 = hardware)")->capture_default_str();

  // info
  std::string info_path;
  auto* info = app.add_subcommand("info", "summarize a mesh, polyline, or functional file");
  info->add_option("input", info_path, "input file")->required();

  // metric
  std::string metric_a, metric_b, metric_rep = "ncycle", metric_out;
  double metric_sigma = 0.3;
  auto* metric = app.add_subcommand("metric", "squared dual distance between two shapes");
  metric->add_option("a", metric_a, "first shape")->required();
  metric->add_option("b", metric_b, "second shape")->required();
  metric->add_option("--sigma", metric_sigma, "spatial kernel bandwidth")->capture_default_str();
  metric->add_option("--rep", metric_rep, "representation")->check(CLI::IsMember({"currents", "ncycle"}))
      ->capture_default_str();
  metric->add_option("--out", metric_out, "write a JSON result file");
  metric->add_option("--seed", common.seed, "random seed")->capture_default_str();

  // compress
  std::string cmp_input, cmp_rep = "ncycle", cmp_method = "rls", cmp_out = "compressed";
  int cmp_m = 0;
  double cmp_sigma = 0.3, cmp_oversample = 8.0, cmp_lambda = -1.0;
  bool cmp_auto_lambda = false;
  auto* cmp = app.add_subcommand("compress", "RLS/Nystrom compression of a functional");
  cmp->add_option("input", cmp_input, "mesh, polyline, or functional file")->required();
  cmp->add_option("--m", cmp_m, "number of control points")->required();
  cmp->add_option("--method", cmp_method, "sampling method")
      ->check(CLI::IsMember({"rls", "rls-exact", "uniform"}))->capture_default_str();
  cmp->add_option("--rep", cmp_rep, "representation for mesh input")
      ->check(CLI::IsMember({"currents", "ncycle"}))->capture_default_str();
  cmp->add_option("--sigma", cmp_sigma, "spatial kernel bandwidth")->capture_default_str();
  cmp->add_option("--lambda", cmp_lambda, "ridge parameter (omit for auto)");
  cmp->add_flag("--auto-lambda", cmp_auto_lambda, "pick lambda from the target size (default)");
  cmp->add_option("--oversample", cmp_oversample, "sampling oversample factor")->capture_default_str();
  cmp->add_option("--seed", common.seed, "random seed")->capture_default_str();
  cmp->add_option("--out", cmp_out, "output base path (.df and .json)")->capture_default_str();

  // decay
  std::string dec_input, dec_rep = "ncycle", dec_mlist, dec_methods = "rls,uniform", dec_seeds = "0",
              dec_out = "decay.csv";
  double dec_sigma = 0.3, dec_lambda = -1.0;
  auto* dec = app.add_subcommand("decay", "compression error decay sweep, CSV output");
  dec->add_option("input", dec_input, "mesh, polyline, or functional file")->required();
  dec->add_option("--m-list", dec_mlist, "ascending comma list of sample counts")->required();
  dec->add_option("--methods", dec_methods, "comma list: rls,rls-exact,uniform")->capture_default_str();
  dec->add_option("--seeds", dec_seeds, "comma list of seeds")->capture_default_str();
  dec->add_option("--rep", dec_rep, "representation for mesh input")
      ->check(CLI::IsMember({"currents", "ncycle"}))->capture_default_str();
  dec->add_option("--sigma", dec_sigma, "spatial kernel bandwidth")->capture_default_str();
  bool dec_auto_lambda = false;
  dec->add_option("--lambda", dec_lambda, "ridge parameter (omit for auto)");
  dec->add_flag("--auto-lambda", dec_auto_lambda, "pick lambda from each target size (default)");
  dec->add_option("--seed", common.seed, "random seed")->capture_default_str();
  dec->add_option("--out", dec_out, "output CSV path")->capture_default_str();

  // match
  std::string mat_template, mat_target, mat_sigmas = "1.0,0.5,0.2,0.1", mat_mode = "none",
              mat_out = "match";
  double mat_sigma = 0.2, mat_reg = 1.0;
  int mat_steps = 5, mat_iters = 200, mat_grid = 3, mat_m = 0;
  auto* mat = app.add_subcommand("match", "LDDMM geodesic-shooting registration");
  mat->add_option("template", mat_template, "template mesh (OBJ)")->required();
  mat->add_option("target", mat_target, "target mesh (OBJ) or functional file")->required();
  mat->add_option("--sigma", mat_sigma, "data kernel bandwidth")->capture_default_str();
  mat->add_option("--sigmas", mat_sigmas, "comma list of flow kernel bandwidths")->capture_default_str();
  mat->add_option("--steps", mat_steps, "Euler steps")->capture_default_str();
  mat->add_option("--reg-weight", mat_reg, "regularization weight")->capture_default_str();
  mat->add_option("--iters", mat_iters, "optimizer iterations")->capture_default_str();
  mat->add_option("--cp-grid", mat_grid, "control points per axis")->capture_default_str();
  mat->add_option("--m", mat_m, "compress the target to m deltas (0 = off)")->capture_default_str();
  mat->add_option("--compress-template", mat_mode, "none | target-only | frozen:<m>")
      ->capture_default_str();
  mat->add_option("--seed", common.seed, "random seed")->capture_default_str();
  mat->add_option("--out", mat_out, "output base path (.json and .obj)")->capture_default_str();

  // gen
  std::string gen_kind, gen_size = "1.0", gen_out;
  int gen_res = 2;
  double gen_jitter = 0.0, gen_warp = 0.0;
  auto* gen = app.add_subcommand("gen", "generate a procedural shape");
  gen->add_option("--kind", gen_kind, "sphere|ellipsoid|torus|flat_disc|cube|l_polyline|line_polyline")
      ->required();
  gen->add_option("--res", gen_res, "tessellation resolution")->capture_default_str();
  gen->add_option("--size", gen_size, "comma list of size parameters")->capture_default_str();
  gen->add_option("--jitter", gen_jitter, "uniform vertex jitter amplitude")->capture_default_str();
  gen->add_option("--warp", gen_warp, "pole-concentration strength (sphere/ellipsoid)")
      ->capture_default_str();
  gen->add_option("--seed", common.seed, "random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  set_max_threads(common.threads);

  try {
    if (*info) return run_info(info_path, common);
    if (*metric) return run_metric(metric_a, metric_b, metric_sigma, metric_rep, metric_out, common);
    if (*cmp) {
      std::optional<double> lambda;
      if (cmp->count("--lambda") && !cmp_auto_lambda) lambda = cmp_lambda;
      return run_compress(cmp_input, cmp_rep, cmp_m, cmp_method, cmp_sigma, lambda, cmp_oversample, cmp_out,
                          common);
    }
    if (*dec) {
      std::optional<double> lambda;
      if (dec->count("--lambda") && !dec_auto_lambda) lambda = dec_lambda;
      return run_decay(dec_input, dec_rep, dec_mlist, dec_methods, dec_seeds, dec_sigma, lambda, dec_out,
                       common);
    }
    if (*mat) {
      return run_match(mat_template, mat_target, mat_sigma, mat_sigmas, mat_steps, mat_reg, mat_iters,
                       mat_grid, mat_m, mat_mode, mat_out, common);
    }
    if (*gen) return run_gen(gen_kind, gen_res, gen_size, gen_jitter, gen_warp, gen_out, common);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    // Input and validation problems exit 2; numerical failures exit 3.
    const bool numerical = what.find("factorization") != std::string::npos ||
                           what.find("non-finite") != std::string::npos ||
                           what.find("eigensolve") != std::string::npos;
    std::cerr << "error: " << what << "\n";
    return numerical ? kExitNumerical : kExitUsage;
  }
  return 0;
}
