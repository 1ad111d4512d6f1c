// SPDX-License-Identifier: Apache-2.0

#include "plate/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plate/verification.hpp"

namespace plate {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string stem_of(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidConfig("bad numeric value for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidConfig("bad integer value for " + key + ": '" + v + "'");
  }
}

double benchmark_load(const Eigen::Vector2d& x) {
  const double pi = 3.14159265358979323846;
  return 4 * std::pow(pi, 4) * std::sin(pi * x.x()) * std::sin(pi * x.y());
}

int run_solve(const RunConfig& config, std::ostream& out) {
  Mesh mesh;
  BoundaryPartition partition;
  if (!config.mesh_file.empty()) {
    mesh = load_mesh(config.mesh_file);
    partition = classify_boundary(mesh);
  } else {
    mesh = build_square_mesh(config.levels.front(), config.kind);
    partition = classify_boundary(mesh, config.tags);
  }
  for (const auto& w : partition.warnings) out << "warning: " << w << "\n";
  const double eta = config.eta < 0 ? default_eta(config.degree) : config.eta;
  const MaterialTensor material(config.stiffness, config.nu);
  const PlateSolver solver(mesh, partition, config.degree, eta, material);
  if (config.dump_systems)
    solver.dump_systems(config.out.empty() ? "plate" : stem_of(config.out));
  const PlateSolution solution = solver.solve(benchmark_load);
  const std::string path = config.out.empty() ? "plate_solution.csv" : config.out;
  write_solution_csv(path, solver, solution);
  out << "wrote " << path << " (" << mesh.num_elements() << " rows)\n";
  return 0;
}

int run_study(const RunConfig& config, std::ostream& out) {
  StudyOptions options;
  options.degree = config.degree;
  options.levels = config.levels;
  options.eta = config.eta;
  options.material = MaterialTensor(config.stiffness, config.nu);
  options.tags = config.tags;
  options.kind = config.kind;
  options.threads = config.threads;
  const std::vector<StudyRow> rows = convergence_study(options);
  const std::string csv = study_csv(rows);
  const std::string text = study_text(rows);
  out << text;
  if (!config.out.empty()) {
    std::ofstream f(config.out);
    if (!f) throw IoError("cannot write " + config.out);
    f << csv;
    std::ofstream ftext(stem_of(config.out) + ".txt");
    if (!ftext) throw IoError("cannot write " + stem_of(config.out) + ".txt");
    ftext << text;
  } else {
    out << csv;
  }
  return 0;
}

int run_diagnose(const RunConfig& config, std::ostream& out) {
  Mesh mesh;
  BoundaryPartition partition;
  if (!config.mesh_file.empty()) {
    mesh = load_mesh(config.mesh_file);
    partition = classify_boundary(mesh);
  } else {
    mesh = build_square_mesh(config.levels.front(), config.kind);
    partition = classify_boundary(mesh, config.tags);
  }
  const double eta = config.eta < 0 ? default_eta(config.degree) : config.eta;
  const MaterialTensor material(config.stiffness, config.nu);
  const PlateSolver solver(mesh, partition, config.degree, eta, material);
  const CoercivityReport report = solver.coercivity_estimate();
  char line[160];
  std::snprintf(line, sizeof line, "coercivity_estimate=%.6g converged=%d iterations=%d\n",
                report.estimate, report.converged ? 1 : 0, report.iterations);
  out << line;
  if (report.estimate <= 0) {
    out << "status=nonpositive\n";
    return 3;
  }
  const PlateSolution solution = solver.solve(benchmark_load);
  std::snprintf(line, sizeof line, "mnn_boundary_norm=%.6g\n",
                solver.moment_nn_boundary_norm(solution));
  out << line;
  std::snprintf(line, sizeof line, "coupling_residual=%.6g\n",
                solver.coupling_residual(solution.p));
  out << line;
  out << "status=ok\n";
  return 0;
}

}  // namespace

SideTags parse_tags(const std::string& spec) {
  std::vector<BoundaryTag> tags;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.size() != 1) throw InvalidConfig("bad tag '" + item + "' in --tags");
    try {
      tags.push_back(tag_from_letter(item[0]));
    } catch (const IoError&) {
      throw InvalidConfig("bad tag '" + item + "' in --tags (use c, s or f)");
    }
  }
  if (tags.size() != 4)
    throw InvalidConfig("--tags needs four entries: west,north,east,south");
  return {tags[0], tags[1], tags[2], tags[3]};
}

std::vector<int> parse_levels(const std::string& spec) {
  const auto dots = spec.find("..");
  std::vector<int> levels;
  if (dots == std::string::npos) {
    levels.push_back(parse_int(trim(spec), "levels"));
  } else {
    const int a = parse_int(trim(spec.substr(0, dots)), "levels");
    const int b = parse_int(trim(spec.substr(dots + 2)), "levels");
    if (b < a) throw InvalidConfig("--levels range must be ascending");
    for (int l = a; l <= b; ++l) levels.push_back(l);
  }
  return levels;
}

void apply_option(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "degree") {
    config.degree = parse_int(value, key);
  } else if (key == "levels" || key == "level") {
    config.levels = parse_levels(value);
  } else if (key == "eta") {
    config.eta = parse_double(value, key);
  } else if (key == "nu") {
    config.nu = parse_double(value, key);
  } else if (key == "stiffness") {
    config.stiffness = parse_double(value, key);
  } else if (key == "tags") {
    config.tags = parse_tags(value);
  } else if (key == "mode") {
    config.mode = value;
  } else if (key == "out") {
    config.out = value;
  } else if (key == "mesh") {
    config.mesh_file = value;
  } else if (key == "kind") {
    if (value == "triangle") config.kind = CellKind::Triangle;
    else if (value == "quad") config.kind = CellKind::Quad;
    else throw InvalidConfig("kind must be 'triangle' or 'quad'");
  } else if (key == "dump_systems") {
    config.dump_systems = parse_int(value, key) != 0;
  } else if (key == "threads") {
    config.threads = parse_int(value, key);
  } else {
    throw InvalidConfig("unknown configuration key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_option(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::validate() const {
  if (degree < 1 || degree > 3) throw InvalidConfig("degree must be 1, 2 or 3");
  if (levels.empty()) throw InvalidConfig("level list is empty");
  for (size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw InvalidConfig("levels must be ascending");
  for (int l : levels)
    if (l < 0 || l > 14) throw InvalidConfig("levels must lie in 0..14");
  if (eta < 0 && eta != -1) throw InvalidConfig("eta must be nonnegative");
  if (mode != "solve" && mode != "study" && mode != "diagnose")
    throw InvalidConfig("mode must be solve, study or diagnose");
  if (mode == "study" && !mesh_file.empty())
    throw InvalidConfig("convergence studies run on native square meshes; drop --mesh");
  if (kind == CellKind::Quad && degree != 1)
    throw InvalidConfig("quad meshes support degree 1 only");
  if (!(stiffness > 0)) throw InvalidConfig("stiffness must be positive");
  if (!(nu > -1 && nu < 0.5)) throw InvalidConfig("nu must lie in (-1, 1/2)");
  if (threads < 1) throw InvalidConfig("threads must be >= 1");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.mode == "solve") return run_solve(config, out);
    if (config.mode == "study") return run_study(config, out);
    return run_diagnose(config, out);
  } catch (const Error& e) {
    err << "error code=" << e.code() << " message=\"" << e.what() << "\"\n";
    if (e.code() == "INVALID_CONFIG") return 2;
    if (e.code() == "NOT_COERCIVE") return 3;
    if (e.code() == "IO_ERROR") return 5;
    return 4;
  } catch (const std::exception& e) {
    err << "error code=INTERNAL message=\"" << e.what() << "\"\n";
    return 4;
  }
}

int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    // --config is applied first; explicit flags override it in order.
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg == "--help" || arg == "-h") {
        out << "usage: plate_cli [--config PATH] [--degree K] [--levels A..B] [--eta X]\n"
               "                 [--nu X] [--stiffness D] [--tags c,s,f,s] [--kind triangle|quad]\n"
               "                 [--mesh PATH] [--mode solve|study|diagnose] [--out PATH]\n"
               "                 [--dump-systems] [--threads N]\n"
               "tags are listed in west,north,east,south order.\n";
        return 0;
      }
      if (arg.rfind("--", 0) != 0) throw InvalidConfig("unexpected argument '" + arg + "'");
      std::string key = arg.substr(2);
      std::string value;
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        value = key.substr(eq + 1);
        key = key.substr(0, eq);
      } else if (key == "dump-systems") {
        value = "1";
      } else {
        if (i + 1 >= argc) throw InvalidConfig("missing value for --" + key);
        value = argv[++i];
      }
      if (key == "dump-systems") key = "dump_systems";
      if (key == "config") {
        apply_config_file(config, value);
      } else {
        overrides.emplace_back(key, value);
      }
    }
    // The PLATE_THREADS env var caps parallelism over configured values.
    for (const auto& [key, value] : overrides) apply_option(config, key, value);
    if (const char* env = std::getenv("PLATE_THREADS")) {
      const int t = std::atoi(env);
      if (t >= 1) config.threads = std::min(config.threads, t);
    }
  } catch (const Error& e) {
    err << "error code=" << e.code() << " message=\"" << e.what() << "\"\n";
    return e.code() == "IO_ERROR" ? 5 : 2;
  }
  return run(config, out, err);
}

}  // namespace plate
