#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "slowproj/cli.hpp"

namespace {

using namespace slowproj;

ProjectionMethod parse_method(const std::string& name) {
  if (name == "dop") return ProjectionMethod::DOP;
  if (name == "orth") return ProjectionMethod::Orthogonal;
  if (name == "riesz") return ProjectionMethod::Riesz;
  throw BadParamsError("method must be one of dop, orth, riesz");
}

std::set<ProjectionMethod> parse_methods(const std::string& list) {
  std::set<ProjectionMethod> methods;
  std::size_t begin = 0;
  while (begin <= list.size()) {
    const std::size_t end = list.find(',', begin);
    const std::string token =
        list.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
    if (!token.empty()) methods.insert(parse_method(token));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  if (methods.empty()) {
    throw BadParamsError("methods list is empty");
  }
  return methods;
}

cli::XiGrid parse_xi_axis(const std::string& text, bool imaginary, cli::XiGrid grid) {
  double start = 0.0;
  double end = 0.0;
  int count = 0;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &start, &end, &count, &trailing) != 3 ||
      count < 1) {
    throw BadRangeError("xi ranges must be start:end:count");
  }
  if (imaginary) {
    grid.im_start = start;
    grid.im_end = end;
    grid.im_count = count;
  } else {
    grid.re_start = start;
    grid.re_end = end;
    grid.re_count = count;
  }
  return grid;
}

std::uint64_t seed_fallback() {
  if (const char* env = std::getenv("SLOWPROJ_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 42;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slowproj: dynamically optimal projections onto slow spectral manifolds"};
  app.require_subcommand(1);

  cli::ModelSpec spec;
  std::string x0_text;
  std::string method_name = "dop";
  std::string methods_text = "dop,orth,riesz";
  std::string out_path = "out.csv";
  std::string k_range_text;
  std::string xi_range_text;
  std::string xi_imag_range_text;
  std::optional<double> t_end;
  double t_end_value = 0.0;
  Eigen::Index samples = 1000;
  std::uint64_t seed = seed_fallback();
  int trials = 100;
  bool inject_unstable = false;

  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--model", spec.source, "builtin name (shear2d, grad3) or JSON file")
        ->required();
    cmd->add_option("--alpha", spec.alpha, "shear2d damping (> 1)");
    cmd->add_option("--gamma", spec.gamma, "shear2d shear (>= 0)");
    cmd->add_option("--epsilon", spec.epsilon, "grad3 Knudsen-like parameter (> 0)");
    cmd->add_option("--k", spec.k, "grad3 wave number (> 0)");
  };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue table, optionally a k sweep");
  add_model_flags(spectrum);
  spectrum->add_option("--k-range", k_range_text, "geometric sweep start:end:count");
  spectrum->add_option("--out", out_path, "output CSV path");

  auto* project = app.add_subcommand("project", "project an initial condition");
  add_model_flags(project);
  project->add_option("--x0", x0_text, "interleaved re,im,... list")->required();
  project->add_option("--method", method_name, "dop | orth | riesz");
  project->add_option("--out", out_path, "output JSON path");

  auto* trajectories =
      app.add_subcommand("trajectories", "full vs reduced trajectories as CSV");
  add_model_flags(trajectories);
  trajectories->add_option("--x0", x0_text, "interleaved re,im,... list")->required();
  trajectories->add_option("--methods", methods_text, "comma list of dop,orth,riesz");
  auto* t_end_option = trajectories->add_option("--t-end", t_end_value, "time horizon");
  trajectories->add_option("--samples", samples, "sample count (>= 2)");
  trajectories->add_option("--out", out_path, "output CSV path");

  auto* surface = app.add_subcommand("error-surface", "cumulative error over a xi grid");
  add_model_flags(surface);
  surface->add_option("--x0", x0_text, "interleaved re,im,... list")->required();
  surface->add_option("--xi-range", xi_range_text, "real-axis grid start:end:count");
  surface->add_option("--xi-imag-range", xi_imag_range_text,
                      "imaginary-axis grid start:end:count");
  surface->add_option("--out", out_path, "output CSV path");

  auto* validate = app.add_subcommand("validate", "randomized invariant suite");
  validate->add_option("--seed", seed, "RNG seed (SLOWPROJ_SEED fallback)");
  validate->add_option("--trials", trials, "number of random trials");
  validate->add_flag("--inject-unstable", inject_unstable,
                     "self-test: verify that instability is surfaced");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::RunReport report;
    if (spectrum->parsed()) {
      std::optional<cli::KRange> sweep;
      if (!k_range_text.empty()) sweep = cli::parse_k_range(k_range_text);
      report = cli::cmd_spectrum(spec, sweep, out_path);
    } else if (project->parsed()) {
      const auto dim = cli::resolve_model(spec).system.dim;
      report = cli::cmd_project(spec, cli::parse_x0(x0_text, dim), parse_method(method_name),
                                out_path);
    } else if (trajectories->parsed()) {
      const auto dim = cli::resolve_model(spec).system.dim;
      if (t_end_option->count() > 0) t_end = t_end_value;
      report = cli::cmd_trajectories(spec, cli::parse_x0(x0_text, dim),
                                     parse_methods(methods_text), t_end, samples, out_path);
    } else if (surface->parsed()) {
      const auto dim = cli::resolve_model(spec).system.dim;
      cli::XiGrid grid;
      if (!xi_range_text.empty()) grid = parse_xi_axis(xi_range_text, false, grid);
      if (!xi_imag_range_text.empty()) grid = parse_xi_axis(xi_imag_range_text, true, grid);
      report = cli::cmd_error_surface(spec, cli::parse_x0(x0_text, dim), grid, out_path);
    } else {
      report = cli::cmd_validate({seed, trials, inject_unstable});
    }
    std::cout << report.to_json();
    return report.ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}
