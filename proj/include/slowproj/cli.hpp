#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slowproj/error_functional.hpp"
#include "slowproj/models.hpp"
#include "slowproj/projection.hpp"
#include "slowproj/trajectory.hpp"

namespace slowproj::cli {

/// Model selection: a builtin name ("shear2d", "grad3") with its
/// parameters, or a JSON model file of the form
///   {"dimension": d, "matrix": [[[re, im], ...] ...], "slow_count": n}
/// (row-major, explicit re/im pairs).
struct ModelSpec {
  std::string source;  // builtin name or file path
  double alpha = 5.0;
  double gamma = 1.0;
  double epsilon = 0.1;
  double k = 1.0;
};

struct ResolvedModel {
  LinearSystem system;
  Eigen::Index slow_count = 1;
};

ResolvedModel resolve_model(const ModelSpec& spec);

struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> diagnostics;
  bool ok = true;

  std::string to_json() const;
};

/// Geometric k sweep start:end:count.
struct KRange {
  double start = 0.5;
  double end = 50.0;
  int count = 25;
};

KRange parse_k_range(const std::string& text);

std::vector<Complex> parse_x0(const std::string& text, Eigen::Index dim);

/// Writes rows (k, index, re, im, is_slow) for the model spectrum; with a
/// sweep, one block per k (builtin grad3 only).
RunReport cmd_spectrum(const ModelSpec& spec, const std::optional<KRange>& sweep,
                       const std::string& out_path);

/// Emits {method, xi, projected, commutator_norm, gramian_condition}.
RunReport cmd_project(const ModelSpec& spec, const std::vector<Complex>& x0,
                      ProjectionMethod method, const std::string& out_path);

RunReport cmd_trajectories(const ModelSpec& spec, const std::vector<Complex>& x0,
                           const std::set<ProjectionMethod>& methods,
                           std::optional<double> t_end, Eigen::Index samples,
                           const std::string& out_path);

struct XiGrid {
  double re_start = 0.0;
  double re_end = 1.0;
  int re_count = 101;
  double im_start = 0.0;
  double im_end = 0.0;
  int im_count = 1;
};

RunReport cmd_error_surface(const ModelSpec& spec, const std::vector<Complex>& x0,
                            const XiGrid& grid, const std::string& out_path);

struct ValidateOptions {
  std::uint64_t seed = 42;
  int trials = 100;
  bool inject_unstable = false;
};

/// Runs the randomized invariant suites (idempotence, fixed points,
/// normal collapse, minimality, biorthogonality, Riesz commutation,
/// closed-form/quadrature agreement). The report lists per-check pass
/// counts and is byte-identical for identical options.
RunReport cmd_validate(const ValidateOptions& options);

/// 17-significant-digit decimal form used in every CSV/JSON emitted here.
std::string format_number(double value);

}  // namespace slowproj::cli
