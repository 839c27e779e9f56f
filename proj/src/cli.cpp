#include "slowproj/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "slowproj/random_systems.hpp"

namespace slowproj::cli {

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

ResolvedModel resolve_model(const ModelSpec& spec) {
  if (spec.source == "shear2d") {
    return {shear2d({spec.alpha, spec.gamma}), 1};
  }
  if (spec.source == "grad3") {
    return {grad3({spec.epsilon, spec.k}), 2};
  }

  std::ifstream in(spec.source);
  if (!in) {
    throw BadModelError("cannot open model file: " + spec.source);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw BadModelError("model file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.contains("dimension") || !doc.contains("matrix") || !doc.contains("slow_count")) {
    throw BadModelError("model file needs dimension, matrix and slow_count");
  }
  const auto dim = doc["dimension"].get<Eigen::Index>();
  if (dim < 1 || dim > kMaxDim) {
    throw BadModelError("model dimension must be in [1, 64]");
  }
  const auto& rows = doc["matrix"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
    throw BadModelError("matrix must have `dimension` rows");
  }
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw BadModelError("matrix rows must have `dimension` entries");
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      const auto& entry = row[static_cast<std::size_t>(j)];
      if (!entry.is_array() || entry.size() != 2) {
        throw BadModelError("matrix entries must be [re, im] pairs");
      }
      m(i, j) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  const auto slow_count = doc["slow_count"].get<Eigen::Index>();
  if (slow_count < 1 || slow_count > dim) {
    throw BadModelError("slow_count must be in [1, dimension]");
  }
  LinearSystem sys;
  try {
    sys = make_system(std::move(m), spec.source);
  } catch (const Error& e) {
    throw BadModelError(std::string("model file rejected: ") + e.what());
  }
  return {std::move(sys), slow_count};
}

KRange parse_k_range(const std::string& text) {
  KRange range;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &range.start, &range.end, &range.count,
                  &trailing) != 3) {
    throw BadRangeError("k-range must be start:end:count");
  }
  if (!(range.start > 0.0) || !(range.end > range.start) || range.count < 2) {
    throw BadRangeError("k-range needs 0 < start < end and count >= 2");
  }
  return range;
}

std::vector<Complex> parse_x0(const std::string& text, Eigen::Index dim) {
  std::vector<double> parts;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      parts.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw BadParamsError("x0 must be a comma-separated list of numbers");
    }
  }
  if (static_cast<Eigen::Index>(parts.size()) != 2 * dim) {
    throw BadParamsError("x0 needs dim interleaved re,im pairs (" +
                         std::to_string(2 * dim) + " numbers)");
  }
  std::vector<Complex> x0(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    x0[static_cast<std::size_t>(i)] =
        Complex(parts[static_cast<std::size_t>(2 * i)], parts[static_cast<std::size_t>(2 * i + 1)]);
  }
  return x0;
}

namespace {

ComplexVector to_vector(const std::vector<Complex>& values) {
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)];
  return v;
}

nlohmann::json complex_list(const ComplexVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back({v(i).real(), v(i).imag()});
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open output file: " + path);
  }
  return out;
}

// Coordinates of an on-manifold point in the slow basis (least squares,
// exact for range points).
ComplexVector basis_coordinates(const SlowBasis& basis, const ComplexVector& point) {
  const ComplexMatrix& x = basis.vectors;
  return (x.adjoint() * x).ldlt().solve(x.adjoint() * point);
}

}  // namespace

std::string RunReport::to_json() const {
  nlohmann::json doc;
  doc["command"] = command;
  nlohmann::json in = nlohmann::json::object();
  for (const auto& [key, value] : inputs) in[key] = value;
  doc["inputs"] = in;
  doc["outputs"] = outputs;
  doc["diagnostics"] = diagnostics;
  doc["ok"] = ok;
  return doc.dump(2) + "\n";
}

RunReport cmd_spectrum(const ModelSpec& spec, const std::optional<KRange>& sweep,
                       const std::string& out_path) {
  RunReport report;
  report.command = "spectrum";
  report.inputs.emplace_back("model", spec.source);
  report.inputs.emplace_back("out", out_path);

  std::ostringstream csv;
  csv << "k,index,re,im,is_slow\n";

  auto emit_rows = [&](double k_value, const ResolvedModel& model) {
    const SpectralData data = analyze(model.system);
    for (Eigen::Index i = 0; i < model.system.dim; ++i) {
      csv << format_number(k_value) << ',' << i << ','
          << format_number(data.decomposition.values(i).real()) << ','
          << format_number(data.decomposition.values(i).imag()) << ','
          << (i < model.slow_count ? 1 : 0) << '\n';
    }
  };

  if (sweep) {
    if (spec.source != "grad3") {
      throw BadModelError("spectrum sweeps are supported for the grad3 builtin only");
    }
    report.inputs.emplace_back("k_range", format_number(sweep->start) + ":" +
                                              format_number(sweep->end) + ":" +
                                              std::to_string(sweep->count));
    const double ratio = sweep->end / sweep->start;
    for (int i = 0; i < sweep->count; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(sweep->count - 1);
      const double k_value = sweep->start * std::pow(ratio, frac);
      ModelSpec point = spec;
      point.k = k_value;
      emit_rows(k_value, resolve_model(point));
    }
  } else {
    const ResolvedModel model = resolve_model(spec);
    const auto it = model.system.params.find("k");
    emit_rows(it != model.system.params.end() ? it->second : 0.0, model);
  }

  auto out = open_output(out_path);
  out << csv.str();
  report.outputs.push_back(out_path);
  return report;
}

RunReport cmd_project(const ModelSpec& spec, const std::vector<Complex>& x0,
                      ProjectionMethod method, const std::string& out_path) {
  RunReport report;
  report.command = "project";
  report.inputs.emplace_back("model", spec.source);
  report.inputs.emplace_back("method", to_string(method));
  report.inputs.emplace_back("out", out_path);

  const ResolvedModel model = resolve_model(spec);
  const ComplexVector x0v = to_vector(x0);
  if (x0v.size() != model.system.dim) {
    throw ShapeMismatchError("project: x0 dimension differs from the model");
  }
  const SpectralData data = analyze(model.system);
  assert_stable(data);
  const SlowBasis basis = slow_basis(data, model.slow_count);
  const Gramian g = gramian(basis);
  if (g.ill_conditioned()) {
    report.diagnostics.push_back("gramian condition exceeds 1e10");
  }

  ProjectionOperator op;
  ComplexVector xi;
  switch (method) {
    case ProjectionMethod::DOP:
      op = dop_matrix(model.system, basis);
      xi = minimizer(g, interaction_vector(model.system, basis, x0v));
      break;
    case ProjectionMethod::Orthogonal:
      op = orthogonal_projection(basis);
      xi = basis_coordinates(basis, op.apply(x0v));
      break;
    case ProjectionMethod::Riesz:
      op = riesz_projection(data, model.slow_count);
      xi = basis_coordinates(basis, op.apply(x0v));
      break;
  }

  nlohmann::json doc;
  doc["method"] = to_string(method);
  doc["xi"] = complex_list(xi);
  doc["projected"] = complex_list(op.apply(x0v));
  doc["commutator_norm"] = commutator(op.matrix, model.system.matrix).norm();
  doc["gramian_condition"] = g.condition;

  auto out = open_output(out_path);
  out << doc.dump(2) << '\n';
  report.outputs.push_back(out_path);
  return report;
}

RunReport cmd_trajectories(const ModelSpec& spec, const std::vector<Complex>& x0,
                           const std::set<ProjectionMethod>& methods,
                           std::optional<double> t_end, Eigen::Index samples,
                           const std::string& out_path) {
  RunReport report;
  report.command = "trajectories";
  report.inputs.emplace_back("model", spec.source);
  report.inputs.emplace_back("out", out_path);

  const ResolvedModel model = resolve_model(spec);
  const ComplexVector x0v = to_vector(x0);
  if (x0v.size() != model.system.dim) {
    throw ShapeMismatchError("trajectories: x0 dimension differs from the model");
  }
  const SpectralData data = analyze(model.system);
  assert_stable(data);
  const SlowBasis basis = slow_basis(data, model.slow_count);

  const double horizon = t_end ? *t_end : default_horizon(data.spectral_abscissa);
  report.inputs.emplace_back("t_end", format_number(horizon));
  report.inputs.emplace_back("samples", std::to_string(samples));
  const TimeGrid grid = make_grid(horizon, samples);

  const Trajectory full = propagate_full(data, x0v, grid);

  // Fixed emission order regardless of the set's contents.
  const ProjectionMethod order[] = {ProjectionMethod::DOP, ProjectionMethod::Orthogonal,
                                    ProjectionMethod::Riesz};
  std::vector<std::pair<ProjectionMethod, Trajectory>> reduced;
  for (const auto method : order) {
    if (!methods.contains(method)) continue;
    ComplexVector xi;
    switch (method) {
      case ProjectionMethod::DOP:
        xi = minimizer(gramian(basis), interaction_vector(model.system, basis, x0v));
        break;
      case ProjectionMethod::Orthogonal:
        xi = basis_coordinates(basis, x0v);
        break;
      case ProjectionMethod::Riesz:
        xi = basis_coordinates(basis, riesz_projection(data, model.slow_count).apply(x0v));
        break;
    }
    reduced.emplace_back(method, propagate_reduced(basis, xi, grid));
  }

  auto out = open_output(out_path);
  out << 't';
  const Eigen::Index d = model.system.dim;
  for (Eigen::Index i = 0; i < d; ++i) {
    out << ",full_" << i << "_re,full_" << i << "_im";
  }
  for (const auto& [method, trajectory] : reduced) {
    for (Eigen::Index i = 0; i < d; ++i) {
      out << ',' << to_string(method) << '_' << i << "_re," << to_string(method) << '_'
          << i << "_im";
    }
  }
  out << '\n';
  for (Eigen::Index s = 0; s < grid.samples; ++s) {
    out << format_number(grid.time(s));
    const auto& fs = full.states[static_cast<std::size_t>(s)];
    for (Eigen::Index i = 0; i < d; ++i) {
      out << ',' << format_number(fs(i).real()) << ',' << format_number(fs(i).imag());
    }
    for (const auto& [method, trajectory] : reduced) {
      const auto& rs = trajectory.states[static_cast<std::size_t>(s)];
      for (Eigen::Index i = 0; i < d; ++i) {
        out << ',' << format_number(rs(i).real()) << ',' << format_number(rs(i).imag());
      }
    }
    out << '\n';
  }
  report.outputs.push_back(out_path);
  return report;
}

RunReport cmd_error_surface(const ModelSpec& spec, const std::vector<Complex>& x0,
                            const XiGrid& grid, const std::string& out_path) {
  RunReport report;
  report.command = "error-surface";
  report.inputs.emplace_back("model", spec.source);
  report.inputs.emplace_back("out", out_path);

  if (grid.re_count < 1 || grid.im_count < 1) {
    throw BadRangeError("error-surface: grid counts must be positive");
  }

  const ResolvedModel model = resolve_model(spec);
  const ComplexVector x0v = to_vector(x0);
  if (x0v.size() != model.system.dim) {
    throw ShapeMismatchError("error-surface: x0 dimension differs from the model");
  }
  const SpectralData data = analyze(model.system);
  assert_stable(data);
  const SlowBasis basis = slow_basis(data, model.slow_count);
  const Eigen::Index n = basis.count();
  if (n > 2) {
    throw UnsupportedDimensionError("error-surface: gridding supports n in {1, 2}");
  }
  const bool conjugate_pair =
      n == 2 && std::abs(basis.eigenvalues(1) - std::conj(basis.eigenvalues(0))) <=
                    1e-8 * std::max(1.0, std::abs(basis.eigenvalues(0)));
  if (n == 2 && !conjugate_pair) {
    throw UnsupportedDimensionError(
        "error-surface: n = 2 requires a conjugate acoustic pair");
  }

  const Gramian g = gramian(basis);
  const ComplexVector interaction = interaction_vector(model.system, basis, x0v);
  const double e_const =
      error_closed_form(model.system, basis, x0v, ComplexVector::Zero(n)).e_const;

  auto total_at = [&](Complex z) {
    ComplexVector xi(n);
    xi(0) = z;
    if (n == 2) xi(1) = std::conj(z);
    Complex quad = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        quad += xi(i) * g.entries(i, j) * std::conj(xi(j));
      }
    }
    const double e_inter = -0.5 * quad.real();
    const double e_trans = (interaction.array() * xi.conjugate().array()).sum().real();
    return e_const + e_inter + e_trans;
  };

  auto out = open_output(out_path);
  out << "xi_re,xi_im,e_total\n";
  for (int i = 0; i < grid.re_count; ++i) {
    const double re =
        grid.re_count == 1
            ? grid.re_start
            : grid.re_start + (grid.re_end - grid.re_start) * static_cast<double>(i) /
                                  static_cast<double>(grid.re_count - 1);
    for (int j = 0; j < grid.im_count; ++j) {
      const double im =
          grid.im_count == 1
              ? grid.im_start
              : grid.im_start + (grid.im_end - grid.im_start) * static_cast<double>(j) /
                                    static_cast<double>(grid.im_count - 1);
      out << format_number(re) << ',' << format_number(im) << ','
          << format_number(total_at(Complex(re, im))) << '\n';
    }
  }
  report.outputs.push_back(out_path);
  return report;
}

namespace {

struct CheckCounter {
  std::string name;
  int passed = 0;
  int total = 0;
};

class ValidationRun {
public:
  explicit ValidationRun(RunReport& report) : report_(report) {}

  void record(const std::string& check, bool pass, const std::string& detail) {
    auto& counter = counter_for(check);
    ++counter.total;
    if (pass) {
      ++counter.passed;
    } else if (!failure_recorded_) {
      failure_recorded_ = true;
      report_.diagnostics.push_back("first failure: " + check + " (" + detail + ")");
    }
  }

  void finish() {
    bool all_ok = true;
    for (const auto& counter : counters_) {
      report_.diagnostics.push_back("check " + counter.name + ": " +
                                    std::to_string(counter.passed) + "/" +
                                    std::to_string(counter.total) + " passed");
      if (counter.passed != counter.total) all_ok = false;
    }
    report_.ok = all_ok;
  }

private:
  CheckCounter& counter_for(const std::string& check) {
    for (auto& counter : counters_) {
      if (counter.name == check) return counter;
    }
    counters_.push_back({check, 0, 0});
    return counters_.back();
  }

  RunReport& report_;
  std::vector<CheckCounter> counters_;
  bool failure_recorded_ = false;
};

}  // namespace

RunReport cmd_validate(const ValidateOptions& options) {
  if (options.trials < 1) {
    throw BadParamsError("validate: trials must be at least 1");
  }
  RunReport report;
  report.command = "validate";
  report.inputs.emplace_back("seed", std::to_string(options.seed));
  report.inputs.emplace_back("trials", std::to_string(options.trials));
  report.inputs.emplace_back("inject_unstable", options.inject_unstable ? "true" : "false");

  std::mt19937_64 rng(options.seed);
  ValidationRun run(report);

  RandomSystemOptions opts;
  opts.min_dim = 2;
  opts.max_dim = 6;

  for (int trial = 0; trial < options.trials; ++trial) {
    const std::string tag = "trial " + std::to_string(trial);
    RandomSystemOptions draw = opts;
    draw.real_entries = trial % 3 == 0;
    const LinearSystem system = random_stable_system(rng, draw);
    const SpectralData data = analyze(system);
    const Eigen::Index n = random_valid_slow_count(rng, data);
    const SlowBasis basis = slow_basis(data, n);
    const Gramian g = gramian(basis);

    const ProjectionOperator p_dop = dop_matrix(system, basis);
    const ProjectionOperator p_orth = orthogonal_projection(basis);
    const ProjectionOperator p_riesz = riesz_projection(data, n);

    for (const auto* op : {&p_dop, &p_orth, &p_riesz}) {
      const double defect = (op->matrix * op->matrix - op->matrix).norm();
      run.record("idempotence", defect <= 1e-9,
                 tag + " method " + to_string(op->method) + " defect " +
                     format_number(defect));
      double fixed_point = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        fixed_point = std::max(
            fixed_point, (op->matrix * basis.vectors.col(j) - basis.vectors.col(j)).norm());
      }
      run.record("fixed_points", fixed_point <= 1e-10,
                 tag + " method " + to_string(op->method) + " defect " +
                     format_number(fixed_point));
    }

    run.record("riesz_commutation",
               commutator(p_riesz.matrix, system.matrix).norm() <=
                   1e-9 * system.matrix.norm(),
               tag);

    const DualBasis dual = dop_dual_set(system, basis, g);
    double bi_defect = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex ip = inner(basis.vectors.col(k), dual.vectors.col(i));
        bi_defect = std::max(bi_defect, std::abs(ip - (k == i ? 1.0 : 0.0)));
      }
    }
    run.record("biorthogonality", bi_defect <= 1e-10, tag + " defect " + format_number(bi_defect));

    const ComplexVector x0 = random_vector(rng, system.dim);
    const ComplexVector interaction = interaction_vector(system, basis, x0);
    const ComplexVector xi_min = minimizer(g, interaction);
    const ErrorBreakdown at_min = error_closed_form(system, basis, x0, xi_min);
    bool minimal = true;
    for (const double delta_norm : {1e-2, 1e-1, 1.0}) {
      ComplexVector delta = random_vector(rng, n);
      delta *= delta_norm / delta.norm();
      const ErrorBreakdown perturbed = error_closed_form(system, basis, x0, xi_min + delta);
      if (at_min.total > perturbed.total + 1e-12) minimal = false;
    }
    run.record("minimality", minimal, tag);

    const double quad = quadrature_error(system, basis, x0, xi_min);
    // The closed-form total is a difference of terms of size `magnitude`
    // and cannot be evaluated more accurately than roundoff on that
    // scale; the agreement check tops out there.
    const double magnitude =
        std::abs(at_min.e_inter) + std::abs(at_min.e_trans) + at_min.e_const;
    const double gap = std::abs(quad - at_min.total);
    const bool agree =
        gap <= std::max(1e-6 * std::abs(at_min.total), 1e-12 * magnitude);
    run.record("oracle_agreement", agree, tag + " gap " + format_number(gap));

    const LinearSystem normal = random_normal_system(rng, opts);
    const SpectralData normal_data = analyze(normal);
    const Eigen::Index normal_n = random_valid_slow_count(rng, normal_data);
    const SlowBasis normal_basis = slow_basis(normal_data, normal_n);
    const double orth_gap = (dop_matrix(normal, normal_basis).matrix -
                             orthogonal_projection(normal_basis).matrix)
                                .norm();
    const double riesz_gap = (dop_matrix(normal, normal_basis).matrix -
                              riesz_projection(normal_data, normal_n).matrix)
                                 .norm();
    run.record("normal_collapse", orth_gap <= 1e-9 && riesz_gap <= 1e-9,
               tag + " orth " + format_number(orth_gap) + " riesz " +
                   format_number(riesz_gap));
  }

  if (options.inject_unstable) {
    ComplexMatrix bad(2, 2);
    bad << Complex(0.5, 0.0), 0.0, 0.0, Complex(-1.0, 0.0);
    bool surfaced = false;
    try {
      const SpectralData data = analyze(make_system(bad, "injected_unstable"));
      assert_stable(data);
      (void)slow_basis(data, 1);
    } catch (const UnstableError&) {
      surfaced = true;
    }
    run.record("unstable_injection", surfaced, "expected UnstableError");
  }

  run.finish();
  return report;
}

}  // namespace slowproj::cli
