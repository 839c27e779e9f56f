#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slowproj/cli.hpp"
#include "slowproj/random_systems.hpp"
#include "support/test_utils.hpp"

using namespace slowproj;
using namespace slowproj::testing;
namespace fs = std::filesystem;

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  Eigen::Index column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw std::runtime_error("missing column " + name);
  }
};

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Csv csv;
  std::string line;
  REQUIRE(std::getline(in, line));
  std::stringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) csv.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream body(line);
    while (std::getline(body, cell, ',')) row.push_back(std::stod(cell));
    REQUIRE(row.size() == csv.header.size());
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("slowproj_test_" + name)).string();
}

const cli::ModelSpec kShear{"shear2d", 5.0, 1.0, 0.1, 1.0};
const cli::ModelSpec kGrad{"grad3", 5.0, 1.0, 0.1, 1.0};

}  // namespace

TEST_CASE("spectrum for builtins") {
  const std::string out = temp_path("shear_spectrum.csv");
  const auto report = cli::cmd_spectrum(kShear, std::nullopt, out);
  CHECK(report.ok);
  REQUIRE(report.outputs.size() == 1);
  CHECK(fs::exists(report.outputs[0]));

  const Csv csv = read_csv(out);
  REQUIRE(csv.rows.size() == 2);
  CHECK(csv.rows[0][csv.column("re")] == doctest::Approx(-1.0));
  CHECK(csv.rows[1][csv.column("re")] == doctest::Approx(-5.0));
  CHECK(csv.rows[0][csv.column("is_slow")] == 1.0);
  CHECK(csv.rows[1][csv.column("is_slow")] == 0.0);

  const std::string out3 = temp_path("grad_spectrum.csv");
  cli::cmd_spectrum(kGrad, std::nullopt, out3);
  const Csv grad_csv = read_csv(out3);
  REQUIRE(grad_csv.rows.size() == 3);
  for (const auto& row : grad_csv.rows) {
    CHECK(row[grad_csv.column("re")] < 0.0);
  }
}

TEST_CASE("spectrum sweep approaches the accumulation lines") {
  const std::string out = temp_path("grad_sweep.csv");
  cli::KRange sweep = cli::parse_k_range("0.5:50:25");
  cli::cmd_spectrum(kGrad, sweep, out);
  const Csv csv = read_csv(out);
  CHECK(csv.rows.size() == 3 * 25);

  const double last_k = csv.rows.back()[csv.column("k")];
  CHECK(last_k == doctest::Approx(50.0));
  for (const auto& row : csv.rows) {
    if (row[csv.column("k")] == last_k && row[csv.column("is_slow")] == 1.0) {
      CHECK(std::abs(row[csv.column("re")] + 20.0 / 9.0) <= 0.02 * (20.0 / 9.0));
    }
  }

  CHECK_THROWS_AS(cli::cmd_spectrum(kShear, sweep, out), BadModelError);
  CHECK_THROWS_AS(cli::parse_k_range("5:1:10"), BadRangeError);
  CHECK_THROWS_AS(cli::parse_k_range("nonsense"), BadRangeError);
}

TEST_CASE("project emits the three closed-form images") {
  const std::vector<Complex> x0{Complex(0.4, 0.0), Complex(1.2, 0.0)};
  const struct {
    ProjectionMethod method;
    double expected;
  } cases[] = {{ProjectionMethod::DOP, 0.6},
               {ProjectionMethod::Orthogonal, 0.4},
               {ProjectionMethod::Riesz, 0.7}};
  for (const auto& c : cases) {
    const std::string out = temp_path(std::string("project_") + to_string(c.method) + ".json");
    const auto report = cli::cmd_project(kShear, x0, c.method, out);
    CHECK(report.ok);
    const nlohmann::json doc = nlohmann::json::parse(read_file(out));
    CHECK(doc.at("method").get<std::string>() == to_string(c.method));
    CHECK(doc.at("projected")[0][0].get<double>() == doctest::Approx(c.expected));
    CHECK(std::abs(doc.at("projected")[1][0].get<double>()) <= 1e-12);
    CHECK(doc.at("gramian_condition").get<double>() == doctest::Approx(1.0));
    if (c.method == ProjectionMethod::Riesz) {
      CHECK(doc.at("commutator_norm").get<double>() <= 1e-9);
    }
  }
}

TEST_CASE("trajectories reproduce the figure orderings") {
  const std::vector<Complex> x0{Complex(0.4, 0.0), Complex(1.2, 0.0)};
  const std::string out = temp_path("shear_traj.csv");
  cli::cmd_trajectories(kShear, x0,
                        {ProjectionMethod::DOP, ProjectionMethod::Orthogonal}, 10.0,
                        2000, out);
  const Csv csv = read_csv(out);
  CHECK(csv.header.front() == "t");
  CHECK(csv.header[1] == "full_0_re");

  double dop_l2 = 0.0;
  double orth_l2 = 0.0;
  for (const auto& row : csv.rows) {
    for (Eigen::Index i = 0; i < 2; ++i) {
      const auto suffix = std::to_string(i);
      const double fr = row[csv.column("full_" + suffix + "_re")];
      const double fi = row[csv.column("full_" + suffix + "_im")];
      const double dr = row[csv.column("dop_" + suffix + "_re")];
      const double di = row[csv.column("dop_" + suffix + "_im")];
      const double onr = row[csv.column("orth_" + suffix + "_re")];
      const double oni = row[csv.column("orth_" + suffix + "_im")];
      dop_l2 += (fr - dr) * (fr - dr) + (fi - di) * (fi - di);
      orth_l2 += (fr - onr) * (fr - onr) + (fi - oni) * (fi - oni);
    }
  }
  CHECK(dop_l2 < orth_l2);
}

TEST_CASE("trajectories of on-manifold starts coincide with the full solution") {
  // x0 = 0.5 * slow eigenvector = (0.5, 0)
  const std::vector<Complex> x0{Complex(0.5, 0.0), Complex(0.0, 0.0)};
  const std::string out = temp_path("manifold_traj.csv");
  cli::cmd_trajectories(kShear, x0, {ProjectionMethod::DOP}, std::nullopt, 200, out);
  const Csv csv = read_csv(out);
  for (const auto& row : csv.rows) {
    for (Eigen::Index i = 0; i < 2; ++i) {
      const auto suffix = std::to_string(i);
      CHECK(std::abs(row[csv.column("full_" + suffix + "_re")] -
                     row[csv.column("dop_" + suffix + "_re")]) <= 1e-9);
      CHECK(std::abs(row[csv.column("full_" + suffix + "_im")] -
                     row[csv.column("dop_" + suffix + "_im")]) <= 1e-9);
    }
  }
}

TEST_CASE("grad3 pressure trajectories reproduce the oscillation ordering") {
  const ComplexVector v = grad3_slow_orthogonal_complement({0.1, 1.0});
  std::vector<Complex> x0(3);
  for (int i = 0; i < 3; ++i) x0[static_cast<std::size_t>(i)] = v(i);
  const std::string out = temp_path("grad_traj.csv");
  cli::cmd_trajectories(kGrad, x0,
                        {ProjectionMethod::DOP, ProjectionMethod::Orthogonal},
                        std::nullopt, 2000, out);
  const Csv csv = read_csv(out);
  double dop_p = 0.0;
  double orth_p = 0.0;
  for (const auto& row : csv.rows) {
    const double fr = row[csv.column("full_0_re")];
    const double fi = row[csv.column("full_0_im")];
    const double dr = row[csv.column("dop_0_re")];
    const double di = row[csv.column("dop_0_im")];
    const double onr = row[csv.column("orth_0_re")];
    const double oni = row[csv.column("orth_0_im")];
    dop_p += (fr - dr) * (fr - dr) + (fi - di) * (fi - di);
    orth_p += (fr - onr) * (fr - onr) + (fi - oni) * (fi - oni);
  }
  CHECK(dop_p < orth_p);
}

TEST_CASE("error surface minimum brackets the closed-form minimizer") {
  const std::vector<Complex> x0{Complex(0.4, 0.0), Complex(1.2, 0.0)};
  const std::string out = temp_path("surface.csv");
  cli::XiGrid grid;
  grid.re_start = 0.0;
  grid.re_end = 1.2;
  grid.re_count = 121;
  cli::cmd_error_surface(kShear, x0, grid, out);
  const Csv csv = read_csv(out);
  REQUIRE(csv.rows.size() == 121);

  double best_xi = -1.0;
  double best_value = 1e300;
  for (const auto& row : csv.rows) {
    if (row[csv.column("e_total")] < best_value) {
      best_value = row[csv.column("e_total")];
      best_xi = row[csv.column("xi_re")];
    }
  }
  CHECK(std::abs(best_xi - 0.6) <= 0.01 + 1e-12);

  // spot-check five grid points against the quadrature oracle
  const LinearSystem system = shear2d({5.0, 1.0});
  const SlowBasis basis = slow_basis(analyze(system), 1);
  std::mt19937_64 rng(9);
  for (int probe = 0; probe < 5; ++probe) {
    const auto& row = csv.rows[static_cast<std::size_t>(uniform01(rng) * 121.0)];
    const ComplexVector xi =
        ComplexVector::Constant(1, Complex(row[csv.column("xi_re")], 0.0));
    const double quad =
        quadrature_error(system, basis, vec2(0.4, 1.2), xi);
    const double surface = row[csv.column("e_total")];
    CHECK(std::abs(surface - quad) <= 1e-6 * std::max({surface, quad, 1e-9}));
  }
}

TEST_CASE("error surface of the zero start is minimal at zero") {
  const std::vector<Complex> x0{Complex(0.0, 0.0), Complex(0.0, 0.0)};
  const std::string out = temp_path("surface_zero.csv");
  cli::XiGrid grid;
  grid.re_start = -0.5;
  grid.re_end = 0.5;
  grid.re_count = 11;
  cli::cmd_error_surface(kShear, x0, grid, out);
  const Csv csv = read_csv(out);
  double best_value = 1e300;
  double best_xi = -1.0;
  for (const auto& row : csv.rows) {
    if (row[csv.column("e_total")] < best_value) {
      best_value = row[csv.column("e_total")];
      best_xi = row[csv.column("xi_re")];
    }
  }
  CHECK(best_xi == doctest::Approx(0.0));
  CHECK(best_value == doctest::Approx(0.0));
}

TEST_CASE("error surface over the grad3 conjugate pair") {
  const ComplexVector v = grad3_slow_orthogonal_complement({0.1, 1.0});
  std::vector<Complex> x0(3);
  for (int i = 0; i < 3; ++i) x0[static_cast<std::size_t>(i)] = v(i);
  const std::string out = temp_path("surface_grad.csv");
  cli::XiGrid grid;
  grid.re_start = -0.3;
  grid.re_end = 0.3;
  grid.re_count = 31;
  grid.im_start = -0.3;
  grid.im_end = 0.3;
  grid.im_count = 31;
  cli::cmd_error_surface(kGrad, x0, grid, out);
  const Csv csv = read_csv(out);
  REQUIRE(csv.rows.size() == 31 * 31);

  double best = 1e300;
  Complex best_z;
  for (const auto& row : csv.rows) {
    if (row[csv.column("e_total")] < best) {
      best = row[csv.column("e_total")];
      best_z = Complex(row[csv.column("xi_re")], row[csv.column("xi_im")]);
    }
  }
  const LinearSystem system = grad3({0.1, 1.0});
  const SlowBasis basis = slow_basis(analyze(system), 2);
  const ComplexVector xi_min =
      minimizer(gramian(basis), interaction_vector(system, basis, v));
  // the unrestricted minimizer is conjugate-symmetric here, so the grid
  // minimum must land within one cell of its first coordinate
  CHECK(std::abs(xi_min(1) - std::conj(xi_min(0))) <= 1e-9);
  CHECK(std::abs(best_z.real() - xi_min(0).real()) <= 0.02 + 1e-12);
  CHECK(std::abs(best_z.imag() - xi_min(0).imag()) <= 0.02 + 1e-12);
}

TEST_CASE("model files round-trip through resolve_model") {
  const std::string path = temp_path("model.json");
  {
    std::ofstream out(path);
    out << R"({"dimension": 2,
               "matrix": [[[-1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [-5.0, 0.0]]],
               "slow_count": 1})";
  }
  cli::ModelSpec spec;
  spec.source = path;
  const cli::ResolvedModel model = cli::resolve_model(spec);
  CHECK(model.slow_count == 1);
  CHECK((model.system.matrix - mat2(-1, 1, 0, -5)).norm() == 0.0);

  const std::string out = temp_path("file_spectrum.csv");
  cli::cmd_spectrum(spec, std::nullopt, out);
  const Csv csv = read_csv(out);
  CHECK(csv.rows.size() == 2);

  const std::string bad = temp_path("bad_model.json");
  {
    std::ofstream o(bad);
    o << R"({"dimension": 2, "matrix": [[[0,0]]], "slow_count": 1})";
  }
  cli::ModelSpec bad_spec;
  bad_spec.source = bad;
  CHECK_THROWS_AS(cli::resolve_model(bad_spec), BadModelError);
}

TEST_CASE("error surface rejects ungridable slow counts") {
  const std::string path = temp_path("model3.json");
  {
    std::ofstream out(path);
    out << R"({"dimension": 3,
               "matrix": [[[-1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                          [[0.0, 0.0], [-2.0, 0.0], [0.0, 0.0]],
                          [[0.0, 0.0], [0.0, 0.0], [-3.0, 0.0]]],
               "slow_count": 3})";
  }
  cli::ModelSpec spec;
  spec.source = path;
  const std::vector<Complex> x0{Complex(1, 0), Complex(0, 0), Complex(0, 0)};
  CHECK_THROWS_AS(cli::cmd_error_surface(spec, x0, {}, temp_path("s3.csv")),
                  UnsupportedDimensionError);

  // two slow modes that are not a conjugate pair are not gridable either
  const std::string path2 = temp_path("model2.json");
  {
    std::ofstream out(path2);
    out << R"({"dimension": 3,
               "matrix": [[[-1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                          [[0.0, 0.0], [-2.0, 0.0], [0.0, 0.0]],
                          [[0.0, 0.0], [0.0, 0.0], [-3.0, 0.0]]],
               "slow_count": 2})";
  }
  cli::ModelSpec spec2;
  spec2.source = path2;
  CHECK_THROWS_AS(cli::cmd_error_surface(spec2, x0, {}, temp_path("s2.csv")),
                  UnsupportedDimensionError);
}

TEST_CASE("x0 parsing") {
  const auto x0 = cli::parse_x0("0.4,0,1.2,0", 2);
  CHECK(x0[0] == Complex(0.4, 0.0));
  CHECK(x0[1] == Complex(1.2, 0.0));
  CHECK_THROWS_AS(cli::parse_x0("1,2,3", 2), BadParamsError);
  CHECK_THROWS_AS(cli::parse_x0("a,b,c,d", 2), BadParamsError);
}

TEST_CASE("validate is deterministic and rejects zero trials") {
  cli::ValidateOptions options;
  options.seed = 42;
  options.trials = 5;
  const auto first = cli::cmd_validate(options);
  const auto second = cli::cmd_validate(options);
  CHECK(first.ok);
  CHECK(first.to_json() == second.to_json());

  options.trials = 0;
  CHECK_THROWS_AS(cli::cmd_validate(options), BadParamsError);
}

TEST_CASE("validate surfaces an injected unstable matrix cleanly") {
  cli::ValidateOptions options;
  options.seed = 3;
  options.trials = 2;
  options.inject_unstable = true;
  const auto report = cli::cmd_validate(options);
  CHECK(report.ok);
  bool found = false;
  for (const auto& line : report.diagnostics) {
    if (line.find("unstable_injection: 1/1") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("csv output is byte-identical across runs") {
  const std::string out1 = temp_path("det1.csv");
  const std::string out2 = temp_path("det2.csv");
  cli::cmd_spectrum(kGrad, cli::parse_k_range("0.5:50:10"), out1);
  cli::cmd_spectrum(kGrad, cli::parse_k_range("0.5:50:10"), out2);
  CHECK(read_file(out1) == read_file(out2));
}
