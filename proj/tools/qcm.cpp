// qcm: coherence-measure computations, preferred-basis construction,
// hierarchy audits, and figure-data sweeps.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcm/basis.hpp"
#include "qcm/coherence.hpp"
#include "qcm/matrix_io.hpp"
#include "qcm/models.hpp"
#include "qcm/suites.hpp"

using json = nlohmann::json;
using namespace qcm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitViolation = 3;

// Precedence: --tol flag > QCM_SOLVER_TOL env var > built-in default.
SolveOptions resolve_solver_options(std::optional<double> flag_tol) {
  SolveOptions s;
  s.tol_gap = 1e-8;
  s.tol_feas = 1e-9;
  double tol = 0.0;
  bool have = false;
  if (const char* env = std::getenv("QCM_SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) {
      tol = v;
      have = true;
    } else {
      throw ValidationError("QCM_SOLVER_TOL must be a positive number, got '" +
                            std::string(env) + "'");
    }
  }
  if (flag_tol) {
    tol = *flag_tol;
    have = true;
  }
  if (have) {
    if (tol <= 0.0) throw ValidationError("--tol must be positive");
    s.tol_gap = tol;
    s.tol_feas = tol / 10.0;
  }
  return s;
}

std::vector<double> split_args(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::size_t used = 0;
    const double v = std::stod(piece, &used);
    if (used != piece.size())
      throw ValidationError("model selector: bad numeric argument '" + piece + "'");
    out.push_back(v);
  }
  return out;
}

int int_arg(double v, const std::string& what) {
  const int n = static_cast<int>(std::lround(v));
  if (std::abs(v - n) > 1e-12)
    throw ValidationError("model selector: " + what + " must be an integer");
  return n;
}

// An --observable/--state argument is either a matrix-document path or a
// named-model selector (spin_x:N, superradiance:N, w_mixture:p,
// product:theta,na,np, max_coherent:d).
ComplexMatrix matrix_from_arg(const std::string& arg) {
  const auto colon = arg.find(':');
  if (colon != std::string::npos) {
    const std::string name = arg.substr(0, colon);
    const std::vector<double> a = split_args(arg.substr(colon + 1));
    const auto want = [&](std::size_t n) {
      if (a.size() != n)
        throw ValidationError("model selector " + name + ": expected " +
                              std::to_string(n) + " argument(s), got " +
                              std::to_string(a.size()));
    };
    if (name == "spin_x") {
      want(1);
      return spin_x(int_arg(a[0], "N"));
    }
    if (name == "superradiance") {
      want(1);
      return superradiant_op(int_arg(a[0], "N"));
    }
    if (name == "w_mixture") {
      want(1);
      return w_mixture(a[0]).mat();
    }
    if (name == "product") {
      want(3);
      return product_theta_state(a[0], int_arg(a[1], "n_active"),
                                 int_arg(a[2], "n_padding"))
          .mat();
    }
    if (name == "max_coherent") {
      want(1);
      return max_coherent_state(int_arg(a[0], "d")).mat();
    }
    throw ValidationError("unknown model selector '" + name + "'");
  }
  return load_matrix(arg);
}

json status_json(SolveStatus s) { return to_string(s); }

json measure_json(const MioMeasureResult& r) {
  json out;
  out["measure"] = r.value;
  out["raw_optimum"] = r.raw_optimum;
  out["gap"] = r.gap;
  out["lower_bound"] = r.lower_bound;
  out["upper_bound"] = r.upper_bound;
  out["formulation"] = to_string(r.formulation);
  out["status"] = status_json(r.status);
  out["iterations"] = r.iterations;
  if (r.channel.choi.size() > 0) {
    out["channel_audit"] = {{"is_cptp", r.channel.is_cptp},
                            {"is_mio", r.channel.is_mio},
                            {"input_dim", r.channel.input_dim}};
  } else {
    out["channel_audit"] = nullptr;  // trivial observable, no SDP solved
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open output file '" + path + "'");
  f << text << '\n';
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct SweepPoint {
  double c_l1 = 0.0;
  double c_r = 0.0;
  double c_mio = 0.0;
  int iterations_mio = 0;
  int iterations_cr = 0;
  double wall_ms = 0.0;
  bool solver_ok = true;
};

// Grid points run on a bounded worker pool; results land in index order no
// matter which worker finishes first.
std::vector<SweepPoint> run_sweep(const ComplexMatrix& m,
                                  const std::vector<double>& grid,
                                  const std::function<DensityMatrix(double)>& state_at,
                                  const MeasureOptions& opts, int workers) {
  std::vector<SweepPoint> points(grid.size());
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const DensityMatrix rho = state_at(grid[i]);
      SweepPoint& pt = points[i];
      pt.c_l1 = l1_norm(rho.mat());
      const RobustnessResult rob = robustness(rho, opts.solve);
      pt.c_r = rob.value;
      pt.iterations_cr = rob.iterations;
      const MioMeasureResult mio = c_mio(m, rho, opts);
      pt.c_mio = mio.value;
      pt.iterations_mio = mio.iterations;
      pt.solver_ok = rob.status == SolveStatus::optimal &&
                     mio.status == SolveStatus::optimal;
      pt.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return points;
}

int emit_sweep(const std::string& out_path, const std::string& param_name,
               const std::vector<double>& grid,
               const std::vector<SweepPoint>& points, json metadata) {
  std::ostringstream csv;
  csv << param_name << ",c_l1,c_r,c_mio\n";
  bool all_ok = true;
  json per_point = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SweepPoint& pt = points[i];
    csv << fmt12(grid[i]) << ',' << fmt12(pt.c_l1) << ',' << fmt12(pt.c_r)
        << ',' << fmt12(pt.c_mio) << '\n';
    per_point.push_back({{"grid_index", i},
                         {"iterations_mio", pt.iterations_mio},
                         {"iterations_cr", pt.iterations_cr},
                         {"wall_ms", pt.wall_ms},
                         {"solver_ok", pt.solver_ok}});
    all_ok = all_ok && pt.solver_ok;
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw ValidationError("cannot open output file '" + out_path + "'");
    f << csv.str();
    metadata["points"] = per_point;
    std::ofstream mf(out_path + ".meta.json");
    if (!mf)
      throw ValidationError("cannot open sidecar '" + out_path + ".meta.json'");
    mf << metadata.dump(2) << '\n';
  }
  return all_ok ? kExitOk : kExitSolver;
}

json hierarchy_json(const HierarchyReport& rep) {
  json violations = json::array();
  for (const auto& [pair, excess] : rep.violations)
    violations.push_back({{"pair", pair}, {"excess", excess}});
  return {{"c_io_lower", rep.c_io_lower},
          {"c_mio", rep.c_mio},
          {"nm_cr", rep.nm_cr},
          {"nm_cl1", rep.nm_cl1},
          {"tight", std::abs(rep.c_mio - rep.nm_cr) <= 1e-6},
          {"violations", violations}};
}

json suite_json(const SuiteResult& r) {
  return {{"suite", r.name},     {"seed", r.seed},
          {"instances", r.instances}, {"passed", r.passed},
          {"worst", r.worst},    {"failures", r.failures}};
}

json tolerance_json(const SolveOptions& s) {
  return {{"tol_gap", s.tol_gap}, {"tol_feas", s.tol_feas}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"observable-induced quantum-coherence measures"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand(
      "measure", "maximize Tr(M Phi(rho)) over incoherence-preserving channels");
  std::string obs_arg, state_arg, formulation_arg = "reduced", out_arg;
  std::optional<double> tol_flag;
  measure->add_option("--observable", obs_arg,
                      "matrix document or model selector")->required();
  measure->add_option("--state", state_arg,
                      "matrix document or model selector")->required();
  measure->add_option("--formulation", formulation_arg, "reduced|faithful")
      ->check(CLI::IsMember({"reduced", "faithful"}));
  measure->add_option("--tol", tol_flag, "solver gap tolerance");
  measure->add_option("--out", out_arg, "result JSON path (stdout if omitted)");

  // basis
  auto* basis = app.add_subcommand(
      "basis", "construct a preferred basis with vanishing diagonal");
  std::string b_obs, b_method = "schur_horn", b_out;
  basis->add_option("--observable", b_obs, "matrix document or model selector")
      ->required();
  basis->add_option("--method", b_method, "schur_horn|fourier_mub")
      ->check(CLI::IsMember({"schur_horn", "fourier_mub"}));
  basis->add_option("--out", b_out, "result JSON path (stdout if omitted)");

  // hierarchy
  auto* hierarchy = app.add_subcommand(
      "hierarchy", "audit the measure ordering chain on given or random inputs");
  std::string h_obs, h_state;
  std::vector<std::string> h_random;
  std::optional<double> h_tol;
  hierarchy->add_option("--observable", h_obs, "matrix document or model selector");
  hierarchy->add_option("--state", h_state, "matrix document or model selector");
  hierarchy->add_option("--random", h_random, "D N SEED: N random instances at dim D")
      ->expected(3);
  hierarchy->add_option("--tol", h_tol, "solver gap tolerance");

  // figure1
  auto* figure1 = app.add_subcommand(
      "figure1", "spin_x(3) measures on the W-state mixture family");
  int f1_steps = 21, f1_workers = 0;
  std::string f1_out, f1_formulation = "reduced";
  std::optional<double> f1_tol;
  figure1->add_option("--steps", f1_steps, "grid points on p in [0,1]")
      ->check(CLI::Range(2, 100000));
  figure1->add_option("--out", f1_out, "CSV path (stdout if omitted)");
  figure1->add_option("--formulation", f1_formulation, "reduced|faithful")
      ->check(CLI::IsMember({"reduced", "faithful"}));
  figure1->add_option("--workers", f1_workers, "sweep worker pool width");
  figure1->add_option("--tol", f1_tol, "solver gap tolerance");

  // figure2
  auto* figure2 = app.add_subcommand(
      "figure2", "superradiant measures on product states of tilted qubits");
  int f2_steps = 25, f2_active = 3, f2_padding = 0, f2_workers = 0;
  std::string f2_out, f2_formulation = "reduced";
  std::optional<double> f2_tol;
  figure2->add_option("--steps", f2_steps, "grid points on theta in [0, pi/2]")
      ->check(CLI::Range(2, 100000));
  figure2->add_option("--n-active", f2_active, "tilted qubits");
  figure2->add_option("--n-padding", f2_padding, "trailing ground-state qubits");
  figure2->add_option("--out", f2_out, "CSV path (stdout if omitted)");
  figure2->add_option("--formulation", f2_formulation, "reduced|faithful")
      ->check(CLI::IsMember({"reduced", "faithful"}));
  figure2->add_option("--workers", f2_workers, "sweep worker pool width");
  figure2->add_option("--tol", f2_tol, "solver gap tolerance");

  // check
  auto* check = app.add_subcommand("check", "randomized property suites");
  std::string c_suite;
  std::uint64_t c_seed = 2024;
  check->add_option("--suite", c_suite, "invariants|monotonicity|duality|hierarchy")
      ->required()
      ->check(CLI::IsMember({"invariants", "monotonicity", "duality", "hierarchy"}));
  check->add_option("--seed", c_seed, "suite seed (recorded for replay)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*measure) {
      const ComplexMatrix m = matrix_from_arg(obs_arg);
      const DensityMatrix rho{matrix_from_arg(state_arg)};
      MeasureOptions opts;
      opts.formulation = formulation_arg == "faithful" ? Formulation::faithful
                                                       : Formulation::reduced;
      opts.solve = resolve_solver_options(tol_flag);
      const MioMeasureResult res = c_mio(m, rho, opts);
      write_text(out_arg, measure_json(res).dump(2));
      const bool converged = res.status == SolveStatus::optimal ||
                             res.channel.choi.size() == 0;  // trivial M
      return converged ? kExitOk : kExitSolver;
    }

    if (*basis) {
      const ComplexMatrix m = matrix_from_arg(b_obs);
      const DisplacedObservable disp = displace_observable(m);
      const Eigen::Index d = m.rows();
      json out;
      out["method"] = b_method;
      out["displacement"] = disp.displacement;
      out["normalization_nm"] = disp.normalization_nm;
      // columns of the emitted unitary are the preferred basis vectors beta_i
      // with <beta_i| M' |beta_i> = 0
      ComplexMatrix basis_cols;
      if (!is_nontrivial(m)) {
        out["warning"] =
            "observable is a multiple of the identity; every basis has a "
            "vanishing displaced diagonal, emitting the identity";
        basis_cols = ComplexMatrix::Identity(d, d);
        out["rotations"] = 0;
      } else if (b_method == "schur_horn") {
        const SchurHornResult sh = zero_diagonal_basis(disp);
        basis_cols = sh.basis.unitary.adjoint();
        out["rotations"] = sh.rotations;
      } else {
        basis_cols = fourier_mub_basis(hermitian_eig(m)).unitary;
      }
      const ComplexMatrix check_mat =
          basis_cols.adjoint() * disp.m_prime * basis_cols;
      double residual = 0.0;
      for (Eigen::Index j = 0; j < d; ++j)
        residual = std::max(residual, std::abs(check_mat(j, j)));
      out["diagonal_residual"] = residual;
      out["unitary"] = matrix_to_json(basis_cols);
      write_text(b_out, out.dump(2));
      return kExitOk;
    }

    if (*hierarchy) {
      MeasureOptions opts;
      opts.solve = resolve_solver_options(h_tol);
      std::vector<std::pair<ComplexMatrix, DensityMatrix>> instances;
      if (!h_random.empty()) {
        const int d = std::stoi(h_random[0]);
        const int n = std::stoi(h_random[1]);
        const std::uint64_t seed = std::stoull(h_random[2]);
        if (d < 2 || n < 1)
          throw ValidationError("hierarchy --random: need D >= 2 and N >= 1");
        for (int i = 0; i < n; ++i)
          instances.emplace_back(random_observable(d, seed + 2 * i),
                                 random_state(d, seed + 2 * i + 1));
      } else if (!h_obs.empty() && !h_state.empty()) {
        instances.emplace_back(matrix_from_arg(h_obs),
                               DensityMatrix{matrix_from_arg(h_state)});
      } else {
        throw ValidationError(
            "hierarchy: give --observable and --state, or --random D N SEED");
      }
      bool violated = false;
      json reports = json::array();
      for (const auto& [m, rho] : instances) {
        const HierarchyReport rep = hierarchy_report(m, rho, opts);
        violated = violated || !rep.ok();
        reports.push_back(hierarchy_json(rep));
      }
      std::cout << reports.dump(2) << '\n';
      return violated ? kExitViolation : kExitOk;
    }

    if (*figure1) {
      MeasureOptions opts;
      opts.formulation = f1_formulation == "faithful" ? Formulation::faithful
                                                      : Formulation::reduced;
      opts.solve = resolve_solver_options(f1_tol);
      const ComplexMatrix m = spin_x(3);
      std::vector<double> grid(f1_steps);
      for (int i = 0; i < f1_steps; ++i)
        grid[i] = static_cast<double>(i) / (f1_steps - 1);
      const auto points = run_sweep(
          m, grid, [](double p) { return w_mixture(p); }, opts, f1_workers);
      json meta = {{"command", "figure1"},
                   {"observable", "spin_x:3"},
                   {"spin_convention", "sigma_x/2 per site (N_M = N/2)"},
                   {"state_family", "w_mixture(p)"},
                   {"parameter", "p"},
                   {"grid", grid},
                   {"formulation", f1_formulation},
                   {"tolerances", tolerance_json(opts.solve)},
                   {"seeds", json::array()}};
      return emit_sweep(f1_out, "p", grid, points, std::move(meta));
    }

    if (*figure2) {
      const int sites = f2_active + f2_padding;
      if (f2_active < 1 || f2_padding < 0)
        throw ValidationError("figure2: need n_active >= 1, n_padding >= 0");
      if (f2_formulation == "faithful" && sites > 4)
        throw ValidationError(
            "figure2: " + std::to_string(sites) +
            " qubits exceed the faithful-formulation memory budget (4 max); "
            "use --formulation reduced or fewer sites");
      if (sites > 5)
        throw ValidationError(
            "figure2: " + std::to_string(sites) +
            " qubits exceed the dense-solver memory budget (5 max)");
      MeasureOptions opts;
      opts.formulation = f2_formulation == "faithful" ? Formulation::faithful
                                                      : Formulation::reduced;
      opts.solve = resolve_solver_options(f2_tol);
      const ComplexMatrix m = superradiant_op(sites);
      std::vector<double> grid(f2_steps);
      for (int i = 0; i < f2_steps; ++i)
        grid[i] = (std::numbers::pi / 2.0) * i / (f2_steps - 1);
      const int n_active = f2_active, n_padding = f2_padding;
      const auto points = run_sweep(
          m, grid,
          [n_active, n_padding](double theta) {
            return product_theta_state(theta, n_active, n_padding);
          },
          opts, f2_workers);
      json meta = {{"command", "figure2"},
                   {"observable", "superradiance:" + std::to_string(sites)},
                   {"state_family", "product(theta," + std::to_string(n_active) +
                                        "," + std::to_string(n_padding) + ")"},
                   {"parameter", "theta"},
                   {"grid", grid},
                   {"formulation", f2_formulation},
                   {"tolerances", tolerance_json(opts.solve)},
                   {"seeds", json::array()}};
      return emit_sweep(f2_out, "theta", grid, points, std::move(meta));
    }

    if (*check) {
      SuiteResult result;
      if (c_suite == "duality") result = run_duality_suite(c_seed);
      else if (c_suite == "monotonicity") result = run_monotonicity_suite(c_seed);
      else if (c_suite == "invariants") result = run_invariants_suite(c_seed);
      else result = run_hierarchy_suite(c_seed);
      std::cout << suite_json(result).dump(2) << '\n';
      return result.passed ? kExitOk : kExitViolation;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
