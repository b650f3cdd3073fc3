#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blendfit/blend.hpp"
#include "blendfit/manifold.hpp"
#include "blendfit/model_io.hpp"
#include "blendfit/testdata.hpp"

namespace {

using namespace blendfit;

double parse_lambda(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("--lambda must be a positive number or 'inf'");
  }
  if (used != text.size() || !(v > 0.0) || std::isinf(v)) {
    throw std::invalid_argument("--lambda must be a positive number or 'inf'");
  }
  return v;
}

std::string format_lambda(double lambda) {
  if (std::isinf(lambda)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", lambda);
  return buf;
}

// --dim is mandatory for euclidean and otherwise optional: sphere2 and so3
// fix their own ambient dimension, and a supplied value must agree with it.
ManifoldDescriptor make_descriptor(const std::string& name, int dim) {
  ManifoldDescriptor d;
  d.kind = manifold_kind_from_string(name);
  switch (d.kind) {
    case ManifoldKind::euclidean:
      if (dim < 1) throw std::invalid_argument("--dim is required (>= 1) for euclidean");
      d.ambient_dim = dim;
      break;
    case ManifoldKind::sphere2:
      if (dim != 0 && dim != 3) throw std::invalid_argument("sphere2 data has 3 coordinates");
      d.ambient_dim = 3;
      break;
    case ManifoldKind::so3:
      if (dim != 0 && dim != 9) throw std::invalid_argument("so3 data has 9 coordinates");
      d.ambient_dim = 9;
      break;
  }
  return d;
}

struct FitArgs {
  std::string manifold = "euclidean";
  int dim = 0;
  std::string lambda = "1";
  int intervals = 1;
  std::string input;
  std::string output;
};

int run_fit(const FitArgs& args) {
  const ManifoldDescriptor desc = make_descriptor(args.manifold, args.dim);
  const std::unique_ptr<Manifold> M = make_manifold(desc);
  const DataSet data = read_data_csv(args.input, *M);

  FitProblem problem;
  problem.manifold = desc;
  problem.times = data.times;
  problem.data = data.points;
  problem.intervals = args.intervals;
  problem.lambda = parse_lambda(args.lambda);

  const auto start = std::chrono::steady_clock::now();
  const BlendedSpline s = fit(*M, problem);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  save_model(args.output, s);
  std::printf("fitted %zu points on %s, intervals: %d, lambda: %s\n", data.points.size(),
              to_string(desc.kind).c_str(), s.intervals, format_lambda(s.lambda).c_str());
  std::printf("fit time: %.4f s\n", elapsed.count());
  std::printf("data misfit: %.9e\n", data_misfit(*M, s, data.times, data.points));
  std::printf("model written to %s\n", args.output.c_str());
  return 0;
}

struct SampleArgs {
  std::string model;
  std::string output;
  int num = 200;
};

int run_sample(const SampleArgs& args) {
  const BlendedSpline s = load_model(args.model);
  const std::unique_ptr<Manifold> M = make_manifold(s.manifold);
  const std::vector<double> ts = uniform_samples(0.0, s.intervals, args.num);
  write_curve_csv(args.output, ts, eval_many(*M, s, ts));
  std::printf("%d samples written to %s\n", args.num, args.output.c_str());
  return 0;
}

struct SpeedArgs {
  std::string model;
  std::string output;
  int num = 200;
  double h = 1e-5;
};

int run_speed(const SpeedArgs& args) {
  const BlendedSpline s = load_model(args.model);
  const std::unique_ptr<Manifold> M = make_manifold(s.manifold);
  const std::vector<double> ts = uniform_samples(0.0, s.intervals, args.num);
  write_speed_csv(args.output, ts, speed_many(*M, s, ts, args.h));
  std::printf("%d speed samples written to %s\n", args.num, args.output.c_str());
  return 0;
}

struct CheckArgs {
  std::string model;
  std::string data;
};

// Diagnostic pass over a saved model. Returns 3 when any check fails so that
// scripts can tell a bad model from a bad invocation.
int run_check(const CheckArgs& args) {
  const BlendedSpline s = load_model(args.model);
  const std::unique_ptr<Manifold> M = make_manifold(s.manifold);
  bool ok = true;

  const std::vector<double> ts = uniform_samples(0.0, s.intervals, 1000);
  double worst_defect = 0.0;
  for (double t : ts) {
    worst_defect = std::max(worst_defect, M->point_defect(eval(*M, s, t)));
  }
  const bool on_manifold = worst_defect <= M->point_tolerance();
  std::printf("[%s] samples on manifold (worst defect %.3e, tolerance %.3e)\n",
              on_manifold ? "ok" : "FAIL", worst_defect, M->point_tolerance());
  ok = ok && on_manifold;

  double worst_pos = 0.0;
  double worst_vel = 0.0;
  for (const JunctionGaps& g : junction_report(*M, s)) {
    worst_pos = std::max(worst_pos, g.position_gap);
    const double scale = std::max(1.0, speed(*M, s, static_cast<double>(g.junction)));
    worst_vel = std::max(worst_vel, g.velocity_gap / scale);
  }
  const bool pos_ok = worst_pos <= 1e-12;
  const bool vel_ok = worst_vel <= 1e-3;
  std::printf("[%s] junction positions match (worst gap %.3e)\n", pos_ok ? "ok" : "FAIL",
              worst_pos);
  std::printf("[%s] junction velocities match (worst relative gap %.3e)\n", vel_ok ? "ok" : "FAIL",
              worst_vel);
  ok = ok && pos_ok && vel_ok;

  if (!args.data.empty()) {
    if (s.manifold.kind == ManifoldKind::euclidean) {
      // In flat space every tangent spline is the same curve, so the blend
      // must reproduce the single smoothing spline through the data.
      const DataSet data = read_data_csv(args.data, *M);
      std::vector<std::vector<double>> rows(data.points.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = data.points[i].coords;
      const SmoothingSpline direct = solve_smoothing_spline(data.times, rows, s.lambda);
      double worst = 0.0;
      for (double t : ts) {
        const Point p = eval(*M, s, t);
        const std::vector<double> q = eval_spline(direct, t);
        double err = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) err = std::max(err, std::abs(p.coords[k] - q[k]));
        worst = std::max(worst, err);
      }
      const bool direct_ok = worst <= 1e-9;
      std::printf("[%s] matches the direct smoothing spline (worst error %.3e)\n",
                  direct_ok ? "ok" : "FAIL", worst);
      ok = ok && direct_ok;
    } else {
      std::printf("[SKIP] direct-spline comparison (euclidean models only)\n");
    }
  }

  std::printf("check %s\n", ok ? "passed" : "FAILED");
  return ok ? 0 : 3;
}

struct GenArgs {
  std::uint64_t seed = 0;
  int num = 100;
  double sigma = 0.1;
  double tmax = 4.0;
  std::string output;
};

int run_gen(const GenArgs& args) {
  write_data_csv(args.output, make_noisy_sphere_data(args.seed, args.num, args.sigma, args.tmax));
  std::printf("%d sphere2 points written to %s\n", args.num, args.output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C1 blended smoothing splines on euclidean space, the unit sphere, and rotations"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* cmd_fit = app.add_subcommand("fit", "fit a model to a data CSV");
  cmd_fit->add_option("--manifold", fit_args.manifold, "euclidean, sphere2, or so3")
      ->check(CLI::IsMember({"euclidean", "sphere2", "so3"}))
      ->required();
  cmd_fit->add_option("--dim", fit_args.dim, "ambient dimension (required for euclidean)");
  cmd_fit->add_option("--lambda", fit_args.lambda, "misfit weight, positive or 'inf'");
  cmd_fit->add_option("--intervals", fit_args.intervals, "number of unit blending intervals")
      ->check(CLI::PositiveNumber);
  cmd_fit->add_option("--input", fit_args.input, "data CSV")->required();
  cmd_fit->add_option("--output", fit_args.output, "model JSON to write")->required();

  SampleArgs sample_args;
  CLI::App* cmd_sample = app.add_subcommand("sample", "sample a fitted model to a CSV");
  cmd_sample->add_option("--model", sample_args.model, "model JSON")->required();
  cmd_sample->add_option("--num", sample_args.num, "number of samples")
      ->check(CLI::Range(2, 100000000));
  cmd_sample->add_option("--output", sample_args.output, "curve CSV to write")->required();

  SpeedArgs speed_args;
  CLI::App* cmd_speed = app.add_subcommand("speed", "sample the speed of a fitted model");
  cmd_speed->add_option("--model", speed_args.model, "model JSON")->required();
  cmd_speed->add_option("--num", speed_args.num, "number of samples")
      ->check(CLI::Range(2, 100000000));
  cmd_speed->add_option("--step", speed_args.h, "finite-difference half-width")
      ->check(CLI::PositiveNumber);
  cmd_speed->add_option("--output", speed_args.output, "speed CSV to write")->required();

  CheckArgs check_args;
  CLI::App* cmd_check = app.add_subcommand("check", "verify invariants of a fitted model");
  cmd_check->add_option("--model", check_args.model, "model JSON")->required();
  cmd_check->add_option("--data", check_args.data, "fitting data CSV for the direct comparison");

  GenArgs gen_args;
  CLI::App* cmd_gen = app.add_subcommand("gen-testdata", "write a deterministic noisy sphere CSV");
  cmd_gen->add_option("--seed", gen_args.seed, "RNG seed")->required();
  cmd_gen->add_option("--num", gen_args.num, "number of points")->check(CLI::Range(2, 100000000));
  cmd_gen->add_option("--sigma", gen_args.sigma, "tangent noise scale")
      ->check(CLI::NonNegativeNumber);
  cmd_gen->add_option("--tmax", gen_args.tmax, "last sample time")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--output", gen_args.output, "data CSV to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_fit->parsed()) return run_fit(fit_args);
    if (cmd_sample->parsed()) return run_sample(sample_args);
    if (cmd_speed->parsed()) return run_speed(speed_args);
    if (cmd_check->parsed()) return run_check(check_args);
    if (cmd_gen->parsed()) return run_gen(gen_args);
  } catch (const WellPosednessError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
