#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "seqgauss/chaos.hpp"
#include "seqgauss/closure.hpp"
#include "seqgauss/hermite.hpp"
#include "seqgauss/measure.hpp"
#include "seqgauss/serialize.hpp"
#include "verify.hpp"

namespace seqgauss::cli {

namespace {

long long integer_member(const Json& obj, const std::string& key, long long min_value) {
  const Json& j = require_member(obj, key);
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  const long long v = j.get<long long>();
  if (v < min_value) throw ConfigError(key, "must be >= " + std::to_string(min_value));
  return v;
}

double number_member(const Json& obj, const std::string& key) {
  const Json& j = require_member(obj, key);
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "value is not finite");
  return v;
}

// A scalar broadcast to every cell, or one value per cell.
Vector per_cell(const Json& obj, const std::string& key, int cells, double fallback) {
  if (!obj.contains(key)) return Vector::Constant(cells, fallback);
  const Json& j = obj.at(key);
  if (j.is_number()) return Vector::Constant(cells, number_member(obj, key));
  Vector v = vector_from_json(j, key);
  if (v.size() != cells) throw ConfigError(key, "expected " + std::to_string(cells) + " entries (one per cell)");
  return v;
}

// Opens `path` for writing, or returns stdout for an empty path.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("--out", "cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("SEQGAUSS_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') {
    std::cerr << "warning: ignoring non-integer SEQGAUSS_SEED='" << env << "'\n";
    return 1;
  }
  return v;
}

int run_verify(const VerifyArgs& args) {
  verify::Context ctx;
  ctx.seed = args.seed;
  ctx.samples = args.samples;
  ctx.threads = args.threads;
  for (const auto& t : args.tolerances) ctx.tol.set_from_string(t);

  const auto start = std::chrono::steady_clock::now();
  const auto results = verify::run_suite(args.suite, ctx);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  [" << r.detail << "]\n";
    if (!r.passed) ++failed;
  }
  std::cout << "suite " << args.suite << ", seed " << args.seed << ": " << results.size() - failed << "/"
            << results.size() << " checks passed in " << std::fixed << std::setprecision(2) << secs << " s\n";
  if (failed > 0) {
    std::cout << "failed:\n";
    for (const auto& r : results)
      if (!r.passed) std::cout << "  " << r.name << '\n';
  }
  return failed == 0 ? kOk : kFailure;
}

int run_sample(const SampleArgs& args) {
  const Json cfg = load_json_file(args.config);
  const CovOp a = covop_from_json(require_member(cfg, "A"), "A");
  const int m = static_cast<int>(integer_member(cfg, "m", 1));
  long long count = cfg.contains("samples") ? integer_member(cfg, "samples", 1) : 1000;
  std::uint64_t seed = cfg.contains("seed") ? static_cast<std::uint64_t>(integer_member(cfg, "seed", 0)) : default_seed();
  if (args.samples) count = *args.samples;
  if (args.seed) seed = *args.seed;

  const SampleBatch batch = sample_mu_A(a, m, count, seed, args.threads);
  Output out(args.out);
  write_batch_csv(out.stream(), batch);
  return kOk;
}

int run_condexp(const CondexpArgs& args) {
  const Json cfg = load_json_file(args.config);
  const CovOp a = covop_from_json(require_member(cfg, "A"), "A");
  const SeqVec f = seqvec_from_json(require_member(cfg, "f"), "f");
  if (f.d() != a.dim()) throw ConfigError("f", "must have " + std::to_string(a.dim()) + " columns to match A");

  const Json& cond = require_member(cfg, "conditioning");
  if (!cond.is_array() || cond.empty()) throw ConfigError("conditioning", "expected a non-empty array of vectors");
  std::vector<Vector> xs;
  for (std::size_t i = 0; i < cond.size(); ++i) {
    const std::string field = "conditioning[" + std::to_string(i) + "]";
    xs.push_back(vector_from_json(cond[i], field));
    if (xs.back().size() != a.dim()) throw ConfigError(field, "must have length " + std::to_string(a.dim()));
  }

  const SeqVec pf = cond_exp_monomial(f, xs, a);
  const auto basis = gram_schmidt_A(xs, a);

  Json result;
  result["Pf"] = to_json(pf);
  result["basis"] = Json::array();
  result["terms"] = Json::array();
  for (const Vector& x : basis) {
    result["basis"].push_back(to_json(x));
    result["terms"].push_back({{"h", to_json(Vector(bracket(f, a.apply(x))))}, {"x", to_json(x)}});
  }

  std::cout << "Pf (" << pf.m() << " x " << pf.d() << "; column k is the k-th sequence entry):\n"
            << std::setprecision(12);
  for (int i = 0; i < pf.m(); ++i) {
    for (int k = 0; k < pf.d(); ++k) std::cout << (k ? " " : "  ") << std::setw(18) << pf.matrix()(i, k);
    std::cout << '\n';
  }
  std::cout << result.dump(2) << '\n';
  if (!args.out.empty()) {
    Output out(args.out);
    out.stream() << std::setprecision(17) << result.dump(2) << '\n';
  }
  return kOk;
}

int run_closure(const ClosureArgs& args) {
  const Json cfg = load_json_file(args.config);
  UniformGrid grid;
  grid.a = number_member(cfg, "a");
  grid.b = number_member(cfg, "b");
  grid.cells = static_cast<int>(integer_member(cfg, "J", 2));
  if (!(grid.b > grid.a)) throw ConfigError("b", "must exceed a");
  const int order = static_cast<int>(integer_member(cfg, "N", 0));

  MaterialParams params;
  params.grid = grid;
  params.sigma = per_cell(cfg, "sigma", grid.cells, 0.0);
  params.kappa = per_cell(cfg, "kappa", grid.cells, 0.0);
  const Vector q = per_cell(cfg, "q", grid.cells, 0.0);
  if (!q.isZero(0.0)) {
    params.q = [q, grid](double x, double) {
      const int j = std::clamp(static_cast<int>(std::floor((x - grid.a) / grid.dx())), 0, grid.cells - 1);
      return q(j);
    };
  }
  if ((params.sigma.array() < 0.0).any()) throw ConfigError("sigma", "must be non-negative");
  if ((params.kappa.array() < 0.0).any()) throw ConfigError("kappa", "must be non-negative");

  const Json& cl = require_member(cfg, "closure");
  const Json& kind = require_member(cl, "kind", "closure");
  if (!kind.is_string()) throw ConfigError("closure.kind", "expected a string");
  ClosureSpec spec = ClosureSpec::pn();
  if (kind == "optimal_prediction") {
    const CovOp a = covop_from_json(require_member(cl, "A", "closure"), "closure.A");
    if (a.dim() < order + 2) throw ConfigError("closure.A", "needs at least N+2 = " + std::to_string(order + 2) + " rows");
    spec = ClosureSpec::optimal_prediction(a);
  } else if (kind != "pn") {
    throw ConfigError("closure.kind", "expected \"pn\" or \"optimal_prediction\"");
  }

  MomentGrid init;
  init.values = Matrix::Zero(grid.cells, order + 1);
  const Json& ini = require_member(cfg, "initial");
  if (ini.contains("gaussian")) {
    const Json& g = ini.at("gaussian");
    const double center = g.value("center", 0.0), width = g.value("width", 0.1), amp = g.value("amplitude", 1.0);
    if (!(width > 0.0)) throw ConfigError("initial.gaussian.width", "must be positive");
    for (int j = 0; j < grid.cells; ++j) init.values(j, 0) = amp * std::exp(-std::pow((grid.center(j) - center) / width, 2) / 2.0);
  } else if (ini.contains("constant")) {
    const Vector c = vector_from_json(ini.at("constant"), "initial.constant");
    if (c.size() != order + 1) throw ConfigError("initial.constant", "expected N+1 entries");
    init.values.rowwise() = c.transpose();
  } else if (ini.contains("moments")) {
    init.values = matrix_from_json(ini.at("moments"), "initial.moments");
    if (init.values.rows() != grid.cells || init.values.cols() != order + 1) {
      throw ConfigError("initial.moments", "expected a J x (N+1) array");
    }
  } else {
    throw ConfigError("initial", "expected one of gaussian, constant, moments");
  }

  SolveOptions opts;
  opts.final_time = number_member(cfg, "T");
  if (!(opts.final_time > 0.0)) throw ConfigError("T", "must be positive");
  if (cfg.contains("cfl")) opts.cfl = number_member(cfg, "cfl");
  if (!(opts.cfl > 0.0)) throw ConfigError("cfl", "must be positive");
  if (cfg.contains("output_stride")) opts.output_stride = static_cast<int>(integer_member(cfg, "output_stride", 1));
  if (cfg.contains("dt")) {
    opts.dt = number_member(cfg, "dt");
    if (!(opts.dt > 0.0)) throw ConfigError("dt", "must be positive");
  } else {
    const double limit = max_stable_dt(close_system(order, spec), grid, opts.cfl);
    opts.dt = std::isfinite(limit) ? limit : opts.final_time;
  }

  const auto snapshots = solve_closure(init, params, spec, opts);
  Output out(args.out);
  write_closure_csv(out.stream(), snapshots, grid);
  return kOk;
}

int run_hermite(const HermiteArgs& args) {
  if (!(args.x_max >= args.x_min)) throw ConfigError("--x-max", "must be >= --x-min");
  Output out(args.out);
  std::ostream& os = out.stream();
  os << "n,x,value\n" << std::setprecision(17);
  for (int n = 0; n <= args.max_n; ++n)
    for (int i = 0; i < args.points; ++i) {
      const double x = args.points == 1 ? args.x_min : args.x_min + (args.x_max - args.x_min) * i / (args.points - 1);
      os << n << ',' << x << ',' << (args.convention == "phys" ? hermite_phys(n, x) : hermite_prob(n, x)) << '\n';
    }
  return kOk;
}

}  // namespace seqgauss::cli
