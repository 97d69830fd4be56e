#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "seqgauss/errors.hpp"

namespace cli = seqgauss::cli;

int main(int argc, char** argv) {
  CLI::App app{"Gaussian analysis on truncated sequence spaces"};
  app.require_subcommand(1);

  cli::VerifyArgs verify;
  verify.seed = cli::default_seed();
  auto* v = app.add_subcommand("verify", "Run invariant suites; exit 0 iff every check passes");
  v->add_option("--suite", verify.suite, "core|hermite|wick|measure|chaos|closure|all")
      ->check(CLI::IsMember({"core", "hermite", "wick", "measure", "chaos", "closure", "all"}));
  v->add_option("--seed", verify.seed, "Seed for random instances and sampling");
  v->add_option("--samples", verify.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  v->add_option("--threads", verify.threads, "Sampling threads (0 = hardware concurrency)");
  v->add_option("--tol", verify.tolerances, "Override a tolerance, key=value (repeatable)");

  cli::SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Draw a sample batch and write it as CSV");
  s->add_option("--config", sample.config, "JSON with A, m and optionally samples, seed")->required();
  s->add_option("--out", sample.out, "Output CSV (default stdout)");
  s->add_option("--seed", sample.seed, "Seed (overrides config and SEQGAUSS_SEED)");
  s->add_option("--samples", sample.samples, "Sample count (overrides config)")->check(CLI::PositiveNumber);
  s->add_option("--threads", sample.threads, "Sampling threads (0 = hardware concurrency)");

  cli::CondexpArgs condexp;
  auto* c = app.add_subcommand("condexp", "Kernel of E[<f,.> | x_1..x_n]");
  c->add_option("--config", condexp.config, "JSON with A, f and conditioning")->required();
  c->add_option("--out", condexp.out, "Also write the JSON result to this file");

  cli::ClosureArgs closure;
  auto* cl = app.add_subcommand("closure", "Solve the closed moment system and write CSV");
  cl->add_option("--config", closure.config, "JSON problem description")->required();
  cl->add_option("--out", closure.out, "Output CSV")->required();

  cli::HermiteArgs hermite;
  auto* h = app.add_subcommand("hermite", "Tabulate Hermite polynomials as CSV");
  h->add_option("--max-n", hermite.max_n, "Highest degree")->check(CLI::Range(0, 60));
  h->add_option("--convention", hermite.convention, "prob or phys")->check(CLI::IsMember({"prob", "phys"}));
  h->add_option("--x-min", hermite.x_min, "Left end of the x grid");
  h->add_option("--x-max", hermite.x_max, "Right end of the x grid");
  h->add_option("--points", hermite.points, "Grid points")->check(CLI::Range(1, 100000));
  h->add_option("--out", hermite.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  try {
    if (*v) return cli::run_verify(verify);
    if (*s) return cli::run_sample(sample);
    if (*c) return cli::run_condexp(condexp);
    if (*cl) return cli::run_closure(closure);
    if (*h) return cli::run_hermite(hermite);
  } catch (const seqgauss::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const seqgauss::SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kFailure;
  } catch (const std::invalid_argument& e) {
    // DimensionError, PreconditionError: the inputs are inconsistent.
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kFailure;
  }
  return cli::kUsage;
}
