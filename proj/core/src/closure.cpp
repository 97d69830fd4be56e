#include "seqgauss/closure.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

namespace seqgauss {

Vector MomentSystemCoeffs::absorption(double kappa, double sigma) const {
  Vector c = Vector::Constant(order + 1, kappa + sigma);
  c(0) = kappa;
  return c;
}

Vector MomentSystemCoeffs::source(double kappa, double q) const {
  Vector s = Vector::Zero(order + 1);
  s(0) = 2.0 * kappa * q;
  return s;
}

MomentSystemCoeffs build_moment_system(int order) {
  if (order < 0) throw PreconditionError("build_moment_system: order must be >= 0");
  MomentSystemCoeffs c;
  c.order = order;
  c.b = Matrix::Zero(order + 1, order + 2);
  for (int k = 0; k <= order; ++k) {
    c.b(k, k + 1) = static_cast<double>(k + 1) / (2 * k + 1);
    if (k > 0) c.b(k, k - 1) = static_cast<double>(k) / (2 * k + 1);
  }
  return c;
}

void MaterialParams::validate() const {
  if (grid.cells < 2) throw PreconditionError("MaterialParams: need at least 2 cells");
  if (!(grid.b > grid.a)) throw PreconditionError("MaterialParams: require a < b");
  if (sigma.size() != grid.cells || kappa.size() != grid.cells) {
    throw PreconditionError("MaterialParams: sigma/kappa must have one entry per cell");
  }
  if ((sigma.array() < 0.0).any() || (kappa.array() < 0.0).any() || !sigma.allFinite() || !kappa.allFinite()) {
    throw PreconditionError("MaterialParams: sigma and kappa must be finite and non-negative");
  }
}

MaterialParams MaterialParams::uniform(UniformGrid grid, double sigma, double kappa, double q) {
  MaterialParams p;
  p.grid = grid;
  p.sigma = Vector::Constant(grid.cells, sigma);
  p.kappa = Vector::Constant(grid.cells, kappa);
  if (q != 0.0) p.q = [q](double, double) { return q; };
  return p;
}

Vector closure_row(const ClosureSpec& spec, int order) {
  if (order < 0) throw PreconditionError("closure_row: order must be >= 0");
  if (spec.kind() == ClosureSpec::Kind::PN) return Vector::Zero(order + 1);

  const Matrix& a = spec.covariance().matrix();
  const int nc = order + 1;
  if (a.rows() < nc + 1) {
    throw PreconditionError("closure_row: covariance needs at least N+2 = " + std::to_string(nc + 1) + " rows");
  }
  Eigen::LLT<Matrix> cc(a.topLeftCorner(nc, nc));
  if (cc.info() != Eigen::Success) throw NotPositiveDefinite("closure_row: singular A_CC block");
  // r^T = A_FC A_CC^{-1} restricted to F = {N+1}; A is symmetric, so solve with A_CF.
  return cc.solve(a.col(nc).head(nc));
}

Matrix closed_advection(const MomentSystemCoeffs& coeffs, const Vector& row) {
  const int n = coeffs.order;
  if (row.size() != n + 1) throw DimensionError("closed_advection: closure row length must be N+1");
  Matrix b = coeffs.b.leftCols(n + 1);
  b.row(n) += coeffs.b(n, n + 1) * row.transpose();
  return b;
}

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ClosedSystem close_system(int order, const ClosureSpec& spec) {
  ClosedSystem sys;
  sys.coeffs = build_moment_system(order);
  sys.row = closure_row(spec, order);
  sys.advection = closed_advection(sys.coeffs, sys.row);
  sys.speed = spectral_radius(sys.advection);
  return sys;
}

double max_stable_dt(const ClosedSystem& sys, const UniformGrid& grid, double cfl) {
  if (sys.speed == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * grid.dx() / sys.speed;
}

MomentGrid step(const MomentGrid& state, const ClosedSystem& sys, const MaterialParams& params, double dt,
                double cfl) {
  const int cells = params.grid.cells;
  const int nm = sys.coeffs.order + 1;
  if (state.values.rows() != cells || state.values.cols() != nm) {
    throw DimensionError("step: state shape does not match grid and closure order");
  }
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
  const double limit = max_stable_dt(sys, params.grid, cfl);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step: CFL violation, dt=" << dt << " exceeds cfl*dx/rho=" << limit << " (rho=" << sys.speed << ")";
    throw SolverError(msg.str());
  }

  const double lambda = dt / (2.0 * params.grid.dx());
  const Matrix bt = sys.advection.transpose();
  const Matrix& u = state.values;

  MomentGrid next;
  next.t = state.t + dt;
  next.values.resize(cells, nm);
  for (int j = 0; j < cells; ++j) {
    const int jl = (j + cells - 1) % cells;
    const int jr = (j + 1) % cells;
    auto row = next.values.row(j);
    row = 0.5 * (u.row(jl) + u.row(jr)) - lambda * (u.row(jr) - u.row(jl)) * bt;
    const Vector c = sys.coeffs.absorption(params.kappa(j), params.sigma(j));
    row -= dt * c.cwiseProduct(u.row(j).transpose()).transpose();
    if (params.q) row(0) += dt * 2.0 * params.kappa(j) * params.q(params.grid.center(j), state.t);
  }

  if (!next.values.allFinite()) {
    for (int j = 0; j < cells; ++j)
      for (int k = 0; k < nm; ++k)
        if (!std::isfinite(next.values(j, k))) {
          std::ostringstream msg;
          msg << "step: non-finite value at t=" << next.t << ", cell " << j << ", moment " << k;
          throw SolverError(msg.str());
        }
  }
  return next;
}

MomentGrid step(const MomentGrid& state, const MomentSystemCoeffs& coeffs, const MaterialParams& params,
                const ClosureSpec& spec, double dt, double cfl) {
  ClosedSystem sys;
  sys.coeffs = coeffs;
  sys.row = closure_row(spec, coeffs.order);
  sys.advection = closed_advection(coeffs, sys.row);
  sys.speed = spectral_radius(sys.advection);
  return step(state, sys, params, dt, cfl);
}

std::vector<MomentGrid> solve_closure(const MomentGrid& initial, const MaterialParams& params,
                                      const ClosureSpec& spec, const SolveOptions& opts) {
  params.validate();
  if (!(opts.final_time > 0.0)) throw PreconditionError("solve_closure: final time must be positive");
  if (!(opts.dt > 0.0)) throw PreconditionError("solve_closure: dt must be positive");
  if (opts.output_stride < 1) throw PreconditionError("solve_closure: output_stride must be >= 1");
  if (initial.values.rows() != params.grid.cells) throw DimensionError("solve_closure: initial state has wrong cell count");
  if (initial.values.cols() < 1) throw DimensionError("solve_closure: initial state has no moments");

  const ClosedSystem sys = close_system(initial.order(), spec);
  const auto steps = static_cast<long long>(std::ceil(opts.final_time / opts.dt - 1e-9));

  std::vector<MomentGrid> out;
  MomentGrid cur = initial;
  cur.t = 0.0;
  out.push_back(cur);
  for (long long k = 0; k < steps; ++k) {
    const double t_next = (k + 1 == steps) ? opts.final_time : static_cast<double>(k + 1) * opts.dt;
    cur = step(cur, sys, params, t_next - cur.t, opts.cfl);
    cur.t = t_next;
    if ((k + 1) % opts.output_stride == 0 || k + 1 == steps) out.push_back(cur);
  }
  return out;
}

void write_closure_csv(std::ostream& os, const std::vector<MomentGrid>& snapshots, const UniformGrid& grid) {
  if (snapshots.empty()) return;
  const int nm = static_cast<int>(snapshots.front().values.cols());
  os << "t,x";
  for (int k = 0; k < nm; ++k) os << ",I_" << k;
  os << '\n' << std::setprecision(17);
  for (const auto& s : snapshots) {
    for (int j = 0; j < s.cells(); ++j) {
      os << s.t << ',' << grid.center(j);
      for (int k = 0; k < nm; ++k) os << ',' << s.values(j, k);
      os << '\n';
    }
  }
}

}  // namespace seqgauss
