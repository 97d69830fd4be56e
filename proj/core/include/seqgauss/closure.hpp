#pragma once

// One-dimensional radiative-transfer moment hierarchy
//
//   d_t I_k + b_{k,k-1} d_x I_{k-1} + b_{k,k+1} d_x I_{k+1} = -c_k I_k + q_k,  k = 0, 1, ...
//
//   b_{k,l} = (k+1)/(2k+1) delta_{k+1,l} + k/(2k+1) delta_{k-1,l}
//   c_0 = kappa, c_k = kappa + sigma (k > 0);  q_0 = 2 kappa q, q_k = 0 (k > 0)
//
// truncated at order N. The unresolved moment I_{N+1} is replaced by r . (I_0, ..., I_N):
// r = 0 for the P_N closure; r = A_FC A_CC^{-1} (first row of F) for optimal prediction
// with a user-supplied moment covariance A, where C = {0..N} and F = {N+1, ...}.
//
// Moments are numbered from 0 here. The block projection in linalg.hpp counts its cut
// from 1, so closure order N corresponds to block_projection(A, N + 1).

#include <functional>
#include <iosfwd>
#include <vector>

#include "seqgauss/linalg.hpp"

namespace seqgauss {

struct MomentSystemCoeffs {
  int order = 0;  // N
  Matrix b;       // (N+1) x (N+2) advection coefficients b_{k,l}

  // (c_0, ..., c_N).
  Vector absorption(double kappa, double sigma) const;
  // (q_0, ..., q_N); only moment 0 is sourced.
  Vector source(double kappa, double q) const;
};

MomentSystemCoeffs build_moment_system(int order);

struct UniformGrid {
  double a = 0.0;
  double b = 1.0;
  int cells = 2;

  double dx() const { return (b - a) / cells; }
  double center(int j) const { return a + (j + 0.5) * dx(); }
};

// q(x, t); evaluated at the start of each step.
using SourceFn = std::function<double(double x, double t)>;

struct MaterialParams {
  UniformGrid grid;
  Vector sigma;  // per cell
  Vector kappa;  // per cell
  SourceFn q;    // empty means q = 0

  // Throws PreconditionError on J < 2, a >= b, wrong lengths, or negative coefficients.
  void validate() const;

  static MaterialParams uniform(UniformGrid grid, double sigma, double kappa, double q = 0.0);
};

class ClosureSpec {
 public:
  enum class Kind { PN, OptimalPrediction };

  static ClosureSpec pn() { return ClosureSpec(Kind::PN, {}); }
  static ClosureSpec optimal_prediction(CovOp a) { return ClosureSpec(Kind::OptimalPrediction, std::move(a)); }

  Kind kind() const { return kind_; }
  const CovOp& covariance() const { return a_; }

 private:
  ClosureSpec(Kind k, CovOp a) : kind_(k), a_(std::move(a)) {}
  Kind kind_;
  CovOp a_;
};

// r with I_{N+1} ~ r . I_C. Throws PreconditionError if A has fewer than N+2 rows and
// NotPositiveDefinite if A_CC is singular.
Vector closure_row(const ClosureSpec& spec, int order);

// (N+1) x (N+1) advection matrix with the closure row folded into the last equation.
Matrix closed_advection(const MomentSystemCoeffs& coeffs, const Vector& row);

// max |lambda| over the (possibly complex) eigenvalues.
double spectral_radius(const Matrix& m);

struct MomentGrid {
  double t = 0.0;
  Matrix values;  // J x (N+1), entry (j, k) = I_k(x_j, t)

  int cells() const { return static_cast<int>(values.rows()); }
  int order() const { return static_cast<int>(values.cols()) - 1; }
};

struct ClosedSystem {
  MomentSystemCoeffs coeffs;
  Vector row;
  Matrix advection;
  double speed = 0.0;  // spectral radius of `advection`
};

ClosedSystem close_system(int order, const ClosureSpec& spec);

inline constexpr double kDefaultCfl = 0.9;

// Largest dt satisfying dt <= cfl * dx / rho(B_closed); +inf when rho = 0.
double max_stable_dt(const ClosedSystem& sys, const UniformGrid& grid, double cfl = kDefaultCfl);

// One Lax-Friedrichs step with periodic boundaries:
//   I_j <- (I_{j-1} + I_{j+1})/2 - dt/(2 dx) B (I_{j+1} - I_{j-1}) + dt (-c_j I_j + q_j).
// Throws SolverError on a CFL violation or if a non-finite value is produced.
MomentGrid step(const MomentGrid& state, const ClosedSystem& sys, const MaterialParams& params, double dt,
                double cfl = kDefaultCfl);
MomentGrid step(const MomentGrid& state, const MomentSystemCoeffs& coeffs, const MaterialParams& params,
                const ClosureSpec& spec, double dt, double cfl = kDefaultCfl);

struct SolveOptions {
  double final_time = 1.0;
  double dt = 1e-3;
  int output_stride = 1;
  double cfl = kDefaultCfl;
};

// Steps from initial.t = 0 up to final_time. Emits the initial state, every
// output_stride-th step, and always the final state. The last step is shortened to
// land exactly on final_time.
std::vector<MomentGrid> solve_closure(const MomentGrid& initial, const MaterialParams& params,
                                      const ClosureSpec& spec, const SolveOptions& opts);

// Columns t, x, I_0..I_N; one row per (snapshot, cell); 17 significant digits.
void write_closure_csv(std::ostream& os, const std::vector<MomentGrid>& snapshots, const UniformGrid& grid);

}  // namespace seqgauss
