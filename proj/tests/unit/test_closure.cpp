#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "seqgauss/closure.hpp"
#include "test_util.hpp"

using namespace seqgauss;
using seqgauss::testing::max_abs_diff;

namespace {

MomentGrid bump(const UniformGrid& g, int order, double width = 0.1) {
  MomentGrid s;
  s.values = Matrix::Zero(g.cells, order + 1);
  for (int j = 0; j < g.cells; ++j) s.values(j, 0) = std::exp(-std::pow(g.center(j) / width, 2) / 2.0);
  return s;
}

MomentGrid random_state(oracle::Generator& gen, int cells, int order) {
  MomentGrid s;
  s.values = gen.matrix(cells, order + 1);
  return s;
}

}  // namespace

TEST_CASE("moment system coefficients") {
  const MomentSystemCoeffs c = build_moment_system(4);
  CHECK(c.b.rows() == 5);
  CHECK(c.b.cols() == 6);
  CHECK(c.b(0, 1) == 1.0);
  CHECK(c.b(1, 0) == 1.0 / 3.0);
  CHECK(c.b(1, 2) == 2.0 / 3.0);
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; l <= 5; ++l) {
      double want = 0.0;
      if (l == k + 1) want = (k + 1.0) / (2 * k + 1);
      if (l == k - 1) want = static_cast<double>(k) / (2 * k + 1);
      CHECK(c.b(k, l) == want);
    }
  const Vector ab = c.absorption(0.3, 2.0);
  CHECK(ab(0) == 0.3);
  for (int k = 1; k <= 4; ++k) CHECK(ab(k) == 2.3);
  const Vector q = c.source(0.5, 4.0);
  CHECK(q(0) == 4.0);
  CHECK(q.tail(4).isZero(0.0));
  CHECK_THROWS_AS(build_moment_system(-1), PreconditionError);
}

TEST_CASE("closure rows") {
  CHECK(closure_row(ClosureSpec::pn(), 3).isZero(0.0));
  CHECK(closure_row(ClosureSpec::pn(), 3).size() == 4);
  CHECK(closure_row(ClosureSpec::optimal_prediction(CovOp::identity(5)), 3).isZero(0.0));

  Matrix half(2, 2);
  half << 1.0, 0.5, 0.5, 1.0;
  const Vector r = closure_row(ClosureSpec::optimal_prediction(CovOp(half)), 0);
  REQUIRE(r.size() == 1);
  CHECK(r(0) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(closure_row(ClosureSpec::optimal_prediction(CovOp(half)), 1), PreconditionError);

  oracle::Generator gen(71);
  for (int trial = 0; trial < 10; ++trial) {
    const int order = gen.uniform_int(0, 5);
    const Matrix a = gen.spd(order + 2 + gen.uniform_int(0, 3));
    const Vector r1 = closure_row(ClosureSpec::optimal_prediction(CovOp(a)), order);
    const double scale = gen.uniform(0.01, 100.0);
    const Vector r2 = closure_row(ClosureSpec::optimal_prediction(CovOp(scale * a)), order);
    CHECK((r1 - r2).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, r1.cwiseAbs().maxCoeff()));

    // Same row as the last row of the lower-left block of the l2-adjoint projection.
    const ProjectionBlocks pb = block_projection(CovOp(a), order + 1);
    const Vector from_blocks = pb.PT.row(order + 1).head(order + 1).transpose();
    CHECK((r1 - from_blocks).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("closed advection and CFL") {
  const MomentSystemCoeffs c = build_moment_system(2);
  Vector r(3);
  r << 0.1, 0.2, 0.3;
  const Matrix b = closed_advection(c, r);
  CHECK(b.rows() == 3);
  CHECK(b.cols() == 3);
  CHECK(b(2, 1) == doctest::Approx(2.0 / 5.0 + 3.0 / 5.0 * 0.2));
  CHECK(b(1, 2) == 2.0 / 3.0);
  CHECK(b(2, 2) == doctest::Approx(3.0 / 5.0 * 0.3));
  CHECK(b(2, 0) == doctest::Approx(3.0 / 5.0 * 0.1));
  CHECK(b(0, 1) == 1.0);
  CHECK_THROWS_AS(closed_advection(c, Vector::Zero(2)), DimensionError);

  // P_1: eigenvalues +-1/sqrt(3).
  const ClosedSystem s1 = close_system(1, ClosureSpec::pn());
  CHECK(s1.speed == doctest::Approx(1.0 / std::sqrt(3.0)));
  const ClosedSystem s0 = close_system(0, ClosureSpec::pn());
  CHECK(s0.speed == 0.0);
  CHECK(std::isinf(max_stable_dt(s0, UniformGrid{0.0, 1.0, 10})));

  const UniformGrid g{0.0, 1.0, 10};
  const MaterialParams p = MaterialParams::uniform(g, 0.0, 0.0);
  MomentGrid st;
  st.values = Matrix::Ones(10, 2);
  const double limit = max_stable_dt(s1, g);
  CHECK(limit == doctest::Approx(0.9 * 0.1 * std::sqrt(3.0)));
  CHECK_NOTHROW(step(st, s1, p, limit));
  CHECK_THROWS_AS(step(st, s1, p, 1.01 * limit), SolverError);
  CHECK_THROWS_AS(step(st, s1, p, -0.1), PreconditionError);
  MomentGrid wrong;
  wrong.values = Matrix::Ones(9, 2);
  CHECK_THROWS_AS(step(wrong, s1, p, 0.01), DimensionError);
}

TEST_CASE("step on simple data") {
  const UniformGrid g{0.0, 1.0, 20};
  MomentGrid st;
  st.values = Matrix::Ones(20, 4) * 2.0;
  const ClosedSystem sys = close_system(3, ClosureSpec::pn());
  const MomentGrid same = step(st, sys, MaterialParams::uniform(g, 0.0, 0.0), 0.01);
  CHECK(same.values == st.values);
  CHECK(same.t == 0.01);

  const double kappa = 0.7, dt = 0.01;
  const MomentGrid decayed = step(st, sys, MaterialParams::uniform(g, 0.0, kappa), dt);
  for (int j = 0; j < 20; ++j) CHECK(decayed.values(j, 0) == doctest::Approx(2.0 * (1.0 - kappa * dt)).epsilon(1e-15));

  // Step through the ClosureSpec overload of step() agrees with the pre-closed system.
  const MomentGrid other = step(st, sys.coeffs, MaterialParams::uniform(g, 0.0, kappa), ClosureSpec::pn(), dt);
  CHECK(other.values == decayed.values);
}

TEST_CASE("per-moment conservation without sources") {
  oracle::Generator gen(72);
  const UniformGrid g{-1.0, 1.0, 100};
  const MaterialParams p = MaterialParams::uniform(g, 0.0, 0.0);
  for (const ClosureSpec& spec : {ClosureSpec::pn(), ClosureSpec::optimal_prediction(CovOp(gen.spd(6)))}) {
    const ClosedSystem sys = close_system(3, spec);
    MomentGrid st = random_state(gen, 100, 3);
    const Vector sums0 = st.values.colwise().sum();
    const double dt = max_stable_dt(sys, g);
    for (int n = 0; n < 200; ++n) {
      st = step(st, sys, p, dt);
      const Vector sums = st.values.colwise().sum();
      REQUIRE((sums - sums0).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("P_N equals optimal prediction with identity covariance") {
  const UniformGrid g{-1.0, 1.0, 100};
  MaterialParams p = MaterialParams::uniform(g, 1.0, 0.5, 0.2);
  const MomentGrid init = bump(g, 3);
  const double dt = max_stable_dt(close_system(3, ClosureSpec::pn()), g);
  SolveOptions opts;
  opts.dt = dt;
  opts.final_time = 200 * dt;
  opts.output_stride = 10;
  const auto a = solve_closure(init, p, ClosureSpec::pn(), opts);
  const auto b = solve_closure(init, p, ClosureSpec::optimal_prediction(CovOp::identity(6)), opts);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 21);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i].values, b[i].values) < 1e-12);

  // Block-diagonal A (A_CF = 0) matches bitwise.
  oracle::Generator gen(73);
  Matrix blockdiag = Matrix::Zero(7, 7);
  blockdiag.topLeftCorner(4, 4) = gen.spd(4);
  blockdiag.bottomRightCorner(3, 3) = gen.spd(3);
  const auto c = solve_closure(init, p, ClosureSpec::optimal_prediction(CovOp(blockdiag)), opts);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == c[i].values);
}

TEST_CASE("source enters only the zeroth moment") {
  const UniformGrid g{0.0, 1.0, 10};
  MaterialParams p = MaterialParams::uniform(g, 0.0, 1.0, 3.0);
  MomentGrid init;
  init.values = Matrix::Zero(10, 4);
  SolveOptions opts;
  opts.final_time = 0.1;
  opts.dt = 0.01;
  const auto out = solve_closure(init, p, ClosureSpec::pn(), opts);
  CHECK(out.back().t == 0.1);
  CHECK((out.back().values.col(0).array() > 0.0).all());
  CHECK(out.back().values.rightCols(3).isZero(0.0));
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i].values(0, 0) > out[i - 1].values(0, 0));

  // Time-dependent source is sampled at the start of each step.
  MaterialParams pt = MaterialParams::uniform(g, 0.0, 1.0);
  pt.q = [](double, double t) { return t; };
  MomentGrid z;
  z.values = Matrix::Zero(10, 2);
  const ClosedSystem sys = close_system(1, ClosureSpec::pn());
  const MomentGrid s1 = step(z, sys, pt, 0.01);
  CHECK(s1.values.isZero(0.0));
  const MomentGrid s2 = step(s1, sys, pt, 0.01);
  CHECK(s2.values(0, 0) == doctest::Approx(0.01 * 2.0 * 0.01));
}

TEST_CASE("solver output schedule and errors") {
  const UniformGrid g{0.0, 1.0, 10};
  const MaterialParams p = MaterialParams::uniform(g, 0.0, 0.0);
  MomentGrid init;
  init.values = Matrix::Ones(10, 2);
  SolveOptions opts;
  opts.final_time = 0.095;
  opts.dt = 0.01;
  opts.output_stride = 3;
  const auto out = solve_closure(init, p, ClosureSpec::pn(), opts);
  // Initial, after steps 3, 6, 9, and the shortened final step 10.
  REQUIRE(out.size() == 5);
  CHECK(out[0].t == 0.0);
  CHECK(out[1].t == doctest::Approx(0.03));
  CHECK(out.back().t == 0.095);

  opts.dt = 1.0;
  opts.final_time = 2.0;
  CHECK_THROWS_AS(solve_closure(init, p, ClosureSpec::pn(), opts), SolverError);
  opts.dt = 0.01;
  opts.final_time = 0.0;
  CHECK_THROWS_AS(solve_closure(init, p, ClosureSpec::pn(), opts), PreconditionError);
  opts.final_time = 1.0;
  MaterialParams bad = p;
  bad.sigma(3) = -1.0;
  CHECK_THROWS_AS(solve_closure(init, bad, ClosureSpec::pn(), opts), PreconditionError);
  bad = p;
  bad.grid.cells = 1;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);

  // Blow-up is reported with its location.
  MomentGrid nan_state = init;
  nan_state.values(4, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    step(nan_state, close_system(1, ClosureSpec::pn()), p, 0.01);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cell 3") != std::string::npos);
    CHECK(msg.find("moment") != std::string::npos);
  }
}

TEST_CASE("refinement in the closure order") {
  const UniformGrid g{-1.0, 1.0, 100};
  const MaterialParams p = MaterialParams::uniform(g, 0.0, 0.0);
  SolveOptions opts;
  opts.final_time = 0.5;
  opts.dt = max_stable_dt(close_system(7, ClosureSpec::pn()), g);
  opts.output_stride = 1 << 20;
  std::vector<Matrix> finals;
  for (int order : {3, 5, 7}) finals.push_back(solve_closure(bump(g, order), p, ClosureSpec::pn(), opts).back().values);
  auto l2_common = [&](const Matrix& lo, const Matrix& hi) {
    const auto n = lo.cols();
    return std::sqrt(g.dx() * (lo - hi.leftCols(n)).squaredNorm());
  };
  const double d35 = l2_common(finals[0], finals[1]);
  const double d57 = l2_common(finals[1], finals[2]);
  CHECK(d35 > 0.0);
  CHECK(d57 < d35);
}

TEST_CASE("block projection identities") {
  oracle::Generator gen(74);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = gen.uniform_int(2, 12);
    const CovOp a = gen.covariance(d);
    for (int cut = 1; cut < d; ++cut) {
      const ProjectionBlocks pb = block_projection(a, cut);
      const TruncationDims dims(2, d);
      const SeqVec phi = gen.seqvec(dims), omega = gen.seqvec(dims);
      // The operator acts on the sequence index; its action on phi is F * P^T.
      const SeqVec pphi = apply_extended(Matrix(pb.P.transpose()), phi);
      const SeqVec ptomega = apply_extended(Matrix(pb.PT.transpose()), omega);
      CHECK(std::fabs(inner_l2(pphi, omega) - inner_l2(phi, ptomega)) < 1e-10 * std::max(1.0, phi.norm() * omega.norm()));
    }
  }
}

TEST_CASE("closure CSV") {
  const UniformGrid g{0.0, 1.0, 2};
  MomentGrid s;
  s.t = 0.25;
  s.values = Matrix::Ones(2, 2);
  std::ostringstream os;
  write_closure_csv(os, {s}, g);
  CHECK(os.str() == "t,x,I_0,I_1\n0.25,0.25,1,1\n0.25,0.75,1,1\n");
}
