#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/QR>

#include "doctest.h"
#include "oracle.hpp"
#include "seqgauss/linalg.hpp"
#include "test_util.hpp"

using namespace seqgauss;
using seqgauss::testing::max_abs_diff;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix half_coupled(int d) {
  Matrix a = Matrix::Identity(d, d);
  a(0, 1) = a(1, 0) = 0.5;
  return a;
}

}  // namespace

TEST_CASE("TruncationDims rejects empty truncations") {
  CHECK_THROWS_AS(TruncationDims(0, 3), DimensionError);
  CHECK_THROWS_AS(TruncationDims(2, 0), DimensionError);
  CHECK(TruncationDims(2, 3).flat_size() == 6);
}

TEST_CASE("CovOp validation") {
  CHECK_NOTHROW(CovOp(half_coupled(3)));
  Matrix asym = half_coupled(2);
  asym(0, 1) = 0.6;
  CHECK_THROWS_AS(CovOp{asym}, NotPositiveDefinite);
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(CovOp{indefinite}, NotPositiveDefinite);
  CHECK_THROWS_AS(CovOp{Matrix::Zero(2, 2)}, NotPositiveDefinite);
  CHECK_THROWS_AS(CovOp{Matrix::Ones(2, 3)}, DimensionError);

  const CovOp a(half_coupled(3));
  CHECK(max_abs_diff(a.chol() * a.chol().transpose(), a.matrix()) < 1e-15);
}

TEST_CASE("bullet") {
  const SeqVec f = bullet(vec({1, 2}), vec({3, 0, 4}));
  Matrix want(2, 3);
  want << 3, 0, 4, 6, 0, 8;
  CHECK(max_abs_diff(f.matrix(), want) == 0.0);

  CHECK(bullet(Vector::Zero(2), vec({3, 0, 4})).is_zero());

  oracle::Generator gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector h = gen.vector(gen.uniform_int(1, 5));
    const Vector x = gen.vector(gen.uniform_int(1, 7));
    CHECK(bullet(h, x).norm() == doctest::Approx(h.norm() * x.norm()).epsilon(1e-13));
  }
}

TEST_CASE("bracket") {
  const Vector h = vec({1, 2});
  const Vector x = vec({3, 0, 4});
  const HVec r = bracket(bullet(h, x), x);
  CHECK(r(0) == doctest::Approx(25));
  CHECK(r(1) == doctest::Approx(50));

  oracle::Generator gen(12);
  const SeqVec f = gen.seqvec({3, 4});
  for (int k = 0; k < 4; ++k) {
    CHECK(max_abs_diff(bracket(f, Vector::Unit(4, k)), f.column(k)) == 0.0);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const SeqVec g = gen.seqvec({3, 5});
    const Vector y = gen.vector(5);
    CHECK(bracket(g, y).norm() <= g.norm() * y.norm() * (1 + 1e-14));
  }
  CHECK_THROWS_AS(bracket(f, vec({1, 2})), DimensionError);
}

TEST_CASE("inner_l2 identities") {
  oracle::Generator gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector h = gen.vector(3), g = gen.vector(3), x = gen.vector(4), y = gen.vector(4);
    CHECK(inner_l2(bullet(h, x), bullet(g, y)) == doctest::Approx(h.dot(g) * x.dot(y)).epsilon(1e-12));
    const SeqVec f = gen.seqvec({3, 4});
    CHECK(inner_l2(f, bullet(h, x)) == doctest::Approx(bracket(f, x).dot(h)).epsilon(1e-12));
  }
  const SeqVec z(TruncationDims(2, 2));
  CHECK(inner_l2(z, z) == 0.0);
  CHECK(inner_l2(SeqVec::unit({2, 2}, 1, 0), SeqVec::unit({2, 2}, 1, 0)) > 0.0);
  CHECK_THROWS_AS(inner_l2(z, SeqVec(TruncationDims(2, 3))), DimensionError);
}

TEST_CASE("inner_A") {
  const CovOp a(half_coupled(2));
  const TruncationDims dims(1, 2);
  CHECK(inner_A(SeqVec::unit(dims, 0, 0), SeqVec::unit(dims, 0, 1), a) == doctest::Approx(0.5));

  oracle::Generator gen(14);
  const CovOp id = CovOp::identity(4);
  const CovOp b = gen.covariance(4);
  for (int trial = 0; trial < 20; ++trial) {
    const SeqVec f = gen.seqvec({3, 4}), g = gen.seqvec({3, 4});
    CHECK(inner_A(f, g, id) == doctest::Approx(inner_l2(f, g)).epsilon(1e-13));
    CHECK(inner_A(f, g, b) == doctest::Approx(inner_A(g, f, b)).epsilon(1e-12));
    CHECK(inner_A(f, g, b) == doctest::Approx(inner_l2(f, apply_extended(b, g))).epsilon(1e-12));
    const Vector h = gen.vector(3), k = gen.vector(3), x = gen.vector(4), y = gen.vector(4);
    CHECK(inner_A(bullet(h, x), bullet(k, y), b) == doctest::Approx(h.dot(k) * b.inner(x, y)).epsilon(1e-12));
    // (f, h . x)_A = ([f, A x], h)
    CHECK(inner_A(f, bullet(h, x), b) == doctest::Approx(bracket(f, b.apply(x)).dot(h)).epsilon(1e-12));
  }
}

TEST_CASE("apply_extended") {
  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 1.0, 1.0 / 4, 1.0 / 9;
  const CovOp a(diag);
  oracle::Generator gen(15);
  const SeqVec f = gen.seqvec({2, 3});
  const SeqVec af = apply_extended(a, f);
  for (int k = 0; k < 3; ++k) CHECK(max_abs_diff(af.column(k), f.column(k) / ((k + 1.0) * (k + 1.0))) < 1e-16);

  const CovOp b = gen.covariance(3);
  const Vector h = gen.vector(2), x = gen.vector(3);
  CHECK(max_abs_diff(apply_extended(b, bullet(h, x)).matrix(), bullet(h, b.apply(x)).matrix()) < 1e-14);
  CHECK(max_abs_diff(apply_extended(CovOp::identity(3), f).matrix(), f.matrix()) == 0.0);

  // Basis independence: rotate l2(R) by an orthogonal Q, apply, rotate back.
  const Matrix q = Eigen::HouseholderQR<Matrix>(gen.matrix(3, 3)).householderQ();
  const Matrix rotated_f = f.matrix() * q;
  const Matrix rotated_a = q.transpose() * b.matrix() * q;
  const Matrix back = (rotated_f * rotated_a) * q.transpose();
  CHECK(max_abs_diff(back, apply_extended(b, f).matrix()) < 1e-13);

  // Column-wise definition sum_k [f, e_k] . (A e_k).
  SeqVec by_columns(f.dims());
  for (int k = 0; k < 3; ++k) by_columns += bullet(bracket(f, Vector::Unit(3, k)), b.apply(Vector::Unit(3, k)));
  CHECK(max_abs_diff(by_columns.matrix(), apply_extended(b, f).matrix()) < 1e-14);
}

TEST_CASE("gram_schmidt_A") {
  const CovOp a(half_coupled(2));
  const std::vector<Vector> xs{Vector::Unit(2, 0), Vector::Unit(2, 1)};
  const auto basis = gram_schmidt_A(xs, a);
  REQUIRE(basis.size() == 2);
  CHECK(max_abs_diff(basis[0], vec({1, 0})) < 1e-15);
  const double s = std::sqrt(4.0 / 3.0);
  CHECK(max_abs_diff(basis[1], vec({-0.5 * s, s})) < 1e-12);

  const CovOp id = CovOp::identity(3);
  const std::vector<Vector> ortho{Vector::Unit(3, 2), Vector::Unit(3, 0)};
  const auto same = gram_schmidt_A(ortho, id);
  REQUIRE(same.size() == 2);
  CHECK(max_abs_diff(same[0], ortho[0]) == 0.0);
  CHECK(max_abs_diff(same[1], ortho[1]) == 0.0);

  oracle::Generator gen(16);
  const CovOp b = gen.covariance(4);
  const Vector x = gen.vector(4);
  const std::vector<Vector> dep{x, 2.0 * x};
  const auto one = gram_schmidt_A(dep, b);
  REQUIRE(one.size() == 1);
  CHECK(max_abs_diff(one[0], x / b.norm(x)) < 1e-14);

  CHECK_THROWS_AS(gram_schmidt_A(std::vector<Vector>{}, b), PreconditionError);
  CHECK_THROWS_AS(gram_schmidt_A(std::vector<Vector>{Vector::Zero(4)}, b), PreconditionError);

  // Random families: A-orthonormal and spanning the same subspace.
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vector> fam;
    for (int i = 0; i < 3; ++i) fam.push_back(gen.vector(4));
    const auto q = gram_schmidt_A(fam, b);
    REQUIRE(q.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(b.inner(q[i], q[j]) - (i == j)) < 1e-12);
    Matrix qm(4, 3), fm(4, 3);
    for (int i = 0; i < 3; ++i) {
      qm.col(i) = q[i];
      fm.col(i) = fam[i];
    }
    // Every input lies in span(q): least-squares residual vanishes.
    const Matrix coeffs = qm.colPivHouseholderQr().solve(fm);
    CHECK(max_abs_diff(qm * coeffs, fm) < 1e-12);
  }
}

TEST_CASE("block_projection") {
  Matrix m = half_coupled(3);
  const CovOp a(m);
  const ProjectionBlocks pb = block_projection(a, 1);
  Matrix want = Matrix::Zero(3, 3);
  want(0, 0) = 1.0;
  want(0, 1) = 0.5;
  CHECK(max_abs_diff(pb.P, want) < 1e-15);
  CHECK(max_abs_diff(pb.P * pb.P, pb.P) < 1e-10);
  CHECK(max_abs_diff(a.matrix() * pb.P, pb.PT * a.matrix()) < 1e-10);

  const ProjectionBlocks idp = block_projection(CovOp::identity(4), 2);
  Matrix want_id = Matrix::Zero(4, 4);
  want_id(0, 0) = want_id(1, 1) = 1.0;
  CHECK(max_abs_diff(idp.P, want_id) == 0.0);

  oracle::Generator gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = gen.uniform_int(2, 8);
    const CovOp b = gen.covariance(d);
    const int cut = gen.uniform_int(1, d - 1);
    const ProjectionBlocks p = block_projection(b, cut);
    for (int k = 0; k < cut; ++k) CHECK(max_abs_diff(p.P * Vector::Unit(d, k), Vector::Unit(d, k)) < 1e-12);
    CHECK(p.P.bottomRows(d - cut).isZero(0.0));
    CHECK(p.PT.rightCols(d - cut).isZero(0.0));
    for (int s = 0; s < 5; ++s) {
      const Vector x = gen.vector(d);
      Vector y = Vector::Zero(d);
      y.head(cut) = gen.vector(cut);
      CHECK(std::fabs(b.inner(x - p.P * x, y)) < 1e-10);
      CHECK(b.norm(p.P * x) <= b.norm(x) * (1 + 1e-12));
    }
  }

  CHECK_THROWS_AS(block_projection(a, 0), PreconditionError);
  CHECK_THROWS_AS(block_projection(a, 3), PreconditionError);
}

TEST_CASE("psd_check") {
  CHECK(psd_check(half_coupled(2)));
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_FALSE(psd_check(bad));
  CHECK(psd_check(Matrix::Zero(3, 3)));
  Matrix asym(2, 2);
  asym << 1, 0.3, 0.1, 1;
  CHECK_THROWS_AS(psd_check(asym), PreconditionError);
  CHECK_THROWS_AS(psd_check(Matrix::Ones(2, 3)), PreconditionError);

  // Agrees with the real-coefficient criterion sum c_k c_l M_kl >= 0 on random probes.
  oracle::Generator gen(18);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g = gen.gram(4, 2);  // rank 2, PSD
    CHECK(psd_check(g));
    for (int p = 0; p < 20; ++p) {
      const Vector c = gen.vector(4);
      CHECK(c.dot(g * c) >= -1e-12 * g.norm());
    }
  }
}

TEST_CASE("hadamard and the Schur product theorem") {
  oracle::Generator gen(19);
  const Matrix m = gen.matrix(3, 3);
  CHECK(max_abs_diff(hadamard(m, Matrix::Ones(3, 3)), m) == 0.0);
  CHECK_THROWS_AS(hadamard(m, Matrix::Ones(3, 2)), DimensionError);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g1 = gen.gram(5, 3);
    const Matrix g2 = gen.gram(5, 4);
    CHECK(psd_check(hadamard(g1, g2)));
    const Matrix e = hadamard_exp(g1);
    CHECK(max_abs_diff(e, g1.array().exp().matrix()) <= 1e-12 * e.cwiseAbs().maxCoeff());
    CHECK(psd_check(e));
  }
}

TEST_CASE("Parseval over random orthonormal bases") {
  oracle::Generator gen(20);
  for (int trial = 0; trial < 10; ++trial) {
    const SeqVec f = gen.seqvec({3, 6});
    const Matrix q = Eigen::HouseholderQR<Matrix>(gen.matrix(6, 6)).householderQ();
    double sum = 0.0;
    for (int k = 0; k < 6; ++k) sum += bracket(f, q.col(k)).squaredNorm();
    CHECK(std::fabs(sum - f.norm() * f.norm()) < 1e-10);
  }
}

TEST_CASE("operator norm of the extension equals the norm of A") {
  oracle::Generator gen(21);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = gen.uniform_int(2, 8);
    const CovOp a = gen.covariance(d);
    const double on_seq = oracle::power_iteration(
        [&](const Matrix& f) { return apply_extended(a, SeqVec(f)).matrix(); }, gen.matrix(3, d), 20000);
    const double on_vec =
        oracle::power_iteration([&](const Matrix& x) { return Matrix(a.matrix() * x); }, gen.matrix(d, 1), 20000);
    CHECK(std::fabs(on_seq - on_vec) <= 1e-8 * on_vec);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    CHECK(std::fabs(on_vec - es.eigenvalues().maxCoeff()) <= 1e-8 * on_vec);
  }
}

TEST_CASE("bracket has no continuous extension to the A-completion") {
  const int d = 200;
  Matrix diag = Matrix::Zero(d, d);
  Vector x(d);
  for (int k = 1; k <= d; ++k) {
    diag(k - 1, k - 1) = 1.0 / (static_cast<double>(k) * k);
    x(k - 1) = 1.0 / k;
  }
  const CovOp a(diag);
  const HVec h = Vector::Unit(2, 0);
  auto f_n = [&](int n) {
    Vector ones = Vector::Zero(d);
    ones.head(n).setOnes();
    return bullet(h, ones);
  };
  for (int n : {5, 50, 200}) {
    const int mm = n / 2;
    double tail = 0.0, harmonic = 0.0;
    for (int k = mm + 1; k <= n; ++k) tail += 1.0 / (static_cast<double>(k) * k);
    for (int k = 1; k <= n; ++k) harmonic += 1.0 / k;
    const SeqVec diff = f_n(n) - f_n(mm);
    CHECK(std::fabs(inner_A(diff, diff, a) - tail) < 1e-10);
    CHECK(std::fabs(bracket(f_n(n), x).norm() - harmonic) < 1e-10);
    CHECK(norm_A(f_n(n), a) < std::numbers::pi / std::sqrt(6.0));
  }
}
