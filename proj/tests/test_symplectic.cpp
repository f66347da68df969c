#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "nsq/symplectic.hpp"

using namespace nsq;

namespace {

RealLinearOp scalar_op(cplx p, cplx q) {
  CMat P(1, 1), Q(1, 1);
  P(0, 0) = p;
  Q(0, 0) = q;
  return RealLinearOp(P, Q);
}

CVec random_vec(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec v(n);
  for (int k = 0; k < n; ++k) v(k) = cplx(g(rng), g(rng));
  return v;
}

double norm2(const CMat& m) {
  return Eigen::JacobiSVD<CMat>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("apply examples") {
  CVec u = random_vec(4, 1);
  CHECK((nsq::apply(RealLinearOp::identity(4), u) - u).norm() == 0.0);
  CHECK(std::abs(nsq::apply(scalar_op(std::sqrt(2.0), 1.0), CVec(CVec::Ones(1)))(0) - (std::sqrt(2.0) + 1.0)) < 1e-15);
  RealLinearOp conj(CMat::Zero(4, 4), CMat::Identity(4, 4));
  CHECK((nsq::apply(conj, u) - u.conjugate()).norm() == 0.0);
  CHECK_THROWS_AS(nsq::apply(conj, CVec(3)), AlignmentError);
  CHECK_THROWS_AS(RealLinearOp(CMat::Identity(2, 2), CMat::Identity(3, 3)), AlignmentError);
}

TEST_CASE("symplectic_residuals examples") {
  CHECK(symplectic_residuals(RealLinearOp::identity(5)).max() == 0.0);
  CHECK(symplectic_residuals(scalar_op(std::sqrt(2.0), 1.0)).max() < 1e-15);
  auto r = symplectic_residuals(RealLinearOp(2.0 * CMat::Identity(3, 3), CMat::Zero(3, 3)));
  CHECK(r.r1 == doctest::Approx(3.0));
  CHECK(r.r2 == 0.0);
  CHECK(r.r3 == doctest::Approx(3.0));
  CHECK(r.r4 == 0.0);
}

TEST_CASE("inverse_symplectic examples") {
  auto inv = inverse_symplectic(RealLinearOp::identity(3));
  CHECK((inv.P - CMat::Identity(3, 3)).norm() == 0.0);
  CHECK(inv.Q.norm() == 0.0);

  auto f = scalar_op(std::sqrt(2.0), 1.0);
  auto fi = inverse_symplectic(f);
  CHECK(std::abs(fi.P(0, 0) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(fi.Q(0, 0) + 1.0) < 1e-15);
  for (cplx u : {cplx(1.0), cplx(0.3, -2.0)}) {
    CVec x(1);
    x(0) = u;
    CHECK(std::abs(nsq::apply(fi, nsq::apply(f, x))(0) - u) < 1e-15);
  }
  CHECK_THROWS_AS(inverse_symplectic(RealLinearOp(2.0 * CMat::Identity(2, 2), CMat::Zero(2, 2))), ContractViolation);
}

TEST_CASE("complex_representation examples") {
  CHECK(complex_representation(RealLinearOp::identity(4)).norm() == 0.0);
  CHECK(std::abs(complex_representation(scalar_op(std::sqrt(2.0), 1.0))(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK_THROWS_AS(complex_representation(RealLinearOp(CMat::Zero(2, 2), CMat::Identity(2, 2))), ContractViolation);
}

TEST_CASE("real coordinates agree with the complex action") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMat P(5, 5), Q(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        P(i, j) = cplx(g(rng), g(rng));
        Q(i, j) = cplx(g(rng), g(rng));
      }
    RealLinearOp f(P, Q);
    CVec u = random_vec(5, seed + 50);
    RVec x(10);
    x << u.real(), u.imag();
    RVec y = to_real(f) * x;
    CVec fu = nsq::apply(f, u);
    CHECK((y.head(5) - fu.real()).norm() < 1e-12);
    CHECK((y.tail(5) - fu.imag()).norm() < 1e-12);
    auto back = from_real(to_real(f));
    CHECK((back.P - P).norm() < 1e-12);
    CHECK((back.Q - Q).norm() < 1e-12);

    RealLinearOp g2(Q, P);
    RMat prod = to_real(f) * to_real(g2);
    CHECK((to_real(compose(f, g2)) - prod).norm() < 1e-11);
  }
}

TEST_CASE("symplectic means preserving the real form") {
  const RMat J = real_symplectic_unit(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f = random_symplectic(3, 1.0, seed);
    RMat m = to_real(f);
    CHECK((m.transpose() * J * m - J).norm() < 1e-12);
    CVec u = random_vec(3, seed), v = random_vec(3, seed + 7);
    double before = u.dot(v).imag();
    double after = nsq::apply(f, u).dot(nsq::apply(f, v)).imag();
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("random_symplectic examples") {
  auto f0 = random_symplectic(1, 0.0, 3);
  CHECK(std::abs(f0.P(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(f0.Q(0, 0)) < 1e-15);
  auto f = random_symplectic(4, 0.5, 7);
  CHECK(symplectic_residuals(f).max() <= 1e-10);
  auto g = random_symplectic(4, 0.5, 7);
  CHECK((f.P - g.P).norm() == 0.0);
  CHECK((f.Q - g.Q).norm() == 0.0);
  auto b = random_symplectic(8, 0.8, 2, 1);
  CHECK(symplectic_residuals(b).max() <= 1e-10);
  CHECK_THROWS_AS(random_symplectic(0, 1.0, 1), ContractViolation);
  CHECK_THROWS_AS(random_symplectic(2, -1.0, 1), ContractViolation);
}

TEST_CASE("generated operators: identities, inverse and contraction law") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    int dim = 1 + seed % 12;
    double spread = 0.2 + 0.1 * (seed % 15);
    auto f = random_symplectic(dim, spread, seed);
    REQUIRE(symplectic_residuals(f).max() <= 1e-10);
    auto id = compose(inverse_symplectic(f), f);
    CHECK((id.P - CMat::Identity(dim, dim)).norm() <= 1e-10);
    CHECK(id.Q.norm() <= 1e-10);
    double a = norm2(complex_representation(f));
    double q = norm2(f.Q);
    CHECK(a < 1.0);
    CHECK(std::abs(a - q / std::sqrt(1.0 + q * q)) <= 1e-10);
  }
}

TEST_CASE("scalar family {cosh t, sinh t e^{iφ}} has |A| = |tanh t|") {
  for (double t : {-2.0, -0.3, 0.0, 0.1, 1.0, 3.0})
    for (double phi : {0.0, 1.0, 2.5}) {
      auto f = scalar_op(std::cosh(t), std::sinh(t) * std::polar(1.0, phi));
      CHECK(symplectic_residuals(f).max() < 1e-12);
      CHECK(std::abs(std::abs(complex_representation(f)(0, 0)) - std::abs(std::tanh(t))) <= 1e-12);
    }
}

TEST_CASE("scale_bound_report examples") {
  auto w = ScaleWeights::make(16, 1);
  SUBCASE("identity") {
    auto r = scale_bound_report(RealLinearOp::identity(16), w, {0.0, 0.1, 0.5}, 1.0, 1.0);
    CHECK(r.hypothesis_ok);
    CHECK(r.pass);
    for (const auto& row : r.rows) {
      CHECK(row.pinv_norm == doctest::Approx(1.0));
      CHECK(row.a_norm == 0.0);
    }
  }
  SUBCASE("{√2 I, I}") {
    RealLinearOp f(std::sqrt(2.0) * CMat::Identity(16, 16), CMat::Identity(16, 16));
    double c = real_op_norm(f);
    auto r = scale_bound_report(f, w, {0.0, 0.05, 0.1}, c, 1.0);
    CHECK(r.hypothesis_ok);
    for (const auto& row : r.rows) CHECK(row.a_norm == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r.pass);
  }
  SUBCASE("random banded") {
    auto f = random_symplectic(16, 0.5, 11, 1);
    std::vector<double> grid{0.0, 0.05, 0.1};
    double c = 0.0;
    auto finv = inverse_symplectic(f);
    for (double s : grid) {
      const CVec dp = w.power(s).cast<cplx>();
      const CVec dm = w.power(-s).cast<cplx>();
      c = std::max(c, real_op_norm(RealLinearOp(dp.asDiagonal() * f.P * dm.asDiagonal(), dp.asDiagonal() * f.Q * dm.asDiagonal())));
      c = std::max(c, real_op_norm(RealLinearOp(dp.asDiagonal() * finv.P * dm.asDiagonal(), dp.asDiagonal() * finv.Q * dm.asDiagonal())));
    }
    auto r = scale_bound_report(f, w, grid, c, 0.1);
    CHECK(r.hypothesis_ok);
    CHECK(r.observed_a < 1.0);
    CHECK(r.observed_a >= r.a0 - 1e-12);
    CHECK(r.s1 == doctest::Approx(0.1 / (8 * c * c)));
    double prev = -1.0;
    for (const auto& row : r.rows) {
      if (prev >= 0.0) CHECK(std::abs(row.a_norm - prev) < 0.1);
      prev = row.a_norm;
    }
  }
  SUBCASE("hypothesis failure") {
    auto f = random_symplectic(16, 1.0, 3);
    auto r = scale_bound_report(f, w, {0.0}, 1e-3, 1.0);
    CHECK_FALSE(r.hypothesis_ok);
    CHECK(r.message == "hypothesis not satisfied");
  }
}
