#include <doctest.h>

#include <cmath>
#include <random>

#include "nsq/hilbert.hpp"

using namespace nsq;

namespace {

ComplexSeq random_seq(int len, int off, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec v(len);
  for (int k = 0; k < len; ++k) v(k) = cplx(g(rng), g(rng));
  return ComplexSeq(v, off);
}

CMat random_banded(int n, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMat m = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - band); j <= std::min(n - 1, i + band); ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("ComplexSeq rejects empty and non-finite windows") {
  CHECK_THROWS_AS(ComplexSeq{CVec(0)}, ContractViolation);
  CVec bad(2);
  bad << 1.0, cplx(NAN, 0.0);
  CHECK_THROWS_AS(ComplexSeq{bad}, ContractViolation);
  auto e = ComplexSeq::unit(3, 5, 1);
  CHECK(e.at(3) == cplx(1.0));
  CHECK(e.at(1) == cplx(0.0));
  CHECK(e.at(100) == cplx(0.0));
  CHECK(e.last_index() == 5);
  CHECK_THROWS_AS(ComplexSeq::unit(7, 5, 1), AlignmentError);
}

TEST_CASE("scale_norm examples") {
  auto e1 = ComplexSeq::unit(1, 1, 1);
  CHECK(scale_norm(e1, ScaleWeights::aligned(e1), 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  CVec v(2);
  v << 1.0, 1.0;
  ComplexSeq x(v, 1);
  CHECK(scale_norm(x, ScaleWeights::aligned(x), -1.0) == doctest::Approx(std::sqrt(0.5 + 0.2)).epsilon(1e-15));

  auto y = random_seq(9, -4, 3);
  CHECK(scale_norm(y, ScaleWeights::aligned(y), 0.0) == doctest::Approx(y.entries().norm()).epsilon(1e-15));
}

TEST_CASE("scale_norm rejects misaligned windows") {
  auto x = random_seq(5, 0, 1);
  CHECK_THROWS_AS(scale_norm(x, ScaleWeights::make(5, 1), 1.0), AlignmentError);
  CHECK_THROWS_AS(scale_norm(x, ScaleWeights::make(4, 0), 1.0), AlignmentError);
}

TEST_CASE("default weights: monotone in |n| with the neighbour ratio bound") {
  auto w = ScaleWeights::make(81, -40);
  const double lo = std::sqrt(0.4), hi = std::sqrt(2.5);
  for (int k = 0; k + 1 < w.size(); ++k) {
    double r = w.theta()(k) / w.theta()(k + 1);
    CHECK(r >= lo - 1e-15);
    CHECK(r <= hi + 1e-15);
    int n = w.offset() + k;
    if (n >= 0) CHECK(w.theta()(k + 1) > w.theta()(k));
  }
  auto lin = ScaleWeights::make(5, 1, WeightRule::linear);
  CHECK(lin.theta()(4) == 5.0);
  CHECK_THROWS_AS(ScaleWeights::make(3, 0, WeightRule::linear), ContractViolation);
  CHECK(weight_rule_from_string(to_string(WeightRule::linear)) == WeightRule::linear);
  CHECK_THROWS_AS(weight_rule_from_string("bogus"), ConfigError);
}

TEST_CASE("scale_norm is log-convex in s") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = random_seq(15, -7, seed);
    auto w = ScaleWeights::aligned(x);
    for (double s1 : {-2.0, -0.5, 0.0})
      for (double s2 : {0.5, 1.0, 3.0})
        for (double lam : {0.25, 0.5, 0.8}) {
          double s = (1 - lam) * s1 + lam * s2;
          double lhs = scale_norm(x, w, s);
          double rhs = std::pow(scale_norm(x, w, s1), 1 - lam) * std::pow(scale_norm(x, w, s2), lam);
          CHECK(lhs <= rhs * (1 + 1e-12));
        }
  }
}

TEST_CASE("symplectic_form examples and antisymmetry") {
  auto e1 = ComplexSeq::unit(1, 2, 1), e2 = ComplexSeq::unit(2, 2, 1);
  ComplexSeq ie1(kI * e1.entries(), 1);
  CHECK(symplectic_form(e1, ie1) == doctest::Approx(1.0));
  CHECK(symplectic_form(e1, e2) == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto u = random_seq(6, 0, seed), v = random_seq(6, 0, seed + 100);
    CHECK(symplectic_form(u, u) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(symplectic_form(u, v) == doctest::Approx(-symplectic_form(v, u)).epsilon(1e-14));
    double direct = 0.0;
    for (int k = 0; k < 6; ++k) direct += (std::conj(u.entries()(k)) * v.entries()(k)).imag();
    CHECK(symplectic_form(u, v) == doctest::Approx(direct).epsilon(1e-13));
  }
  CHECK_THROWS_AS(symplectic_form(random_seq(3, 0, 1), random_seq(4, 0, 1)), AlignmentError);
}

TEST_CASE("operator_scale_norm against an entrywise oracle") {
  auto w = ScaleWeights::make(12, -3);
  CMat m = random_banded(12, 2, 5);
  for (double s : {-1.0, 0.0, 0.7}) {
    CMat c(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) c(i, j) = m(i, j) * std::pow(w.theta()(i) / w.theta()(j), s);
    double oracle = Eigen::JacobiSVD<CMat>(c).singularValues()(0);
    CHECK(operator_scale_norm(m, w, s) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("diag_conjugation_residual examples") {
  auto w = ScaleWeights::make(32, 1);
  SUBCASE("identity") {
    auto r = diag_conjugation_residual(CMat::Identity(32, 32), w, 0.3, 1.0, 1.0);
    CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.bound > 0.0);
    CHECK(r.pass);
  }
  SUBCASE("diagonal") {
    CVec d(32);
    for (int k = 0; k < 32; ++k) d(k) = cplx(std::cos(k), std::sin(2 * k)) * 0.5;
    auto r = diag_conjugation_residual(CMat(d.asDiagonal()), w, 0.5, 1.0, 1.0);
    CHECK(r.residual < 1e-15);
    CHECK(r.pass);
  }
  SUBCASE("nearest-neighbour shift") {
    CMat q = CMat::Zero(32, 32);
    for (int i = 0; i + 1 < 32; ++i) q(i + 1, i) = 1.0;
    const double c = std::max({operator_scale_norm(q, w, -1.0), operator_scale_norm(q, w, 0.0),
                               operator_scale_norm(q, w, 1.0)});
    auto r = diag_conjugation_residual(q, w, 0.1, 1.0, c);
    CMat oracle(32, 32);
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) oracle(i, j) = q(i, j) * (std::pow(w.theta()(i) / w.theta()(j), 0.1) - 1.0);
    CHECK(r.residual == doctest::Approx(Eigen::JacobiSVD<CMat>(oracle).singularValues()(0)).epsilon(1e-10));
    CHECK(r.hypothesis_ok);
    CHECK(r.residual <= r.bound);
    CHECK(r.pass);
  }
  SUBCASE("hypothesis failure is reported") {
    auto r = diag_conjugation_residual(3.0 * CMat::Identity(32, 32), w, 0.1, 1.0, 1.0);
    CHECK_FALSE(r.hypothesis_ok);
    CHECK_FALSE(r.pass);
    CHECK(r.message == "hypothesis not satisfied");
    auto r2 = diag_conjugation_residual(CMat::Identity(32, 32), w, 2.0, 1.0, 1.0);
    CHECK_FALSE(r2.hypothesis_ok);
  }
}

TEST_CASE("diag_conjugation_residual bound holds on random banded matrices") {
  auto w = ScaleWeights::make(24, -12);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CMat q = random_banded(24, 1 + seed % 3, seed);
    for (double s0 : {0.5, 1.0}) {
      double c = std::max({operator_scale_norm(q, w, -s0), operator_scale_norm(q, w, 0.0),
                           operator_scale_norm(q, w, s0)});
      for (double s : {-s0, -0.3 * s0, 0.1 * s0, s0}) {
        auto r = diag_conjugation_residual(q, w, s, s0, c);
        REQUIRE(r.hypothesis_ok);
        CHECK(r.residual <= r.bound + 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked == 320);
}
