#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "nsq/dnls.hpp"

using namespace nsq;

namespace {

CMat expm_i(const CMat& a, double t) {
  CMat g = (kI * t) * a;
  return g.exp();
}

double max_abs(const Trajectory& tr) {
  double m = 0.0;
  for (const auto& s : tr.states) m = std::max(m, s.u.entries().cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST_CASE("Nonlinearity") {
  auto c = Nonlinearity::power(1.0);
  CHECK(c.f(0.5) == 0.5);
  CHECK(c.F(0.5) == doctest::Approx(0.125));
  CHECK(c.fprime(3.0) == 1.0);
  auto q = Nonlinearity::power(2.5);
  CHECK(q.fprime(2.0) == doctest::Approx(2.5 * std::pow(2.0, 1.5)));
  CHECK(q.F(2.0) == doctest::Approx(std::pow(2.0, 3.5) / 3.5));
  CHECK(c.growth_sup(2.0) == doctest::Approx(6.0));
  CHECK(Nonlinearity::zero().is_zero());
  CHECK(Nonlinearity::zero().growth_sup(5.0) == 0.0);
  CHECK_THROWS_AS(Nonlinearity::power(0.0), ContractViolation);
  CHECK_THROWS_AS(Nonlinearity::custom("shifted", [](double x) { return x + 1.0; }, [](double) { return 1.0; },
                                       [](double x) { return x * x / 2 + x; }),
                  ContractViolation);
  auto sat = Nonlinearity::custom("sat", [](double x) { return x / (1 + x); },
                                  [](double x) { return 1 / ((1 + x) * (1 + x)); },
                                  [](double x) { return x - std::log1p(x); });
  CHECK(sat.growth_sup(1.0) > 0.0);
  CHECK(sat.growth_sup(1.0) <= 3.0);
}

TEST_CASE("CouplingMatrix") {
  auto nn = CouplingMatrix::nearest_neighbor(3, 1.0);
  CHECK(nn.size() == 7);
  CHECK(nn.offset() == -3);
  CHECK(nn.bandwidth() == 1);
  CHECK(nn.bound() == 1.0);
  CHECK(CouplingMatrix::zero(2).bandwidth() == 0);
  CHECK(CouplingMatrix::zero(2).bound() == 0.0);
  CMat bad = CMat::Zero(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(CouplingMatrix(bad, -1), ContractViolation);
  CHECK_THROWS_AS(CouplingMatrix(CMat::Zero(2, 3), 0), AlignmentError);
  auto r = CouplingMatrix::random(5, 2, 0.7, 4);
  CHECK(r.bandwidth() <= 2);
  CHECK(r.bound() <= 0.7 + 1e-15);
  CHECK((r.dense() - r.dense().adjoint()).norm() == 0.0);
}

TEST_CASE("rhs examples") {
  auto a = CouplingMatrix::nearest_neighbor(4);
  auto f = Nonlinearity::power(1.0);
  const cplx c(0.6, -0.8);
  LatticeState st{ComplexSeq(c * ComplexSeq::unit(0, 9, -4).entries(), -4), 0.0};
  auto d = rhs(st, a, f);
  CHECK(std::abs(d.at(0) - kI * std::norm(c) * c) < 1e-15);
  CHECK(std::abs(d.at(1) - kI * c) < 1e-15);
  CHECK(std::abs(d.at(-1) - kI * c) < 1e-15);
  for (int n : {-4, -3, -2, 2, 3, 4}) CHECK(d.at(n) == cplx(0.0));

  LatticeState zero{ComplexSeq::zeros(9, -4), 0.0};
  CHECK(rhs(zero, a, f).entries().norm() == 0.0);

  auto s = initial_state("sech", 4, 0.8);
  auto d0 = rhs(s, CouplingMatrix::zero(4), f);
  for (int k = 0; k < 9; ++k) {
    cplx u = s.u.entries()(k);
    CHECK(std::abs(d0.entries()(k) - kI * std::norm(u) * u) < 1e-15);
  }
  CHECK_THROWS_AS(rhs(s, CouplingMatrix::zero(3), f), AlignmentError);
  CHECK((rhs(s, a, f, Exec::serial).entries() - rhs(s, a, f, Exec::parallel).entries()).norm() == 0.0);
}

TEST_CASE("hamiltonian examples") {
  auto a = CouplingMatrix::nearest_neighbor(4);
  auto f = Nonlinearity::power(1.0);
  const cplx c(1.1, 0.3);
  LatticeState st{ComplexSeq(c * ComplexSeq::unit(0, 9, -4).entries(), -4), 0.0};
  CHECK(hamiltonian(st, a, f) == doctest::Approx(std::pow(std::abs(c), 4) / 2).epsilon(1e-14));
  CHECK(hamiltonian(LatticeState{ComplexSeq::zeros(9, -4), 0.0}, a, f) == 0.0);
}

TEST_CASE("unitary_exponential matches the matrix exponential") {
  auto a = CouplingMatrix::random(6, 2, 1.0, 9);
  for (double t : {0.001, 0.3, 2.0}) {
    CMat u = unitary_exponential(a.dense(), t);
    CHECK((u - expm_i(a.dense(), t)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((u.adjoint() * u - CMat::Identity(13, 13)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("plan_steps") {
  auto p = plan_steps(1.0, 1e-3);
  CHECK(p.steps == 1000);
  CHECK(p.dt * p.steps == doctest::Approx(1.0).epsilon(1e-15));
  auto q = plan_steps(1.0, 0.3);
  CHECK(q.steps == 4);
  CHECK(q.dt == doctest::Approx(0.25));
}

TEST_CASE("split-step flow: exact special cases") {
  auto f = Nonlinearity::power(1.0);
  auto st = initial_state("random", 10, 1.0, 3, 3.0);
  SUBCASE("A = 0 matches the explicit phase rotation") {
    for (double dt : {1e-3, 0.05, 0.4}) {
      auto out = split_step_flow(st, CouplingMatrix::zero(10), f, 1.0, dt);
      CHECK((out.u.entries() - explicit_phase_solution(st, f, 1.0).entries()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(out.time == doctest::Approx(1.0));
    }
    for (int k = 0; k < 21; ++k) {
      cplx u = st.u.entries()(k);
      CHECK(std::abs(explicit_phase_solution(st, f, 0.7).entries()(k) - std::polar(1.0, 0.7 * std::norm(u)) * u) < 1e-15);
    }
  }
  SUBCASE("f ≡ 0 matches e^{itA}u") {
    auto a = CouplingMatrix::nearest_neighbor(10);
    auto out = split_step_flow(st, a, Nonlinearity::zero(), 1.0, 1e-2);
    CHECK((out.u.entries() - expm_i(a.dense(), 1.0) * st.u.entries()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("split-step flow: conservation and second order") {
  auto a = CouplingMatrix::nearest_neighbor(32);
  auto f = Nonlinearity::power(1.0);
  auto st = initial_state("sech", 32, 0.8);
  auto drift = [&](double dt, double& norm_drift) {
    auto tr = split_step_trajectory(st, a, f, 1.0, dt);
    const double n0 = st.u.entries().norm(), h0 = hamiltonian(st, a, f);
    double hd = 0.0;
    norm_drift = 0.0;
    for (const auto& s : tr.states) {
      norm_drift = std::max(norm_drift, std::abs(s.u.entries().norm() - n0));
      hd = std::max(hd, std::abs(hamiltonian(s, a, f) - h0));
    }
    return hd;
  };
  double nd1, nd2;
  double h1 = drift(1e-3, nd1), h2 = drift(5e-4, nd2);
  CHECK(nd1 <= 1e-12);
  CHECK(nd2 <= 1e-12);
  CHECK(h1 / h2 >= 3.5);
  CHECK(h1 / h2 <= 4.5);

  auto ser = split_step_flow(st, a, f, 0.2, 1e-3, Exec::serial);
  auto par = split_step_flow(st, a, f, 0.2, 1e-3, Exec::parallel);
  CHECK((ser.u.entries() - par.u.entries()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("variational flow") {
  auto a = CouplingMatrix::nearest_neighbor(8);
  auto f = Nonlinearity::power(1.0);
  auto v0 = initial_state("random", 8, 1.0, 21).u;
  SUBCASE("zero background is the unitary linear flow") {
    auto tr = split_step_trajectory(LatticeState{ComplexSeq::zeros(17, -8), 0.0}, a, f, 0.5, 1e-3);
    for (auto scheme : {VariationalScheme::midpoint, VariationalScheme::strang_tangent}) {
      auto v = variational_flow(tr, v0, a, f, scheme);
      CHECK((v.entries() - expm_i(a.dense(), 0.5) * v0.entries()).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(v.entries().norm() == doctest::Approx(v0.entries().norm()).epsilon(1e-12));
    }
  }
  SUBCASE("finite differences of the flow") {
    auto u0 = initial_state("random", 8, 0.9, 5, 2.0);
    const double t = 0.5, dt = 1e-3, h = 1e-6;
    auto tr = split_step_trajectory(u0, a, f, t, dt);
    auto shift = [&](double sgn) {
      LatticeState s{ComplexSeq(u0.u.entries() + sgn * h * v0.entries(), -8), 0.0};
      return split_step_flow(s, a, f, t, dt).u.entries();
    };
    CVec fd = (shift(1.0) - shift(-1.0)) / (2 * h);
    auto exact = variational_flow(tr, v0, a, f, VariationalScheme::strang_tangent);
    CHECK((exact.entries() - fd).norm() / fd.norm() < 1e-7);
    auto mid = variational_flow(tr, v0, a, f);
    CHECK((mid.entries() - fd).norm() / fd.norm() < 1e-4);
  }
}

TEST_CASE("gronwall constants") {
  auto c = gronwall_constants(CouplingMatrix::nearest_neighbor(5), Nonlinearity::zero(), 1.0, 0.0);
  CHECK(c.c1 == 2.0);
  CHECK(c.c2 == 2.0);
  CHECK(c.c3 == 8.0);
  auto z = gronwall_constants(CouplingMatrix::zero(5), Nonlinearity::zero(), 1.0, 1.0);
  CHECK(z.c3 == 0.0);
  auto s1 = gronwall_constants(CouplingMatrix::nearest_neighbor(5), Nonlinearity::power(1.0), 1.0, 1.0);
  CHECK(s1.c1 == doctest::Approx(6.0));
  CHECK(s1.c2 == doctest::Approx(6.0 * std::sqrt(2.5)));
  CHECK(s1.c3 == doctest::Approx(4.0 * s1.c2));
  CHECK_THROWS_AS(gronwall_constants(CouplingMatrix::zero(1), Nonlinearity::zero(), -1.0, 0.0), ContractViolation);
}

TEST_CASE("gronwall bound on seeded trajectories") {
  auto a = CouplingMatrix::nearest_neighbor(10);
  auto f = Nonlinearity::power(1.0);
  auto w = ScaleWeights::make(21, -10);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto u0 = initial_state("random", 10, 1.0, seed, 3.0);
    auto tr = split_step_trajectory(u0, a, f, 1.0, 1e-3);
    auto v0 = initial_state("random", 10, 1.0, seed + 77, 3.0).u;
    auto v = variational_flow(tr, v0, a, f);
    const double m = max_abs(tr);
    for (double s : {0.0, 1.0}) {
      auto g = gronwall_constants(a, f, m, s);
      CHECK(scale_norm(v, w, s) <= std::exp(g.c3 * 1.0 / 2) * scale_norm(v0, w, s));
    }
  }
  // C3 = 0: decoupled, phase-free flow keeps ‖v‖ fixed exactly
  auto z = CouplingMatrix::zero(10);
  auto tr = split_step_trajectory(initial_state("random", 10, 1.0, 1), z, Nonlinearity::zero(), 1.0, 1e-2);
  auto v0 = initial_state("random", 10, 1.0, 2).u;
  CHECK((variational_flow(tr, v0, z, Nonlinearity::zero()).entries() - v0.entries()).norm() < 1e-15);
}

TEST_CASE("flow Jacobian") {
  SUBCASE("linear unitary flow") {
    auto a = CouplingMatrix::nearest_neighbor(6);
    auto r = flow_jacobian_check(initial_state("random", 6, 0.7, 3), a, Nonlinearity::zero(), 0.5, 1e-3, 1e-5);
    CHECK(r.q_norm <= 1e-6);
    CHECK(r.symplectic_residual <= 1e-6);
    CHECK(r.pass);
    CMat unitary = expm_i(a.dense(), 0.5);
    CHECK((r.pq.P - unitary).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("cubic, N = 16") {
    auto a = CouplingMatrix::nearest_neighbor(8);
    auto r = flow_jacobian_check(initial_state("random", 8, 1.0, 4, 3.0), a, Nonlinearity::power(1.0), 0.5, 1e-3, 1e-5);
    CHECK(r.symplectic_residual <= 1e-5);
    CHECK(r.identities.max() <= 1e-5);
    CHECK(r.a_norm < 1.0);
    CHECK(r.contraction);
    CHECK(r.pass);
    CHECK(r.scale_norms.size() == 3u);
    CHECK(r.jacobian.rows() == 34);
  }
}

TEST_CASE("real_scale_norm") {
  auto w = ScaleWeights::make(3, -1);
  CHECK(real_scale_norm(RMat::Identity(6, 6), w, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(real_scale_norm(RMat::Identity(4, 4), w, 0.0), AlignmentError);
}

TEST_CASE("initial states") {
  auto s = initial_state("sech", 5, 0.8, 0, 4.0, 0.3);
  CHECK(s.u.offset() == -5);
  CHECK(std::abs(s.u.at(0) - 0.8) < 1e-15);
  CHECK(std::abs(s.u.at(2) - 0.8 / std::cosh(0.5) * std::polar(1.0, 0.6)) < 1e-15);
  auto r = initial_state("random", 5, 0.5, 9);
  CHECK(r.u.entries().norm() == doctest::Approx(0.5));
  CHECK((initial_state("random", 5, 0.5, 9).u.entries() - r.u.entries()).norm() == 0.0);
  CHECK_THROWS_AS(initial_state("gauss", 5, 0.5), ContractViolation);
}
