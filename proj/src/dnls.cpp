#include "nsq/dnls.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "nsq/parallel.hpp"

namespace nsq {

Nonlinearity Nonlinearity::power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ContractViolation("Nonlinearity::power: exponent must be positive");
  Nonlinearity n;
  n.name_ = "power";
  n.p_ = p;
  n.f_ = [p](double x) { return std::pow(x, p); };
  n.fp_ = [p](double x) { return p * std::pow(x, p - 1.0); };
  n.F_ = [p](double x) { return std::pow(x, p + 1.0) / (p + 1.0); };
  return n;
}

Nonlinearity Nonlinearity::zero() {
  Nonlinearity n;
  n.name_ = "zero";
  n.zero_ = true;
  n.f_ = n.fp_ = n.F_ = [](double) { return 0.0; };
  return n;
}

Nonlinearity Nonlinearity::custom(std::string name, Fn f, Fn fprime, Fn primitive) {
  if (!f || !fprime || !primitive) throw ContractViolation("Nonlinearity::custom: f, f' and F are all required");
  if (f(0.0) != 0.0 || primitive(0.0) != 0.0) throw ContractViolation("Nonlinearity::custom: need f(0) = F(0) = 0");
  Nonlinearity n;
  n.name_ = std::move(name);
  n.f_ = std::move(f);
  n.fp_ = std::move(fprime);
  n.F_ = std::move(primitive);
  return n;
}

double Nonlinearity::growth_sup(double x_max) const {
  if (zero_) return 0.0;
  if (is_power()) return (2.0 * p_ + 1.0) * std::pow(x_max, p_);
  double best = 0.0;
  const int samples = 2048;
  for (int i = 0; i <= samples; ++i) {
    double x = x_max * i / samples;
    best = std::max(best, 2.0 * std::abs(fprime(x)) * x + std::abs(f(x)));
  }
  return best;
}

CouplingMatrix::CouplingMatrix(CMat a, int index_offset, double tol) : a_(std::move(a)), off_(index_offset) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) throw AlignmentError("CouplingMatrix: matrix must be square");
  if (!a_.allFinite()) throw ContractViolation("CouplingMatrix: non-finite entries");
  if ((a_ - a_.adjoint()).cwiseAbs().maxCoeff() > tol) throw ContractViolation("CouplingMatrix: not Hermitian");
  a_ = (0.5 * (a_ + a_.adjoint())).eval();
  for (int i = 0; i < a_.rows(); ++i)
    for (int j = 0; j < a_.cols(); ++j) {
      double v = std::abs(a_(i, j));
      if (v > tol) m_ = std::max(m_, std::abs(i - j));
      sup_ = std::max(sup_, v);
    }
}

CouplingMatrix CouplingMatrix::nearest_neighbor(int half, double c) {
  const int n = 2 * half + 1;
  CMat a = CMat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = c;
  return CouplingMatrix(a, -half);
}

CouplingMatrix CouplingMatrix::zero(int half) {
  return CouplingMatrix(CMat::Zero(2 * half + 1, 2 * half + 1), -half);
}

CouplingMatrix CouplingMatrix::random(int half, int bandwidth, double bound, std::uint64_t seed) {
  const int n = 2 * half + 1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.0, bound), ang(0.0, 2.0 * kPi);
  CMat a = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n && j <= i + bandwidth; ++j) {
      double r = mag(rng), phi = ang(rng);
      a(i, j) = i == j ? cplx(r, 0.0) : std::polar(r, phi);
      a(j, i) = std::conj(a(i, j));
    }
  return CouplingMatrix(a, -half);
}

LatticeState initial_state(const std::string& kind, int half, double amp, std::uint64_t seed, double width,
                           double kick) {
  if (half < 0) throw ContractViolation("initial_state: half-window must be ≥ 0");
  const int n = 2 * half + 1;
  CVec u(n);
  if (kind == "sech") {
    for (int k = 0; k < n; ++k) {
      double x = k - half;
      u(k) = amp / std::cosh(x / width) * std::polar(1.0, kick * x);
    }
  } else if (kind == "random") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
      double x = k - half;
      double env = std::exp(-0.5 * (x / width) * (x / width));
      u(k) = env * cplx(g(rng), g(rng));
    }
    double nrm = u.norm();
    if (nrm > 0.0) u *= amp / nrm;
  } else {
    throw ContractViolation("initial_state: unknown kind '" + kind + "'");
  }
  return {ComplexSeq(u, -half), 0.0};
}

namespace {

void check_window(const ComplexSeq& u, const CouplingMatrix& a, const char* who) {
  if (u.offset() != a.offset() || u.size() != a.size())
    throw AlignmentError(std::string(who) + ": state and coupling windows differ");
}

// α_n, β_n of the linearized equation.
void variational_coefficients(const CVec& u, const Nonlinearity& f, RVec& alpha, CVec& beta) {
  const int n = static_cast<int>(u.size());
  alpha.resize(n);
  beta.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = std::norm(u(k));
    if (x == 0.0) {
      alpha(k) = 0.0;
      beta(k) = 0.0;
      continue;
    }
    double fp = f.fprime(x);
    alpha(k) = fp * x + f.f(x);
    beta(k) = fp * u(k) * u(k);
  }
}

}  // namespace

ComplexSeq rhs(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f, Exec exec) {
  check_window(st.u, a, "rhs");
  const CVec& u = st.u.entries();
  const CMat& A = a.dense();
  const int n = st.u.size(), m = a.bandwidth();
  CVec out(n);
  for_each_index(exec, n, [&](int i) {
    cplx s = f.f(std::norm(u(i))) * u(i);
    for (int k = std::max(0, i - m); k <= std::min(n - 1, i + m); ++k) s += A(i, k) * u(k);
    out(i) = kI * s;
  });
  return ComplexSeq(out, st.u.offset());
}

double hamiltonian(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f) {
  check_window(st.u, a, "hamiltonian");
  const CVec& u = st.u.entries();
  double h = 0.0;
  for (int i = 0; i < u.size(); ++i) h += f.F(std::norm(u(i)));
  return h + u.dot(a.dense() * u).real();
}

CMat unitary_exponential(const CMat& a, double t) {
  // Extended precision keeps the rounded propagator unitary to the last bit,
  // so the ℓ² norm does not drift systematically over many steps.
  using Cl = std::complex<long double>;
  using CMatL = Eigen::Matrix<Cl, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::SelfAdjointEigenSolver<CMatL> es(a.cast<Cl>());
  if (es.info() != Eigen::Success) throw ContractViolation("unitary_exponential: eigensolver failed");
  Eigen::Matrix<Cl, Eigen::Dynamic, 1> ph(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    long double th = static_cast<long double>(t) * es.eigenvalues()(i);
    ph(i) = Cl(std::cos(th), std::sin(th));
  }
  CMatL e = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  return e.cast<cplx>();
}

SplitStepper::SplitStepper(const CouplingMatrix& a, const Nonlinearity& f, double dt, Exec exec)
    : f_(&f), dt_(dt), exec_(exec) {
  if (!(dt > 0.0)) throw ContractViolation("SplitStepper: dt must be positive");
  expA_ = a.bound() == 0.0 ? CMat::Identity(a.size(), a.size()).eval() : unitary_exponential(a.dense(), dt);
}

CVec SplitStepper::phase(const CVec& u, double tau) const {
  if (f_->is_zero()) return u;
  CVec out(u.size());
  for_each_index(exec_, static_cast<int>(u.size()),
                 [&](int k) { out(k) = std::polar(1.0, tau * f_->f(std::norm(u(k)))) * u(k); });
  return out;
}

CVec SplitStepper::linear(const CVec& u) const {
  const int n = static_cast<int>(u.size());
  CVec out(n);
  for_each_index(exec_, n, [&](int i) { out(i) = (expA_.row(i) * u)(0); });
  return out;
}

CVec SplitStepper::step(const CVec& u) const {
  return phase(linear(phase(u, 0.5 * dt_)), 0.5 * dt_);
}

StepPlan plan_steps(double t_final, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("split_step_flow: dt must be positive");
  if (!(t_final >= 0.0)) throw ContractViolation("split_step_flow: t_final must be ≥ 0");
  int steps = static_cast<int>(std::ceil(t_final / dt - 1e-9));
  if (steps == 0) return {0, dt};
  return {steps, t_final / steps};
}

LatticeState split_step_flow(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f, double t_final,
                             double dt, Exec exec) {
  check_window(st.u, a, "split_step_flow");
  auto plan = plan_steps(t_final, dt);
  if (plan.steps == 0) return st;
  SplitStepper stepper(a, f, plan.dt, exec);
  CVec u = st.u.entries();
  for (int k = 0; k < plan.steps; ++k) u = stepper.step(u);
  return {ComplexSeq(u, st.u.offset()), st.time + t_final};
}

Trajectory split_step_trajectory(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f,
                                 double t_final, double dt, Exec exec) {
  check_window(st.u, a, "split_step_trajectory");
  auto plan = plan_steps(t_final, dt);
  Trajectory tr;
  tr.dt = plan.dt;
  tr.states.reserve(plan.steps + 1);
  tr.states.push_back(st);
  if (plan.steps == 0) return tr;
  SplitStepper stepper(a, f, plan.dt, exec);
  CVec u = st.u.entries();
  for (int k = 1; k <= plan.steps; ++k) {
    u = stepper.step(u);
    double t = k == plan.steps ? st.time + t_final : st.time + k * plan.dt;
    tr.states.push_back({ComplexSeq(u, st.u.offset()), t});
  }
  return tr;
}

ComplexSeq explicit_phase_solution(const LatticeState& st, const Nonlinearity& f, double t) {
  CVec u = st.u.entries();
  for (int k = 0; k < u.size(); ++k) u(k) *= std::polar(1.0, t * f.f(std::norm(u(k))));
  return ComplexSeq(u, st.u.offset());
}

namespace {

// d/du of u ↦ e^{iτf(|u|²)}u applied to δ.
CVec phase_tangent(const CVec& u, const CVec& d, double tau, const Nonlinearity& f) {
  CVec out(u.size());
  for (int k = 0; k < u.size(); ++k) {
    double x = std::norm(u(k));
    cplx rot = std::polar(1.0, tau * f.f(x));
    double dx = 2.0 * (std::conj(u(k)) * d(k)).real();
    double fp = x == 0.0 ? 0.0 : f.fprime(x);
    out(k) = rot * (d(k) + kI * tau * fp * dx * u(k));
  }
  return out;
}

}  // namespace

ComplexSeq variational_flow(const Trajectory& traj, const ComplexSeq& v0, const CouplingMatrix& a,
                            const Nonlinearity& f, VariationalScheme scheme) {
  if (traj.states.empty()) throw ContractViolation("variational_flow: empty trajectory");
  check_window(v0, a, "variational_flow");
  check_window(traj.states.front().u, a, "variational_flow");
  const int n = v0.size();
  const double h = traj.dt;
  CVec v = v0.entries();
  if (traj.states.size() == 1) return v0;

  if (scheme == VariationalScheme::strang_tangent) {
    SplitStepper stepper(a, f, h, Exec::serial);
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
      const CVec& u = traj.states[k].u.entries();
      CVec p1 = stepper.phase(u, 0.5 * h);
      CVec q = stepper.linear(p1);
      v = phase_tangent(u, v, 0.5 * h, f);
      v = stepper.propagator() * v;
      v = phase_tangent(q, v, 0.5 * h, f);
    }
    return ComplexSeq(v, v0.offset());
  }

  // v' = L v with L v = i(αv + βconj(v) + Av); Cayley step per interval.
  RVec alpha;
  CVec beta;
  const RMat I = RMat::Identity(2 * n, 2 * n);
  RVec x(2 * n);
  x << v.real(), v.imag();
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    CVec um = 0.5 * (traj.states[k].u.entries() + traj.states[k + 1].u.entries());
    variational_coefficients(um, f, alpha, beta);
    CMat P = kI * (a.dense() + CMat(alpha.cast<cplx>().asDiagonal()));
    CMat Q = kI * CMat(beta.asDiagonal());
    RMat L = to_real(RealLinearOp(P, Q));
    RVec rhs_v = x + 0.5 * h * (L * x);
    x = (I - 0.5 * h * L).partialPivLu().solve(rhs_v);
  }
  CVec out(n);
  for (int k = 0; k < n; ++k) out(k) = cplx(x(k), x(n + k));
  return ComplexSeq(out, v0.offset());
}

GronwallConstants gronwall_constants(const CouplingMatrix& a, const Nonlinearity& f, double M, double s) {
  if (!(M >= 0.0)) throw ContractViolation("gronwall_constants: M must be ≥ 0");
  GronwallConstants c;
  c.c1 = 2.0 * std::max(f.growth_sup(M * M), a.bound());
  c.c2 = c.c1 * std::pow(2.5, std::abs(s) * a.bandwidth() / 2.0);
  c.c3 = (2.0 * a.bandwidth() + 2.0) * c.c2;
  return c;
}

double real_scale_norm(const RMat& m, const ScaleWeights& w, double s) {
  const int n = w.size();
  if (m.rows() != 2 * n || m.cols() != 2 * n) throw AlignmentError("real_scale_norm: size mismatch");
  RVec d = w.power(s);
  RVec dd(2 * n);
  dd << d, d;
  RMat c = dd.asDiagonal() * m * dd.cwiseInverse().asDiagonal();
  return Eigen::JacobiSVD<RMat>(c).singularValues()(0);
}

JacobianReport flow_jacobian_check(const LatticeState& u0, const CouplingMatrix& a, const Nonlinearity& f, double t,
                                   double dt, double eps, const std::vector<double>& s_grid, double residual_tol,
                                   Exec exec) {
  check_window(u0.u, a, "flow_jacobian_check");
  if (!(eps > 0.0)) throw ContractViolation("flow_jacobian_check: eps must be positive");
  const int n = u0.u.size();
  auto plan = plan_steps(t, dt);
  SplitStepper stepper(a, f, plan.dt, Exec::serial);
  auto flow = [&](const CVec& u) {
    CVec x = u;
    for (int k = 0; k < plan.steps; ++k) x = stepper.step(x);
    return x;
  };
  JacobianReport rep;
  rep.jacobian.resize(2 * n, 2 * n);
  const CVec base = u0.u.entries();
  for_each_index(exec, 2 * n, [&](int j) {
    CVec d = CVec::Zero(n);
    d(j % n) = j < n ? cplx(eps, 0.0) : cplx(0.0, eps);
    CVec diff = (flow(base + d) - flow(base - d)) / (2.0 * eps);
    rep.jacobian.col(j).head(n) = diff.real();
    rep.jacobian.col(j).tail(n) = diff.imag();
  });
  const RMat J = real_symplectic_unit(n);
  RMat defect = rep.jacobian.transpose() * J * rep.jacobian - J;
  rep.symplectic_residual = Eigen::JacobiSVD<RMat>(defect).singularValues()(0);
  rep.pq = from_real(rep.jacobian);
  rep.identities = symplectic_residuals(rep.pq);
  rep.q_norm = Eigen::JacobiSVD<CMat>(rep.pq.Q).singularValues()(0);
  rep.a_norm = Eigen::JacobiSVD<CMat>(complex_representation(rep.pq)).singularValues()(0);
  rep.contraction = rep.a_norm < 1.0;
  auto w = ScaleWeights::aligned(u0.u);
  for (double s : s_grid) rep.scale_norms.push_back({s, real_scale_norm(rep.jacobian, w, s)});
  rep.pass = rep.symplectic_residual <= residual_tol && rep.contraction;
  return rep;
}

}  // namespace nsq
