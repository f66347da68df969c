#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nsq/hilbert.hpp"
#include "nsq/symplectic.hpp"

namespace nsq {

// f with f(0) = 0; F is the primitive with F(0) = 0.
class Nonlinearity {
 public:
  using Fn = std::function<double(double)>;

  static Nonlinearity power(double p);  // f(x) = x^p
  static Nonlinearity zero();
  static Nonlinearity custom(std::string name, Fn f, Fn fprime, Fn primitive);

  double f(double x) const { return f_(x); }
  double fprime(double x) const { return fp_(x); }
  double F(double x) const { return F_(x); }
  const std::string& name() const { return name_; }
  bool is_power() const { return p_ > 0.0; }
  double exponent() const { return p_; }
  bool is_zero() const { return zero_; }
  // sup over 0 ≤ x ≤ x_max of 2|f'(x)|x + |f(x)|.
  double growth_sup(double x_max) const;

 private:
  Nonlinearity() = default;
  std::string name_;
  Fn f_, fp_, F_;
  double p_ = 0.0;
  bool zero_ = false;
};

// Hermitian banded coupling on a window of lattice sites.
class CouplingMatrix {
 public:
  CouplingMatrix(CMat a, int index_offset, double tol = 1e-12);
  // a_{n,n±1} = c on the window [−half, half].
  static CouplingMatrix nearest_neighbor(int half, double c = 1.0);
  static CouplingMatrix zero(int half);
  static CouplingMatrix random(int half, int bandwidth, double bound, std::uint64_t seed);

  const CMat& dense() const { return a_; }
  int offset() const { return off_; }
  int size() const { return static_cast<int>(a_.rows()); }
  int bandwidth() const { return m_; }
  double bound() const { return sup_; }

 private:
  CMat a_;
  int off_;
  int m_ = 0;
  double sup_ = 0.0;
};

struct LatticeState {
  ComplexSeq u;
  double time = 0.0;
};

// Window [−half, half]: "sech" is amp·sech(n/width)·e^{i·kick·n}; "random" draws a
// seeded Gaussian profile rescaled to ℓ² norm amp.
LatticeState initial_state(const std::string& kind, int half, double amp, std::uint64_t seed = 0,
                           double width = 4.0, double kick = 0.3);

// u' = i·(f(|u|²)u + A u)
ComplexSeq rhs(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f, Exec exec = Exec::parallel);

double hamiltonian(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f);

// Strang step: half phase rotation, exact linear flow e^{i·dt·A}, half phase rotation.
class SplitStepper {
 public:
  SplitStepper(const CouplingMatrix& a, const Nonlinearity& f, double dt, Exec exec = Exec::parallel);

  double dt() const { return dt_; }
  const CMat& propagator() const { return expA_; }
  CVec phase(const CVec& u, double tau) const;
  CVec linear(const CVec& u) const;
  CVec step(const CVec& u) const;

 private:
  const Nonlinearity* f_;
  double dt_;
  Exec exec_;
  CMat expA_;
};

// e^{i·t·A} for Hermitian A.
CMat unitary_exponential(const CMat& a, double t);

// Number of steps and effective step so that steps·dt_eff = t_final exactly.
struct StepPlan {
  int steps = 0;
  double dt = 0.0;
};
StepPlan plan_steps(double t_final, double dt);

LatticeState split_step_flow(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f, double t_final,
                             double dt, Exec exec = Exec::parallel);

struct Trajectory {
  std::vector<LatticeState> states;  // states[k] at time t0 + k·dt
  double dt = 0.0;
};

Trajectory split_step_trajectory(const LatticeState& st, const CouplingMatrix& a, const Nonlinearity& f,
                                 double t_final, double dt, Exec exec = Exec::parallel);

// A = 0: u_n(t) = e^{i·t·f(|u_n(0)|²)}u_n(0).
ComplexSeq explicit_phase_solution(const LatticeState& st, const Nonlinearity& f, double t);

enum class VariationalScheme {
  midpoint,       // implicit midpoint on the frozen-coefficient system
  strang_tangent  // exact derivative of the Strang step
};

// i v' + α v + β conj(v) + A v = 0 along the trajectory, with α = f'(|u|²)|u|² + f(|u|²),
// β = f'(|u|²)u², both 0 where u = 0.
ComplexSeq variational_flow(const Trajectory& traj, const ComplexSeq& v0, const CouplingMatrix& a,
                            const Nonlinearity& f, VariationalScheme scheme = VariationalScheme::midpoint);

struct GronwallConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

GronwallConstants gronwall_constants(const CouplingMatrix& a, const Nonlinearity& f, double M, double s);

struct ScaleNormRow {
  double s = 0.0;
  double norm = 0.0;
};

struct JacobianReport {
  RMat jacobian;  // real 2n×2n in (Re u, Im u)
  RealLinearOp pq;
  double symplectic_residual = 0.0;  // ‖MᵀJM − J‖
  SymplecticResiduals identities;
  double q_norm = 0.0;
  double a_norm = 0.0;  // ‖Q·conj(P)⁻¹‖
  bool contraction = false;
  std::vector<ScaleNormRow> scale_norms;
  bool pass = false;
};

// Centred finite-difference Jacobian of the time-t split-step map.
JacobianReport flow_jacobian_check(const LatticeState& u0, const CouplingMatrix& a, const Nonlinearity& f,
                                   double t, double dt, double eps, const std::vector<double>& s_grid = {-1.0, 0.0, 1.0},
                                   double residual_tol = 1e-5, Exec exec = Exec::parallel);

// ‖M‖_s for a real-linear M on the window: ‖D^s M D^{-s}‖ on (Re, Im) coordinates.
double real_scale_norm(const RMat& m, const ScaleWeights& w, double s);

}  // namespace nsq
