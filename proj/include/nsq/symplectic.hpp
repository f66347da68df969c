#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsq/hilbert.hpp"

namespace nsq {

// u ↦ P·u + Q·conj(u)
struct RealLinearOp {
  CMat P;
  CMat Q;

  RealLinearOp() = default;
  RealLinearOp(CMat p, CMat q);
  static RealLinearOp identity(int n);
  int dim() const { return static_cast<int>(P.rows()); }
};

CVec apply(const RealLinearOp& f, const CVec& u);
ComplexSeq apply(const RealLinearOp& f, const ComplexSeq& u);
// (f ∘ g)
RealLinearOp compose(const RealLinearOp& f, const RealLinearOp& g);

// Real 2n×2n matrix in coordinates (Re u, Im u) and back.
RMat to_real(const RealLinearOp& f);
RealLinearOp from_real(const RMat& m);
// J = [[0, I], [-I, 0]]; ω(x, y) = xᵀ J y for the form Σ Im(conj(u)·v).
RMat real_symplectic_unit(int n);

struct SymplecticResiduals {
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
  double max() const;
};

SymplecticResiduals symplectic_residuals(const RealLinearOp& f);
bool is_symplectic(const RealLinearOp& f, double tol = 1e-8);

RealLinearOp inverse_symplectic(const RealLinearOp& f, double tol = 1e-8);

// Spectral norm of the real-linear map (as a real operator).
double real_op_norm(const RealLinearOp& f);

CMat complex_representation(const RealLinearOp& f);

RealLinearOp random_symplectic(int dim, double spread, std::uint64_t seed, int bandwidth = -1);

struct ScaleBoundRow {
  double s = 0;
  double f_norm = 0;
  double finv_norm = 0;
  double pinv_norm = 0;
  double a_norm = 0;
  bool claimed = false;  // s ≤ s1
  bool pinv_ok = true;
  bool a_ok = true;
};

struct ScaleBoundReport {
  std::vector<ScaleBoundRow> rows;
  double s1 = 0;
  double a0 = 0;          // ‖A‖₀
  double a_target = 0;    // (1 + a0)/2
  double observed_a = 0;  // max ‖A‖_s over claimed rows
  bool hypothesis_ok = false;
  bool pass = false;
  std::string message;
};

ScaleBoundReport scale_bound_report(const RealLinearOp& f, const ScaleWeights& w,
                                    const std::vector<double>& s_grid, double c, double s0);

}  // namespace nsq
