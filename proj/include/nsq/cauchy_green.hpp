#pragma once

#include <array>
#include <functional>
#include <string>
#include <memory>
#include <mutex>
#include <vector>

#include "nsq/disc_grid.hpp"

namespace nsq {

enum class Transform { T, T1, T2 };
enum class Derivative { S, S1, S2 };

// Angular Fourier data of a scalar field: column k holds the radial profile
// f_m(r_j) of mode m = k (k < ntheta/2) or k - ntheta, so that on ring j
// f(θ) = Σ_m f_m(r_j) e^{imθ}. ext(k) is the coefficient of ζ^{m-1} in the
// exterior expansion of Tf (nonzero only for m ≤ 0).
struct Spectrum {
  CMat modes;
  CVec ext;
};

// Product-integration weights at one radius. Column k maps the radial
// profile of mode k to its coefficient in Tf (the e^{i(m-1)θ} term).
struct RadialTable {
  double r = 0.0;
  RMat w;
  RVec ell;  // Lagrange basis at r
};

// Solid Cauchy transform Tf(ζ) = -(1/π)∫ f(t)/(t-ζ) d²t and the derived
// operators on a fixed DiscGrid. Per-ring tables are built once; the
// engine is immutable afterwards and safe to share between threads.
class CauchyGreen {
 public:
  explicit CauchyGreen(GridPtr grid, Exec exec = Exec::parallel);
  ~CauchyGreen();
  CauchyGreen(const CauchyGreen&) = delete;
  CauchyGreen& operator=(const CauchyGreen&) = delete;

  const GridPtr& grid() const { return grid_; }
  Exec exec() const { return exec_; }

  Spectrum spectrum(const CVec& nodal) const;
  const RadialTable& ring_table(int j) const { return rings_[j]; }
  const RadialTable& boundary_table() const { return edge_; }
  RadialTable table_at(double r) const;

  // Values at the grid nodes, componentwise for vector fields.
  CMat nodal(Transform op, const CMat& f) const;
  CMat nodal(Derivative op, const CMat& f) const;
  GridField nodal(Transform op, const GridField& f) const;
  GridField nodal(Derivative op, const GridField& f) const;

  // Values at arbitrary targets (rows) per component (columns). T and S
  // accept any ζ; the symmetrized operators need |ζ| ≤ 1.
  CMat evaluate(Transform op, const GridField& f, const std::vector<cplx>& targets) const;
  CMat evaluate(Derivative op, const GridField& f, const std::vector<cplx>& targets) const;
  // Trigonometric/Lagrange interpolant of the nodal data.
  CMat interpolate(const GridField& f, const std::vector<cplx>& targets) const;

  // Trace on |ζ| = 1 at the grid angles.
  BoundaryTrace boundary(Transform op, const GridField& f) const;

  // Exact-minus-grid integral of |ρ|²·bump near each prevertex.
  const std::array<double, 3>& corner_weights() const;
  // Σ w|v|² + Σ_c E_c |Y_c|² where v ≈ Y_c·ρ near prevertex c.
  double corrected_norm2(const CVec& nodal_values, const std::array<cplx, 3>& limits) const;
  // Y_c for S₂f.
  std::array<cplx, 3> s2_corner_limits(const CVec& f) const;
  // Corner-corrected ‖S₂f‖ (L² over the disc).
  double s2_norm(const CVec& f) const;

  const CVec& R_nodes() const { return r_nodes_; }
  const CVec& Rp_nodes() const { return rp_nodes_; }

 private:
  enum class Op { T, T1, T2, S, S1, S2 };
  static Op op_of(Transform t);
  static Op op_of(Derivative d);

  CVec nodal_scalar(Op op, const CVec& f) const;
  CMat nodal_matrix(Op op, const CMat& f) const;
  CMat evaluate_op(Op op, const GridField& f, const std::vector<cplx>& targets) const;

  GridPtr grid_;
  Exec exec_;
  std::vector<RadialTable> rings_;
  RadialTable edge_;
  CVec r_nodes_, rp_nodes_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
  mutable std::once_flag corner_once_;
  mutable std::array<double, 3> corner_w_{};
};

// Free-function spellings of the engine operations.
CMat cauchy_T(const CauchyGreen& eng, const GridField& f, const std::vector<cplx>& targets);
CMat op_T1(const CauchyGreen& eng, const GridField& f, const std::vector<cplx>& targets);
CMat op_T2(const CauchyGreen& eng, const GridField& f, const std::vector<cplx>& targets);
CMat beurling_S(const CauchyGreen& eng, const GridField& f, Derivative variant,
                const std::vector<cplx>& targets);

// Interior probe set at radii 0.2 … 0.8, off the grid angles.
std::vector<cplx> default_probes();

// max over probes and components of |∂̄(op f) - f|, ∂̄ by centred finite
// differences (polar stencil, step h). Without `exact`, f at a probe means
// the grid interpolant.
double dbar_residual(const CauchyGreen& eng, const GridField& f, Transform op,
                     const std::function<void(cplx, cplx*)>& exact = {},
                     const std::vector<cplx>& probes = default_probes(), double h = 1e-5);

// Centred-difference ∂̄ and ∂ of op f at points (rows × components each).
struct FdDerivatives {
  CMat dbar;
  CMat dz;
};
FdDerivatives fd_derivatives(const CauchyGreen& eng, Transform op, const GridField& f,
                             const std::vector<cplx>& points, double h = 1e-5);

// max over samples and components of |Re v|.
double re_boundary_residual(const BoundaryTrace& t);
// Per arc, max of |Im((1+i)v)| on γ₁, |Im((1−i)v)| on γ₂, |Im v| on γ₃.
std::array<double, 3> arc_residuals(const BoundaryTrace& t);

std::string to_string(Transform t);
std::string to_string(Derivative d);

}  // namespace nsq
