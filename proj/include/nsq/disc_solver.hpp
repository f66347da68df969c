#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nsq/cauchy_green.hpp"
#include "nsq/conformal.hpp"

namespace nsq {

// Z = (z, w_1, …, w_dw) ↦ A(Z), with ‖A(Z)‖ ≤ a < 1 enforced per call.
class StructureField {
 public:
  using Callback = std::function<CMat(const CVec&)>;

  StructureField(int dim_total, double bound, Callback cb);
  static StructureField zero(int dim_total);
  // A inside the closed cylinder (z ∈ closed Δ up to tol), 0 outside.
  static StructureField constant(const CMat& a, double cutoff_tol = 1e-9);

  CMat operator()(const CVec& z) const;
  int dim() const { return dim_; }
  double bound() const { return bound_; }
  bool is_zero() const { return zero_; }

 private:
  int dim_;
  double bound_;
  Callback cb_;
  bool zero_ = false;
};

struct InnerResult {
  GridField u;
  GridField v;
  int iterations = 0;
  double max_ratio = 0.0;   // largest observed step ratio
  double rate = 0.0;        // geometric mean step ratio, (last/first)^{1/(k-1)}
  double a_priori = 0.0;    // ‖U₁‖/(1 − ratio)
  double derivative_bound = 0.0;  // a‖Φ'‖/(1 − ratio)
  double norm = 0.0;        // corner-corrected ‖(u, v)‖
  std::vector<double> steps;
};

// Fixed point of (u, v) = A(Z)·(conj(S₂u) + conj(Φ'), conj(S₁v)) at the nodes.
// Step sizes are corner-corrected L² norms, with A taken at the node nearest
// each prevertex.
InnerResult inner_solve(const CauchyGreen& eng, const StructureField& a, const GridField& z,
                        const GridField& w, double tol = 1e-10, int max_iter = 500);

struct OuterOptions {
  double damping = 0.5;
  double tol = 1e-6;
  int max_iter = 200;
  double inner_tol = 1e-10;
  int inner_max_iter = 500;
  double tau_margin = 1e-8;  // |τ| must stay below 1 − margin
};

struct DiscSolution {
  std::shared_ptr<const CauchyGreen> engine;
  std::shared_ptr<const StructureField> field;
  GridField z;  // nodes × 1
  GridField w;  // nodes × d_w
  GridField u;
  GridField v;
  BoundaryTrace z_boundary;
  BoundaryTrace w_boundary;
  cplx tau;
  cplx z0;
  CVec w0;
  double area = 0.0;
  int degree = 0;
  int outer_iterations = 0;
  std::vector<double> outer_history;
  InnerResult last_inner;
  std::map<std::string, double> residuals;
  bool tau_near_boundary = false;

  int dw() const { return w.dim(); }
  // (z, w) at arbitrary points of the closed disc, one row per point.
  CMat evaluate(const std::vector<cplx>& zeta) const;
  // ∂ζ of (z, w) at the nodes.
  CMat dz_nodal() const;
};

DiscSolution outer_solve(std::shared_ptr<const CauchyGreen> eng, const StructureField& a, cplx z0,
                         const CVec& w0, const OuterOptions& opt = {});

// The conformal disc z = Φ, w ≡ w0 packaged as a DiscSolution.
DiscSolution conformal_solution(std::shared_ptr<const CauchyGreen> eng, cplx z0, const CVec& w0);

// Σ_components ∫ (|∂ζ c|² − |∂ζ̄ c|²), with the prevertex singularities of
// z_ζ, u and v integrated by the corner correction.
double area(const DiscSolution& s);
// Plain grid quadrature of Σ_c (|∂ζ c|² − |∂ζ̄ c|²) from nodal derivatives.
double area(const GridField& dz, const GridField& dzbar);

// Winding of the trace around i/3; throws if the trace is farther than tol from bΔ.
int boundary_degree(const BoundaryTrace& z_trace, double tol = 1e-2);
int boundary_degree(const DiscSolution& s, double tol = 1e-2);

struct VerifyTolerances {
  double cr = 1e-4;
  double attach = 1e-3;
  double re_w = 1e-8;
  double inclusion = 1e-3;
  double area = 5e-3;
  double interp = 1e-6;
  double outer = 1e-6;
};

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string rule = "<=";
};

struct VerifyReport {
  std::vector<Check> checks;
  bool pass() const;
  const Check& get(const std::string& name) const;
};

VerifyReport verify_solution(const DiscSolution& s, const StructureField& a, const VerifyTolerances& tol = {},
                             const std::vector<cplx>& probes = default_probes());

}  // namespace nsq
