#include "nsq/disc_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "nsq/branch.hpp"
#include "nsq/parallel.hpp"

namespace nsq {

namespace {

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMat>(m).singularValues()(0);
}

double grid_norm(const DiscGrid& g, const CMat& v) {
  const int nt = g.ntheta();
  double s = 0.0;
  for (int i = 0; i < v.rows(); ++i) s += g.weight(i / nt) * v.row(i).squaredNorm();
  return std::sqrt(s);
}

struct ConformalNodes {
  CVec phi, dphi;
};

ConformalNodes conformal_nodes(const CauchyGreen& eng) {
  const auto& g = *eng.grid();
  const auto& sc = SchwarzChristoffel::instance();
  ConformalNodes c{CVec(g.size()), CVec(g.size())};
  for_each_index(eng.exec(), g.size(), [&](int i) {
    c.phi(i) = sc.map(g.node(i));
    c.dphi(i) = sc.derivative(g.node(i));
  });
  return c;
}

std::vector<CMat> field_at_nodes(const CauchyGreen& eng, const StructureField& a, const CMat& zw) {
  std::vector<CMat> out(zw.rows());
  for_each_index(eng.exec(), static_cast<int>(zw.rows()),
                 [&](int i) { out[i] = a(zw.row(i).transpose()); });
  return out;
}

int nearest_node(const DiscGrid& g, cplx c) {
  int best = 0;
  for (int i = 1; i < g.size(); ++i)
    if (std::abs(g.node(i) - c) < std::abs(g.node(best) - c)) best = i;
  return best;
}

InnerResult inner_iterate(const CauchyGreen& eng, const std::vector<CMat>& an, const CVec& dphi, int dw,
                          double bound, double tol, int max_iter) {
  const auto& grid = eng.grid();
  const int n = grid->size(), d = 1 + dw;
  const auto& pv = prevertices();
  const auto& ew = eng.corner_weights();
  const cplx cp = SchwarzChristoffel::instance().constant();
  // Near prevertex c the z-entry of the right side is conj(Y_c ρ) and the new
  // iterate carries A(Z(c)) times it; col2[c] = |A(Z(c)) e₀|² at the closest node.
  std::array<double, 3> col2{};
  for (int c = 0; c < 3; ++c) col2[c] = an[nearest_node(*grid, pv[c].point)].col(0).squaredNorm();
  auto corrected = [&](const CMat& v, const std::array<cplx, 3>& y) {
    const int nt = grid->ntheta();
    double s = 0.0;
    for (int i = 0; i < v.rows(); ++i) s += grid->weight(i / nt) * v.row(i).squaredNorm();
    for (int c = 0; c < 3; ++c) s += ew[c] * std::norm(y[c]) * col2[c];
    return std::sqrt(std::max(0.0, s));
  };

  CMat u = CMat::Zero(n, d);
  const CVec conj_phi = dphi.conjugate();
  std::array<cplx, 3> y_prev{}, y_now{};
  InnerResult res;
  for (int it = 1; it <= max_iter; ++it) {
    CVec s2u = eng.nodal(Derivative::S2, CMat(u.col(0))).col(0);
    CMat s1v = dw > 0 ? eng.nodal(Derivative::S1, CMat(u.rightCols(dw))) : CMat(n, 0);
    auto lim = eng.s2_corner_limits(u.col(0));
    for (int c = 0; c < 3; ++c) y_now[c] = cp + lim[c];
    CMat next(n, d);
    for_each_index(eng.exec(), n, [&](int i) {
      CVec x(d);
      x(0) = std::conj(s2u(i)) + conj_phi(i);
      for (int j = 0; j < dw; ++j) x(1 + j) = std::conj(s1v(i, j));
      next.row(i) = (an[i] * x).transpose();
    });
    std::array<cplx, 3> dy;
    for (int c = 0; c < 3; ++c) dy[c] = y_now[c] - y_prev[c];
    double step = corrected(next - u, dy);
    u = std::move(next);
    y_prev = y_now;
    res.steps.push_back(step);
    res.iterations = it;
    if (res.steps.size() >= 2 && res.steps[res.steps.size() - 2] > 0.0)
      res.max_ratio = std::max(res.max_ratio, step / res.steps[res.steps.size() - 2]);
    if (step <= tol) break;
    if (it == max_iter)
      throw ConvergenceError("inner_solve: no convergence in " + std::to_string(max_iter) +
                                 " iterations, observed ratio " + std::to_string(res.max_ratio),
                             res.steps);
  }
  res.u = GridField(grid, u.col(0));
  res.v = dw > 0 ? GridField(grid, u.rightCols(dw)) : GridField(grid, CMat::Zero(n, 1));
  res.norm = corrected(u, y_now);
  if (res.steps.size() >= 2 && res.steps.front() > 0.0 && res.steps.back() > 0.0)
    res.rate = std::pow(res.steps.back() / res.steps.front(), 1.0 / (res.steps.size() - 1.0));
  const double denom = std::max(1e-300, 1.0 - res.max_ratio);
  res.a_priori = res.steps.front() / denom;
  double phi2 = std::pow(grid_norm(*grid, dphi), 2);
  for (int c = 0; c < 3; ++c) phi2 += ew[c] * std::norm(cp);
  res.derivative_bound = bound * std::sqrt(phi2) / denom;
  return res;
}

CMat zw_matrix(const GridField& z, const GridField& w) {
  CMat m(z.size(), 1 + w.dim());
  m.col(0) = z.values().col(0);
  m.rightCols(w.dim()) = w.values();
  return m;
}

}  // namespace

StructureField::StructureField(int dim_total, double bound, Callback cb)
    : dim_(dim_total), bound_(bound), cb_(std::move(cb)) {
  if (dim_total < 1) throw ContractViolation("StructureField: dimension must be ≥ 1");
  if (!(bound >= 0.0 && bound < 1.0)) throw ContractViolation("StructureField: bound must lie in [0, 1)");
  if (!cb_) throw ContractViolation("StructureField: empty callback");
}

StructureField StructureField::zero(int dim_total) {
  StructureField f(dim_total, 0.0, [dim_total](const CVec&) { return CMat::Zero(dim_total, dim_total).eval(); });
  f.zero_ = true;
  return f;
}

StructureField StructureField::constant(const CMat& a, double cutoff_tol) {
  if (a.rows() != a.cols()) throw AlignmentError("StructureField::constant: matrix must be square");
  const double norm = spectral_norm(a);
  if (norm >= 1.0) throw ContractViolation("StructureField::constant: ‖A‖ must be < 1");
  CMat zero = CMat::Zero(a.rows(), a.cols());
  StructureField f(static_cast<int>(a.rows()), norm, [a, zero, cutoff_tol](const CVec& z) {
    return TriangleDomain::contains(z(0), cutoff_tol) ? a : zero;
  });
  f.zero_ = norm == 0.0;
  return f;
}

CMat StructureField::operator()(const CVec& z) const {
  if (z.size() != dim_) throw AlignmentError("StructureField: point has the wrong dimension");
  CMat a = cb_(z);
  if (a.rows() != dim_ || a.cols() != dim_) throw AlignmentError("StructureField: callback returned wrong shape");
  if (!a.allFinite()) throw ContractViolation("StructureField: non-finite matrix");
  double n = spectral_norm(a);
  if (n > bound_ + 1e-12)
    throw ContractViolation("StructureField: ‖A(Z)‖ = " + std::to_string(n) + " exceeds the bound " +
                            std::to_string(bound_));
  return a;
}

InnerResult inner_solve(const CauchyGreen& eng, const StructureField& a, const GridField& z, const GridField& w,
                        double tol, int max_iter) {
  if (a.dim() != 1 + w.dim()) throw AlignmentError("inner_solve: field dimension must be 1 + d_w");
  auto cn = conformal_nodes(eng);
  auto an = field_at_nodes(eng, a, zw_matrix(z, w));
  return inner_iterate(eng, an, cn.dphi, w.dim(), a.bound(), tol, max_iter);
}

CMat DiscSolution::evaluate(const std::vector<cplx>& zeta) const {
  const auto& sc = SchwarzChristoffel::instance();
  CMat t2 = engine->evaluate(Transform::T2, u, zeta);
  CMat t1 = engine->evaluate(Transform::T1, v, zeta);
  CMat t1tau = engine->evaluate(Transform::T1, v, {tau});
  CMat out(static_cast<int>(zeta.size()), 1 + dw());
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    out(i, 0) = t2(i, 0) + sc.map(zeta[i]);
    for (int j = 0; j < dw(); ++j) out(i, 1 + j) = t1(i, j) - t1tau(0, j) + w0(j);
  }
  return out;
}

CMat DiscSolution::dz_nodal() const {
  CMat out(z.size(), 1 + dw());
  auto cn = conformal_nodes(*engine);
  out.col(0) = engine->nodal(Derivative::S2, u.values()).col(0) + cn.dphi;
  out.rightCols(dw()) = engine->nodal(Derivative::S1, v.values());
  return out;
}

namespace {

void finish(DiscSolution& s) {
  const auto& eng = *s.engine;
  const auto& sc = SchwarzChristoffel::instance();
  auto bz = eng.boundary(Transform::T2, s.u);
  auto bw = eng.boundary(Transform::T1, s.v);
  CMat t1tau = eng.evaluate(Transform::T1, s.v, {s.tau});
  CMat zb = bz.values(), wb = bw.values();
  for (int k = 0; k < bz.size(); ++k) {
    zb(k, 0) += sc.map(std::polar(1.0, bz.angles()[k]));
    for (int j = 0; j < s.dw(); ++j) wb(k, j) += s.w0(j) - t1tau(0, j);
  }
  s.z_boundary = BoundaryTrace(bz.angles(), zb);
  s.w_boundary = BoundaryTrace(bw.angles(), wb);
  s.area = area(s);
  try {
    s.degree = boundary_degree(s);
  } catch (const DegreeUndefined&) {
    s.degree = 0;
  }
  s.tau_near_boundary = std::abs(s.tau) >= 1.0 - 1e-8;
}

}  // namespace

DiscSolution conformal_solution(std::shared_ptr<const CauchyGreen> eng, cplx z0, const CVec& w0) {
  if (!TriangleDomain::interior(z0)) throw ContractViolation("conformal_solution: z0 must lie inside the triangle");
  const auto& grid = eng->grid();
  auto cn = conformal_nodes(*eng);
  DiscSolution s;
  s.engine = eng;
  s.field = std::make_shared<StructureField>(StructureField::zero(1 + static_cast<int>(w0.size())));
  s.z = GridField(grid, cn.phi);
  s.w = GridField(grid, w0.transpose().replicate(grid->size(), 1));
  s.u = GridField::zeros(grid, 1);
  s.v = GridField::zeros(grid, static_cast<int>(w0.size()));
  s.z0 = z0;
  s.w0 = w0;
  s.tau = sc_inverse(z0);
  finish(s);
  return s;
}

DiscSolution outer_solve(std::shared_ptr<const CauchyGreen> eng, const StructureField& a, cplx z0, const CVec& w0,
                         const OuterOptions& opt) {
  if (!TriangleDomain::interior(z0)) throw ContractViolation("outer_solve: z0 must lie inside the triangle");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ContractViolation("outer_solve: damping must lie in (0, 1]");
  const int dw = static_cast<int>(w0.size());
  if (dw < 1) throw ContractViolation("outer_solve: d_w must be ≥ 1");
  if (a.dim() != 1 + dw) throw AlignmentError("outer_solve: field dimension must be 1 + d_w");
  const auto& grid = eng->grid();
  const int n = grid->size();
  auto cn = conformal_nodes(*eng);

  CMat zw(n, 1 + dw);
  zw.col(0) = cn.phi;
  zw.rightCols(dw) = w0.transpose().replicate(n, 1);
  cplx tau = sc_inverse(z0);
  double lam = opt.damping;
  DiscSolution s;
  s.engine = eng;
  s.field = std::make_shared<StructureField>(a);
  s.z0 = z0;
  s.w0 = w0;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iter; ++it) {
    auto an = field_at_nodes(*eng, a, zw);
    InnerResult inner = inner_iterate(*eng, an, cn.dphi, dw, a.bound(), opt.inner_tol, opt.inner_max_iter);
    CMat t2u = eng->nodal(Transform::T2, inner.u.values());
    CMat t1v = eng->nodal(Transform::T1, inner.v.values());
    CMat t2tau = eng->evaluate(Transform::T2, inner.u, {tau});
    CMat t1tau = eng->evaluate(Transform::T1, inner.v, {tau});
    CMat next(n, 1 + dw);
    next.col(0) = t2u.col(0) + cn.phi;
    for (int j = 0; j < dw; ++j) next.col(1 + j) = t1v.col(j).array() - t1tau(0, j) + w0(j);
    cplx tau_next = retraction_psi(z0 - t2tau(0, 0), z0);
    double res = grid_norm(*grid, next.leftCols(1) - zw.leftCols(1)) +
                 grid_norm(*grid, next.rightCols(dw) - zw.rightCols(dw)) + std::abs(tau_next - tau);
    s.outer_history.push_back(res);
    s.outer_iterations = it;
    s.last_inner = inner;
    if (res <= opt.tol) {
      s.u = inner.u;
      s.v = inner.v;
      s.tau = tau_next;
      s.z = GridField(grid, next.leftCols(1));
      s.w = GridField(grid, next.rightCols(dw));
      break;
    }
    if (it == opt.max_iter)
      throw ConvergenceError("outer_solve: no convergence in " + std::to_string(opt.max_iter) +
                                 " sweeps, last residual " + std::to_string(res),
                             s.outer_history);
    if (res > prev) lam = std::max(0.5 * lam, 1.0 / 64.0);
    prev = res;
    zw = (1.0 - lam) * zw + lam * next;
    tau = (1.0 - lam) * tau + lam * tau_next;
  }
  finish(s);
  if (std::abs(s.tau) >= 1.0 - opt.tau_margin) s.tau_near_boundary = true;
  s.residuals["outer"] = s.outer_history.back();
  s.residuals["inner_step"] = s.last_inner.steps.back();
  s.residuals["inner_ratio"] = s.last_inner.max_ratio;
  s.residuals["inner_rate"] = s.last_inner.rate;
  return s;
}

double area(const DiscSolution& s) {
  const auto& eng = *s.engine;
  const auto& g = *eng.grid();
  const int nt = g.ntheta();
  CMat dz = s.dz_nodal();
  double plain = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    double v = dz.row(i).squaredNorm() - std::norm(s.u.values()(i, 0)) - s.v.values().row(i).squaredNorm();
    plain += g.weight(i / nt) * v;
  }
  // z_ζ ≈ Y·ρ at each prevertex, and (u, v) ≈ A(Z(c)) e₀ conj(Y ρ)
  const auto& pv = prevertices();
  const auto& e = eng.corner_weights();
  auto lim = eng.s2_corner_limits(s.u.values().col(0));
  const cplx cp = SchwarzChristoffel::instance().constant();
  std::vector<cplx> corners{pv[0].point, pv[1].point, pv[2].point};
  CMat zc = s.field && !s.field->is_zero() ? s.evaluate(corners) : CMat();
  double corr = 0.0;
  for (int c = 0; c < 3; ++c) {
    double y2 = std::norm(cp + lim[c]);
    double col2 = 0.0;
    if (zc.size()) {
      CMat a = (*s.field)(zc.row(c).transpose());
      col2 = a.col(0).squaredNorm();
    }
    corr += e[c] * y2 * (1.0 - col2);
  }
  return plain + corr;
}

double area(const GridField& dz, const GridField& dzbar) {
  if (dz.grid() != dzbar.grid() || dz.dim() != dzbar.dim())
    throw AlignmentError("area: derivative fields must share grid and dimension");
  const auto& g = *dz.grid();
  double a = 0.0;
  for (int i = 0; i < g.size(); ++i)
    a += g.weight_at(i) * (dz.values().row(i).squaredNorm() - dzbar.values().row(i).squaredNorm());
  return a;
}

int boundary_degree(const BoundaryTrace& tr, double tol) {
  const int n = tr.size();
  if (n < 3) throw DegreeUndefined("boundary_degree: too few boundary samples");
  double far = 0.0;
  for (int k = 0; k < n; ++k) far = std::max(far, TriangleDomain::boundary_distance(tr.values()(k, 0)));
  if (far > tol)
    throw DegreeUndefined("boundary_degree: trace is " + std::to_string(far) + " away from the triangle boundary");
  const cplx p(0.0, 1.0 / 3.0);
  double turn = 0.0;
  for (int k = 0; k < n; ++k) {
    cplx a = tr.values()(k, 0) - p, b = tr.values()((k + 1) % n, 0) - p;
    turn += std::arg(b / a);
  }
  return static_cast<int>(std::lround(turn / (2.0 * kPi)));
}

int boundary_degree(const DiscSolution& s, double tol) {
  return boundary_degree(s.z_boundary, tol);
}

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check& VerifyReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("VerifyReport: no check named " + name);
}

VerifyReport verify_solution(const DiscSolution& s, const StructureField& a, const VerifyTolerances& tol,
                             const std::vector<cplx>& probes) {
  VerifyReport rep;
  auto add = [&](const std::string& name, double value, double t) {
    rep.checks.push_back({name, value, t, std::isfinite(value) && value <= t, "<="});
  };
  const auto& eng = *s.engine;
  const int dw = s.dw();

  // (1) Cauchy–Riemann residual Z_ζ̄ = A(Z)·conj(Z_ζ) at probes
  FdDerivatives fz = fd_derivatives(eng, Transform::T2, s.u, probes);
  FdDerivatives fw = fd_derivatives(eng, Transform::T1, s.v, probes);
  CMat zp = s.evaluate(probes);
  const auto& sc = SchwarzChristoffel::instance();
  double cr = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const int i = static_cast<int>(p);
    CVec zb(1 + dw), zd(1 + dw);
    zb(0) = fz.dbar(i, 0);
    zd(0) = fz.dz(i, 0) + sc.derivative(probes[p]);
    for (int j = 0; j < dw; ++j) {
      zb(1 + j) = fw.dbar(i, j);
      zd(1 + j) = fw.dz(i, j);
    }
    CMat am = a(zp.row(i).transpose());
    cr = std::max(cr, (zb - am * zd.conjugate()).cwiseAbs().maxCoeff());
  }
  add("cr_residual", cr, tol.cr);

  // (2) boundary attachment
  double attach = 0.0;
  for (int k = 0; k < s.z_boundary.size(); ++k)
    attach = std::max(attach, TriangleDomain::boundary_distance(s.z_boundary.values()(k, 0)));
  add("boundary_attachment", attach, tol.attach);

  // (3) Re w_j constant on the circle
  double rew = 0.0;
  for (int j = 0; j < dw; ++j) {
    auto col = s.w_boundary.values().col(j).real();
    rew = std::max(rew, col.maxCoeff() - col.minCoeff());
  }
  add("re_w_constant", rew, tol.re_w);

  // (4) z(closed disc) inside the closed triangle
  double out = 0.0;
  for (int i = 0; i < s.z.size(); ++i) out = std::max(out, -TriangleDomain::margin(s.z.values()(i, 0)));
  for (int k = 0; k < s.z_boundary.size(); ++k)
    out = std::max(out, -TriangleDomain::margin(s.z_boundary.values()(k, 0)));
  add("inclusion", out, tol.inclusion);

  // (5) area and degree
  add("area_error", std::abs(s.area - 1.0), tol.area);
  double deg_err;
  try {
    deg_err = std::abs(boundary_degree(s) - 1.0);
  } catch (const DegreeUndefined&) {
    deg_err = std::numeric_limits<double>::infinity();
  }
  add("degree_error", deg_err, 0.0);

  add("tau_modulus", std::abs(s.tau), 1.0 - 1e-8);
  CMat zt = s.evaluate({s.tau});
  add("interp_z", std::abs(zt(0, 0) - s.z0), tol.interp);
  double iw = 0.0;
  for (int j = 0; j < dw; ++j) iw = std::max(iw, std::abs(zt(0, 1 + j) - s.w0(j)));
  add("interp_w", iw, tol.interp);
  add("outer_residual", s.outer_history.empty() ? 0.0 : s.outer_history.back(), tol.outer);
  return rep;
}

}  // namespace nsq
