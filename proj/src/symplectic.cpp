#include "nsq/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace nsq {

namespace {

double spec_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

double spec_norm(const RMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<RMat> svd(m);
  return svd.singularValues()(0);
}

RealLinearOp conjugate_by_scale(const RealLinearOp& f, const ScaleWeights& w, double s) {
  const CVec dp = w.power(s).cast<cplx>();
  const CVec dm = w.power(-s).cast<cplx>();
  return RealLinearOp(dp.asDiagonal() * f.P * dm.asDiagonal(), dp.asDiagonal() * f.Q * dm.asDiagonal());
}

}  // namespace

RealLinearOp::RealLinearOp(CMat p, CMat q) : P(std::move(p)), Q(std::move(q)) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows())
    throw AlignmentError("RealLinearOp: P and Q must be square of equal size");
}

RealLinearOp RealLinearOp::identity(int n) {
  return RealLinearOp(CMat::Identity(n, n), CMat::Zero(n, n));
}

CVec apply(const RealLinearOp& f, const CVec& u) {
  if (u.size() != f.dim()) throw AlignmentError("apply: dimension mismatch");
  return f.P * u + f.Q * u.conjugate();
}

ComplexSeq apply(const RealLinearOp& f, const ComplexSeq& u) {
  return ComplexSeq(apply(f, u.entries()), u.offset());
}

RealLinearOp compose(const RealLinearOp& f, const RealLinearOp& g) {
  if (f.dim() != g.dim()) throw AlignmentError("compose: dimension mismatch");
  return RealLinearOp(f.P * g.P + f.Q * g.Q.conjugate(), f.P * g.Q + f.Q * g.P.conjugate());
}

RMat to_real(const RealLinearOp& f) {
  const int n = f.dim();
  RMat m11 = (f.P + f.Q).real(), m21 = (f.P + f.Q).imag();
  RMat m12 = (f.Q - f.P).imag(), m22 = (f.P - f.Q).real();
  RMat m(2 * n, 2 * n);
  m << m11, m12, m21, m22;
  return m;
}

RealLinearOp from_real(const RMat& m) {
  if (m.rows() != m.cols() || m.rows() % 2) throw AlignmentError("from_real: need a 2n×2n matrix");
  const int n = static_cast<int>(m.rows() / 2);
  RMat m11 = m.topLeftCorner(n, n), m12 = m.topRightCorner(n, n);
  RMat m21 = m.bottomLeftCorner(n, n), m22 = m.bottomRightCorner(n, n);
  CMat p(n, n), q(n, n);
  p.real() = 0.5 * (m11 + m22);
  p.imag() = 0.5 * (m21 - m12);
  q.real() = 0.5 * (m11 - m22);
  q.imag() = 0.5 * (m21 + m12);
  return RealLinearOp(std::move(p), std::move(q));
}

RMat real_symplectic_unit(int n) {
  RMat j = RMat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = RMat::Identity(n, n);
  j.bottomLeftCorner(n, n) = -RMat::Identity(n, n);
  return j;
}

double SymplecticResiduals::max() const {
  return std::max({r1, r2, r3, r4});
}

SymplecticResiduals symplectic_residuals(const RealLinearOp& f) {
  const CMat& p = f.P;
  const CMat& q = f.Q;
  const auto id = CMat::Identity(f.dim(), f.dim());
  SymplecticResiduals r;
  r.r1 = spec_norm(CMat(p.adjoint() * p - q.transpose() * q.conjugate() - id));
  r.r2 = spec_norm(CMat(p.transpose() * q.conjugate() - q.conjugate().transpose() * p));
  r.r3 = spec_norm(CMat(p * p.adjoint() - q * q.adjoint() - id));
  r.r4 = spec_norm(CMat(p * q.transpose() - q * p.transpose()));
  return r;
}

bool is_symplectic(const RealLinearOp& f, double tol) {
  return symplectic_residuals(f).max() <= tol;
}

RealLinearOp inverse_symplectic(const RealLinearOp& f, double tol) {
  auto r = symplectic_residuals(f);
  if (r.max() > tol)
    throw ContractViolation("inverse_symplectic: operator is not symplectic (residual " +
                            std::to_string(r.max()) + ")");
  return RealLinearOp(f.P.adjoint(), -f.Q.transpose());
}

double real_op_norm(const RealLinearOp& f) {
  return spec_norm(to_real(f));
}

CMat complex_representation(const RealLinearOp& f) {
  Eigen::FullPivLU<CMat> lu(CMat(f.P.conjugate()));
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw ContractViolation(
        "complex_representation: P is singular, so the input is not symplectic "
        "(a symplectic operator has invertible P)");
  }
  return f.Q * lu.inverse();
}

RealLinearOp random_symplectic(int dim, double spread, std::uint64_t seed, int bandwidth) {
  if (dim < 1) throw ContractViolation("random_symplectic: dim must be ≥ 1");
  if (spread < 0) throw ContractViolation("random_symplectic: spread must be ≥ 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n2 = 2 * dim;
  RMat s = RMat::Zero(n2, n2);
  for (int i = 0; i < n2; ++i)
    for (int j = i; j < n2; ++j) {
      double g = gauss(rng);
      int si = i % dim, sj = j % dim;
      if (bandwidth >= 0 && std::abs(si - sj) > bandwidth) g = 0.0;
      s(i, j) = s(j, i) = g;
    }
  s *= spread / std::sqrt(static_cast<double>(n2));
  RMat h = real_symplectic_unit(dim) * s;
  RMat m = h.exp();
  return from_real(m);
}

ScaleBoundReport scale_bound_report(const RealLinearOp& f, const ScaleWeights& w,
                                    const std::vector<double>& s_grid, double c, double s0) {
  if (w.size() != f.dim()) throw AlignmentError("scale_bound_report: weights and operator differ in size");
  ScaleBoundReport rep;
  rep.s1 = s0 / (8.0 * c * c);
  RealLinearOp finv = inverse_symplectic(f, 1e-6);
  rep.a0 = spec_norm(complex_representation(f));
  rep.a_target = 0.5 * (1.0 + rep.a0);
  rep.hypothesis_ok = c > 0 && s0 > 0;
  const double slack = 1e-10 * (1.0 + c);
  for (double s : s_grid) {
    ScaleBoundRow row;
    row.s = s;
    RealLinearOp fs = conjugate_by_scale(f, w, s);
    RealLinearOp fis = conjugate_by_scale(finv, w, s);
    row.f_norm = real_op_norm(fs);
    row.finv_norm = real_op_norm(fis);
    if (s < 0 || s > s0 || row.f_norm > c + slack || row.finv_norm > c + slack) rep.hypothesis_ok = false;
    CMat pinv = f.P.inverse();
    const CVec dp = w.power(s).cast<cplx>();
    const CVec dm = w.power(-s).cast<cplx>();
    row.pinv_norm = spec_norm(CMat(dp.asDiagonal() * pinv * dm.asDiagonal()));
    row.a_norm = spec_norm(CMat(dp.asDiagonal() * complex_representation(f) * dm.asDiagonal()));
    row.claimed = s <= rep.s1;
    if (row.claimed) {
      row.pinv_ok = row.pinv_norm <= 2.0 * c + slack;
      row.a_ok = row.a_norm <= rep.a_target + slack && row.a_norm < 1.0;
      rep.observed_a = std::max(rep.observed_a, row.a_norm);
    }
    rep.rows.push_back(row);
  }
  if (!rep.hypothesis_ok) {
    rep.message = "hypothesis not satisfied";
    rep.pass = false;
    return rep;
  }
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                         [](const ScaleBoundRow& r) { return r.pinv_ok && r.a_ok; });
  rep.message = rep.pass ? "ok" : "bound violated";
  return rep;
}

}  // namespace nsq
