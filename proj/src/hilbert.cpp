#include "nsq/hilbert.hpp"

#include <cmath>

namespace nsq {

ComplexSeq::ComplexSeq(CVec entries, int index_offset) : v_(std::move(entries)), off_(index_offset) {
  if (v_.size() < 1) throw ContractViolation("ComplexSeq: empty window");
  if (!v_.allFinite()) throw ContractViolation("ComplexSeq: non-finite entry");
}

ComplexSeq ComplexSeq::zeros(int len, int index_offset) {
  return ComplexSeq(CVec::Zero(len), index_offset);
}

ComplexSeq ComplexSeq::unit(int index, int len, int index_offset) {
  CVec v = CVec::Zero(len);
  int k = index - index_offset;
  if (k < 0 || k >= len) throw AlignmentError("ComplexSeq::unit: index outside window");
  v(k) = 1.0;
  return ComplexSeq(std::move(v), index_offset);
}

cplx ComplexSeq::at(int index) const {
  int k = index - off_;
  if (k < 0 || k >= size()) return 0.0;
  return v_(k);
}

ScaleWeights::ScaleWeights(RVec theta, int index_offset, WeightRule rule)
    : th_(std::move(theta)), off_(index_offset), rule_(rule) {
  if (th_.size() < 1) throw ContractViolation("ScaleWeights: empty window");
  for (double t : th_)
    if (!(t > 0.0) || !std::isfinite(t)) throw ContractViolation("ScaleWeights: weights must be positive");
}

ScaleWeights ScaleWeights::make(int len, int index_offset, WeightRule rule) {
  RVec th(len);
  for (int k = 0; k < len; ++k) {
    double n = index_offset + k;
    th(k) = rule == WeightRule::sobolev ? std::sqrt(1.0 + n * n) : n;
  }
  return ScaleWeights(std::move(th), index_offset, rule);
}

RVec ScaleWeights::power(double s) const {
  return th_.array().pow(s).matrix();
}

std::string to_string(WeightRule r) {
  return r == WeightRule::sobolev ? "sobolev" : "linear";
}

WeightRule weight_rule_from_string(const std::string& s) {
  if (s == "sobolev") return WeightRule::sobolev;
  if (s == "linear") return WeightRule::linear;
  throw ConfigError("unknown weight rule '" + s + "'");
}

double scale_norm(const ComplexSeq& x, const ScaleWeights& w, double s) {
  if (x.offset() != w.offset() || x.size() != w.size())
    throw AlignmentError("scale_norm: sequence and weights cover different index windows");
  if (s == 0.0) return x.entries().norm();
  return x.entries().cwiseProduct(w.power(s).cast<cplx>()).norm();
}

double symplectic_form(const ComplexSeq& u, const ComplexSeq& v) {
  if (u.size() != v.size()) throw AlignmentError("symplectic_form: length mismatch");
  return u.entries().dot(v.entries()).imag();
}

double operator_scale_norm(const CMat& m, const ScaleWeights& w, double s) {
  if (m.rows() != w.size() || m.cols() != w.size())
    throw AlignmentError("operator_scale_norm: matrix and weights differ in size");
  RVec dp = w.power(s), dm = w.power(-s);
  CMat c = dp.cast<cplx>().asDiagonal() * m * dm.cast<cplx>().asDiagonal();
  Eigen::BDCSVD<CMat> svd(c);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

DiagConjugationReport diag_conjugation_residual(const CMat& q, const ScaleWeights& w, double s,
                                                double s0, double c) {
  DiagConjugationReport rep;
  rep.norm_minus = operator_scale_norm(q, w, -s0);
  rep.norm_zero = operator_scale_norm(q, w, 0.0);
  rep.norm_plus = operator_scale_norm(q, w, s0);
  rep.bound = s0 > 0.0 ? 2.0 * c * std::abs(s) / s0 : 0.0;
  RVec dp = w.power(s), dm = w.power(-s);
  CMat conj = dp.cast<cplx>().asDiagonal() * q * dm.cast<cplx>().asDiagonal();
  Eigen::BDCSVD<CMat> svd(conj - q);
  rep.residual = svd.singularValues()(0);
  const double slack = 1e-12 * (1.0 + c);
  rep.hypothesis_ok = s0 > 0.0 && std::abs(s) <= s0 && rep.norm_minus <= c + slack &&
                      rep.norm_zero <= c + slack && rep.norm_plus <= c + slack;
  if (!rep.hypothesis_ok) {
    rep.message = "hypothesis not satisfied";
    rep.pass = false;
    return rep;
  }
  rep.pass = rep.residual <= rep.bound + 1e-12;
  rep.message = rep.pass ? "ok" : "bound violated";
  return rep;
}

}  // namespace nsq
