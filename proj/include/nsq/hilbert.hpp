#pragma once

#include <string>

#include "nsq/types.hpp"

namespace nsq {

// Finite window of lattice coordinates: entry k sits at index offset + k.
class ComplexSeq {
 public:
  ComplexSeq(CVec entries, int index_offset = 0);

  static ComplexSeq zeros(int len, int index_offset = 0);
  static ComplexSeq unit(int index, int len, int index_offset = 0);

  const CVec& entries() const { return v_; }
  int offset() const { return off_; }
  int size() const { return static_cast<int>(v_.size()); }
  int last_index() const { return off_ + size() - 1; }
  cplx at(int index) const;

 private:
  CVec v_;
  int off_;
};

enum class WeightRule {
  sobolev,  // θ_n = (1 + n²)^{1/2}
  linear,   // θ_n = n, indices must be positive
};

class ScaleWeights {
 public:
  ScaleWeights(RVec theta, int index_offset, WeightRule rule);
  static ScaleWeights make(int len, int index_offset, WeightRule rule = WeightRule::sobolev);
  static ScaleWeights aligned(const ComplexSeq& x, WeightRule rule = WeightRule::sobolev) {
    return make(x.size(), x.offset(), rule);
  }

  const RVec& theta() const { return th_; }
  int offset() const { return off_; }
  int size() const { return static_cast<int>(th_.size()); }
  WeightRule rule() const { return rule_; }
  // D^s as a vector of diagonal entries.
  RVec power(double s) const;

 private:
  RVec th_;
  int off_;
  WeightRule rule_;
};

std::string to_string(WeightRule r);
WeightRule weight_rule_from_string(const std::string& s);

double scale_norm(const ComplexSeq& x, const ScaleWeights& w, double s);

double symplectic_form(const ComplexSeq& u, const ComplexSeq& v);

// ‖D^s M D^{-s}‖₀ (largest singular value).
double operator_scale_norm(const CMat& m, const ScaleWeights& w, double s);

struct DiagConjugationReport {
  double residual = 0.0;
  double bound = 0.0;
  double norm_minus = 0.0;  // ‖Q‖_{-s0}
  double norm_zero = 0.0;
  double norm_plus = 0.0;
  bool hypothesis_ok = false;
  bool pass = false;
  std::string message;
};

DiagConjugationReport diag_conjugation_residual(const CMat& q, const ScaleWeights& w, double s,
                                                double s0, double c);

}  // namespace nsq
