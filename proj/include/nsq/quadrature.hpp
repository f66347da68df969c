#pragma once

#include <vector>

#include "nsq/types.hpp"

namespace nsq {

struct GaussLegendre {
  RVec nodes;    // ascending, in (-1, 1)
  RVec weights;
};

// Newton iteration on P_n; accurate to a few ulps for n up to several hundred.
GaussLegendre gauss_legendre(int n);

// Rule mapped to [a, b].
GaussLegendre gauss_legendre(int n, double a, double b);

// Lagrange interpolation through the nodes of a Gauss–Legendre rule
// (barycentric form, nodes given on an arbitrary interval).
class GaussLagrange {
 public:
  GaussLagrange(RVec nodes, const GaussLegendre& ref);
  int size() const { return static_cast<int>(x_.size()); }
  const RVec& nodes() const { return x_; }
  // Row of basis values ℓ_j(t).
  void basis(double t, double* out) const;
  RVec basis(double t) const;
  // Basis matrix for many points, one row per point.
  RMat basis(const std::vector<double>& pts) const;

 private:
  RVec x_;
  RVec lam_;
};

}  // namespace nsq
