#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nsq/quadrature.hpp"

namespace nsq {

// Gauss–Legendre in r ∈ (0, 1) times midpoint rule in θ. Node (j, k) has
// flat index j·ntheta + k.
class DiscGrid {
 public:
  DiscGrid(int nr, int ntheta);
  static std::shared_ptr<const DiscGrid> make(int nr, int ntheta) {
    return std::make_shared<const DiscGrid>(nr, ntheta);
  }

  int nr() const { return nr_; }
  int ntheta() const { return nt_; }
  int size() const { return nr_ * nt_; }
  int index(int j, int k) const { return j * nt_ + k; }

  double radius(int j) const { return r_(j); }
  double angle(int k) const { return (k + 0.5) * 2.0 * kPi / nt_; }
  cplx node(int j, int k) const { return std::polar(r_(j), angle(k)); }
  cplx node(int idx) const { return node(idx / nt_, idx % nt_); }
  double weight(int j) const { return w_(j); }
  double weight_at(int idx) const { return w_(idx / nt_); }

  const RVec& radii() const { return r_; }
  // Area weights per ring, identical for every node of the ring.
  const RVec& ring_weights() const { return w_; }
  const GaussLegendre& radial_rule() const { return rule_; }
  const GaussLagrange& radial_interp() const { return interp_; }

 private:
  int nr_, nt_;
  GaussLegendre rule_;  // on [-1, 1]
  RVec r_;
  RVec w_;
  GaussLagrange interp_;
};

using GridPtr = std::shared_ptr<const DiscGrid>;

class GridField {
 public:
  GridField() = default;
  GridField(GridPtr grid, CMat values);
  static GridField zeros(GridPtr grid, int dim = 1);
  static GridField sample(GridPtr grid, const std::function<cplx(cplx)>& f);
  static GridField sample(GridPtr grid, int dim, const std::function<void(cplx, cplx*)>& f);

  const GridPtr& grid() const { return grid_; }
  const CMat& values() const { return v_; }
  CMat& values() { return v_; }
  int dim() const { return static_cast<int>(v_.cols()); }
  int size() const { return static_cast<int>(v_.rows()); }
  GridField component(int c) const;

  // (Σ w |f|²)^{1/2} over nodes and components; no singularity correction.
  double l2_norm() const;

 private:
  GridPtr grid_;
  CMat v_;
};

// Arc 1: (0, π/2), arc 2: (π/2, π), arc 3: (π, 2π).
int boundary_arc(double angle);

class BoundaryTrace {
 public:
  BoundaryTrace() = default;
  BoundaryTrace(std::vector<double> angles, CMat values);
  const std::vector<double>& angles() const { return a_; }
  const CMat& values() const { return v_; }
  int size() const { return static_cast<int>(a_.size()); }
  int dim() const { return static_cast<int>(v_.cols()); }
  int arc(int i) const { return boundary_arc(a_[i]); }

 private:
  std::vector<double> a_;
  CMat v_;
};

// Samples at the grid's own angles.
std::vector<double> boundary_angles(const DiscGrid& g);

}  // namespace nsq
