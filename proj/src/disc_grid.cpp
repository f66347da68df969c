#include "nsq/disc_grid.hpp"

#include <cmath>

namespace nsq {

namespace {

RVec map_radii(const GaussLegendre& g) {
  return ((g.nodes.array() + 1.0) * 0.5).matrix();
}

}  // namespace

DiscGrid::DiscGrid(int nr, int ntheta)
    : nr_(nr), nt_(ntheta), rule_(gauss_legendre(nr)), r_(map_radii(rule_)),
      w_(rule_.weights.cwiseProduct(r_) * (kPi / ntheta)), interp_(r_, rule_) {
  if (nr < 2) throw ContractViolation("DiscGrid: need at least two rings");
  if (ntheta < 4 || ntheta % 4 != 0)
    throw ContractViolation("DiscGrid: ntheta must be a positive multiple of 4");
}

GridField::GridField(GridPtr grid, CMat values) : grid_(std::move(grid)), v_(std::move(values)) {
  if (!grid_) throw ContractViolation("GridField: null grid");
  if (v_.rows() != grid_->size()) throw AlignmentError("GridField: value rows must match the node count");
  if (v_.cols() < 1) throw ContractViolation("GridField: dimension must be ≥ 1");
  if (!v_.allFinite()) throw ContractViolation("GridField: non-finite value");
}

GridField GridField::zeros(GridPtr grid, int dim) {
  int n = grid->size();
  return GridField(std::move(grid), CMat::Zero(n, dim));
}

GridField GridField::sample(GridPtr grid, const std::function<cplx(cplx)>& f) {
  CMat v(grid->size(), 1);
  for (int i = 0; i < grid->size(); ++i) v(i, 0) = f(grid->node(i));
  return GridField(std::move(grid), std::move(v));
}

GridField GridField::sample(GridPtr grid, int dim, const std::function<void(cplx, cplx*)>& f) {
  CMat v(grid->size(), dim);
  std::vector<cplx> row(dim);
  for (int i = 0; i < grid->size(); ++i) {
    f(grid->node(i), row.data());
    for (int c = 0; c < dim; ++c) v(i, c) = row[c];
  }
  return GridField(std::move(grid), std::move(v));
}

GridField GridField::component(int c) const {
  if (c < 0 || c >= dim()) throw AlignmentError("GridField::component: index out of range");
  return GridField(grid_, v_.col(c));
}

double GridField::l2_norm() const {
  const int nt = grid_->ntheta();
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += grid_->weight(i / nt) * v_.row(i).squaredNorm();
  return std::sqrt(s);
}

int boundary_arc(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  const double eps = 1e-12;
  if (a < eps || std::abs(a - 0.5 * kPi) < eps || std::abs(a - kPi) < eps || a > 2.0 * kPi - eps)
    throw DomainError("boundary_arc: sample at a corner angle");
  if (a < 0.5 * kPi) return 1;
  if (a < kPi) return 2;
  return 3;
}

BoundaryTrace::BoundaryTrace(std::vector<double> angles, CMat values)
    : a_(std::move(angles)), v_(std::move(values)) {
  if (static_cast<int>(a_.size()) != v_.rows()) throw AlignmentError("BoundaryTrace: size mismatch");
  for (double a : a_) boundary_arc(a);
}

std::vector<double> boundary_angles(const DiscGrid& g) {
  std::vector<double> a(g.ntheta());
  for (int k = 0; k < g.ntheta(); ++k) a[k] = g.angle(k);
  return a;
}

}  // namespace nsq
