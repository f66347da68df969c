#include "nsq/quadrature.hpp"

#include <cmath>
#include <utility>

namespace nsq {

namespace {

// (P_n(x), P_n'(x))
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (n == 1) p0 = 1.0;
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw ContractViolation("gauss_legendre: n must be ≥ 1");
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (2 * i + 1 == n) x = 0.0;
    double dp = legendre(n, x).second;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes(i) = -x;
    g.nodes(n - 1 - i) = x;
    g.weights(i) = g.weights(n - 1 - i) = w;
  }
  return g;
}

GaussLegendre gauss_legendre(int n, double a, double b) {
  GaussLegendre g = gauss_legendre(n);
  const double h = 0.5 * (b - a);
  g.nodes = (g.nodes.array() + 1.0) * h + a;
  g.weights *= h;
  return g;
}

GaussLagrange::GaussLagrange(RVec nodes, const GaussLegendre& ref) : x_(std::move(nodes)) {
  const int n = size();
  if (ref.nodes.size() != n) throw AlignmentError("GaussLagrange: rule size mismatch");
  lam_.resize(n);
  for (int j = 0; j < n; ++j) {
    double t = ref.nodes(j);
    lam_(j) = ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - t * t) * ref.weights(j));
  }
}

void GaussLagrange::basis(double t, double* out) const {
  const int n = size();
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = t - x_(j);
    if (d == 0.0) {
      for (int k = 0; k < n; ++k) out[k] = 0.0;
      out[j] = 1.0;
      return;
    }
    out[j] = lam_(j) / d;
    den += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= den;
}

RVec GaussLagrange::basis(double t) const {
  RVec b(size());
  basis(t, b.data());
  return b;
}

RMat GaussLagrange::basis(const std::vector<double>& pts) const {
  const int n = size();
  RMat b(static_cast<int>(pts.size()), n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    basis(pts[i], row.data());
    for (int j = 0; j < n; ++j) b(static_cast<int>(i), j) = row[j];
  }
  return b;
}

}  // namespace nsq
