#include "nsq/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsq/branch.hpp"
#include "nsq/quadrature.hpp"

namespace nsq {

namespace {

constexpr double kVertexRadius = 0.6;

const GaussLegendre& unit_rule() {
  static const GaussLegendre g = gauss_legendre(64, 0.0, 1.0);
  return g;
}

int substitution_power(int c) {
  return c == 2 ? 2 : 4;
}

double seg_distance(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

cplx seg_nearest(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
  return a + t * d;
}

cplx clamp_disc(cplx zeta) {
  double r = std::abs(zeta);
  return r > 1.0 ? zeta / r : zeta;
}

}  // namespace

double TriangleDomain::margin(cplx z) {
  return std::min({z.imag(), 1.0 - z.real() - z.imag(), 1.0 + z.real() - z.imag()});
}

double TriangleDomain::boundary_distance(cplx z) {
  auto v = vertices();
  return std::min({seg_distance(z, v[0], v[1]), seg_distance(z, v[1], v[2]), seg_distance(z, v[2], v[0])});
}

cplx TriangleDomain::nearest_boundary_point(cplx z) {
  auto v = vertices();
  cplx best = seg_nearest(z, v[0], v[1]);
  for (auto [a, b] : {std::pair{v[1], v[2]}, std::pair{v[2], v[0]}}) {
    cplx p = seg_nearest(z, a, b);
    if (std::abs(p - z) < std::abs(best - z)) best = p;
  }
  return best;
}

cplx SchwarzChristoffel::vertex_integral(int c, cplx zeta) const {
  const cplx p = prevertices()[c].point;
  const int q = substitution_power(c);
  const cplx d = zeta - p;
  if (d == 0.0) return 0.0;
  const auto& g = unit_rule();
  cplx sum = 0.0;
  for (int i = 0; i < g.nodes.size(); ++i) {
    double y = g.nodes(i);
    double yq1 = std::pow(y, q - 1);
    sum += g.weights(i) * rho_R_offset(c, yq1 * y * d) * (q * yq1);
  }
  return sum * d;
}

cplx SchwarzChristoffel::center_integral(cplx zeta) const {
  const auto& g = unit_rule();
  cplx sum = 0.0;
  for (int i = 0; i < g.nodes.size(); ++i) sum += g.weights(i) * rho_R(g.nodes(i) * zeta);
  return sum * zeta;
}

SchwarzChristoffel::SchwarzChristoffel() {
  const cplx i1 = vertex_integral(0, 0.0), im1 = vertex_integral(1, 0.0);
  cprime_ = 2.0 / (im1 - i1);
  phi0_ = 1.0 + cprime_ * i1;
  for (int j = 1; j <= 8; ++j)
    for (int k = 0; k < 48; ++k) {
      double r = j == 8 ? 1.0 : j / 8.0;
      cplx zeta = std::polar(r, 2.0 * kPi * (k + 0.5) / 48.0);
      seed_zeta_.push_back(zeta);
      seed_z_.push_back(map(zeta));
    }
  seed_zeta_.push_back(0.0);
  seed_z_.push_back(phi0_);
}

const SchwarzChristoffel& SchwarzChristoffel::instance() {
  static const SchwarzChristoffel sc;
  return sc;
}

cplx SchwarzChristoffel::map(cplx zeta) const {
  if (std::abs(zeta) > 1.0 + 1e-12) throw DomainError("schwarz_christoffel: argument outside the closed disc");
  const auto& pv = prevertices();
  for (int c = 0; c < 3; ++c)
    if (std::abs(zeta - pv[c].point) < kVertexRadius) return pv[c].point + cprime_ * vertex_integral(c, zeta);
  return phi0_ + cprime_ * center_integral(zeta);
}

cplx SchwarzChristoffel::derivative(cplx zeta) const {
  for (const auto& pv : prevertices())
    if (zeta == pv.point) throw EvaluationError("sc_derivative: Φ' is singular at a prevertex");
  return cprime_ * rho_R(zeta);
}

cplx SchwarzChristoffel::newton_plain(cplx z, cplx zeta) const {
  double res = std::abs(map(zeta) - z);
  for (int it = 0; it < 80 && res > 1e-15; ++it) {
    cplx step = (map(zeta) - z) / derivative(zeta);
    double lam = 1.0;
    cplx next;
    double nres;
    do {
      next = clamp_disc(zeta - lam * step);
      nres = std::abs(map(next) - z);
      lam *= 0.5;
    } while (nres > res && lam > 1e-6);
    if (nres >= res && std::abs(next - zeta) < 1e-16) break;
    zeta = next;
    res = nres;
  }
  return zeta;
}

// Newton in η with ζ = c − c·η^q, which makes Φ smooth at the vertex.
cplx SchwarzChristoffel::newton_vertex(cplx z, int c, cplx zeta) const {
  const cplx p = prevertices()[c].point;
  const int q = substitution_power(c);
  auto to_zeta = [&](cplx eta) { return clamp_disc(p - p * std::pow(eta, q)); };
  cplx eta = std::pow((zeta - p) / (-p), 1.0 / q);
  if (eta == 0.0) eta = 1e-3;
  zeta = to_zeta(eta);
  double res = std::abs(map(zeta) - z);
  for (int it = 0; it < 80 && res > 1e-15; ++it) {
    cplx dz_deta = -p * (static_cast<double>(q) * std::pow(eta, q - 1));
    cplx step = (map(zeta) - z) / (derivative(zeta) * dz_deta);
    double lam = 1.0;
    cplx next_eta, next;
    double nres;
    do {
      next_eta = eta - lam * step;
      next = to_zeta(next_eta);
      nres = std::abs(map(next) - z);
      lam *= 0.5;
    } while (nres > res && lam > 1e-6);
    if (nres >= res) break;
    eta = std::pow((next - p) / (-p), 1.0 / q);
    zeta = next;
    res = nres;
  }
  return zeta;
}

cplx SchwarzChristoffel::inverse(cplx z) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !TriangleDomain::contains(z, 1e-12))
    throw DomainError("sc_inverse: point outside the closed triangle");
  const auto& pv = prevertices();
  for (int c = 0; c < 3; ++c)
    if (std::abs(z - pv[c].point) < 1e-15) return pv[c].point;
  std::size_t best = 0;
  for (std::size_t i = 1; i < seed_z_.size(); ++i)
    if (std::abs(seed_z_[i] - z) < std::abs(seed_z_[best] - z)) best = i;
  cplx zeta = seed_zeta_[best];
  for (int c = 0; c < 3; ++c)
    if (std::abs(z - pv[c].point) < 0.3) {
      if (std::abs(zeta - pv[c].point) > 0.5) zeta = pv[c].point * 0.9;
      return newton_vertex(z, c, zeta);
    }
  return newton_plain(z, zeta);
}

cplx schwarz_christoffel(cplx zeta) {
  return SchwarzChristoffel::instance().map(zeta);
}

cplx sc_derivative(cplx zeta) {
  return SchwarzChristoffel::instance().derivative(zeta);
}

cplx sc_inverse(cplx z) {
  return SchwarzChristoffel::instance().inverse(z);
}

cplx retraction_psi(cplx z, cplx z0) {
  if (!TriangleDomain::interior(z0)) throw ContractViolation("retraction_psi: z0 must lie inside the triangle");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("retraction_psi: non-finite point");
  if (TriangleDomain::contains(z, 1e-12)) {
    return sc_inverse(TriangleDomain::contains(z, 0.0) ? z : TriangleDomain::nearest_boundary_point(z));
  }
  auto lin = [](cplx p, int k) {
    switch (k) {
      case 0: return p.imag();
      case 1: return 1.0 - p.real() - p.imag();
      default: return 1.0 + p.real() - p.imag();
    }
  };
  double t = 1.0;
  for (int k = 0; k < 3; ++k) {
    double a = lin(z0, k), b = lin(z, k);
    if (b < 0.0) t = std::min(t, a / (a - b));
  }
  cplx p = z0 + t * (z - z0);
  if (!TriangleDomain::contains(p, 0.0)) p = TriangleDomain::nearest_boundary_point(p);
  return sc_inverse(p);
}

}  // namespace nsq
