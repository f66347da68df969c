#include "nsq/branch.hpp"

#include <cmath>

namespace nsq {

namespace {

// d^a for d = ζ − c, with the cut on the ray from c away from the origin.
cplx outward_power(cplx d, cplx c, double a) {
  cplx rot = -std::conj(c);
  return std::exp(a * std::log(d * rot)) * std::exp(-a * std::log(rot));
}

// Differences ζ − 1, ζ + 1, ζ − i passed separately so callers near a root
// can supply that offset without cancellation.
cplx raw_R(cplx d1, cplx dm1, cplx di) {
  return outward_power(d1, 1.0, 0.25) * outward_power(dm1, -1.0, 0.25) * outward_power(di, kI, 0.5);
}

cplx raw_R(cplx z) {
  return raw_R(z - 1.0, z + 1.0, z - kI);
}

const cplx& phase() {
  static const cplx ph = [] {
    cplx p = std::exp(kI * (0.75 * kPi)) / raw_R(0.0);
    return p / std::abs(p);
  }();
  return ph;
}

void check_closed_disc(cplx z, const char* who) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1.0 + 1e-12)
    throw DomainError(std::string(who) + ": argument outside the closed unit disc");
}

}  // namespace

cplx weight_R(cplx z) {
  check_closed_disc(z, "weight_R");
  return phase() * raw_R(z);
}

cplx weight_R_prime(cplx z) {
  cplx r = weight_R(z);
  return r * (0.25 / (z - 1.0) + 0.25 / (z + 1.0) + 0.5 / (z - kI));
}

cplx sqrt_cut(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) throw BranchError("sqrt_cut: argument on the nonnegative real axis");
  double a = std::arg(z);
  if (a < 0) a += 2.0 * kPi;
  return std::polar(std::sqrt(std::abs(z)), 0.5 * a);
}

cplx weight_X(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) throw BranchError("weight_X: argument on the cut of √ζ");
  return weight_R(z) / sqrt_cut(z);
}

cplx rho_R(cplx z) {
  return weight_R(z) / ((z * z - 1.0) * (z - kI));
}

cplx rho_R_offset(int vertex, cplx delta) {
  const auto& pv = prevertices();
  const cplx z = pv[vertex].point + delta;
  check_closed_disc(z, "rho_R_offset");
  cplx d[3] = {z - 1.0, z + 1.0, z - kI};
  d[vertex] = delta;
  return phase() * raw_R(d[0], d[1], d[2]) / (d[0] * d[1] * d[2]);
}

const std::array<Prevertex, 3>& prevertices() {
  static const std::array<Prevertex, 3> pv{{
      {cplx(1.0, 0.0), -0.75, cplx(0.5, -0.5)},
      {cplx(-1.0, 0.0), -0.75, cplx(0.5, 0.5)},
      {cplx(0.0, 1.0), -0.5, cplx(-1.0, 0.0)},
  }};
  return pv;
}

}  // namespace nsq
