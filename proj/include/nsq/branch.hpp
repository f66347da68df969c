#pragma once

#include <array>

#include "nsq/types.hpp"

namespace nsq {

// R(ζ) = e^{3πi/4} (ζ−1)^{1/4} (ζ+1)^{1/4} (ζ−i)^{1/2}, each root's cut running
// radially outward so R is continuous on the closed disc.
cplx weight_R(cplx z);
// R'(ζ); singular at the three roots.
cplx weight_R_prime(cplx z);
// X = R/√ζ with √ cut along the nonnegative reals and √(−1) = i.
cplx weight_X(cplx z);
cplx sqrt_cut(cplx z);

// ρ(ζ) = R(ζ)/((ζ²−1)(ζ−i)); Φ' = C'·ρ.
cplx rho_R(cplx z);

// ρ(c + δ) for prevertex index `vertex` (order of prevertices()), with δ
// used directly in the vanishing factor.
cplx rho_R_offset(int vertex, cplx delta);

struct Prevertex {
  cplx point;
  double exponent;  // of ρ near the point
  // R'·H / ρ → κ·H(point); the leading singular part of S₂f is κ·H(c)·ρ.
  cplx kappa;
};

const std::array<Prevertex, 3>& prevertices();

}  // namespace nsq
