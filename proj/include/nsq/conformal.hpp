#pragma once

#include <array>
#include <vector>

#include "nsq/types.hpp"

namespace nsq {

// Δ = { z : 0 < Im z < 1 − |Re z| }, vertices −1, 1, i.
struct TriangleDomain {
  static constexpr double area() { return 1.0; }
  static std::array<cplx, 3> vertices() { return {cplx(-1, 0), cplx(1, 0), cplx(0, 1)}; }
  // Smallest of Im z, 1 − Re z − Im z, 1 + Re z − Im z (≥ 0 on the closure).
  static double margin(cplx z);
  static bool contains(cplx z, double tol = 1e-12) { return margin(z) >= -tol; }
  static bool interior(cplx z) { return margin(z) > 0.0; }
  // Euclidean distance to the boundary polygon.
  static double boundary_distance(cplx z);
  static cplx nearest_boundary_point(cplx z);
};

// Φ: 𝔻 → Δ with Φ(±1) = ±1 and Φ(i) = i, Φ' = C'·ρ.
class SchwarzChristoffel {
 public:
  SchwarzChristoffel();
  static const SchwarzChristoffel& instance();

  cplx map(cplx zeta) const;
  cplx derivative(cplx zeta) const;
  cplx inverse(cplx z) const;
  cplx constant() const { return cprime_; }
  cplx center_value() const { return phi0_; }
  // ∫_c^ζ ρ along the straight segment, c one of the prevertices (index 0: 1, 1: −1, 2: i).
  cplx vertex_integral(int c, cplx zeta) const;
  // ∫_0^ζ ρ along the straight segment (ζ away from the prevertices).
  cplx center_integral(cplx zeta) const;

 private:
  cplx newton_plain(cplx z, cplx zeta) const;
  cplx newton_vertex(cplx z, int c, cplx zeta) const;

  cplx cprime_;
  cplx phi0_;
  std::vector<cplx> seed_zeta_, seed_z_;
};

cplx schwarz_christoffel(cplx zeta);
cplx sc_derivative(cplx zeta);
cplx sc_inverse(cplx z);

// Φ⁻¹(z) on the closed triangle, otherwise Φ⁻¹ of the point where [z0, z]
// leaves the triangle.
cplx retraction_psi(cplx z, cplx z0);

}  // namespace nsq
