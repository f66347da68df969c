#include "nsq/cauchy_green.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fftw3.h>

#include "nsq/branch.hpp"
#include "nsq/parallel.hpp"

namespace nsq {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int mode_of(int k, int n) {
  return k < n / 2 ? k : k - n;
}

fftw_complex* as_fftw(cplx* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

std::vector<double> breakpoints(const RVec& nodes, double a, double b, double r, int e, bool lower) {
  std::vector<double> bp{a, b};
  for (double x : nodes)
    if (x > a && x < b) bp.push_back(x);
  for (int j = 0; r > 0.0; ++j) {
    double h = r * std::ldexp(1.0, j) / e;
    double p = lower ? r - h : r + h;
    if (!(p > a && p < b)) break;
    bp.push_back(p);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> out;
  for (double x : bp)
    if (out.empty() || x - out.back() > 1e-14) out.push_back(x);
  return out;
}

// Rows e = 0..E-1 of ∫_a^b ratio(ρ)^e ℓ_j(ρ) dρ.
RMat kernel_moments(const DiscGrid& g, double a, double b, double r, bool lower) {
  const int e_count = g.ntheta() / 2 + 2;
  RMat out = RMat::Zero(e_count, g.nr());
  if (!(b > a)) return out;
  static const GaussLegendre gl16 = gauss_legendre(16);
  auto bp = breakpoints(g.radii(), a, b, r, e_count, lower);
  std::vector<double> pts, wts;
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
    double lo = bp[p], hi = bp[p + 1], h = 0.5 * (hi - lo);
    for (int q = 0; q < 16; ++q) {
      pts.push_back(lo + (gl16.nodes(q) + 1.0) * h);
      wts.push_back(gl16.weights(q) * h);
    }
  }
  const int nq = static_cast<int>(pts.size());
  RMat basis = g.radial_interp().basis(pts);
  RMat ker(e_count, nq);
  for (int q = 0; q < nq; ++q) {
    double ratio = lower ? pts[q] / r : r / pts[q];
    double v = wts[q];
    for (int e = 0; e < e_count; ++e) {
      ker(e, q) = v;
      v *= ratio;
    }
  }
  out.noalias() = ker * basis;
  return out;
}

RadialTable build_table(const DiscGrid& g, double r) {
  const int nt = g.ntheta();
  RadialTable t;
  t.r = r;
  RMat k_low = kernel_moments(g, 0.0, r, r, true);
  RMat l_up = kernel_moments(g, r, 1.0, r, false);
  t.w.resize(g.nr(), nt);
  for (int k = 0; k < nt; ++k) {
    int m = mode_of(k, nt);
    if (m <= 0)
      t.w.col(k) = 2.0 * k_low.row(1 - m).transpose();
    else
      t.w.col(k) = -2.0 * l_up.row(m - 1).transpose();
  }
  t.ell = g.radial_interp().basis(r);
  return t;
}

struct Series {
  std::vector<int> q;
  std::vector<cplx> c;
  void add(int qq, cplx cc) {
    q.push_back(qq);
    c.push_back(cc);
  }
  cplx at(double theta) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += c[i] * std::polar(1.0, q[i] * theta);
    return s;
  }
};

double bump(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  double x = (s - 0.5) / 0.5;
  double a = std::exp(-1.0 / (1.0 - x)), b = std::exp(-1.0 / x);
  return a / (a + b);
}

constexpr double kBumpRadius = 0.3;

// ∫ |ρ|² bump(|ζ-c|/ρ0) d²ζ over the disc, local polar coordinates at c.
double corner_exact(cplx c) {
  const GaussLegendre gl = gauss_legendre(300);
  const double base = std::arg(-c);
  const double pk = std::acos(kBumpRadius / 2.0);
  const double cuts[4] = {-0.5 * kPi, -pk, pk, 0.5 * kPi};
  double tot = 0.0;
  for (int seg = 0; seg < 3; ++seg) {
    double lo = cuts[seg], hi = cuts[seg + 1], hp = 0.5 * (hi - lo);
    for (int i = 0; i < gl.nodes.size(); ++i) {
      double p = lo + (gl.nodes(i) + 1.0) * hp;
      double wp = gl.weights(i) * hp;
      double smax = std::min(kBumpRadius, 2.0 * std::cos(p));
      double hs = 0.5 * std::sqrt(smax);
      cplx dir = std::polar(1.0, base + p);
      double acc = 0.0;
      for (int j = 0; j < gl.nodes.size(); ++j) {
        double sig = (gl.nodes(j) + 1.0) * hs;
        double s = sig * sig;
        double v = std::norm(rho_R(c + s * dir)) * bump(s / kBumpRadius) * s * 2.0 * sig;
        acc += gl.weights(j) * hs * v;
      }
      tot += wp * acc;
    }
  }
  return tot;
}

}  // namespace

CauchyGreen::CauchyGreen(GridPtr grid, Exec exec) : grid_(std::move(grid)), exec_(exec) {
  if (!grid_) throw ContractViolation("CauchyGreen: null grid");
  const int nt = grid_->ntheta(), nr = grid_->nr();
  {
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    std::vector<cplx> a(nt), b(nt);
    plan_fwd_ = fftw_plan_dft_1d(nt, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_1d(nt, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  rings_.resize(nr);
  for_each_index(exec_, nr, [&](int j) { rings_[j] = build_table(*grid_, grid_->radius(j)); });
  edge_ = build_table(*grid_, 1.0);
  r_nodes_.resize(grid_->size());
  rp_nodes_.resize(grid_->size());
  for (int i = 0; i < grid_->size(); ++i) {
    r_nodes_(i) = weight_R(grid_->node(i));
    rp_nodes_(i) = weight_R_prime(grid_->node(i));
  }
}

CauchyGreen::~CauchyGreen() {
  std::lock_guard<std::mutex> lk(fftw_planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

RadialTable CauchyGreen::table_at(double r) const {
  if (r < 0.0 || r > 1.0) throw DomainError("table_at: radius outside [0, 1]");
  return build_table(*grid_, r);
}

Spectrum CauchyGreen::spectrum(const CVec& f) const {
  const int nt = grid_->ntheta(), nr = grid_->nr();
  if (f.size() != grid_->size()) throw AlignmentError("spectrum: field size does not match the grid");
  Spectrum sp;
  sp.modes.resize(nr, nt);
  for_each_index(exec_, nr, [&](int j) {
    std::vector<cplx> in(f.data() + j * nt, f.data() + (j + 1) * nt), out(nt);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), as_fftw(in.data()), as_fftw(out.data()));
    for (int k = 0; k < nt; ++k)
      sp.modes(j, k) = out[k] / static_cast<double>(nt) * std::polar(1.0, -mode_of(k, nt) * kPi / nt);
  });
  sp.ext = CVec::Zero(nt);
  for (int k = 0; k < nt; ++k)
    if (mode_of(k, nt) <= 0) sp.ext(k) = edge_.w.col(k).cast<cplx>().dot(sp.modes.col(k));
  return sp;
}

CauchyGreen::Op CauchyGreen::op_of(Transform t) {
  switch (t) {
    case Transform::T: return Op::T;
    case Transform::T1: return Op::T1;
    default: return Op::T2;
  }
}

CauchyGreen::Op CauchyGreen::op_of(Derivative d) {
  switch (d) {
    case Derivative::S: return Op::S;
    case Derivative::S1: return Op::S1;
    default: return Op::S2;
  }
}

namespace {

enum class Kind { T, T1, T2, S, S1, S2, interp };

// Fourier series in θ of the requested quantity at radius r ≤ 1. For T2/S2
// `a` is H = T[g] + Σ conj(c_m) ζ^{-m} and `b` (S2 only) is H'.
void interior_series(Kind kind, const Spectrum& sp, const RadialTable& tb, bool at_node, int ring,
                     Series& a, Series& b) {
  const int nt = static_cast<int>(sp.modes.cols());
  const int nr = static_cast<int>(sp.modes.rows());
  const double r = tb.r;
  for (int k = 0; k < nt; ++k) {
    const int m = mode_of(k, nt);
    cplx fr;
    if (at_node) {
      fr = sp.modes(ring, k);
    } else {
      fr = 0.0;
      for (int i = 0; i < nr; ++i) fr += tb.ell(i) * sp.modes(i, k);
    }
    if (kind == Kind::interp) {
      a.add(m, fr);
      continue;
    }
    cplx tm = 0.0;
    for (int i = 0; i < nr; ++i) tm += tb.w(i, k) * sp.modes(i, k);
    switch (kind) {
      case Kind::T:
      case Kind::T1:
      case Kind::T2: a.add(m - 1, tm); break;
      case Kind::S:
      case Kind::S1: a.add(m - 2, (m - 1.0) * tm / r + fr); break;
      case Kind::S2:
        a.add(m - 1, tm);
        b.add(m - 2, (m - 1.0) * tm / r + fr);
        break;
      default: break;
    }
    if (m > 0) continue;
    const cplx cc = std::conj(sp.ext(k));
    switch (kind) {
      case Kind::T1: a.add(1 - m, -cc * std::pow(r, 1 - m)); break;
      case Kind::S1: a.add(-m, -(1.0 - m) * cc * std::pow(r, -m)); break;
      case Kind::T2: a.add(-m, cc * std::pow(r, -m)); break;
      case Kind::S2:
        a.add(-m, cc * std::pow(r, -m));
        if (m < 0) b.add(-m - 1, static_cast<double>(-m) * cc * std::pow(r, -m - 1));
        break;
      default: break;
    }
  }
}

void exterior_series(Kind kind, const Spectrum& sp, double r, Series& a) {
  const int nt = static_cast<int>(sp.modes.cols());
  for (int k = 0; k < nt; ++k) {
    const int m = mode_of(k, nt);
    if (m > 0) continue;
    if (kind == Kind::T)
      a.add(m - 1, sp.ext(k) * std::pow(r, m - 1));
    else
      a.add(m - 2, (m - 1.0) * sp.ext(k) * std::pow(r, m - 2));
  }
}

Kind kind_of(int op) {
  static const Kind table[] = {Kind::T, Kind::T1, Kind::T2, Kind::S, Kind::S1, Kind::S2};
  return table[op];
}

}  // namespace

CVec CauchyGreen::nodal_scalar(Op op, const CVec& f) const {
  const int nt = grid_->ntheta(), nr = grid_->nr();
  const bool weighted = op == Op::T2 || op == Op::S2;
  const Spectrum sp = spectrum(weighted ? CVec(f.cwiseQuotient(r_nodes_)) : f);
  const Kind kind = kind_of(static_cast<int>(op));
  CVec out(grid_->size());
  auto synth = [&](const Series& s, std::vector<cplx>& buf, std::vector<cplx>& res) {
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    for (std::size_t i = 0; i < s.q.size(); ++i) {
      int q = s.q[i];
      int slot = ((q % nt) + nt) % nt;
      buf[slot] += s.c[i] * std::polar(1.0, q * kPi / nt);
    }
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), as_fftw(buf.data()), as_fftw(res.data()));
  };
  for_each_index(exec_, nr, [&](int j) {
    Series a, b;
    interior_series(kind, sp, rings_[j], true, j, a, b);
    std::vector<cplx> buf(nt), va(nt), vb(nt);
    synth(a, buf, va);
    if (kind == Kind::S2) synth(b, buf, vb);
    for (int k = 0; k < nt; ++k) {
      const int idx = j * nt + k;
      switch (kind) {
        case Kind::T2: out(idx) = r_nodes_(idx) * va[k]; break;
        case Kind::S2: out(idx) = rp_nodes_(idx) * va[k] + r_nodes_(idx) * vb[k]; break;
        default: out(idx) = va[k]; break;
      }
    }
  });
  return out;
}

CMat CauchyGreen::nodal_matrix(Op op, const CMat& f) const {
  if (f.rows() != grid_->size()) throw AlignmentError("nodal: field size does not match the grid");
  CMat out(f.rows(), f.cols());
  for (int c = 0; c < f.cols(); ++c) out.col(c) = nodal_scalar(op, f.col(c));
  return out;
}

CMat CauchyGreen::nodal(Transform op, const CMat& f) const {
  return nodal_matrix(op_of(op), f);
}

CMat CauchyGreen::nodal(Derivative op, const CMat& f) const {
  return nodal_matrix(op_of(op), f);
}

GridField CauchyGreen::nodal(Transform op, const GridField& f) const {
  return GridField(grid_, nodal(op, f.values()));
}

GridField CauchyGreen::nodal(Derivative op, const GridField& f) const {
  return GridField(grid_, nodal(op, f.values()));
}

CMat CauchyGreen::evaluate_op(Op op, const GridField& f, const std::vector<cplx>& targets) const {
  if (f.grid() != grid_ && (f.grid()->nr() != grid_->nr() || f.grid()->ntheta() != grid_->ntheta()))
    throw AlignmentError("evaluate: field lives on a different grid");
  const int nt_targets = static_cast<int>(targets.size());
  const int d = f.dim();
  const bool weighted = op == Op::T2 || op == Op::S2;
  const bool derivative = op == Op::S || op == Op::S1 || op == Op::S2;
  const bool interp = static_cast<int>(op) < 0;
  const Kind kind = interp ? Kind::interp : kind_of(static_cast<int>(op));

  // group by radius so each off-grid table is built once
  std::map<double, std::vector<int>> groups;
  std::vector<double> theta(nt_targets);
  for (int t = 0; t < nt_targets; ++t) {
    cplx z = targets[t];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw EvaluationError("evaluate: non-finite target");
    double r = std::abs(z);
    if (std::abs(r - 1.0) < 1e-12) r = 1.0;
    if (r > 1.0 && op != Op::T && op != Op::S && !interp)
      throw DomainError("evaluate: symmetrized operators need targets in the closed disc");
    if (r > 1.0 && interp) throw DomainError("interpolate: target outside the closed disc");
    if (derivative && r < 1e-9) r = 1e-9;
    if (weighted && derivative) {
      for (const auto& pv : prevertices())
        if (std::abs(z - pv.point) < 1e-14) throw EvaluationError("evaluate: S2 is singular at a prevertex");
    }
    theta[t] = r == 0.0 ? 0.0 : std::arg(z);
    groups[r].push_back(t);
  }
  std::vector<std::pair<double, const std::vector<int>*>> glist;
  for (const auto& [r, idx] : groups) glist.emplace_back(r, &idx);

  std::vector<Spectrum> spectra(d);
  for (int c = 0; c < d; ++c) {
    CVec v = f.values().col(c);
    if (weighted) v = v.cwiseQuotient(r_nodes_);
    spectra[c] = spectrum(v);
  }
  const RVec& radii = grid_->radii();
  CMat out(nt_targets, d);
  for_each_index(exec_, static_cast<int>(glist.size()), [&](int gi) {
    const double r = glist[gi].first;
    const auto& idx = *glist[gi].second;
    RadialTable local;
    const RadialTable* tb = nullptr;
    int ring = -1;
    if (r <= 1.0) {
      auto it = std::lower_bound(radii.data(), radii.data() + radii.size(), r);
      if (it != radii.data() + radii.size() && *it == r) {
        ring = static_cast<int>(it - radii.data());
        tb = &rings_[ring];
      } else if (r == 1.0) {
        tb = &edge_;
      } else {
        local = build_table(*grid_, r);
        tb = &local;
      }
    }
    for (int c = 0; c < d; ++c) {
      Series a, b;
      if (r > 1.0)
        exterior_series(kind, spectra[c], r, a);
      else
        interior_series(kind, spectra[c], *tb, ring >= 0, ring, a, b);
      for (int t : idx) {
        const double th = theta[t];
        cplx va = a.at(th);
        if (kind == Kind::T2 || kind == Kind::S2) {
          cplx z = std::polar(r, th);
          if (kind == Kind::T2)
            va = weight_R(z) * va;
          else
            va = weight_R_prime(z) * va + weight_R(z) * b.at(th);
        }
        out(t, c) = va;
      }
    }
  });
  return out;
}

CMat CauchyGreen::evaluate(Transform op, const GridField& f, const std::vector<cplx>& targets) const {
  return evaluate_op(op_of(op), f, targets);
}

CMat CauchyGreen::evaluate(Derivative op, const GridField& f, const std::vector<cplx>& targets) const {
  return evaluate_op(op_of(op), f, targets);
}

CMat CauchyGreen::interpolate(const GridField& f, const std::vector<cplx>& targets) const {
  return evaluate_op(static_cast<Op>(-1), f, targets);
}

BoundaryTrace CauchyGreen::boundary(Transform op, const GridField& f) const {
  auto angles = boundary_angles(*grid_);
  std::vector<cplx> pts(angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) pts[k] = std::polar(1.0, angles[k]);
  return BoundaryTrace(angles, evaluate(op, f, pts));
}

const std::array<double, 3>& CauchyGreen::corner_weights() const {
  std::call_once(corner_once_, [&] {
    const auto& pv = prevertices();
    for (int c = 0; c < 3; ++c) {
      double exact = corner_exact(pv[c].point);
      double q = 0.0;
      for (int i = 0; i < grid_->size(); ++i) {
        cplx z = grid_->node(i);
        double b = bump(std::abs(z - pv[c].point) / kBumpRadius);
        if (b > 0.0) q += grid_->weight_at(i) * std::norm(rho_R(z)) * b;
      }
      corner_w_[c] = exact - q;
    }
  });
  return corner_w_;
}

double CauchyGreen::corrected_norm2(const CVec& v, const std::array<cplx, 3>& limits) const {
  if (v.size() != grid_->size()) throw AlignmentError("corrected_norm2: size mismatch");
  const int nt = grid_->ntheta();
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += grid_->weight(i / nt) * std::norm(v(i));
  const auto& e = corner_weights();
  for (int c = 0; c < 3; ++c) s += e[c] * std::norm(limits[c]);
  return s;
}

std::array<cplx, 3> CauchyGreen::s2_corner_limits(const CVec& f) const {
  const int nt = grid_->ntheta();
  const Spectrum sp = spectrum(f.cwiseQuotient(r_nodes_));
  std::array<cplx, 3> y{};
  const auto& pv = prevertices();
  for (int c = 0; c < 3; ++c) {
    const double th = std::arg(pv[c].point);
    cplx h = 0.0;
    for (int k = 0; k < nt; ++k) {
      const int m = mode_of(k, nt);
      if (m > 0) continue;
      h += sp.ext(k) * std::polar(1.0, (m - 1) * th) + std::conj(sp.ext(k)) * std::polar(1.0, -m * th);
    }
    y[c] = pv[c].kappa * h;
  }
  return y;
}

double CauchyGreen::s2_norm(const CVec& f) const {
  return std::sqrt(corrected_norm2(nodal_scalar(Op::S2, f), s2_corner_limits(f)));
}

CMat cauchy_T(const CauchyGreen& eng, const GridField& f, const std::vector<cplx>& targets) {
  return eng.evaluate(Transform::T, f, targets);
}

CMat op_T1(const CauchyGreen& eng, const GridField& f, const std::vector<cplx>& targets) {
  return eng.evaluate(Transform::T1, f, targets);
}

CMat op_T2(const CauchyGreen& eng, const GridField& f, const std::vector<cplx>& targets) {
  return eng.evaluate(Transform::T2, f, targets);
}

CMat beurling_S(const CauchyGreen& eng, const GridField& f, Derivative variant,
                const std::vector<cplx>& targets) {
  return eng.evaluate(variant, f, targets);
}

std::vector<cplx> default_probes() {
  std::vector<cplx> p;
  const double radii[] = {0.2, 0.35, 0.5, 0.65, 0.8};
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 8; ++k) p.push_back(std::polar(radii[i], 2.0 * kPi * (k + 0.37) / 8.0 + 0.1 * i));
  return p;
}

FdDerivatives fd_derivatives(const CauchyGreen& eng, Transform op, const GridField& f,
                             const std::vector<cplx>& points, double h) {
  const int n = static_cast<int>(points.size());
  std::vector<cplx> st;
  st.reserve(4 * n);
  for (cplx z : points) {
    double r = std::abs(z), th = std::arg(z);
    if (r <= h) throw EvaluationError("fd_derivatives: point too close to the origin for the polar stencil");
    st.push_back(std::polar(r + h, th));
    st.push_back(std::polar(r - h, th));
    st.push_back(std::polar(r, th + h / r));
    st.push_back(std::polar(r, th - h / r));
  }
  CMat v = eng.evaluate(op, f, st);
  FdDerivatives d{CMat(n, f.dim()), CMat(n, f.dim())};
  for (int i = 0; i < n; ++i) {
    double r = std::abs(points[i]), th = std::arg(points[i]);
    cplx e = std::polar(1.0, th);
    for (int c = 0; c < f.dim(); ++c) {
      cplx fr = (v(4 * i, c) - v(4 * i + 1, c)) / (2.0 * h);
      cplx ft = (v(4 * i + 2, c) - v(4 * i + 3, c)) / (2.0 * h / r);
      d.dbar(i, c) = 0.5 * e * (fr + kI * ft / r);
      d.dz(i, c) = 0.5 * std::conj(e) * (fr - kI * ft / r);
    }
  }
  return d;
}

double dbar_residual(const CauchyGreen& eng, const GridField& f, Transform op,
                     const std::function<void(cplx, cplx*)>& exact, const std::vector<cplx>& probes,
                     double h) {
  FdDerivatives d = fd_derivatives(eng, op, f, probes, h);
  CMat ref;
  if (exact) {
    ref.resize(static_cast<int>(probes.size()), f.dim());
    std::vector<cplx> row(f.dim());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      exact(probes[i], row.data());
      for (int c = 0; c < f.dim(); ++c) ref(static_cast<int>(i), c) = row[c];
    }
  } else {
    ref = eng.interpolate(f, probes);
  }
  return (d.dbar - ref).cwiseAbs().maxCoeff();
}

double re_boundary_residual(const BoundaryTrace& t) {
  return t.size() == 0 ? 0.0 : t.values().real().cwiseAbs().maxCoeff();
}

std::array<double, 3> arc_residuals(const BoundaryTrace& t) {
  std::array<double, 3> r{};
  const cplx rot[3] = {1.0 + kI, 1.0 - kI, 1.0};
  for (int i = 0; i < t.size(); ++i) {
    int a = t.arc(i) - 1;
    for (int j = 0; j < t.values().cols(); ++j) r[a] = std::max(r[a], std::abs((rot[a] * t.values()(i, j)).imag()));
  }
  return r;
}

std::string to_string(Transform t) {
  switch (t) {
    case Transform::T: return "T";
    case Transform::T1: return "T1";
    default: return "T2";
  }
}

std::string to_string(Derivative d) {
  switch (d) {
    case Derivative::S: return "S";
    case Derivative::S1: return "S1";
    default: return "S2";
  }
}

}  // namespace nsq
