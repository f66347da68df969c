// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "nsq/experiment.hpp"
#include "nsq/smooth_suite.hpp"

using namespace nsq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s [%s]\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void guarded(int id, const std::string& what, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

std::shared_ptr<const CauchyGreen> default_engine() {
  static auto eng = std::make_shared<const CauchyGreen>(DiscGrid::make(64, 256));
  return eng;
}

void criterion_1() {
  auto eng = default_engine();
  auto rnd = smooth_random(1);
  std::vector<std::function<cplx(cplx)>> fs{[](cplx) { return cplx(1.0); }, [](cplx z) { return std::conj(z); },
                                           rnd.f};
  double worst = 0.0, slowest = 0.0;
  for (auto op : {Transform::T, Transform::T1, Transform::T2}) {
    auto t0 = Clock::now();
    for (const auto& fn : fs) {
      auto f = GridField::sample(eng->grid(), fn);
      worst = std::max(worst, dbar_residual(*eng, f, op, [&](cplx z, cplx* o) { o[0] = fn(z); }));
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  report(1, worst <= 1e-4 && slowest <= 60.0, "dbar inverts T, T1, T2 at 64x256",
         "max residual " + fmt("%.3e", worst) + ", slowest transform " + fmt("%.2f", slowest) + " s");
}

void criterion_2() {
  auto eng = default_engine();
  auto one = GridField::sample(eng->grid(), [](cplx) { return cplx(1.0); });
  auto in = default_probes();
  in.insert(in.end(), {{0.0, 0.0}, {0.95, 0.1}, {-0.3, -0.93}});
  std::vector<cplx> out{2.0, {0.0, 1.5}, {-1.2, 0.7}, {3.0, -3.0}, {-1.05, -0.2}, {10.0, 10.0}};
  CMat t = cauchy_T(*eng, one, in), t1 = op_T1(*eng, one, in), to = cauchy_T(*eng, one, out);
  double e_in = 0.0, e_out = 0.0, e_t1 = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    e_in = std::max(e_in, std::abs(t(i, 0) - std::conj(in[i])));
    e_t1 = std::max(e_t1, std::abs(t1(i, 0) - cplx(0.0, -2.0 * in[i].imag())));
  }
  for (std::size_t i = 0; i < out.size(); ++i) e_out = std::max(e_out, std::abs(to(i, 0) - 1.0 / out[i]));
  double worst = std::max({e_in, e_out, e_t1});
  report(2, worst <= 1e-6, "closed forms of T[1] and T1[1]",
         "inside " + fmt("%.2e", e_in) + ", outside " + fmt("%.2e", e_out) + ", T1 " + fmt("%.2e", e_t1));
}

struct Defects {
  double s1 = 0.0, s2 = 0.0;
};

Defects suite_defects(const CauchyGreen& eng) {
  Defects d;
  for (const auto& fn : smooth_suite()) {
    auto f = GridField::sample(eng.grid(), fn.f);
    double n = f.l2_norm();
    d.s1 = std::max(d.s1, std::abs(eng.nodal(Derivative::S1, f).l2_norm() / n - 1.0));
    d.s2 = std::max(d.s2, std::abs(eng.s2_norm(f.values().col(0)) / n - 1.0));
  }
  return d;
}

void criterion_3() {
  auto coarse = suite_defects(*default_engine());
  CauchyGreen fine_eng(DiscGrid::make(96, 384));
  auto fine = suite_defects(fine_eng);
  bool ok = coarse.s1 <= 1e-3 && coarse.s2 <= 1e-3 && fine.s1 < coarse.s1 && fine.s2 < coarse.s2;
  report(3, ok, "S1, S2 isometry on the smooth suite, decreasing on refinement",
         "S1 " + fmt("%.3e", coarse.s1) + " -> " + fmt("%.3e", fine.s1) + ", S2 " + fmt("%.3e", coarse.s2) + " -> " +
             fmt("%.3e", fine.s2));
}

void criterion_4() {
  auto eng = default_engine();
  std::vector<std::function<cplx(cplx)>> fs{smooth_random(1).f, smooth_random(2).f, smooth_random(3).f};
  for (const auto& s : smooth_suite()) fs.push_back(s.f);
  double re = 0.0, arc = 0.0;
  for (const auto& fn : fs) {
    auto f = GridField::sample(eng->grid(), fn);
    re = std::max(re, re_boundary_residual(eng->boundary(Transform::T1, f)));
    auto a = arc_residuals(eng->boundary(Transform::T2, f));
    arc = std::max({arc, a[0], a[1], a[2]});
  }
  report(4, re <= 1e-4 && arc <= 1e-3, "boundary conditions of T1 and T2",
         "max |Re T1 f| " + fmt("%.2e", re) + ", T2 arc residual " + fmt("%.2e", arc));
}

void criterion_5() {
  double ident = 0.0, inv = 0.0, a_max = 0.0, law = 0.0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> spread(0.05, 1.5);
  for (int k = 0; k < 1000; ++k) {
    const int dim = 1 + k % 16;
    auto f = random_symplectic(dim, spread(rng), 100000 + k);
    ident = std::max(ident, symplectic_residuals(f).max());
    auto id = compose(inverse_symplectic(f), f);
    inv = std::max(inv, std::max((id.P - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff(), id.Q.cwiseAbs().maxCoeff()));
    a_max = std::max(a_max, Eigen::JacobiSVD<CMat>(complex_representation(f)).singularValues()(0));
  }
  for (double t = -3.0; t <= 3.0; t += 0.25)
    for (double phi = 0.0; phi < 2 * kPi; phi += 0.7) {
      CMat P(1, 1), Q(1, 1);
      P(0, 0) = std::cosh(t);
      Q(0, 0) = std::sinh(t) * std::polar(1.0, phi);
      law = std::max(law, std::abs(std::abs(complex_representation(RealLinearOp(P, Q))(0, 0)) - std::abs(std::tanh(t))));
    }
  bool ok = ident <= 1e-10 && inv <= 1e-10 && a_max < 1.0 && law <= 1e-12;
  report(5, ok, "symplectic calculus on 1000 random operators and the tanh law",
         "identities " + fmt("%.2e", ident) + ", inverse " + fmt("%.2e", inv) + ", max |A| " + fmt("%.6f", a_max) +
             ", tanh law " + fmt("%.2e", law));
}

void criterion_6() {
  auto eng = default_engine();
  const cplx z0(0.0, 0.3);
  CVec w0(2);
  w0 << cplx(0.2, -0.1), cplx(0.0, 0.4);
  auto t0 = Clock::now();
  auto s = outer_solve(eng, StructureField::zero(3), z0, w0);
  double secs = seconds_since(t0);
  double ez = 0.0;
  for (int i = 0; i < s.z.size(); ++i) ez = std::max(ez, std::abs(s.z.values()(i, 0) - schwarz_christoffel(eng->grid()->node(i))));
  double ew = 0.0;
  for (int j = 0; j < 2; ++j) ew = std::max(ew, (s.w.values().col(j).array() - w0(j)).abs().maxCoeff());
  double et = std::abs(s.tau - sc_inverse(z0));
  bool ok = ez <= 1e-12 && ew <= 1e-12 && std::abs(s.area - 1.0) <= 2e-3 && s.degree == 1 && et <= 1e-6 && secs <= 30.0;
  report(6, ok, "disc solver with A = 0",
         "area " + fmt("%.7f", s.area) + ", degree " + std::to_string(s.degree) + ", tau error " + fmt("%.1e", et) +
             ", z-Phi " + fmt("%.1e", ez) + ", " + fmt("%.2f", secs) + " s");
}

void criterion_7() {
  auto eng = default_engine();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  CMat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) a(i, k) = cplx(g(rng), g(rng));
  a *= 0.2 / Eigen::JacobiSVD<CMat>(a).singularValues()(0);
  auto field = StructureField::constant(a);
  auto t0 = Clock::now();
  auto s = outer_solve(eng, field, schwarz_christoffel(0.0), CVec::Zero(2));
  auto rep = verify_solution(s, field);
  double secs = seconds_since(t0);
  const double ratio = s.last_inner.max_ratio;
  bool ok = rep.pass() && ratio <= 0.22 && secs <= 300.0;
  report(7, ok, "disc solver with constant |A| = 0.2, d_w = 2",
         "outer " + std::to_string(s.outer_iterations) + " iterations, cr " + fmt("%.1e", rep.get("cr_residual").value) +
             ", attachment " + fmt("%.1e", rep.get("boundary_attachment").value) + ", area " + fmt("%.6f", s.area) +
             ", degree " + std::to_string(s.degree) + ", inner ratio " + fmt("%.4f", ratio) + " (rate " + fmt("%.4f", s.last_inner.rate) + "), " + fmt("%.1f", secs) +
             " s");
}

void criterion_8() {
  auto a = CouplingMatrix::nearest_neighbor(32);
  auto f = Nonlinearity::power(1.0);
  auto u0 = initial_state("sech", 32, 0.8);
  const double n0 = u0.u.entries().norm(), h0 = hamiltonian(u0, a, f);
  auto tr = split_step_trajectory(u0, a, f, 1.0, 1e-3);
  double nd = 0.0;
  for (const auto& s : tr.states) nd = std::max(nd, std::abs(s.u.entries().norm() - n0));
  double e1 = std::abs(hamiltonian(tr.states.back(), a, f) - h0);
  double e2 = std::abs(hamiltonian(split_step_flow(u0, a, f, 1.0, 5e-4), a, f) - h0);
  auto z = CouplingMatrix::zero(32);
  double ex = (split_step_flow(u0, z, f, 1.0, 1e-3).u.entries() - explicit_phase_solution(u0, f, 1.0).entries())
                  .cwiseAbs()
                  .maxCoeff();
  double ratio = e1 / e2;
  bool ok = nd <= 1e-12 && ratio >= 3.5 && ratio <= 4.5 && ex <= 1e-12;
  report(8, ok, "DNLS norm conservation, second order energy drift, explicit A = 0 flow",
         "norm drift " + fmt("%.1e", nd) + ", drift ratio " + fmt("%.4f", ratio) + ", explicit " + fmt("%.1e", ex));
}

void criterion_9() {
  ExperimentConfig c;
  c.run.kind = ExperimentKind::dnls;
  c.dnls.n = 8;
  c.dnls.t = 0.5;
  c.dnls.amp = 1.0;
  c.dnls.width = 3.0;
  c.dnls.init = "random";
  c.dnls.trials = 20;
  c.dnls.s_list = "0,1";
  c.dnls.check = "gronwall,jacobian";
  auto r = run(c);
  const auto& g0 = r.get("gronwall_s0");
  const auto& g1 = r.get("gronwall_s1");
  const auto& js = r.get("jacobian_symplectic");
  const auto& jc = r.get("jacobian_contraction");
  bool ok = g0.pass && g1.pass && js.pass && jc.pass && js.value <= 1e-5 && jc.value < 1.0;
  report(9, ok, "Gronwall bound over 20 trajectories and the flow Jacobian",
         "worst ratio s=0 " + fmt("%.3e", g0.value) + ", s=1 " + fmt("%.3e", g1.value) + ", symplectic residual " +
             fmt("%.2e", js.value) + ", |A| " + fmt("%.4f", jc.value));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10() {
  const auto base = std::filesystem::temp_directory_path() / "nsq_acceptance_pipeline";
  std::filesystem::remove_all(base);
  ExperimentConfig c;
  c.run.kind = ExperimentKind::nonsqueeze_pipeline;
  c.run.seed = 3;
  c.run.out = (base / "first").string();
  auto r1 = run(c);
  c.run.out = (base / "second").string();
  auto r2 = run(c);
  int files = 0, differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(base / "first")) {
    ++files;
    auto other = base / "second" / entry.path().filename();
    if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  int second = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(base / "second")) ++second;
  bool ok = files >= 4 && files == second && differing == 0 && r1.pass() && r2.pass();
  report(10, ok, "pipeline artifacts are byte-identical across runs",
         std::to_string(files) + " files, " + std::to_string(differing) + " differ, pipeline " +
             (r1.pass() ? "pass" : "fail"));
  std::filesystem::remove_all(base);
}

}  // namespace

int main() {
  guarded(1, "dbar inverts T, T1, T2 at 64x256", criterion_1);
  guarded(2, "closed forms of T[1] and T1[1]", criterion_2);
  guarded(3, "S1, S2 isometry on the smooth suite, decreasing on refinement", criterion_3);
  guarded(4, "boundary conditions of T1 and T2", criterion_4);
  guarded(5, "symplectic calculus on 1000 random operators and the tanh law", criterion_5);
  guarded(6, "disc solver with A = 0", criterion_6);
  guarded(7, "disc solver with constant |A| = 0.2, d_w = 2", criterion_7);
  guarded(8, "DNLS norm conservation, second order energy drift, explicit A = 0 flow", criterion_8);
  guarded(9, "Gronwall bound over 20 trajectories and the flow Jacobian", criterion_9);
  guarded(10, "pipeline artifacts are byte-identical across runs", criterion_10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
