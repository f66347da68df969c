#include "nsq/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace nsq {

json to_json(cplx z) {
  return json::array({z.real(), z.imag()});
}

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const ComplexSeq& x) {
  json e = json::array();
  for (int k = 0; k < x.size(); ++k) e.push_back(to_json(x.entries()(k)));
  return {{"offset", x.offset()}, {"entries", e}};
}

ComplexSeq seq_from_json(const json& j) {
  const auto& e = j.at("entries");
  CVec v(static_cast<int>(e.size()));
  for (std::size_t k = 0; k < e.size(); ++k) v(static_cast<int>(k)) = complex_from_json(e[k]);
  return ComplexSeq(v, j.value("offset", 0));
}

json matrix_to_json(const CMat& m) {
  json d = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) d.push_back(to_json(m(i, k)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", d}};
}

CMat matrix_from_json(const json& j) {
  const int r = j.at("rows").get<int>(), c = j.at("cols").get<int>();
  const auto& d = j.at("data");
  if (r < 0 || c < 0 || d.size() != static_cast<std::size_t>(r) * c)
    throw ConfigError("matrix: data length does not match rows × cols");
  CMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m(i, k) = complex_from_json(d[static_cast<std::size_t>(i) * c + k]);
  return m;
}

json real_matrix_to_json(const RMat& m) {
  json d = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) d.push_back(m(i, k));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", d}};
}

json to_json(const RealLinearOp& f) {
  return {{"P", matrix_to_json(f.P)}, {"Q", matrix_to_json(f.Q)}};
}

RealLinearOp real_op_from_json(const json& j) {
  return RealLinearOp(matrix_from_json(j.at("P")), matrix_from_json(j.at("Q")));
}

json to_json(const GridField& f) {
  const auto& g = *f.grid();
  json cols = json::array();
  for (int c = 0; c < f.dim(); ++c) {
    json col = json::array();
    for (int i = 0; i < f.size(); ++i) col.push_back(to_json(f.values()(i, c)));
    cols.push_back(col);
  }
  return {{"nr", g.nr()}, {"ntheta", g.ntheta()}, {"dim", f.dim()}, {"components", cols}};
}

json to_json(const BoundaryTrace& t) {
  json cols = json::array();
  for (int c = 0; c < t.dim(); ++c) {
    json col = json::array();
    for (int k = 0; k < t.size(); ++k) col.push_back(to_json(t.values()(k, c)));
    cols.push_back(col);
  }
  return {{"angles", t.angles()}, {"components", cols}};
}

json to_json(const DiscSolution& s) {
  json res = json::object();
  for (const auto& [k, v] : s.residuals) res[k] = v;
  return {{"grid", {{"nr", s.engine->grid()->nr()}, {"ntheta", s.engine->grid()->ntheta()}}},
          {"dw", s.dw()},
          {"z0", to_json(s.z0)},
          {"w0", to_json(ComplexSeq(s.w0))},
          {"tau", to_json(s.tau)},
          {"area", s.area},
          {"degree", s.degree},
          {"outer_iterations", s.outer_iterations},
          {"outer_history", s.outer_history},
          {"inner_iterations", s.last_inner.iterations},
          {"inner_ratio", s.last_inner.max_ratio},
          {"inner_rate", s.last_inner.rate},
          {"inner_a_priori", s.last_inner.a_priori},
          {"inner_derivative_bound", s.last_inner.derivative_bound},
          {"tau_near_boundary", s.tau_near_boundary},
          {"residuals", res},
          {"z", to_json(s.z)},
          {"w", to_json(s.w)},
          {"u", to_json(s.u)},
          {"v", to_json(s.v)},
          {"z_boundary", to_json(s.z_boundary)},
          {"w_boundary", to_json(s.w_boundary)}};
}

json to_json(const VerifyReport& r) {
  json a = json::array();
  for (const auto& c : r.checks)
    a.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"rule", c.rule}, {"pass", c.pass}});
  return a;
}

json to_json(const JacobianReport& r) {
  json sn = json::array();
  for (const auto& row : r.scale_norms) sn.push_back({{"s", row.s}, {"norm", row.norm}});
  return {{"symplectic_residual", r.symplectic_residual},
          {"identities", {r.identities.r1, r.identities.r2, r.identities.r3, r.identities.r4}},
          {"q_norm", r.q_norm},
          {"a_norm", r.a_norm},
          {"contraction", r.contraction},
          {"scale_norms", sn},
          {"pass", r.pass},
          {"pq", to_json(r.pq)}};
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& os, const GridField& f) {
  const auto& g = *f.grid();
  os << "node,r,theta";
  for (int c = 0; c < f.dim(); ++c) os << ",c" << c << "_re,c" << c << "_im";
  os << '\n';
  for (int i = 0; i < f.size(); ++i) {
    os << i << ',' << format_double(g.radius(i / g.ntheta())) << ',' << format_double(g.angle(i % g.ntheta()));
    for (int c = 0; c < f.dim(); ++c)
      os << ',' << format_double(f.values()(i, c).real()) << ',' << format_double(f.values()(i, c).imag());
    os << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<const BoundaryTrace*>& traces,
               const std::vector<std::string>& names) {
  if (traces.empty()) return;
  if (names.size() != traces.size()) throw AlignmentError("write_csv: one name per trace");
  const auto& first = *traces.front();
  os << "k,theta,arc";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    if (traces[t]->size() != first.size()) throw AlignmentError("write_csv: traces differ in length");
    for (int c = 0; c < traces[t]->dim(); ++c) os << ',' << names[t] << c << "_re," << names[t] << c << "_im";
  }
  os << '\n';
  for (int k = 0; k < first.size(); ++k) {
    os << k << ',' << format_double(first.angles()[k]) << ',' << first.arc(k);
    for (const auto* tr : traces)
      for (int c = 0; c < tr->dim(); ++c)
        os << ',' << format_double(tr->values()(k, c).real()) << ',' << format_double(tr->values()(k, c).imag());
    os << '\n';
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nsq
