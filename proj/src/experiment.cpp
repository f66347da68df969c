#include "nsq/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nsq/cauchy_green.hpp"
#include "nsq/smooth_suite.hpp"

namespace nsq {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::validate_ops: return "validate-ops";
    case ExperimentKind::solve_disc: return "solve-disc";
    case ExperimentKind::dnls: return "dnls";
    case ExperimentKind::nonsqueeze_pipeline: return "nonsqueeze-pipeline";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::validate_ops, ExperimentKind::solve_disc, ExperimentKind::dnls,
                 ExperimentKind::nonsqueeze_pipeline})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

template <class T>
T parse_scalar(const std::string& key, const std::string& raw);

template <>
std::string parse_scalar<std::string>(const std::string&, const std::string& raw) {
  return trim(raw);
}

template <>
int parse_scalar<int>(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  std::size_t pos = 0;
  try {
    long v = std::stol(s, &pos);
    if (pos == s.size() && v >= INT32_MIN && v <= INT32_MAX) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + raw + "'");
}

template <>
std::uint64_t parse_scalar<std::uint64_t>(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  std::size_t pos = 0;
  try {
    if (!s.empty() && s[0] != '-') {
      unsigned long long v = std::stoull(s, &pos);
      if (pos == s.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + raw + "'");
}

template <>
double parse_scalar<double>(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  std::size_t pos = 0;
  try {
    double v = std::stod(s, &pos);
    if (pos == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a finite number, got '" + raw + "'");
}

template <>
bool parse_scalar<bool>(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

template <>
ExperimentKind parse_scalar<ExperimentKind>(const std::string&, const std::string& raw) {
  return experiment_kind_from_string(trim(raw));
}

template <class T>
json scalar_json(const T& v) {
  return v;
}
template <>
json scalar_json<ExperimentKind>(const ExperimentKind& v) {
  return to_string(v);
}

// One entry per key; assigns from text and renders to JSON.
struct FieldRef {
  std::function<void(const std::string&)> set;
  std::function<json()> get;
};

template <class T>
FieldRef ref(const std::string& key, T& field) {
  return {[key, &field](const std::string& raw) { field = parse_scalar<T>(key, raw); },
          [&field]() { return scalar_json(field); }};
}

std::vector<std::pair<std::string, FieldRef>> fields(ExperimentConfig& c) {
  std::vector<std::pair<std::string, FieldRef>> f;
  auto add = [&](const std::string& k, auto& member) { f.emplace_back(k, ref(k, member)); };
  add("run.kind", c.run.kind);
  add("run.out", c.run.out);
  add("run.seed", c.run.seed);
  add("grid.nr", c.grid.nr);
  add("grid.ntheta", c.grid.ntheta);
  add("validate.dbar_tol", c.validate.dbar_tol);
  add("validate.closed_tol", c.validate.closed_tol);
  add("validate.iso_tol", c.validate.iso_tol);
  add("validate.re_tol", c.validate.re_tol);
  add("validate.arc_tol", c.validate.arc_tol);
  add("validate.refine", c.validate.refine);
  add("validate.refine_nr", c.validate.refine_nr);
  add("validate.refine_ntheta", c.validate.refine_ntheta);
  add("disc.dw", c.disc.dw);
  add("disc.z0", c.disc.z0);
  add("disc.w0", c.disc.w0);
  add("disc.a", c.disc.a);
  add("disc.damping", c.disc.damping);
  add("disc.outer_tol", c.disc.outer_tol);
  add("disc.outer_max_iter", c.disc.outer_max_iter);
  add("disc.inner_tol", c.disc.inner_tol);
  add("disc.inner_max_iter", c.disc.inner_max_iter);
  add("disc.cr_tol", c.disc.cr_tol);
  add("disc.attach_tol", c.disc.attach_tol);
  add("disc.area_tol", c.disc.area_tol);
  add("disc.ratio_slack", c.disc.ratio_slack);
  add("dnls.n", c.dnls.n);
  add("dnls.p", c.dnls.p);
  add("dnls.coupling", c.dnls.coupling);
  add("dnls.coupling_strength", c.dnls.coupling_strength);
  add("dnls.t", c.dnls.t);
  add("dnls.dt", c.dnls.dt);
  add("dnls.init", c.dnls.init);
  add("dnls.amp", c.dnls.amp);
  add("dnls.width", c.dnls.width);
  add("dnls.kick", c.dnls.kick);
  add("dnls.check", c.dnls.check);
  add("dnls.samples", c.dnls.samples);
  add("dnls.s_list", c.dnls.s_list);
  add("dnls.trials", c.dnls.trials);
  add("dnls.eps", c.dnls.eps);
  add("dnls.norm_tol", c.dnls.norm_tol);
  add("dnls.ratio_lo", c.dnls.ratio_lo);
  add("dnls.ratio_hi", c.dnls.ratio_hi);
  add("dnls.explicit_tol", c.dnls.explicit_tol);
  add("dnls.jacobian_tol", c.dnls.jacobian_tol);
  add("dnls.variational_tol", c.dnls.variational_tol);
  add("pipeline.n", c.pipeline.n);
  add("pipeline.p", c.pipeline.p);
  add("pipeline.t", c.pipeline.t);
  add("pipeline.dt", c.pipeline.dt);
  add("pipeline.eps", c.pipeline.eps);
  add("pipeline.amp", c.pipeline.amp);
  add("pipeline.site", c.pipeline.site);
  return f;
}

void assign_all(ExperimentConfig& c, const std::vector<std::pair<std::string, std::string>>& kv) {
  auto fs = fields(c);
  std::vector<std::string> unknown;
  for (const auto& [k, v] : kv) {
    auto it = std::find_if(fs.begin(), fs.end(), [&](const auto& f) { return f.first == k; });
    if (it == fs.end())
      unknown.push_back(k);
    else
      it->second.set(v);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
}

std::string json_scalar_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_double(v.get<double>());
  throw ConfigError(key + ": expected a scalar value");
}

}  // namespace

ExperimentConfig parse_config_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& [sec, body] : tree) {
    if (body.empty()) {
      kv.emplace_back(sec, body.data());
      continue;
    }
    for (const auto& [key, val] : body) kv.emplace_back(sec + "." + key, val.data());
  }
  ExperimentConfig c;
  assign_all(c, kv);
  validate_config(c);
  return c;
}

ExperimentConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& [sec, body] : j.items()) {
    if (!body.is_object()) {
      kv.emplace_back(sec, json_scalar_text(sec, body));
      continue;
    }
    for (const auto& [key, val] : body.items()) kv.emplace_back(sec + "." + key, json_scalar_text(sec + "." + key, val));
  }
  ExperimentConfig c;
  assign_all(c, kv);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return is_json ? parse_config_json(ss.str()) : parse_config_ini(ss.str());
}

void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value) {
  assign_all(c, {{key, value}});
}

std::vector<std::string> config_keys() {
  ExperimentConfig c;
  std::vector<std::string> out;
  for (const auto& f : fields(c)) out.push_back(f.first);
  return out;
}

json config_to_json(const ExperimentConfig& cc) {
  ExperimentConfig c = cc;
  json j = json::object();
  for (const auto& [key, f] : fields(c)) {
    if (key == "run.out") continue;
    auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = f.get();
  }
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  return fnv1a_hex(config_to_json(c).dump());
}

cplx parse_complex(const std::string& s) {
  auto parts = parse_double_list(s);
  if (parts.size() == 1) return parts[0];
  if (parts.size() != 2) throw ConfigError("expected a complex number as 're,im', got '" + s + "'");
  return {parts[0], parts[1]};
}

std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<cplx> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!trim(item).empty()) out.push_back(parse_complex(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_scalar<double>("list", item));
  return out;
}

void validate_config(const ExperimentConfig& c) {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& key) {
    if (!ok) bad.push_back(key);
  };
  need(c.grid.nr >= 2, "grid.nr");
  need(c.grid.ntheta >= 4 && c.grid.ntheta % 4 == 0, "grid.ntheta");
  need(c.validate.refine_nr >= 2, "validate.refine_nr");
  need(c.validate.refine_ntheta >= 4 && c.validate.refine_ntheta % 4 == 0, "validate.refine_ntheta");
  need(c.disc.dw >= 1, "disc.dw");
  need(c.disc.a >= 0.0 && c.disc.a < 1.0, "disc.a");
  need(c.disc.damping > 0.0 && c.disc.damping <= 1.0, "disc.damping");
  need(c.disc.outer_tol > 0.0 && c.disc.inner_tol > 0.0, "disc.outer_tol/inner_tol");
  need(c.disc.outer_max_iter >= 1 && c.disc.inner_max_iter >= 1, "disc.outer_max_iter/inner_max_iter");
  need(c.dnls.n >= 0, "dnls.n");
  need(c.dnls.p >= 0.0, "dnls.p");
  need(c.dnls.t >= 0.0, "dnls.t");
  need(c.dnls.dt > 0.0, "dnls.dt");
  need(c.dnls.samples >= 1, "dnls.samples");
  need(c.dnls.trials >= 1, "dnls.trials");
  need(c.dnls.eps > 0.0, "dnls.eps");
  need(c.dnls.init == "sech" || c.dnls.init == "random", "dnls.init");
  need(c.pipeline.n >= 0, "pipeline.n");
  need(c.pipeline.p > 0.0, "pipeline.p");
  need(c.pipeline.t >= 0.0 && c.pipeline.dt > 0.0 && c.pipeline.eps > 0.0, "pipeline.t/dt/eps");
  need(c.pipeline.site >= -c.pipeline.n && c.pipeline.site + c.disc.dw <= c.pipeline.n, "pipeline.site");
  {
    std::set<std::string> known{"norm", "energy", "explicit", "gronwall", "jacobian"};
    std::stringstream ss(c.dnls.check);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty() && !known.count(trim(item))) bad.push_back("dnls.check");
  }
  try {
    parse_complex(c.disc.z0);
    auto w = parse_complex_list(c.disc.w0);
    if (!w.empty() && static_cast<int>(w.size()) != c.disc.dw) bad.push_back("disc.w0");
    parse_double_list(c.dnls.s_list);
  } catch (const ConfigError&) {
    bad.push_back("disc.z0/w0 or dnls.s_list");
  }
  if (!bad.empty()) {
    std::string msg = "invalid config values:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg);
  }
}

bool RunReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check& RunReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("RunReport: no check named " + name);
}

namespace {

void check_le(std::vector<Check>& out, const std::string& name, double v, double tol) {
  out.push_back({name, v, tol, std::isfinite(v) && v <= tol, "<="});
}

void check_lt(std::vector<Check>& out, const std::string& name, double v, double tol) {
  out.push_back({name, v, tol, std::isfinite(v) && v < tol, "<"});
}

void check_range(std::vector<Check>& out, const std::string& name, double v, double lo, double hi) {
  out.push_back({name, v, hi, std::isfinite(v) && v >= lo && v <= hi,
                 "in [" + format_double(lo) + ", " + format_double(hi) + "]"});
}

std::string header_line(const RunReport& r) {
  return "# nsq schema " + std::to_string(r.schema_version) + " kind " + to_string(r.kind) + " config " +
         r.config_hash + "\n";
}

std::string checks_csv(const RunReport& r) {
  std::ostringstream os;
  os << header_line(r) << "name,value,tol,rule,pass\n";
  for (const auto& c : r.checks)
    os << c.name << ',' << format_double(c.value) << ',' << format_double(c.tol) << ",\"" << c.rule << "\","
       << (c.pass ? 1 : 0) << '\n';
  return os.str();
}

json checks_json(const std::vector<Check>& cs) {
  json a = json::array();
  for (const auto& c : cs)
    a.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"rule", c.rule}, {"pass", c.pass}});
  return a;
}

double max_abs_diff(const CMat& a, const CMat& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- validate-ops

struct SuiteDefects {
  std::vector<double> s1, s2;
  double max_s1 = 0.0, max_s2 = 0.0;
};

SuiteDefects suite_defects(const CauchyGreen& eng, const std::vector<SmoothFunction>& suite) {
  SuiteDefects d;
  for (const auto& fn : suite) {
    auto f = GridField::sample(eng.grid(), fn.f);
    double n = f.l2_norm();
    d.s1.push_back(std::abs(eng.nodal(Derivative::S1, f).l2_norm() / n - 1.0));
    d.s2.push_back(std::abs(eng.s2_norm(f.values().col(0)) / n - 1.0));
    d.max_s1 = std::max(d.max_s1, d.s1.back());
    d.max_s2 = std::max(d.max_s2, d.s2.back());
  }
  return d;
}

void run_validate(const ExperimentConfig& c, RunReport& r) {
  const auto& v = c.validate;
  auto grid = DiscGrid::make(c.grid.nr, c.grid.ntheta);
  CauchyGreen eng(grid);
  auto rnd = smooth_random(c.run.seed);
  struct Named {
    std::string name;
    std::function<cplx(cplx)> f;
  };
  std::vector<Named> inputs{{"one", [](cplx) { return cplx(1.0); }},
                            {"conj", [](cplx z) { return std::conj(z); }},
                            {"random", rnd.f}};
  for (auto op : {Transform::T, Transform::T1, Transform::T2})
    for (const auto& in : inputs) {
      auto f = GridField::sample(grid, in.f);
      double res = dbar_residual(eng, f, op, [&](cplx z, cplx* o) { o[0] = in.f(z); });
      check_le(r.checks, "dbar_" + to_string(op) + "_" + in.name, res, v.dbar_tol);
    }

  auto one = GridField::sample(grid, [](cplx) { return cplx(1.0); });
  auto probes = default_probes();
  CMat t_in = eng.evaluate(Transform::T, one, probes);
  CMat t1_in = eng.evaluate(Transform::T1, one, probes);
  CMat s_in = eng.evaluate(Derivative::S, one, probes);
  double e_in = 0.0, e_t1 = 0.0, e_s = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    e_in = std::max(e_in, std::abs(t_in(i, 0) - std::conj(probes[i])));
    e_t1 = std::max(e_t1, std::abs(t1_in(i, 0) - cplx(0.0, -2.0 * probes[i].imag())));
    e_s = std::max(e_s, std::abs(s_in(i, 0)));
  }
  std::vector<cplx> outside{2.0, {0.0, 1.5}, {-1.2, 0.7}, {3.0, -3.0}, {-1.05, -0.2}};
  CMat t_out = eng.evaluate(Transform::T, one, outside);
  double e_out = 0.0;
  for (std::size_t i = 0; i < outside.size(); ++i) e_out = std::max(e_out, std::abs(t_out(i, 0) - 1.0 / outside[i]));
  check_le(r.checks, "closed_T_inside", e_in, v.closed_tol);
  check_le(r.checks, "closed_T_outside", e_out, v.closed_tol);
  check_le(r.checks, "closed_T1", e_t1, v.closed_tol);
  check_le(r.checks, "closed_S", e_s, v.closed_tol);

  auto suite = smooth_suite();
  auto d = suite_defects(eng, suite);
  check_le(r.checks, "isometry_S1", d.max_s1, v.iso_tol);
  check_le(r.checks, "isometry_S2", d.max_s2, v.iso_tol);

  double re_t1 = 0.0, arc = 0.0;
  std::vector<std::function<cplx(cplx)>> bc_inputs{rnd.f};
  for (const auto& fn : suite) bc_inputs.push_back(fn.f);
  for (const auto& fn : bc_inputs) {
    auto f = GridField::sample(grid, fn);
    re_t1 = std::max(re_t1, re_boundary_residual(eng.boundary(Transform::T1, f)));
    auto a = arc_residuals(eng.boundary(Transform::T2, f));
    arc = std::max({arc, a[0], a[1], a[2]});
  }
  check_le(r.checks, "boundary_re_T1", re_t1, v.re_tol);
  check_le(r.checks, "boundary_arcs_T2", arc, v.arc_tol);

  std::ostringstream iso;
  iso << header_line(r) << "function,grid,s1_defect,s2_defect\n";
  auto rows = [&](const std::string& tag, const SuiteDefects& sd) {
    for (std::size_t i = 0; i < suite.size(); ++i)
      iso << suite[i].name << ',' << tag << ',' << format_double(sd.s1[i]) << ',' << format_double(sd.s2[i]) << '\n';
  };
  rows(std::to_string(c.grid.nr) + "x" + std::to_string(c.grid.ntheta), d);
  r.data["isometry_max"] = {{"S1", d.max_s1}, {"S2", d.max_s2}};
  if (v.refine) {
    auto g2 = DiscGrid::make(v.refine_nr, v.refine_ntheta);
    CauchyGreen eng2(g2);
    auto d2 = suite_defects(eng2, suite);
    rows(std::to_string(v.refine_nr) + "x" + std::to_string(v.refine_ntheta), d2);
    check_lt(r.checks, "isometry_S1_refined_ratio", d2.max_s1 / d.max_s1, 1.0);
    check_lt(r.checks, "isometry_S2_refined_ratio", d2.max_s2 / d.max_s2, 1.0);
    r.data["isometry_refined_max"] = {{"S1", d2.max_s1}, {"S2", d2.max_s2}};
  }
  r.artifacts["isometry.csv"] = iso.str();
}

// ---------------------------------------------------------------- solve-disc

StructureField make_structure(int dim, double a, std::uint64_t seed) {
  if (a == 0.0) return StructureField::zero(dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) m(i, k) = cplx(g(rng), g(rng));
  m *= a / Eigen::JacobiSVD<CMat>(m).singularValues()(0);
  return StructureField::constant(m);
}

CVec resolve_w0(const ExperimentConfig& c) {
  auto w = parse_complex_list(c.disc.w0);
  CVec out = CVec::Zero(c.disc.dw);
  for (std::size_t j = 0; j < w.size(); ++j) out(static_cast<int>(j)) = w[j];
  return out;
}

OuterOptions outer_options(const ExperimentConfig& c) {
  OuterOptions o;
  o.damping = c.disc.damping;
  o.tol = c.disc.outer_tol;
  o.max_iter = c.disc.outer_max_iter;
  o.inner_tol = c.disc.inner_tol;
  o.inner_max_iter = c.disc.inner_max_iter;
  return o;
}

VerifyTolerances verify_tolerances(const ExperimentConfig& c) {
  VerifyTolerances t;
  t.cr = c.disc.cr_tol;
  t.attach = c.disc.attach_tol;
  t.area = c.disc.area_tol;
  t.outer = c.disc.outer_tol;
  return t;
}

// Solves, verifies and records a disc run; returns false when the outer loop fails.
bool solve_and_report(const ExperimentConfig& c, const StructureField& field, RunReport& r) {
  auto grid = DiscGrid::make(c.grid.nr, c.grid.ntheta);
  auto eng = std::make_shared<const CauchyGreen>(grid);
  const cplx z0 = parse_complex(c.disc.z0);
  const CVec w0 = resolve_w0(c);
  DiscSolution s;
  try {
    s = outer_solve(eng, field, z0, w0, outer_options(c));
  } catch (const ConvergenceError& e) {
    check_le(r.checks, "outer_converged", e.history.empty() ? INFINITY : e.history.back(), c.disc.outer_tol);
    r.data["outer_history"] = e.history;
    return false;
  }
  auto vr = verify_solution(s, field, verify_tolerances(c));
  r.checks.insert(r.checks.end(), vr.checks.begin(), vr.checks.end());
  if (field.is_zero()) {
    const auto& sc = SchwarzChristoffel::instance();
    double ez = 0.0, ew = 0.0;
    for (int i = 0; i < s.z.size(); ++i) ez = std::max(ez, std::abs(s.z.values()(i, 0) - sc.map(grid->node(i / grid->ntheta(), i % grid->ntheta()))));
    for (int i = 0; i < s.w.size(); ++i) ew = std::max(ew, (s.w.values().row(i).transpose() - w0).cwiseAbs().maxCoeff());
    check_le(r.checks, "conformal_z", ez, 1e-6);
    check_le(r.checks, "constant_w", ew, 1e-12);
    check_le(r.checks, "tau_inverse", std::abs(s.tau - sc_inverse(z0)), 1e-6);
  } else {
    check_le(r.checks, "inner_ratio", s.last_inner.max_ratio, field.bound() + c.disc.ratio_slack);
  }
  r.data["solution"] = {{"tau", to_json(s.tau)},
                        {"area", s.area},
                        {"degree", s.degree},
                        {"outer_iterations", s.outer_iterations},
                        {"inner_iterations", s.last_inner.iterations},
                        {"inner_ratio", s.last_inner.max_ratio},
                        {"inner_rate", s.last_inner.rate},
                        {"a_bound", field.bound()}};
  r.artifacts["solution.json"] = to_json(s).dump(1) + "\n";
  std::ostringstream b;
  b << header_line(r);
  write_csv(b, {&s.z_boundary, &s.w_boundary}, {"z", "w"});
  r.artifacts["boundary.csv"] = b.str();
  return true;
}

void run_solve_disc(const ExperimentConfig& c, RunReport& r) {
  auto field = make_structure(1 + c.disc.dw, c.disc.a, c.run.seed);
  solve_and_report(c, field, r);
}

// ---------------------------------------------------------------- dnls

CouplingMatrix resolve_coupling(const ExperimentConfig::Dnls& d) {
  if (d.coupling == "cubic-nn") return CouplingMatrix::nearest_neighbor(d.n, d.coupling_strength);
  if (d.coupling == "none") return CouplingMatrix::zero(d.n);
  std::ifstream in(d.coupling);
  if (!in) throw ConfigError("dnls.coupling: cannot read coupling file " + d.coupling);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("dnls.coupling: " + std::string(e.what()));
  }
  CMat a = matrix_from_json(j.contains("matrix") ? j.at("matrix") : j);
  if (a.rows() != 2 * d.n + 1) throw ConfigError("dnls.coupling: matrix size must be 2·dnls.n + 1");
  return CouplingMatrix(a, -d.n);
}

Nonlinearity resolve_nonlinearity(double p) {
  return p > 0.0 ? Nonlinearity::power(p) : Nonlinearity::zero();
}

std::set<std::string> check_set(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.insert(trim(item));
  return out;
}

void run_dnls(const ExperimentConfig& c, RunReport& r) {
  const auto& d = c.dnls;
  const auto A = resolve_coupling(d);
  const auto f = resolve_nonlinearity(d.p);
  const auto u0 = initial_state(d.init, d.n, d.amp, c.run.seed, d.width, d.kick);
  const auto checks = check_set(d.check);
  const auto s_list = parse_double_list(d.s_list);
  const auto w = ScaleWeights::aligned(u0.u);

  auto tr = split_step_trajectory(u0, A, f, d.t, d.dt);
  const double n0 = u0.u.entries().norm(), h0 = hamiltonian(u0, A, f);
  double drift = 0.0;
  std::ostringstream ts;
  ts << header_line(r) << "t,norm,hamiltonian";
  for (double s : s_list) ts << ",norm_s" << format_double(s);
  ts << '\n';
  const int steps = static_cast<int>(tr.states.size()) - 1;
  const int stride = std::max(1, steps / d.samples);
  for (int k = 0; k <= steps; ++k) {
    const auto& st = tr.states[k];
    drift = std::max(drift, std::abs(st.u.entries().norm() - n0));
    if (k % stride != 0 && k != steps) continue;
    ts << format_double(st.time) << ',' << format_double(st.u.entries().norm()) << ','
       << format_double(hamiltonian(st, A, f));
    for (double s : s_list) ts << ',' << format_double(scale_norm(st.u, w, s));
    ts << '\n';
  }
  r.artifacts["timeseries.csv"] = ts.str();
  r.data["initial"] = {{"norm", n0}, {"hamiltonian", h0}, {"steps", steps}, {"dt", tr.dt}};

  if (checks.count("norm")) check_le(r.checks, "norm_drift", drift, d.norm_tol);
  if (checks.count("energy")) {
    double e1 = std::abs(hamiltonian(tr.states.back(), A, f) - h0);
    double e2 = std::abs(hamiltonian(split_step_flow(u0, A, f, d.t, 0.5 * tr.dt), A, f) - h0);
    r.data["energy"] = {{"drift_dt", e1}, {"drift_half_dt", e2}};
    check_range(r.checks, "energy_drift_ratio", e1 / e2, d.ratio_lo, d.ratio_hi);
  }
  if (checks.count("explicit")) {
    auto Z = CouplingMatrix::zero(d.n);
    auto ut = split_step_flow(u0, Z, f, d.t, d.dt);
    auto ex = explicit_phase_solution(u0, f, d.t);
    check_le(r.checks, "explicit_phase", max_abs_diff(ut.u.entries(), ex.entries()), d.explicit_tol);
  }
  if (checks.count("gronwall")) {
    json rows = json::array();
    std::vector<double> worst(s_list.size(), 0.0);
    double fd_worst = 0.0;
    for (int k = 0; k < d.trials; ++k) {
      const std::uint64_t sk = c.run.seed * 1000003ull + static_cast<std::uint64_t>(k);
      auto ui = initial_state("random", d.n, std::min(1.0, d.amp), sk, d.width);
      auto vi = initial_state("random", d.n, 1.0, sk + 500009ull, d.width).u;
      auto tk = split_step_trajectory(ui, A, f, d.t, d.dt);
      auto vt = variational_flow(tk, vi, A, f);
      const double M = ui.u.entries().norm();
      for (std::size_t j = 0; j < s_list.size(); ++j) {
        auto g = gronwall_constants(A, f, M, s_list[j]);
        double ratio = scale_norm(vt, w, s_list[j]) / (std::exp(0.5 * g.c3 * d.t) * scale_norm(vi, w, s_list[j]));
        worst[j] = std::max(worst[j], ratio);
        rows.push_back({{"trial", k}, {"s", s_list[j]}, {"c1", g.c1}, {"c2", g.c2}, {"c3", g.c3}, {"ratio", ratio}});
      }
      const double h = 1e-6;
      auto up = ui;
      up.u = ComplexSeq(ui.u.entries() + h * vi.entries(), ui.u.offset());
      auto um = ui;
      um.u = ComplexSeq(ui.u.entries() - h * vi.entries(), ui.u.offset());
      CVec fd = (split_step_flow(up, A, f, d.t, d.dt).u.entries() - split_step_flow(um, A, f, d.t, d.dt).u.entries()) /
                (2.0 * h);
      fd_worst = std::max(fd_worst, (fd - vt.entries()).norm() / vi.entries().norm());
    }
    for (std::size_t j = 0; j < s_list.size(); ++j)
      check_le(r.checks, "gronwall_s" + format_double(s_list[j]), worst[j], 1.0);
    check_le(r.checks, "variational_fd", fd_worst, d.variational_tol);
    r.data["gronwall"] = rows;
  }
  if (checks.count("jacobian")) {
    auto jr = flow_jacobian_check(u0, A, f, d.t, d.dt, d.eps, s_list, d.jacobian_tol);
    check_le(r.checks, "jacobian_symplectic", jr.symplectic_residual, d.jacobian_tol);
    check_lt(r.checks, "jacobian_contraction", jr.a_norm, 1.0);
    json sn = json::array();
    for (const auto& row : jr.scale_norms) sn.push_back({{"s", row.s}, {"norm", row.norm}});
    r.data["jacobian"] = {{"q_norm", jr.q_norm}, {"a_norm", jr.a_norm}, {"scale_norms", sn}};
  }
}

// ---------------------------------------------------------------- pipeline

void run_pipeline(const ExperimentConfig& c, RunReport& r) {
  const auto& p = c.pipeline;
  const auto A = CouplingMatrix::nearest_neighbor(p.n);
  const auto f = Nonlinearity::power(p.p);
  const auto u0 = initial_state("random", p.n, p.amp, c.run.seed, 3.0);
  auto jr = flow_jacobian_check(u0, A, f, p.t, p.dt, p.eps, {-1.0, 0.0, 1.0}, c.dnls.jacobian_tol);
  check_le(r.checks, "jacobian_symplectic", jr.symplectic_residual, c.dnls.jacobian_tol);
  check_lt(r.checks, "jacobian_contraction", jr.a_norm, 1.0);

  CMat full = complex_representation(jr.pq);
  const int dim = 1 + c.disc.dw, first = p.site + p.n;
  CMat sub = full.block(first, first, dim, dim);
  const double sub_norm = Eigen::JacobiSVD<CMat>(sub).singularValues()(0);
  check_lt(r.checks, "structure_norm", sub_norm, 1.0);
  r.data["structure"] = {{"sites", {p.site, p.site + c.disc.dw}}, {"norm", sub_norm}, {"a_norm", jr.a_norm}};
  r.artifacts["structure.json"] =
      json{{"jacobian", to_json(jr)}, {"structure", matrix_to_json(sub)}}.dump(1) + "\n";
  if (sub_norm >= 1.0) return;
  solve_and_report(c, StructureField::constant(sub), r);
}

}  // namespace

RunReport run(const ExperimentConfig& c) {
  validate_config(c);
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.kind = c.run.kind;
  r.config = config_to_json(c);
  r.config_hash = config_hash(c);
  switch (c.run.kind) {
    case ExperimentKind::validate_ops: run_validate(c, r); break;
    case ExperimentKind::solve_disc: run_solve_disc(c, r); break;
    case ExperimentKind::dnls: run_dnls(c, r); break;
    case ExperimentKind::nonsqueeze_pipeline: run_pipeline(c, r); break;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json rep = {{"schema_version", r.schema_version},
              {"library_version", r.library_version},
              {"kind", to_string(r.kind)},
              {"config_hash", r.config_hash},
              {"pass", r.pass()},
              {"config", r.config},
              {"checks", checks_json(r.checks)},
              {"data", r.data}};
  r.artifacts["report.json"] = rep.dump(1) + "\n";
  r.artifacts["checks.csv"] = checks_csv(r);
  if (!c.run.out.empty()) write_artifacts(r, c.run.out);
  return r;
}

void write_artifacts(const RunReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : r.artifacts) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (std::filesystem::path(dir) / name).string());
    out << body;
  }
}

}  // namespace nsq
