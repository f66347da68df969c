#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nsq/serialize.hpp"

namespace nsq {

enum class ExperimentKind { validate_ops, solve_disc, dnls, nonsqueeze_pipeline };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Every key is "section.name"; see README for the schema.
struct ExperimentConfig {
  struct Run {
    ExperimentKind kind = ExperimentKind::validate_ops;
    std::string out;  // empty: keep artifacts in memory only
    std::uint64_t seed = 1;
  } run;
  struct Grid {
    int nr = 64;
    int ntheta = 256;
  } grid;
  struct Validate {
    double dbar_tol = 1e-4;
    double closed_tol = 1e-6;
    double iso_tol = 1e-3;
    double re_tol = 1e-4;
    double arc_tol = 1e-3;
    bool refine = false;
    int refine_nr = 96;
    int refine_ntheta = 384;
  } validate;
  struct Disc {
    int dw = 2;
    std::string z0 = "0,0.3";  // "re,im"
    std::string w0;            // "re,im;re,im;…", empty for zeros
    double a = 0.0;            // ‖A‖ of the seeded constant structure, 0 for A ≡ 0
    double damping = 0.5;
    double outer_tol = 1e-6;
    int outer_max_iter = 200;
    double inner_tol = 1e-10;
    int inner_max_iter = 500;
    double cr_tol = 1e-4;
    double attach_tol = 1e-3;
    double area_tol = 5e-3;
    double ratio_slack = 0.02;
  } disc;
  struct Dnls {
    int n = 32;                          // half-window
    double p = 1.0;                      // 0 disables the nonlinearity
    std::string coupling = "cubic-nn";   // cubic-nn | none | path to a JSON matrix
    double coupling_strength = 1.0;
    double t = 1.0;
    double dt = 1e-3;
    std::string init = "sech";           // sech | random
    double amp = 0.8;
    double width = 4.0;
    double kick = 0.3;
    std::string check = "norm,energy,explicit";  // any of norm, energy, explicit, gronwall, jacobian
    int samples = 100;
    std::string s_list = "0,1";
    int trials = 20;
    double eps = 1e-5;
    double norm_tol = 1e-12;
    double ratio_lo = 3.5;
    double ratio_hi = 4.5;
    double explicit_tol = 1e-12;
    double jacobian_tol = 1e-5;
    double variational_tol = 1e-4;
  } dnls;
  struct Pipeline {
    int n = 8;
    double p = 1.0;
    double t = 0.5;
    double dt = 1e-3;
    double eps = 1e-5;
    double amp = 0.5;
    int site = 0;  // lattice index carried by z; w uses the next d_w sites
  } pipeline;
};

ExperimentConfig parse_config_ini(const std::string& text);
ExperimentConfig parse_config_json(const std::string& text);
// JSON when the path ends in .json, flat-sectioned key = value otherwise.
ExperimentConfig load_config(const std::string& path);
void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value);
void validate_config(const ExperimentConfig& c);
std::vector<std::string> config_keys();

// Every key except run.out, which only says where artifacts go.
json config_to_json(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

cplx parse_complex(const std::string& s);
std::vector<cplx> parse_complex_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

struct RunReport {
  ExperimentKind kind = ExperimentKind::validate_ops;
  std::vector<Check> checks;
  double seconds = 0.0;  // wall time, never written to artifacts
  std::string config_hash;
  std::string library_version = kLibraryVersion;
  int schema_version = kSchemaVersion;
  json config;
  json data;
  std::map<std::string, std::string> artifacts;  // file name → contents

  bool pass() const;
  const Check& get(const std::string& name) const;
};

RunReport run(const ExperimentConfig& c);
void write_artifacts(const RunReport& r, const std::string& dir);

}  // namespace nsq
