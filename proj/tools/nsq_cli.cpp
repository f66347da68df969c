#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsq/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

// Flag name → config key; values stay strings and go through the config parser.
struct Mapped {
  std::map<std::string, std::string> values;
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + flag, [this, key](const std::string& v) { values[key] = v; }, help + " (" + key + ")");
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "INI or JSON config file");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--set", c.sets, "override as section.key=value")->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cauchy-Green operators, J-complex discs and DNLS flows"};
  app.require_subcommand(1);
  Common common;
  std::map<std::string, Mapped> mapped;

  auto* vo = app.add_subcommand("validate-ops", "operator validation suite");
  add_common(vo, common);
  mapped["validate-ops"].add(vo, "nr", "grid.nr", "radial nodes");
  mapped["validate-ops"].add(vo, "ntheta", "grid.ntheta", "angular nodes");
  mapped["validate-ops"].add(vo, "refine", "validate.refine", "also run the refined grid");

  auto* sd = app.add_subcommand("solve-disc", "solve for a J-complex disc");
  add_common(sd, common);
  mapped["solve-disc"].add(sd, "nr", "grid.nr", "radial nodes");
  mapped["solve-disc"].add(sd, "ntheta", "grid.ntheta", "angular nodes");
  mapped["solve-disc"].add(sd, "dw", "disc.dw", "number of w components");
  mapped["solve-disc"].add(sd, "z0", "disc.z0", "interior point re,im");
  mapped["solve-disc"].add(sd, "w0", "disc.w0", "w at tau, re,im;re,im");
  mapped["solve-disc"].add(sd, "a", "disc.a", "norm of the constant structure");
  mapped["solve-disc"].add(sd, "damping", "disc.damping", "outer damping");
  mapped["solve-disc"].add(sd, "outer-tol", "disc.outer_tol", "outer tolerance");
  mapped["solve-disc"].add(sd, "inner-tol", "disc.inner_tol", "inner tolerance");

  auto* dn = app.add_subcommand("dnls", "discrete NLS flow checks");
  add_common(dn, common);
  mapped["dnls"].add(dn, "n", "dnls.n", "half-window");
  mapped["dnls"].add(dn, "p", "dnls.p", "exponent, 0 for no nonlinearity");
  mapped["dnls"].add(dn, "coupling", "dnls.coupling", "cubic-nn, none or a JSON matrix file");
  mapped["dnls"].add(dn, "t", "dnls.t", "final time");
  mapped["dnls"].add(dn, "dt", "dnls.dt", "time step");
  mapped["dnls"].add(dn, "check", "dnls.check", "comma list of norm,energy,explicit,gronwall,jacobian");

  auto* np = app.add_subcommand("nonsqueeze-pipeline", "DNLS Jacobian to disc-solver pipeline");
  add_common(np, common);
  mapped["nonsqueeze-pipeline"].add(np, "n", "pipeline.n", "half-window");
  mapped["nonsqueeze-pipeline"].add(np, "t", "pipeline.t", "flow time");
  mapped["nonsqueeze-pipeline"].add(np, "dt", "pipeline.dt", "time step");
  mapped["nonsqueeze-pipeline"].add(np, "eps", "pipeline.eps", "finite-difference step");

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();

  try {
    nsq::ExperimentConfig cfg = common.config.empty() ? nsq::ExperimentConfig{} : nsq::load_config(common.config);
    cfg.run.kind = nsq::experiment_kind_from_string(kind);
    for (const auto& [key, v] : mapped[kind].values) nsq::apply_override(cfg, key, v);
    for (const auto& s : common.sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw nsq::ConfigError("--set expects section.key=value, got '" + s + "'");
      nsq::apply_override(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (common.seed) cfg.run.seed = *common.seed;
    cfg.run.out = common.out;
    nsq::validate_config(cfg);

    auto rep = nsq::run(cfg);
    for (const auto& c : rep.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << nsq::format_double(c.value) << " (" << c.rule
                << " " << nsq::format_double(c.tol) << ")\n";
    std::cout << kind << ": " << (rep.pass() ? "pass" : "fail") << " in " << rep.seconds << " s, config "
              << rep.config_hash << ", artifacts in " << cfg.run.out << "\n";
    return rep.pass() ? 0 : 1;
  } catch (const nsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << kind << " failed: " << e.what() << "\n";
    return 1;
  }
}
