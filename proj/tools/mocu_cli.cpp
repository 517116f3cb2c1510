// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mocu/mocu.h"

namespace {

struct ConfigDeleter {
  void operator()(mocu_config* c) const { mocu_config_free(c); }
};
struct ReportDeleter {
  void operator()(mocu_report* r) const { mocu_report_free(r); }
};

// Exit codes: 0 success, 1 runtime failure, 2 bad configuration or usage,
// otherwise the command's own code (e.g. too many failed episodes).
int report_failure(mocu_status s) {
  std::cerr << "mocu: " << mocu_status_name(s) << ": " << mocu_last_error() << '\n';
  return s == MOCU_E_CONFIG || s == MOCU_E_PARSE || s == MOCU_E_CONFIG_MISMATCH ? 2 : 1;
}

struct Overrides {
  std::optional<std::string> seed, out_dir, parallelism, log_level;
  // section -> key -> value, filled by subcommand options
  std::map<std::string, std::map<std::string, std::string>> keyed;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experimental design by mean objective cost of uncertainty"};
  app.set_version_flag("--version", std::string(mocu_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overrides o;
  app.add_option("-c,--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("-o,--out-dir", o.out_dir, "output directory");
  app.add_option("-j,--parallelism", o.parallelism, "worker threads");
  app.add_option("--log-level", o.log_level, "error, warn, info or debug");

  const auto keyed = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&o, sub, key](const std::string& v) { o.keyed[sub->get_name()][key] = v; }, help);
  };

  CLI::App* sim = app.add_subcommand("sim-quadratic", "MOCU vs KG on the noisy quadratic benchmark");
  keyed(sim, "--runs", "runs", "Monte-Carlo runs");
  keyed(sim, "--iterations", "iterations", "designed iterations per run");
  keyed(sim, "--policies", "policies", "comma-separated subset of mocu,kg");
  sim->add_flag_callback("--plot", [&o] { o.keyed["sim-quadratic"]["plot"] = "true"; }, "also write plot.svg");

  CLI::App* gene = app.add_subcommand("gene-network", "experiment design on a gene regulatory network fixture");
  keyed(gene, "--fixture", "fixture", "network fixture file");
  keyed(gene, "--delta", "delta", "per-experiment flip probabilities");
  keyed(gene, "--steps", "sequential_steps", "sequential steps against a hidden network");

  CLI::App* sur = app.add_subcommand("surrogate", "dopant selection with a particle belief");
  keyed(sur, "--particles", "particles", "particles per dopant");
  keyed(sur, "--tau", "tau", "measurement noise sd");
  keyed(sur, "--steps", "sequential_steps", "sequential steps against a sampled truth");

  CLI::App* kg = app.add_subcommand("kg-demo", "check KG and EGO against the generic MOCU engine");
  keyed(kg, "--instances", "instances", "random instances");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  mocu_config* raw = nullptr;
  mocu_status s = config_path.empty() ? mocu_config_parse("", "<defaults>", &raw)
                                      : mocu_config_load(config_path.c_str(), &raw);
  if (s != MOCU_OK) return report_failure(s);
  std::unique_ptr<mocu_config, ConfigDeleter> cfg(raw);

  const auto set = [&](const char* section, const char* key, const std::optional<std::string>& v) {
    return v ? mocu_config_set(cfg.get(), section, key, v->c_str()) : MOCU_OK;
  };
  for (auto [key, value] : {std::pair{"seed", &o.seed}, std::pair{"out_dir", &o.out_dir},
                            std::pair{"parallelism", &o.parallelism}, std::pair{"log_level", &o.log_level}})
    if ((s = set("run", key, *value)) != MOCU_OK) return report_failure(s);
  for (const auto& [section, kv] : o.keyed)
    for (const auto& [key, value] : kv)
      if ((s = mocu_config_set(cfg.get(), section.c_str(), key.c_str(), value.c_str())) != MOCU_OK)
        return report_failure(s);

  mocu_report* rep_raw = nullptr;
  if ((s = mocu_run(cfg.get(), command.c_str(), &rep_raw)) != MOCU_OK) return report_failure(s);
  std::unique_ptr<mocu_report, ReportDeleter> rep(rep_raw);
  std::cout << mocu_report_text(rep.get());
  for (size_t i = 0; i < mocu_report_file_count(rep.get()); ++i)
    std::cout << "wrote " << mocu_report_file(rep.get(), i) << '\n';
  return mocu_report_exit_code(rep.get());
}
