#include "mocu/mocu.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "beliefs/gaussian.hpp"
#include "beliefs/nig.hpp"
#include "core/discrete.hpp"
#include "core/engine.hpp"
#include "core/error.hpp"
#include "policies/expected_max.hpp"
#include "policies/kg.hpp"
#include "scenarios/gene.hpp"

struct mocu_config {
  mocu::app::Config config;
  std::string resolved;
};

struct mocu_report {
  mocu::app::CommandResult result;
};

struct mocu_nig {
  mocu::beliefs::NigLinearBelief belief;
};

struct mocu_gene {
  mocu::gene::Fixture fixture;
  std::vector<double> prior_one;
};

namespace {

thread_local std::string last_error;

mocu_status set_error(mocu_status s, const char* msg) {
  last_error = msg;
  return s;
}

template <class F>
mocu_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MOCU_OK;
  } catch (const mocu::Error& e) {
    return set_error(static_cast<mocu_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MOCU_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MOCU_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(MOCU_E_INTERNAL, "unknown exception");
  }
}

#define MOCU_REQUIRE(p) \
  if (!(p)) return set_error(MOCU_E_NULL_ARGUMENT, "null argument: " #p)

}  // namespace

extern "C" {

const char* mocu_version(void) { return mocu::app::version_string(); }

const char* mocu_status_name(mocu_status status) {
  switch (status) {
    case MOCU_OK: return "ok";
    case MOCU_E_NULL_ARGUMENT: return "null_argument";
    case MOCU_E_INTERNAL: return "internal";
    default:
      if (status >= MOCU_E_DOMAIN && status <= MOCU_E_IO)
        return mocu::to_string(static_cast<mocu::ErrorCode>(status));
      return "unknown";
  }
}

const char* mocu_last_error(void) { return last_error.c_str(); }

mocu_status mocu_config_load(const char* path, mocu_config** out) {
  MOCU_REQUIRE(path);
  MOCU_REQUIRE(out);
  return guarded([&] { *out = new mocu_config{mocu::app::Config::load(path), {}}; });
}

mocu_status mocu_config_parse(const char* text, const char* source, mocu_config** out) {
  MOCU_REQUIRE(text);
  MOCU_REQUIRE(out);
  return guarded([&] { *out = new mocu_config{mocu::app::Config::parse(text, source ? source : "<config>"), {}}; });
}

mocu_status mocu_config_set(mocu_config* config, const char* section, const char* key, const char* value) {
  MOCU_REQUIRE(config);
  MOCU_REQUIRE(section);
  MOCU_REQUIRE(key);
  MOCU_REQUIRE(value);
  return guarded([&] { config->config.set(section, key, value); });
}

const char* mocu_config_resolved(mocu_config* config) {
  if (!config) return "";
  config->resolved = config->config.resolved();
  return config->resolved.c_str();
}

void mocu_config_free(mocu_config* config) { delete config; }

mocu_status mocu_run(const mocu_config* config, const char* command, mocu_report** out) {
  MOCU_REQUIRE(config);
  MOCU_REQUIRE(command);
  MOCU_REQUIRE(out);
  return guarded([&] { *out = new mocu_report{mocu::app::run_command(command, config->config)}; });
}

int mocu_report_exit_code(const mocu_report* report) { return report ? report->result.exit_code : -1; }
const char* mocu_report_text(const mocu_report* report) { return report ? report->result.report.c_str() : ""; }
size_t mocu_report_file_count(const mocu_report* report) { return report ? report->result.files.size() : 0; }

const char* mocu_report_file(const mocu_report* report, size_t index) {
  if (!report || index >= report->result.files.size()) return nullptr;
  return report->result.files[index].c_str();
}

void mocu_report_free(mocu_report* report) { delete report; }

mocu_status mocu_expected_max_affine(const double* a, const double* b, size_t n, double* out) {
  MOCU_REQUIRE(a);
  MOCU_REQUIRE(b);
  MOCU_REQUIRE(out);
  return guarded([&] { *out = mocu::policies::expected_max_affine({a, n}, {b, n}); });
}

mocu_status mocu_kg_policy(const double* mean, const double* covariance, const double* noise, size_t n,
                           size_t* experiment, double* values) {
  MOCU_REQUIRE(mean);
  MOCU_REQUIRE(covariance);
  MOCU_REQUIRE(noise);
  MOCU_REQUIRE(experiment);
  return guarded([&] {
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(mean, k);
    Eigen::MatrixXd s = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        covariance, k, k);
    Eigen::VectorXd l = Eigen::Map<const Eigen::VectorXd>(noise, k);
    const auto d = mocu::policies::kg_policy(mocu::beliefs::CorrelatedGaussianBelief(m, s, l));
    *experiment = d.experiment;
    if (values) std::copy(d.values.begin(), d.values.end(), values);
  });
}

mocu_status mocu_nig_create(mocu_nig** out) {
  MOCU_REQUIRE(out);
  return guarded([&] { *out = new mocu_nig{mocu::beliefs::NigLinearBelief()}; });
}

mocu_status mocu_nig_update(mocu_nig* belief, double psi, double y) {
  MOCU_REQUIRE(belief);
  return guarded([&] { belief->belief = mocu::beliefs::nig_update(belief->belief, psi, y); });
}

int mocu_nig_proper(const mocu_nig* belief) { return belief && belief->belief.proper() ? 1 : 0; }

mocu_status mocu_nig_posterior(const mocu_nig* belief, double mean[3], double* shape, double* scale) {
  MOCU_REQUIRE(belief);
  MOCU_REQUIRE(mean);
  return guarded([&] {
    belief->belief.require_proper();
    for (int i = 0; i < 3; ++i) mean[i] = belief->belief.mean()[i];
    if (shape) *shape = belief->belief.shape();
    if (scale) *scale = belief->belief.scale();
  });
}

mocu_status mocu_nig_predictive(const mocu_nig* belief, double psi, double* location, double* scale, double* dof) {
  MOCU_REQUIRE(belief);
  return guarded([&] {
    const auto t = mocu::beliefs::nig_predictive(belief->belief, psi);
    if (location) *location = t.location;
    if (scale) *scale = t.scale;
    if (dof) *dof = t.dof;
  });
}

void mocu_nig_free(mocu_nig* belief) { delete belief; }

mocu_status mocu_gene_load(const char* path, mocu_gene** out) {
  MOCU_REQUIRE(path);
  MOCU_REQUIRE(out);
  return guarded([&] {
    auto fx = mocu::gene::load_fixture(path);
    std::vector<double> p = fx.prior_one;
    if (p.empty()) p.assign(fx.network.priority_count(), 0.5);
    *out = new mocu_gene{std::move(fx), std::move(p)};
  });
}

size_t mocu_gene_experiment_count(const mocu_gene* gene) { return gene ? gene->fixture.deltas.size() : 0; }

mocu_status mocu_gene_design(const mocu_gene* gene, size_t* experiment, double* lookahead, double* mocu) {
  MOCU_REQUIRE(gene);
  MOCU_REQUIRE(experiment);
  return guarded([&] {
    const auto prior = mocu::gene::independent_prior(gene->prior_one);
    const auto d = mocu::gene::gene_design_policy(gene->fixture.network, prior, gene->fixture.deltas);
    *experiment = d.experiment;
    if (lookahead) std::copy(d.values.begin(), d.values.end(), lookahead);
    if (mocu) {
      const mocu::core::DiscreteModel model(mocu::gene::design_problem(gene->fixture.network, gene->fixture.deltas),
                                            prior);
      *mocu = mocu::core::mocu(model, prior, mocu::core::EvalContext{}).value;
    }
  });
}

void mocu_gene_free(mocu_gene* gene) { delete gene; }

}  // extern "C"
