#include "app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bench/bench.hpp"
#include "core/discrete.hpp"
#include "core/engine.hpp"
#include "core/error.hpp"
#include "policies/equivalence.hpp"
#include "scenarios/gene.hpp"
#include "scenarios/surrogate.hpp"

#ifndef MOCU_VERSION
#define MOCU_VERSION "0.0.0"
#endif

namespace mocu::app {

namespace fs = std::filesystem;

namespace {

enum class Level { kError, kWarn, kInfo, kDebug };

struct Run {
  const Config& config;
  std::uint64_t seed;
  fs::path out_dir;
  std::size_t parallelism;
  Level level;
  CommandResult result;
  std::ostringstream report;

  void log(Level l, const std::string& msg) const {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (l <= level) std::clog << "[" << names[static_cast<int>(l)] << "] " << msg << '\n';
  }
  void write(const std::string& name, const std::string& content) {
    fs::create_directories(out_dir);
    const std::string path = (out_dir / name).string();
    write_file_atomic(path, content);
    result.files.push_back(path);
  }
};

Level parse_level(const Config& c) {
  const std::string v = c.get_string("run", "log_level", "warn");
  if (v == "error") return Level::kError;
  if (v == "warn") return Level::kWarn;
  if (v == "info") return Level::kInfo;
  if (v == "debug") return Level::kDebug;
  fail(ErrorCode::kConfig, c.source() + ": [run] log_level: expected error, warn, info or debug");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void range(const Config& c, const char* section, const char* key, double& lo, double& hi) {
  const auto v = c.get_doubles(section, key, {lo, hi});
  if (v.size() != 2 || !(v[0] < v[1]))
    fail(ErrorCode::kConfig, c.source() + ": [" + section + "] " + key + ": expected 'low high' with low < high");
  lo = v[0];
  hi = v[1];
}

std::string resolve_path(const Config& c, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || c.base_dir().empty()) return p;
  return (fs::path(c.base_dir()) / p).string();
}

// sim-quadratic -----------------------------------------------------------

bench::SimConfig sim_config(const Run& run) {
  const Config& c = run.config;
  const char* s = "sim-quadratic";
  bench::SimConfig sc;
  sc.grid = c.get_doubles(s, "grid", sc.grid);
  sc.runs = c.get_u64(s, "runs", sc.runs);
  sc.iterations = c.get_u64(s, "iterations", sc.iterations);
  sc.initial_actions = c.get_u64(s, "initial_actions", sc.initial_actions);
  range(c, s, "theta1_range", sc.theta1_lo, sc.theta1_hi);
  range(c, s, "r_range", sc.r_lo, sc.r_hi);
  range(c, s, "theta3_range", sc.theta3_lo, sc.theta3_hi);
  range(c, s, "w_range", sc.w_lo, sc.w_hi);
  sc.mc_theta_samples = c.get_u64(s, "mc_theta_samples", sc.mc_theta_samples);
  sc.mc_outcome_samples = c.get_u64(s, "mc_outcome_samples", sc.mc_outcome_samples);
  sc.exact_lookahead = c.get_bool(s, "exact_lookahead", sc.exact_lookahead);
  sc.common_outcome_draws = c.get_bool(s, "common_outcome_draws", sc.common_outcome_draws);
  sc.gpr_restarts = c.get_u64(s, "gpr_restarts", sc.gpr_restarts);
  const std::string noise = c.get_string(s, "noise", "common");
  if (noise == "common")
    sc.noise = bench::NoiseMode::kCommon;
  else if (noise == "independent")
    sc.noise = bench::NoiseMode::kIndependent;
  else
    fail(ErrorCode::kConfig, c.source() + ": [sim-quadratic] noise: expected common or independent");
  sc.policies.clear();
  for (const std::string& p : c.get_list(s, "policies", {"mocu", "kg"})) sc.policies.push_back(bench::parse_policy(p));
  sc.seed = run.seed;
  sc.parallelism = run.parallelism;
  sc.validate();
  return sc;
}

void cmd_sim_quadratic(Run& run) {
  const bench::SimConfig sc = sim_config(run);
  const bool plot = run.config.get_bool("sim-quadratic", "plot", false);
  const double max_fail = run.config.get_double("sim-quadratic", "max_failure_fraction", 0.05);
  run.log(Level::kInfo, "sim-quadratic: " + std::to_string(sc.runs) + " runs x " + std::to_string(sc.iterations) +
                            " iterations, seed " + std::to_string(sc.seed));
  const std::size_t step = std::max<std::size_t>(1, sc.runs / 10);
  const auto records = bench::run_benchmark(sc, [&](std::size_t done) {
    if (done % step == 0 || done == sc.runs) run.log(Level::kInfo, std::to_string(done) + "/" + std::to_string(sc.runs) + " runs");
  });
  const bench::Aggregate agg = bench::aggregate(records);

  std::ostringstream raw, table;
  bench::write_raw_csv(raw, records);
  bench::write_aggregate_csv(table, agg);
  run.write("raw.csv", raw.str());
  run.write("aggregate.csv", table.str());
  if (plot) {
    std::ostringstream svg;
    bench::write_svg_plot(svg, agg);
    run.write("plot.svg", svg.str());
  }
  std::string failures;
  for (const auto& r : records)
    if (r.failed) failures += r.diagnostics + "\n";
  if (!failures.empty()) run.write("failures.txt", failures);

  run.report << "policy  iteration  mean_oc  stderr  n_runs\n";
  for (const auto& row : agg.rows)
    run.report << bench::policy_name(row.policy) << "  " << row.iteration << "  " << fmt_short(row.mean_oc) << "  "
               << fmt_short(row.stderr_oc) << "  " << row.n_runs << '\n';
  if (sc.policies.size() == 2) {
    run.report << "paired difference " << bench::policy_name(sc.policies[1]) << " - "
               << bench::policy_name(sc.policies[0]) << ": iteration  mean  stderr\n";
    for (const auto& d : bench::paired_differences(records, sc.policies[0], sc.policies[1]))
      run.report << "  " << d.iteration << "  " << fmt_short(d.mean) << "  " << fmt_short(d.stderr_diff) << '\n';
  }
  const std::size_t episodes = sc.runs * sc.policies.size();
  run.report << "failed episodes: " << agg.failed << " of " << episodes << '\n';
  if (static_cast<double>(agg.failed) > max_fail * static_cast<double>(episodes)) {
    run.report << "too many failed episodes (limit " << fmt_short(100 * max_fail) << "%)\n";
    run.result.exit_code = 3;
  }
}

// gene-network ------------------------------------------------------------

void cmd_gene_network(Run& run) {
  const Config& c = run.config;
  const std::string path = resolve_path(c, c.get_string("gene-network", "fixture", ""));
  if (path.empty()) fail(ErrorCode::kConfig, c.source() + ": [gene-network] fixture is required");
  const gene::Fixture fx = gene::load_fixture(path);
  const gene::Network& net = fx.network;
  const std::vector<double> deltas = c.get_doubles("gene-network", "delta", fx.deltas);
  std::vector<double> p_one = fx.prior_one;
  if (p_one.empty()) p_one.assign(net.priority_count(), 0.5);
  const core::DiscreteBelief prior = gene::independent_prior(p_one);
  const core::DiscreteModel model(gene::design_problem(net, deltas), prior);
  const core::EvalContext ctx({256, 64, run.seed});
  const core::Selection sel = core::select_experiment(model, prior, ctx);
  const gene::GeneDesign direct = gene::gene_design_policy(net, prior, deltas);
  const double emin = model.expected_optimal_cost(prior, ctx).value;
  const double mocu_now = core::mocu(model, prior, ctx).value;

  std::string csv = "experiment,delta,lookahead_cost,expected_remaining_mocu\n";
  run.report << "fixture " << path << ": " << net.priority_count() << " priority bits, " << net.action_count()
             << " actions\n";
  run.report << "current MOCU " << fmt_short(mocu_now) << ", IBR action "
             << model.problem().actions.labels[sel.current_ibr_action] << '\n';
  for (std::size_t i = 0; i < direct.values.size(); ++i) {
    const double remaining = direct.values[i] - emin;
    csv += std::to_string(i) + "," + fmt(deltas[i]) + "," + fmt(direct.values[i]) + "," + fmt(remaining) + "\n";
    run.report << "experiment " << i << " (delta " << fmt_short(deltas[i]) << "): expected remaining MOCU "
               << fmt_short(remaining) << '\n';
  }
  run.report << "selected experiment " << direct.experiment << '\n';
  if (direct.experiment != sel.experiment) {
    run.report << "warning: engine selected experiment " << sel.experiment << '\n';
    run.result.exit_code = 4;
  }
  run.write("design.csv", csv);

  const std::size_t steps = c.get_u64("gene-network", "sequential_steps", 0);
  if (steps == 0) return;
  Rng hidden_rng = make_rng(run.seed, {stream::kEnvironment});
  std::discrete_distribution<std::size_t> pick(prior.weights().begin(), prior.weights().end());
  const core::ThetaPoint hidden = prior.atom(pick(hidden_rng));
  core::LoopConfig loop;
  loop.budget = steps;
  loop.stop_threshold = 0.0;
  loop.eval = {256, 64, run.seed};
  const auto res = core::run_design_loop(model, prior, loop, [&](std::size_t step, std::size_t e) {
    Rng rng = make_rng(run.seed, {stream::kEnvironment, step, e});
    std::bernoulli_distribution flip(deltas[e]);
    const double bit = hidden[e];
    return flip(rng) ? 1.0 - bit : bit;
  });
  std::string trace = "step,experiment,outcome,best_action,mocu\n";
  for (const auto& s : res.trace.steps)
    trace += std::to_string(s.step) + "," + std::to_string(s.experiment) + "," + fmt(s.outcome) + "," +
             std::to_string(s.best_action) + "," + fmt(s.mocu.value) + "\n";
  run.write("trace.csv", trace);
  std::string bits;
  for (double b : hidden) bits += b != 0.0 ? '1' : '0';
  run.report << "sequential run against hidden theta " << bits << ": " << res.trace.steps.size() << " steps, final MOCU "
             << fmt_short(res.trace.steps.empty() ? res.trace.initial_mocu.value : res.trace.steps.back().mocu.value) << '\n';
}

// surrogate ---------------------------------------------------------------

surrogate::SurrogateBelief surrogate_belief(const Run& run, const surrogate::SurrogateProblem& p) {
  const Config& c = run.config;
  const char* s = "surrogate";
  surrogate::SurrogateBelief b;
  const auto explicit_keys = c.indexed_keys(s, "dopant");
  if (!explicit_keys.empty()) {
    if (explicit_keys.size() != p.dopants)
      fail(ErrorCode::kConfig, c.source() + ": [surrogate] need one dopant.<i> entry per dopant");
    for (std::size_t i = 0; i < explicit_keys.size(); ++i) {
      if (explicit_keys[i] != "dopant." + std::to_string(i))
        fail(ErrorCode::kConfig, c.source() + ": [surrogate] dopant entries must be numbered 0.." + std::to_string(p.dopants - 1));
      // "h r w; h r w; ..."
      std::vector<core::ThetaPoint> atoms;
      std::vector<double> w;
      std::istringstream groups(c.get_string(s, explicit_keys[i], ""));
      std::string group;
      while (std::getline(groups, group, ';')) {
        std::istringstream g(group);
        double h = 0, r = 0, wt = 0;
        std::string extra;
        if (!(g >> h >> r >> wt) || (g >> extra))
          fail(ErrorCode::kConfig, c.source() + ": [surrogate] " + explicit_keys[i] + ": expected 'h r weight' groups separated by ';'");
        atoms.push_back({h, r});
        w.push_back(wt);
      }
      b.dopants.emplace_back(atoms, w);
    }
    return b;
  }
  const std::size_t n = c.get_u64(s, "particles", 25);
  double h_lo = -1.0, h_hi = 3.0, r_lo = -0.5, r_hi = 1.5;
  range(c, s, "h_range", h_lo, h_hi);
  range(c, s, "r_range", r_lo, r_hi);
  const std::string layout = c.get_string(s, "particle_layout", "sample");
  for (std::size_t i = 0; i < p.dopants; ++i) {
    std::vector<core::ThetaPoint> atoms;
    if (layout == "grid") {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n) fail(ErrorCode::kConfig, c.source() + ": [surrogate] grid layout needs a square particle count");
      atoms = surrogate::grid_particles(h_lo, h_hi, r_lo, r_hi, side);
    } else if (layout == "sample") {
      Rng rng = make_rng(run.seed, {stream::kInitial, i});
      atoms = surrogate::sample_particles(n, h_lo, h_hi, r_lo, r_hi, rng);
    } else {
      fail(ErrorCode::kConfig, c.source() + ": [surrogate] particle_layout: expected grid or sample");
    }
    b.dopants.push_back(core::DiscreteBelief::uniform(atoms));
  }
  return b;
}

void cmd_surrogate(Run& run) {
  const Config& c = run.config;
  const char* s = "surrogate";
  surrogate::SurrogateProblem p;
  p.dopants = c.get_u64(s, "dopants", 3);
  p.concentrations = c.get_doubles(s, "concentrations", {0.5, 1.0, 1.5, 2.0});
  p.tau = c.get_double(s, "tau", 0.5);
  surrogate::QuadraticSurrogate g;
  g.c1 = c.get_double(s, "c1", g.c1);
  g.c2 = c.get_double(s, "c2", g.c2);
  g.c3 = c.get_double(s, "c3", g.c3);
  g.c4 = c.get_double(s, "c4", g.c4);
  p.g = g;
  const std::string rule = c.get_string(s, "outcome_rule", "mc");
  if (rule == "quadrature")
    p.outcome_rule = surrogate::OutcomeRule::kGaussHermite;
  else if (rule != "mc")
    fail(ErrorCode::kConfig, c.source() + ": [surrogate] outcome_rule: expected mc or quadrature");
  p.quadrature_order = c.get_u64(s, "quadrature_order", p.quadrature_order);
  p.min_effective_sample_size = c.get_double(s, "min_ess", p.min_effective_sample_size);
  p.validate();
  const surrogate::SurrogateBelief belief = surrogate_belief(run, p);
  const core::EvalContext ctx({256, c.get_u64(s, "mc_outcome_samples", 64), run.seed});
  const surrogate::SurrogateDesign d = surrogate::surrogate_design_policy(p, belief, ctx);
  const surrogate::Candidate ibr = surrogate::surrogate_ibr(p, belief);

  std::string csv = "dopant,concentration,lookahead_cost,reduction\n";
  run.report << "current IBR pair (" << ibr.dopant << ", " << ibr.concentration << "), expected cost "
             << fmt_short(ibr.expected_cost) << '\n';
  for (std::size_t i = 0; i < p.dopants; ++i)
    for (std::size_t j = 0; j < p.concentrations.size(); ++j) {
      const double v = d.values[p.pair_index(i, j)];
      csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt(v) + "," + fmt(v - d.current_ibr_cost) + "\n";
      run.report << "candidate (" << i << ", " << j << "): value " << fmt_short(v) << ", reduction "
                 << fmt_short(v - d.current_ibr_cost) << '\n';
    }
  run.report << "selected experiment (" << d.experiment.dopant << ", " << d.experiment.concentration << ")\n";
  run.write("candidates.csv", csv);

  const std::size_t steps = c.get_u64(s, "sequential_steps", 0);
  if (steps == 0) return;
  Rng truth_rng = make_rng(run.seed, {stream::kModel});
  const auto truth = surrogate::sample_truth(belief, truth_rng);
  const surrogate::SurrogateModel model(p);
  core::LoopConfig loop;
  loop.budget = steps;
  loop.stop_threshold = 0.0;
  loop.eval = ctx.config();
  const std::size_t np = p.concentrations.size();
  const auto res = core::run_design_loop(model, belief, loop, [&](std::size_t step, std::size_t e) {
    Rng rng = make_rng(run.seed, {stream::kEnvironment, step, e});
    return surrogate::measure(p, truth, e / np, e % np, rng);
  });
  std::string trace = "step,dopant,concentration,outcome,best_dopant,best_concentration,mocu\n";
  for (const auto& st : res.trace.steps)
    trace += std::to_string(st.step) + "," + std::to_string(st.experiment / np) + "," + std::to_string(st.experiment % np) +
             "," + fmt(st.outcome) + "," + std::to_string(st.best_action / np) + "," + std::to_string(st.best_action % np) +
             "," + fmt(st.mocu.value) + "\n";
  run.write("trace.csv", trace);
  run.report << "sequential run: " << res.trace.steps.size() << " steps\n";
}

// kg-demo -----------------------------------------------------------------

void cmd_kg_demo(Run& run) {
  const Config& c = run.config;
  const std::size_t instances = c.get_u64("kg-demo", "instances", 100);
  const std::size_t lo = c.get_u64("kg-demo", "min_actions", 2), hi = c.get_u64("kg-demo", "max_actions", 10);
  const bool ego = c.get_bool("kg-demo", "ego", true);
  if (lo < 2 || hi < lo) fail(ErrorCode::kConfig, c.source() + ": [kg-demo] need 2 <= min_actions <= max_actions");
  std::string csv = "instance,actions,kg,mocu,kg_agree,ego,mocu_restricted,ego_agree\n";
  std::size_t kg_bad = 0, ego_bad = 0;
  double kg_gap = 0.0, ego_gap = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    Rng rng = make_rng(run.seed, {stream::kModel, k});
    std::uniform_int_distribution<std::size_t> size(lo, hi);
    const std::size_t n = size(rng);
    const auto kg = policies::compare_kg(policies::random_ranking_belief(rng, n, false));
    kg_bad += kg.agree() ? 0 : 1;
    kg_gap = std::max(kg_gap, kg.max_value_gap);
    csv += std::to_string(k) + "," + std::to_string(n) + "," + std::to_string(kg.classic) + "," +
           std::to_string(kg.engine) + "," + (kg.agree() ? "1" : "0");
    if (ego) {
      const auto e = policies::compare_ego(policies::random_ego_instance(rng, n));
      ego_bad += e.agree() ? 0 : 1;
      ego_gap = std::max(ego_gap, e.max_value_gap);
      csv += "," + std::to_string(e.classic) + "," + std::to_string(e.engine) + "," + (e.agree() ? "1" : "0");
    } else {
      csv += ",,,";
    }
    csv += "\n";
  }
  run.write("kg_demo.csv", csv);
  run.report << "KG vs generic MOCU: " << kg_bad << " disagreements in " << instances << " instances (max value gap "
             << fmt_short(kg_gap) << ")\n";
  if (ego)
    run.report << "EGO vs restricted MOCU: " << ego_bad << " disagreements in " << instances
               << " instances (max value gap " << fmt_short(ego_gap) << ")\n";
  if (kg_bad + ego_bad > 0) run.result.exit_code = 5;
}

}  // namespace

std::vector<std::string> command_names() { return {"sim-quadratic", "gene-network", "surrogate", "kg-demo"}; }

const char* version_string() noexcept { return MOCU_VERSION; }

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::kIo, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorCode::kIo, "cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

CommandResult run_command(const std::string& name, const Config& config) {
  Run run{config,
          config.get_u64("run", "seed", 1),
          fs::path(config.get_string("run", "out_dir", "mocu-out")),
          config.get_u64("run", "parallelism", 1),
          parse_level(config),
          {},
          {}};
  if (run.parallelism == 0) fail(ErrorCode::kConfig, config.source() + ": [run] parallelism must be >= 1");
  if (name == "sim-quadratic")
    cmd_sim_quadratic(run);
  else if (name == "gene-network")
    cmd_gene_network(run);
  else if (name == "surrogate")
    cmd_surrogate(run);
  else if (name == "kg-demo")
    cmd_kg_demo(run);
  else
    fail(ErrorCode::kConfig, "unknown command '" + name + "'");
  run.write("config.resolved.ini", std::string("# mocu ") + MOCU_VERSION + " " + name + "\n" + config.resolved());
  run.result.report = run.report.str();
  return std::move(run.result);
}

}  // namespace mocu::app
