#include "bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "bench/nig_model.hpp"
#include "core/engine.hpp"
#include "core/error.hpp"
#include "gpr/gpr.hpp"
#include "policies/kg.hpp"

namespace mocu::bench {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

IterationRecord score(const TrueModel& truth, std::size_t iteration, long experiment, double outcome,
                      std::size_t best) {
  return {iteration, experiment, outcome, best, truth.best_reward() - truth.rewards[best]};
}

void run_mocu(EpisodeRecord& rec, const TrueModel& truth, const SimConfig& c, std::size_t run,
              const std::vector<std::size_t>& initial) {
  const NigQuadraticModel model(c.grid, c.exact_lookahead, c.common_outcome_draws);
  beliefs::NigLinearBelief belief;
  for (std::size_t a : initial) belief = beliefs::nig_update(belief, c.grid[a], observe(c, truth, run, 0, a, Policy::kMocu));
  const core::EvalConfig eval{c.mc_theta_samples, c.mc_outcome_samples, derive_seed(c.seed, {run})};
  rec.iterations.push_back(score(truth, 0, -1, std::nan(""), core::ibr_action(model, belief, core::EvalContext(eval, 0)).action));
  for (std::size_t t = 1; t <= c.iterations; ++t) {
    const core::EvalContext ctx(eval, t);
    const std::size_t e = core::select_experiment(model, belief, ctx, false).experiment;
    const double y = observe(c, truth, run, t, e, Policy::kMocu);
    belief = model.update(belief, e, y);
    rec.iterations.push_back(score(truth, t, static_cast<long>(e), y, core::ibr_action(model, belief, ctx).action));
  }
}

void run_kg(EpisodeRecord& rec, const TrueModel& truth, const SimConfig& c, std::size_t run,
            const std::vector<std::size_t>& initial) {
  std::vector<double> x, y;
  for (std::size_t a : initial) {
    x.push_back(c.grid[a]);
    y.push_back(observe(c, truth, run, 0, a, Policy::kKg));
  }
  auto fit = [&](std::size_t t) {
    gpr::GprOptions o;
    o.restarts = c.gpr_restarts;
    o.seed = derive_seed(c.seed, {stream::kFit, run, t});
    return gpr::gpr_fit(x, y, o);
  };
  auto best_of = [&](const gpr::GprModel& m) {
    const Eigen::VectorXd mean = gpr::gpr_posterior(m, c.grid).mean;
    return argmax(std::vector<double>(mean.data(), mean.data() + mean.size()));
  };
  gpr::GprModel model = fit(0);
  rec.iterations.push_back(score(truth, 0, -1, std::nan(""), best_of(model)));
  for (std::size_t t = 1; t <= c.iterations; ++t) {
    const std::size_t e = policies::kg_policy(gpr::gpr_belief(model, c.grid)).experiment;
    const double obs = observe(c, truth, run, t, e, Policy::kKg);
    x.push_back(c.grid[e]);
    y.push_back(obs);
    model = fit(t);
    rec.iterations.push_back(score(truth, t, static_cast<long>(e), obs, best_of(model)));
  }
}

}  // namespace

std::string policy_name(Policy p) { return p == Policy::kMocu ? "mocu" : "kg"; }

Policy parse_policy(const std::string& name) {
  if (name == "mocu") return Policy::kMocu;
  if (name == "kg") return Policy::kKg;
  fail(ErrorCode::kConfig, "unknown policy '" + name + "' (expected mocu or kg)");
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(0.5 * i);
  return g;
}

void SimConfig::validate() const {
  if (grid.empty()) fail(ErrorCode::kConfig, "action grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) fail(ErrorCode::kConfig, "action grid must be strictly increasing");
  if (runs == 0) fail(ErrorCode::kConfig, "runs must be >= 1");
  if (initial_actions < 4 || initial_actions > grid.size())
    fail(ErrorCode::kConfig, "initial_actions must lie in [4, grid size]");
  if (!(theta1_lo < theta1_hi) || !(r_lo < r_hi) || !(theta3_lo < theta3_hi) || !(w_lo < w_hi) || !(w_lo > 0.0))
    fail(ErrorCode::kConfig, "invalid theta sampling ranges");
  if (mc_theta_samples == 0 || mc_outcome_samples == 0) fail(ErrorCode::kConfig, "sample budgets must be >= 1");
  if (gpr_restarts == 0) fail(ErrorCode::kConfig, "gpr_restarts must be >= 1");
  if (policies.empty()) fail(ErrorCode::kConfig, "no policies selected");
  if (parallelism == 0) fail(ErrorCode::kConfig, "parallelism must be >= 1");
}

std::uint64_t SimConfig::fingerprint() const {
  std::uint64_t h = mix64(0x62656e6368ULL);
  auto add = [&](std::uint64_t v) { h = mix64(h ^ mix64(v)); };
  auto addf = [&](double v) { add(std::bit_cast<std::uint64_t>(v)); };
  add(grid.size());
  for (double g : grid) addf(g);
  add(runs);
  add(iterations);
  add(initial_actions);
  for (double v : {theta1_lo, theta1_hi, r_lo, r_hi, theta3_lo, theta3_hi, w_lo, w_hi}) addf(v);
  add(mc_theta_samples);
  add(mc_outcome_samples);
  add(exact_lookahead);
  add(common_outcome_draws);
  add(gpr_restarts);
  add(static_cast<std::uint64_t>(noise));
  add(seed);
  for (Policy p : policies) add(static_cast<std::uint64_t>(p) + 1);
  return h;
}

double population_sd(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

TrueModel make_true_model(double t1, double t2, double t3, double t4, const std::vector<double>& grid) {
  TrueModel m{t1, t2, t3, t4, {}, 0};
  for (double psi : grid) m.rewards.push_back(m.reward(psi));
  m.best_action = argmax(m.rewards);
  return m;
}

TrueModel sample_true_model(const SimConfig& c, Rng& rng) {
  std::uniform_real_distribution<double> u1(c.theta1_lo, c.theta1_hi), ur(c.r_lo, c.r_hi),
      u3(c.theta3_lo, c.theta3_hi), uw(c.w_lo, c.w_hi);
  for (;;) {
    const double t1 = u1(rng);
    const double r = ur(rng);
    const double t3 = u3(rng);
    TrueModel m = make_true_model(t1, -2.0 * t1 * r, t3, 0.0, c.grid);
    const double sd = population_sd(m.rewards);
    if (!(sd > 0.0)) continue;
    m.theta4 = sd * uw(rng);
    return m;
  }
}

TrueModel run_true_model(const SimConfig& c, std::size_t run) {
  Rng rng = make_rng(c.seed, {stream::kModel, run});
  return sample_true_model(c, rng);
}

std::vector<std::size_t> run_initial_actions(const SimConfig& c, std::size_t run) {
  Rng rng = make_rng(c.seed, {stream::kInitial, run});
  std::vector<std::size_t> idx(c.grid.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first k entries are a uniform draw without replacement.
  for (std::size_t i = 0; i < c.initial_actions; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(c.initial_actions);
  return idx;
}

double observe(const SimConfig& c, const TrueModel& truth, std::size_t run, std::size_t iteration,
               std::size_t action, Policy policy) {
  Rng rng = c.noise == NoiseMode::kCommon
                ? make_rng(c.seed, {stream::kEnvironment, run, iteration, action})
                : make_rng(c.seed, {stream::kEnvironment, run, iteration, action, static_cast<std::uint64_t>(policy) + 1});
  std::normal_distribution<double> z(0.0, 1.0);
  return truth.rewards.at(action) + truth.theta4 * z(rng);
}

EpisodeRecord run_episode(Policy policy, const TrueModel& truth, const SimConfig& config, std::size_t run) {
  config.validate();
  if (truth.rewards.size() != config.grid.size()) fail(ErrorCode::kDomain, "true model does not match the grid");
  EpisodeRecord rec;
  rec.run = run;
  rec.policy = policy;
  rec.config_fingerprint = config.fingerprint();
  const auto start = std::chrono::steady_clock::now();
  const auto initial = run_initial_actions(config, run);
  try {
    if (policy == Policy::kMocu)
      run_mocu(rec, truth, config, run, initial);
    else
      run_kg(rec, truth, config, run, initial);
  } catch (const Error& e) {
    rec.failed = true;
    rec.diagnostics = "run " + std::to_string(run) + " " + policy_name(policy) + " iteration " +
                      std::to_string(rec.iterations.size()) + ": " + e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<EpisodeRecord> run_benchmark(const SimConfig& config,
                                         const std::function<void(std::size_t)>& progress) {
  config.validate();
  std::vector<std::vector<EpisodeRecord>> per_run(config.runs);
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t run = next++; run < config.runs; run = next++) {
      const TrueModel truth = run_true_model(config, run);
      for (Policy p : config.policies) per_run[run].push_back(run_episode(p, truth, config, run));
      if (progress) {
        std::lock_guard lock(mu);
        progress(++done);
      }
    }
  };
  const std::size_t threads = std::min(config.parallelism, config.runs);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<EpisodeRecord> out;
  for (auto& r : per_run)
    for (auto& e : r) out.push_back(std::move(e));
  return out;
}

Aggregate aggregate(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) fail(ErrorCode::kDomain, "no records to aggregate");
  for (const auto& r : records)
    if (r.config_fingerprint != records.front().config_fingerprint)
      fail(ErrorCode::kConfigMismatch, "records come from different configurations");
  std::vector<Policy> order;
  for (const auto& r : records)
    if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
  Aggregate agg;
  for (Policy p : order) {
    std::map<std::size_t, std::vector<double>> by_iter;
    for (const auto& r : records) {
      if (r.policy != p) continue;
      if (r.failed) {
        ++agg.failed;
        continue;
      }
      for (const auto& it : r.iterations) by_iter[it.iteration].push_back(it.opportunity_cost);
    }
    for (const auto& [iter, v] : by_iter) {
      const double n = static_cast<double>(v.size());
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      agg.rows.push_back({p, iter, mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0, v.size()});
    }
  }
  return agg;
}

std::vector<PairedDifference> paired_differences(const std::vector<EpisodeRecord>& records, Policy a, Policy b) {
  std::map<std::size_t, const EpisodeRecord*> ra, rb;
  for (const auto& r : records) {
    if (r.failed) continue;
    if (r.policy == a) ra[r.run] = &r;
    if (r.policy == b) rb[r.run] = &r;
  }
  std::map<std::size_t, std::vector<double>> diffs;
  for (const auto& [run, pa] : ra) {
    const auto it = rb.find(run);
    if (it == rb.end()) continue;
    const std::size_t n = std::min(pa->iterations.size(), it->second->iterations.size());
    for (std::size_t k = 0; k < n; ++k)
      diffs[pa->iterations[k].iteration].push_back(it->second->iterations[k].opportunity_cost -
                                                   pa->iterations[k].opportunity_cost);
  }
  std::vector<PairedDifference> out;
  for (const auto& [iter, v] : diffs) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out.push_back({iter, mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0, v.size()});
  }
  return out;
}

void write_raw_csv(std::ostream& os, const std::vector<EpisodeRecord>& records) {
  os << "run_id,policy,iteration,experiment_idx,outcome,best_action_idx,opportunity_cost\n";
  for (const auto& r : records)
    for (const auto& it : r.iterations)
      os << r.run << ',' << policy_name(r.policy) << ',' << it.iteration << ',' << it.experiment << ','
         << fmt(it.outcome) << ',' << it.best_action << ',' << fmt(it.opportunity_cost) << '\n';
}

void write_aggregate_csv(std::ostream& os, const Aggregate& agg) {
  os << "policy,iteration,mean_oc,stderr,n_runs\n";
  for (const auto& row : agg.rows)
    os << policy_name(row.policy) << ',' << row.iteration << ',' << fmt(row.mean_oc) << ','
       << fmt(row.stderr_oc) << ',' << row.n_runs << '\n';
}

void write_svg_plot(std::ostream& os, const Aggregate& agg) {
  const double w = 640, h = 420, left = 70, right = 20, top = 30, bottom = 50;
  std::size_t max_iter = 0;
  double max_y = 0.0;
  for (const auto& r : agg.rows) {
    max_iter = std::max(max_iter, r.iteration);
    max_y = std::max(max_y, r.mean_oc + r.stderr_oc);
  }
  if (max_y <= 0.0) max_y = 1.0;
  max_y *= 1.05;
  const auto px = [&](double it) { return left + (w - left - right) * (max_iter ? it / static_cast<double>(max_iter) : 0.5); };
  const auto py = [&](double v) { return h - bottom - (h - top - bottom) * v / max_y; };
  char buf[160];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, h - bottom, w - right, h - bottom);
  os << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, top, left, h - bottom);
  os << buf;
  for (std::size_t i = 0; i <= max_iter; ++i) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%zu</text>\n", px(static_cast<double>(i)), h - bottom + 18, i);
    os << buf;
  }
  for (int k = 0; k <= 5; ++k) {
    const double v = max_y * k / 5.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", left - 6, py(v) + 4, v);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">iteration</text>\n", (left + w - right) / 2, h - 12);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"16\" y=\"%.1f\" transform=\"rotate(-90 16 %.1f)\" text-anchor=\"middle\">average opportunity cost</text>\n", (top + h - bottom) / 2, (top + h - bottom) / 2);
  os << buf;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::vector<Policy> order;
  for (const auto& r : agg.rows)
    if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const char* col = colors[k % 4];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : agg.rows)
      if (r.policy == order[k]) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(static_cast<double>(r.iteration)), py(r.mean_oc));
        os << buf;
      }
    os << "\"/>\n";
    for (const auto& r : agg.rows)
      if (r.policy == order[k]) {
        const double x = px(static_cast<double>(r.iteration));
        std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n", x,
                      py(r.mean_oc - r.stderr_oc), x, py(r.mean_oc + r.stderr_oc), col);
        os << buf;
      }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n", w - right - 80, top + 16.0 * static_cast<double>(k + 1), col,
                  policy_name(order[k]).c_str());
    os << buf;
  }
  os << "</svg>\n";
}

}  // namespace mocu::bench
