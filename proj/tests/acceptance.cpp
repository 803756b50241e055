// Acceptance suite: one line per criterion, exit code = number of failures.
//
// The criteria combine analytic identities, oracle equivalence, statistical
// agreement at fixed seeds, and qualitative trend checks; tolerances are
// pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "edgepose/cli.hpp"
#include "edgepose/optimizer.hpp"
#include "edgepose/rng.hpp"
#include "edgepose/sim.hpp"

using namespace edgepose;

namespace {

int g_failures = 0;

struct Criterion {
  std::string name;
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }

  void finish(double seconds) {
    char line[512];
    std::snprintf(line, sizeof(line), "[%s] %s (%.2f s)%s%s", ok ? "PASS" : "FAIL",
                  name.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::puts(line);
    if (!ok) ++g_failures;
  }
};

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ConfidenceQuad random_quad(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> shape(0.4, 14.0);
  return {ConfidenceModel::beta(shape(rng), shape(rng)),
          ConfidenceModel::beta(shape(rng), shape(rng)),
          ConfidenceModel::beta(shape(rng), shape(rng)),
          ConfidenceModel::beta(shape(rng), shape(rng))};
}

Scenario scenario_n(int n) {
  Scenario s = default_scenario();
  s.n_devices = n;
  s.gains_db.assign(n, -100.0);
  s.finalize();
  return s;
}

TimeAllocation uniform_tau(int n) {
  TimeAllocation t;
  t.tau.assign(n, 1.0 / n);
  return t;
}

// Solutions recorded by the optimizer criteria; criterion 7 audits them.
struct FeasibleRecord {
  double delay;
  double d_req;
};
std::vector<FeasibleRecord> g_feasible_ledger;

void criterion_1() {
  Criterion c{"1 special-case exactness (accuracy and delay reductions)"};
  const double t0 = now_s();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> gain(-120.0, -80.0);
  const TrafficParams traffic{2.0, 32 * 1024 * 8, 68 * 8};
  const ComputeParams compute{0.010, 0.100, 0.020, 0.005, 0.020,
                              BackhaulMode::kFixedTime, 0.0005, 1e8};
  double max_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto q = random_quad(rng);
    double lo = unit(rng), hi = unit(rng);
    if (lo > hi) std::swap(lo, hi);
    const double t = unit(rng), sv = unit(rng);
    const ServerOutcome srv = server_outcomes(q, sv);

    const double acc_dev_red =
        accuracy_cooperative(device_outcomes(q, t, t), srv) -
        accuracy_device_centric(device_outcomes(q, t, t));
    const double acc_srv_red =
        accuracy_cooperative(device_outcomes(q, 0.0, 1.0), srv) - accuracy_server_centric(srv);
    const double acc_cas_red =
        accuracy_cooperative(device_outcomes(q, 0.0, hi), srv) - accuracy_cascade(q, hi, sv);
    max_err = std::max({max_err, std::fabs(acc_dev_red), std::fabs(acc_srv_red),
                        std::fabs(acc_cas_red)});

    // Delay reductions on a random 2-device radio instance.
    const auto radio = RadioParams::from_dbm(1e6, -165.0, 30.0, {gain(rng), gain(rng)});
    TimeAllocation tau;
    tau.tau = {0.2 + 0.3 * unit(rng), 0.2 + 0.3 * unit(rng)};
    std::vector<double> alpha{unit(rng), unit(rng)};
    std::vector<double> beta{(1.0 - alpha[0]) * unit(rng), (1.0 - alpha[1]) * unit(rng)};
    const std::vector<double> zeros{0.0, 0.0}, ones{1.0, 1.0};

    const double dev_red =
        delay_device_centric(traffic, compute, radio, beta, tau).total -
        delay_cooperative(traffic, compute, radio, zeros, beta, tau).total;
    std::vector<double> one_minus{1.0 - alpha[0], 1.0 - alpha[1]};
    const double cas_red =
        delay_cascade(traffic, compute, radio, alpha, tau).total -
        delay_cooperative(traffic, compute, radio, alpha, one_minus, tau).total;
    const double srv_red =
        delay_server_centric(traffic, compute, radio, tau).total -
        (delay_cooperative(traffic, compute, radio, ones, zeros, tau).total -
         compute.t_inf_device_s);
    max_err = std::max({max_err, std::fabs(dev_red), std::fabs(cas_red), std::fabs(srv_red)});
  }
  c.expect(max_err < 1e-12, "max reduction error " + std::to_string(max_err));
  const double dt = now_s() - t0;
  c.expect(dt < 1.0, "runtime over 1 s");
  c.finish(dt);
}

void criterion_2() {
  Criterion c{"2 probability-mass conservation"};
  const double t0 = now_s();
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double max_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto q = random_quad(rng);
    double lo = unit(rng), hi = unit(rng);
    if (lo > hi) std::swap(lo, hi);
    const DeviceOutcome d = device_outcomes(q, lo, hi);
    max_err = std::max(max_err, std::fabs(d.tp + d.fn + d.up - 1.0));
    max_err = std::max(max_err, std::fabs(d.fp + d.tn + d.un - 1.0));
  }
  c.expect(max_err < 1e-12, "max mass error " + std::to_string(max_err));
  c.finish(now_s() - t0);
}

void criterion_3() {
  Criterion c{"3 Monte Carlo vs analytic bundles"};
  const double t0 = now_s();
  const Scenario s = scenario_n(4);
  const auto thresholds = ThresholdSet::uniform(4, 0.3, 0.7, 0.5);
  const int frames = 10000;
  const SimResult r = simulate(s, thresholds, uniform_tau(4), frames);

  const DeviceOutcome d = device_outcomes(s.quad(0), 0.3, 0.7);
  const ServerOutcome v = server_outcomes(s.quad(0), 0.5);
  const double acc = accuracy_cooperative(d, v);
  const double alpha = uncertain_prob(d);
  const double beta = positive_prob(d);

  // Class-balanced estimator: the exact 3-sigma bound combines the two
  // class-conditional binomials at the realized class sizes.
  const double q = s.occlusion_prob;
  const long n_pos = std::lround(frames * (1.0 - q));
  const long n_neg = std::lround(frames * q);
  auto bound = [&](double p_pos, double p_neg) {
    return 3.0 * 0.5 *
           std::sqrt(p_pos * (1.0 - p_pos) / n_pos + p_neg * (1.0 - p_neg) / n_neg);
  };
  const double acc_pos = d.tp + d.up * v.tp;   // correct rate on positives
  const double acc_neg = d.tn + d.un * v.tn;   // correct rate on negatives
  for (int i = 0; i < 4; ++i) {
    c.expect(std::fabs(r.accuracy_per_device[i] - acc) <= bound(acc_pos, acc_neg),
             "device " + std::to_string(i) + " accuracy off");
    c.expect(std::fabs(r.alpha_hat[i] - alpha) <= bound(d.up, d.un),
             "device " + std::to_string(i) + " alpha off");
    c.expect(std::fabs(r.beta_hat[i] - beta) <= bound(d.tp, d.fp),
             "device " + std::to_string(i) + " beta off");
  }
  const double dt = now_s() - t0;
  c.expect(dt < 30.0, "runtime over 30 s");
  c.finish(dt);
}

void criterion_4() {
  Criterion c{"4 dual airtime vs brute-force simplex grid"};
  const double t0 = now_s();
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> gain(-115.0, -85.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Scenario s = scenario_n(2);
    s.quads = {random_quad(rng)};
    s.gains_db = {gain(rng), gain(rng)};
    s.d_req_s = 2.0;  // slack budget keeps the instance feasible
    s.finalize();
    double lo = unit(rng), hi = unit(rng);
    if (lo > hi) std::swap(lo, hi);
    const auto thresholds = ThresholdSet::uniform(2, lo, hi, unit(rng));
    const TauResult r = solve_tau(s, thresholds, OptimizerConfig{});

    std::vector<double> alpha(2), beta(2);
    for (int k = 0; k < 2; ++k) {
      const DeviceOutcome d = device_outcomes(s.quad(k), lo, hi);
      alpha[k] = uncertain_prob(d);
      beta[k] = positive_prob(d);
    }
    const RadioParams radio = s.radio();
    const double dual =
        delay_cooperative(s.traffic, s.compute, radio, alpha, beta, r.tau).total;
    double grid = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 1000; ++k) {
      TimeAllocation tau;
      tau.tau = {k / 1000.0, 1.0 - k / 1000.0};
      grid = std::min(grid,
                      delay_cooperative(s.traffic, s.compute, radio, alpha, beta, tau).total);
    }
    const double rel = std::fabs(dual - grid) / grid;
    worst = std::max(worst, rel);
    double tau_sum = 0.0;
    for (double t : r.tau.tau) tau_sum += t;
    c.expect(tau_sum <= 1.0 + 1e-6, "airtime budget violated");
    g_feasible_ledger.push_back({dual, s.d_req_s});
  }
  c.expect(worst <= 1e-3, "worst relative gap " + std::to_string(worst));
  const double dt = now_s() - t0;
  c.expect(dt < 60.0, "runtime over 60 s");
  c.finish(dt);
}

void criterion_5() {
  Criterion c{"5 alternation: monotone objective, bounded iterations"};
  const double t0 = now_s();
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> gain(-115.0, -85.0);
  for (int i = 0; i < 20; ++i) {
    Scenario s = scenario_n(2 + static_cast<int>(unit(rng) * 3.0));
    s.quads = {random_quad(rng)};
    s.gains_db.clear();
    s.gain_mean_db = gain(rng);
    s.d_req_s = 0.15 + unit(rng) * 0.85;
    s.finalize();
    OptimizerConfig cfg;
    cfg.grid_points_m = 21;
    const Solution sol = optimize(s, cfg);
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
      c.expect(sol.objective_trace[k] >= sol.objective_trace[k - 1] - 1e-12,
               "trace decreased at step " + std::to_string(k));
    }
    c.expect(sol.outer_iterations <= cfg.max_outer_iters, "iteration cap exceeded");
    if (sol.feasible) g_feasible_ledger.push_back({sol.mean_delay_s, s.d_req_s});
  }
  c.finish(now_s() - t0);
}

void criterion_6() {
  Criterion c{"6 near-optimality and speedup vs the exhaustive oracle"};
  const double t0 = now_s();
  // Unequal gains force the oracle through the full joint cross product
  // (per-device triples squared), each combination with its own dual solve.
  Scenario s = scenario_n(2);
  s.gains_db = {-98.0, -102.0};
  s.finalize();
  OptimizerConfig cfg;
  cfg.grid_points_m = 21;

  const double o0 = now_s();
  Solution fast;
  const int reps = 5;
  for (int k = 0; k < reps; ++k) fast = optimize(s, cfg);
  const double fast_time = (now_s() - o0) / reps;

  const double e0 = now_s();
  const Solution oracle = exhaustive_search(s, 21, cfg, 30'000'000);
  const double oracle_time = now_s() - e0;

  c.expect(fast.feasible && oracle.feasible, "a search came back infeasible");
  const double gap = (oracle.sum_accuracy - fast.sum_accuracy) / oracle.sum_accuracy;
  c.expect(gap <= 0.01, "relative accuracy gap " + std::to_string(gap));
  const double speedup = oracle_time / fast_time;
  c.expect(speedup >= 100.0, "speedup only " + std::to_string(speedup) + "x");
  if (fast.feasible) g_feasible_ledger.push_back({fast.mean_delay_s, s.d_req_s});
  if (oracle.feasible) g_feasible_ledger.push_back({oracle.mean_delay_s, s.d_req_s});

  char buf[128];
  std::snprintf(buf, sizeof(buf), "gap %.4f%%, speedup %.0fx", gap * 100.0, speedup);
  c.detail = c.ok ? buf : c.detail;
  const double dt = now_s() - t0;
  c.expect(dt < 300.0, "runtime over 5 min");
  c.finish(dt);
}

void criterion_7() {
  Criterion c{"7 constraint satisfaction across recorded solutions"};
  const double t0 = now_s();
  c.expect(!g_feasible_ledger.empty(), "no solutions were recorded");
  double worst = -1e9;
  for (const auto& rec : g_feasible_ledger) {
    worst = std::max(worst, rec.delay - rec.d_req);
  }
  c.expect(worst <= 1e-9, "worst excess " + std::to_string(worst));
  c.detail = std::to_string(g_feasible_ledger.size()) + " solutions audited";
  c.finish(now_s() - t0);
}

void criterion_8() {
  Criterion c{"8 strategy ordering at the default operating point"};
  const double t0 = now_s();
  const Scenario s = scenario_n(4);
  OptimizerConfig cfg;  // default grid (101 points)
  const Solution proposed = optimize_strategy(s, Strategy::kProposed, cfg);
  const Solution cascade = optimize_strategy(s, Strategy::kCascade, cfg);
  const Solution device = optimize_strategy(s, Strategy::kDeviceCentric, cfg);
  const Solution server = optimize_strategy(s, Strategy::kServerCentric, cfg);
  c.expect(proposed.feasible && cascade.feasible && device.feasible,
           "expected feasible strategies came back infeasible");
  c.expect(proposed.sum_accuracy >= cascade.sum_accuracy - 1e-9, "proposed < cascade");
  c.expect(cascade.sum_accuracy >= device.sum_accuracy - 1e-9, "cascade < device");
  c.expect(!server.feasible, "server-centric unexpectedly feasible at 0.5 s");
  const double dt = now_s() - t0;
  c.expect(dt < 30.0, "runtime over 30 s");
  c.finish(dt);
}

void criterion_9() {
  Criterion c{"9 noise-free triangulation through the 8-camera rig"};
  const double t0 = now_s();
  const auto rig = generate_rig(8, 10.0, 10.0, 3.0);
  auto rng = make_engine(1009, 0);
  std::uniform_real_distribution<double> ux(0.05, 9.95), uz(0.05, 2.95);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d pt(ux(rng), ux(rng), uz(rng));
    std::vector<Observation2D> obs;
    for (int k = 0; k < 8; ++k) {
      const auto [u, v] = project(rig[k], pt);
      obs.push_back({u, v, k, 1.0});
    }
    worst = std::max(worst, (triangulate(obs, rig) - pt).norm());
  }
  c.expect(worst < 1e-6, "worst point error " + std::to_string(worst) + " m");
  const double dt = now_s() - t0;
  c.expect(dt < 5.0, "runtime over 5 s");
  c.finish(dt);
}

void criterion_10() {
  Criterion c{"10 accuracy-vs-MPJPE rank correlation (25-point sweep)"};
  const double t0 = now_s();
  const Scenario s = scenario_n(4);
  const auto sweep_sets = default_lemma_sweep(4);
  const LemmaResult res = validate_lemma1(s, sweep_sets, 5000);
  c.expect(res.spearman_rho.has_value(), "correlation undefined");
  if (res.spearman_rho.has_value()) {
    c.expect(*res.spearman_rho >= 0.9,
             "rho = " + std::to_string(*res.spearman_rho));
    if (c.ok) c.detail = "rho = " + std::to_string(*res.spearman_rho);
  }
  const double dt = now_s() - t0;
  c.expect(dt < 180.0, "runtime over 3 min");
  c.finish(dt);
}

void criterion_11() {
  Criterion c{"11 trend reproduction across the three sweeps"};
  const double t0 = now_s();
  OptimizerConfig cfg;
  cfg.grid_points_m = 41;
  const std::vector<Strategy> all{Strategy::kDeviceCentric, Strategy::kServerCentric,
                                  Strategy::kCascade, Strategy::kProposed};

  // Delay budget sweep: proposed accuracy non-decreasing, then saturating.
  {
    const Scenario s = scenario_n(4);
    std::vector<double> values;
    for (int k = 2; k <= 10; ++k) values.push_back(k / 10.0);
    const auto rows = sweep(s, SweepAxis::kDReq, values, {Strategy::kProposed}, cfg,
                            false, 0);
    double prev = -1.0;
    for (const auto& r : rows) {
      c.expect(r.feasible, "proposed infeasible at d_req " + std::to_string(r.axis_value));
      c.expect(r.sum_accuracy >= prev - 1e-6, "accuracy decreased along d_req");
      if (r.feasible) c.expect(r.delay_s <= r.axis_value + 1e-9, "delay above budget");
      prev = r.sum_accuracy;
    }
    const double span = rows.back().sum_accuracy - rows.front().sum_accuracy;
    const double last_step =
        rows[rows.size() - 1].sum_accuracy - rows[rows.size() - 2].sum_accuracy;
    c.expect(span > 0.0, "no accuracy gain across the budget range");
    c.expect(last_step <= 0.05 * span + 1e-12, "no saturation at the top of the range");
  }

  // Device-count sweep: server-centric delay strictly increasing,
  // device-centric delay nearly flat.
  {
    const Scenario s = scenario_n(4);
    const std::vector<double> values{2.0, 4.0, 8.0};
    const auto rows = sweep(s, SweepAxis::kNDevices, values,
                            {Strategy::kDeviceCentric, Strategy::kServerCentric}, cfg,
                            false, 0);
    std::vector<double> device_delays, server_delays;
    for (const auto& r : rows) {
      if (r.strategy == Strategy::kDeviceCentric) device_delays.push_back(r.delay_s);
      if (r.strategy == Strategy::kServerCentric) server_delays.push_back(r.delay_s);
    }
    c.expect(server_delays[0] < server_delays[1] && server_delays[1] < server_delays[2],
             "server delay not strictly increasing in device count");
    const double dmin = *std::min_element(device_delays.begin(), device_delays.end());
    const double dmax = *std::max_element(device_delays.begin(), device_delays.end());
    c.expect((dmax - dmin) / dmin < 0.05, "device delay varies more than 5%");
  }

  // Gain sweep: proposed accuracy non-decreasing in the channel gain.
  {
    const Scenario s = scenario_n(4);
    std::vector<double> values;
    for (int g = -130; g <= -60; g += 10) values.push_back(g);
    const auto rows = sweep(s, SweepAxis::kGainDb, values, {Strategy::kProposed}, cfg,
                            false, 0);
    double prev = -1.0;
    for (const auto& r : rows) {
      c.expect(r.sum_accuracy >= prev - 1e-6, "accuracy decreased along gain");
      prev = r.sum_accuracy;
    }
  }
  const double dt = now_s() - t0;
  c.expect(dt < 600.0, "runtime over 10 min");
  c.finish(dt);
}

void criterion_12() {
  Criterion c{"12 byte-identical reruns, independent of fan-out"};
  const double t0 = now_s();
  const std::string dir = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  const std::string scen_path = dir + "/edgepose_accept_scen.txt";
  {
    FILE* f = std::fopen(scen_path.c_str(), "wb");
    std::fputs("n_devices = 2\ngrid_points = 21\nseed = 7\n", f);
    std::fclose(f);
  }
  auto run_sweep = [&](const std::string& out_path, const char* threads) {
    setenv("EDGEPOSE_THREADS", threads, 1);
    std::ostringstream out, err;
    const int code = run_cli({"sweep", scen_path, "--axis", "d_req", "--values",
                              "0.3,0.5", "--strategies", "device,proposed", "--simulate",
                              "--frames", "400", "--out", out_path},
                             out, err);
    unsetenv("EDGEPOSE_THREADS");
    return code;
  };
  auto slurp = [](const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    std::string content;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) content.append(buf, n);
    std::fclose(f);
    return content;
  };
  const std::string p1 = dir + "/edgepose_accept_1.csv";
  const std::string p2 = dir + "/edgepose_accept_2.csv";
  const std::string p3 = dir + "/edgepose_accept_3.csv";
  c.expect(run_sweep(p1, "1") == 0, "first run failed");
  c.expect(run_sweep(p2, "1") == 0, "second run failed");
  c.expect(run_sweep(p3, "4") == 0, "wide run failed");
  const std::string b1 = slurp(p1), b2 = slurp(p2), b3 = slurp(p3);
  c.expect(!b1.empty(), "empty output");
  c.expect(b1 == b2, "rerun differs");
  c.expect(b1 == b3, "fan-out width changed the bytes");
  c.finish(now_s() - t0);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (g_failures == 0) {
    std::puts("all acceptance criteria passed");
  } else {
    std::printf("%d criteria failed\n", g_failures);
  }
  return g_failures;
}
