#include "edgepose/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgepose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMuFloor = 1e-12;   // slack airtime constraint; shares clamp at 1
constexpr double kTieTol = 1e-12;

// How each strategy constrains the device band and derives its traffic.
struct StrategyTraits {
  Strategy kind = Strategy::kProposed;
  bool device_inference = true;
  bool beta_is_one_minus_alpha = false;  // cascade: everything kept is messaged
  bool beta_is_zero = false;             // server-centric: images only
};

StrategyTraits traits_for(Strategy s) {
  StrategyTraits t;
  t.kind = s;
  switch (s) {
    case Strategy::kProposed:
      break;
    case Strategy::kDeviceCentric:
      break;
    case Strategy::kCascade:
      t.beta_is_one_minus_alpha = true;
      break;
    case Strategy::kServerCentric:
      t.device_inference = false;
      t.beta_is_zero = true;
      break;
  }
  return t;
}

void traffic_rates(const Scenario& scenario, const StrategyTraits& traits,
                   const ThresholdSet& thresholds, std::vector<double>& alpha,
                   std::vector<double>& beta) {
  const int n = scenario.n_devices;
  alpha.resize(n);
  beta.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& t = thresholds.per_device[i];
    const DeviceOutcome d = device_outcomes(scenario.quad(i), t.low, t.high);
    alpha[i] = uncertain_prob(d);
    if (traits.beta_is_zero) {
      beta[i] = 0.0;
    } else if (traits.beta_is_one_minus_alpha) {
      beta[i] = 1.0 - alpha[i];
    } else {
      beta[i] = positive_prob(d);
    }
  }
}

DelayBreakdown strategy_delay(const Scenario& scenario, const StrategyTraits& traits,
                              std::span<const double> alpha, std::span<const double> beta,
                              const RadioParams& radio, const TimeAllocation& tau) {
  if (!traits.device_inference) {
    return delay_server_centric(scenario.traffic, scenario.compute, radio, tau);
  }
  return delay_cooperative(scenario.traffic, scenario.compute, radio, alpha, beta, tau);
}

double sum_accuracy_at(const Scenario& scenario, const ThresholdSet& thresholds) {
  double sum = 0.0;
  for (int i = 0; i < scenario.n_devices; ++i) {
    const auto& t = thresholds.per_device[i];
    sum += accuracy_cooperative(device_outcomes(scenario.quad(i), t.low, t.high),
                                server_outcomes(scenario.quad(i), t.server));
  }
  return sum;
}

// Per-quad CDF values on the threshold grid, shared by every scan.
struct QuadGrid {
  std::vector<double> fdp, fdn, fsp, fsn;
};

struct GridCache {
  std::vector<double> points;
  std::vector<QuadGrid> per_device;  // size 1 when the quad is shared

  const QuadGrid& quad(int device) const {
    return per_device.size() == 1 ? per_device.front() : per_device[device];
  }
};

GridCache build_grid_cache(const Scenario& scenario, int m) {
  GridCache cache;
  cache.points.resize(m);
  for (int k = 0; k < m; ++k) {
    cache.points[k] = static_cast<double>(k) / static_cast<double>(m - 1);
  }
  const std::size_t n_quads = scenario.quads.size();
  cache.per_device.resize(n_quads);
  for (std::size_t q = 0; q < n_quads; ++q) {
    auto& g = cache.per_device[q];
    g.fdp.resize(m);
    g.fdn.resize(m);
    g.fsp.resize(m);
    g.fsn.resize(m);
    for (int k = 0; k < m; ++k) {
      const double x = cache.points[k];
      g.fdp[k] = scenario.quads[q].dev_pos.cdf(x);
      g.fdn[k] = scenario.quads[q].dev_neg.cdf(x);
      g.fsp[k] = scenario.quads[q].srv_pos.cdf(x);
      g.fsn[k] = scenario.quads[q].srv_neg.cdf(x);
    }
  }
  return cache;
}

// Uplink + backhaul-share + server-inference seconds contributed by one
// device; mirrors the cooperative delay assembly term by term.
struct DelayModel {
  double base = 0.0;                 // constant components
  std::vector<double> rate;          // per-device uplink rate at its share
  double fps = 0.0;
  double image_bits = 0.0;
  double message_bits = 0.0;
  double backhaul_rate = 0.0;        // 0 in fixed mode
  double t_inf_server = 0.0;

  double own_term(int i, double alpha, double beta) const {
    const double bits = fps * (alpha * image_bits + beta * message_bits);
    double t = alpha * t_inf_server;
    if (backhaul_rate > 0.0) t += bits / backhaul_rate;
    if (bits > 0.0) {
      if (rate[i] <= 0.0) return kInf;
      t += bits / rate[i];
    }
    return t;
  }
};

DelayModel build_delay_model(const Scenario& scenario, const StrategyTraits& traits,
                             const RadioParams& radio, const TimeAllocation& tau) {
  DelayModel m;
  const auto& c = scenario.compute;
  m.base = c.t_pr_device_s + (traits.device_inference ? c.t_inf_device_s : 0.0) +
           c.t_pr_server_s + c.t_sc_tx_s;
  if (c.backhaul_mode == BackhaulMode::kFixedTime) {
    m.base += c.backhaul_fixed_s;
  } else {
    m.backhaul_rate = c.backhaul_rate_bps;
  }
  m.fps = scenario.traffic.fps;
  m.image_bits = static_cast<double>(scenario.traffic.image_bits);
  m.message_bits = static_cast<double>(scenario.traffic.message_bits);
  m.t_inf_server = c.t_inf_server_s;
  m.rate.resize(scenario.n_devices);
  for (int i = 0; i < scenario.n_devices; ++i) {
    m.rate[i] = shannon_rate(tau.tau[i], radio, i);
  }
  return m;
}

// One device's state during the greedy search.
struct DeviceState {
  double low = 0.5, high = 0.5, server = 0.5;
  double alpha = 0.0, beta = 0.0;
  double accuracy = 0.0;
  double own_delay = 0.0;
  double tp_s = 0.0, tn_s = 0.0;
  double up = 0.0, un = 0.0, tp = 0.0, tn = 0.0, fp = 0.0;
};

DeviceState fill_state(const StrategyTraits& traits, const DelayModel& dm, int device,
                       double low, double high, double server, const DeviceOutcome& d,
                       const ServerOutcome& v) {
  DeviceState s;
  s.low = low;
  s.high = high;
  s.server = server;
  s.up = d.up;
  s.un = d.un;
  s.tp = d.tp;
  s.tn = d.tn;
  s.fp = d.fp;
  s.tp_s = v.tp;
  s.tn_s = v.tn;
  s.alpha = uncertain_prob(d);
  if (traits.beta_is_zero) {
    s.beta = 0.0;
  } else if (traits.beta_is_one_minus_alpha) {
    s.beta = 1.0 - s.alpha;
  } else {
    s.beta = positive_prob(d);
  }
  s.accuracy = accuracy_cooperative(d, v);
  s.own_delay = dm.own_term(device, s.alpha, s.beta);
  return s;
}

DeviceState make_state(const Scenario& scenario, const StrategyTraits& traits,
                       const DelayModel& dm, int device, const DeviceThresholds& t) {
  return fill_state(traits, dm, device, t.low, t.high, t.server,
                    device_outcomes(scenario.quad(device), t.low, t.high),
                    server_outcomes(scenario.quad(device), t.server));
}

struct PairCandidate {
  double accuracy = -kInf;
  double alpha = 0.0, beta = 0.0;
  double width = 0.0;
  int il = -1, ih = -1;
  bool found = false;
};

bool better_pair(double acc, double alpha, double width, int il, int ih,
                 const PairCandidate& best) {
  if (!best.found) return true;
  if (acc > best.accuracy + kTieTol) return true;
  if (acc < best.accuracy - kTieTol) return false;
  if (alpha < best.alpha - kTieTol) return true;
  if (alpha > best.alpha + kTieTol) return false;
  if (width < best.width - kTieTol) return true;
  if (width > best.width + kTieTol) return false;
  if (il != best.il) return il < best.il;
  return ih < best.ih;
}

// Scans the (low, high) grid for one device (or the shared broadcast triple
// when n_sharing > 1), holding the server threshold. delay_budget is the
// total allowed for this device's own term(s).
PairCandidate scan_pairs(const StrategyTraits& traits, const GridCache& cache,
                         const QuadGrid& g, const DelayModel& dm, int device, int n_sharing,
                         double tp_s, double tn_s, double own_budget) {
  const int m = static_cast<int>(cache.points.size());
  PairCandidate best;
  // Strategy restrictions on the band: cascade and server-centric pin the low
  // threshold at 0, device-centric collapses the band, server-centric also
  // pins the high threshold at 1.
  const bool low_pinned = traits.kind == Strategy::kCascade ||
                          traits.kind == Strategy::kServerCentric;
  const int il_end = low_pinned ? 1 : m;
  for (int il = 0; il < il_end; ++il) {
    const double fn = g.fdp[il];
    const double tn = g.fdn[il];
    int ih_begin = il;
    int ih_end = m;
    if (traits.kind == Strategy::kDeviceCentric) ih_end = il + 1;
    if (traits.kind == Strategy::kServerCentric) ih_begin = m - 1;
    for (int ih = ih_begin; ih < ih_end; ++ih) {
      const double tp = 1.0 - g.fdp[ih];
      const double fp = 1.0 - g.fdn[ih];
      const double up = g.fdp[ih] - fn;
      const double un = g.fdn[ih] - tn;
      const double alpha = (up + un) / 2.0;
      double beta;
      if (traits.beta_is_zero) {
        beta = 0.0;
      } else if (traits.beta_is_one_minus_alpha) {
        beta = 1.0 - alpha;
      } else {
        beta = (tp + fp) / 2.0;
      }
      const double own = dm.own_term(device, alpha, beta) * n_sharing;
      if (!(own <= own_budget)) continue;
      const double acc = (tp + tn + up * tp_s + un * tn_s) / 2.0;
      const double width = cache.points[ih] - cache.points[il];
      if (better_pair(acc, alpha, width, il, ih, best)) {
        best.accuracy = acc;
        best.alpha = alpha;
        best.beta = beta;
        best.width = width;
        best.il = il;
        best.ih = ih;
        best.found = true;
      }
    }
  }
  return best;
}

// Best server threshold for fixed device band: maximizes the redeemed
// offloaded mass. Delay does not depend on it.
int scan_server(const QuadGrid& g, double up, double un) {
  const int m = static_cast<int>(g.fsp.size());
  int best = 0;
  double best_gain = -kInf;
  for (int is = 0; is < m; ++is) {
    const double gain = up * (1.0 - g.fsp[is]) + un * g.fsn[is];
    if (gain > best_gain + kTieTol) {
      best_gain = gain;
      best = is;
    }
  }
  return best;
}

ThresholdSearchResult greedy_thresholds(const Scenario& scenario, const StrategyTraits& traits,
                                        const TimeAllocation& tau, const ThresholdSet& warm,
                                        const OptimizerConfig& config,
                                        const GridCache* shared_cache = nullptr) {
  config.validate();
  warm.validate();
  const int n = scenario.n_devices;
  const double d_req = config.resolve_d_req(scenario);
  const RadioParams radio = scenario.radio();
  const DelayModel dm = build_delay_model(scenario, traits, radio, tau);
  GridCache local_cache;
  if (shared_cache == nullptr) local_cache = build_grid_cache(scenario, config.grid_points_m);
  const GridCache& cache = shared_cache ? *shared_cache : local_cache;

  std::vector<DeviceState> state;
  state.reserve(n);
  for (int i = 0; i < n; ++i) {
    state.push_back(make_state(scenario, traits, dm, i, warm.per_device[i]));
  }

  bool uniform_tau = true;
  for (double t : tau.tau) {
    if (t != tau.tau.front()) uniform_tau = false;
  }
  const bool broadcast = scenario.homogeneous() && uniform_tau;

  // Rebuild one device's state around a scan result, reusing whatever side
  // (band or server outcome) did not move.
  const auto apply_pair = [&](int device, const QuadGrid& g, const PairCandidate& cand,
                              const DeviceState& old) {
    DeviceOutcome d;
    d.tp = 1.0 - g.fdp[cand.ih];
    d.fn = g.fdp[cand.il];
    d.up = g.fdp[cand.ih] - g.fdp[cand.il];
    d.fp = 1.0 - g.fdn[cand.ih];
    d.tn = g.fdn[cand.il];
    d.un = g.fdn[cand.ih] - g.fdn[cand.il];
    const ServerOutcome v{old.tp_s, 1.0 - old.tp_s, 1.0 - old.tn_s, old.tn_s};
    return fill_state(traits, dm, device, cache.points[cand.il], cache.points[cand.ih],
                      old.server, d, v);
  };
  const auto apply_server = [&](int device, const QuadGrid& g, int is,
                                const DeviceState& old) {
    DeviceOutcome d;
    d.tp = old.tp;
    d.fn = 1.0 - old.tp - old.up;
    d.up = old.up;
    d.fp = old.fp;
    d.tn = old.tn;
    d.un = old.un;
    const ServerOutcome v{1.0 - g.fsp[is], g.fsp[is], 1.0 - g.fsn[is], g.fsn[is]};
    return fill_state(traits, dm, device, old.low, old.high, cache.points[is], d, v);
  };

  const int max_rounds = 100;
  int rounds = 0;
  for (; rounds < max_rounds; ++rounds) {
    bool changed = false;

    if (broadcast) {
      // One shared triple: every device carries the same term.
      const auto& g = cache.quad(0);
      const PairCandidate cand = scan_pairs(traits, cache, g, dm, 0, n, state[0].tp_s,
                                            state[0].tn_s, d_req - dm.base);
      if (cand.found) {
        if (cache.points[cand.il] != state[0].low || cache.points[cand.ih] != state[0].high) {
          changed = true;
        }
        const DeviceState next = apply_pair(0, g, cand, state[0]);
        for (auto& s : state) s = next;
      }
      const int is = scan_server(g, state[0].up, state[0].un);
      if (cache.points[is] != state[0].server) changed = true;
      const DeviceState next = apply_server(0, g, is, state[0]);
      for (auto& s : state) s = next;
    } else {
      for (int i = 0; i < n; ++i) {
        double others = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j != i) others += state[j].own_delay;
        }
        const auto& g = cache.quad(i);
        const PairCandidate cand = scan_pairs(traits, cache, g, dm, i, 1, state[i].tp_s,
                                              state[i].tn_s, d_req - dm.base - others);
        if (cand.found) {
          if (cache.points[cand.il] != state[i].low ||
              cache.points[cand.ih] != state[i].high) {
            changed = true;
          }
          state[i] = apply_pair(i, g, cand, state[i]);
        }
      }
      for (int i = 0; i < n; ++i) {
        const auto& g = cache.quad(i);
        const int is = scan_server(g, state[i].up, state[i].un);
        if (cache.points[is] != state[i].server) changed = true;
        state[i] = apply_server(i, g, is, state[i]);
      }
    }

    if (!changed) {
      ++rounds;
      break;
    }
  }

  ThresholdSearchResult result;
  result.thresholds.per_device.resize(n);
  double total = dm.base;
  double sum_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    result.thresholds.per_device[i] = {state[i].low, state[i].high, state[i].server};
    total += state[i].own_delay;
    sum_acc += state[i].accuracy;
  }
  result.sum_accuracy = sum_acc;
  result.delay_s = total;
  result.feasible = total <= d_req + 1e-9;
  result.rounds = rounds;
  if (!result.feasible) {
    // Delay separates across devices at fixed shares, so the grid floor is
    // the per-device minimum of the own terms.
    double floor_total = dm.base;
    const int m = static_cast<int>(cache.points.size());
    for (int i = 0; i < n; ++i) {
      const auto& g = cache.quad(i);
      double best = kInf;
      for (int il = 0; il < m; ++il) {
        for (int ih = il; ih < m; ++ih) {
          if (traits.kind == Strategy::kCascade && il > 0) continue;
          if (traits.kind == Strategy::kDeviceCentric && ih != il) continue;
          const double up = g.fdp[ih] - g.fdp[il];
          const double un = g.fdn[ih] - g.fdn[il];
          const double alpha = (up + un) / 2.0;
          double beta;
          if (traits.beta_is_zero) {
            beta = 0.0;
          } else if (traits.beta_is_one_minus_alpha) {
            beta = 1.0 - alpha;
          } else {
            beta = ((1.0 - g.fdp[ih]) + (1.0 - g.fdn[ih])) / 2.0;
          }
          best = std::min(best, dm.own_term(i, alpha, beta));
        }
      }
      floor_total += best;
    }
    result.min_achievable_delay_s = floor_total;
  }
  return result;
}

TauResult solve_tau_impl(const Scenario& scenario, const StrategyTraits& traits,
                         std::span<const double> alpha, std::span<const double> beta,
                         const OptimizerConfig& config) {
  config.validate();
  const int n = scenario.n_devices;
  const double d_req = config.resolve_d_req(scenario);
  const RadioParams radio = scenario.radio();

  std::vector<double> bits(n), log_rate(n);
  bool any_traffic = false;
  for (int i = 0; i < n; ++i) {
    bits[i] = scenario.traffic.fps *
              (alpha[i] * static_cast<double>(scenario.traffic.image_bits) +
               beta[i] * static_cast<double>(scenario.traffic.message_bits));
    log_rate[i] = shannon_rate(1.0, radio, i);
    if (bits[i] > 0.0) any_traffic = true;
  }

  TauResult res;
  res.tau.tau.assign(n, 1.0 / static_cast<double>(n));
  if (!any_traffic) {
    // Delay is share-independent; the uniform allocation is the convention.
    res.converged = true;
    res.mu = kMuFloor;
    return res;
  }

  // Fixed delay pieces; intermediate iterates may sit outside the airtime
  // budget, so the loop evaluates the delay on raw arithmetic instead of the
  // validated public entry points.
  const auto& compute = scenario.compute;
  double delay_base = compute.t_pr_device_s +
                      (traits.device_inference ? compute.t_inf_device_s : 0.0) +
                      compute.t_pr_server_s + compute.t_sc_tx_s;
  double total_bits = 0.0;
  double server_load = 0.0;
  for (int i = 0; i < n; ++i) {
    total_bits += bits[i];
    server_load += alpha[i];
  }
  delay_base += server_load * compute.t_inf_server_s;
  if (compute.backhaul_mode == BackhaulMode::kFixedTime) {
    delay_base += compute.backhaul_fixed_s;
  } else {
    delay_base += total_bits / compute.backhaul_rate_bps;
  }
  const auto delay_at = [&](const std::vector<double>& t) {
    double total = delay_base;
    for (int i = 0; i < n; ++i) {
      if (bits[i] > 0.0) {
        const double rate = t[i] * log_rate[i];
        if (rate <= 0.0) return kInf;
        total += bits[i] / rate;
      }
    }
    return total;
  };

  // Stationarity weights at lambda = 0; mu is seeded so the shares start on
  // the airtime budget.
  std::vector<double> weight(n);
  double weight_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    weight[i] = log_rate[i] > 0.0 ? std::sqrt(bits[i] / log_rate[i]) : 0.0;
    weight_sum += weight[i];
  }
  double lambda = 0.0;
  double mu = std::max(weight_sum * weight_sum, kMuFloor);

  std::vector<double> tau(n, 0.0), prev(n, 0.0);
  double kappa1 = config.kappa1;
  double kappa2 = config.kappa2;
  for (int k = 1; k <= config.max_inner_iters; ++k) {
    const double scale = std::sqrt((1.0 + lambda) / mu);
    for (int i = 0; i < n; ++i) {
      tau[i] = std::clamp(weight[i] * scale, 0.0, 1.0);
    }
    const double d_total = delay_at(tau);
    double tau_sum = 0.0;
    for (double t : tau) tau_sum += t;
    if (std::isfinite(d_total)) {
      lambda = std::max(0.0, lambda + kappa1 * (d_total - d_req));
    }
    mu = std::max(kMuFloor, mu + kappa2 * (tau_sum - 1.0));
    kappa1 *= config.kappa_decay;
    kappa2 *= config.kappa_decay;

    if (k >= 2) {
      double diff = 0.0;
      for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(tau[i] - prev[i]));
      if (diff < config.epsilon) {
        res.converged = true;
        res.iterations = k;
        break;
      }
    }
    prev = tau;
    res.iterations = k;
  }
  // Primal feasibility restoration: when the budget constraint is active the
  // subgradient iterates can stall a hair above it; scaling onto the budget
  // keeps the stationarity-determined relative allocation.
  double tau_sum = 0.0;
  for (double t : tau) tau_sum += t;
  if (tau_sum > 1.0) {
    for (double& t : tau) t /= tau_sum;
  }
  res.tau.tau = tau;
  res.lambda = lambda;
  res.mu = mu;
  return res;
}

Solution assemble_solution(const Scenario& scenario, const StrategyTraits& traits,
                           const ThresholdSet& thresholds, const TimeAllocation& tau,
                           double d_req) {
  Solution sol;
  sol.thresholds = thresholds;
  sol.tau = tau;
  std::vector<double> alpha, beta;
  traffic_rates(scenario, traits, thresholds, alpha, beta);
  const RadioParams radio = scenario.radio();
  sol.breakdown = strategy_delay(scenario, traits, alpha, beta, radio, tau);
  sol.mean_delay_s = sol.breakdown.total;
  sol.sum_accuracy = sum_accuracy_at(scenario, thresholds);
  sol.feasible = sol.mean_delay_s <= d_req + 1e-9;
  return sol;
}

// The lightest-traffic configuration a strategy can reach, with its own
// optimal shares; its delay is the strategy's floor and the warm restart
// point when the canonical start overshoots the budget.
ThresholdSet min_traffic_thresholds(const StrategyTraits& traits, int n) {
  switch (traits.kind) {
    case Strategy::kProposed:
    case Strategy::kDeviceCentric:
      return ThresholdSet::uniform(n, 1.0, 1.0, 0.5);  // everything discarded
    case Strategy::kCascade:
      return ThresholdSet::uniform(n, 0.0, 0.0, 0.5);  // messages only
    case Strategy::kServerCentric:
      return ThresholdSet::uniform(n, 0.0, 1.0, 0.5);  // images always
  }
  return ThresholdSet::uniform(n, 1.0, 1.0, 0.5);
}

Solution optimize_impl(const Scenario& scenario, const StrategyTraits& traits,
                       const OptimizerConfig& config) {
  config.validate();
  const int n = scenario.n_devices;
  const double d_req = config.resolve_d_req(scenario);
  const RadioParams radio = scenario.radio();

  TimeAllocation uniform;
  uniform.tau.assign(n, 1.0 / static_cast<double>(n));

  const ThresholdSet floor_theta = min_traffic_thresholds(traits, n);
  double min_delay;
  {
    std::vector<double> alpha, beta;
    traffic_rates(scenario, traits, floor_theta, alpha, beta);
    const TauResult tr = solve_tau_impl(scenario, traits, alpha, beta, config);
    min_delay = strategy_delay(scenario, traits, alpha, beta, radio, tr.tau).total;
  }

  ThresholdSet theta = ThresholdSet::uniform(n, 0.5, 0.5, 0.5);
  if (traits.kind == Strategy::kCascade) theta = ThresholdSet::uniform(n, 0.0, 0.5, 0.5);
  if (traits.kind == Strategy::kServerCentric) theta = ThresholdSet::uniform(n, 0.0, 1.0, 0.5);

  const GridCache cache = build_grid_cache(scenario, config.grid_points_m);
  TimeAllocation tau = uniform;
  TauResult tau_res;
  double prev_obj = -kInf;
  Solution sol;
  int iterations = 0;
  bool converged = false;
  for (int t = 1; t <= config.max_outer_iters; ++t) {
    iterations = t;
    std::vector<double> alpha, beta;
    traffic_rates(scenario, traits, theta, alpha, beta);
    tau_res = solve_tau_impl(scenario, traits, alpha, beta, config);
    tau = tau_res.tau;

    // The minimized delay keeps the previous thresholds feasible, so only the
    // initial point can overshoot; restart it from the traffic floor.
    const DelayBreakdown check =
        strategy_delay(scenario, traits, alpha, beta, radio, tau);
    if (check.total > d_req && traits.kind != Strategy::kServerCentric) {
      theta = floor_theta;
      traffic_rates(scenario, traits, theta, alpha, beta);
      tau_res = solve_tau_impl(scenario, traits, alpha, beta, config);
      tau = tau_res.tau;
    }

    const ThresholdSearchResult th_res =
        greedy_thresholds(scenario, traits, tau, theta, config, &cache);
    theta = th_res.thresholds;

    sol.objective_trace.push_back(th_res.sum_accuracy);
    sol.diagnostics.push_back(OuterIterRecord{t, th_res.sum_accuracy, th_res.delay_s,
                                              tau_res.lambda, tau_res.mu});
    if (std::fabs(th_res.sum_accuracy - prev_obj) < config.epsilon) {
      prev_obj = th_res.sum_accuracy;
      converged = true;
      break;
    }
    prev_obj = th_res.sum_accuracy;
  }

  auto trace = std::move(sol.objective_trace);
  auto diag = std::move(sol.diagnostics);
  sol = assemble_solution(scenario, traits, theta, tau, d_req);
  sol.objective_trace = std::move(trace);
  sol.diagnostics = std::move(diag);
  sol.outer_iterations = iterations;
  sol.converged = converged;
  sol.lambda = tau_res.lambda;
  sol.mu = tau_res.mu;
  sol.min_achievable_delay_s = min_delay;
  return sol;
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kDeviceCentric: return "device";
    case Strategy::kServerCentric: return "server";
    case Strategy::kCascade: return "cascade";
    case Strategy::kProposed: return "proposed";
  }
  return "?";
}

void OptimizerConfig::validate() const {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: step sizes and epsilon must be positive");
  }
  if (!(kappa_decay > 0.0 && kappa_decay <= 1.0)) {
    throw std::invalid_argument("OptimizerConfig: kappa_decay must lie in (0,1]");
  }
  if (grid_points_m < 2) {
    throw std::invalid_argument("OptimizerConfig: grid_points_m must be >= 2");
  }
  if (max_inner_iters < 1 || max_outer_iters < 1) {
    throw std::invalid_argument("OptimizerConfig: iteration caps must be positive");
  }
}

TauResult solve_tau(const Scenario& scenario, const ThresholdSet& thresholds,
                    const OptimizerConfig& config) {
  thresholds.validate();
  std::vector<double> alpha, beta;
  traffic_rates(scenario, traits_for(Strategy::kProposed), thresholds, alpha, beta);
  return solve_tau_impl(scenario, traits_for(Strategy::kProposed), alpha, beta, config);
}

TauResult solve_tau_raw(const Scenario& scenario, std::span<const double> alpha,
                        std::span<const double> beta, const OptimizerConfig& config) {
  return solve_tau_impl(scenario, traits_for(Strategy::kProposed), alpha, beta, config);
}

ThresholdSearchResult solve_thresholds(const Scenario& scenario, const TimeAllocation& tau,
                                       const ThresholdSet& warm_start,
                                       const OptimizerConfig& config) {
  return greedy_thresholds(scenario, traits_for(Strategy::kProposed), tau, warm_start, config);
}

Solution optimize(const Scenario& scenario, const OptimizerConfig& config) {
  return optimize_impl(scenario, traits_for(Strategy::kProposed), config);
}

std::pair<double, DelayBreakdown> evaluate(const Scenario& scenario,
                                           const ThresholdSet& thresholds,
                                           const TimeAllocation& tau) {
  return evaluate_strategy(scenario, Strategy::kProposed, thresholds, tau);
}

std::pair<double, DelayBreakdown> evaluate_strategy(const Scenario& scenario, Strategy strategy,
                                                    const ThresholdSet& thresholds,
                                                    const TimeAllocation& tau) {
  thresholds.validate();
  const StrategyTraits traits = traits_for(strategy);
  std::vector<double> alpha, beta;
  traffic_rates(scenario, traits, thresholds, alpha, beta);
  const RadioParams radio = scenario.radio();
  const DelayBreakdown d = strategy_delay(scenario, traits, alpha, beta, radio, tau);
  return {sum_accuracy_at(scenario, thresholds), d};
}

Solution optimize_strategy(const Scenario& scenario, Strategy strategy,
                           const OptimizerConfig& config) {
  return optimize_impl(scenario, traits_for(strategy), config);
}

Solution exhaustive_search(const Scenario& scenario, int grid_points,
                           const OptimizerConfig& config, std::int64_t max_combinations) {
  OptimizerConfig cfg = config;
  cfg.grid_points_m = grid_points;
  cfg.validate();
  const int n = scenario.n_devices;
  const double d_req = cfg.resolve_d_req(scenario);
  const StrategyTraits traits = traits_for(Strategy::kProposed);
  const GridCache cache = build_grid_cache(scenario, grid_points);
  const int m = grid_points;

  // All admissible triples for one device.
  struct Triple {
    int il, ih, is;
  };
  std::vector<Triple> triples;
  triples.reserve(static_cast<std::size_t>(m) * (m + 1) / 2 * m);
  for (int il = 0; il < m; ++il) {
    for (int ih = il; ih < m; ++ih) {
      for (int is = 0; is < m; ++is) triples.push_back({il, ih, is});
    }
  }

  const bool broadcast = scenario.homogeneous();
  const std::int64_t combos =
      broadcast ? static_cast<std::int64_t>(triples.size())
                : static_cast<std::int64_t>(
                      std::llround(std::pow(static_cast<double>(triples.size()), n)));
  if (combos > max_combinations) {
    throw std::invalid_argument("exhaustive_search: " + std::to_string(combos) +
                                " combinations exceed the budget of " +
                                std::to_string(max_combinations));
  }

  ThresholdSet best;
  double best_acc = -kInf;
  double best_alpha_sum = kInf;
  double best_width_sum = kInf;
  TimeAllocation best_tau;
  bool any_feasible = false;
  double min_delay_seen = kInf;

  std::vector<int> idx(broadcast ? 1 : n, 0);
  ThresholdSet cur;
  cur.per_device.resize(n);
  std::vector<double> alpha(n), beta(n);
  const RadioParams radio = scenario.radio();

  auto eval_current = [&]() {
    double acc = 0.0, alpha_sum = 0.0, width_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const Triple& t = triples[idx[broadcast ? 0 : i]];
      const auto& g = cache.quad(i);
      const double up = g.fdp[t.ih] - g.fdp[t.il];
      const double un = g.fdn[t.ih] - g.fdn[t.il];
      const double tp = 1.0 - g.fdp[t.ih];
      const double tn = g.fdn[t.il];
      const double fp = 1.0 - g.fdn[t.ih];
      acc += (tp + tn + up * (1.0 - g.fsp[t.is]) + un * g.fsn[t.is]) / 2.0;
      alpha[i] = (up + un) / 2.0;
      beta[i] = (tp + fp) / 2.0;
      alpha_sum += alpha[i];
      width_sum += cache.points[t.ih] - cache.points[t.il];
      cur.per_device[i] = {cache.points[t.il], cache.points[t.ih], cache.points[t.is]};
    }
    const TauResult tr = solve_tau_impl(scenario, traits, alpha, beta, cfg);
    const DelayBreakdown d = strategy_delay(scenario, traits, alpha, beta, radio, tr.tau);
    min_delay_seen = std::min(min_delay_seen, d.total);
    if (d.total <= d_req + 1e-12) {
      const bool better =
          !any_feasible || acc > best_acc + kTieTol ||
          (acc > best_acc - kTieTol &&
           (alpha_sum < best_alpha_sum - kTieTol ||
            (alpha_sum > best_alpha_sum - kTieTol && alpha_sum < best_alpha_sum + kTieTol &&
             width_sum < best_width_sum - kTieTol)));
      if (better) {
        best = cur;
        best_acc = acc;
        best_alpha_sum = alpha_sum;
        best_width_sum = width_sum;
        best_tau = tr.tau;
      }
      any_feasible = true;
    }
  };

  if (broadcast) {
    for (std::size_t k = 0; k < triples.size(); ++k) {
      idx[0] = static_cast<int>(k);
      eval_current();
    }
  } else {
    // Odometer over per-device triples.
    while (true) {
      eval_current();
      int pos = n - 1;
      while (pos >= 0) {
        if (++idx[pos] < static_cast<int>(triples.size())) break;
        idx[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }

  Solution sol;
  if (!any_feasible) {
    sol.feasible = false;
    sol.min_achievable_delay_s = min_delay_seen;
    sol.thresholds = ThresholdSet::uniform(n, 1.0, 1.0, 0.5);
    sol.tau.tau.assign(n, 1.0 / static_cast<double>(n));
    return sol;
  }
  sol = assemble_solution(scenario, traits, best, best_tau, d_req);
  sol.outer_iterations = 1;
  sol.converged = true;
  sol.objective_trace = {sol.sum_accuracy};
  return sol;
}

}  // namespace edgepose
