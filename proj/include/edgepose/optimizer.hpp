#ifndef EDGEPOSE_OPTIMIZER_HPP
#define EDGEPOSE_OPTIMIZER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "edgepose/delay.hpp"
#include "edgepose/metrics.hpp"
#include "edgepose/scenario.hpp"

namespace edgepose {

enum class Strategy { kDeviceCentric, kServerCentric, kCascade, kProposed };

const char* strategy_name(Strategy s);

struct OptimizerConfig {
  double kappa1 = 0.1;          // multiplier step, delay constraint
  double kappa2 = 0.1;          // multiplier step, airtime budget
  double kappa_decay = 0.99;    // geometric per-iteration step decay
  double epsilon = 1e-6;        // convergence threshold (tau max-norm, objective)
  int grid_points_m = 101;      // threshold grid resolution
  int max_inner_iters = 10000;
  int max_outer_iters = 50;
  double d_req_s = 0.0;         // <= 0: take the scenario's budget

  void validate() const;
  double resolve_d_req(const Scenario& s) const { return d_req_s > 0.0 ? d_req_s : s.d_req_s; }
};

// Dual-iteration state of the airtime subproblem, exposed for diagnostics.
struct TauResult {
  TimeAllocation tau;
  double lambda = 0.0;
  double mu = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OuterIterRecord {
  int iter = 0;
  double sum_accuracy = 0.0;
  double delay_s = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
};

struct Solution {
  ThresholdSet thresholds;
  TimeAllocation tau;
  double sum_accuracy = 0.0;
  double mean_delay_s = 0.0;
  DelayBreakdown breakdown;
  int outer_iterations = 0;
  bool feasible = false;
  bool converged = false;
  std::vector<double> objective_trace;  // sum accuracy per outer iteration
  double min_achievable_delay_s = 0.0;  // set when infeasible
  double lambda = 0.0;                  // final multipliers
  double mu = 0.0;
  std::vector<OuterIterRecord> diagnostics;
};

struct ThresholdSearchResult {
  ThresholdSet thresholds;
  double sum_accuracy = 0.0;
  double delay_s = 0.0;
  bool feasible = false;
  int rounds = 0;
  double min_achievable_delay_s = 0.0;  // grid floor at these shares; set when infeasible
};

// Minimizes mean delay over TDMA shares at fixed thresholds: stationarity
// gives tau_i proportional to sqrt((1+lambda) * traffic_i / log-rate_i),
// multipliers follow projected subgradient steps until the share vector
// stabilizes. All-zero traffic falls back to the uniform allocation.
TauResult solve_tau(const Scenario& scenario, const ThresholdSet& thresholds,
                    const OptimizerConfig& config);

// Same subproblem for explicit per-device traffic rates.
TauResult solve_tau_raw(const Scenario& scenario, std::span<const double> alpha,
                        std::span<const double> beta, const OptimizerConfig& config);

// Coordinate-wise greedy grid search over per-device thresholds at fixed
// shares: scan (low, high) pairs with the server threshold held, then scan
// the server threshold, repeat until no threshold moves. Only candidates
// meeting the delay budget are accepted, so a feasible warm start stays
// feasible. Ties prefer less offload traffic, then a narrower band.
ThresholdSearchResult solve_thresholds(const Scenario& scenario, const TimeAllocation& tau,
                                       const ThresholdSet& warm_start,
                                       const OptimizerConfig& config);

// Alternates solve_tau / solve_thresholds from the canonical start (all
// thresholds 0.5, uniform shares) until the objective stalls. The objective
// trace is non-decreasing. Structural infeasibility (even zero traffic
// misses the budget) is reported, never clamped.
Solution optimize(const Scenario& scenario, const OptimizerConfig& config);

// Joint enumeration of every grid threshold combination, each with its own
// solve_tau; the validation oracle. Homogeneous scenarios search one shared
// triple; otherwise the cross product is enumerated, guarded by a budget.
Solution exhaustive_search(const Scenario& scenario, int grid_points,
                           const OptimizerConfig& config,
                           std::int64_t max_combinations = 5'000'000);

// One cooperative evaluation point: (sum accuracy, delay breakdown).
std::pair<double, DelayBreakdown> evaluate(const Scenario& scenario,
                                           const ThresholdSet& thresholds,
                                           const TimeAllocation& tau);

// Strategy-native evaluation (server-centric skips device inference, cascade
// sends messages for everything it keeps).
std::pair<double, DelayBreakdown> evaluate_strategy(const Scenario& scenario, Strategy strategy,
                                                    const ThresholdSet& thresholds,
                                                    const TimeAllocation& tau);

// Optimizes the given strategy: full alternation for the proposed scheme,
// the matching restricted grids for the conventional ones.
Solution optimize_strategy(const Scenario& scenario, Strategy strategy,
                           const OptimizerConfig& config);

}  // namespace edgepose

#endif
