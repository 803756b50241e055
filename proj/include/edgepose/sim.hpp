#ifndef EDGEPOSE_SIM_HPP
#define EDGEPOSE_SIM_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "edgepose/geometry.hpp"
#include "edgepose/metrics.hpp"
#include "edgepose/optimizer.hpp"
#include "edgepose/scenario.hpp"

namespace edgepose {

// Ground truth for one simulated frame: the pose and each device's
// positive/negative label (negative = occluded or no usable view).
struct FrameTruth {
  Pose3D pose;
  std::vector<std::uint8_t> positive;  // one per device
};

// Cameras at the room corners first (maximal baselines), then edge
// midpoints, all at wall height looking at the room center. Deterministic.
std::vector<CameraProjection> generate_rig(int n_devices, double room_x_m, double room_y_m,
                                           double room_z_m);

std::vector<FrameTruth> generate_frames(std::mt19937_64& rng, int n_frames, int joints,
                                        double room_x_m, double room_y_m, double room_z_m,
                                        double occlusion_prob, int n_devices);

struct SimResult {
  std::vector<double> accuracy_per_device;  // class-balanced, matching the analytic prior
  double accuracy_mean = 0.0;
  std::vector<double> alpha_hat;  // class-balanced uncertain rate per device
  std::vector<double> beta_hat;   // class-balanced positive rate per device
  double mpjpe_m = 0.0;
  bool mpjpe_defined = false;
  double analytic_sum_accuracy = 0.0;
  double mean_delay_s = 0.0;
  double drop_rate = 0.0;
  long frames = 0;
};

// Frame-level Monte Carlo of the full pipeline: sample label-conditional
// confidences, run the two-threshold device rule and the server re-check,
// project admitted views with confidence-dependent pixel noise
// sigma(c) = sigma_min + sigma0*(1-c), triangulate frames with >= 2 admitted
// views, and recompute the delay from each frame's realized offload
// indicators. Deterministic for a fixed seed, independent of fan-out width.
SimResult simulate(const Scenario& scenario, const ThresholdSet& thresholds,
                   const TimeAllocation& tau, int n_frames);
SimResult simulate(const Scenario& scenario, const ThresholdSet& thresholds,
                   const TimeAllocation& tau, int n_frames, std::uint64_t seed);

struct LemmaSweepRow {
  ThresholdSet thresholds;
  double sum_accuracy = 0.0;
  double mpjpe_m = 0.0;
  bool mpjpe_defined = false;
};

struct LemmaResult {
  std::vector<LemmaSweepRow> rows;
  std::optional<double> spearman_rho;  // rank correlation of sum accuracy vs -MPJPE
};

// Empirical check that higher analytic sum accuracy goes with lower
// simulated MPJPE across a threshold sweep.
LemmaResult validate_lemma1(const Scenario& scenario,
                            const std::vector<ThresholdSet>& threshold_sweep, int n_frames);

// 25 threshold sets spanning lax device-only filtering through wide
// cooperative bands; accuracy rises along the list for server-dominant quads.
std::vector<ThresholdSet> default_lemma_sweep(int n_devices);

// Spearman rank correlation; nullopt when either rank vector is degenerate.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

enum class SweepAxis { kDReq, kNDevices, kGainDb, kImageBytes, kTInfDevice };

const char* sweep_axis_name(SweepAxis a);

struct SweepRow {
  double axis_value = 0.0;
  Strategy strategy = Strategy::kProposed;
  double sum_accuracy = 0.0;
  std::optional<double> mpjpe_m;
  double delay_s = 0.0;
  bool feasible = false;
  std::optional<double> drop_rate;
};

// Optimizes every requested strategy at every axis value; optionally runs the
// simulator at the optimized operating point to add MPJPE and drop rate.
std::vector<SweepRow> sweep(const Scenario& scenario, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::vector<Strategy>& strategies,
                            const OptimizerConfig& config, bool with_simulation, int n_frames);

// Fan-out width for frame-parallel execution; EDGEPOSE_THREADS caps it
// (0 or unset = auto).
int fanout_width();

}  // namespace edgepose

#endif
