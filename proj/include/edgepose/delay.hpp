#ifndef EDGEPOSE_DELAY_HPP
#define EDGEPOSE_DELAY_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace edgepose {

// Uplink radio parameters. Stored in linear units (watts, W/Hz, unitless
// gain); dB/dBm conversion happens only in from_dbm().
struct RadioParams {
  double bandwidth_hz = 0.0;
  double noise_psd_w_hz = 0.0;
  double tx_power_w = 0.0;
  std::vector<double> channel_gains;  // linear, one per device

  static RadioParams from_dbm(double bandwidth_hz, double noise_dbm_hz, double tx_power_dbm,
                              const std::vector<double>& channel_gains_db);
  static RadioParams from_linear(double bandwidth_hz, double noise_psd_w_hz, double tx_power_w,
                                 std::vector<double> channel_gains);

  std::size_t n_devices() const { return channel_gains.size(); }
};

enum class BackhaulMode { kFixedTime, kRate };

// Processing and inference times (seconds). Inference times are single-shot;
// the cooperative formulas scale the server time by the offload rate.
// The downlink message time and the fixed backhaul time are constants.
struct ComputeParams {
  double t_pr_device_s = 0.0;
  double t_inf_device_s = 0.0;
  double t_inf_server_s = 0.0;
  double t_pr_server_s = 0.0;
  double t_sc_tx_s = 0.0;
  BackhaulMode backhaul_mode = BackhaulMode::kFixedTime;
  double backhaul_fixed_s = 0.0;
  double backhaul_rate_bps = 0.0;  // used in kRate mode

  void validate() const;
};

// Converts a (FLOPs, cycles-per-FLOP, clock) triple into an inference time.
double inference_time_from_flops(double flops, double cycles_per_flop, double clock_hz);

struct TrafficParams {
  double fps = 0.0;
  std::int64_t image_bits = 0;
  std::int64_t message_bits = 0;

  void validate() const;
};

// TDMA shares, one per device. sum(tau) <= 1.
struct TimeAllocation {
  std::vector<double> tau;

  void validate() const;
};

// Additive end-to-end delay decomposition (seconds). total is the exact sum
// of the seven components; an infeasible allocation (positive traffic with a
// zero rate) yields +infinity rather than an error.
struct DelayBreakdown {
  double device_proc = 0.0;
  double device_inf = 0.0;
  double uplink_tx = 0.0;
  double backhaul_tx = 0.0;
  double server_inf = 0.0;
  double server_proc = 0.0;
  double downlink_tx = 0.0;
  double total = 0.0;

  bool feasible_value() const;  // total is finite
};

// Uplink rate for device i given its TDMA share: tau * W * log2(1 + SNR).
double shannon_rate(double tau_i, const RadioParams& radio, std::size_t device_index);

// Mean delay of the cooperative scheme: per-device uplink traffic
// fps*(alpha*image + beta*message) at the device's share, backhaul forward,
// server re-inference paid at rate alpha.
DelayBreakdown delay_cooperative(const TrafficParams& traffic, const ComputeParams& compute,
                                 const RadioParams& radio, std::span<const double> alpha,
                                 std::span<const double> beta, const TimeAllocation& tau);

// Device-only inference: message traffic only, no server inference.
DelayBreakdown delay_device_centric(const TrafficParams& traffic, const ComputeParams& compute,
                                    const RadioParams& radio, std::span<const double> beta,
                                    const TimeAllocation& tau);

// Server-only inference: every frame ships the image, device inference is
// skipped, the server runs one inference per device.
DelayBreakdown delay_server_centric(const TrafficParams& traffic, const ComputeParams& compute,
                                    const RadioParams& radio, const TimeAllocation& tau);

// Single-threshold cascade: below-threshold frames offload, the rest send
// messages, so the message rate is 1 - alpha.
DelayBreakdown delay_cascade(const TrafficParams& traffic, const ComputeParams& compute,
                             const RadioParams& radio, std::span<const double> alpha,
                             const TimeAllocation& tau);

}  // namespace edgepose

#endif
