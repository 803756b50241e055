#include "edgepose/delay.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace edgepose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void check_counts(std::size_t n, std::span<const double> v, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " entries, got " + std::to_string(v.size()));
  }
}

// Shared assembly: per-device uplink bits/s plus server inference load.
DelayBreakdown assemble(const TrafficParams& traffic, const ComputeParams& compute,
                        const RadioParams& radio, std::span<const double> alpha,
                        std::span<const double> beta, const TimeAllocation& tau,
                        bool device_inference) {
  const std::size_t n = radio.n_devices();
  check_counts(n, alpha, "delay: alpha");
  check_counts(n, beta, "delay: beta");
  check_counts(n, std::span<const double>(tau.tau), "delay: tau");
  tau.validate();
  traffic.validate();
  compute.validate();

  DelayBreakdown d;
  d.device_proc = compute.t_pr_device_s;
  d.device_inf = device_inference ? compute.t_inf_device_s : 0.0;
  d.server_proc = compute.t_pr_server_s;
  d.downlink_tx = compute.t_sc_tx_s;

  double uplink = 0.0;
  double total_bits_per_s = 0.0;
  double server_load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double bits_per_s =
        traffic.fps * (alpha[i] * static_cast<double>(traffic.image_bits) +
                       beta[i] * static_cast<double>(traffic.message_bits));
    total_bits_per_s += bits_per_s;
    server_load += alpha[i];
    if (bits_per_s > 0.0) {
      const double rate = shannon_rate(tau.tau[i], radio, i);
      if (rate <= 0.0) {
        uplink = kInf;  // positive traffic with no airtime: infeasible point
      } else if (uplink != kInf) {
        uplink += bits_per_s / rate;
      }
    }
  }
  d.uplink_tx = uplink;
  d.server_inf = server_load * compute.t_inf_server_s;

  if (compute.backhaul_mode == BackhaulMode::kFixedTime) {
    d.backhaul_tx = compute.backhaul_fixed_s;
  } else {
    d.backhaul_tx = total_bits_per_s / compute.backhaul_rate_bps;
  }

  d.total = d.device_proc + d.device_inf + d.uplink_tx + d.backhaul_tx + d.server_inf +
            d.server_proc + d.downlink_tx;
  return d;
}

}  // namespace

RadioParams RadioParams::from_dbm(double bandwidth_hz, double noise_dbm_hz, double tx_power_dbm,
                                  const std::vector<double>& channel_gains_db) {
  std::vector<double> gains;
  gains.reserve(channel_gains_db.size());
  for (double g : channel_gains_db) gains.push_back(db_to_linear(g));
  return from_linear(bandwidth_hz, dbm_to_watts(noise_dbm_hz), dbm_to_watts(tx_power_dbm),
                     std::move(gains));
}

RadioParams RadioParams::from_linear(double bandwidth_hz, double noise_psd_w_hz,
                                     double tx_power_w, std::vector<double> channel_gains) {
  if (!(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("RadioParams: bandwidth must be positive");
  }
  if (!(noise_psd_w_hz > 0.0) || !(tx_power_w > 0.0)) {
    throw std::invalid_argument("RadioParams: noise PSD and tx power must be positive");
  }
  for (double g : channel_gains) {
    if (!std::isfinite(g) || g < 0.0) {
      throw std::invalid_argument("RadioParams: channel gains must be finite and non-negative");
    }
  }
  RadioParams r;
  r.bandwidth_hz = bandwidth_hz;
  r.noise_psd_w_hz = noise_psd_w_hz;
  r.tx_power_w = tx_power_w;
  r.channel_gains = std::move(channel_gains);
  return r;
}

void ComputeParams::validate() const {
  if (t_pr_device_s < 0.0 || t_inf_device_s < 0.0 || t_inf_server_s < 0.0 ||
      t_pr_server_s < 0.0 || t_sc_tx_s < 0.0 || backhaul_fixed_s < 0.0) {
    throw std::invalid_argument("ComputeParams: times must be non-negative");
  }
  if (backhaul_mode == BackhaulMode::kRate && !(backhaul_rate_bps > 0.0)) {
    throw std::invalid_argument("ComputeParams: backhaul rate must be positive in rate mode");
  }
}

double inference_time_from_flops(double flops, double cycles_per_flop, double clock_hz) {
  if (!(flops > 0.0) || !(cycles_per_flop > 0.0) || !(clock_hz > 0.0)) {
    throw std::invalid_argument("inference_time_from_flops: arguments must be positive");
  }
  return flops * cycles_per_flop / clock_hz;
}

void TrafficParams::validate() const {
  if (!(fps > 0.0) || image_bits <= 0 || message_bits <= 0) {
    throw std::invalid_argument("TrafficParams: fps, image_bits, message_bits must be positive");
  }
}

void TimeAllocation::validate() const {
  double sum = 0.0;
  for (double t : tau) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("TimeAllocation: each share must lie in [0,1]");
    }
    sum += t;
  }
  if (sum > 1.0 + 1e-9) {
    throw std::invalid_argument("TimeAllocation: shares sum to " + std::to_string(sum) +
                                " > 1");
  }
}

bool DelayBreakdown::feasible_value() const { return std::isfinite(total); }

double shannon_rate(double tau_i, const RadioParams& radio, std::size_t device_index) {
  if (!(tau_i >= 0.0 && tau_i <= 1.0)) {
    throw std::invalid_argument("shannon_rate: tau out of [0,1]");
  }
  if (device_index >= radio.n_devices()) {
    throw std::invalid_argument("shannon_rate: device index out of range");
  }
  const double snr = radio.tx_power_w * radio.channel_gains[device_index] /
                     (radio.noise_psd_w_hz * radio.bandwidth_hz);
  return tau_i * radio.bandwidth_hz * std::log2(1.0 + snr);
}

DelayBreakdown delay_cooperative(const TrafficParams& traffic, const ComputeParams& compute,
                                 const RadioParams& radio, std::span<const double> alpha,
                                 std::span<const double> beta, const TimeAllocation& tau) {
  return assemble(traffic, compute, radio, alpha, beta, tau, /*device_inference=*/true);
}

DelayBreakdown delay_device_centric(const TrafficParams& traffic, const ComputeParams& compute,
                                    const RadioParams& radio, std::span<const double> beta,
                                    const TimeAllocation& tau) {
  const std::vector<double> zeros(radio.n_devices(), 0.0);
  return assemble(traffic, compute, radio, zeros, beta, tau, /*device_inference=*/true);
}

DelayBreakdown delay_server_centric(const TrafficParams& traffic, const ComputeParams& compute,
                                    const RadioParams& radio, const TimeAllocation& tau) {
  const std::vector<double> ones(radio.n_devices(), 1.0);
  const std::vector<double> zeros(radio.n_devices(), 0.0);
  return assemble(traffic, compute, radio, ones, zeros, tau, /*device_inference=*/false);
}

DelayBreakdown delay_cascade(const TrafficParams& traffic, const ComputeParams& compute,
                             const RadioParams& radio, std::span<const double> alpha,
                             const TimeAllocation& tau) {
  std::vector<double> beta(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) beta[i] = 1.0 - alpha[i];
  return assemble(traffic, compute, radio, alpha, beta, tau, /*device_inference=*/true);
}

}  // namespace edgepose
