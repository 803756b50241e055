#ifndef EDGEPOSE_SCENARIO_HPP
#define EDGEPOSE_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "edgepose/confidence.hpp"
#include "edgepose/delay.hpp"

namespace edgepose {

// Full experiment parameterization. Radio quantities are kept in the dB form
// they are quoted in; radio() converts to linear units in one place.
struct Scenario {
  int n_devices = 4;

  // One shared quad or one per device.
  std::vector<ConfidenceQuad> quads;

  TrafficParams traffic{2.0, 32 * 1024 * 8, 68 * 8};
  ComputeParams compute{0.010, 0.100, 0.020, 0.005, 0.020,
                        BackhaulMode::kFixedTime, 0.0005, 1e8};

  double bandwidth_hz = 1e6;
  double noise_dbm_hz = -165.0;
  double tx_power_dbm = 30.0;
  double gain_mean_db = -100.0;
  double gain_std_db = 0.0;
  std::vector<double> gains_db;  // resolved per-device gains; filled by finalize()

  double d_req_s = 0.5;

  int joints = 17;
  double room_x_m = 10.0;
  double room_y_m = 10.0;
  double room_z_m = 3.0;
  double occlusion_prob = 0.2;
  double noise_sigma0_px = 8.0;
  double noise_sigma_min_px = 0.5;
  std::uint64_t seed = 12345;

  // Draws missing per-device gains from N(gain_mean_db, gain_std_db) using the
  // scenario seed, and validates sizes. Idempotent.
  void finalize();

  const ConfidenceQuad& quad(int device) const;
  RadioParams radio() const;
  // Shared quad and identical gains: per-device searches collapse to one.
  bool homogeneous() const;
};

// Default parameterization: 4 devices, 2 fps, 32 KiB images, 68 B messages,
// 0.5 s delay budget, beta-distributed confidence scores with the server
// models spread further toward the ends than the device models.
Scenario default_scenario();

}  // namespace edgepose

#endif
