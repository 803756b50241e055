#include "edgepose/scenario.hpp"

#include <random>
#include <stdexcept>

#include "edgepose/rng.hpp"

namespace edgepose {

void Scenario::finalize() {
  if (n_devices < 1) {
    throw std::invalid_argument("Scenario: n_devices must be >= 1");
  }
  if (quads.empty()) {
    throw std::invalid_argument("Scenario: no confidence models configured");
  }
  if (quads.size() != 1 && quads.size() != static_cast<std::size_t>(n_devices)) {
    throw std::invalid_argument("Scenario: quads must be shared (1) or per-device");
  }
  if (gains_db.empty()) {
    gains_db.resize(n_devices, gain_mean_db);
    if (gain_std_db > 0.0) {
      auto rng = make_engine(seed, 0x67a1f5u);
      std::normal_distribution<double> dist(gain_mean_db, gain_std_db);
      for (auto& g : gains_db) g = dist(rng);
    }
  }
  if (gains_db.size() != static_cast<std::size_t>(n_devices)) {
    throw std::invalid_argument("Scenario: gains_db length must match n_devices");
  }
  if (!(room_x_m > 0.0 && room_y_m > 0.0 && room_z_m > 0.0)) {
    throw std::invalid_argument("Scenario: room extents must be positive");
  }
  if (!(occlusion_prob >= 0.0 && occlusion_prob <= 1.0)) {
    throw std::invalid_argument("Scenario: occlusion_prob out of [0,1]");
  }
  if (joints < 1) {
    throw std::invalid_argument("Scenario: joints must be >= 1");
  }
  traffic.validate();
  compute.validate();
}

const ConfidenceQuad& Scenario::quad(int device) const {
  if (quads.size() == 1) return quads.front();
  return quads.at(device);
}

RadioParams Scenario::radio() const {
  if (gains_db.size() != static_cast<std::size_t>(n_devices)) {
    throw std::logic_error("Scenario::radio: call finalize() first");
  }
  return RadioParams::from_dbm(bandwidth_hz, noise_dbm_hz, tx_power_dbm, gains_db);
}

bool Scenario::homogeneous() const {
  if (quads.size() != 1) return false;
  for (double g : gains_db) {
    if (g != gains_db.front()) return false;
  }
  return true;
}

Scenario default_scenario() {
  Scenario s;
  s.quads = {ConfidenceQuad{
      ConfidenceModel::beta(6.0, 2.0),
      ConfidenceModel::beta(2.0, 6.0),
      ConfidenceModel::beta(12.0, 2.0),
      ConfidenceModel::beta(2.0, 12.0),
  }};
  s.finalize();
  return s;
}

}  // namespace edgepose
