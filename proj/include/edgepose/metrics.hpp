#ifndef EDGEPOSE_METRICS_HPP
#define EDGEPOSE_METRICS_HPP

#include <cstddef>
#include <vector>

#include "edgepose/confidence.hpp"

namespace edgepose {

// Confusion-matrix mass at a device under the two-threshold rule.
// tp + fn + up == 1 (positive class), fp + tn + un == 1 (negative class).
struct DeviceOutcome {
  double tp = 0.0;  // classified positive, truly positive
  double fn = 0.0;  // classified negative, truly positive
  double fp = 0.0;  // classified positive, truly negative
  double tn = 0.0;  // classified negative, truly negative
  double up = 0.0;  // uncertain, truly positive
  double un = 0.0;  // uncertain, truly negative
};

// Confusion-matrix mass at the server (single threshold, no uncertain band).
struct ServerOutcome {
  double tp = 0.0;
  double fn = 0.0;
  double fp = 0.0;
  double tn = 0.0;
};

// Per-device thresholds: low/high filter the device score, server re-checks
// offloaded images.
struct DeviceThresholds {
  double low = 0.5;
  double high = 0.5;
  double server = 0.5;
};

struct ThresholdSet {
  std::vector<DeviceThresholds> per_device;

  static ThresholdSet uniform(std::size_t n_devices, double low, double high, double server);
  void validate() const;  // throws std::invalid_argument on ordering/range violations
};

// Splits the positive/negative score mass at (theta_low, theta_high).
// Requires theta_low <= theta_high.
DeviceOutcome device_outcomes(const ConfidenceQuad& quad, double theta_low, double theta_high);

ServerOutcome server_outcomes(const ConfidenceQuad& quad, double theta_server);

// Balanced-prior accuracy of the cooperative scheme: correct device decisions
// plus offloaded mass redeemed by the server.
double accuracy_cooperative(const DeviceOutcome& dev, const ServerOutcome& srv);

// Degenerate band (low == high): nothing offloaded.
double accuracy_device_centric(const DeviceOutcome& dev);

// Full band (low=0, high=1): everything offloaded.
double accuracy_server_centric(const ServerOutcome& srv);

// Single device threshold with no discard path (low pinned at 0).
double accuracy_cascade(const ConfidenceQuad& quad, double theta_high, double theta_server);

// Probability a device classifies an input as uncertain (offloads the image).
double uncertain_prob(const DeviceOutcome& dev);

// Probability a device classifies an input as positive (sends a message).
double positive_prob(const DeviceOutcome& dev);

}  // namespace edgepose

#endif
