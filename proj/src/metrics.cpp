#include "edgepose/metrics.hpp"

#include <stdexcept>
#include <string>

namespace edgepose {

ThresholdSet ThresholdSet::uniform(std::size_t n_devices, double low, double high,
                                   double server) {
  ThresholdSet s;
  s.per_device.assign(n_devices, DeviceThresholds{low, high, server});
  s.validate();
  return s;
}

void ThresholdSet::validate() const {
  for (std::size_t i = 0; i < per_device.size(); ++i) {
    const auto& t = per_device[i];
    if (!(0.0 <= t.low && t.low <= t.high && t.high <= 1.0)) {
      throw std::invalid_argument("ThresholdSet: device " + std::to_string(i) +
                                  " violates 0 <= low <= high <= 1");
    }
    if (!(0.0 <= t.server && t.server <= 1.0)) {
      throw std::invalid_argument("ThresholdSet: device " + std::to_string(i) +
                                  " server threshold out of [0,1]");
    }
  }
}

DeviceOutcome device_outcomes(const ConfidenceQuad& quad, double theta_low,
                              double theta_high) {
  if (!(theta_low <= theta_high)) {
    throw std::invalid_argument("device_outcomes: theta_low > theta_high");
  }
  const double fp_low = quad.dev_pos.cdf(theta_low);
  const double fp_high = quad.dev_pos.cdf(theta_high);
  const double fn_low = quad.dev_neg.cdf(theta_low);
  const double fn_high = quad.dev_neg.cdf(theta_high);
  DeviceOutcome o;
  o.tp = 1.0 - fp_high;
  o.fn = fp_low;
  o.up = fp_high - fp_low;
  o.fp = 1.0 - fn_high;
  o.tn = fn_low;
  o.un = fn_high - fn_low;
  return o;
}

ServerOutcome server_outcomes(const ConfidenceQuad& quad, double theta_server) {
  if (!(theta_server >= 0.0 && theta_server <= 1.0)) {
    throw std::invalid_argument("server_outcomes: threshold out of [0,1]");
  }
  const double fp = quad.srv_pos.cdf(theta_server);
  const double fn = quad.srv_neg.cdf(theta_server);
  ServerOutcome o;
  o.tp = 1.0 - fp;
  o.fn = fp;
  o.fp = 1.0 - fn;
  o.tn = fn;
  return o;
}

double accuracy_cooperative(const DeviceOutcome& dev, const ServerOutcome& srv) {
  return (dev.tp + dev.tn + dev.up * srv.tp + dev.un * srv.tn) / 2.0;
}

double accuracy_device_centric(const DeviceOutcome& dev) {
  return (dev.tp + dev.tn) / 2.0;
}

double accuracy_server_centric(const ServerOutcome& srv) {
  return (srv.tp + srv.tn) / 2.0;
}

double accuracy_cascade(const ConfidenceQuad& quad, double theta_high,
                        double theta_server) {
  return accuracy_cooperative(device_outcomes(quad, 0.0, theta_high),
                              server_outcomes(quad, theta_server));
}

double uncertain_prob(const DeviceOutcome& dev) { return (dev.up + dev.un) / 2.0; }

double positive_prob(const DeviceOutcome& dev) { return (dev.tp + dev.fp) / 2.0; }

}  // namespace edgepose
