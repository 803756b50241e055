#include "edgepose/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "edgepose/rng.hpp"

namespace edgepose {

namespace {

// COCO-style 17-joint offsets from the pelvis (x lateral, y forward, z up),
// meters. Any template works; it only has to stay inside the room.
constexpr double kSkeleton[17][3] = {
    {0.00, 0.08, 0.75},    // nose
    {0.03, 0.10, 0.78},    // left eye
    {-0.03, 0.10, 0.78},   // right eye
    {0.07, 0.05, 0.77},    // left ear
    {-0.07, 0.05, 0.77},   // right ear
    {0.20, 0.00, 0.55},    // left shoulder
    {-0.20, 0.00, 0.55},   // right shoulder
    {0.33, 0.02, 0.30},    // left elbow
    {-0.33, 0.02, 0.30},   // right elbow
    {0.40, 0.05, 0.05},    // left wrist
    {-0.40, 0.05, 0.05},   // right wrist
    {0.12, 0.00, 0.00},    // left hip
    {-0.12, 0.00, 0.00},   // right hip
    {0.14, 0.02, -0.45},   // left knee
    {-0.14, 0.02, -0.45},  // right knee
    {0.15, 0.04, -0.85},   // left ankle
    {-0.15, 0.04, -0.85},  // right ankle
};

Eigen::Vector3d template_offset(int joint) {
  const int j = joint % 17;
  const double lift = 0.01 * static_cast<double>(joint / 17);
  return {kSkeleton[j][0], kSkeleton[j][1], kSkeleton[j][2] + lift};
}

CameraProjection look_at_camera(const Eigen::Vector3d& position, const Eigen::Vector3d& target,
                                double focal_px, double cx, double cy) {
  const Eigen::Vector3d forward = (target - position).normalized();
  Eigen::Vector3d up_world(0.0, 0.0, 1.0);
  Eigen::Vector3d right = forward.cross(up_world);
  if (right.norm() < 1e-9) {
    up_world = Eigen::Vector3d(0.0, 1.0, 0.0);
    right = forward.cross(up_world);
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right).normalized();

  Eigen::Matrix3d rot;
  rot.row(0) = right.transpose();
  rot.row(1) = down.transpose();
  rot.row(2) = forward.transpose();

  Eigen::Matrix3d intr = Eigen::Matrix3d::Zero();
  intr(0, 0) = focal_px;
  intr(1, 1) = focal_px;
  intr(0, 2) = cx;
  intr(1, 2) = cy;
  intr(2, 2) = 1.0;

  Mat34 ext;
  ext.leftCols<3>() = rot;
  ext.col(3) = -rot * position;
  return CameraProjection::make(intr * ext);
}

// One device's outcome on one frame.
struct DeviceFrame {
  std::uint8_t positive = 0;
  std::uint8_t admitted = 0;
  std::uint8_t offloaded = 0;
  std::uint8_t messaged = 0;
  std::uint8_t correct = 0;
  double admit_confidence = 0.0;
};

struct FrameStats {
  std::vector<DeviceFrame> devices;
  double mpjpe = 0.0;
  bool has_estimate = false;
  double delay_s = 0.0;
};

struct Tally {
  long n_pos = 0, n_neg = 0;
  long correct_pos = 0, correct_neg = 0;
  long unc_pos = 0, unc_neg = 0;
  long msg_pos = 0, msg_neg = 0;
};

double balanced_rate(long hit_pos, long n_pos, long hit_neg, long n_neg) {
  if (n_pos == 0 && n_neg == 0) return 0.0;
  if (n_pos == 0) return static_cast<double>(hit_neg) / static_cast<double>(n_neg);
  if (n_neg == 0) return static_cast<double>(hit_pos) / static_cast<double>(n_pos);
  return 0.5 * (static_cast<double>(hit_pos) / static_cast<double>(n_pos) +
                static_cast<double>(hit_neg) / static_cast<double>(n_neg));
}

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

int fanout_width() {
  const char* env = std::getenv("EDGEPOSE_THREADS");
  int requested = 0;
  if (env != nullptr && *env != '\0') {
    requested = std::atoi(env);
    if (requested < 0) requested = 0;
  }
  if (requested == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    requested = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return std::max(1, std::min(requested, 64));
}

std::vector<CameraProjection> generate_rig(int n_devices, double room_x_m, double room_y_m,
                                           double room_z_m) {
  if (n_devices < 2) {
    throw std::invalid_argument("generate_rig: need at least two cameras");
  }
  if (n_devices > 8) {
    throw std::invalid_argument("generate_rig: at most 8 mounting positions");
  }
  const double x = room_x_m, y = room_y_m, z = room_z_m;
  // Opposite corners first so small rigs keep the widest baseline.
  const Eigen::Vector3d spots[8] = {
      {0.0, 0.0, z},     {x, y, z},         {x, 0.0, z},       {0.0, y, z},
      {x / 2.0, 0.0, z}, {x, y / 2.0, z},   {x / 2.0, y, z},   {0.0, y / 2.0, z},
  };
  const Eigen::Vector3d center(x / 2.0, y / 2.0, z / 2.0);
  // Full-HD intrinsics with a 90-degree horizontal field of view.
  const double focal = 960.0, cx = 960.0, cy = 540.0;
  std::vector<CameraProjection> rig;
  rig.reserve(n_devices);
  for (int i = 0; i < n_devices; ++i) {
    rig.push_back(look_at_camera(spots[i], center, focal, cx, cy));
  }
  return rig;
}

std::vector<FrameTruth> generate_frames(std::mt19937_64& rng, int n_frames, int joints,
                                        double room_x_m, double room_y_m, double room_z_m,
                                        double occlusion_prob, int n_devices) {
  if (n_frames < 1) {
    throw std::invalid_argument("generate_frames: n_frames must be >= 1");
  }
  const std::uint64_t base = rng();
  std::vector<FrameTruth> frames(n_frames);
  for (int f = 0; f < n_frames; ++f) {
    auto fr = make_engine(base, static_cast<std::uint64_t>(f));
    frames[f] = [&]() {
      FrameTruth truth;
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double margin = std::min(1.0, std::min(room_x_m, room_y_m) / 4.0);
      const double rx = margin + unit(fr) * (room_x_m - 2.0 * margin);
      const double ry = margin + unit(fr) * (room_y_m - 2.0 * margin);
      const double rz = std::min(0.9, room_z_m / 2.0);
      const double yaw = unit(fr) * 2.0 * M_PI;
      const double cy = std::cos(yaw), sy = std::sin(yaw);
      std::vector<Eigen::Vector3d> js;
      js.reserve(joints);
      for (int j = 0; j < joints; ++j) {
        Eigen::Vector3d o = template_offset(j);
        // +-20% articulation jitter per coordinate.
        for (int c = 0; c < 3; ++c) o(c) *= 0.8 + 0.4 * unit(fr);
        const Eigen::Vector3d rot(cy * o.x() - sy * o.y(), sy * o.x() + cy * o.y(), o.z());
        Eigen::Vector3d p(rx + rot.x(), ry + rot.y(), rz + rot.z());
        p.z() = std::clamp(p.z(), 0.02, room_z_m - 0.02);
        p.x() = std::clamp(p.x(), 0.02, room_x_m - 0.02);
        p.y() = std::clamp(p.y(), 0.02, room_y_m - 0.02);
        js.push_back(p);
      }
      truth.pose = Pose3D::all_valid(std::move(js));
      truth.positive.resize(n_devices);
      for (int i = 0; i < n_devices; ++i) {
        truth.positive[i] = unit(fr) >= occlusion_prob ? 1 : 0;
      }
      return truth;
    }();
  }
  return frames;
}

namespace {

FrameStats run_frame(const Scenario& scenario, const ThresholdSet& thresholds,
                     const std::vector<CameraProjection>& rig, const RadioParams& radio,
                     const TimeAllocation& tau, const FrameTruth& truth,
                     std::mt19937_64& rng) {
  const int n = scenario.n_devices;
  const int joints = scenario.joints;
  FrameStats stats;
  stats.devices.resize(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Per-device decisions plus the admitted observations for every joint.
  std::vector<std::vector<Observation2D>> obs_per_joint(joints);
  std::vector<double> alpha_ind(n, 0.0), beta_ind(n, 0.0);
  for (int i = 0; i < n; ++i) {
    DeviceFrame& df = stats.devices[i];
    df.positive = truth.positive[i];
    const auto& quad = scenario.quad(i);
    const auto& th = thresholds.per_device[i];
    const double c_dev =
        (df.positive ? quad.dev_pos : quad.dev_neg).sample(rng);
    if (c_dev > th.high) {
      df.admitted = 1;
      df.messaged = 1;
      df.admit_confidence = c_dev;
    } else if (c_dev > th.low) {
      df.offloaded = 1;
      const double c_srv = (df.positive ? quad.srv_pos : quad.srv_neg).sample(rng);
      if (c_srv > th.server) {
        df.admitted = 1;
        df.admit_confidence = c_srv;
      }
    }
    df.correct = df.positive ? df.admitted : !df.admitted;
    alpha_ind[i] = df.offloaded ? 1.0 : 0.0;
    beta_ind[i] = df.messaged ? 1.0 : 0.0;

    if (df.admitted) {
      const double sigma =
          scenario.noise_sigma_min_px + scenario.noise_sigma0_px * (1.0 - df.admit_confidence);
      if (df.positive) {
        for (int j = 0; j < joints; ++j) {
          const auto [u, v] = project(rig[i], truth.pose.joints[j]);
          obs_per_joint[j].push_back(
              {u + sigma * gauss(rng), v + sigma * gauss(rng), i, df.admit_confidence});
        }
      } else {
        // Spurious detection: a skeleton hallucinated at a random room point.
        const Eigen::Vector3d ghost(unit(rng) * scenario.room_x_m,
                                    unit(rng) * scenario.room_y_m,
                                    unit(rng) * scenario.room_z_m);
        for (int j = 0; j < joints; ++j) {
          const auto [u, v] = project(rig[i], ghost);
          obs_per_joint[j].push_back(
              {u + sigma * gauss(rng), v + sigma * gauss(rng), i, df.admit_confidence});
        }
      }
    }
  }

  int admitted_views = 0;
  for (const auto& df : stats.devices) admitted_views += df.admitted;

  if (admitted_views >= 2) {
    Pose3D estimate;
    estimate.joints.assign(joints, Eigen::Vector3d::Zero());
    estimate.valid.assign(joints, 0);
    for (int j = 0; j < joints; ++j) {
      try {
        estimate.joints[j] = triangulate(obs_per_joint[j], rig);
        estimate.valid[j] = 1;
      } catch (const std::exception&) {
        // Degenerate joint: leave it masked out.
      }
    }
    const auto err = mpjpe(estimate, truth.pose);
    if (err.has_value()) {
      stats.mpjpe = *err;
      stats.has_estimate = true;
    }
  }

  stats.delay_s = delay_cooperative(scenario.traffic, scenario.compute, radio, alpha_ind,
                                    beta_ind, tau)
                      .total;
  return stats;
}

}  // namespace

SimResult simulate(const Scenario& scenario, const ThresholdSet& thresholds,
                   const TimeAllocation& tau, int n_frames) {
  return simulate(scenario, thresholds, tau, n_frames, scenario.seed);
}

SimResult simulate(const Scenario& scenario, const ThresholdSet& thresholds,
                   const TimeAllocation& tau, int n_frames, std::uint64_t seed) {
  if (scenario.n_devices < 2) {
    throw std::invalid_argument("simulate: need at least two devices for triangulation");
  }
  thresholds.validate();
  if (thresholds.per_device.size() != static_cast<std::size_t>(scenario.n_devices)) {
    throw std::invalid_argument("simulate: thresholds size mismatch");
  }
  tau.validate();
  const auto rig =
      generate_rig(scenario.n_devices, scenario.room_x_m, scenario.room_y_m, scenario.room_z_m);
  const RadioParams radio = scenario.radio();

  auto frame_rng = make_engine(seed, 0x46524ddULL);
  const auto frames = generate_frames(frame_rng, n_frames, scenario.joints, scenario.room_x_m,
                                      scenario.room_y_m, scenario.room_z_m,
                                      scenario.occlusion_prob, scenario.n_devices);

  std::vector<FrameStats> stats(n_frames);
  const std::uint64_t pipeline_seed = mix_seed(seed, 0x50495045ULL);
  auto worker = [&](int lo, int hi) {
    for (int f = lo; f < hi; ++f) {
      auto rng = make_engine(pipeline_seed, static_cast<std::uint64_t>(f));
      stats[f] = run_frame(scenario, thresholds, rig, radio, tau, frames[f], rng);
    }
  };

  const int width = std::min(fanout_width(), n_frames);
  if (width <= 1) {
    worker(0, n_frames);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(width);
    const int chunk = (n_frames + width - 1) / width;
    for (int w = 0; w < width; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(n_frames, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  // Deterministic sequential reduction.
  const int n = scenario.n_devices;
  std::vector<Tally> tally(n);
  KahanSum mpjpe_sum, delay_sum;
  long estimates = 0;
  for (const auto& fs : stats) {
    for (int i = 0; i < n; ++i) {
      const auto& df = fs.devices[i];
      auto& t = tally[i];
      if (df.positive) {
        ++t.n_pos;
        t.correct_pos += df.correct;
        t.unc_pos += df.offloaded;
        t.msg_pos += df.messaged;
      } else {
        ++t.n_neg;
        t.correct_neg += df.correct;
        t.unc_neg += df.offloaded;
        t.msg_neg += df.messaged;
      }
    }
    if (fs.has_estimate) {
      mpjpe_sum.add(fs.mpjpe);
      ++estimates;
    }
    delay_sum.add(fs.delay_s);
  }

  SimResult result;
  result.frames = n_frames;
  result.accuracy_per_device.resize(n);
  result.alpha_hat.resize(n);
  result.beta_hat.resize(n);
  double acc_total = 0.0;
  double analytic = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& t = tally[i];
    result.accuracy_per_device[i] =
        balanced_rate(t.correct_pos, t.n_pos, t.correct_neg, t.n_neg);
    result.alpha_hat[i] = balanced_rate(t.unc_pos, t.n_pos, t.unc_neg, t.n_neg);
    result.beta_hat[i] = balanced_rate(t.msg_pos, t.n_pos, t.msg_neg, t.n_neg);
    acc_total += result.accuracy_per_device[i];
    const auto& th = thresholds.per_device[i];
    analytic += accuracy_cooperative(device_outcomes(scenario.quad(i), th.low, th.high),
                                     server_outcomes(scenario.quad(i), th.server));
  }
  result.accuracy_mean = acc_total / static_cast<double>(n);
  result.analytic_sum_accuracy = analytic;
  result.mpjpe_defined = estimates > 0;
  result.mpjpe_m = estimates > 0 ? mpjpe_sum.sum / static_cast<double>(estimates) : 0.0;
  result.mean_delay_s = delay_sum.sum / static_cast<double>(n_frames);
  result.drop_rate =
      static_cast<double>(n_frames - estimates) / static_cast<double>(n_frames);
  return result;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::nullopt;

  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return v[a] < v[b];
    });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average tied ranks
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };

  const auto rx = ranks(x);
  const auto ry = ranks(y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;  // degenerate ranks
  return sxy / std::sqrt(sxx * syy);
}

LemmaResult validate_lemma1(const Scenario& scenario,
                            const std::vector<ThresholdSet>& threshold_sweep, int n_frames) {
  LemmaResult result;
  result.rows.reserve(threshold_sweep.size());
  TimeAllocation tau;
  tau.tau.assign(scenario.n_devices, 1.0 / static_cast<double>(scenario.n_devices));
  for (const auto& set : threshold_sweep) {
    const SimResult sim = simulate(scenario, set, tau, n_frames);
    LemmaSweepRow row;
    row.thresholds = set;
    row.sum_accuracy = sim.analytic_sum_accuracy;
    row.mpjpe_m = sim.mpjpe_m;
    row.mpjpe_defined = sim.mpjpe_defined;
    result.rows.push_back(std::move(row));
  }
  std::vector<double> acc, neg_mpjpe;
  for (const auto& row : result.rows) {
    if (row.mpjpe_defined) {
      acc.push_back(row.sum_accuracy);
      neg_mpjpe.push_back(-row.mpjpe_m);
    }
  }
  result.spearman_rho = spearman(acc, neg_mpjpe);
  return result;
}

std::vector<ThresholdSet> default_lemma_sweep(int n_devices) {
  std::vector<ThresholdSet> sweep;
  sweep.reserve(25);
  // Lax device-only filtering: false positives dominate at the left end.
  for (double t : {0.02, 0.06, 0.12, 0.20, 0.30, 0.40, 0.50, 0.60}) {
    sweep.push_back(ThresholdSet::uniform(n_devices, t, t, 0.5));
  }
  // Single-threshold offloading.
  for (double h : {0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85}) {
    sweep.push_back(ThresholdSet::uniform(n_devices, 0.0, h, 0.5));
  }
  // Widening cooperative bands around the center.
  for (int k = 1; k <= 9; ++k) {
    const double w = 0.05 * static_cast<double>(k);
    sweep.push_back(ThresholdSet::uniform(n_devices, 0.5 - w, 0.5 + w, 0.5));
  }
  return sweep;
}

const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kDReq: return "d_req";
    case SweepAxis::kNDevices: return "n_devices";
    case SweepAxis::kGainDb: return "gain_db";
    case SweepAxis::kImageBytes: return "image_bytes";
    case SweepAxis::kTInfDevice: return "t_inf_device";
  }
  return "?";
}

std::vector<SweepRow> sweep(const Scenario& scenario, SweepAxis axis,
                            const std::vector<double>& values,
                            const std::vector<Strategy>& strategies,
                            const OptimizerConfig& config, bool with_simulation, int n_frames) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size() * strategies.size());
  for (double v : values) {
    Scenario point = scenario;
    switch (axis) {
      case SweepAxis::kDReq:
        point.d_req_s = v;
        break;
      case SweepAxis::kNDevices:
        point.n_devices = static_cast<int>(v);
        point.gains_db.clear();
        break;
      case SweepAxis::kGainDb:
        point.gain_mean_db = v;
        point.gains_db.clear();
        break;
      case SweepAxis::kImageBytes:
        point.traffic.image_bits = static_cast<std::int64_t>(v) * 8;
        break;
      case SweepAxis::kTInfDevice:
        point.compute.t_inf_device_s = v;
        break;
    }
    point.finalize();
    for (Strategy s : strategies) {
      const Solution sol = optimize_strategy(point, s, config);
      SweepRow row;
      row.axis_value = v;
      row.strategy = s;
      row.sum_accuracy = sol.sum_accuracy;
      row.delay_s = sol.mean_delay_s;
      row.feasible = sol.feasible;
      if (with_simulation && point.n_devices >= 2) {
        const SimResult sim = simulate(point, sol.thresholds, sol.tau, n_frames);
        if (sim.mpjpe_defined) row.mpjpe_m = sim.mpjpe_m;
        row.drop_rate = sim.drop_rate;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace edgepose
