#include "edgepose/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace edgepose {

CameraProjection CameraProjection::make(const Mat34& p) {
  // Rank via the squared singular values: eigenvalues of p * p^T.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(p * p.transpose());
  const Eigen::Vector3d ev = eig.eigenvalues();  // ascending, non-negative
  if (!(ev(0) > 1e-24 * ev(2))) {
    throw std::invalid_argument("CameraProjection: matrix is rank deficient");
  }
  return CameraProjection{p};
}

Pose3D Pose3D::all_valid(std::vector<Eigen::Vector3d> joints) {
  Pose3D p;
  p.valid.assign(joints.size(), 1);
  p.joints = std::move(joints);
  return p;
}

std::pair<double, double> project(const CameraProjection& camera,
                                  const Eigen::Vector3d& point) {
  const Eigen::Vector4d x_h(point.x(), point.y(), point.z(), 1.0);
  const Eigen::Vector3d img = camera.p * x_h;
  if (std::fabs(img(2)) < 1e-12) {
    throw std::invalid_argument("project: point lies on the camera principal plane");
  }
  return {img(0) / img(2), img(1) / img(2)};
}

Eigen::MatrixXd build_dlt_matrix(std::span<const Observation2D> observations,
                                 std::span<const CameraProjection> cameras) {
  if (observations.size() < 2) {
    throw std::invalid_argument("build_dlt_matrix: need at least two views");
  }
  std::set<int> seen;
  for (const auto& obs : observations) {
    if (obs.camera_index < 0 || static_cast<std::size_t>(obs.camera_index) >= cameras.size()) {
      throw std::invalid_argument("build_dlt_matrix: camera index out of range");
    }
    if (!seen.insert(obs.camera_index).second) {
      throw std::invalid_argument("build_dlt_matrix: duplicate camera index");
    }
  }
  Eigen::MatrixXd a(2 * observations.size(), 4);
  for (std::size_t k = 0; k < observations.size(); ++k) {
    const auto& obs = observations[k];
    const Mat34& p = cameras[obs.camera_index].p;
    a.row(2 * k) = obs.u * p.row(2) - p.row(0);
    a.row(2 * k + 1) = obs.v * p.row(2) - p.row(1);
  }
  return a;
}

Eigen::Vector3d triangulate(std::span<const Observation2D> observations,
                            std::span<const CameraProjection> cameras) {
  const Eigen::MatrixXd a = build_dlt_matrix(observations, cameras);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // One vanishing singular value is the solution; a second means the views
  // cannot pin the point down.
  if (sv(0) > 0.0 && sv(2) < 1e-12 * sv(0)) {
    throw std::runtime_error("triangulate: degenerate view geometry");
  }
  const Eigen::Vector4d x_h = svd.matrixV().col(3);
  if (std::fabs(x_h(3)) < 1e-12) {
    throw std::runtime_error("triangulate: point at infinity");
  }
  return x_h.head<3>() / x_h(3);
}

std::vector<CameraProjection> load_camera_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_camera_rig: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.find("camera,row,c0,c1,c2,c3") == std::string::npos) {
    throw std::invalid_argument("load_camera_rig: missing header camera,row,c0,c1,c2,c3");
  }
  std::vector<Mat34> mats;
  std::vector<int> rows_seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double v[6];
    for (int k = 0; k < 6; ++k) {
      if (!std::getline(ss, field, ',')) {
        throw std::invalid_argument("load_camera_rig: line " + std::to_string(line_no) +
                                    " has fewer than 6 fields");
      }
      try {
        v[k] = std::stod(field);
      } catch (const std::exception&) {
        throw std::invalid_argument("load_camera_rig: bad number at line " +
                                    std::to_string(line_no));
      }
    }
    const int cam = static_cast<int>(v[0]);
    const int row = static_cast<int>(v[1]);
    if (cam < 0 || row < 0 || row > 2) {
      throw std::invalid_argument("load_camera_rig: bad camera/row index at line " +
                                  std::to_string(line_no));
    }
    if (cam >= static_cast<int>(mats.size())) {
      mats.resize(cam + 1, Mat34::Zero());
      rows_seen.resize(cam + 1, 0);
    }
    mats[cam].row(row) << v[2], v[3], v[4], v[5];
    rows_seen[cam] |= 1 << row;
  }
  std::vector<CameraProjection> rig;
  rig.reserve(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (rows_seen[i] != 0b111) {
      throw std::invalid_argument("load_camera_rig: camera " + std::to_string(i) +
                                  " is missing matrix rows");
    }
    rig.push_back(CameraProjection::make(mats[i]));
  }
  return rig;
}

void save_camera_rig(const std::string& path, std::span<const CameraProjection> rig) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("save_camera_rig: cannot write " + path);
  }
  out << "camera,row,c0,c1,c2,c3\n";
  char buf[160];
  for (std::size_t i = 0; i < rig.size(); ++i) {
    for (int r = 0; r < 3; ++r) {
      std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g,%.17g,%.17g,%.17g\n", i, r,
                    rig[i].p(r, 0), rig[i].p(r, 1), rig[i].p(r, 2), rig[i].p(r, 3));
      out << buf;
    }
  }
}

std::optional<double> mpjpe(const Pose3D& estimated, const Pose3D& truth) {
  if (estimated.joint_count() != truth.joint_count()) {
    throw std::invalid_argument("mpjpe: joint counts differ");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < truth.joint_count(); ++j) {
    if (estimated.valid[j] && truth.valid[j]) {
      sum += (estimated.joints[j] - truth.joints[j]).norm();
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace edgepose
