#ifndef EDGEPOSE_GEOMETRY_HPP
#define EDGEPOSE_GEOMETRY_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

namespace edgepose {

using Mat34 = Eigen::Matrix<double, 3, 4>;

// Finite projective camera, pixels on the image side, meters on the world
// side. Must have rank 3.
struct CameraProjection {
  Mat34 p;

  static CameraProjection make(const Mat34& p);  // validates rank
};

struct Observation2D {
  double u = 0.0;
  double v = 0.0;
  int camera_index = 0;
  double confidence = 1.0;
};

// 3D joint set with a per-joint validity mask.
struct Pose3D {
  std::vector<Eigen::Vector3d> joints;
  std::vector<std::uint8_t> valid;  // parallel to joints

  static Pose3D all_valid(std::vector<Eigen::Vector3d> joints);
  std::size_t joint_count() const { return joints.size(); }
};

// Pinhole projection; throws on points in the camera's principal plane.
std::pair<double, double> project(const CameraProjection& camera, const Eigen::Vector3d& point);

// Stacks the two homogeneous constraint rows per observation:
// u*p3 - p1 and v*p3 - p2. Requires >= 2 observations with distinct cameras.
Eigen::MatrixXd build_dlt_matrix(std::span<const Observation2D> observations,
                                 std::span<const CameraProjection> cameras);

// Least-squares point from >= 2 views: smallest right singular vector of the
// constraint matrix, dehomogenized. Throws on points at infinity or
// degenerate view geometry.
Eigen::Vector3d triangulate(std::span<const Observation2D> observations,
                            std::span<const CameraProjection> cameras);

// Mean per-joint Euclidean distance over joints valid in both poses.
// Empty intersection yields nullopt (frame cannot be scored).
std::optional<double> mpjpe(const Pose3D& estimated, const Pose3D& truth);

// Rig interchange format: CSV with header camera,row,c0,c1,c2,c3, one file
// row per matrix row, row-major, cameras numbered 0..n-1.
std::vector<CameraProjection> load_camera_rig(const std::string& path);
void save_camera_rig(const std::string& path, std::span<const CameraProjection> rig);

}  // namespace edgepose

#endif
