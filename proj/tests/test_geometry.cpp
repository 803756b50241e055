#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "edgepose/geometry.hpp"
#include "edgepose/rng.hpp"
#include "edgepose/sim.hpp"

using namespace edgepose;

namespace {

CameraProjection canonical_camera() {
  Mat34 p;
  p << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
  return CameraProjection::make(p);
}

CameraProjection shifted_camera(double tx) {
  // Canonical camera translated along x.
  Mat34 p;
  p << 1, 0, 0, -tx, 0, 1, 0, 0, 0, 0, 1, 0;
  return CameraProjection::make(p);
}

}  // namespace

TEST_CASE("projection through the canonical camera") {
  const auto cam = canonical_camera();
  const auto [u0, v0] = project(cam, {0.0, 0.0, 5.0});
  CHECK(u0 == doctest::Approx(0.0));
  CHECK(v0 == doctest::Approx(0.0));
  const auto [u1, v1] = project(cam, {1.0, 2.0, 2.0});
  CHECK(u1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(v1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(project(cam, {1.0, 1.0, 0.0}));
}

TEST_CASE("projection is homogeneous-scale invariant") {
  const auto cam = canonical_camera();
  for (double lambda : {0.5, -3.0, 1e4}) {
    const auto scaled = CameraProjection::make(Mat34(lambda * cam.p));
    const Eigen::Vector3d pt(0.3, -0.7, 4.0);
    const auto [u, v] = project(cam, pt);
    const auto [us, vs] = project(scaled, pt);
    CHECK(us == doctest::Approx(u).epsilon(1e-12));
    CHECK(vs == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("constraint matrix shape and structure") {
  const std::vector<CameraProjection> cams{canonical_camera(), shifted_camera(1.0)};
  const std::vector<Observation2D> obs{{0.25, 0.5, 0, 1.0}, {0.1, 0.5, 1, 1.0}};
  const auto a = build_dlt_matrix(obs, cams);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 4);

  // u = 0 cancels the third-row contribution in the first row.
  const std::vector<Observation2D> zero_u{{0.0, 0.5, 0, 1.0}, {0.1, 0.5, 1, 1.0}};
  const auto a0 = build_dlt_matrix(zero_u, cams);
  CHECK((a0.row(0) + cams[0].p.row(0)).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(build_dlt_matrix(std::vector<Observation2D>{obs[0]}, cams),
                  std::invalid_argument);
  const std::vector<Observation2D> dup{{0.1, 0.1, 0, 1.0}, {0.2, 0.2, 0, 1.0}};
  CHECK_THROWS_AS(build_dlt_matrix(dup, cams), std::invalid_argument);
}

TEST_CASE("exact projections annihilate the constraint matrix") {
  const std::vector<CameraProjection> cams{canonical_camera(), shifted_camera(1.5)};
  const Eigen::Vector3d pt(0.4, -0.2, 3.0);
  std::vector<Observation2D> obs;
  for (int i = 0; i < 2; ++i) {
    const auto [u, v] = project(cams[i], pt);
    obs.push_back({u, v, i, 1.0});
  }
  const auto a = build_dlt_matrix(obs, cams);
  const Eigen::Vector4d x_h(pt.x(), pt.y(), pt.z(), 1.0);
  CHECK((a * x_h).norm() < 1e-10);
}

TEST_CASE("triangulation recovers the generating point") {
  const std::vector<CameraProjection> cams{canonical_camera(), shifted_camera(2.0)};
  const Eigen::Vector3d pt(1.0, 2.0, 1.5);
  std::vector<Observation2D> obs;
  for (int i = 0; i < 2; ++i) {
    const auto [u, v] = project(cams[i], pt);
    obs.push_back({u, v, i, 1.0});
  }
  const Eigen::Vector3d rec = triangulate(obs, cams);
  CHECK((rec - pt).norm() < 1e-9);

  // Observation order is irrelevant.
  std::vector<Observation2D> rev{obs[1], obs[0]};
  CHECK((triangulate(rev, cams) - rec).norm() < 1e-9);
}

TEST_CASE("room-scale rig recovers points to micrometers") {
  const auto rig = generate_rig(8, 10.0, 10.0, 3.0);
  auto rng = make_engine(31337, 0);
  std::uniform_real_distribution<double> ux(0.5, 9.5), uz(0.2, 2.8);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d pt(ux(rng), ux(rng), uz(rng));
    std::vector<Observation2D> obs;
    for (int i = 0; i < 8; ++i) {
      const auto [u, v] = project(rig[i], pt);
      obs.push_back({u, v, i, 1.0});
    }
    CHECK((triangulate(obs, rig) - pt).norm() < 1e-6);
  }
}

TEST_CASE("degenerate geometry and points at infinity are reported") {
  // Two cameras at the same pose cannot pin a point down.
  const std::vector<CameraProjection> same{canonical_camera(), canonical_camera()};
  const std::vector<Observation2D> obs{{0.1, 0.2, 0, 1.0}, {0.1, 0.2, 1, 1.0}};
  CHECK_THROWS_AS(triangulate(obs, same), std::runtime_error);
}

TEST_CASE("mpjpe basics and the summation oracle") {
  std::vector<Eigen::Vector3d> truth_joints(17, Eigen::Vector3d::Zero());
  const Pose3D truth = Pose3D::all_valid(truth_joints);
  CHECK(*mpjpe(truth, truth) == 0.0);

  std::vector<Eigen::Vector3d> shifted(17, Eigen::Vector3d(0.0, 0.0, 1.0));
  CHECK(*mpjpe(Pose3D::all_valid(shifted), truth) == doctest::Approx(1.0).epsilon(1e-15));

  auto rng = make_engine(17, 0);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  std::vector<Eigen::Vector3d> a, b;
  for (int j = 0; j < 17; ++j) {
    a.emplace_back(unit(rng), unit(rng), unit(rng));
    b.emplace_back(unit(rng), unit(rng), unit(rng));
  }
  const Pose3D pa = Pose3D::all_valid(a), pb = Pose3D::all_valid(b);
  double oracle = 0.0;
  for (int j = 0; j < 17; ++j) oracle += (a[j] - b[j]).norm();
  oracle /= 17.0;
  CHECK(std::fabs(*mpjpe(pa, pb) - oracle) < 1e-12);
}

TEST_CASE("mpjpe masks and the undefined marker") {
  std::vector<Eigen::Vector3d> joints(3, Eigen::Vector3d::Zero());
  Pose3D truth = Pose3D::all_valid(joints);
  Pose3D est = Pose3D::all_valid(
      {Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(0, 0, 4), Eigen::Vector3d(0, 0, 9)});
  est.valid = {1, 1, 0};  // last joint failed to triangulate
  CHECK(*mpjpe(est, truth) == doctest::Approx(3.0).epsilon(1e-15));

  est.valid = {0, 0, 0};
  CHECK(!mpjpe(est, truth).has_value());

  Pose3D wrong_count = Pose3D::all_valid({Eigen::Vector3d::Zero()});
  CHECK_THROWS_AS(mpjpe(wrong_count, truth), std::invalid_argument);
}

TEST_CASE("projective consistency over random rigs and points") {
  auto rng = make_engine(555, 0);
  std::uniform_real_distribution<double> room(2.0, 12.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double x = room(rng), y = room(rng), z = 2.0 + unit(rng) * 2.0;
    const int n = 2 + static_cast<int>(unit(rng) * 6.99);
    const auto rig = generate_rig(n, x, y, z);
    const Eigen::Vector3d pt(0.3 * x + 0.4 * x * unit(rng), 0.3 * y + 0.4 * y * unit(rng),
                             0.3 * z + 0.4 * z * unit(rng));
    std::vector<Observation2D> obs;
    for (int i = 0; i < n; ++i) {
      const auto [u, v] = project(rig[i], pt);
      obs.push_back({u, v, i, 1.0});
    }
    CHECK((triangulate(obs, rig) - pt).norm() < 1e-9 * std::max(1.0, pt.norm()));
  }
}

TEST_CASE("camera scale invariance carries through triangulation") {
  const auto rig = generate_rig(4, 10.0, 10.0, 3.0);
  std::vector<CameraProjection> scaled;
  for (std::size_t i = 0; i < rig.size(); ++i) {
    scaled.push_back(CameraProjection::make(Mat34(rig[i].p * (i % 2 ? 7.5 : 0.03))));
  }
  const Eigen::Vector3d pt(3.0, 6.0, 1.0);
  std::vector<Observation2D> obs;
  for (int i = 0; i < 4; ++i) {
    const auto [u, v] = project(scaled[i], pt);
    obs.push_back({u, v, i, 1.0});
  }
  CHECK((triangulate(obs, scaled) - pt).norm() < 1e-9);
}

TEST_CASE("average error grows with pixel noise") {
  const auto rig = generate_rig(8, 10.0, 10.0, 3.0);
  auto rng = make_engine(909, 0);
  std::uniform_real_distribution<double> ux(1.0, 9.0), uz(0.3, 2.7);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int frames = 1000;
  std::vector<double> mean_err;
  // One base noise realization scaled by sigma keeps the ordering strict.
  std::vector<Eigen::Vector3d> points;
  std::vector<std::vector<std::pair<double, double>>> base_noise(frames);
  std::vector<std::vector<std::pair<double, double>>> base_uv(frames);
  for (int f = 0; f < frames; ++f) {
    const Eigen::Vector3d pt(ux(rng), ux(rng), uz(rng));
    points.push_back(pt);
    for (int i = 0; i < 8; ++i) {
      const auto [u, v] = project(rig[i], pt);
      base_uv[f].push_back({u, v});
      base_noise[f].push_back({gauss(rng), gauss(rng)});
    }
  }
  for (double sigma : {0.0, 1.0, 2.0, 4.0}) {
    double total = 0.0;
    for (int f = 0; f < frames; ++f) {
      std::vector<Observation2D> obs;
      for (int i = 0; i < 8; ++i) {
        obs.push_back({base_uv[f][i].first + sigma * base_noise[f][i].first,
                       base_uv[f][i].second + sigma * base_noise[f][i].second, i, 1.0});
      }
      total += (triangulate(obs, rig) - points[f]).norm();
    }
    mean_err.push_back(total / frames);
  }
  CHECK(std::is_sorted(mean_err.begin(), mean_err.end()));
  CHECK(mean_err[0] < mean_err[1]);
  CHECK(mean_err[1] < mean_err[2]);
  CHECK(mean_err[2] < mean_err[3]);
}

TEST_CASE("rank-deficient projection matrices are rejected") {
  Mat34 p = Mat34::Zero();
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;  // rank 2
  CHECK_THROWS_AS(CameraProjection::make(p), std::invalid_argument);
}

TEST_CASE("camera rig file round trip and malformed inputs") {
  const auto rig = generate_rig(5, 10.0, 10.0, 3.0);
  const auto path =
      (std::filesystem::temp_directory_path() / "edgepose_rig.csv").string();
  save_camera_rig(path, rig);
  const auto loaded = load_camera_rig(path);
  REQUIRE(loaded.size() == rig.size());
  for (std::size_t i = 0; i < rig.size(); ++i) {
    CHECK((loaded[i].p - rig[i].p).norm() == 0.0);  // %.17g round trips doubles
  }

  const auto bad_hdr =
      (std::filesystem::temp_directory_path() / "edgepose_rig_bad1.csv").string();
  {
    std::ofstream f(bad_hdr);
    f << "cam,row\n0,0,1,0,0,0\n";
  }
  CHECK_THROWS_AS(load_camera_rig(bad_hdr), std::invalid_argument);

  const auto missing_row =
      (std::filesystem::temp_directory_path() / "edgepose_rig_bad2.csv").string();
  {
    std::ofstream f(missing_row);
    f << "camera,row,c0,c1,c2,c3\n0,0,1,0,0,0\n0,1,0,1,0,0\n";
  }
  CHECK_THROWS_AS(load_camera_rig(missing_row), std::invalid_argument);
}
