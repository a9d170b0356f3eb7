#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "wbt/kinematics.hpp"
#include "wbt/rng.hpp"

using namespace wbt;

namespace {

MotionFrame random_human_frame(Rng& rng, double angle_scale = 0.7) {
  MotionFrame f;
  f.root_pos = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 1.5));
  f.root_rot = quat_exp(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
  for (int j = 0; j < kHumanNonRoot; ++j)
    f.joint_rot.row(j) = (angle_scale * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                             rng.uniform(-1, 1))).transpose();
  return f;
}

DofVec random_q(const HumanoidModel& m, Rng& rng) {
  DofVec q;
  for (int j = 0; j < kNumDof; ++j) q[j] = rng.uniform(m.joints[j].lo, m.joints[j].hi);
  return q;
}

}  // namespace

TEST_CASE("human rest pose equals cumulative offsets") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  MotionFrame frame;  // zero pose, zero root
  frame.root_pos.setZero();
  const auto pos = human_fk(skel, shape, frame);

  const auto off = skel.rest_offsets(shape);
  Eigen::Matrix<double, kHumanJoints, 3> expect;
  expect.row(0).setZero();
  for (int i = 1; i < kHumanJoints; ++i) expect.row(i) = expect.row(skel.parent[i]) + off.row(i);
  REQUIRE((pos - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("human fk root translation equivariance") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  MotionFrame frame;
  const auto base = human_fk(skel, shape, frame);
  frame.root_pos = Vec3(1, 2, 3);
  const auto moved = human_fk(skel, shape, frame);
  for (int i = 0; i < kHumanJoints; ++i)
    REQUIRE((moved.row(i) - base.row(i) - Eigen::RowVector3d(1, 2, 3)).norm() < 1e-12);
}

TEST_CASE("left shoulder rotation matches hand-built two-link chain") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  MotionFrame frame;
  // 90 degrees about +x at the left shoulder.
  frame.joint_rot.row(kLShoulder - 1) << -M_PI / 2, 0, 0;
  const auto pos = human_fk(skel, shape, frame);

  const auto rest = human_fk(skel, shape, MotionFrame{});
  const Vec3 shoulder = rest.row(kLShoulder).transpose();
  const Mat3 r = Eigen::AngleAxisd(-M_PI / 2, Vec3::UnitX()).toRotationMatrix();
  const Vec3 elbow_expect = shoulder + r * Vec3(0, 0, -0.275);
  const Vec3 wrist_expect = elbow_expect + r * Vec3(0, 0, -0.25);
  REQUIRE((pos.row(18).transpose() - elbow_expect).norm() < 1e-12);
  REQUIRE((pos.row(20).transpose() - wrist_expect).norm() < 1e-12);
}

TEST_CASE("human fk rigid-transform equivariance") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_human_frame(rng);
    const Quat g_rot = quat_exp(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
    const Vec3 g_pos(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));

    const auto base = human_fk(skel, shape, f);
    MotionFrame g_f = f;
    g_f.root_pos = g_rot * f.root_pos + g_pos;
    g_f.root_rot = (g_rot * f.root_rot).normalized();
    const auto moved = human_fk(skel, shape, g_f);
    for (int i = 0; i < kHumanJoints; ++i) {
      const Vec3 expect = g_rot * base.row(i).transpose() + g_pos;
      REQUIRE((moved.row(i).transpose() - expect).norm() < 1e-9);
    }
  }
}

TEST_CASE("human bone lengths are pose invariant") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  shape.beta << 0.1, -0.05, 0.02, 0.08, -0.04, 0, 0, 0, 0, 0;
  const auto off = skel.rest_offsets(shape);
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pos = human_fk(skel, shape, random_human_frame(rng));
    for (int i = 1; i < kHumanJoints; ++i) {
      const double len = (pos.row(i) - pos.row(skel.parent[i])).norm();
      REQUIRE_THAT(len, Catch::Matchers::WithinAbs(off.row(i).norm(), 1e-9));
    }
  }
}

TEST_CASE("human bilateral symmetry") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  // Left/right joint index pairs in SMPL order.
  const std::vector<std::pair<int, int>> pairs = {{1, 2},   {4, 5},   {7, 8},   {10, 11},
                                                  {13, 14}, {16, 17}, {18, 19}, {20, 21},
                                                  {22, 23}};
  auto mirror_index = [&](int i) {
    for (auto [l, r] : pairs) {
      if (i == l) return r;
      if (i == r) return l;
    }
    return i;
  };
  auto mirror_aa = [](const Vec3& w) { return Vec3(-w.x(), w.y(), -w.z()); };

  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_human_frame(rng);
    f.root_pos.y() = 0;
    f.root_rot = Quat::Identity();

    MotionFrame g;
    g.root_pos = f.root_pos;
    for (int j = 1; j < kHumanJoints; ++j)
      g.joint_rot.row(mirror_index(j) - 1) = mirror_aa(f.joint_rot.row(j - 1)).transpose();

    const auto pf = human_fk(skel, shape, f);
    const auto pg = human_fk(skel, shape, g);
    for (int i = 0; i < kHumanJoints; ++i) {
      const Vec3 expect(pf(i, 0), -pf(i, 1), pf(i, 2));
      REQUIRE((pg.row(mirror_index(i)).transpose() - expect).norm() < 1e-9);
    }
  }
}

TEST_CASE("shape validation rejects degenerate bones") {
  const auto skel = default_human_skeleton();
  ShapeParams shape;
  shape.beta[0] = -0.999;  // global scale ~ 0
  REQUIRE_THROWS_AS(skel.rest_offsets(shape), ValidationError);
}

TEST_CASE("humanoid rest stance") {
  const auto model = default_humanoid_model();
  REQUIRE(model.joints.size() == 19);
  REQUIRE(model.links.size() == 20);
  REQUIRE(model.bodies.size() == 14);
  REQUIRE_THAT(model.total_mass(), Catch::Matchers::WithinAbs(47.0, 3.0));

  RootPose root;
  root.pos = Vec3(0, 0, 0.99);
  const auto fk = humanoid_fk(model, root, DofVec::Zero());

  // Documented foot gap: ankles at y = +-0.13, soles on the ground.
  const Vec3 la = fk.keypoint12.row(10).transpose();
  const Vec3 ra = fk.keypoint12.row(11).transpose();
  REQUIRE_THAT(la.y(), Catch::Matchers::WithinAbs(0.13, 1e-9));
  REQUIRE_THAT(ra.y(), Catch::Matchers::WithinAbs(-0.13, 1e-9));
  REQUIRE_THAT(la.z(), Catch::Matchers::WithinAbs(0.07, 1e-9));  // sole at 0.0
  REQUIRE_THAT((la - ra).norm(), Catch::Matchers::WithinAbs(0.26, 1e-9));
}

TEST_CASE("humanoid yaw rotation mirrors keypoints through the root") {
  const auto model = default_humanoid_model();
  Rng rng(5);
  RootPose root;
  root.pos = Vec3(0.3, -0.2, 1.0);
  const auto q = random_q(model, rng);
  const auto base = humanoid_fk(model, root, q);

  RootPose yawed = root;
  yawed.rot = Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitZ()));
  const auto turned = humanoid_fk(model, yawed, q);
  for (int k = 0; k < 12; ++k) {
    const Vec3 rel = base.keypoint12.row(k).transpose() - root.pos;
    const Vec3 expect = root.pos + Vec3(-rel.x(), -rel.y(), rel.z());
    REQUIRE((turned.keypoint12.row(k).transpose() - expect).norm() < 1e-9);
  }
}

TEST_CASE("knee bend ankle height from two-link geometry") {
  const auto model = default_humanoid_model();
  RootPose root;  // root at origin
  DofVec q = DofVec::Zero();
  q[model.joint_index("l_knee")] = M_PI / 2;
  const auto fk = humanoid_fk(model, root, q);
  // Hip center at (0, 0.13, -0.12); thigh straight down 0.40; shank rotated
  // 90 degrees about +y points along -x.
  const Vec3 ankle_expect(-0.40, 0.13, -0.52);
  REQUIRE((fk.keypoint12.row(10).transpose() - ankle_expect).norm() < 1e-12);
}

TEST_CASE("humanoid fk rigid-transform equivariance and keypoint8 subset") {
  const auto model = default_humanoid_model();
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    RootPose root;
    root.pos = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 1.5));
    root.rot = quat_exp(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
    const auto q = random_q(model, rng);
    const auto base = humanoid_fk(model, root, q);

    const Quat g_rot = quat_exp(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)));
    const Vec3 g_pos(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    RootPose g_root;
    g_root.pos = g_rot * root.pos + g_pos;
    g_root.rot = (g_rot * root.rot).normalized();
    const auto moved = humanoid_fk(model, g_root, q);
    for (int k = 0; k < 12; ++k) {
      const Vec3 expect = g_rot * base.keypoint12.row(k).transpose() + g_pos;
      REQUIRE((moved.keypoint12.row(k).transpose() - expect).norm() < 1e-9);
    }
    for (int k = 0; k < 8; ++k)
      REQUIRE(moved.keypoint8.row(k) == moved.keypoint12.row(model.keypoint8[k]));
  }
}

TEST_CASE("humanoid bone lengths pose invariant") {
  const auto model = default_humanoid_model();
  Rng rng(13);
  RootPose root;
  const auto fk0 = humanoid_fk(model, root, DofVec::Zero());
  std::vector<double> rest_len;
  for (std::size_t j = 0; j < model.joints.size(); ++j) {
    const auto& js = model.joints[j];
    rest_len.push_back((fk0.link_pose[j + 1].pos - fk0.link_pose[js.parent_link].pos).norm());
  }
  for (int trial = 0; trial < 10; ++trial) {
    const auto fk = humanoid_fk(model, root, random_q(model, rng));
    for (std::size_t j = 0; j < model.joints.size(); ++j) {
      const auto& js = model.joints[j];
      const double len =
          (fk.link_pose[j + 1].pos - fk.link_pose[js.parent_link].pos).norm();
      REQUIRE_THAT(len, Catch::Matchers::WithinAbs(rest_len[j], 1e-9));
    }
  }
}

TEST_CASE("correspondence table") {
  const auto c = correspondence();
  const auto model = default_humanoid_model();
  REQUIRE(c.human_joint.size() == 12);

  // Left/right symmetry under mirror relabeling of names.
  for (int k = 0; k < 12; ++k) {
    std::string name = c.humanoid_name[k];
    REQUIRE((name.rfind("l_", 0) == 0 || name.rfind("r_", 0) == 0));
    std::string other = (name[0] == 'l' ? "r" : "l") + name.substr(1);
    bool found = false;
    for (int k2 = 0; k2 < 12; ++k2) found = found || c.humanoid_name[k2] == other;
    REQUIRE(found);
    REQUIRE(model.keypoint12[k].name == name);
  }

  // Every keypoint8 entry appears in the table.
  for (int k8 : model.keypoint8) {
    bool found = false;
    for (int k = 0; k < 12; ++k) found = found || (k == k8);
    REQUIRE(found);
  }
}

TEST_CASE("humanoid model config round trip") {
  const auto model = default_humanoid_model();
  const auto path = std::filesystem::temp_directory_path() / "wbt_model.json";
  save_humanoid_model(model, path);
  const auto back = load_humanoid_model(path);
  REQUIRE(humanoid_to_json(back) == humanoid_to_json(model));

  // The committed config matches the built-in default.
  const auto committed = std::filesystem::path(WBT_SOURCE_DIR) / "configs" / "humanoid_default.json";
  REQUIRE(std::filesystem::exists(committed));
  REQUIRE(humanoid_to_json(load_humanoid_model(committed)) == humanoid_to_json(model));
}

TEST_CASE("humanoid model validation") {
  auto model = default_humanoid_model();
  model.joints[3].lo = model.joints[3].hi + 1;
  REQUIRE_THROWS_AS(model.validate(), ValidationError);

  auto model2 = default_humanoid_model();
  model2.joints[0].torque_limit = 0;
  REQUIRE_THROWS_AS(model2.validate(), ValidationError);
}
