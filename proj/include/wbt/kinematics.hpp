#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wbt/motion.hpp"
#include "wbt/rotations.hpp"
#include "wbt/util.hpp"

namespace wbt {

using KeypointFrame = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// ---------------------------------------------------------------------------
// Parametric human skeleton (keypoints only, no mesh). Rest offsets are an
// affine function of the 10 shape coefficients:
//   offset_i(beta) = offset0_i * (1 + (B * beta)_i)
// beta[0] overall scale, beta[1] leg length, beta[2] arm length,
// beta[3] shoulder width, beta[4] hip width; beta[5..9] reserved (zero effect).
// ---------------------------------------------------------------------------

struct HumanSkeleton {
  std::array<int, kHumanJoints> parent{};
  Eigen::Matrix<double, kHumanJoints, 3> offset0;
  Eigen::Matrix<double, kHumanJoints, kShapeDim> shape_basis;
  std::array<std::string, kHumanJoints> joint_name;

  Eigen::Matrix<double, kHumanJoints, 3> rest_offsets(const ShapeParams& shape) const {
    Eigen::Matrix<double, kHumanJoints, 1> scale =
        Eigen::Matrix<double, kHumanJoints, 1>::Ones() + shape_basis * shape.beta;
    Eigen::Matrix<double, kHumanJoints, 3> out = offset0;
    for (int i = 0; i < kHumanJoints; ++i) {
      out.row(i) *= scale[i];
      if (i > 0 && out.row(i).norm() <= 0.01)
        throw ValidationError("shape makes bone '" + joint_name[i] + "' shorter than 1 cm");
    }
    return out;
  }
};

inline HumanSkeleton default_human_skeleton() {
  HumanSkeleton s;
  // SMPL joint order; rest pose stands with arms hanging down.
  const std::array<std::string, kHumanJoints> names = {
      "pelvis",   "l_hip",    "r_hip",    "spine1", "l_knee",     "r_knee",
      "spine2",   "l_ankle",  "r_ankle",  "spine3", "l_foot",     "r_foot",
      "neck",     "l_collar", "r_collar", "head",   "l_shoulder", "r_shoulder",
      "l_elbow",  "r_elbow",  "l_wrist",  "r_wrist", "l_hand",    "r_hand"};
  s.joint_name = names;
  s.parent = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};
  s.offset0.setZero();
  auto set = [&](int i, double x, double y, double z) { s.offset0.row(i) << x, y, z; };
  set(1, 0, 0.085, -0.08);
  set(2, 0, -0.085, -0.08);
  set(3, 0, 0, 0.115);
  set(4, 0, 0, -0.39);
  set(5, 0, 0, -0.39);
  set(6, 0, 0, 0.125);
  set(7, 0, 0, -0.41);
  set(8, 0, 0, -0.41);
  set(9, 0, 0, 0.13);
  set(10, 0.13, 0, -0.07);
  set(11, 0.13, 0, -0.07);
  set(12, 0, 0, 0.12);
  set(13, 0, 0.075, 0.045);
  set(14, 0, -0.075, 0.045);
  set(15, 0, 0, 0.13);
  set(16, 0, 0.105, 0.02);
  set(17, 0, -0.105, 0.02);
  set(18, 0, 0, -0.275);
  set(19, 0, 0, -0.275);
  set(20, 0, 0, -0.25);
  set(21, 0, 0, -0.25);
  set(22, 0, 0, -0.085);
  set(23, 0, 0, -0.085);

  s.shape_basis.setZero();
  for (int i = 1; i < kHumanJoints; ++i) s.shape_basis(i, 0) = 1.0;  // global scale
  for (int i : {4, 5, 7, 8, 10, 11}) s.shape_basis(i, 1) = 1.0;      // leg length
  for (int i : {18, 19, 20, 21, 22, 23}) s.shape_basis(i, 2) = 1.0;  // arm length
  for (int i : {13, 14, 16, 17}) s.shape_basis(i, 3) = 1.0;          // shoulder width
  for (int i : {1, 2}) s.shape_basis(i, 4) = 1.0;                    // hip width
  return s;
}

// World joint positions by composing rigid transforms down the tree.
inline KeypointFrame human_fk(const HumanSkeleton& skel, const ShapeParams& shape,
                              const MotionFrame& frame) {
  const auto offsets = skel.rest_offsets(shape);
  KeypointFrame pos(kHumanJoints, 3);
  std::array<Mat3, kHumanJoints> rot;
  rot[0] = frame.root_rot.toRotationMatrix();
  pos.row(0) = frame.root_pos.transpose();
  for (int i = 1; i < kHumanJoints; ++i) {
    const int p = skel.parent[i];
    const Vec3 world_off = rot[p] * offsets.row(i).transpose();
    pos.row(i) = pos.row(p) + world_off.transpose();
    rot[i] = rot[p] * quat_exp(frame.joint_rot.row(i - 1).transpose()).toRotationMatrix();
  }
  return pos;
}

// ---------------------------------------------------------------------------
// Humanoid model: 19 actuated revolute joints on a floating base.
// Link i (i >= 1) is the child of joint i-1; joint axes are expressed in the
// child frame, which coincides with the parent orientation at q = 0.
// ---------------------------------------------------------------------------

inline constexpr int kNumDof = 19;

struct JointSpec {
  std::string name;
  int parent_link = 0;
  Vec3 offset = Vec3::Zero();  // joint origin in the parent link frame
  Vec3 axis = Vec3::UnitZ();
  double lo = -1.0, hi = 1.0;       // rad
  double torque_limit = 100.0;      // N*m
  double kp = 100.0, kd = 5.0;      // N*m/rad, N*m*s/rad
};

struct LinkSpec {
  std::string name;
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  Vec3 inertia = Vec3::Constant(0.01);  // principal, about com
  double capsule_radius = 0.05, capsule_length = 0.1;
};

struct FramePoint {
  std::string name;
  int link = 0;
  Vec3 offset = Vec3::Zero();
};

struct ContactPoint {
  int link = 0;
  Vec3 offset = Vec3::Zero();
  int foot = -1;      // 0 = left, 1 = right, -1 = auxiliary point
  double ref_mass = 2.0;  // effective mass for the implicit contact damper
};

using DofVec = Eigen::Matrix<double, kNumDof, 1>;

struct HumanoidModel {
  std::vector<LinkSpec> links;    // links[0] = floating base
  std::vector<JointSpec> joints;  // joints[j] drives links[j + 1]
  std::vector<FramePoint> keypoint12;
  std::vector<int> keypoint8;     // indices into keypoint12
  std::vector<FramePoint> bodies; // body set used by observations/rewards/metrics
  std::vector<ContactPoint> contacts;
  DofVec default_pose = DofVec::Zero();
  double default_root_height = 1.0;
  double friction = 1.0;
  int left_foot_link = -1, right_foot_link = -1;

  int body_count() const { return static_cast<int>(bodies.size()); }

  double total_mass() const {
    double m = 0;
    for (const auto& l : links) m += l.mass;
    return m;
  }

  int link_index(const std::string& name) const {
    for (std::size_t i = 0; i < links.size(); ++i)
      if (links[i].name == name) return static_cast<int>(i);
    throw ValidationError("humanoid model: unknown link '" + name + "'");
  }

  int joint_index(const std::string& name) const {
    for (std::size_t i = 0; i < joints.size(); ++i)
      if (joints[i].name == name) return static_cast<int>(i);
    throw ValidationError("humanoid model: unknown joint '" + name + "'");
  }

  DofVec clamp_to_limits(const DofVec& q) const {
    DofVec out = q;
    for (int j = 0; j < kNumDof; ++j)
      out[j] = std::clamp(out[j], joints[j].lo, joints[j].hi);
    return out;
  }

  void validate() const {
    if (joints.size() != kNumDof)
      throw ValidationError("humanoid model: expected 19 joints, got " +
                            std::to_string(joints.size()));
    if (links.size() != joints.size() + 1)
      throw ValidationError("humanoid model: link count must be joint count + 1");
    for (std::size_t j = 0; j < joints.size(); ++j) {
      const auto& js = joints[j];
      if (js.parent_link < 0 || js.parent_link > static_cast<int>(j))
        throw ValidationError("humanoid model: joint '" + js.name + "' breaks topological order");
      if (!(js.lo < js.hi))
        throw ValidationError("humanoid model: joint '" + js.name + "' has lo >= hi");
      if (!(js.torque_limit > 0))
        throw ValidationError("humanoid model: joint '" + js.name + "' torque_limit <= 0");
      if (std::abs(js.axis.norm() - 1.0) > 1e-9)
        throw ValidationError("humanoid model: joint '" + js.name + "' axis not unit");
    }
    for (const auto& l : links)
      if (!(l.mass > 0)) throw ValidationError("humanoid model: link '" + l.name + "' mass <= 0");
    for (int k8 : keypoint8)
      if (k8 < 0 || k8 >= static_cast<int>(keypoint12.size()))
        throw ValidationError("humanoid model: keypoint8 index out of range");
    if (keypoint12.size() != 12) throw ValidationError("humanoid model: keypoint12 must have 12 rows");
    if (keypoint8.size() != 8) throw ValidationError("humanoid model: keypoint8 must have 8 rows");
    if (left_foot_link < 0 || right_foot_link < 0)
      throw ValidationError("humanoid model: foot links unset");
  }
};

struct RootPose {
  Vec3 pos = Vec3::Zero();
  Quat rot = Quat::Identity();
};

struct BodyPose {
  Mat3 rot = Mat3::Identity();
  Vec3 pos = Vec3::Zero();
};

struct HumanoidFk {
  std::vector<BodyPose> link_pose;
  Eigen::Matrix<double, 12, 3> keypoint12;
  Eigen::Matrix<double, 8, 3> keypoint8;
};

inline Vec3 frame_point_world(const std::vector<BodyPose>& link_pose, const FramePoint& fp) {
  return link_pose[fp.link].pos + link_pose[fp.link].rot * fp.offset;
}

inline HumanoidFk humanoid_fk(const HumanoidModel& model, const RootPose& root, const DofVec& q) {
  HumanoidFk out;
  out.link_pose.resize(model.links.size());
  out.link_pose[0] = {root.rot.toRotationMatrix(), root.pos};
  for (std::size_t j = 0; j < model.joints.size(); ++j) {
    const auto& js = model.joints[j];
    const auto& pp = out.link_pose[js.parent_link];
    BodyPose bp;
    bp.pos = pp.pos + pp.rot * js.offset;
    bp.rot = pp.rot * Eigen::AngleAxisd(q[static_cast<int>(j)], js.axis).toRotationMatrix();
    out.link_pose[j + 1] = bp;
  }
  for (int k = 0; k < 12; ++k)
    out.keypoint12.row(k) = frame_point_world(out.link_pose, model.keypoint12[k]).transpose();
  for (int k = 0; k < 8; ++k) out.keypoint8.row(k) = out.keypoint12.row(model.keypoint8[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Correspondence between the 12 humanoid keypoints and human joints:
// left/right shoulders, elbows, wrists, hips, knees, ankles.
// ---------------------------------------------------------------------------

struct Correspondence {
  std::array<int, 12> human_joint;  // per keypoint12 row
  std::array<std::string, 12> humanoid_name;
};

inline Correspondence correspondence() {
  Correspondence c;
  c.humanoid_name = {"l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_hand", "r_hand",
                     "l_hip",      "r_hip",      "l_knee",  "r_knee",  "l_ankle", "r_ankle"};
  c.human_joint = {16, 17, 18, 19, 20, 21, 1, 2, 4, 5, 7, 8};
  return c;
}

// ---------------------------------------------------------------------------
// Default humanoid: H1-like proportions, ~1.8 m, ~47 kg, 19 DoF
// (5 per leg, 1 torso, 4 per arm). Values are plausible stand-ins.
// ---------------------------------------------------------------------------

inline HumanoidModel default_humanoid_model() {
  HumanoidModel m;
  auto link = [&](const std::string& name, double mass, Vec3 com, Vec3 inertia, double cr,
                  double cl) {
    LinkSpec l;
    l.name = name;
    l.mass = mass;
    l.com = com;
    l.inertia = inertia;
    l.capsule_radius = cr;
    l.capsule_length = cl;
    m.links.push_back(l);
    return static_cast<int>(m.links.size()) - 1;
  };
  auto joint = [&](const std::string& name, int parent, Vec3 off, Vec3 axis, double lo, double hi,
                   double tl, double kp, double kd) {
    JointSpec j;
    j.name = name;
    j.parent_link = parent;
    j.offset = off;
    j.axis = axis;
    j.lo = lo;
    j.hi = hi;
    j.torque_limit = tl;
    j.kp = kp;
    j.kd = kd;
    m.joints.push_back(j);
  };

  const int pelvis = link("pelvis", 4.8, {0, 0, 0.02}, {0.045, 0.04, 0.035}, 0.125, 0.2);

  for (int side = 0; side < 2; ++side) {
    const std::string p = side == 0 ? "l_" : "r_";
    const double sy = side == 0 ? 1.0 : -1.0;
    // Mirrored limits for roll/yaw joints so behavior is left/right symmetric.
    auto mlo = [&](double lo, double hi) { return side == 0 ? lo : -hi; };
    auto mhi = [&](double lo, double hi) { return side == 0 ? hi : -lo; };

    joint(p + "hip_yaw", pelvis, {0, sy * 0.13, -0.12}, Vec3::UnitZ(), mlo(-0.60, 0.60),
          mhi(-0.60, 0.60), 200, 200, 5);
    const int hip_yaw = link(p + "hip_yaw_link", 1.8, {0, 0, 0}, {0.02, 0.02, 0.02}, 0.05, 0.08);
    joint(p + "hip_roll", hip_yaw, {0, 0, 0}, Vec3::UnitX(), mlo(-0.43, 0.43), mhi(-0.43, 0.43),
          200, 200, 5);
    const int hip_roll = link(p + "hip_roll_link", 1.8, {0, 0, 0}, {0.02, 0.02, 0.02}, 0.05, 0.08);
    joint(p + "hip_pitch", hip_roll, {0, 0, 0}, Vec3::UnitY(), -1.75, 0.90, 200, 200, 5);
    const int thigh = link(p + "thigh", 4.0, {0, 0, -0.18}, {0.09, 0.09, 0.02}, 0.065, 0.40);
    joint(p + "knee", thigh, {0, 0, -0.40}, Vec3::UnitY(), -0.06, 2.10, 300, 300, 6);
    const int shank = link(p + "shank", 2.0, {0, 0, -0.18}, {0.05, 0.05, 0.008}, 0.05, 0.40);
    joint(p + "ankle", shank, {0, 0, -0.40}, Vec3::UnitY(), -0.90, 0.60, 60, 40, 4);
    // Foot inertia sized so the contact-driven pitch mode stays inside the
    // 200 Hz integrator stability region.
    const int foot = link(p + "foot", 1.0, {0.0, 0, -0.04}, {0.028, 0.035, 0.028}, 0.03, 0.18);
    if (side == 0)
      m.left_foot_link = foot;
    else
      m.right_foot_link = foot;
    for (double cx : {-0.08, 0.08})
      for (double cy : {-0.045, 0.045})
        m.contacts.push_back({foot, {cx, cy, -0.07}, side, 2.0});
    m.contacts.push_back({shank, {0, 0, 0.02}, -1, 1.0});  // knee guard
  }

  joint("torso", pelvis, {0, 0, 0.12}, Vec3::UnitZ(), -2.35, 2.35, 200, 300, 6);
  const int torso = link("torso", 13.5, {0, 0, 0.25}, {0.50, 0.42, 0.20}, 0.14, 0.50);
  m.contacts.push_back({pelvis, {0, 0, -0.15}, -1, 4.0});
  m.contacts.push_back({torso, {0, 0, 0.45}, -1, 4.0});

  for (int side = 0; side < 2; ++side) {
    const std::string p = side == 0 ? "l_" : "r_";
    const double sy = side == 0 ? 1.0 : -1.0;
    auto mlo = [&](double lo, double hi) { return side == 0 ? lo : -hi; };
    auto mhi = [&](double lo, double hi) { return side == 0 ? hi : -lo; };

    joint(p + "shoulder_pitch", torso, {0, sy * 0.22, 0.40}, Vec3::UnitY(), -2.85, 0.80, 40, 100, 2);
    const int sp = link(p + "shoulder_pitch_link", 1.0, {0, 0, 0}, {0.01, 0.01, 0.01}, 0.045,
                        0.06);
    joint(p + "shoulder_roll", sp, {0, 0, 0}, Vec3::UnitX(), mlo(-0.30, 3.10), mhi(-0.30, 3.10), 40,
          100, 2);
    const int sr = link(p + "shoulder_roll_link", 1.0, {0, 0, 0}, {0.01, 0.01, 0.01}, 0.045,
                        0.06);
    joint(p + "shoulder_yaw", sr, {0, 0, 0}, Vec3::UnitZ(), mlo(-2.60, 2.60), mhi(-2.60, 2.60), 18,
          40, 1);
    const int ua = link(p + "upper_arm", 1.6, {0, 0, -0.13}, {0.014, 0.014, 0.010}, 0.045, 0.26);
    joint(p + "elbow", ua, {0, 0, -0.28}, Vec3::UnitY(), -2.50, 0.30, 18, 100, 2);
    const int fa = link(p + "forearm", 1.0, {0, 0, -0.12}, {0.007, 0.007, 0.0012}, 0.04, 0.24);
    m.contacts.push_back({fa, {0, 0, -0.26}, -1, 0.3});  // hand guard

    m.keypoint12.push_back({p + "shoulder", sp, {0, 0, 0}});
    m.keypoint12.push_back({p + "elbow", fa, {0, 0, 0}});
    m.keypoint12.push_back({p + "hand", fa, {0, 0, -0.26}});
    m.bodies.push_back({p + "upper_arm", ua, {0, 0, 0}});
    m.bodies.push_back({p + "forearm", fa, {0, 0, 0}});
    m.bodies.push_back({p + "hand", fa, {0, 0, -0.26}});
  }

  // Assemble keypoint12 in the canonical order.
  std::vector<FramePoint> kp = m.keypoint12;
  auto find_kp = [&](const std::string& n) {
    for (const auto& f : kp)
      if (f.name == n) return f;
    throw ValidationError("missing keypoint " + n);
  };
  m.keypoint12.clear();
  for (const std::string n : {"l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_hand", "r_hand"})
    m.keypoint12.push_back(find_kp(n));
  m.keypoint12.push_back({"l_hip", m.link_index("l_hip_yaw_link"), {0, 0, 0}});
  m.keypoint12.push_back({"r_hip", m.link_index("r_hip_yaw_link"), {0, 0, 0}});
  m.keypoint12.push_back({"l_knee", m.link_index("l_shank"), {0, 0, 0}});
  m.keypoint12.push_back({"r_knee", m.link_index("r_shank"), {0, 0, 0}});
  m.keypoint12.push_back({"l_ankle", m.link_index("l_foot"), {0, 0, 0}});
  m.keypoint12.push_back({"r_ankle", m.link_index("r_foot"), {0, 0, 0}});
  m.keypoint8 = {0, 1, 2, 3, 4, 5, 10, 11};

  // Body set: pelvis, torso, legs, arms (hands are fixed frames on forearms).
  std::vector<FramePoint> arm_bodies = m.bodies;
  m.bodies.clear();
  m.bodies.push_back({"pelvis", pelvis, {0, 0, 0}});
  m.bodies.push_back({"torso", torso, {0, 0, 0}});
  for (const std::string p : {"l_", "r_"}) {
    m.bodies.push_back({p + "thigh", m.link_index(p + "thigh"), {0, 0, 0}});
    m.bodies.push_back({p + "shank", m.link_index(p + "shank"), {0, 0, 0}});
    m.bodies.push_back({p + "foot", m.link_index(p + "foot"), {0, 0, 0}});
  }
  for (const auto& b : arm_bodies) m.bodies.push_back(b);

  // Slightly bent knees avoid the straight-leg singularity when standing.
  m.default_pose.setZero();
  for (const std::string p : {"l_", "r_"}) {
    m.default_pose[m.joint_index(p + "hip_pitch")] = -0.14;
    m.default_pose[m.joint_index(p + "knee")] = 0.25;
    m.default_pose[m.joint_index(p + "ankle")] = -0.11;
  }
  m.default_root_height = 0.12 + 0.40 * std::cos(0.14) + 0.40 * std::cos(0.11) + 0.07;
  m.friction = 1.0;
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Humanoid model config file (versioned schema "wbt-humanoid" v1).
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json humanoid_to_json(const HumanoidModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "wbt-humanoid";
  j["version"] = 1;
  auto vec3 = [](const Vec3& v) { return std::vector<double>{v.x(), v.y(), v.z()}; };
  for (const auto& l : m.links) {
    nlohmann::ordered_json jl;
    jl["name"] = l.name;
    jl["mass"] = l.mass;
    jl["com"] = vec3(l.com);
    jl["inertia"] = vec3(l.inertia);
    jl["capsule"] = {l.capsule_radius, l.capsule_length};
    j["links"].push_back(jl);
  }
  for (const auto& js : m.joints) {
    nlohmann::ordered_json jj;
    jj["name"] = js.name;
    jj["parent_link"] = js.parent_link;
    jj["offset"] = vec3(js.offset);
    jj["axis"] = vec3(js.axis);
    jj["limits"] = {js.lo, js.hi};
    jj["torque_limit"] = js.torque_limit;
    jj["kp"] = js.kp;
    jj["kd"] = js.kd;
    j["joints"].push_back(jj);
  }
  auto fp_json = [&](const FramePoint& f) {
    nlohmann::ordered_json jf;
    jf["name"] = f.name;
    jf["link"] = f.link;
    jf["offset"] = vec3(f.offset);
    return jf;
  };
  for (const auto& f : m.keypoint12) j["keypoint12"].push_back(fp_json(f));
  j["keypoint8"] = m.keypoint8;
  for (const auto& f : m.bodies) j["bodies"].push_back(fp_json(f));
  for (const auto& c : m.contacts) {
    nlohmann::ordered_json jc;
    jc["link"] = c.link;
    jc["offset"] = vec3(c.offset);
    jc["foot"] = c.foot;
    jc["ref_mass"] = c.ref_mass;
    j["contacts"].push_back(jc);
  }
  std::vector<double> dp(m.default_pose.data(), m.default_pose.data() + kNumDof);
  j["default_pose"] = dp;
  j["default_root_height"] = m.default_root_height;
  j["friction"] = m.friction;
  j["left_foot_link"] = m.left_foot_link;
  j["right_foot_link"] = m.right_foot_link;
  return j;
}

inline HumanoidModel humanoid_from_json(const nlohmann::json& j, const std::string& context) {
  try {
    if (j.at("format").get<std::string>() != "wbt-humanoid")
      throw FormatError(context + ": not a wbt-humanoid file");
    if (j.at("version").get<int>() != 1)
      throw FormatError(context + ": unsupported humanoid schema version");
    HumanoidModel m;
    auto vec3 = [](const nlohmann::json& a) {
      return Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
    };
    for (const auto& jl : j.at("links")) {
      LinkSpec l;
      l.name = jl.at("name").get<std::string>();
      l.mass = jl.at("mass").get<double>();
      l.com = vec3(jl.at("com"));
      l.inertia = vec3(jl.at("inertia"));
      l.capsule_radius = jl.at("capsule").at(0).get<double>();
      l.capsule_length = jl.at("capsule").at(1).get<double>();
      m.links.push_back(l);
    }
    for (const auto& jj : j.at("joints")) {
      JointSpec js;
      js.name = jj.at("name").get<std::string>();
      js.parent_link = jj.at("parent_link").get<int>();
      js.offset = vec3(jj.at("offset"));
      js.axis = vec3(jj.at("axis"));
      js.lo = jj.at("limits").at(0).get<double>();
      js.hi = jj.at("limits").at(1).get<double>();
      js.torque_limit = jj.at("torque_limit").get<double>();
      js.kp = jj.at("kp").get<double>();
      js.kd = jj.at("kd").get<double>();
      m.joints.push_back(js);
    }
    auto fp = [&](const nlohmann::json& jf) {
      FramePoint f;
      f.name = jf.at("name").get<std::string>();
      f.link = jf.at("link").get<int>();
      f.offset = vec3(jf.at("offset"));
      return f;
    };
    for (const auto& jf : j.at("keypoint12")) m.keypoint12.push_back(fp(jf));
    m.keypoint8 = j.at("keypoint8").get<std::vector<int>>();
    for (const auto& jf : j.at("bodies")) m.bodies.push_back(fp(jf));
    for (const auto& jc : j.at("contacts")) {
      ContactPoint c;
      c.link = jc.at("link").get<int>();
      c.offset = vec3(jc.at("offset"));
      c.foot = jc.at("foot").get<int>();
      c.ref_mass = jc.at("ref_mass").get<double>();
      m.contacts.push_back(c);
    }
    auto dp = j.at("default_pose").get<std::vector<double>>();
    if (dp.size() != kNumDof) throw FormatError(context + ": default_pose must have 19 entries");
    for (int i = 0; i < kNumDof; ++i) m.default_pose[i] = dp[i];
    m.default_root_height = j.at("default_root_height").get<double>();
    m.friction = j.at("friction").get<double>();
    m.left_foot_link = j.at("left_foot_link").get<int>();
    m.right_foot_link = j.at("right_foot_link").get<int>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(context + ": " + e.what());
  }
}

inline HumanoidModel load_humanoid_model(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return humanoid_from_json(j, path.string());
}

inline void save_humanoid_model(const HumanoidModel& m, const std::filesystem::path& path) {
  write_file(path, humanoid_to_json(m).dump(1) + "\n");
}

}  // namespace wbt
