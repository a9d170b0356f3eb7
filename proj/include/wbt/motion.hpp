#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wbt/rng.hpp"
#include "wbt/rotations.hpp"
#include "wbt/util.hpp"

namespace wbt {

// 24-joint human skeleton in the usual SMPL joint ordering: pelvis root plus
// 23 children. Shape coefficients scale bone lengths (see kinematics.hpp).
inline constexpr int kHumanJoints = 24;
inline constexpr int kHumanNonRoot = 23;
inline constexpr int kShapeDim = 10;

struct ShapeParams {
  Eigen::Matrix<double, kShapeDim, 1> beta = Eigen::Matrix<double, kShapeDim, 1>::Zero();
};

struct MotionFrame {
  Vec3 root_pos = Vec3::Zero();
  Quat root_rot = Quat::Identity();
  // Axis-angle per non-root joint, canonical range |angle| <= pi.
  Eigen::Matrix<double, kHumanNonRoot, 3> joint_rot =
      Eigen::Matrix<double, kHumanNonRoot, 3>::Zero();
};

struct MotionSequence {
  double fps = 30.0;
  ShapeParams shape;
  std::string name;
  std::vector<std::string> tags;
  std::vector<MotionFrame> frames;

  double duration() const { return frames.size() / fps; }

  void validate() const {
    if (!(fps > 0)) throw ValidationError("motion '" + name + "': fps must be > 0");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      if (std::abs(f.root_rot.norm() - 1.0) > 1e-6)
        throw ValidationError("motion '" + name + "': frame " + std::to_string(i) +
                              " root quaternion norm " + std::to_string(f.root_rot.norm()));
      for (int j = 0; j < kHumanNonRoot; ++j) {
        if (f.joint_rot.row(j).norm() > std::numbers::pi + 1e-6)
          throw ValidationError("motion '" + name + "': frame " + std::to_string(i) +
                                " joint " + std::to_string(j + 1) + " axis-angle beyond pi");
      }
      if (!f.root_pos.allFinite() || !f.joint_rot.allFinite())
        throw ValidationError("motion '" + name + "': non-finite frame " + std::to_string(i));
    }
  }
};

inline bool operator==(const MotionFrame& a, const MotionFrame& b) {
  return a.root_pos == b.root_pos && a.root_rot.coeffs() == b.root_rot.coeffs() &&
         a.joint_rot == b.joint_rot;
}

inline bool operator==(const MotionSequence& a, const MotionSequence& b) {
  return a.fps == b.fps && a.shape.beta == b.shape.beta && a.name == b.name &&
         a.tags == b.tags && a.frames == b.frames;
}

// ---------------------------------------------------------------------------
// Motion file format (one JSON document per sequence):
//   format: "wbt-motion", version: 1, name, fps, tags,
//   shape: 10 floats, frames: [{root_pos[3], root_rot[4] wxyz, joint_rot[69]}]
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json motion_to_json(const MotionSequence& seq) {
  nlohmann::ordered_json j;
  j["format"] = "wbt-motion";
  j["version"] = 1;
  j["name"] = seq.name;
  j["fps"] = seq.fps;
  j["tags"] = seq.tags;
  std::vector<double> shape(seq.shape.beta.data(), seq.shape.beta.data() + kShapeDim);
  j["shape"] = shape;
  auto frames = nlohmann::ordered_json::array();
  for (const auto& f : seq.frames) {
    nlohmann::ordered_json jf;
    jf["root_pos"] = {f.root_pos.x(), f.root_pos.y(), f.root_pos.z()};
    jf["root_rot"] = {f.root_rot.w(), f.root_rot.x(), f.root_rot.y(), f.root_rot.z()};
    std::vector<double> jr;
    jr.reserve(kHumanNonRoot * 3);
    for (int r = 0; r < kHumanNonRoot; ++r)
      for (int c = 0; c < 3; ++c) jr.push_back(f.joint_rot(r, c));
    jf["joint_rot"] = jr;
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);
  return j;
}

inline MotionSequence motion_from_json(const nlohmann::json& j, const std::string& context) {
  try {
    if (j.at("format").get<std::string>() != "wbt-motion")
      throw FormatError(context + ": not a wbt-motion file");
    if (j.at("version").get<int>() != 1)
      throw FormatError(context + ": unsupported motion format version");
    MotionSequence seq;
    seq.name = j.at("name").get<std::string>();
    seq.fps = j.at("fps").get<double>();
    seq.tags = j.at("tags").get<std::vector<std::string>>();
    auto shape = j.at("shape").get<std::vector<double>>();
    if (shape.size() != kShapeDim)
      throw FormatError(context + ": shape must have 10 coefficients");
    for (int i = 0; i < kShapeDim; ++i) seq.shape.beta[i] = shape[i];
    for (std::size_t fi = 0; fi < j.at("frames").size(); ++fi) {
      const auto& jf = j.at("frames")[fi];
      MotionFrame f;
      auto rp = jf.at("root_pos").get<std::vector<double>>();
      auto rr = jf.at("root_rot").get<std::vector<double>>();
      auto jr = jf.at("joint_rot").get<std::vector<double>>();
      if (rp.size() != 3 || rr.size() != 4 || jr.size() != kHumanNonRoot * 3)
        throw FormatError(context + ": frame " + std::to_string(fi) + " has bad field sizes");
      f.root_pos = Vec3(rp[0], rp[1], rp[2]);
      f.root_rot = Quat(rr[0], rr[1], rr[2], rr[3]);
      for (int r = 0; r < kHumanNonRoot; ++r)
        for (int c = 0; c < 3; ++c) f.joint_rot(r, c) = jr[r * 3 + c];
      seq.frames.push_back(std::move(f));
    }
    seq.validate();
    return seq;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(context + ": " + e.what());
  }
}

inline MotionSequence load_motion(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return motion_from_json(j, path.string());
}

inline void save_motion(const MotionSequence& seq, const std::filesystem::path& path) {
  seq.validate();
  write_file(path, motion_to_json(seq).dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// Resampling. A sequence of n frames at fps covers the sampling period
// [0, n/fps); frame i sits at t = i/fps. Source positions past the last frame
// clamp to it, so both endpoints are preserved exactly.
// ---------------------------------------------------------------------------

inline MotionFrame interpolate_frames(const MotionFrame& a, const MotionFrame& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  MotionFrame out;
  out.root_pos = (1.0 - t) * a.root_pos + t * b.root_pos;
  out.root_rot = slerp(a.root_rot, b.root_rot, t).normalized();
  for (int r = 0; r < kHumanNonRoot; ++r) {
    const Quat qa = quat_exp(a.joint_rot.row(r).transpose());
    const Quat qb = quat_exp(b.joint_rot.row(r).transpose());
    out.joint_rot.row(r) = quat_log(slerp(qa, qb, t)).transpose();
  }
  return out;
}

inline MotionSequence resample(const MotionSequence& seq, double target_fps) {
  if (!(target_fps > 0)) throw ValidationError("resample: target_fps must be > 0");
  if (seq.frames.empty()) throw ValidationError("resample: empty sequence");
  const int n_old = static_cast<int>(seq.frames.size());
  const int n_new = std::max(1, static_cast<int>(std::lround(n_old * target_fps / seq.fps)));
  MotionSequence out;
  out.fps = target_fps;
  out.shape = seq.shape;
  out.name = seq.name;
  out.tags = seq.tags;
  out.frames.reserve(n_new);
  for (int i = 0; i < n_new; ++i) {
    // The last output frame pins to the last input frame so both endpoints
    // are preserved exactly at any rate ratio.
    const double s = (i == n_new - 1 && n_new > 1)
                         ? static_cast<double>(n_old - 1)
                         : std::min(static_cast<double>(i) / target_fps * seq.fps,
                                    static_cast<double>(n_old - 1));
    const int lo = static_cast<int>(std::floor(s));
    if (static_cast<double>(lo) == s) {
      out.frames.push_back(seq.frames[lo]);
    } else {
      out.frames.push_back(interpolate_frames(seq.frames[lo], seq.frames[lo + 1], s - lo));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference velocities: central in the interior, one-sided at ends.
// Angular rates come from quaternion log differences (world frame for root).
// ---------------------------------------------------------------------------

struct MotionVelocities {
  std::vector<Vec3> root_lin;                                  // m/s
  std::vector<Vec3> root_ang;                                  // rad/s, world frame
  std::vector<Eigen::Matrix<double, kHumanNonRoot, 3>> joint_rate;  // rad/s
};

inline Vec3 ang_vel_between(const Quat& a, const Quat& b, double dt) {
  return quat_log(b * a.conjugate()) / dt;
}

inline MotionVelocities finite_diff_velocities(const MotionSequence& seq) {
  const int n = static_cast<int>(seq.frames.size());
  if (n < 2) throw ValidationError("finite_diff_velocities: need at least 2 frames");
  MotionVelocities v;
  v.root_lin.resize(n);
  v.root_ang.resize(n);
  v.joint_rate.resize(n);
  const double dt = 1.0 / seq.fps;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 1);
    const int hi = std::min(n - 1, i + 1);
    const double span = (hi - lo) * dt;
    const auto& fa = seq.frames[lo];
    const auto& fb = seq.frames[hi];
    v.root_lin[i] = (fb.root_pos - fa.root_pos) / span;
    v.root_ang[i] = ang_vel_between(fa.root_rot, fb.root_rot, span);
    for (int r = 0; r < kHumanNonRoot; ++r) {
      const Quat qa = quat_exp(fa.joint_rot.row(r).transpose());
      const Quat qb = quat_exp(fb.joint_rot.row(r).transpose());
      v.joint_rate[i].row(r) = (quat_log(qb * qa.conjugate()) / span).transpose();
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Synthetic motion generator. Stand-in source for the retargeting pipeline;
// deterministic in (kind, duration, fps, seed).
//
// Feasibility contracts:
//   feasible kinds stay within human joint ranges;
//   infeasible_teleport: some consecutive frames with |d root_pos| >= 1 m;
//   infeasible_underground: root height drops below 0;
//   infeasible_superhuman_speed: joint speeds exceed 40 rad/s.
// ---------------------------------------------------------------------------

// SMPL joint indices used by the generator.
inline constexpr int kLHip = 1, kRHip = 2, kLKnee = 4, kRKnee = 5, kLAnkle = 7, kRAnkle = 8;
inline constexpr int kLShoulder = 16, kRShoulder = 17, kLElbow = 18, kRElbow = 19;

inline constexpr double kHumanRestPelvisHeight = 0.95;

namespace detail {

inline void set_aa(MotionFrame& f, int joint, const Vec3& aa) {
  f.joint_rot.row(joint - 1) = aa.transpose();
}

// Symmetric crouch for near-equal thigh/shank lengths: hip -a, knee +2a,
// ankle -a keeps the foot roughly flat and under the hip.
inline void crouch_legs(MotionFrame& f, double a) {
  for (int side = 0; side < 2; ++side) {
    set_aa(f, side == 0 ? kLHip : kRHip, Vec3(0, -a, 0));
    set_aa(f, side == 0 ? kLKnee : kRKnee, Vec3(0, 2 * a, 0));
    set_aa(f, side == 0 ? kLAnkle : kRAnkle, Vec3(0, -a, 0));
  }
}

inline double smooth_bump(double phase01) {
  if (phase01 < 0 || phase01 > 1) return 0.0;
  const double s = std::sin(std::numbers::pi * phase01);
  return s * s;
}

}  // namespace detail

inline const std::vector<std::string>& synth_kinds() {
  static const std::vector<std::string> kinds = {
      "stand",  "wave", "squat", "step_in_place", "walk", "kick",
      "infeasible_teleport", "infeasible_underground", "infeasible_superhuman_speed"};
  return kinds;
}

inline MotionSequence synth_motion(const std::string& kind, double duration_s, double fps,
                                   std::uint64_t seed) {
  bool known = false;
  for (const auto& k : synth_kinds()) known = known || (k == kind);
  if (!known) throw ValidationError("synth_motion: unknown kind '" + kind + "'");

  Rng rng(0x5eedull ^ seed * 0x9e3779b97f4a7c15ull);
  const int n = std::max(1, static_cast<int>(std::lround(duration_s * fps)));
  MotionSequence seq;
  seq.fps = fps;
  seq.name = kind + "_" + std::to_string(seed);
  seq.tags = {"synthetic", kind};

  const double z0 = kHumanRestPelvisHeight;
  const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double amp_jit = rng.uniform(0.9, 1.1);

  for (int i = 0; i < n; ++i) {
    const double t = i / fps;
    MotionFrame f;
    f.root_pos = Vec3(0, 0, z0);

    if (kind == "stand") {
      // rest pose
    } else if (kind == "wave") {
      // Right arm raised sideways, forearm waving.
      detail::set_aa(f, kRShoulder, Vec3(-1.9, 0, 0));
      detail::set_aa(f, kRElbow, Vec3(-0.45 * amp_jit * std::sin(2 * std::numbers::pi * 1.0 * t + phase0),
                                      0.25, 0));
      detail::set_aa(f, kLShoulder, Vec3(0.12, 0, 0));
    } else if (kind == "squat") {
      const double drop = 0.12 * amp_jit * 0.5 *
                          (1.0 - std::cos(2 * std::numbers::pi * 0.4 * t));
      const double a = std::acos(std::max(0.2, 1.0 - drop / 0.80));
      detail::crouch_legs(f, a);
      f.root_pos.z() = z0 - 0.80 * (1.0 - std::cos(a));
      detail::set_aa(f, kLShoulder, Vec3(0.2 * a, 0, 0));
      detail::set_aa(f, kRShoulder, Vec3(-0.2 * a, 0, 0));
    } else if (kind == "step_in_place") {
      const double period = 1.2;
      const double ph = std::fmod(t, period) / period;  // [0,1)
      const double lift_l = detail::smooth_bump(ph * 2.0);        // first half
      const double lift_r = detail::smooth_bump(ph * 2.0 - 1.0);  // second half
      detail::set_aa(f, kLHip, Vec3(0, -0.5 * lift_l, 0));
      detail::set_aa(f, kLKnee, Vec3(0, 0.9 * lift_l, 0));
      detail::set_aa(f, kRHip, Vec3(0, -0.5 * lift_r, 0));
      detail::set_aa(f, kRKnee, Vec3(0, 0.9 * lift_r, 0));
      f.root_pos.z() = z0 - 0.015 * (lift_l + lift_r);
    } else if (kind == "walk") {
      const double v = 0.25 * amp_jit;
      const double freq = 0.9;
      const double w = 2 * std::numbers::pi * freq;
      const double sw = std::sin(w * t);
      const double swing_l = detail::smooth_bump(std::fmod(freq * t, 1.0) * 2.0);
      const double swing_r = detail::smooth_bump(std::fmod(freq * t, 1.0) * 2.0 - 1.0);
      f.root_pos = Vec3(v * t, 0, z0 - 0.01 + 0.008 * std::cos(2 * w * t));
      detail::set_aa(f, kLHip, Vec3(0, -0.3 * sw - 0.05, 0));
      detail::set_aa(f, kRHip, Vec3(0, 0.3 * sw - 0.05, 0));
      detail::set_aa(f, kLKnee, Vec3(0, 0.12 + 0.5 * swing_l, 0));
      detail::set_aa(f, kRKnee, Vec3(0, 0.12 + 0.5 * swing_r, 0));
      detail::set_aa(f, kLAnkle, Vec3(0, -0.07 + 0.12 * sw, 0));
      detail::set_aa(f, kRAnkle, Vec3(0, -0.07 - 0.12 * sw, 0));
      detail::set_aa(f, kLShoulder, Vec3(0, 0.2 * sw, 0));
      detail::set_aa(f, kRShoulder, Vec3(0, -0.2 * sw, 0));
    } else if (kind == "kick") {
      // Stand, right-leg kick, recover. Timeline fractions of duration.
      const double u = t / std::max(duration_s, 1e-9);
      const double wind = detail::smooth_bump((u - 0.25) / 0.2);
      const double strike = detail::smooth_bump((u - 0.45) / 0.25);
      detail::crouch_legs(f, 0.12);
      detail::set_aa(f, kRHip, Vec3(0, -0.12 + 0.25 * wind - 0.85 * strike, 0));
      detail::set_aa(f, kRKnee, Vec3(0, 0.24 + 0.8 * wind - 0.1 * strike, 0));
      detail::set_aa(f, kRAnkle, Vec3(0, -0.12 - 0.3 * strike, 0));
      detail::set_aa(f, kLShoulder, Vec3(0.3 * strike, 0, 0));
      detail::set_aa(f, kRShoulder, Vec3(-0.3 * strike, 0, 0));
      f.root_pos.z() = z0 - 0.8 * (1 - std::cos(0.12)) - 0.01 * strike;
    } else if (kind == "infeasible_teleport") {
      if (i >= n / 2) f.root_pos.x() += 1.5;
    } else if (kind == "infeasible_underground") {
      f.root_pos.z() = z0 - (z0 + 0.6) * std::min(1.0, t / std::max(0.5, 0.8 * duration_s));
    } else if (kind == "infeasible_superhuman_speed") {
      // Large-amplitude arm pumping (peak joint speed ~47 rad/s) plus a root
      // oscillation far beyond actuator capability.
      const double w = 2 * std::numbers::pi * 3.5;
      const double arm = -0.9 + 2.15 * std::sin(w * t);
      const double elb = -1.1 + 1.30 * std::sin(w * t + 1.0);
      detail::set_aa(f, kLShoulder, Vec3(0, arm, 0));
      detail::set_aa(f, kRShoulder, Vec3(0, arm, 0));
      detail::set_aa(f, kLElbow, Vec3(0, elb, 0));
      detail::set_aa(f, kRElbow, Vec3(0, elb, 0));
      f.root_pos.x() = 0.5 * std::sin(2 * std::numbers::pi * 3.0 * t);
    }
    seq.frames.push_back(std::move(f));
  }
  seq.validate();
  return seq;
}

}  // namespace wbt
