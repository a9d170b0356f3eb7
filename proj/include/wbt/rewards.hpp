#pragma once

#include <array>
#include <vector>

#include "wbt/kinematics.hpp"
#include "wbt/rotations.hpp"

namespace wbt {

// Reward = penalty + regularization + task terms. Default weights are the
// published table values, bit-exact.
struct RewardWeights {
  // penalty
  double torque_limits = -2e-1;
  double dof_pos_limits = -1e2;
  double termination = -2e2;
  // regularization
  double dof_acc = -8.4e-6;
  double dof_vel = -3e-3;
  double action_rate = -9e-1;
  double torque = -9e-5;
  double feet_air_time = 8e2;
  double feet_contact_force = -1e-1;
  double stumble = -1e3;
  double slippage = -3e1;
  // task
  double task_dof_pos = 2.4e1;
  double task_dof_vel = 2.4e1;
  double task_body_pos = 4e1;
  double task_body_rot = 1.6e1;
  double task_body_vel = 6e1;
  double task_body_ang_vel = 6e1;
};

struct RewardConfig {
  RewardWeights weights;
  // Normalization constant for the contact-force penalty (divides |F|^2).
  // Raw newtons-squared would dwarf every other term; 1.0 implements the
  // table as written, training configs override it.
  double contact_force_norm = 1.0;
  double control_dt = 0.02;  // s, for the dof acceleration estimate

  std::array<double, 17> weight_array() const {
    return {weights.torque_limits, weights.dof_pos_limits, weights.termination,
            weights.dof_acc,       weights.dof_vel,        weights.action_rate,
            weights.torque,        weights.feet_air_time,  weights.feet_contact_force,
            weights.stumble,       weights.slippage,       weights.task_dof_pos,
            weights.task_dof_vel,  weights.task_body_pos,  weights.task_body_rot,
            weights.task_body_vel, weights.task_body_ang_vel};
  }
};

inline const std::array<const char*, 17>& reward_term_names() {
  static const std::array<const char*, 17> names = {
      "torque_limits", "dof_pos_limits", "termination",        "dof_acc",
      "dof_vel",       "action_rate",    "torque",             "feet_air_time",
      "feet_contact_force", "stumble",   "slippage",           "task_dof_pos",
      "task_dof_vel",  "task_body_pos",  "task_body_rot",      "task_body_vel",
      "task_body_ang_vel"};
  return names;
}

struct FootState {
  bool touchdown = false;            // first loaded substep this control step
  double air_time_at_touchdown = 0;  // s
  Vec3 force = Vec3::Zero();         // world
  Vec3 velocity = Vec3::Zero();      // world, foot link origin
};

struct RewardInputs {
  DofVec q = DofVec::Zero();
  DofVec dq = DofVec::Zero();
  DofVec dq_prev = DofVec::Zero();
  DofVec q_ref = DofVec::Zero();
  DofVec dq_ref = DofVec::Zero();
  DofVec tau_raw = DofVec::Zero();      // pre-clamp: drives the limit indicator
  DofVec tau_applied = DofVec::Zero();  // post-clamp: drives the torque norm
  DofVec action = DofVec::Zero();
  DofVec prev_action = DofVec::Zero();
  std::vector<Vec3> body_pos, ref_body_pos;
  std::vector<Quat> body_rot, ref_body_rot;
  std::vector<Vec3> body_vel, ref_body_vel;
  std::vector<Vec3> body_ang, ref_body_ang;
  FootState foot[2];
  bool terminated = false;
};

struct RewardBreakdown {
  std::array<double, 17> raw{};
  std::array<double, 17> weighted{};
  double total = 0;
};

inline RewardBreakdown compute_reward(const RewardInputs& in, const HumanoidModel& model,
                                      const RewardConfig& cfg) {
  const std::size_t nb = in.body_pos.size();
  if (in.ref_body_pos.size() != nb || in.body_rot.size() != nb || in.ref_body_rot.size() != nb ||
      in.body_vel.size() != nb || in.ref_body_vel.size() != nb || in.body_ang.size() != nb ||
      in.ref_body_ang.size() != nb)
    throw ValidationError("compute_reward: body array shape mismatch");

  RewardBreakdown out;
  auto& r = out.raw;

  // -- penalty --------------------------------------------------------------
  int tau_violations = 0, q_violations = 0;
  for (int j = 0; j < kNumDof; ++j) {
    const auto& js = model.joints[j];
    if (in.tau_raw[j] < -js.torque_limit || in.tau_raw[j] > js.torque_limit) ++tau_violations;
    if (in.q[j] < js.lo || in.q[j] > js.hi) ++q_violations;
  }
  r[0] = tau_violations;
  r[1] = q_violations;
  r[2] = in.terminated ? 1.0 : 0.0;

  // -- regularization ---------------------------------------------------------
  r[3] = ((in.dq - in.dq_prev) / cfg.control_dt).squaredNorm();
  r[4] = in.dq.squaredNorm();
  r[5] = (in.action - in.prev_action).squaredNorm();
  r[6] = in.tau_applied.norm();
  r[7] = 0;
  for (const auto& f : in.foot)
    if (f.touchdown) r[7] += f.air_time_at_touchdown - 0.25;
  r[8] = (in.foot[0].force.squaredNorm() + in.foot[1].force.squaredNorm()) /
         cfg.contact_force_norm;
  r[9] = 0;
  for (const auto& f : in.foot)
    if (f.force.head<2>().norm() > 5.0 * f.force.z()) r[9] += 1.0;
  r[10] = 0;
  for (const auto& f : in.foot)
    if (f.force.norm() >= 1.0) r[10] += f.velocity.squaredNorm();

  // -- task -------------------------------------------------------------------
  r[11] = std::exp(-0.25 * (in.q_ref - in.q).norm());
  r[12] = std::exp(-0.25 * (in.dq_ref - in.dq).squaredNorm());
  double pos_sq = 0, rot_sq = 0, vel_sq = 0, ang_sq = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    pos_sq += (in.body_pos[b] - in.ref_body_pos[b]).squaredNorm();
    const double ang = geodesic_angle(in.body_rot[b], in.ref_body_rot[b]);
    rot_sq += ang * ang;
    vel_sq += (in.body_vel[b] - in.ref_body_vel[b]).squaredNorm();
    ang_sq += (in.body_ang[b] - in.ref_body_ang[b]).squaredNorm();
  }
  r[13] = std::exp(-0.5 * pos_sq);
  r[14] = std::exp(-0.1 * std::sqrt(rot_sq));
  r[15] = std::exp(-10.0 * std::sqrt(vel_sq));
  r[16] = std::exp(-0.01 * std::sqrt(ang_sq));

  const auto w = cfg.weight_array();
  for (int t = 0; t < 17; ++t) {
    out.weighted[t] = w[t] * r[t];
    out.total += out.weighted[t];
  }
  return out;
}

}  // namespace wbt
