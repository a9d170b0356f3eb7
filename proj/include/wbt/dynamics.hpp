#pragma once

#include <deque>
#include <vector>

#include "wbt/randomization.hpp"
#include "wbt/rotations.hpp"

namespace wbt {

// ---------------------------------------------------------------------------
// Terrain: heightfield grid with bilinear lookup. Heights are gentle enough
// that contact normals are treated as vertical.
// ---------------------------------------------------------------------------

struct TerrainSpec {
  std::string kind = "flat";
  double cell = 0.1;       // m
  double half_extent = 8;  // m; grid spans [-half_extent, half_extent]^2
  int n = 161;             // cells per side
  std::vector<double> heights;  // n*n, row-major over (ix, iy)
  double friction = 1.0;

  double height_at(double x, double y) const {
    if (kind == "flat" || heights.empty()) return 0.0;
    const double gx = (x + half_extent) / cell;
    const double gy = (y + half_extent) / cell;
    const int ix = static_cast<int>(std::floor(gx));
    const int iy = static_cast<int>(std::floor(gy));
    if (ix < 0 || iy < 0 || ix + 1 >= n || iy + 1 >= n) return 0.0;
    const double fx = gx - ix;
    const double fy = gy - iy;
    auto h = [&](int i, int j) { return heights[static_cast<std::size_t>(i) * n + j]; };
    return (1 - fx) * ((1 - fy) * h(ix, iy) + fy * h(ix, iy + 1)) +
           fx * ((1 - fy) * h(ix + 1, iy) + fy * h(ix + 1, iy + 1));
  }

  double max_abs_height() const {
    double m = 0;
    for (double h : heights) m = std::max(m, std::abs(h));
    return m;
  }
};

struct TerrainParams {
  double rough_amplitude = 0.025;    // m
  double obstacle_height_max = 0.05; // m
  int obstacle_count = 40;
  double obstacle_size_max = 0.8;    // m
};

inline TerrainSpec make_terrain(const std::string& kind, std::uint64_t seed,
                                const TerrainParams& params = {}) {
  TerrainSpec t;
  t.kind = kind;
  if (kind == "flat") return t;
  Rng rng(0x7e44a1ull ^ seed * 0x9e3779b97f4a7c15ull);
  t.heights.assign(static_cast<std::size_t>(t.n) * t.n, 0.0);
  if (kind == "rough") {
    for (auto& h : t.heights) h = rng.uniform(-params.rough_amplitude, params.rough_amplitude);
  } else if (kind == "low_obstacles") {
    for (int k = 0; k < params.obstacle_count; ++k) {
      const double cx = rng.uniform(-t.half_extent * 0.9, t.half_extent * 0.9);
      const double cy = rng.uniform(-t.half_extent * 0.9, t.half_extent * 0.9);
      const double sx = rng.uniform(0.2, params.obstacle_size_max);
      const double sy = rng.uniform(0.2, params.obstacle_size_max);
      const double h = rng.uniform(0.02, params.obstacle_height_max);
      // Keep a clear spawn area around the origin.
      if (std::abs(cx) < 1.0 && std::abs(cy) < 1.0) continue;
      for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) {
          const double x = -t.half_extent + i * t.cell;
          const double y = -t.half_extent + j * t.cell;
          if (std::abs(x - cx) < sx / 2 && std::abs(y - cy) < sy / 2)
            t.heights[static_cast<std::size_t>(i) * t.n + j] = h;
        }
    }
  } else {
    throw ValidationError("make_terrain: unknown kind '" + kind + "'");
  }
  return t;
}

// ---------------------------------------------------------------------------
// Spatial algebra (Featherstone). 6-D vectors are ordered [angular; linear];
// transforms store E (parent->child rotation) and r (child origin in parent).
// ---------------------------------------------------------------------------

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct Xform {
  Mat3 E = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  // Motion vector: child coords from parent coords.
  Vec6 apply(const Vec6& v) const {
    Vec6 out;
    const Vec3 w = v.head<3>();
    out.head<3>() = E * w;
    out.tail<3>() = E * (v.tail<3>() - r.cross(w));
    return out;
  }
  // Force vector: parent coords from child coords (dual transform).
  Vec6 apply_transpose_force(const Vec6& f) const {
    Vec6 out;
    const Vec3 n = E.transpose() * f.head<3>();
    const Vec3 lf = E.transpose() * f.tail<3>();
    out.head<3>() = n + r.cross(lf);
    out.tail<3>() = lf;
    return out;
  }
  Mat6 matrix() const {
    Mat6 m = Mat6::Zero();
    m.topLeftCorner<3, 3>() = E;
    m.bottomRightCorner<3, 3>() = E;
    m.bottomLeftCorner<3, 3>() = -E * skew(r);
    return m;
  }
};

inline Vec6 cross_motion(const Vec6& v, const Vec6& u) {
  Vec6 out;
  const Vec3 w = v.head<3>(), vl = v.tail<3>();
  out.head<3>() = w.cross(u.head<3>());
  out.tail<3>() = w.cross(u.tail<3>()) + vl.cross(u.head<3>());
  return out;
}

inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec6 out;
  const Vec3 w = v.head<3>(), vl = v.tail<3>();
  out.head<3>() = w.cross(f.head<3>()) + vl.cross(f.tail<3>());
  out.tail<3>() = w.cross(f.tail<3>());
  return out;
}

inline Mat6 spatial_inertia(double mass, const Vec3& com, const Vec3& principal) {
  const Mat3 cx = skew(com);
  Mat6 I = Mat6::Zero();
  I.topLeftCorner<3, 3>() = principal.asDiagonal().toDenseMatrix() + mass * cx * cx.transpose();
  I.topRightCorner<3, 3>() = mass * cx;
  I.bottomLeftCorner<3, 3>() = mass * cx.transpose();
  I.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return I;
}

// ---------------------------------------------------------------------------
// Simulation state.
// ---------------------------------------------------------------------------

struct FootContact {
  bool in_contact = false;
  Vec3 force = Vec3::Zero();  // world, summed over the foot's points
  double air_time = 0.0;      // s since last contact
  bool touchdown = false;     // became loaded during the last control step
  double air_time_at_touchdown = 0.0;
  Vec3 foot_vel = Vec3::Zero();  // world velocity of the foot link origin
};

struct SimState {
  Vec3 root_pos = Vec3::Zero();
  Quat root_rot = Quat::Identity();
  Vec3 root_vel = Vec3::Zero();     // world
  Vec3 root_angvel = Vec3::Zero();  // world
  DofVec q = DofVec::Zero();
  DofVec dq = DofVec::Zero();

  std::vector<BodyPose> link_pose;
  std::vector<Vec3> link_vel;     // world, link origin
  std::vector<Vec3> link_angvel;  // world

  FootContact foot[2];  // left, right
  DofVec tau_raw = DofVec::Zero();      // pre-clamp, averaged over substeps
  DofVec tau_applied = DofVec::Zero();  // post-clamp, averaged over substeps
  // Apparent inertia per joint from the articulated-body pass; used for the
  // implicit discretization of PD damping. Part of the state so stepping is
  // a pure function of (state, command, dr, seed).
  DofVec joint_apparent_inertia = DofVec::Constant(1e9);
  double time = 0.0;
  std::uint64_t substep_count = 0;
};

struct SimOptions {
  double dt = 0.005;              // physics substep, 200 Hz
  int substeps_per_control = 4;   // control at 50 Hz
  double gravity = 9.81;
  double contact_kn = 3e4;        // N/m per contact point
  double contact_dn = 3e3;        // N*s/m
  double contact_kt = 3e3;        // N*s/m tangential
  bool fixed_base = false;
  std::vector<int> locked_joints;
  double max_init_penetration = 0.05;  // m
};

// Joint limit stops (mechanical end stops).
inline constexpr double kLimitStopK = 300.0;  // N*m/rad
inline constexpr double kLimitStopD = 4.0;    // N*m*s/rad, engaging direction only

// ---------------------------------------------------------------------------
// Reduced-coordinate articulated-body simulator. One instance per episode;
// DR parameters are baked in at construction.
// ---------------------------------------------------------------------------

class Simulator {
 public:
  Simulator(const HumanoidModel& model, const TerrainSpec& terrain, const DRParams& dr,
            const SimOptions& opt, std::uint64_t seed)
      : model_(model), terrain_(terrain), dr_(dr), opt_(opt), rng_(seed) {
    const int nl = static_cast<int>(model.links.size());
    if (dr_.link_mass_scale.size() == 0) dr_.link_mass_scale = Eigen::VectorXd::Ones(nl);
    if (dr_.link_mass_scale.size() != nl)
      throw ValidationError("simulator: link_mass_scale size mismatch");
    inertia_.resize(nl);
    mass_.resize(nl);
    com_.resize(nl);
    for (int l = 0; l < nl; ++l) {
      const auto& spec = model.links[l];
      mass_[l] = spec.mass * dr_.link_mass_scale[l];
      Vec3 com = spec.com;
      if (l == 0) com += dr_.com_offset;
      com_[l] = com;
      const Vec3 principal = spec.inertia * dr_.link_mass_scale[l];
      inertia_[l] = spatial_inertia(mass_[l], com, principal);
    }
    locked_.assign(static_cast<std::size_t>(kNumDof), false);
    for (int j : opt_.locked_joints) locked_[j] = true;
    delay_substeps_ =
        static_cast<int>(std::lround(dr_.control_delay / opt_.dt));
    mu_ = dr_.friction;
  }

  const HumanoidModel& model() const { return model_; }
  const TerrainSpec& terrain() const { return terrain_; }
  double total_mass() const {
    double m = 0;
    for (double v : mass_) m += v;
    return m;
  }

  SimState init(const RootPose& root, const DofVec& q) {
    SimState s;
    s.root_pos = root.pos;
    s.root_rot = root.rot.normalized();
    s.q = q;
    refresh_kinematics(s);
    // Initial penetration check over all contact points.
    double worst = 0;
    for (const auto& cp : model_.contacts) {
      const Vec3 x = contact_world(s, cp);
      worst = std::max(worst, terrain_.height_at(x.x(), x.y()) - x.z());
    }
    if (worst > opt_.max_init_penetration)
      throw ValidationError("init_sim: initial penetration " + std::to_string(worst) + " m");
    command_ring_.clear();
    return s;
  }

  // One control step: push the command through the delay queue and run the
  // physics substeps with PD torques, RFI noise and torque clamping.
  void step_control(SimState& s, const DofVec& joint_targets) {
    command_ring_.push_back(joint_targets);
    if (command_ring_.size() > 64) command_ring_.pop_front();
    SimState last_good = s;
    DofVec tau_raw_acc = DofVec::Zero();
    DofVec tau_app_acc = DofVec::Zero();
    s.foot[0].touchdown = false;
    s.foot[1].touchdown = false;
    for (int k = 0; k < opt_.substeps_per_control; ++k) {
      const DofVec& cmd = delayed_command(k);
      DofVec tau_raw, tau_app;
      substep(s, cmd, tau_raw, tau_app);
      tau_raw_acc += tau_raw;
      tau_app_acc += tau_app;
      if (!state_finite(s)) {
        s = last_good;
        throw DivergenceError("simulation diverged at t=" + std::to_string(s.time));
      }
    }
    s.tau_raw = tau_raw_acc / opt_.substeps_per_control;
    s.tau_applied = tau_app_acc / opt_.substeps_per_control;
  }

  // Root planar velocity kick of magnitude v_xy in a random direction.
  void apply_push(SimState& s, double v_xy) {
    const double ang = rng_.uniform(0.0, 2.0 * std::numbers::pi);
    if (v_xy != 0.0) {
      s.root_vel += v_xy * Vec3(std::cos(ang), std::sin(ang), 0);
      refresh_velocities(s);
    }
  }

  // World poses and twists of every link from (root, q, velocities).
  void refresh_kinematics(SimState& s) const {
    const int nl = static_cast<int>(model_.links.size());
    s.link_pose.resize(nl);
    s.link_vel.resize(nl);
    s.link_angvel.resize(nl);
    s.link_pose[0] = {s.root_rot.toRotationMatrix(), s.root_pos};
    for (int j = 0; j < kNumDof; ++j) {
      const auto& js = model_.joints[j];
      const auto& pp = s.link_pose[js.parent_link];
      BodyPose bp;
      bp.pos = pp.pos + pp.rot * js.offset;
      bp.rot = pp.rot * Eigen::AngleAxisd(s.q[j], js.axis).toRotationMatrix();
      s.link_pose[j + 1] = bp;
    }
    refresh_velocities(s);
  }

  void refresh_velocities(SimState& s) const {
    s.link_vel[0] = s.root_vel;
    s.link_angvel[0] = s.root_angvel;
    for (int j = 0; j < kNumDof; ++j) {
      const auto& js = model_.joints[j];
      const int p = js.parent_link;
      const Vec3 joint_pos = s.link_pose[j + 1].pos;
      const Vec3 axis_w = s.link_pose[p].rot * js.axis;
      s.link_vel[j + 1] =
          s.link_vel[p] + s.link_angvel[p].cross(joint_pos - s.link_pose[p].pos);
      s.link_angvel[j + 1] = s.link_angvel[p] + axis_w * s.dq[j];
    }
    s.foot[0].foot_vel = s.link_vel[model_.left_foot_link];
    s.foot[1].foot_vel = s.link_vel[model_.right_foot_link];
  }

  Vec3 contact_world(const SimState& s, const ContactPoint& cp) const {
    return s.link_pose[cp.link].pos + s.link_pose[cp.link].rot * cp.offset;
  }

  // Total linear momentum (world).
  Vec3 linear_momentum(const SimState& s) const {
    Vec3 p = Vec3::Zero();
    for (std::size_t l = 0; l < model_.links.size(); ++l) {
      const Vec3 com_w = s.link_pose[l].rot * com_[l];
      const Vec3 v_com = s.link_vel[l] + s.link_angvel[l].cross(com_w);
      p += mass_[l] * v_com;
    }
    return p;
  }

  // Kinetic + gravitational + contact-spring energy.
  double mechanical_energy(const SimState& s) const {
    double e = 0;
    for (std::size_t l = 0; l < model_.links.size(); ++l) {
      const Mat3 R = s.link_pose[l].rot;
      const Vec3 com_w = R * com_[l];
      const Vec3 v_com = s.link_vel[l] + s.link_angvel[l].cross(com_w);
      const Vec3 w_b = R.transpose() * s.link_angvel[l];
      const Vec3 principal = model_.links[l].inertia * dr_.link_mass_scale[l];
      e += 0.5 * mass_[l] * v_com.squaredNorm();
      e += 0.5 * w_b.dot(principal.cwiseProduct(w_b));
      e += mass_[l] * opt_.gravity * (s.link_pose[l].pos + com_w).z();
    }
    for (const auto& cp : model_.contacts) {
      const Vec3 x = contact_world(s, cp);
      const double pen = terrain_.height_at(x.x(), x.y()) - x.z();
      if (pen > 0) e += 0.5 * opt_.contact_kn * pen * pen;
    }
    return e;
  }

 private:
  const DofVec& delayed_command(int substep_in_control) {
    // Commands are issued once per control step; entry i in the ring was
    // issued delay-steps ago when i == size-1-delay_in_controls (rounded at
    // substep granularity).
    const int total_substep = substep_in_control;
    const int delay = delay_substeps_;
    // Index of the command active at this substep, counting from the newest.
    const int substeps_back = delay - total_substep;
    int controls_back = substeps_back <= 0
                            ? 0
                            : (substeps_back + opt_.substeps_per_control - 1) /
                                  opt_.substeps_per_control;
    controls_back = std::min<int>(controls_back, static_cast<int>(command_ring_.size()) - 1);
    return command_ring_[command_ring_.size() - 1 - controls_back];
  }

  static bool state_finite(const SimState& s) {
    return s.root_pos.allFinite() && s.root_rot.coeffs().allFinite() && s.q.allFinite() &&
           s.dq.allFinite() && s.root_vel.allFinite() && s.root_angvel.allFinite();
  }

  struct ContactForce {
    int link;
    Vec3 point_w;
    Vec3 force_w;
  };

  void accumulate_contacts(SimState& s, std::vector<ContactForce>& forces) {
    const bool was[2] = {s.foot[0].in_contact, s.foot[1].in_contact};
    s.foot[0].force.setZero();
    s.foot[1].force.setZero();
    bool loaded[2] = {false, false};
    for (const auto& cp : model_.contacts) {
      const Vec3 x = contact_world(s, cp);
      const double pen = terrain_.height_at(x.x(), x.y()) - x.z();
      if (pen <= 0) continue;
      const Vec3 vel = s.link_vel[cp.link] +
                       s.link_angvel[cp.link].cross(x - s.link_pose[cp.link].pos);
      // Implicitly discretized dampers: the continuous coefficients kn/dn/kt
      // act through an effective slope that is stable at the fixed substep
      // for this point's effective mass.
      const double dn_eff =
          opt_.contact_dn / (1.0 + opt_.contact_dn * opt_.dt / cp.ref_mass);
      const double kt_eff =
          opt_.contact_kt / (1.0 + opt_.contact_kt * opt_.dt / cp.ref_mass);
      const double fz = std::max(0.0, opt_.contact_kn * pen - dn_eff * vel.z());
      if (fz <= 0) continue;
      Vec3 ft = -kt_eff * Vec3(vel.x(), vel.y(), 0);
      const double ft_max = mu_ * fz;
      if (ft.norm() > ft_max) ft *= ft_max / ft.norm();
      const Vec3 f = ft + Vec3(0, 0, fz);
      forces.push_back({cp.link, x, f});
      if (cp.foot >= 0) {
        s.foot[cp.foot].force += f;
        loaded[cp.foot] = true;
      }
    }
    for (int fi = 0; fi < 2; ++fi) {
      s.foot[fi].in_contact = loaded[fi];
      if (loaded[fi]) {
        if (!was[fi] && s.foot[fi].air_time > 0) {
          s.foot[fi].touchdown = true;
          s.foot[fi].air_time_at_touchdown = s.foot[fi].air_time;
        }
        s.foot[fi].air_time = 0.0;
      } else {
        s.foot[fi].air_time += opt_.dt;
      }
    }
  }

  void substep(SimState& s, const DofVec& cmd, DofVec& tau_raw, DofVec& tau_app) {
    // PD torques with RFI noise and clamping, plus joint limit stops.
    // The damping gain acts through an implicitly discretized slope based on
    // the joint's apparent inertia so stiff gains stay stable at 200 Hz.
    // Limit-stop torque is mechanical, not actuation, so it bypasses the
    // actuator torque clamp.
    for (int j = 0; j < kNumDof; ++j) {
      const auto& js = model_.joints[j];
      const double kd = js.kd * dr_.kd_scale[j];
      const double kd_eff = kd / (1.0 + kd * opt_.dt / s.joint_apparent_inertia[j]);
      double t = js.kp * dr_.kp_scale[j] * (cmd[j] - s.q[j]) - kd_eff * s.dq[j];
      if (dr_.rfi_amplitude[j] > 0)
        t += rng_.uniform(-dr_.rfi_amplitude[j], dr_.rfi_amplitude[j]);
      tau_raw[j] = t;
      tau_app[j] = std::clamp(t, -js.torque_limit, js.torque_limit);
      if (locked_[j]) tau_app[j] = 0;
      if (s.q[j] > js.hi)
        tau_app[j] += -kLimitStopK * (s.q[j] - js.hi) - kLimitStopD * std::max(0.0, s.dq[j]);
      else if (s.q[j] < js.lo)
        tau_app[j] += -kLimitStopK * (s.q[j] - js.lo) - kLimitStopD * std::min(0.0, s.dq[j]);
    }

    std::vector<ContactForce> contact_forces;
    accumulate_contacts(s, contact_forces);

    Vec6 base_acc;
    DofVec qdd;
    forward_dynamics(s, tau_app, contact_forces, base_acc, qdd);

    // Semi-implicit Euler: velocities first, then positions. The body-frame
    // velocity belongs to the body frame at t+dt, so it converts to world
    // through the updated orientation; using the stale rotation would drop
    // the w x v transport term and leak momentum.
    const Mat3 R = s.root_rot.toRotationMatrix();
    if (!opt_.fixed_base) {
      Vec6 v_b;
      v_b.head<3>() = R.transpose() * s.root_angvel;
      v_b.tail<3>() = R.transpose() * s.root_vel;
      v_b += opt_.dt * base_acc;
      s.root_rot = quat_integrate(s.root_rot, R * v_b.head<3>(), opt_.dt);
      const Mat3 Rn = s.root_rot.toRotationMatrix();
      s.root_angvel = Rn * v_b.head<3>();
      s.root_vel = Rn * v_b.tail<3>();
      s.root_pos += opt_.dt * s.root_vel;
    }
    for (int j = 0; j < kNumDof; ++j) {
      if (locked_[j]) {
        s.dq[j] = 0;
        continue;
      }
      s.dq[j] += opt_.dt * qdd[j];
      s.q[j] += opt_.dt * s.dq[j];
    }
    s.time += opt_.dt;
    ++s.substep_count;
    refresh_kinematics(s);
  }

  // Articulated-body algorithm. Gravity is handled by solving in a frame
  // that accelerates with g, so no gravity forces appear explicitly.
  void forward_dynamics(SimState& s, const DofVec& tau,
                        const std::vector<ContactForce>& contact_forces, Vec6& base_acc,
                        DofVec& qdd) const {
    const int nl = static_cast<int>(model_.links.size());
    std::vector<Xform> X(nl);       // child <- parent
    std::vector<Vec6> v(nl), c(nl), pA(nl);
    std::vector<Mat6> IA(nl);
    std::vector<Vec6> S(nl);
    std::vector<Vec6> U(nl);
    std::vector<double> D(nl), u(nl);

    const Mat3 R0 = s.root_rot.toRotationMatrix();
    v[0].head<3>() = R0.transpose() * s.root_angvel;
    v[0].tail<3>() = R0.transpose() * s.root_vel;
    IA[0] = inertia_[0];
    pA[0] = cross_force(v[0], inertia_[0] * v[0]);

    for (int j = 0; j < kNumDof; ++j) {
      const int i = j + 1;
      const auto& js = model_.joints[j];
      X[i].E = Eigen::AngleAxisd(s.q[j], js.axis).toRotationMatrix().transpose();
      X[i].r = js.offset;
      S[i].head<3>() = js.axis;
      S[i].tail<3>().setZero();
      v[i] = X[i].apply(v[js.parent_link]) + S[i] * s.dq[j];
      c[i] = cross_motion(v[i], S[i] * s.dq[j]);
      IA[i] = inertia_[i];
      pA[i] = cross_force(v[i], inertia_[i] * v[i]);
    }

    // External contact forces, expressed at each link origin in link coords.
    for (const auto& cf : contact_forces) {
      const Mat3 Rl = s.link_pose[cf.link].rot;
      const Vec3 f_b = Rl.transpose() * cf.force_w;
      const Vec3 n_b = Rl.transpose() * (cf.point_w - s.link_pose[cf.link].pos).cross(cf.force_w);
      Vec6 f;
      f.head<3>() = n_b;
      f.tail<3>() = f_b;
      pA[cf.link] -= f;
    }

    for (int j = kNumDof - 1; j >= 0; --j) {
      const int i = j + 1;
      const int p = model_.joints[j].parent_link;
      Mat6 Ia;
      Vec6 pa;
      if (locked_[j]) {
        Ia = IA[i];
        pa = pA[i] + Ia * c[i];
      } else {
        U[i] = IA[i] * S[i];
        D[i] = S[i].dot(U[i]);
        s.joint_apparent_inertia[j] = D[i];
        u[i] = tau[j] - S[i].dot(pA[i]);
        Ia = IA[i] - (U[i] * U[i].transpose()) / D[i];
        pa = pA[i] + Ia * c[i] + U[i] * (u[i] / D[i]);
      }
      const Mat6 Xm = X[i].matrix();
      IA[p] += Xm.transpose() * Ia * Xm;
      pA[p] += Xm.transpose() * pa;
    }

    // Base spatial acceleration in the gravity frame.
    const Vec3 g_b = R0.transpose() * Vec3(0, 0, -opt_.gravity);
    Vec6 a0;
    if (opt_.fixed_base) {
      a0.setZero();
      a0.tail<3>() = -g_b;
    } else {
      a0 = IA[0].ldlt().solve(-pA[0]);
    }

    std::vector<Vec6> a(nl);
    a[0] = a0;
    for (int j = 0; j < kNumDof; ++j) {
      const int i = j + 1;
      const Vec6 ap = X[i].apply(a[model_.joints[j].parent_link]) + c[i];
      if (locked_[j]) {
        qdd[j] = 0;
        a[i] = ap;
      } else {
        qdd[j] = (u[i] - U[i].dot(ap)) / D[i];
        a[i] = ap + S[i] * qdd[j];
      }
    }

    base_acc = a0;
    if (!opt_.fixed_base) base_acc.tail<3>() += g_b;  // back to true acceleration
  }

  HumanoidModel model_;
  TerrainSpec terrain_;
  DRParams dr_;
  SimOptions opt_;
  Rng rng_;
  std::vector<Mat6> inertia_;
  std::vector<double> mass_;
  std::vector<Vec3> com_;
  std::vector<bool> locked_;
  std::deque<DofVec> command_ring_;
  int delay_substeps_ = 0;
  double mu_ = 1.0;
};

}  // namespace wbt
