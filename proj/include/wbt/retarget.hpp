#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wbt/kinematics.hpp"
#include "wbt/motion.hpp"

namespace wbt {

// ---------------------------------------------------------------------------
// Shape fitting: gradient descent on beta so the human rest-pose keypoints
// (pelvis-relative) match the humanoid's. Errors are RMS keypoint distances.
// ---------------------------------------------------------------------------

struct FitReport {
  ShapeParams beta_prime;
  double initial_error = 0;  // m
  double final_error = 0;    // m
  int iterations = 0;
};

inline Eigen::Matrix<double, 12, 3> humanoid_rest_keypoints(const HumanoidModel& model) {
  RootPose root;  // pelvis at the origin
  return humanoid_fk(model, root, DofVec::Zero()).keypoint12;
}

inline Eigen::Matrix<double, 12, 3> human_rest_keypoints(const HumanSkeleton& skel,
                                                         const ShapeParams& shape) {
  MotionFrame rest;  // zero pose, pelvis at the origin
  const auto pos = human_fk(skel, shape, rest);
  const auto corr = correspondence();
  Eigen::Matrix<double, 12, 3> out;
  for (int k = 0; k < 12; ++k) out.row(k) = pos.row(corr.human_joint[k]);
  return out;
}

inline constexpr double kBetaBound = 0.4;  // keeps all bone scales positive

inline FitReport fit_shape_to_targets(const HumanSkeleton& skel,
                                      const Eigen::Matrix<double, 12, 3>& targets, double lr,
                                      int max_iters) {
  if (!(lr > 0)) throw ValidationError("fit_shape: lr must be > 0");
  auto loss_of = [&](const ShapeParams& s) {
    const auto kp = human_rest_keypoints(skel, s);
    return (kp - targets).rowwise().squaredNorm().mean();
  };

  ShapeParams beta;
  double loss = loss_of(beta);
  if (!std::isfinite(loss)) throw DivergenceError("fit_shape: non-finite initial loss");
  const double initial_error = std::sqrt(loss);

  ShapeParams best = beta;
  double best_loss = loss;
  const double h = 1e-6;
  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::Matrix<double, kShapeDim, 1> grad;
    for (int d = 0; d < kShapeDim; ++d) {
      ShapeParams p = beta, m = beta;
      p.beta[d] += h;
      m.beta[d] -= h;
      grad[d] = (loss_of(p) - loss_of(m)) / (2 * h);
    }
    beta.beta -= lr * grad;
    beta.beta = beta.beta.cwiseMax(-kBetaBound).cwiseMin(kBetaBound);
    loss = loss_of(beta);
    if (!std::isfinite(loss))
      throw DivergenceError("fit_shape: non-finite loss at iteration " + std::to_string(it));
    if (loss < best_loss) {
      best_loss = loss;
      best = beta;
    }
    if (grad.norm() < 1e-12) break;
  }

  FitReport r;
  r.beta_prime = best;
  r.initial_error = initial_error;
  r.final_error = std::sqrt(best_loss);
  r.iterations = it;
  return r;
}

inline FitReport fit_shape(const HumanSkeleton& skel, const HumanoidModel& model, double lr,
                           int max_iters) {
  return fit_shape_to_targets(skel, humanoid_rest_keypoints(model), lr, max_iters);
}

// ---------------------------------------------------------------------------
// Frame retargeting: Adam over [root translation, root rotation vector, q]
// minimizing squared keypoint distances plus a soft joint-limit barrier and
// an optional temporal smoothness term.
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int max_steps = 500;
};

struct RetargetOptions {
  AdamConfig adam;
  double w_limit = 10.0;
  double limit_margin = 0.05;   // rad; barrier active inside this band
  double w_smooth = 0.1;
  double stop_residual = 1e-9;  // m, RMS keypoint distance
  double target_fps = 50.0;
};

struct RetargetFrameResult {
  RootPose root;
  DofVec q = DofVec::Zero();
  double residual = 0;  // m, RMS keypoint distance
  int steps = 0;
  std::vector<double> loss_history;
};

struct RetargetDivergence : DivergenceError {
  RetargetFrameResult last;
  explicit RetargetDivergence(const std::string& what, RetargetFrameResult r)
      : DivergenceError(what), last(std::move(r)) {}
};

namespace detail {

inline double limit_barrier(const HumanoidModel& model, const DofVec& q, double margin) {
  double b = 0;
  for (int j = 0; j < kNumDof; ++j) {
    const double lo = model.joints[j].lo + margin;
    const double hi = model.joints[j].hi - margin;
    if (q[j] < lo) b += (lo - q[j]) * (lo - q[j]);
    if (q[j] > hi) b += (q[j] - hi) * (q[j] - hi);
  }
  return b;
}

}  // namespace detail

inline RetargetFrameResult retarget_frame(const HumanoidModel& model,
                                          const Eigen::Matrix<double, 12, 3>& target_kp12,
                                          const DofVec& q_init, const RootPose& root_init,
                                          const RetargetOptions& opt = {},
                                          const DofVec* q_prev = nullptr) {
  // Solve in target-centered coordinates: translating the problem then
  // translates the solution exactly, and keeps positions well scaled.
  const Vec3 center = target_kp12.colwise().mean().transpose();
  Eigen::Matrix<double, 12, 3> target_c = target_kp12;
  target_c.rowwise() -= center.transpose();

  using X = Eigen::Matrix<double, 25, 1>;
  X x;
  x.segment<3>(0) = root_init.pos - center;
  x.segment<3>(3) = quat_log(root_init.rot);
  x.segment<19>(6) = q_init;

  auto unpack = [&](const X& v) {
    RootPose root;
    root.pos = v.segment<3>(0);
    root.rot = quat_exp(v.segment<3>(3));
    DofVec q = v.segment<19>(6);
    return std::make_pair(root, q);
  };
  auto keypoint_sq_sum = [&](const X& v) {
    auto [root, q] = unpack(v);
    const auto fk = humanoid_fk(model, root, q);
    return (fk.keypoint12 - target_c).rowwise().squaredNorm().sum();
  };
  auto rms_of = [&](const X& v) { return std::sqrt(keypoint_sq_sum(v) / 12.0); };
  auto loss_of = [&](const X& v) {
    auto [root, q] = unpack(v);
    double l = keypoint_sq_sum(v) + opt.w_limit * detail::limit_barrier(model, q, opt.limit_margin);
    if (q_prev) l += opt.w_smooth * (q - *q_prev).squaredNorm();
    return l;
  };
  auto result_at = [&](const X& v, int steps, std::vector<double> hist) {
    auto [root, q] = unpack(v);
    RetargetFrameResult r;
    r.root = root;
    r.root.pos += center;
    r.q = model.clamp_to_limits(q);
    r.residual = rms_of(v);
    r.steps = steps;
    r.loss_history = std::move(hist);
    return r;
  };

  std::vector<double> hist;
  if (rms_of(x) < opt.stop_residual) return result_at(x, 0, hist);

  X m = X::Zero(), v2 = X::Zero();
  double best_loss = loss_of(x);
  double prev_loss = best_loss;
  X best_x = x;
  int rising = 0;
  const double h = 1e-6;
  int step = 0;
  for (; step < opt.adam.max_steps; ++step) {
    X grad;
    for (int d = 0; d < 25; ++d) {
      X p = x, q = x;
      p[d] += h;
      q[d] -= h;
      grad[d] = (loss_of(p) - loss_of(q)) / (2 * h);
    }
    m = opt.adam.beta1 * m + (1 - opt.adam.beta1) * grad;
    v2 = opt.adam.beta2 * v2 + (1 - opt.adam.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1 - std::pow(opt.adam.beta1, step + 1);
    const double bc2 = 1 - std::pow(opt.adam.beta2, step + 1);
    const X mh = m / bc1;
    const X vh = v2 / bc2;
    // Constant step for the first half, then exponential decay. The decay
    // collapses Adam's oscillation onto the optimum, which makes the solved
    // pose a stable function of the targets.
    const double half = 0.5 * opt.adam.max_steps;
    const double lr_t =
        step < half ? opt.adam.lr : opt.adam.lr * std::pow(10.0, -4.0 * (step - half) / half);
    x -= lr_t * mh.cwiseQuotient(vh.cwiseSqrt() + X::Constant(opt.adam.eps));

    const double loss = loss_of(x);
    if (!std::isfinite(loss))
      throw RetargetDivergence("retarget_frame: non-finite loss", result_at(best_x, step, hist));
    rising = loss > prev_loss ? rising + 1 : 0;
    prev_loss = loss;
    if (rising >= 100)
      throw RetargetDivergence("retarget_frame: loss increased for 100 consecutive steps",
                               result_at(best_x, step, hist));
    if (loss < best_loss) {
      best_loss = loss;
      best_x = x;
    }
    // Objective of the reported iterate (the running best).
    hist.push_back(best_loss);
    if (rms_of(x) < opt.stop_residual) break;
  }
  return result_at(best_x, step, hist);
}

// ---------------------------------------------------------------------------
// RetargetedMotion: humanoid-space reference trajectory with derived
// velocities, the 8 goal keypoints, and per-body reference poses/twists.
// ---------------------------------------------------------------------------

struct RetargetFrame {
  RootPose root;
  DofVec q = DofVec::Zero();
  DofVec dq = DofVec::Zero();
  Eigen::Matrix<double, 8, 3> kp_pos = Eigen::Matrix<double, 8, 3>::Zero();
  Eigen::Matrix<double, 8, 3> kp_vel = Eigen::Matrix<double, 8, 3>::Zero();
  std::vector<Vec3> body_pos;
  std::vector<Quat> body_rot;
  std::vector<Vec3> body_vel;
  std::vector<Vec3> body_ang;
};

struct RetargetedMotion {
  double fps = 50.0;
  std::string source_id;
  std::vector<RetargetFrame> frames;

  double duration() const { return frames.size() / fps; }
};

// Body poses for one retarget solution: keypoints and the body set.
inline void fill_frame_poses(const HumanoidModel& model, RetargetFrame& f) {
  const auto fk = humanoid_fk(model, f.root, f.q);
  for (int k = 0; k < 8; ++k) f.kp_pos.row(k) = fk.keypoint8.row(k);
  const int nb = model.body_count();
  f.body_pos.resize(nb);
  f.body_rot.resize(nb);
  f.body_vel.assign(nb, Vec3::Zero());
  f.body_ang.assign(nb, Vec3::Zero());
  for (int b = 0; b < nb; ++b) {
    const auto& fp = model.bodies[b];
    f.body_pos[b] = frame_point_world(fk.link_pose, fp);
    f.body_rot[b] = Quat(fk.link_pose[fp.link].rot);
  }
}

inline RetargetedMotion retarget_sequence(const HumanoidModel& model, const HumanSkeleton& skel,
                                          const MotionSequence& seq_in,
                                          const ShapeParams& beta_prime,
                                          const RetargetOptions& opt = {}) {
  if (seq_in.frames.empty()) throw ValidationError("retarget_sequence: empty sequence");
  const MotionSequence seq = resample(seq_in, opt.target_fps);
  const auto corr = correspondence();

  RetargetedMotion out;
  out.fps = seq.fps;
  out.source_id = seq.name;
  out.frames.resize(seq.frames.size());

  DofVec q_warm = model.default_pose;
  RootPose root_warm;
  root_warm.pos = seq.frames[0].root_pos;
  root_warm.rot = seq.frames[0].root_rot;
  const DofVec* q_prev = nullptr;

  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto human = human_fk(skel, beta_prime, seq.frames[i]);
    Eigen::Matrix<double, 12, 3> targets;
    for (int k = 0; k < 12; ++k) targets.row(k) = human.row(corr.human_joint[k]);
    RetargetFrameResult res;
    try {
      res = retarget_frame(model, targets, q_warm, root_warm, opt, q_prev);
    } catch (const RetargetDivergence& e) {
      throw DivergenceError("retarget_sequence('" + seq.name + "') frame " + std::to_string(i) +
                            ": " + e.what());
    }
    out.frames[i].root = res.root;
    out.frames[i].q = res.q;
    q_warm = res.q;
    root_warm = res.root;
    q_prev = &out.frames[i].q;
    fill_frame_poses(model, out.frames[i]);
  }

  // Velocities: central differences in the interior, one-sided at the ends.
  const int n = static_cast<int>(out.frames.size());
  const double dt = 1.0 / out.fps;
  const int nb = model.body_count();
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 1);
    const int hi = std::min(n - 1, i + 1);
    const double span = (hi - lo) * dt;
    if (span <= 0) continue;
    auto& f = out.frames[i];
    f.dq = (out.frames[hi].q - out.frames[lo].q) / span;
    f.kp_vel = (out.frames[hi].kp_pos - out.frames[lo].kp_pos) / span;
    for (int b = 0; b < nb; ++b) {
      f.body_vel[b] = (out.frames[hi].body_pos[b] - out.frames[lo].body_pos[b]) / span;
      f.body_ang[b] = ang_vel_between(out.frames[lo].body_rot[b], out.frames[hi].body_rot[b], span);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heuristic feasibility rules applied right after retargeting.
// ---------------------------------------------------------------------------

struct HeuristicRules {
  double min_root_height = 0.45;  // m; sitting/crawling proxy
  double max_root_jump = 0.5;     // m per frame
  double max_joint_rate = 25.0;   // rad/s
};

struct FilterVerdict {
  bool keep = true;
  std::string reason;  // "low-root" | "root-jump" | "joint-rate"
  int frame = -1;
};

inline FilterVerdict heuristic_filter(const RetargetedMotion& rt, const HeuristicRules& rules = {}) {
  for (std::size_t i = 0; i < rt.frames.size(); ++i) {
    if (rt.frames[i].root.pos.z() < rules.min_root_height)
      return {false, "low-root", static_cast<int>(i)};
    if (i > 0 &&
        (rt.frames[i].root.pos - rt.frames[i - 1].root.pos).norm() > rules.max_root_jump)
      return {false, "root-jump", static_cast<int>(i)};
    if (rt.frames[i].dq.cwiseAbs().maxCoeff() > rules.max_joint_rate)
      return {false, "joint-rate", static_cast<int>(i)};
  }
  return {true, "", -1};
}

// ---------------------------------------------------------------------------
// Retargeted motion file format ("wbt-retarget" v1).
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json retarget_to_json(const RetargetedMotion& rt) {
  nlohmann::ordered_json j;
  j["format"] = "wbt-retarget";
  j["version"] = 1;
  j["source_id"] = rt.source_id;
  j["fps"] = rt.fps;
  auto frames = nlohmann::ordered_json::array();
  for (const auto& f : rt.frames) {
    nlohmann::ordered_json jf;
    jf["root_pos"] = {f.root.pos.x(), f.root.pos.y(), f.root.pos.z()};
    jf["root_rot"] = {f.root.rot.w(), f.root.rot.x(), f.root.rot.y(), f.root.rot.z()};
    auto dump_vec = [](const auto& m) {
      std::vector<double> v(m.data(), m.data() + m.size());
      return v;
    };
    jf["q"] = dump_vec(f.q);
    jf["dq"] = dump_vec(f.dq);
    std::vector<double> kp, kv;
    for (int k = 0; k < 8; ++k)
      for (int c = 0; c < 3; ++c) {
        kp.push_back(f.kp_pos(k, c));
        kv.push_back(f.kp_vel(k, c));
      }
    jf["kp_pos"] = kp;
    jf["kp_vel"] = kv;
    std::vector<double> bp, br, bv, ba;
    for (std::size_t b = 0; b < f.body_pos.size(); ++b) {
      for (int c = 0; c < 3; ++c) bp.push_back(f.body_pos[b][c]);
      br.push_back(f.body_rot[b].w());
      br.push_back(f.body_rot[b].x());
      br.push_back(f.body_rot[b].y());
      br.push_back(f.body_rot[b].z());
      for (int c = 0; c < 3; ++c) bv.push_back(f.body_vel[b][c]);
      for (int c = 0; c < 3; ++c) ba.push_back(f.body_ang[b][c]);
    }
    jf["body_pos"] = bp;
    jf["body_rot"] = br;
    jf["body_vel"] = bv;
    jf["body_ang"] = ba;
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);
  return j;
}

inline RetargetedMotion retarget_from_json(const nlohmann::json& j, const std::string& context) {
  try {
    if (j.at("format").get<std::string>() != "wbt-retarget")
      throw FormatError(context + ": not a wbt-retarget file");
    if (j.at("version").get<int>() != 1)
      throw FormatError(context + ": unsupported retarget format version");
    RetargetedMotion rt;
    rt.source_id = j.at("source_id").get<std::string>();
    rt.fps = j.at("fps").get<double>();
    for (const auto& jf : j.at("frames")) {
      RetargetFrame f;
      auto rp = jf.at("root_pos").get<std::vector<double>>();
      auto rr = jf.at("root_rot").get<std::vector<double>>();
      f.root.pos = Vec3(rp.at(0), rp.at(1), rp.at(2));
      f.root.rot = Quat(rr.at(0), rr.at(1), rr.at(2), rr.at(3));
      auto q = jf.at("q").get<std::vector<double>>();
      auto dq = jf.at("dq").get<std::vector<double>>();
      if (q.size() != kNumDof || dq.size() != kNumDof)
        throw FormatError(context + ": bad dof vector size");
      for (int d = 0; d < kNumDof; ++d) {
        f.q[d] = q[d];
        f.dq[d] = dq[d];
      }
      auto kp = jf.at("kp_pos").get<std::vector<double>>();
      auto kv = jf.at("kp_vel").get<std::vector<double>>();
      if (kp.size() != 24 || kv.size() != 24)
        throw FormatError(context + ": bad keypoint array size");
      for (int k = 0; k < 8; ++k)
        for (int c = 0; c < 3; ++c) {
          f.kp_pos(k, c) = kp[k * 3 + c];
          f.kp_vel(k, c) = kv[k * 3 + c];
        }
      auto bp = jf.at("body_pos").get<std::vector<double>>();
      auto br = jf.at("body_rot").get<std::vector<double>>();
      auto bv = jf.at("body_vel").get<std::vector<double>>();
      auto ba = jf.at("body_ang").get<std::vector<double>>();
      const std::size_t nb = bp.size() / 3;
      if (bp.size() != nb * 3 || br.size() != nb * 4 || bv.size() != nb * 3 || ba.size() != nb * 3)
        throw FormatError(context + ": inconsistent body arrays");
      for (std::size_t b = 0; b < nb; ++b) {
        f.body_pos.push_back(Vec3(bp[b * 3], bp[b * 3 + 1], bp[b * 3 + 2]));
        f.body_rot.push_back(Quat(br[b * 4], br[b * 4 + 1], br[b * 4 + 2], br[b * 4 + 3]));
        f.body_vel.push_back(Vec3(bv[b * 3], bv[b * 3 + 1], bv[b * 3 + 2]));
        f.body_ang.push_back(Vec3(ba[b * 3], ba[b * 3 + 1], ba[b * 3 + 2]));
      }
      rt.frames.push_back(std::move(f));
    }
    return rt;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(context + ": " + e.what());
  }
}

inline void save_retargeted(const RetargetedMotion& rt, const std::filesystem::path& path) {
  write_file(path, retarget_to_json(rt).dump() + "\n");
}

inline RetargetedMotion load_retargeted(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return retarget_from_json(j, path.string());
}

}  // namespace wbt
