#pragma once

#include <string>
#include <vector>

#include "wbt/kinematics.hpp"
#include "wbt/rng.hpp"

namespace wbt {

// Per-episode dynamics randomization. Ranges follow the training config;
// link mass and PD gain factors are sampled independently per link/joint.
struct DRParams {
  double friction = 1.0;
  Vec3 com_offset = Vec3::Zero();          // base link, m
  Eigen::VectorXd link_mass_scale;         // per link
  DofVec kp_scale = DofVec::Ones();
  DofVec kd_scale = DofVec::Ones();
  DofVec rfi_amplitude = DofVec::Zero();   // N*m per joint
  double control_delay = 0.0;              // s
  double push_interval = 0.0;              // s; 0 disables pushes
  double push_speed = 0.0;                 // m/s
  std::string terrain_kind = "flat";

  static DRParams identity(const HumanoidModel& model) {
    DRParams p;
    p.friction = model.friction;
    p.link_mass_scale = Eigen::VectorXd::Ones(static_cast<int>(model.links.size()));
    return p;
  }
};

struct Range {
  double lo = 0, hi = 0;
  double sample(Rng& rng) const { return rng.uniform(lo, hi); }
};

struct DRConfig {
  bool enabled = true;
  Range friction{0.2, 1.1};
  Range com_offset{-0.1, 0.1};        // m, each axis
  Range link_mass{0.7, 1.3};          // x default, per link
  Range kp{0.75, 1.25};               // x default, per joint
  Range kd{0.75, 1.25};               // x default, per joint
  double rfi_torque_fraction = 0.1;   // x torque limit
  Range control_delay{0.020, 0.060};  // s
  double push_interval = 5.0;         // s
  double push_speed = 0.5;            // m/s
  std::vector<std::string> terrain_kinds = {"flat", "rough", "low_obstacles"};

  void validate() const {
    auto ok = [](const Range& r) { return r.lo <= r.hi; };
    if (!(ok(friction) && ok(com_offset) && ok(link_mass) && ok(kp) && ok(kd) &&
          ok(control_delay)))
      throw ValidationError("dr config: range with lo > hi");
    if (terrain_kinds.empty()) throw ValidationError("dr config: no terrain kinds enabled");
  }
};

inline DRParams sample_dr(Rng& rng, const DRConfig& cfg, const HumanoidModel& model) {
  cfg.validate();
  if (!cfg.enabled) return DRParams::identity(model);
  DRParams p;
  p.friction = cfg.friction.sample(rng);
  for (int a = 0; a < 3; ++a) p.com_offset[a] = cfg.com_offset.sample(rng);
  p.link_mass_scale.resize(static_cast<int>(model.links.size()));
  for (int l = 0; l < p.link_mass_scale.size(); ++l) p.link_mass_scale[l] = cfg.link_mass.sample(rng);
  for (int j = 0; j < kNumDof; ++j) p.kp_scale[j] = cfg.kp.sample(rng);
  for (int j = 0; j < kNumDof; ++j) p.kd_scale[j] = cfg.kd.sample(rng);
  for (int j = 0; j < kNumDof; ++j)
    p.rfi_amplitude[j] = cfg.rfi_torque_fraction * model.joints[j].torque_limit;
  p.control_delay = cfg.control_delay.sample(rng);
  p.push_interval = cfg.push_interval;
  p.push_speed = cfg.push_speed;
  p.terrain_kind = cfg.terrain_kinds[rng.uniform_index(cfg.terrain_kinds.size())];
  return p;
}

}  // namespace wbt
