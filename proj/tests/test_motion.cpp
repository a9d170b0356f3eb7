#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "wbt/dataset.hpp"
#include "wbt/motion.hpp"

using namespace wbt;
namespace fs = std::filesystem;

// Digest of data/golden/stand_1s.json, recorded when the golden was created.
static const char* WBT_GOLDEN_STAND_DIGEST = "3cd7f3aef255812c";

namespace {
fs::path temp_dir() {
  auto p = fs::temp_directory_path() / "wbt_motion_tests";
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("save/load round-trip is bit-exact for synthetic sequences") {
  const auto dir = temp_dir();
  Rng rng(17);
  for (const auto& kind : synth_kinds()) {
    for (std::uint64_t seed : {0ull, 3ull}) {
      auto seq = synth_motion(kind, 1.2, 30.0, seed);
      seq.shape.beta[0] = rng.uniform(-0.1, 0.1);
      const auto path = dir / (kind + "_" + std::to_string(seed) + ".json");
      save_motion(seq, path);
      const auto back = load_motion(path);
      REQUIRE(back == seq);
    }
  }
}

TEST_CASE("load rejects a non-unit quaternion") {
  auto seq = synth_motion("stand", 0.2, 30.0, 0);
  auto j = motion_to_json(seq);
  j["frames"][0]["root_rot"] = {0.5, 0.0, 0.0, 0.0};
  const auto path = temp_dir() / "bad_quat.json";
  write_file(path, j.dump());
  REQUIRE_THROWS_AS(load_motion(path), ValidationError);
}

TEST_CASE("load rejects malformed documents with context") {
  const auto path = temp_dir() / "bad_syntax.json";
  write_file(path, "{ not json");
  REQUIRE_THROWS_AS(load_motion(path), FormatError);

  auto seq = synth_motion("stand", 0.2, 30.0, 0);
  auto j = motion_to_json(seq);
  j.erase("fps");
  write_file(path, j.dump());
  REQUIRE_THROWS_AS(load_motion(path), FormatError);
}

TEST_CASE("save to unwritable path raises io error") {
  auto seq = synth_motion("stand", 0.2, 30.0, 0);
  REQUIRE_THROWS_AS(save_motion(seq, "/proc/wbt_forbidden/x.json"), IoError);
}

TEST_CASE("golden stand_1s file") {
  const fs::path golden = fs::path(WBT_SOURCE_DIR) / "data" / "golden" / "stand_1s.json";
  REQUIRE(fs::exists(golden));

  // Independent structural check straight off the JSON document.
  auto j = nlohmann::json::parse(read_file(golden));
  REQUIRE(j.at("fps").get<double>() == 30.0);
  REQUIRE(j.at("frames").size() == 30);
  for (const auto& f : j.at("frames"))
    for (double v : f.at("joint_rot").get<std::vector<double>>()) REQUIRE(v == 0.0);

  const auto seq = load_motion(golden);
  REQUIRE(seq.frames.size() == 30);
  REQUIRE(seq == synth_motion("stand", 1.0, 30.0, 0));

  // Digest frozen when the golden file was created.
  const auto path = temp_dir() / "stand_rehash.json";
  save_motion(seq, path);
  REQUIRE(hex64(fnv1a64(read_file(path))) == WBT_GOLDEN_STAND_DIGEST);
}

TEST_CASE("resample frame counts and identity") {
  auto seq = synth_motion("wave", 1.0, 30.0, 1);
  REQUIRE(seq.frames.size() == 30);
  auto up = resample(seq, 60.0);
  REQUIRE(up.frames.size() == 60);

  auto same = resample(seq, 30.0);
  REQUIRE(same == seq);
}

TEST_CASE("resample interpolates linear root motion exactly") {
  MotionSequence seq;
  seq.fps = 30.0;
  seq.name = "line";
  for (int i = 0; i < 30; ++i) {
    MotionFrame f;
    f.root_pos = Vec3(i / 30.0, 0, 0);  // x = t
    seq.frames.push_back(f);
  }
  auto r = resample(seq, 50.0);
  REQUIRE(r.frames.size() == 50);
  REQUIRE_THAT(r.frames[25].root_pos.x(), Catch::Matchers::WithinAbs(0.5, 1e-9));

  // Endpoints preserved.
  REQUIRE((r.frames.front().root_pos - seq.frames.front().root_pos).norm() < 1e-9);
  REQUIRE((r.frames.back().root_pos - seq.frames.back().root_pos).norm() < 1e-9);
}

TEST_CASE("resample endpoint preservation over random synthetic motions") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto& kinds = synth_kinds();
    auto kind = kinds[rng.uniform_index(kinds.size())];
    auto seq = synth_motion(kind, 1.0 + rng.uniform01(), 30.0, trial);
    const double target = rng.uniform(10.0, 90.0);
    auto r = resample(seq, target);
    REQUIRE((r.frames.front().root_pos - seq.frames.front().root_pos).norm() < 1e-9);
    REQUIRE((r.frames.back().root_pos - seq.frames.back().root_pos).norm() < 1e-9);
    REQUIRE(r.frames.front().root_rot.angularDistance(seq.frames.front().root_rot) < 1e-9);
    REQUIRE(r.frames.back().root_rot.angularDistance(seq.frames.back().root_rot) < 1e-9);
    REQUIRE((r.frames.back().joint_rot - seq.frames.back().joint_rot).cwiseAbs().maxCoeff() <
            1e-9);
  }
}

TEST_CASE("resample rejects empty sequences") {
  MotionSequence seq;
  REQUIRE_THROWS_AS(resample(seq, 50.0), ValidationError);
}

TEST_CASE("finite differences of a constant sequence vanish") {
  auto seq = synth_motion("stand", 1.0, 50.0, 0);
  auto v = finite_diff_velocities(seq);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    REQUIRE(v.root_lin[i].norm() == 0.0);
    REQUIRE(v.root_ang[i].norm() == 0.0);
    REQUIRE(v.joint_rate[i].norm() == 0.0);
  }
}

TEST_CASE("finite differences recover analytic derivatives") {
  MotionSequence seq;
  seq.fps = 50.0;
  seq.name = "deriv";
  for (int i = 0; i < 50; ++i) {
    const double t = i / 50.0;
    MotionFrame f;
    f.root_pos = Vec3(t, 0, 0);
    f.root_rot = Quat(Eigen::AngleAxisd(t, Vec3::UnitZ()));  // 1 rad/s about z
    seq.frames.push_back(f);
  }
  auto v = finite_diff_velocities(seq);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    REQUIRE_THAT(v.root_lin[i].x(), Catch::Matchers::WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(v.root_ang[i].z(), Catch::Matchers::WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("finite differences need two frames") {
  auto seq = synth_motion("stand", 1.0, 30.0, 0);
  seq.frames.resize(1);
  REQUIRE_THROWS_AS(finite_diff_velocities(seq), ValidationError);
}

TEST_CASE("synth stand produces identical frames") {
  auto seq = synth_motion("stand", 1.0, 30.0, 0);
  REQUIRE(seq.frames.size() == 30);
  for (const auto& f : seq.frames) {
    REQUIRE(f == seq.frames[0]);
    REQUIRE(f.joint_rot.norm() == 0.0);
  }
}

TEST_CASE("synth feasibility contracts") {
  auto tp = synth_motion("infeasible_teleport", 1.0, 30.0, 0);
  double max_jump = 0;
  for (std::size_t i = 1; i < tp.frames.size(); ++i)
    max_jump = std::max(max_jump, (tp.frames[i].root_pos - tp.frames[i - 1].root_pos).norm());
  REQUIRE(max_jump >= 1.0);

  auto ug = synth_motion("infeasible_underground", 2.0, 30.0, 0);
  double min_z = 1e9;
  for (const auto& f : ug.frames) min_z = std::min(min_z, f.root_pos.z());
  REQUIRE(min_z < 0.0);

  auto fast = synth_motion("infeasible_superhuman_speed", 1.0, 50.0, 0);
  auto v = finite_diff_velocities(fast);
  double max_rate = 0;
  for (const auto& jr : v.joint_rate) max_rate = std::max(max_rate, jr.rowwise().norm().maxCoeff());
  REQUIRE(max_rate > 40.0);

  // Feasible kinds stay within gentle human joint ranges.
  for (const std::string kind : {"stand", "wave", "squat", "step_in_place", "walk", "kick"}) {
    auto seq = synth_motion(kind, 2.0, 30.0, 1);
    for (const auto& f : seq.frames)
      REQUIRE(f.joint_rot.rowwise().norm().maxCoeff() <= 2.2);
  }
}

TEST_CASE("synth determinism and unknown kind") {
  auto a = synth_motion("walk", 2.0, 30.0, 7);
  auto b = synth_motion("walk", 2.0, 30.0, 7);
  REQUIRE(a == b);
  auto c = synth_motion("walk", 2.0, 30.0, 8);
  REQUIRE_FALSE(a == c);
  REQUIRE_THROWS_AS(synth_motion("cartwheel", 1.0, 30.0, 0), ValidationError);
}

TEST_CASE("dataset manifest round trip and transitions") {
  const auto dir = temp_dir();
  MotionDataset ds;
  ds.manifest_path = dir / "manifest.jsonl";
  ds.add({"b_seq", "b.json", SeqStatus::raw});
  ds.add({"a_seq", "a.json", SeqStatus::raw});
  REQUIRE_THROWS_AS(ds.add({"a_seq", "dup.json", SeqStatus::raw}), ValidationError);

  REQUIRE(ds.entries[0].id == "a_seq");  // sorted

  ds.set_status("a_seq", SeqStatus::retargeted);
  ds.set_status("a_seq", SeqStatus::clean);
  REQUIRE_THROWS_AS(ds.set_status("a_seq", SeqStatus::raw), ValidationError);
  REQUIRE_THROWS_AS(ds.set_status("b_seq", SeqStatus::clean), ValidationError);

  ds.save();
  auto back = MotionDataset::load(ds.manifest_path);
  REQUIRE(back.entries.size() == 2);
  REQUIRE(back.find("a_seq")->status == SeqStatus::clean);
  REQUIRE(back.find("b_seq")->status == SeqStatus::raw);

  // Byte-stable: saving the loaded manifest reproduces the file.
  const auto before = read_file(ds.manifest_path);
  back.save();
  REQUIRE(read_file(ds.manifest_path) == before);
}
