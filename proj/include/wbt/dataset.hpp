#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wbt/util.hpp"

namespace wbt {

enum class SeqStatus { raw, retargeted, rejected_heuristic, rejected_sim2data, clean };

inline const char* to_string(SeqStatus s) {
  switch (s) {
    case SeqStatus::raw: return "raw";
    case SeqStatus::retargeted: return "retargeted";
    case SeqStatus::rejected_heuristic: return "rejected-heuristic";
    case SeqStatus::rejected_sim2data: return "rejected-sim2data";
    case SeqStatus::clean: return "clean";
  }
  return "?";
}

inline SeqStatus seq_status_from_string(const std::string& s) {
  if (s == "raw") return SeqStatus::raw;
  if (s == "retargeted") return SeqStatus::retargeted;
  if (s == "rejected-heuristic") return SeqStatus::rejected_heuristic;
  if (s == "rejected-sim2data") return SeqStatus::rejected_sim2data;
  if (s == "clean") return SeqStatus::clean;
  throw FormatError("unknown sequence status '" + s + "'");
}

// Legal transitions are monotone: raw -> retargeted -> {rejected-*, clean}.
inline bool status_transition_ok(SeqStatus from, SeqStatus to) {
  if (from == to) return true;
  if (from == SeqStatus::raw) return to == SeqStatus::retargeted || to == SeqStatus::rejected_heuristic;
  if (from == SeqStatus::retargeted)
    return to == SeqStatus::rejected_heuristic || to == SeqStatus::rejected_sim2data ||
           to == SeqStatus::clean;
  return false;
}

struct DatasetEntry {
  std::string id;
  std::string path;  // relative to the manifest directory
  SeqStatus status = SeqStatus::raw;
};

// On-disk manifest: one JSON record per line, sorted by id.
struct MotionDataset {
  std::vector<DatasetEntry> entries;
  std::filesystem::path manifest_path;

  const DatasetEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }

  void add(DatasetEntry entry) {
    if (find(entry.id)) throw ValidationError("dataset: duplicate sequence id '" + entry.id + "'");
    entries.push_back(std::move(entry));
    sort();
  }

  void set_status(const std::string& id, SeqStatus to) {
    for (auto& e : entries) {
      if (e.id == id) {
        if (!status_transition_ok(e.status, to))
          throw ValidationError("dataset: illegal status transition " +
                                std::string(to_string(e.status)) + " -> " + to_string(to) +
                                " for '" + id + "'");
        e.status = to;
        return;
      }
    }
    throw ValidationError("dataset: unknown sequence id '" + id + "'");
  }

  std::vector<DatasetEntry> with_status(SeqStatus s) const {
    std::vector<DatasetEntry> out;
    for (const auto& e : entries)
      if (e.status == s) out.push_back(e);
    return out;
  }

  void sort() {
    std::sort(entries.begin(), entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) { return a.id < b.id; });
  }

  std::filesystem::path resolve(const DatasetEntry& e) const {
    return manifest_path.parent_path() / e.path;
  }

  void save() const {
    std::string out;
    for (const auto& e : entries) {
      nlohmann::ordered_json j;
      j["id"] = e.id;
      j["path"] = e.path;
      j["status"] = to_string(e.status);
      out += j.dump();
      out += "\n";
    }
    write_file(manifest_path, out);
  }

  static MotionDataset load(const std::filesystem::path& path) {
    MotionDataset ds;
    ds.manifest_path = path;
    const std::string text = read_file(path);
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
        DatasetEntry e;
        e.id = j.at("id").get<std::string>();
        e.path = j.at("path").get<std::string>();
        e.status = seq_status_from_string(j.at("status").get<std::string>());
        if (ds.find(e.id))
          throw FormatError("duplicate id '" + e.id + "'");
        ds.entries.push_back(std::move(e));
      } catch (const nlohmann::json::exception& ex) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
      }
    }
    ds.sort();
    return ds;
  }
};

}  // namespace wbt
