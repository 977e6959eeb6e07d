#pragma once

// Workspace manifests: what a run read, what each stage wrote, and the
// digests needed to detect tampering. Completed stage entries are never
// rewritten; a failed trailing stage may be replaced by a later attempt.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raggs/core/digest.hpp"
#include "raggs/core/error.hpp"
#include "raggs/io/jsonl.hpp"

namespace raggs::io {

inline constexpr const char* kToolVersion = "raggs 0.1.0";

struct FileDigest {
  std::string path;  // relative to the workspace root
  std::string sha256;

  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

inline FileDigest digest_file(const std::filesystem::path& workspace, const std::string& rel) {
  return {rel, sha256_file((workspace / rel).string())};
}

struct StageEntry {
  std::string name;
  std::string status = "completed";  // completed, failed
  std::string cache_key;
  std::uint64_t seed = 0;
  std::vector<FileDigest> outputs;
  json summary = json::object();
  std::string error;

  bool completed() const { return status == "completed"; }

  json to_json() const {
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    json j{{"name", name}, {"status", status}, {"cache_key", cache_key}, {"seed", seed}, {"outputs", outs},
           {"summary", summary}};
    if (!error.empty()) j["error"] = error;
    return j;
  }

  static StageEntry from_json(const json& j) {
    StageEntry s;
    s.name = j.at("name").get<std::string>();
    s.status = j.at("status").get<std::string>();
    s.cache_key = j.value("cache_key", "");
    s.seed = j.value("seed", std::uint64_t{0});
    for (const auto& o : j.at("outputs")) s.outputs.push_back({o.at("path"), o.at("sha256")});
    s.summary = j.value("summary", json::object());
    s.error = j.value("error", "");
    return s;
  }

  friend bool operator==(const StageEntry& a, const StageEntry& b) { return a.to_json() == b.to_json(); }
};

struct Manifest {
  std::string tool_version = kToolVersion;
  std::string run_id;
  std::uint64_t seed = 0;
  std::string config_digest;
  json config = json::object();
  std::vector<FileDigest> inputs;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<StageEntry> stages;
  std::string status = "running";  // running, completed, halted

  const StageEntry* stage(const std::string& name) const {
    for (const auto& s : stages)
      if (s.name == name) return &s;
    return nullptr;
  }

  void append(StageEntry s) {
    if (!stages.empty() && !stages.back().completed())
      throw InvariantViolation("cannot append stage '" + s.name + "' after failed stage '" + stages.back().name + "'");
    if (stage(s.name)) throw InvariantViolation("stage '" + s.name + "' already recorded");
    stages.push_back(std::move(s));
  }

  json to_json() const {
    json in = json::array();
    for (const auto& f : inputs) in.push_back({{"path", f.path}, {"sha256", f.sha256}});
    json st = json::array();
    for (const auto& s : stages) st.push_back(s.to_json());
    return {{"tool_version", tool_version}, {"run_id", run_id}, {"seed", seed},   {"config_digest", config_digest},
            {"config", config},             {"inputs", in},     {"seeds", seeds}, {"stages", st},
            {"status", status}};
  }

  static Manifest from_json(const json& j) {
    Manifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.run_id = j.at("run_id").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.config = j.at("config");
    for (const auto& f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
    m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    for (const auto& s : j.at("stages")) m.stages.push_back(StageEntry::from_json(s));
    m.status = j.at("status").get<std::string>();
    return m;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }
};

/// Run id: first 16 hex digits of sha256 over the config digest, input digests and seed.
inline std::string make_run_id(const std::string& config_digest, const std::vector<FileDigest>& inputs,
                               std::uint64_t seed) {
  Sha256 h;
  h.update(config_digest);
  for (const auto& f : inputs) h.update("|" + f.path + "=" + f.sha256);
  h.update("|seed=" + std::to_string(seed));
  return h.hex().substr(0, 16);
}

inline std::string manifest_rel_path(const std::string& run_id) { return "runs/" + run_id + "/manifest.json"; }

inline Manifest load_manifest(const std::filesystem::path& path) {
  try {
    return Manifest::from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, std::string("invalid manifest: ") + e.what());
  }
}

/// Recomputes every referenced digest; throws IntegrityError on the first mismatch.
inline void verify_manifest(const Manifest& m, const std::filesystem::path& workspace) {
  auto check = [&](const FileDigest& f) {
    const auto p = workspace / f.path;
    if (!std::filesystem::exists(p)) throw IntegrityError("manifest references missing file '" + f.path + "'");
    if (sha256_file(p.string()) != f.sha256) throw IntegrityError("digest mismatch for '" + f.path + "'");
  };
  for (const auto& f : m.inputs) check(f);
  for (const auto& s : m.stages)
    for (const auto& f : s.outputs) check(f);
}

/// Writes the manifest, refusing to drop or alter completed stages of an
/// earlier manifest for the same run.
inline void save_manifest(const Manifest& m, const std::filesystem::path& workspace) {
  const auto path = workspace / manifest_rel_path(m.run_id);
  if (std::filesystem::exists(path)) {
    const Manifest prev = load_manifest(path);
    for (std::size_t i = 0; i < prev.stages.size(); ++i) {
      const auto& old = prev.stages[i];
      if (!old.completed()) continue;
      if (i >= m.stages.size() || !(m.stages[i] == old))
        throw IntegrityError("manifest for run " + m.run_id + " would rewrite completed stage '" + old.name + "'");
    }
  }
  write_file(path, m.dump());
}

}  // namespace raggs::io
