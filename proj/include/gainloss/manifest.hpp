#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gainloss/errors.hpp"
#include "gainloss/rng.hpp"
#include "gainloss/version.hpp"

namespace gainloss {

// Every experiment writes a manifest.json next to its outputs: a config
// echo plus the name, size, and content hash of each emitted file, so a run
// can be verified or diffed later. Wall-clock time is informational and is
// excluded from determinism comparisons.
struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::string hash;  // fnv1a64, hex
  std::uint64_t bytes = 0;
};

struct ReportManifest {
  int schema_version = 1;
  std::string experiment;
  std::map<std::string, std::string> config;
  std::vector<ManifestEntry> files;
  std::string tool_version = GAINLOSS_VERSION;
  std::string hash_algorithm = "fnv1a64";
  double wall_clock_seconds = 0.0;
};

inline std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open for hashing");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h = detail::fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

inline void add_manifest_file(ReportManifest& m, const std::filesystem::path& dir,
                              const std::string& rel_path) {
  ManifestEntry e;
  e.path = rel_path;
  const std::filesystem::path full = dir / rel_path;
  e.hash = file_hash_hex(full.string());
  e.bytes = static_cast<std::uint64_t>(std::filesystem::file_size(full));
  m.files.push_back(std::move(e));
}

inline void write_manifest(const std::filesystem::path& dir, const ReportManifest& m) {
  nlohmann::json j;
  j["schema_version"] = m.schema_version;
  j["experiment"] = m.experiment;
  j["config"] = m.config;
  j["tool_version"] = m.tool_version;
  j["hash_algorithm"] = m.hash_algorithm;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : m.files) {
    files.push_back({{"path", f.path}, {"hash", f.hash}, {"bytes", f.bytes}});
  }
  j["files"] = files;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw ParseError((dir / "manifest.json").string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

inline ReportManifest read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError(manifest_path.string() + ": cannot open");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": bad JSON: " + e.what());
  }
  ReportManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    m.experiment = j.at("experiment").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.hash_algorithm = j.value("hash_algorithm", std::string("fnv1a64"));
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    for (const auto& f : j.at("files")) {
      ManifestEntry e;
      e.path = f.at("path").get<std::string>();
      e.hash = f.at("hash").get<std::string>();
      e.bytes = f.at("bytes").get<std::uint64_t>();
      m.files.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": bad manifest: " + e.what());
  }
  return m;
}

// Checks each listed file against its recorded hash and size. Returns the
// list of problems; empty means the directory matches the manifest.
inline std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  const std::filesystem::path mpath = dir / "manifest.json";
  if (!std::filesystem::exists(mpath)) {
    problems.push_back("manifest.json: missing");
    return problems;
  }
  const ReportManifest m = read_manifest(mpath);
  for (const auto& f : m.files) {
    const std::filesystem::path full = dir / f.path;
    if (!std::filesystem::exists(full)) {
      problems.push_back(f.path + ": missing");
      continue;
    }
    const auto size = static_cast<std::uint64_t>(std::filesystem::file_size(full));
    if (size != f.bytes) {
      problems.push_back(f.path + ": size mismatch (" + std::to_string(size) + " vs " +
                         std::to_string(f.bytes) + ")");
      continue;
    }
    const std::string h = file_hash_hex(full.string());
    if (h != f.hash) {
      problems.push_back(f.path + ": hash mismatch (" + h + " vs " + f.hash + ")");
    }
  }
  return problems;
}

}  // namespace gainloss
