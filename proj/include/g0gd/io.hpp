#pragma once

// File formats: sample files (one value per line, or CSV with an optional
// `value` header), sidecar metadata, run manifests, and atomic writes.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "g0gd/model.hpp"
#include "g0gd/version.hpp"

namespace g0gd::io {

enum class SampleFormat { Lines, Csv };

// Writes content to path via a temporary file + rename, so readers never
// observe a partial file.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string to_text(const Sample& s, SampleFormat fmt) {
  std::string out;
  if (fmt == SampleFormat::Csv) out += "value\n";
  for (double v : s.values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

inline void write_sample(const std::filesystem::path& path, const Sample& s,
                         SampleFormat fmt = SampleFormat::Csv) {
  write_text_atomic(path, to_text(s, fmt));
}

// Accepts both formats: blank lines are skipped, a leading `value` header
// is skipped, and each remaining line must parse as one positive number.
inline Sample read_sample(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path.string());
  Sample s;
  s.label = path.filename().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && line[start] == ' ') ++start;
    if (start == line.size()) continue;
    if (lineno == 1) {
      std::string lower;
      for (char c : line) lower += static_cast<char>(std::tolower(c));
      if (lower == "value") continue;
    }
    double v = 0.0;
    const char* first = line.data() + start;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": not a number: '" + line + "'");
    if (!(v > 0.0))
      throw std::domain_error(path.string() + ":" + std::to_string(lineno) +
                              ": sample values must be > 0");
    s.values.push_back(v);
  }
  if (s.values.empty())
    throw std::runtime_error(path.string() + ": empty sample file");
  return s;
}

// Sidecar metadata written next to generated samples.
inline void write_sample_sidecar(const std::filesystem::path& sample_path,
                                 const G0Params& p, std::size_t n,
                                 std::uint64_t seed) {
  nlohmann::json j{{"alpha", p.alpha}, {"gamma", p.gamma}, {"looks", p.looks},
                   {"n", n},           {"seed", seed}};
  write_text_atomic(sample_path.string() + ".meta.json", j.dump(2) + "\n");
}

// FNV-1a 64-bit digest of a file's bytes, for manifest input records.
inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

inline std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every file-writing command emits one manifest referencing its outputs.
inline void write_manifest(const std::filesystem::path& path,
                           const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["version"] = kVersion;
  j["timestamp"] = timestamp_utc();
  j["inputs"] = nlohmann::json::array();
  for (const auto& p : m.inputs) {
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(p)));
    j["inputs"].push_back({{"path", p.string()}, {"fnv1a64", hex}});
  }
  j["outputs"] = nlohmann::json::array();
  for (const auto& p : m.outputs) j["outputs"].push_back(p.string());
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace g0gd::io
