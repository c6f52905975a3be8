// Run manifests: content checksums for every file an experiment reads or
// writes, plus the config digest and timing, so reruns can be compared
// byte-for-byte by comparing two small JSON documents.

#ifndef QUASIM_MANIFEST_HPP_
#define QUASIM_MANIFEST_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quasim {

// FNV-1a, 64-bit.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(std::string_view text);

// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

// Checksum of a file's bytes; throws std::runtime_error on I/O failure.
std::uint64_t file_checksum(const std::string& path);

struct ManifestFile {
  std::string path;
  std::string checksum;  // hex64 of the byte content
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string config_digest;  // hex64 of the resolved config text
  std::uint64_t seed = 0;
  std::vector<ManifestFile> files;
  double duration_ms = 0.0;
};

// Reads the file at `path` and appends its entry.
void add_file(RunManifest& manifest, const std::string& path);

// Deterministic JSON serialization (sorted keys, 2-space indent).
std::string manifest_json(const RunManifest& manifest);
void save_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace quasim

#endif  // QUASIM_MANIFEST_HPP_
