#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hu/sym_matrix.hpp"

namespace hu {

inline constexpr const char* kArtifactVersion = "1";

/// Solver states are persisted as the Hamiltonian H (smaller dynamic range
/// than rho, and rho is regenerable): magic bytes, format version, n, then
/// row-major little-endian 64-bit floats.
void write_hamiltonian_artifact(const SymMatrix& h, const std::string& path);
SymMatrix read_hamiltonian_artifact(const std::string& path);

using KvPairs = std::vector<std::pair<std::string, std::string>>;

void write_kv_file(const KvPairs& pairs, const std::string& path);
KvPairs read_kv_file(const std::string& path);
std::string kv_lookup(const KvPairs& pairs, const std::string& key);

/// FNV-1a 64-bit hash of a file's bytes, as fixed-width hex.
std::string file_hash_hex(const std::string& path);

/// Record of one CLI invocation: enough to re-run it bit-exactly (wall
/// clock fields excluded).
struct RunManifest {
  std::string command;
  std::vector<std::string> args;  // argv tail, replayable
  KvPairs parameters;
  KvPairs input_hashes;  // path -> fnv1a64
  KvPairs wall_clock;    // phase -> seconds
  std::string artifact_version = kArtifactVersion;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

}  // namespace hu
