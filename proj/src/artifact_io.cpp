#include "hu/artifact_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "artifact format is defined little-endian");

namespace hu {

namespace {
constexpr char kMagic[6] = {'H', 'U', 'H', 'A', 'M', '\0'};
}

void write_hamiltonian_artifact(const SymMatrix& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_hamiltonian_artifact: cannot open " + path);
  }
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  const std::uint64_t n = static_cast<std::uint64_t>(h.dim());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  // Eigen stores column-major; a symmetric matrix is its own transpose, so
  // the raw buffer already is the row-major image.
  out.write(reinterpret_cast<const char*>(h.mat().data()),
            static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!out) {
    throw std::runtime_error("write_hamiltonian_artifact: write failed for " + path);
  }
}

SymMatrix read_hamiltonian_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_hamiltonian_artifact: cannot open " + path);
  }
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("read_hamiltonian_artifact: bad magic in " + path);
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || version != 1) {
    throw std::runtime_error("read_hamiltonian_artifact: unsupported version");
  }
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n == 0 || n > (1u << 20)) {
    throw std::runtime_error("read_hamiltonian_artifact: implausible dimension");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!in) {
    throw std::runtime_error("read_hamiltonian_artifact: truncated file " + path);
  }
  return SymMatrix::from_symmetric(std::move(m));
}

void write_kv_file(const KvPairs& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_kv_file: cannot open " + path);
  }
  for (const auto& [key, value] : pairs) {
    out << key << " = " << value << "\n";
  }
}

KvPairs read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_kv_file: cannot open " + path);
  }
  KvPairs pairs;
  std::string line;
  auto trim = [](std::string& s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    trim(key);
    trim(value);
    pairs.emplace_back(std::move(key), std::move(value));
  }
  return pairs;
}

std::string kv_lookup(const KvPairs& pairs, const std::string& key) {
  for (const auto& [k, v] : pairs) {
    if (k == key) return v;
  }
  throw std::runtime_error("kv_lookup: missing key " + key);
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("file_hash_hex: cannot open " + path);
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[65536];
  while (in) {
    in.read(buffer, sizeof buffer);
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  KvPairs pairs;
  pairs.emplace_back("command", manifest.command);
  pairs.emplace_back("artifact_version", manifest.artifact_version);
  for (std::size_t i = 0; i < manifest.args.size(); ++i) {
    pairs.emplace_back("arg." + std::to_string(i), manifest.args[i]);
  }
  for (const auto& [k, v] : manifest.parameters) pairs.emplace_back("param." + k, v);
  for (const auto& [k, v] : manifest.input_hashes) pairs.emplace_back("hash." + k, v);
  for (const auto& [k, v] : manifest.wall_clock) pairs.emplace_back("wall." + k, v);
  write_kv_file(pairs, path);
}

RunManifest read_manifest(const std::string& path) {
  RunManifest manifest;
  std::vector<std::pair<std::size_t, std::string>> args;
  for (const auto& [key, value] : read_kv_file(path)) {
    if (key == "command") {
      manifest.command = value;
    } else if (key == "artifact_version") {
      manifest.artifact_version = value;
    } else if (key.starts_with("arg.")) {
      args.emplace_back(std::stoul(key.substr(4)), value);
    } else if (key.starts_with("param.")) {
      manifest.parameters.emplace_back(key.substr(6), value);
    } else if (key.starts_with("hash.")) {
      manifest.input_hashes.emplace_back(key.substr(5), value);
    } else if (key.starts_with("wall.")) {
      manifest.wall_clock.emplace_back(key.substr(5), value);
    }
  }
  std::sort(args.begin(), args.end());
  for (auto& [idx, value] : args) manifest.args.push_back(std::move(value));
  return manifest;
}

}  // namespace hu
