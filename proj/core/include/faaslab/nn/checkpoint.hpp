#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "faaslab/nn/params.hpp"

namespace faaslab::nn {

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
};

struct CheckpointManifest {
  std::uint32_t version = 0;
  std::string kind;  // architecture tag, e.g. "rppo"
  std::vector<TensorInfo> tensors;
};

// Layout: magic "FSLBCKPT", u32 format version, kind string, tensor manifest
// (name + shape per tensor), then row-major little-endian f64 blocks in manifest
// order, then a trailing fnv1a-64 checksum over every preceding byte.
void save_checkpoint(const std::filesystem::path& path, const std::string& kind,
                     const ParamSet& params);

// Verifies checksum, kind, and per-tensor name/shape before writing any value.
// Throws TrainingError naming the first differing tensor on architecture mismatch.
void load_checkpoint(const std::filesystem::path& path, const std::string& kind,
                     const ParamSet& params);

CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& path);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace faaslab::nn
