#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracular/cvrnn.hpp"
#include "oracular/training.hpp"

namespace oracular::cvrnn {

enum class CheckpointErrc { kBadMagic, kUnsupportedVersion, kTruncated, kShapeMismatch, kBadHeader, kIo };

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(CheckpointErrc code, const std::string& what);
  CheckpointErrc code() const noexcept { return code_; }

 private:
  CheckpointErrc code_;
};

struct Checkpoint {
  CvrnnParams params;
  TrainingConfig config;
};

// Layout (little-endian):
//   "ORCVRNN\0"  u32 version  u64 header_len  header JSON (architecture, config)
//   u32 tensor_count, then per tensor:
//   u32 name_len  name  u32 rank  u64 dims[rank]  f64 values[prod(dims)]
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
/// Tensors must match the architecture in the header by name, order and shape.
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace oracular::cvrnn
