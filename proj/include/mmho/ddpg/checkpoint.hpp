#pragma once

// Policy checkpoint container:
//   bytes 0..7   magic "MMHOCKPT"
//   u32          format version
//   u64          header length in bytes
//   header       JSON: nets (name, side input, layer shapes and activations),
//                rng seed, training episode count, free-form metadata
//   payload      per net, per layer: weight (row-major) then bias, as
//                little-endian IEEE-754 doubles
// Parameters round-trip bit-exactly. Writes go to a temporary file that is
// renamed into place.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "mmho/ddpg/net.hpp"

namespace mmho::ddpg {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct PolicyCheckpoint {
  DenseNet actor;
  DenseNet critic;
  DenseNet actor_target;
  DenseNet critic_target;
  std::uint64_t rng_seed = 0;
  int training_episodes = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

void save_checkpoint(const PolicyCheckpoint& ckpt, const std::filesystem::path& path);

/// Throws std::runtime_error on a missing, truncated, or foreign file.
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Writes `contents` to path via temp-file-then-rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace mmho::ddpg
