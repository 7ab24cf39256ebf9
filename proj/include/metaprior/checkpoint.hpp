#pragma once

#include <cstdint>
#include <filesystem>

#include "metaprior/nn.hpp"

namespace metaprior {

// Versioned binary container for a trained weight vector. All integers
// and the 64-bit float payload are stored little-endian; the header
// carries explicit endianness and precision markers so the file is
// portable bit-for-bit.
struct Checkpoint {
  static constexpr std::uint8_t kFormatVersion = 1;

  Layout layout;
  Vector weights;
  std::uint64_t iterations_completed = 0;
  std::uint64_t seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws CheckpointError on unreadable files, bad magic/version, unknown
// activation tags, or a weight count that disagrees with the layout.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace metaprior
