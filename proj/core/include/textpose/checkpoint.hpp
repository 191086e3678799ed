#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textpose/nn/layers.hpp"
#include "textpose/nn/tensor.hpp"

namespace textpose {

// On-disk snapshot of one trained network. Values are stored as 32-bit
// floats in a framed little-endian binary layout with begin/end magics so
// truncated or padded files are rejected instead of half-loaded.
struct CheckpointBlock {
  std::string name;
  nn::Shape dims;
  std::vector<float> data;
};

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::string stage_tag;    // "t2p", "refiner", or "render"
  std::string config_echo;  // human-readable settings the run used
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;
  std::vector<CheckpointBlock> blocks;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Throws StageMismatchError when the file holds a different stage.
Checkpoint load_checkpoint_for_stage(const std::string& path, const std::string& stage_tag);

// Snapshot every entry of a parameter set, in registration order.
Checkpoint snapshot_params(const nn::ParamSet& params, const std::string& stage_tag,
                           const std::string& config_echo, std::uint64_t iteration, std::uint64_t seed);

// Restore block values into an identically structured parameter set.
// Blocks are matched by name and shape; any mismatch throws.
void restore_params(const Checkpoint& ck, nn::ParamSet& params);

}  // namespace textpose
