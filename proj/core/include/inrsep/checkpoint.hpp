#pragma once

#include <filesystem>

#include "inrsep/separation.hpp"

namespace inrsep::io {

// INRC binary checkpoint, little-endian:
//
//   bytes 0..3  magic "INRC"
//   u16         version (currently 1)
//   u32 r, f64 lambda, u64 seed, u8 transform, u8 loss_kind   (config echo)
//   u16 d
//   u16 ndim; per axis: u64 extent, f64 lo, f64 hi, u16 label_len, label
//   u64 kernel_net_bytes, u64 bkgd_net_bytes, u64 signal_model_bytes
//   [kernel net section] [bkgd net section] [signal model section]
//
// Each network section is its spec followed by its parameter tensors as raw
// f64 payloads; the header byte counts must equal the actual section sizes.
// Loading a saved bundle reproduces predictions bitwise.

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct CheckpointSizes {
  std::uint64_t kernel_net = 0;
  std::uint64_t bkgd_net = 0;
  std::uint64_t signal_model = 0;
  std::uint64_t total() const { return kernel_net + bkgd_net + signal_model; }
};

struct CheckpointEcho {
  std::size_t r = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  engine::Transform transform = engine::Transform::kIdentity;
  engine::LossKind loss_kind = engine::LossKind::kMseMean;
};

struct Checkpoint {
  models::ModelBundle bundle;
  CheckpointEcho echo;
  CheckpointSizes sizes;
};

CheckpointSizes save_checkpoint(const models::ModelBundle& bundle, const CheckpointEcho& echo,
                                const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Section sizes without touching the filesystem (used by the compression
// report and its tests).
CheckpointSizes checkpoint_sizes(const models::ModelBundle& bundle);

}  // namespace inrsep::io
