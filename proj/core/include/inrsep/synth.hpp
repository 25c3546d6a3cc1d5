#pragma once

#include "inrsep/models.hpp"

namespace inrsep::synth {

enum class TrueKernelKind : std::uint8_t { kDelta = 0, kAnisoGaussian = 1 };

// Smooth random background field: offset + sum of `modes` low-frequency
// cosine modes with seeded frequencies, phases and amplitudes, shifted so
// the field minimum sits at `offset` (nonnegative by construction).
struct BackgroundSpec {
  std::size_t modes = 4;
  double amplitude = 1.0;
  double offset = 0.5;
  double max_frequency = 1.5;  // cycles across the domain
};

struct NoiseSpec {
  enum class Kind : std::uint8_t { kNone = 0, kPoisson = 1 };
  Kind kind = Kind::kNone;
  double scale = 50.0;  // counts per intensity unit
};

struct SynthConfig {
  std::vector<std::size_t> shape{64, 64};
  std::vector<Axis> axes{{"H", -2.0, 2.0}, {"omega", 0.0, 100.0}};
  models::AnalyticSignalParams signal{};
  TrueKernelKind kernel_kind = TrueKernelKind::kAnisoGaussian;
  std::size_t r_true = 2;
  // Per-axis standard deviations of the anisotropic Gaussian kernel, in
  // cells. The principal axes rotate across the domain (angle driven by the
  // first normalized coordinate), which makes the kernel spatially varying.
  std::vector<double> kernel_sigmas{0.6, 1.4};
  BackgroundSpec background{};
  NoiseSpec noise{};
  std::uint64_t seed = 1;

  void validate() const;
};

// Ground-truth decomposition: observed == true_signal + true_background +
// true_noise (noise identically zero when noise.kind == kNone).
struct SynthBundle {
  Grid observed;
  Grid true_signal;
  Grid true_background;
  Grid true_noise;
  models::KernelField true_kernel;
  SynthConfig config;
};

// Materializes the spatially varying simplex kernel field used to build the
// true signal component.
models::KernelField materialize_kernel_field(const SynthConfig& config, const Grid& geometry);

SynthBundle generate(const SynthConfig& config);

// Per-cell noisy = Poisson(scale * clean) / scale; returns (noisy, noise)
// with noise = noisy - clean.
std::pair<Grid, Grid> poissonize(const Grid& clean, double scale, std::uint64_t seed);

}  // namespace inrsep::synth
