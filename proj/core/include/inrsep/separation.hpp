#pragma once

#include <functional>
#include <optional>

#include "inrsep/adam.hpp"
#include "inrsep/models.hpp"

namespace inrsep::engine {

enum class Transform : std::uint8_t { kIdentity = 0, kLog1p = 1 };
enum class LossKind : std::uint8_t { kMseMean = 0, kL2Norm = 1 };

struct TrainConfig {
  std::size_t r = 2;
  double lambda = 0.005;
  std::size_t epochs = 200;
  std::size_t batch_size = 512;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  Transform transform = Transform::kIdentity;
  LossKind loss_kind = LossKind::kMseMean;

  // Architecture knobs (widths/depths are artifact defaults, configurable).
  std::size_t kernel_hidden_width = 128;
  std::size_t kernel_hidden_depth = 3;
  std::size_t kernel_head_hidden = 128;
  std::size_t bkgd_hidden_width = 128;
  double w0 = 30.0;

  void validate() const;
};

// Output of a separation run. total == signal + background elementwise by
// construction; all three grids share the observed grid's geometry.
struct SeparationResult {
  Grid total;
  Grid signal;      // convolved component
  Grid background;
  std::vector<double> loss_trace;  // one entry per epoch
  models::ModelBundle bundle;
};

// Physical coordinates (and in-grid flags) of the (2r+1)^d window around a
// grid node, offsets enumerated lexicographically from (-r,..,-r) to
// (r,..,r). Coordinates of out-of-grid offsets are linear extrapolations of
// the axis spacing; their flag is false and their signal contribution is
// zero by the zero-extension rule.
struct NeighborSet {
  std::size_t window = 0;
  std::vector<double> coords;    // [window, d] row-major
  std::vector<bool> in_grid;     // [window]
};

NeighborSet gather_neighbors(const Grid& geometry, std::span<const std::size_t> center_index,
                             std::size_t r);

// Inner product of a kernel weight vector with a window of signal values.
double convolve_signal(std::span<const double> kernel_weights,
                       std::span<const double> s_sim_values);

// Signal-model values on the grid, zero-padded by r cells per side, so a
// window gather is a contiguous indexed read. Layout is row-major over the
// padded extents.
struct PaddedSignal {
  std::size_t r = 0;
  std::vector<std::size_t> padded_shape;
  std::vector<double> values;

  // Window values (lexicographic offsets) for the cell at grid index `idx`.
  void gather(std::span<const std::size_t> idx, std::span<double> out) const;
};

PaddedSignal precompute_signal_windows(const models::SignalModel& model, const Grid& geometry,
                                       std::size_t r);

struct Prediction {
  Grid total;
  Grid signal;
  Grid background;
};

// Materializes the three component grids over the geometry of `geometry`.
// total is signal + background exactly.
Prediction predict(const models::ModelBundle& bundle, const Grid& geometry);

// Test hook: same as predict but with the kernel weights supplied by a
// callback instead of KernelNet (e.g. a delta kernel).
using KernelProvider =
    std::function<void(std::size_t flat_cell, std::span<double> weights_out)>;
Prediction predict_with_kernel(const models::ModelBundle& bundle, const Grid& geometry,
                               const KernelProvider& kernel);

// Training loss on flat vectors. mse_mean: mean((pred-obs)^2) +
// lambda*mean(bkgd^2). l2_norm: ||pred-obs||_2 + lambda*||bkgd||_2.
double loss_value(std::span<const double> pred_total, std::span<const double> observed,
                  std::span<const double> bkgd_values, double lambda, LossKind kind);

// Joint training of KernelNet and BkgdNet per the dual-INR procedure:
// batched center sampling without replacement, kernel-signal convolution
// with zero extension, additive background, Adam steps on the regularized
// reconstruction loss, then a full-grid predict.
SeparationResult train(const Grid& observed, const models::SignalModel& signal_model,
                       const TrainConfig& config);

// Initial (untrained) bundle for the given data geometry; exposed for
// checkpoint tooling and tests.
models::ModelBundle make_bundle(const Grid& geometry, const models::SignalModel& signal_model,
                                const TrainConfig& config, Rng& rng);

}  // namespace inrsep::engine
