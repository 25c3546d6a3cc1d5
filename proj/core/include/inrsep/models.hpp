#pragma once

#include "inrsep/grid.hpp"
#include "inrsep/signal_model.hpp"
#include "inrsep/siren.hpp"

namespace inrsep::models {

// Number of cells in a (2r+1)^d window.
std::size_t window_size(std::size_t r, std::size_t d);

// KernelNet (kernel INR): a SIREN subnet with ReLU output feeding a
// Linear -> ReLU -> Linear -> Softmax head whose width is the kernel window
// (2r+1)^d. Conditioning is on the center coordinate only; the offset
// dependence lives in the output head.
struct KernelNetSpec {
  SirenSpec subnet;          // input d -> hidden -> subnet_width, ReLU final
  std::size_t head_hidden = 128;
  std::size_t window = 625;  // (2r+1)^d

  void validate() const;
  std::size_t parameter_count() const;
};

struct KernelNetParams {
  SirenParams subnet;
  ad::Tensor head_w1, head_b1;  // subnet_width -> head_hidden
  ad::Tensor head_w2, head_b2;  // head_hidden -> window

  std::vector<ad::Tensor*> tensors();
  std::vector<const ad::Tensor*> tensors() const;
};

KernelNetParams kernel_net_init(const KernelNetSpec& spec, Rng& rng);

struct KernelNetNodes {
  SirenNodes subnet;
  ad::NodeId head_w1, head_b1, head_w2, head_b2;
};

KernelNetNodes kernel_net_register(ad::Graph& g, const KernelNetParams& params);
ad::NodeId kernel_net_forward(ad::Graph& g, const KernelNetSpec& spec,
                              const KernelNetNodes& nodes, ad::NodeId coords);

// A materialized spatially-varying kernel: one simplex weight vector of
// length (2r+1)^d per grid cell, offsets enumerated lexicographically
// (-r..r per axis).
struct KernelField {
  std::size_t r = 1;
  std::size_t d = 2;
  std::vector<std::size_t> shape;    // underlying grid extents
  std::vector<double> weights;       // [cells, (2r+1)^d] row-major

  std::size_t window() const { return window_size(r, d); }
  std::span<const double> at(std::size_t flat_cell) const {
    return {weights.data() + flat_cell * window(), window()};
  }
};

// The trained state of the dual-INR separation: both networks, the signal
// model, the hyperparameters, and the data grid geometry (which fixes the
// [-1,1] coordinate normalization).
struct ModelBundle {
  KernelNetSpec kernel_spec;
  KernelNetParams kernel_params;
  SirenSpec bkgd_spec;
  SirenParams bkgd_params;
  SignalModel signal;
  std::size_t r = 2;
  std::size_t d = 2;
  double lambda = 0.005;
  std::vector<std::size_t> grid_shape;
  std::vector<Axis> grid_axes;

  Grid make_geometry() const { return Grid(grid_shape, grid_axes); }
  std::vector<ad::Tensor*> trainable_tensors();
};

// Normalized coordinates of a batch of grid nodes (flat indices) as a
// [B, d] tensor.
ad::Tensor normalized_coords(const Grid& geometry, std::span<const std::size_t> flat_cells);

// Inference-mode evaluation of the two networks on normalized coordinates.
ad::Tensor kernel_net_eval(const ModelBundle& bundle, const ad::Tensor& norm_coords);
ad::Tensor bkgd_net_eval(const ModelBundle& bundle, const ad::Tensor& norm_coords);

// Intensities of the signal model at a batch of physical coordinates
// ([B, d] rows).
ad::Tensor signal_model_eval(const SignalModel& model, const ad::Tensor& phys_coords);

}  // namespace inrsep::models
