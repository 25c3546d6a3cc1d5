#pragma once

#include <cstdint>
#include <vector>

#include "inrsep/graph.hpp"
#include "inrsep/rng.hpp"

namespace inrsep::models {

enum class FinalActivation : std::uint8_t { kNone = 0, kRelu = 1, kSoftmax = 2 };

// Coordinate MLP with sine activations. Layer k maps hidden_dims[k-1] ->
// hidden_dims[k] through Linear -> sin; only the first layer's preactivation
// is scaled by w0_first. A final linear head maps the last hidden width to
// output_dim, followed by the optional final activation.
struct SirenSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims{128};
  std::size_t output_dim = 1;
  double w0_first = 30.0;
  FinalActivation final_activation = FinalActivation::kNone;

  void validate() const;
  // Hidden layers plus the final linear head.
  std::size_t layer_count() const { return hidden_dims.size() + 1; }
  std::size_t parameter_count() const;
};

// weights[k] is [fan_in, fan_out]; biases[k] is [1, fan_out]. The last entry
// is the final linear head.
struct SirenParams {
  std::vector<ad::Tensor> weights;
  std::vector<ad::Tensor> biases;

  std::vector<ad::Tensor*> tensors();
  std::vector<const ad::Tensor*> tensors() const;
};

// SIREN initialization: first layer uniform in [-1/fan_in, 1/fan_in], all
// later layers (final head included) uniform in [-sqrt(6/fan_in)/w0,
// sqrt(6/fan_in)/w0]. Biases share their layer's bounds.
SirenParams siren_init(const SirenSpec& spec, Rng& rng);

// Registered node ids for one siren's parameters inside a graph step.
struct SirenNodes {
  std::vector<ad::NodeId> weights;
  std::vector<ad::NodeId> biases;
};

SirenNodes siren_register(ad::Graph& g, const SirenParams& params);

// Forward through the tape. coords must already be normalized to [-1,1]^d.
ad::NodeId siren_forward(ad::Graph& g, const SirenSpec& spec, const SirenNodes& nodes,
                         ad::NodeId coords);

// Convenience inference: runs a scratch graph. There is exactly one forward
// arithmetic path; this is it.
ad::Tensor siren_eval(const SirenSpec& spec, const SirenParams& params, const ad::Tensor& coords);

}  // namespace inrsep::models
