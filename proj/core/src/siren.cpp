#include "inrsep/siren.hpp"

#include <cmath>

namespace inrsep::models {

void SirenSpec::validate() const {
  if (input_dim < 1) throw DataError("SirenSpec: input_dim must be >= 1");
  if (hidden_dims.empty()) throw DataError("SirenSpec: hidden_dims must be nonempty");
  if (output_dim < 1) throw DataError("SirenSpec: output_dim must be >= 1");
  if (!(w0_first > 0.0)) throw DataError("SirenSpec: w0_first must be positive");
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw DataError("SirenSpec: zero hidden width");
  }
}

std::size_t SirenSpec::parameter_count() const {
  std::size_t n = 0;
  std::size_t fan_in = input_dim;
  for (std::size_t h : hidden_dims) {
    n += fan_in * h + h;
    fan_in = h;
  }
  n += fan_in * output_dim + output_dim;
  return n;
}

std::vector<ad::Tensor*> SirenParams::tensors() {
  std::vector<ad::Tensor*> out;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.push_back(&weights[k]);
    out.push_back(&biases[k]);
  }
  return out;
}

std::vector<const ad::Tensor*> SirenParams::tensors() const {
  std::vector<const ad::Tensor*> out;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.push_back(&weights[k]);
    out.push_back(&biases[k]);
  }
  return out;
}

SirenParams siren_init(const SirenSpec& spec, Rng& rng) {
  spec.validate();
  SirenParams p;
  std::size_t fan_in = spec.input_dim;
  std::vector<std::size_t> fan_out(spec.hidden_dims);
  fan_out.push_back(spec.output_dim);
  for (std::size_t k = 0; k < fan_out.size(); ++k) {
    const double bound = k == 0
                             ? 1.0 / static_cast<double>(fan_in)
                             : std::sqrt(6.0 / static_cast<double>(fan_in)) / spec.w0_first;
    ad::Tensor w = ad::Tensor::zeros({fan_in, fan_out[k]});
    for (double& x : w.v) x = rng.uniform(-bound, bound);
    ad::Tensor b = ad::Tensor::zeros({1, fan_out[k]});
    for (double& x : b.v) x = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
    fan_in = fan_out[k];
  }
  return p;
}

SirenNodes siren_register(ad::Graph& g, const SirenParams& params) {
  SirenNodes nodes;
  for (std::size_t k = 0; k < params.weights.size(); ++k) {
    nodes.weights.push_back(g.param(params.weights[k]));
    nodes.biases.push_back(g.param(params.biases[k]));
  }
  return nodes;
}

ad::NodeId siren_forward(ad::Graph& g, const SirenSpec& spec, const SirenNodes& nodes,
                         ad::NodeId coords) {
  spec.validate();
  if (nodes.weights.size() != spec.layer_count()) {
    throw ShapeError("siren_forward: parameter/layer count mismatch");
  }
  ad::NodeId h = coords;
  for (std::size_t k = 0; k < spec.hidden_dims.size(); ++k) {
    h = g.affine(h, nodes.weights[k], nodes.biases[k]);
    h = g.sine(h, k == 0 ? spec.w0_first : 1.0);
  }
  h = g.affine(h, nodes.weights.back(), nodes.biases.back());
  switch (spec.final_activation) {
    case FinalActivation::kNone:
      break;
    case FinalActivation::kRelu:
      h = g.relu(h);
      break;
    case FinalActivation::kSoftmax:
      h = g.softmax(h);
      break;
  }
  return h;
}

ad::Tensor siren_eval(const SirenSpec& spec, const SirenParams& params, const ad::Tensor& coords) {
  ad::Graph g;
  const ad::NodeId x = g.input(coords);
  const SirenNodes nodes = siren_register(g, params);
  const ad::NodeId y = siren_forward(g, spec, nodes, x);
  return g.value(y);
}

}  // namespace inrsep::models
