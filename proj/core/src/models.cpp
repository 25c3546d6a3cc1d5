#include "inrsep/models.hpp"

#include <cmath>

namespace inrsep::models {

std::size_t window_size(std::size_t r, std::size_t d) {
  std::size_t w = 1;
  for (std::size_t a = 0; a < d; ++a) w *= 2 * r + 1;
  return w;
}

void KernelNetSpec::validate() const {
  subnet.validate();
  if (subnet.final_activation != FinalActivation::kRelu) {
    throw DataError("KernelNetSpec: subnet must end in ReLU");
  }
  if (head_hidden == 0 || window == 0) throw DataError("KernelNetSpec: zero head width");
}

std::size_t KernelNetSpec::parameter_count() const {
  return subnet.parameter_count() + subnet.output_dim * head_hidden + head_hidden +
         head_hidden * window + window;
}

std::vector<ad::Tensor*> KernelNetParams::tensors() {
  std::vector<ad::Tensor*> out = subnet.tensors();
  out.push_back(&head_w1);
  out.push_back(&head_b1);
  out.push_back(&head_w2);
  out.push_back(&head_b2);
  return out;
}

std::vector<const ad::Tensor*> KernelNetParams::tensors() const {
  std::vector<const ad::Tensor*> out = subnet.tensors();
  out.push_back(&head_w1);
  out.push_back(&head_b1);
  out.push_back(&head_w2);
  out.push_back(&head_b2);
  return out;
}

namespace {

// Xavier-uniform for the plain linear head layers.
ad::Tensor xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  ad::Tensor t = ad::Tensor::zeros({fan_in, fan_out});
  for (double& x : t.v) x = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

KernelNetParams kernel_net_init(const KernelNetSpec& spec, Rng& rng) {
  spec.validate();
  KernelNetParams p;
  p.subnet = siren_init(spec.subnet, rng);
  p.head_w1 = xavier(spec.subnet.output_dim, spec.head_hidden, rng);
  p.head_b1 = ad::Tensor::zeros({1, spec.head_hidden});
  p.head_w2 = xavier(spec.head_hidden, spec.window, rng);
  p.head_b2 = ad::Tensor::zeros({1, spec.window});
  return p;
}

KernelNetNodes kernel_net_register(ad::Graph& g, const KernelNetParams& params) {
  KernelNetNodes nodes;
  nodes.subnet = siren_register(g, params.subnet);
  nodes.head_w1 = g.param(params.head_w1);
  nodes.head_b1 = g.param(params.head_b1);
  nodes.head_w2 = g.param(params.head_w2);
  nodes.head_b2 = g.param(params.head_b2);
  return nodes;
}

ad::NodeId kernel_net_forward(ad::Graph& g, const KernelNetSpec& spec,
                              const KernelNetNodes& nodes, ad::NodeId coords) {
  spec.validate();
  ad::NodeId h = siren_forward(g, spec.subnet, nodes.subnet, coords);
  h = g.relu(g.affine(h, nodes.head_w1, nodes.head_b1));
  h = g.affine(h, nodes.head_w2, nodes.head_b2);
  return g.softmax(h);
}

std::vector<ad::Tensor*> ModelBundle::trainable_tensors() {
  std::vector<ad::Tensor*> out = kernel_params.tensors();
  for (ad::Tensor* t : bkgd_params.tensors()) out.push_back(t);
  return out;
}

ad::Tensor normalized_coords(const Grid& geometry, std::span<const std::size_t> flat_cells) {
  const std::size_t d = geometry.ndim();
  ad::Tensor out = ad::Tensor::zeros({flat_cells.size(), d});
  for (std::size_t i = 0; i < flat_cells.size(); ++i) {
    const auto idx = geometry.unflatten(flat_cells[i]);
    for (std::size_t a = 0; a < d; ++a) {
      out.v[i * d + a] = geometry.normalized(a, geometry.coord(a, idx[a]));
    }
  }
  return out;
}

ad::Tensor kernel_net_eval(const ModelBundle& bundle, const ad::Tensor& norm_coords) {
  ad::Graph g;
  const ad::NodeId x = g.input(norm_coords);
  const KernelNetNodes nodes = kernel_net_register(g, bundle.kernel_params);
  return g.value(kernel_net_forward(g, bundle.kernel_spec, nodes, x));
}

ad::Tensor bkgd_net_eval(const ModelBundle& bundle, const ad::Tensor& norm_coords) {
  return siren_eval(bundle.bkgd_spec, bundle.bkgd_params, norm_coords);
}

ad::Tensor signal_model_eval(const SignalModel& model, const ad::Tensor& phys_coords) {
  const std::size_t B = phys_coords.rows();
  const std::size_t d = phys_coords.cols();
  ad::Tensor out = ad::Tensor::zeros({B, 1});
  for (std::size_t i = 0; i < B; ++i) {
    out.v[i] = model.eval({&phys_coords.v[i * d], d});
  }
  return out;
}

}  // namespace inrsep::models
