#include "inrsep/separation.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace inrsep::engine {

void TrainConfig::validate() const {
  if (r < 1) throw DataError("TrainConfig: r must be >= 1");
  if (lambda < 0.0) throw DataError("TrainConfig: lambda must be >= 0");
  if (batch_size < 1) throw DataError("TrainConfig: batch_size must be >= 1");
  if (lr < 0.0) throw DataError("TrainConfig: lr must be >= 0");
  if (kernel_hidden_depth < 1 || kernel_hidden_width < 1 || bkgd_hidden_width < 1 ||
      kernel_head_hidden < 1) {
    throw DataError("TrainConfig: network widths must be >= 1");
  }
}

NeighborSet gather_neighbors(const Grid& geometry, std::span<const std::size_t> center_index,
                             std::size_t r) {
  const std::size_t d = geometry.ndim();
  if (center_index.size() != d) throw ShapeError("gather_neighbors: index rank mismatch");
  for (std::size_t a = 0; a < d; ++a) {
    if (center_index[a] >= geometry.shape()[a]) {
      throw ShapeError("gather_neighbors: center out of bounds");
    }
    if (2 * r + 1 > 2 * geometry.shape()[a]) {
      throw DataError("gather_neighbors: window exceeds twice the grid extent");
    }
  }

  NeighborSet out;
  out.window = models::window_size(r, d);
  out.coords.resize(out.window * d);
  out.in_grid.assign(out.window, true);

  const std::size_t side = 2 * r + 1;
  const long rl = static_cast<long>(r);
  std::vector<long> offset(d, -rl);
  for (std::size_t w = 0; w < out.window; ++w) {
    bool inside = true;
    for (std::size_t a = 0; a < d; ++a) {
      const long j = static_cast<long>(center_index[a]) + offset[a];
      inside = inside && j >= 0 && j < static_cast<long>(geometry.shape()[a]);
      // Physical coordinate, extrapolated with the axis step when outside.
      out.coords[w * d + a] =
          geometry.coord(a, center_index[a]) + static_cast<double>(offset[a]) * geometry.step(a);
    }
    out.in_grid[w] = inside;
    // Advance lexicographic offset counter (last axis fastest).
    for (std::size_t a = d; a-- > 0;) {
      if (++offset[a] <= rl) break;
      offset[a] = -rl;
    }
  }
  (void)side;
  return out;
}

double convolve_signal(std::span<const double> kernel_weights,
                       std::span<const double> s_sim_values) {
  if (kernel_weights.size() != s_sim_values.size()) {
    throw ShapeError("convolve_signal: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < kernel_weights.size(); ++i) {
    acc += kernel_weights[i] * s_sim_values[i];
  }
  return acc;
}

void PaddedSignal::gather(std::span<const std::size_t> idx, std::span<double> out) const {
  const std::size_t d = padded_shape.size();
  const std::size_t side = 2 * r + 1;
  // Strides of the padded array.
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t a = d - 1; a-- > 0;) stride[a] = stride[a + 1] * padded_shape[a + 1];

  std::vector<std::size_t> off(d, 0);
  std::size_t base = 0;
  for (std::size_t a = 0; a < d; ++a) base += idx[a] * stride[a];  // idx + r - r
  for (std::size_t w = 0; w < out.size(); ++w) {
    std::size_t p = base;
    for (std::size_t a = 0; a < d; ++a) p += off[a] * stride[a];
    out[w] = values[p];
    for (std::size_t a = d; a-- > 0;) {
      if (++off[a] < side) break;
      off[a] = 0;
    }
  }
}

PaddedSignal precompute_signal_windows(const models::SignalModel& model, const Grid& geometry,
                                       std::size_t r) {
  const std::size_t d = geometry.ndim();
  PaddedSignal ps;
  ps.r = r;
  ps.padded_shape.resize(d);
  std::size_t padded_size = 1;
  for (std::size_t a = 0; a < d; ++a) {
    ps.padded_shape[a] = geometry.shape()[a] + 2 * r;
    padded_size *= ps.padded_shape[a];
  }
  ps.values.assign(padded_size, 0.0);

  std::vector<std::size_t> stride(d, 1);
  for (std::size_t a = d - 1; a-- > 0;) stride[a] = stride[a + 1] * ps.padded_shape[a + 1];

  std::vector<double> coords(d);
  for (std::size_t flat = 0; flat < geometry.size(); ++flat) {
    const auto idx = geometry.unflatten(flat);
    std::size_t p = 0;
    for (std::size_t a = 0; a < d; ++a) {
      p += (idx[a] + r) * stride[a];
      coords[a] = geometry.coord(a, idx[a]);
    }
    ps.values[p] = model.eval(coords);
  }
  return ps;
}

namespace {

Prediction predict_impl(const models::ModelBundle& bundle, const Grid& geometry,
                        const KernelProvider* kernel_override) {
  if (geometry.ndim() != bundle.d) throw ShapeError("predict: geometry rank mismatch");
  const std::size_t cells = geometry.size();
  const std::size_t window = models::window_size(bundle.r, bundle.d);

  Prediction out{Grid::like(geometry), Grid::like(geometry), Grid::like(geometry)};
  const PaddedSignal padded = precompute_signal_windows(bundle.signal, geometry, bundle.r);

  const std::size_t chunk = 4096;
  std::vector<std::size_t> cells_buf;
  std::vector<double> weights(window);
  std::vector<double> window_buf(window);
  for (std::size_t begin = 0; begin < cells; begin += chunk) {
    const std::size_t end = std::min(cells, begin + chunk);
    cells_buf.resize(end - begin);
    std::iota(cells_buf.begin(), cells_buf.end(), begin);

    const ad::Tensor norm = models::normalized_coords(geometry, cells_buf);
    const ad::Tensor bkgd = models::bkgd_net_eval(bundle, norm);
    ad::Tensor kappa;
    if (kernel_override == nullptr) kappa = models::kernel_net_eval(bundle, norm);

    for (std::size_t i = 0; i < cells_buf.size(); ++i) {
      const std::size_t flat = cells_buf[i];
      const auto idx = geometry.unflatten(flat);
      padded.gather(idx, window_buf);
      std::span<const double> kw;
      if (kernel_override != nullptr) {
        (*kernel_override)(flat, weights);
        kw = weights;
      } else {
        kw = {&kappa.v[i * window], window};
      }
      const double s1 = convolve_signal(kw, window_buf);
      const double s2 = bkgd.v[i];
      out.signal[flat] = s1;
      out.background[flat] = s2;
      out.total[flat] = s1 + s2;
    }
  }
  return out;
}

}  // namespace

Prediction predict(const models::ModelBundle& bundle, const Grid& geometry) {
  return predict_impl(bundle, geometry, nullptr);
}

Prediction predict_with_kernel(const models::ModelBundle& bundle, const Grid& geometry,
                               const KernelProvider& kernel) {
  return predict_impl(bundle, geometry, &kernel);
}

double loss_value(std::span<const double> pred_total, std::span<const double> observed,
                  std::span<const double> bkgd_values, double lambda, LossKind kind) {
  if (pred_total.size() != observed.size()) throw ShapeError("loss: length mismatch");
  if (lambda < 0.0) throw DataError("loss: lambda must be >= 0");
  const std::size_t n = pred_total.size();
  const std::size_t m = bkgd_values.size();
  if (n == 0 || m == 0) throw DataError("loss: empty input");
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dlt = pred_total[i] - observed[i];
    resid += dlt * dlt;
  }
  double bkg = 0.0;
  for (double b : bkgd_values) bkg += b * b;
  if (kind == LossKind::kMseMean) {
    return resid / static_cast<double>(n) + lambda * bkg / static_cast<double>(m);
  }
  return std::sqrt(resid) + lambda * std::sqrt(bkg);
}

models::ModelBundle make_bundle(const Grid& geometry, const models::SignalModel& signal_model,
                                const TrainConfig& config, Rng& rng) {
  config.validate();
  const std::size_t d = geometry.ndim();
  models::ModelBundle b;
  b.r = config.r;
  b.d = d;
  b.lambda = config.lambda;
  b.grid_shape = geometry.shape();
  b.grid_axes = geometry.axes();
  b.signal = signal_model;

  b.kernel_spec.subnet.input_dim = d;
  b.kernel_spec.subnet.hidden_dims.assign(config.kernel_hidden_depth, config.kernel_hidden_width);
  b.kernel_spec.subnet.output_dim = config.kernel_hidden_width;
  b.kernel_spec.subnet.w0_first = config.w0;
  b.kernel_spec.subnet.final_activation = models::FinalActivation::kRelu;
  b.kernel_spec.head_hidden = config.kernel_head_hidden;
  b.kernel_spec.window = models::window_size(config.r, d);
  b.kernel_params = models::kernel_net_init(b.kernel_spec, rng);

  b.bkgd_spec.input_dim = d;
  b.bkgd_spec.hidden_dims = {config.bkgd_hidden_width};
  b.bkgd_spec.output_dim = 1;
  b.bkgd_spec.w0_first = config.w0;
  b.bkgd_spec.final_activation = models::FinalActivation::kRelu;
  b.bkgd_params = models::siren_init(b.bkgd_spec, rng);
  return b;
}

SeparationResult train(const Grid& observed, const models::SignalModel& signal_model,
                       const TrainConfig& config) {
  config.validate();
  if (observed.size() == 0) throw DataError("train: empty grid");
  for (double v : observed.values()) {
    if (!std::isfinite(v)) throw DataError("train: observed grid contains non-finite values");
  }

  Rng rng(config.seed);
  models::ModelBundle bundle = make_bundle(observed, signal_model, config, rng);
  const std::size_t cells = observed.size();
  const std::size_t window = bundle.kernel_spec.window;
  const std::size_t d = bundle.d;

  const PaddedSignal padded = precompute_signal_windows(signal_model, observed, config.r);

  std::vector<ad::Tensor*> params = bundle.trainable_tensors();
  ad::Adam adam({.lr = config.lr});

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});

  const bool log_space = config.transform == Transform::kLog1p;
  std::vector<double> trace;
  trace.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    try {
      for (std::size_t begin = 0; begin < cells; begin += config.batch_size) {
        const std::size_t end = std::min(cells, begin + config.batch_size);
        const std::size_t B = end - begin;
        const std::span<const std::size_t> batch(order.data() + begin, B);

        ad::Tensor norm = models::normalized_coords(observed, batch);
        ad::Tensor windows = ad::Tensor::zeros({B, window});
        ad::Tensor obs = ad::Tensor::zeros({B, 1});
        for (std::size_t i = 0; i < B; ++i) {
          const auto idx = observed.unflatten(batch[i]);
          padded.gather(idx, {&windows.v[i * window], window});
          const double o = observed[batch[i]];
          obs.v[i] = log_space ? std::log1p(o) : o;
        }

        ad::Graph g;
        const ad::NodeId x = g.input(std::move(norm));
        const models::KernelNetNodes knodes = models::kernel_net_register(g, bundle.kernel_params);
        const models::SirenNodes bnodes = models::siren_register(g, bundle.bkgd_params);

        const ad::NodeId kappa = models::kernel_net_forward(g, bundle.kernel_spec, knodes, x);
        const ad::NodeId sig = g.row_dot(kappa, g.input(std::move(windows)));
        const ad::NodeId bkg = models::siren_forward(g, bundle.bkgd_spec, bnodes, x);
        const ad::NodeId pred = g.add(sig, bkg);

        const ad::NodeId pred_t = log_space ? g.log1p(pred) : pred;
        const ad::NodeId bkg_t = log_space ? g.log1p(bkg) : bkg;
        const ad::NodeId obs_t = g.input(std::move(obs));
        const ad::NodeId lam = g.input(ad::Tensor::scalar(config.lambda));

        ad::NodeId loss;
        if (config.loss_kind == LossKind::kMseMean) {
          const ad::NodeId reconst = g.mean_all(g.squared_error(pred_t, obs_t));
          const ad::NodeId penalty = g.mean_all(g.mul(bkg_t, bkg_t));
          loss = g.add(reconst, g.mul(penalty, lam));
        } else {
          const ad::NodeId reconst = g.sqrt(g.sum_all(g.squared_error(pred_t, obs_t)));
          const ad::NodeId penalty = g.sqrt(g.sum_all(g.mul(bkg_t, bkg_t)));
          loss = g.add(reconst, g.mul(penalty, lam));
        }

        const double loss_now = g.value(loss).v[0];
        epoch_loss += loss_now * static_cast<double>(B);

        g.backward(loss);
        std::vector<const ad::Tensor*> grads;
        grads.reserve(params.size());
        auto collect = [&](const models::SirenNodes& sn) {
          for (std::size_t k = 0; k < sn.weights.size(); ++k) {
            grads.push_back(&g.grad(sn.weights[k]));
            grads.push_back(&g.grad(sn.biases[k]));
          }
        };
        collect(knodes.subnet);
        grads.push_back(&g.grad(knodes.head_w1));
        grads.push_back(&g.grad(knodes.head_b1));
        grads.push_back(&g.grad(knodes.head_w2));
        grads.push_back(&g.grad(knodes.head_b2));
        collect(bnodes);
        adam.step(params, grads);
      }
    } catch (const NonFiniteError& e) {
      throw DivergenceError(epoch, "train: diverged at epoch " + std::to_string(epoch) + ": " +
                                       e.what());
    }
    trace.push_back(epoch_loss / static_cast<double>(cells));
  }

  Prediction p = predict(bundle, observed);
  SeparationResult result{std::move(p.total), std::move(p.signal), std::move(p.background),
                          std::move(trace), std::move(bundle)};
  (void)d;
  return result;
}

}  // namespace inrsep::engine
