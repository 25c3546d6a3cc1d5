#include "inrsep/lambda_estimator.hpp"

#include <cmath>
#include <numeric>

namespace inrsep::lambda_est {

std::size_t SupportMask::count_inside() const {
  std::size_t n = 0;
  for (std::uint8_t b : inside) n += b;
  return n;
}

std::size_t SupportMask::count_outside() const { return inside.size() - count_inside(); }

SupportMask derive_support(const models::SignalModel& model, const Grid& geometry, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DataError("derive_support: tau must be in (0,1)");
  std::vector<double> s(geometry.size());
  double smax = 0.0;
  for (std::size_t flat = 0; flat < geometry.size(); ++flat) {
    s[flat] = model.eval(geometry.coords_at(flat));
    smax = std::max(smax, s[flat]);
  }
  if (smax <= 0.0) throw DataError("derive_support: signal model is identically zero on the grid");
  SupportMask mask;
  mask.shape = geometry.shape();
  mask.inside.resize(geometry.size());
  const double cut = tau * smax;
  for (std::size_t flat = 0; flat < geometry.size(); ++flat) {
    mask.inside[flat] = s[flat] > cut ? 1 : 0;
  }
  mask.tau = tau;
  mask.source = "threshold on signal model";
  return mask;
}

SingleFitResult fit_single_inr(const Grid& observed, const SingleFitOptions& options) {
  if (observed.size() == 0) throw DataError("fit_single_inr: empty grid");
  for (double v : observed.values()) {
    if (!std::isfinite(v)) throw DataError("fit_single_inr: non-finite observed value");
  }
  models::SirenSpec spec;
  spec.input_dim = observed.ndim();
  spec.hidden_dims = {options.hidden_width};
  spec.output_dim = 1;
  spec.w0_first = options.w0;
  spec.final_activation = models::FinalActivation::kNone;

  Rng rng(options.seed);
  models::SirenParams params = models::siren_init(spec, rng);
  std::vector<ad::Tensor*> tensors = params.tensors();
  ad::Adam adam({.lr = options.lr});

  const std::size_t cells = observed.size();
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> trace;
  trace.reserve(options.epochs);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    try {
      for (std::size_t begin = 0; begin < cells; begin += options.batch_size) {
        const std::size_t end = std::min(cells, begin + options.batch_size);
        const std::size_t B = end - begin;
        const std::span<const std::size_t> batch(order.data() + begin, B);

        ad::Tensor norm = models::normalized_coords(observed, batch);
        ad::Tensor target = ad::Tensor::zeros({B, 1});
        for (std::size_t i = 0; i < B; ++i) target.v[i] = observed[batch[i]];

        ad::Graph g;
        const ad::NodeId x = g.input(std::move(norm));
        const models::SirenNodes nodes = models::siren_register(g, params);
        const ad::NodeId y = models::siren_forward(g, spec, nodes, x);
        const ad::NodeId loss = g.mean_all(g.squared_error(y, g.input(std::move(target))));
        epoch_loss += g.value(loss).v[0] * static_cast<double>(B);

        g.backward(loss);
        std::vector<const ad::Tensor*> grads;
        for (std::size_t k = 0; k < nodes.weights.size(); ++k) {
          grads.push_back(&g.grad(nodes.weights[k]));
          grads.push_back(&g.grad(nodes.biases[k]));
        }
        adam.step(tensors, grads);
      }
    } catch (const NonFiniteError& e) {
      throw DivergenceError(epoch, std::string("fit_single_inr: diverged: ") + e.what());
    }
    trace.push_back(epoch_loss / static_cast<double>(cells));
  }

  SingleFitResult out{Grid::like(observed), Grid::like(observed), std::move(trace)};
  const std::size_t chunk = 4096;
  std::vector<std::size_t> cells_buf;
  for (std::size_t begin = 0; begin < cells; begin += chunk) {
    const std::size_t end = std::min(cells, begin + chunk);
    cells_buf.resize(end - begin);
    std::iota(cells_buf.begin(), cells_buf.end(), begin);
    const ad::Tensor norm = models::normalized_coords(observed, cells_buf);
    const ad::Tensor y = models::siren_eval(spec, params, norm);
    for (std::size_t i = 0; i < cells_buf.size(); ++i) {
      out.approx[begin + i] = y.v[i];
      out.residual[begin + i] = observed[begin + i] - y.v[i];
    }
  }
  return out;
}

Grid gaussian_lpf(const Grid& grid, double sigma_cells) {
  if (!(sigma_cells > 0.0)) throw DataError("gaussian_lpf: sigma must be positive");
  const std::size_t d = grid.ndim();

  // One normalized kernel shared by all axes.
  const long radius = std::max(1L, static_cast<long>(std::ceil(4.0 * sigma_cells)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    const double x = static_cast<double>(k) / sigma_cells;
    kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * x * x);
    norm += kernel[static_cast<std::size_t>(k + radius)];
  }
  for (double& w : kernel) w /= norm;

  Grid out = grid;
  std::vector<double> line;
  // Separable pass per axis; lines addressed through strides.
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t a = d - 1; a-- > 0;) stride[a] = stride[a + 1] * grid.shape()[a + 1];

  for (std::size_t axis = 0; axis < d; ++axis) {
    const std::size_t n = grid.shape()[axis];
    const std::size_t line_count = grid.size() / n;
    line.resize(n);
    std::vector<double>& v = out.values();
    for (std::size_t l = 0; l < line_count; ++l) {
      // Base offset of this line: distribute l over the other axes.
      std::size_t base = 0;
      std::size_t rem = l;
      for (std::size_t a = d; a-- > 0;) {
        if (a == axis) continue;
        const std::size_t extent = grid.shape()[a];
        base += (rem % extent) * stride[a];
        rem /= extent;
      }
      for (std::size_t i = 0; i < n; ++i) line[i] = v[base + i * stride[axis]];
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long k = -radius; k <= radius; ++k) {
          long j = static_cast<long>(i) + k;
          // Reflect about the edge node: -1 -> 1, n -> n-2.
          if (n == 1) {
            j = 0;
          } else {
            while (j < 0 || j >= static_cast<long>(n)) {
              if (j < 0) j = -j;
              if (j >= static_cast<long>(n)) j = 2 * static_cast<long>(n) - 2 - j;
            }
          }
          acc += kernel[static_cast<std::size_t>(k + radius)] * line[static_cast<std::size_t>(j)];
        }
        v[base + i * stride[axis]] = acc;
      }
    }
  }
  return out;
}

LambdaEstimate lambda_from_parts(const Grid& residual, const Grid& lpf_observed,
                                 const SupportMask& mask) {
  if (residual.shape() != mask.shape || lpf_observed.shape() != mask.shape) {
    throw ShapeError("lambda_from_parts: shape mismatch");
  }
  if (mask.count_outside() == 0) {
    throw DataError("lambda_from_parts: support complement is empty");
  }
  double num2 = 0.0, den2 = 0.0;
  for (std::size_t flat = 0; flat < residual.size(); ++flat) {
    if (mask.inside[flat]) continue;
    num2 += residual[flat] * residual[flat];
    den2 += lpf_observed[flat] * lpf_observed[flat];
  }
  if (den2 <= 0.0) {
    throw DataError("lambda_from_parts: background-free region (zero denominator)");
  }
  LambdaEstimate e;
  e.numerator = std::sqrt(num2);
  e.denominator = std::sqrt(den2);
  e.lambda_star = e.numerator / e.denominator;
  return e;
}

LambdaEstimate estimate_lambda(const Grid& observed, const SupportMask& mask,
                               const LambdaOptions& options) {
  if (observed.shape() != mask.shape) throw ShapeError("estimate_lambda: shape mismatch");
  if (mask.count_inside() == 0 || mask.count_outside() == 0) {
    throw DataError("estimate_lambda: mask and its complement must both be nonempty");
  }
  const SingleFitResult fit = fit_single_inr(observed, options.fit);
  const Grid lpf = gaussian_lpf(observed, options.sigma_lpf);
  return lambda_from_parts(fit.residual, lpf, mask);
}

}  // namespace inrsep::lambda_est
