#include "inrsep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "inrsep/separation.hpp"

namespace inrsep::synth {

void SynthConfig::validate() const {
  if (shape.size() != axes.size() || shape.empty()) {
    throw DataError("SynthConfig: shape/axes rank mismatch");
  }
  if (r_true < 1) throw DataError("SynthConfig: r_true must be >= 1");
  if (kernel_kind == TrueKernelKind::kAnisoGaussian && kernel_sigmas.size() != shape.size()) {
    throw DataError("SynthConfig: kernel_sigmas must have one entry per axis");
  }
  for (double s : kernel_sigmas) {
    if (!(s > 0.0)) throw DataError("SynthConfig: kernel sigmas must be positive");
  }
  if (background.offset < 0.0) throw DataError("SynthConfig: background offset must be >= 0");
  if (noise.kind == NoiseSpec::Kind::kPoisson && !(noise.scale > 0.0)) {
    throw DataError("SynthConfig: poisson scale must be positive");
  }
}

namespace {

// Rotation applied pairwise to axes (0,1), (2,3), ... by the same angle.
void rotate_offset(std::vector<double>& o, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t a = 0; a + 1 < o.size(); a += 2) {
    const double x = o[a], y = o[a + 1];
    o[a] = c * x - s * y;
    o[a + 1] = s * x + c * y;
  }
}

}  // namespace

models::KernelField materialize_kernel_field(const SynthConfig& config, const Grid& geometry) {
  config.validate();
  const std::size_t d = geometry.ndim();
  const std::size_t r = config.r_true;
  const std::size_t window = models::window_size(r, d);

  models::KernelField field;
  field.r = r;
  field.d = d;
  field.shape = geometry.shape();
  field.weights.assign(geometry.size() * window, 0.0);

  // Offset table in lexicographic order.
  std::vector<std::vector<double>> offsets(window, std::vector<double>(d));
  {
    std::vector<long> off(d, -static_cast<long>(r));
    for (std::size_t w = 0; w < window; ++w) {
      for (std::size_t a = 0; a < d; ++a) offsets[w][a] = static_cast<double>(off[a]);
      for (std::size_t a = d; a-- > 0;) {
        if (++off[a] <= static_cast<long>(r)) break;
        off[a] = -static_cast<long>(r);
      }
    }
  }

  std::vector<double> rotated(d);
  for (std::size_t flat = 0; flat < geometry.size(); ++flat) {
    double* w = &field.weights[flat * window];
    if (config.kernel_kind == TrueKernelKind::kDelta) {
      w[(window - 1) / 2] = 1.0;
      continue;
    }
    // Angle sweeps 0..pi/2 along the first axis.
    const auto idx = geometry.unflatten(flat);
    const double t = geometry.shape()[0] > 1
                         ? static_cast<double>(idx[0]) / static_cast<double>(geometry.shape()[0] - 1)
                         : 0.5;
    const double angle = 0.5 * M_PI * t;
    double sum = 0.0;
    for (std::size_t k = 0; k < window; ++k) {
      rotated = offsets[k];
      rotate_offset(rotated, angle);
      double q = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double z = rotated[a] / config.kernel_sigmas[a];
        q += z * z;
      }
      w[k] = std::exp(-0.5 * q);
      sum += w[k];
    }
    for (std::size_t k = 0; k < window; ++k) w[k] /= sum;
  }
  return field;
}

SynthBundle generate(const SynthConfig& config) {
  config.validate();
  Grid geometry(config.shape, config.axes);
  const std::size_t d = geometry.ndim();
  const std::size_t cells = geometry.size();

  Rng rng(config.seed);

  // Background: seeded low-frequency cosine modes on normalized [0,1] axes.
  Grid background = Grid::like(geometry);
  {
    const std::size_t K = config.background.modes;
    std::vector<std::vector<double>> freq(K, std::vector<double>(d));
    std::vector<std::vector<double>> phase(K, std::vector<double>(d));
    std::vector<double> amp(K);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t a = 0; a < d; ++a) {
        freq[k][a] = rng.uniform(0.25, config.background.max_frequency);
        phase[k][a] = rng.uniform(0.0, 2.0 * M_PI);
      }
      amp[k] = config.background.amplitude * rng.uniform(0.5, 1.0) /
               static_cast<double>(std::max<std::size_t>(K, 1));
    }
    double field_min = 0.0;
    if (K > 0) {
      field_min = std::numeric_limits<double>::infinity();
      for (std::size_t flat = 0; flat < cells; ++flat) {
        const auto idx = geometry.unflatten(flat);
        double v = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          double mode = amp[k];
          for (std::size_t a = 0; a < d; ++a) {
            const double t = geometry.shape()[a] > 1
                                 ? static_cast<double>(idx[a]) /
                                       static_cast<double>(geometry.shape()[a] - 1)
                                 : 0.5;
            mode *= std::cos(2.0 * M_PI * freq[k][a] * t + phase[k][a]);
          }
          v += mode;
        }
        background[flat] = v;
        field_min = std::min(field_min, v);
      }
    }
    for (std::size_t flat = 0; flat < cells; ++flat) {
      background[flat] = background[flat] - field_min + config.background.offset;
    }
  }

  // True signal: spatially varying simplex kernel convolved with the
  // analytic signal, zero-extended at the grid border.
  const models::SignalModel signal_model = models::SignalModel::analytic(config.signal);
  models::KernelField kernel = materialize_kernel_field(config, geometry);
  const engine::PaddedSignal padded =
      engine::precompute_signal_windows(signal_model, geometry, config.r_true);

  Grid true_signal = Grid::like(geometry);
  std::vector<double> window_buf(kernel.window());
  for (std::size_t flat = 0; flat < cells; ++flat) {
    const auto idx = geometry.unflatten(flat);
    padded.gather(idx, window_buf);
    true_signal[flat] = engine::convolve_signal(kernel.at(flat), window_buf);
  }

  Grid clean = Grid::like(geometry);
  for (std::size_t flat = 0; flat < cells; ++flat) {
    clean[flat] = true_signal[flat] + background[flat];
  }

  SynthBundle bundle{Grid::like(geometry), std::move(true_signal), std::move(background),
                     Grid::like(geometry), std::move(kernel), config};
  if (config.noise.kind == NoiseSpec::Kind::kPoisson) {
    // Separate stream so the field draws above stay stable if the noise
    // mode is toggled.
    auto [noisy, noise] = poissonize(clean, config.noise.scale, config.seed ^ 0xA5A5A5A5A5A5A5A5ull);
    bundle.observed = std::move(noisy);
    bundle.true_noise = std::move(noise);
  } else {
    bundle.observed = clean;
  }
  return bundle;
}

std::pair<Grid, Grid> poissonize(const Grid& clean, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw DataError("poissonize: scale must be positive");
  for (double v : clean.values()) {
    if (v < 0.0) throw DataError("poissonize: clean values must be nonnegative");
  }
  Rng rng(seed);
  Grid noisy = Grid::like(clean);
  Grid noise = Grid::like(clean);
  for (std::size_t flat = 0; flat < clean.size(); ++flat) {
    const double draw = static_cast<double>(rng.poisson(scale * clean[flat]));
    noisy[flat] = draw / scale;
    noise[flat] = noisy[flat] - clean[flat];
  }
  return {std::move(noisy), std::move(noise)};
}

}  // namespace inrsep::synth
