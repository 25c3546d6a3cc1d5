#include <doctest.h>

#include <cmath>

#include "inrsep/synth.hpp"
#include "support/oracles.hpp"

using namespace inrsep;
using synth::SynthConfig;

namespace {

SynthConfig base_config() {
  SynthConfig cfg;
  cfg.shape = {24, 24};
  cfg.axes = {{"H", -2.0, 2.0}, {"omega", 0.0, 80.0}};
  cfg.signal.amplitude = 3.0;
  cfg.r_true = 2;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("generate: exact ground-truth decomposition without noise") {
  const auto bundle = synth::generate(base_config());
  for (std::size_t i = 0; i < bundle.observed.size(); ++i) {
    CHECK(bundle.observed[i] ==
          bundle.true_signal[i] + bundle.true_background[i]);  // exact, N == 0
    CHECK(bundle.true_noise[i] == 0.0);
    CHECK(bundle.true_background[i] >= 0.0);
    CHECK(bundle.true_signal[i] >= 0.0);
  }
}

TEST_CASE("generate: delta kernel reduces the signal to sampled S_sim") {
  SynthConfig cfg = base_config();
  cfg.kernel_kind = synth::TrueKernelKind::kDelta;
  const auto bundle = synth::generate(cfg);
  const auto model = models::SignalModel::analytic(cfg.signal);
  for (std::size_t i = 0; i < bundle.observed.size(); ++i) {
    CHECK(bundle.true_signal[i] ==
          doctest::Approx(model.eval(bundle.observed.coords_at(i))).epsilon(1e-14));
  }

  SUBCASE("zero background on top gives observed == sampled S_sim") {
    cfg.background.modes = 0;
    cfg.background.offset = 0.0;
    const auto pure = synth::generate(cfg);
    for (std::size_t i = 0; i < pure.observed.size(); ++i) {
      CHECK(pure.observed[i] ==
            doctest::Approx(model.eval(pure.observed.coords_at(i))).epsilon(1e-14));
      CHECK(pure.true_background[i] == 0.0);
    }
  }
}

TEST_CASE("generate: kernel field weights are simplex points everywhere") {
  const auto bundle = synth::generate(base_config());
  const std::size_t window = bundle.true_kernel.window();
  for (std::size_t cell = 0; cell < bundle.observed.size(); ++cell) {
    const auto w = bundle.true_kernel.at(cell);
    double sum = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-6);
  }
  CHECK(window == 25);
}

TEST_CASE("generate: kernel field varies across the domain") {
  const auto bundle = synth::generate(base_config());
  const auto first = bundle.true_kernel.at(0);
  const auto last = bundle.true_kernel.at(bundle.observed.size() - 1);
  double diff = 0.0;
  for (std::size_t k = 0; k < first.size(); ++k) diff += std::fabs(first[k] - last[k]);
  CHECK(diff > 1e-3);
}

TEST_CASE("generate: bit-identical under the same seed") {
  const auto a = synth::generate(base_config());
  const auto b = synth::generate(base_config());
  CHECK(a.observed.values() == b.observed.values());
  CHECK(a.true_signal.values() == b.true_signal.values());
  CHECK(a.true_background.values() == b.true_background.values());
  CHECK(a.true_kernel.weights == b.true_kernel.weights);

  SynthConfig other = base_config();
  other.seed = 12;
  const auto c = synth::generate(other);
  CHECK(a.true_background.values() != c.true_background.values());
}

TEST_CASE("generate: S1 matches the nested-loop convolution oracle") {
  SynthConfig cfg = base_config();
  cfg.shape = {10, 10};
  cfg.r_true = 1;
  cfg.kernel_sigmas = {0.7, 1.1};
  const auto bundle = synth::generate(cfg);
  const auto model = models::SignalModel::analytic(cfg.signal);

  std::vector<double> s_sim(bundle.observed.size());
  for (std::size_t i = 0; i < s_sim.size(); ++i) {
    s_sim[i] = model.eval(bundle.observed.coords_at(i));
  }
  for (std::size_t flat = 0; flat < bundle.observed.size(); ++flat) {
    const auto idx = bundle.observed.unflatten(flat);
    const auto w = bundle.true_kernel.at(flat);
    const double want = oracles::convolve_2d_at(s_sim, 10, 10, idx[0], idx[1],
                                                std::vector<double>(w.begin(), w.end()), 1);
    CHECK(std::fabs(bundle.true_signal[flat] - want) < 1e-12);
  }
}

TEST_CASE("poissonize: zero cells stay zero; negative input is an error") {
  Grid clean({4, 4}, {{"H", 0.0, 1.0}, {"omega", 0.0, 1.0}});
  auto [noisy, noise] = synth::poissonize(clean, 10.0, 3);
  for (double v : noisy.values()) CHECK(v == 0.0);
  for (double v : noise.values()) CHECK(v == 0.0);
  clean[0] = -0.5;
  CHECK_THROWS_AS((void)synth::poissonize(clean, 10.0, 3), DataError);
}

TEST_CASE("poissonize: huge scale converges to the clean values") {
  Grid clean({8, 8}, {{"H", 0.0, 1.0}, {"omega", 0.0, 1.0}});
  Rng rng(15);
  for (double& v : clean.values()) v = rng.uniform(0.5, 3.0);
  auto [noisy, noise] = synth::poissonize(clean, 1e6, 4);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(std::fabs(noisy[i] - clean[i]) / clean[i] < 0.01);
  }
}

TEST_CASE("poissonize: Monte-Carlo mean and variance") {
  // Empirical mean within 3*sqrt(c/(n*s)) and variance within 10% of c/s.
  const double c = 2.0, s = 5.0;
  Grid clean({1}, {{"x", 0.0, 1.0}});
  clean[0] = c;
  const std::size_t draws = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    auto [noisy, noise] = synth::poissonize(clean, s, 1000 + k);
    sum += noisy[0];
    sumsq += noisy[0] * noisy[0];
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  CHECK(std::fabs(mean - c) < 3.0 * std::sqrt(c / (static_cast<double>(draws) * s)));
  CHECK(var == doctest::Approx(c / s).epsilon(0.10));
}

TEST_CASE("poisson sampler: large-mean regime moments") {
  // PTRS branch (mean >= 10).
  Rng rng(77);
  const double mean = 400.0;
  const std::size_t draws = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const double x = static_cast<double>(rng.poisson(mean));
    sum += x;
    sumsq += x * x;
  }
  const double m = sum / draws;
  const double var = sumsq / draws - m * m;
  CHECK(std::fabs(m - mean) < 3.0 * std::sqrt(mean / draws));
  CHECK(var == doctest::Approx(mean).epsilon(0.05));
}

TEST_CASE("generate: degenerate axis ranges rejected") {
  SynthConfig cfg = base_config();
  cfg.axes[0].hi = cfg.axes[0].lo;
  CHECK_THROWS_AS((void)synth::generate(cfg), DataError);
}

TEST_CASE("generate: d=4 small grid stays consistent") {
  SynthConfig cfg;
  cfg.shape = {6, 6, 6, 6};
  cfg.axes = {{"H", -1.0, 1.0}, {"K", -1.0, 1.0}, {"L", -1.0, 1.0}, {"omega", 0.0, 80.0}};
  cfg.r_true = 1;
  cfg.kernel_sigmas = {0.8, 0.8, 0.8, 0.8};
  cfg.seed = 2;
  const auto bundle = synth::generate(cfg);
  CHECK(bundle.true_kernel.window() == 81);
  for (std::size_t i = 0; i < bundle.observed.size(); ++i) {
    CHECK(bundle.observed[i] == bundle.true_signal[i] + bundle.true_background[i]);
  }
}
