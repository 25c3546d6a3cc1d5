#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "inrsep/lambda_estimator.hpp"
#include "inrsep/synth.hpp"
#include "support/oracles.hpp"

using namespace inrsep;
using lambda_est::SupportMask;

namespace {

Grid geometry_64() { return Grid({48, 48}, {{"H", -2.0, 2.0}, {"omega", 0.0, 80.0}}); }

SupportMask half_mask(const Grid& g) {
  SupportMask m;
  m.shape = g.shape();
  m.inside.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size() / 2; ++i) m.inside[i] = 1;
  return m;
}

}  // namespace

TEST_CASE("derive_support: Gaussian peak yields a blob around the argmax") {
  const Grid g = geometry_64();
  const auto model = models::SignalModel::analytic({.J = 32.0, .Jp = -2.6, .amplitude = 3.0,
                                                    .sigma_omega = 4.0});
  const auto mask = lambda_est::derive_support(model, g, 0.01);
  CHECK(mask.count_inside() > 0);
  CHECK(mask.count_outside() > 0);

  // Dense evaluation oracle: the argmax cell must be inside the support and
  // every cell above the threshold must be flagged.
  double smax = 0.0;
  std::size_t arg = 0;
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    s[i] = model.eval(g.coords_at(i));
    if (s[i] > smax) {
      smax = s[i];
      arg = i;
    }
  }
  CHECK(mask.inside[arg] == 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(mask.inside[i] == (s[i] > 0.01 * smax ? 1 : 0));
  }
}

TEST_CASE("derive_support: tau near 1 keeps only near-argmax cells") {
  const Grid g = geometry_64();
  const auto model = models::SignalModel::analytic({});
  const auto tight = lambda_est::derive_support(model, g, 0.999);
  const auto loose = lambda_est::derive_support(model, g, 0.01);
  CHECK(tight.count_inside() < loose.count_inside());
  CHECK(tight.count_inside() >= 1);
}

TEST_CASE("derive_support: identically zero model is an error") {
  const Grid g = geometry_64();
  models::AnalyticSignalParams p;
  p.amplitude = 0.0;
  CHECK_THROWS_AS((void)lambda_est::derive_support(models::SignalModel::analytic(p), g, 0.1),
                  DataError);
  CHECK_THROWS_AS((void)lambda_est::derive_support(models::SignalModel::analytic({}), g, 0.0),
                  DataError);
  CHECK_THROWS_AS((void)lambda_est::derive_support(models::SignalModel::analytic({}), g, 1.0),
                  DataError);
}

TEST_CASE("gaussian_lpf: constant grid is unchanged, mean preserved") {
  Grid g = geometry_64();
  for (double& v : g.values()) v = 3.25;
  const Grid f = lambda_est::gaussian_lpf(g, 5.0);
  for (double v : f.values()) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("gaussian_lpf: sigma -> 0 limit is the identity") {
  Grid g = geometry_64();
  Rng rng(12);
  for (double& v : g.values()) v = rng.uniform(0.0, 2.0);
  const Grid f = lambda_est::gaussian_lpf(g, 1e-6);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::fabs(f[i] - g[i]) < 1e-9);
}

TEST_CASE("gaussian_lpf: centered delta matches direct dense convolution") {
  Grid g({41}, {{"x", 0.0, 1.0}});
  g[20] = 1.0;
  const double sigma = 2.0;
  const Grid f = lambda_est::gaussian_lpf(g, sigma);

  // Direct convolution oracle with the same truncation and reflect rule.
  const long radius = static_cast<long>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    norm += kernel[static_cast<std::size_t>(k + radius)];
  }
  for (double& w : kernel) w /= norm;
  for (long i = 0; i < 41; ++i) {
    double want = 0.0;
    for (long k = -radius; k <= radius; ++k) {
      long j = i + k;
      while (j < 0 || j >= 41) {
        if (j < 0) j = -j;
        if (j >= 41) j = 2 * 41 - 2 - j;
      }
      want += kernel[static_cast<std::size_t>(k + radius)] * g[static_cast<std::size_t>(j)];
    }
    CHECK(std::fabs(f[static_cast<std::size_t>(i)] - want) < 1e-10);
  }
  // Interior-supported signal conserves total mass.
  double mass = 0.0;
  for (double v : f.values()) mass += v;
  CHECK(std::fabs(mass - 1.0) < 0.005);
}

TEST_CASE("lambda_from_parts: algebraic invariants") {
  const Grid g = geometry_64();
  Rng rng(9);
  Grid residual = Grid::like(g);
  Grid lpf = Grid::like(g);
  for (double& v : residual.values()) v = rng.uniform(-0.2, 0.2);
  for (double& v : lpf.values()) v = rng.uniform(0.5, 1.0);
  const SupportMask mask = half_mask(g);

  const auto e = lambda_est::lambda_from_parts(residual, lpf, mask);
  CHECK(e.lambda_star >= 0.0);
  CHECK(e.lambda_star == doctest::Approx(e.numerator / e.denominator));

  SUBCASE("zero residual on the complement gives lambda exactly 0") {
    Grid r0 = residual;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!mask.inside[i]) r0[i] = 0.0;
    }
    CHECK(lambda_est::lambda_from_parts(r0, lpf, mask).lambda_star == 0.0);
  }

  SUBCASE("permutation of complement cells leaves lambda invariant") {
    // Swap pairs of off-support values in both grids; the estimate only
    // depends on the multiset of masked values.
    Grid r2 = residual;
    Grid l2 = lpf;
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!mask.inside[i]) outside.push_back(i);
    }
    Rng shuffle_rng(77);
    auto perm = outside;
    shuffle_rng.shuffle(perm);
    for (std::size_t k = 0; k < outside.size(); ++k) {
      r2[outside[k]] = residual[perm[k]];
      l2[outside[k]] = lpf[perm[k]];
    }
    const auto e2 = lambda_est::lambda_from_parts(r2, l2, mask);
    CHECK(e2.lambda_star == doctest::Approx(e.lambda_star).epsilon(1e-12));
  }

  SUBCASE("exact scaling invariance with analytically scaled parts") {
    const double c = 3.7;
    Grid rc = residual;
    Grid lc = lpf;
    for (double& v : rc.values()) v *= c;
    for (double& v : lc.values()) v *= c;
    const auto ec = lambda_est::lambda_from_parts(rc, lc, mask);
    CHECK(ec.lambda_star == doctest::Approx(e.lambda_star).epsilon(1e-12));
  }

  SUBCASE("zero denominator is an explicit error") {
    Grid l0 = Grid::like(g);
    CHECK_THROWS_AS((void)lambda_est::lambda_from_parts(residual, l0, mask), DataError);
  }

  SUBCASE("empty complement is an explicit error") {
    SupportMask full;
    full.shape = g.shape();
    full.inside.assign(g.size(), 1);
    CHECK_THROWS_AS((void)lambda_est::lambda_from_parts(residual, lpf, full), DataError);
  }
}

TEST_CASE("fit_single_inr: constant grid fits tightly") {
  Grid g({32, 32}, {{"H", -1.0, 1.0}, {"omega", 0.0, 1.0}});
  for (double& v : g.values()) v = 1.7;
  lambda_est::SingleFitOptions opt;
  opt.epochs = 400;
  opt.batch_size = 256;
  opt.lr = 3e-3;
  opt.hidden_width = 64;
  const auto fit = lambda_est::fit_single_inr(g, opt);
  CHECK(oracles::l2(fit.residual.values()) / oracles::l2(g.values()) < 0.02);
}

TEST_CASE("fit_single_inr: zero grid gives small approx") {
  Grid g({16, 16}, {{"H", -1.0, 1.0}, {"omega", 0.0, 1.0}});
  lambda_est::SingleFitOptions opt;
  opt.epochs = 60;
  opt.batch_size = 128;
  opt.lr = 1e-3;
  opt.hidden_width = 32;
  const auto fit = lambda_est::fit_single_inr(g, opt);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(fit.residual[i] == doctest::Approx(-fit.approx[i]).epsilon(1e-12));
  }
  CHECK(oracles::l2(fit.approx.values()) / std::sqrt(static_cast<double>(g.size())) < 0.05);
}

TEST_CASE("fit_single_inr: recovers injected white-noise magnitude") {
  // observed = smooth + noise; the INR fit's residual norm should land near
  // the injected noise norm (low-frequency bias).
  Grid smooth({40, 40}, {{"H", -2.0, 2.0}, {"omega", 0.0, 80.0}});
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 40; ++j) {
      const double x = static_cast<double>(i) / 39.0, y = static_cast<double>(j) / 39.0;
      smooth[i * 40 + j] = 1.5 + 0.8 * std::cos(2.0 * M_PI * x) * std::cos(M_PI * y);
    }
  }
  Rng rng(21);
  Grid noisy = smooth;
  std::vector<double> noise(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noise[i] = rng.uniform(-0.25, 0.25);
    noisy[i] += noise[i];
  }
  lambda_est::SingleFitOptions opt;
  opt.epochs = 250;
  opt.batch_size = 400;
  opt.lr = 1e-3;
  opt.hidden_width = 64;
  const auto fit = lambda_est::fit_single_inr(noisy, opt);
  const double got = oracles::l2(fit.residual.values());
  const double want = oracles::l2(noise);
  CHECK(got > 0.7 * want);
  CHECK(got < 1.3 * want);
}

TEST_CASE("estimate_lambda: synthetic bundle lands near the oracle ratio") {
  synth::SynthConfig cfg;
  cfg.shape = {48, 48};
  cfg.axes = {{"H", -2.0, 2.0}, {"omega", 0.0, 80.0}};
  cfg.signal.amplitude = 4.0;
  cfg.noise.kind = synth::NoiseSpec::Kind::kPoisson;
  cfg.noise.scale = 30.0;
  cfg.seed = 5;
  const auto bundle = synth::generate(cfg);

  const auto model = models::SignalModel::analytic(cfg.signal);
  const auto mask = lambda_est::derive_support(model, bundle.observed, 0.01);

  lambda_est::LambdaOptions opt;
  opt.sigma_lpf = 5.0;
  opt.fit.epochs = 150;
  opt.fit.batch_size = 576;
  opt.fit.lr = 1e-3;
  opt.fit.hidden_width = 64;
  const auto est = lambda_est::estimate_lambda(bundle.observed, mask, opt);

  // Ground-truth oracle ratio ||N|_off|| / ||S2|_off||.
  double n2 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < bundle.observed.size(); ++i) {
    if (mask.inside[i]) continue;
    n2 += bundle.true_noise[i] * bundle.true_noise[i];
    b2 += bundle.true_background[i] * bundle.true_background[i];
  }
  const double oracle = std::sqrt(n2) / std::sqrt(b2);
  CHECK(est.lambda_star > oracle / 3.0);
  CHECK(est.lambda_star < oracle * 3.0);
}

TEST_CASE("estimate_lambda: shape and mask validation") {
  Grid g({8, 8}, {{"H", 0.0, 1.0}, {"omega", 0.0, 1.0}});
  SupportMask empty;
  empty.shape = g.shape();
  empty.inside.assign(g.size(), 0);
  lambda_est::LambdaOptions opt;
  opt.fit.epochs = 1;
  CHECK_THROWS_AS((void)lambda_est::estimate_lambda(g, empty, opt), DataError);
}
