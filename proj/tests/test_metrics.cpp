#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "inrsep/metrics.hpp"
#include "inrsep/rng.hpp"
#include "inrsep/synth.hpp"
#include "support/oracles.hpp"

using namespace inrsep;

namespace {

Grid random_grid(std::size_t h, std::size_t w, std::uint64_t seed, double lo = 0.0,
                 double hi = 1.0) {
  Rng rng(seed);
  return oracles::make_grid_2d(h, w, [&](std::size_t, std::size_t) { return rng.uniform(lo, hi); });
}

// Direct-formula SSIM oracle: recomputed from scratch with explicit window
// loops and the same published constants.
double reference_ssim(const Grid& a, const Grid& b) {
  const std::size_t H = a.shape()[0], W = a.shape()[1], win = 7;
  const double amax = *std::max_element(b.values().begin(), b.values().end());
  const double amin = *std::min_element(b.values().begin(), b.values().end());
  const double L = amax - amin;
  const double c1 = std::pow(0.01 * L, 2), c2 = std::pow(0.03 * L, 2);
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t i0 = 0; i0 + win <= H; ++i0) {
    for (std::size_t j0 = 0; j0 + win <= W; ++j0) {
      std::vector<double> xs, ys;
      for (std::size_t i = i0; i < i0 + win; ++i) {
        for (std::size_t j = j0; j < j0 + win; ++j) {
          xs.push_back(a[i * W + j]);
          ys.push_back(b[i * W + j]);
        }
      }
      const double n = static_cast<double>(xs.size());
      double mx = 0.0, my = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
      }
      mx /= n;
      my /= n;
      double vx = 0.0, vy = 0.0, cxy = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        vx += (xs[k] - mx) * (xs[k] - mx);
        vy += (ys[k] - my) * (ys[k] - my);
        cxy += (xs[k] - mx) * (ys[k] - my);
      }
      vx /= n - 1.0;
      vy /= n - 1.0;
      cxy /= n - 1.0;
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace

TEST_CASE("rmse/mae/re: identities and hand values") {
  const Grid a = oracles::make_grid_2d(1, 2, [](std::size_t, std::size_t j) { return j * 2.0; });
  const Grid zero = oracles::make_grid_2d(1, 2, [](std::size_t, std::size_t) { return 0.0; });
  CHECK(metrics::rmse(a, a) == 0.0);
  CHECK(metrics::mae(a, a) == 0.0);
  CHECK(metrics::relative_error(a, a) == 0.0);
  // a=[0,2], b=[0,0]: rmse = sqrt(2), mae = 1, re undefined.
  CHECK(metrics::rmse(a, zero) == doctest::Approx(std::sqrt(2.0)));
  CHECK(metrics::mae(a, zero) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)metrics::relative_error(a, zero), DataError);
  // constant shift: mae = |c|.
  const Grid shifted =
      oracles::make_grid_2d(1, 2, [](std::size_t, std::size_t j) { return j * 2.0 - 0.75; });
  CHECK(metrics::mae(shifted, a) == doctest::Approx(0.75));
}

TEST_CASE("psnr: sentinel, hand value, log identity") {
  const Grid a = random_grid(4, 4, 1);
  CHECK(std::isinf(metrics::psnr(a, a)));
  // peak 1, rmse 0.01 -> 40 dB.
  Grid b = a;
  Grid ref = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = 0.01;
    ref[i] = 0.0;
  }
  CHECK(metrics::psnr(b, ref, 1.0) == doctest::Approx(40.0));
  // doubling rmse costs ~6.0206 dB.
  Grid b2 = b;
  for (double& v : b2.values()) v *= 2.0;
  CHECK(metrics::psnr(b, ref, 1.0) - metrics::psnr(b2, ref, 1.0) ==
        doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS((void)metrics::psnr(a, ref, 0.0), DataError);
}

TEST_CASE("ssim: identity, inversion, and the direct-formula oracle") {
  const Grid a = random_grid(16, 16, 7);
  CHECK(metrics::ssim(a, a) == doctest::Approx(1.0));
  Grid inverted = a;
  for (double& v : inverted.values()) v = 1.0 - v;
  CHECK(metrics::ssim(inverted, a) < 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Grid x = random_grid(16, 16, 100 + seed);
    const Grid y = random_grid(16, 16, 200 + seed);
    CHECK(std::fabs(metrics::ssim(x, y) - reference_ssim(x, y)) < 1e-10);
  }
  const Grid tiny = random_grid(4, 4, 3);
  CHECK_THROWS_AS((void)metrics::ssim(tiny, tiny), DataError);
}

TEST_CASE("msle_sig: identities and hand value") {
  const Grid t = random_grid(8, 8, 9, 0.0, 3.0);
  CHECK(metrics::msle_sig(t, t) == 0.0);
  // est = e-1 at one cell, true = 0 -> (log e)^2 / n = 1/n.
  Grid est = oracles::make_grid_2d(4, 4, [](std::size_t, std::size_t) { return 0.0; });
  Grid truth = est;
  est[5] = std::exp(1.0) - 1.0;
  CHECK(metrics::msle_sig(est, truth) == doctest::Approx(1.0 / 16.0));
  // continuity under small scaling.
  Grid scaled = t;
  for (double& v : scaled.values()) v *= 1.0 + 1e-9;
  CHECK(metrics::msle_sig(scaled, t) < 1e-12);
  Grid negative = t;
  negative[0] = -1.0;
  CHECK_THROWS_AS((void)metrics::msle_sig(negative, t), DataError);
}

TEST_CASE("chi2: identities, hand value, frozen p-value oracle") {
  const Grid a = random_grid(8, 8, 13, 0.5, 2.0);
  const auto same = metrics::chi2(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  // single cell obs=4, pred=1 -> statistic 9.
  Grid obs({1}, {{"x", 0.0, 1.0}});
  Grid pred({1}, {{"x", 0.0, 1.0}});
  obs[0] = 4.0;
  pred[0] = 1.0;
  const auto single = metrics::chi2(obs, pred, 0.5);
  CHECK(single.statistic == doctest::Approx(9.0));
  CHECK(single.dof == 1);
  // Frozen reference: scipy.stats.chi2.sf(9.0, 1) = 2.6997960632601883e-03.
  CHECK(single.p_value == doctest::Approx(2.6997960632601883e-03).epsilon(1e-10));

  // More frozen upper-tail values, checked through the same code path the
  // metric uses: sf(3,5), sf(15,10), sf(120,99).
  struct Ref {
    double stat;
    std::size_t cells;  // dof = cells - 1
    double sf;
  };
  for (const Ref& ref : {Ref{3.0, 6, 6.9998583587862762e-01}, Ref{15.0, 11, 1.3206185628772060e-01},
                         Ref{120.0, 100, 7.4243855805966916e-02}}) {
    // Build a pair whose Pearson statistic is exactly ref.stat: one cell
    // carries the whole deviation, the rest match.
    Grid o({ref.cells}, {{"x", 0.0, 1.0}});
    Grid p({ref.cells}, {{"x", 0.0, 1.0}});
    for (std::size_t i = 0; i < ref.cells; ++i) {
      o[i] = 1.0;
      p[i] = 1.0;
    }
    o[0] = 1.0 + std::sqrt(ref.stat);
    const auto r = metrics::chi2(o, p, 1e-9);
    CHECK(r.statistic == doctest::Approx(ref.stat).epsilon(1e-12));
    CHECK(r.dof == ref.cells - 1);
    CHECK(r.p_value == doctest::Approx(ref.sf).epsilon(1e-10));
  }
}

TEST_CASE("chi2: Monte-Carlo calibration on Poisson draws") {
  // statistic/dof ~ 1 within 10% for 10^4 cells.
  const std::size_t n = 10000;
  Grid pred({n}, {{"x", 0.0, 1.0}});
  Grid obs({n}, {{"x", 0.0, 1.0}});
  Rng rng(500);
  for (std::size_t i = 0; i < n; ++i) {
    pred[i] = rng.uniform(5.0, 50.0);
    obs[i] = static_cast<double>(rng.poisson(pred[i]));
  }
  const auto r = metrics::chi2(obs, pred);
  CHECK(r.included_cells == n);
  const double ratio = r.statistic / static_cast<double>(r.dof);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
}

TEST_CASE("radon: hand values and conventions") {
  Grid g({2, 2}, {{"H", 0.0, 1.0}, {"K", 0.0, 1.0}});
  g[0] = 1.0;
  g[1] = 2.0;
  g[2] = 3.0;
  g[3] = 4.0;
  const auto p = metrics::radon_projection(g, 0.0);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(4.0));
  CHECK(p[1] == doctest::Approx(6.0));

  const Grid c = oracles::make_grid_2d(5, 5, [](std::size_t, std::size_t) { return 1.5; });
  for (double v : metrics::radon_projection(c, 0.0)) CHECK(v == doctest::Approx(7.5));

  Grid delta = oracles::make_grid_2d(5, 5, [](std::size_t, std::size_t) { return 0.0; });
  delta[2 * 5 + 3] = 1.0;
  const auto dp = metrics::radon_projection(delta, 0.0);
  for (std::size_t j = 0; j < 5; ++j) CHECK(dp[j] == (j == 3 ? 1.0 : 0.0));
  const auto dp45 = metrics::radon_projection(delta, 45.0);
  std::size_t nonzero = 0;
  for (double v : dp45) nonzero += v != 0.0 ? 1 : 0;
  CHECK(nonzero == 1);

  CHECK_THROWS_AS((void)metrics::radon_projection(g, 30.0), DataError);
}

TEST_CASE("projection-slice theorem holds on random grids") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t h = 8 + seed % 5;
    const std::size_t w = 8 + (seed * 3) % 7;
    const Grid g = random_grid(h, w, 900 + seed, -1.0, 2.0);
    const auto proj = metrics::radon_projection(g, 0.0);
    const auto dft = metrics::dft_1d(proj);
    const auto central = metrics::fourier_central_slice(g);
    REQUIRE(dft.size() == central.size());
    double scale = 0.0;
    for (double v : central) scale = std::max(scale, v);
    for (std::size_t k = 0; k < dft.size(); ++k) {
      const double mag = std::hypot(dft[k].first, dft[k].second);
      CHECK(std::fabs(mag - central[k]) <= 1e-9 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("fourier_central_slice: constant and cosine grids") {
  const Grid c = oracles::make_grid_2d(8, 8, [](std::size_t, std::size_t) { return 2.0; });
  const auto mc = metrics::fourier_central_slice(c);
  CHECK(mc[0] == doctest::Approx(2.0 * 64.0));
  for (std::size_t k = 1; k < mc.size(); ++k) CHECK(mc[k] == doctest::Approx(0.0).epsilon(1e-9));

  const Grid cosg = oracles::make_grid_2d(8, 8, [](std::size_t, std::size_t j) {
    return std::cos(2.0 * M_PI * 2.0 * static_cast<double>(j) / 8.0);
  });
  const auto m = metrics::fourier_central_slice(cosg);
  for (std::size_t k = 0; k < 8; ++k) {
    if (k == 2 || k == 6) {
      CHECK(m[k] > 1.0);
    } else {
      CHECK(m[k] < 1e-9);
    }
  }
}

TEST_CASE("diagonal_slice: hand values") {
  const Grid g = oracles::make_grid_2d(
      4, 4, [](std::size_t i, std::size_t j) { return static_cast<double>(i + j); });
  const auto d = metrics::diagonal_slice(g);
  REQUIRE(d.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d[i] == doctest::Approx(2.0 * i));

  const Grid c = oracles::make_grid_2d(3, 3, [](std::size_t, std::size_t) { return 1.25; });
  for (double v : metrics::diagonal_slice(c)) CHECK(v == 1.25);

  Grid one({1, 1}, {{"H", 0.0, 1.0}, {"K", 0.0, 1.0}});
  one[0] = 9.0;
  CHECK(metrics::diagonal_slice(one) == std::vector<double>{9.0});

  const Grid rect = oracles::make_grid_2d(2, 3, [](std::size_t, std::size_t) { return 0.0; });
  CHECK_THROWS_AS((void)metrics::diagonal_slice(rect), DataError);
}

TEST_CASE("pixel_diff_histogram: mass placement and conservation") {
  const Grid a = random_grid(12, 12, 31);
  const auto same = metrics::pixel_diff_histogram(a, a, 7);
  CHECK(same.counts[0] == a.size());  // all differences identical -> first bin

  Grid b = a;
  for (double& v : b.values()) v += 1.0;
  Grid spread = a;
  spread[0] += 3.0;  // widen the range so the +1 bin is interior
  const auto hist = metrics::pixel_diff_histogram(spread, a, 5);
  std::size_t total = 0;
  for (std::size_t c : hist.counts) total += c;
  CHECK(total == a.size());
  CHECK(hist.scatter.size() == a.size());
  CHECK(hist.scatter[3].first == a[3]);
  CHECK(hist.scatter[3].second == spread[3]);
}

TEST_CASE("peak_retention: identity, halving, and ground-truth comparison") {
  // Two separated blobs.
  Grid raw = oracles::make_grid_2d(16, 16, [](std::size_t, std::size_t) { return 0.0; });
  raw[3 * 16 + 3] = 2.0;
  raw[3 * 16 + 4] = 1.0;
  raw[12 * 16 + 12] = 4.0;
  lambda_est::SupportMask mask;
  mask.shape = raw.shape();
  mask.inside.assign(raw.size(), 0);
  mask.inside[3 * 16 + 3] = mask.inside[3 * 16 + 4] = mask.inside[12 * 16 + 12] = 1;

  CHECK(metrics::peak_retention(raw, raw, mask) == doctest::Approx(1.0));
  Grid half = raw;
  for (double& v : half.values()) v *= 0.5;
  CHECK(metrics::peak_retention(half, raw, mask) == doctest::Approx(0.5));

  // Separated peaks at mixed amplitudes report the minimum.
  Grid mixed = raw;
  mixed[3 * 16 + 3] = 1.6;          // 80% of first peak
  mixed[12 * 16 + 12] = 3.8;        // 95% of second peak
  CHECK(metrics::peak_retention(mixed, raw, mask) == doctest::Approx(0.8));

  lambda_est::SupportMask empty;
  empty.shape = raw.shape();
  empty.inside.assign(raw.size(), 0);
  CHECK_THROWS_AS((void)metrics::peak_retention(raw, raw, empty), DataError);
}

TEST_CASE("peak_retention: synthetic bundle against ground truth") {
  synth::SynthConfig cfg;
  cfg.shape = {32, 32};
  cfg.axes = {{"H", -2.0, 2.0}, {"omega", 0.0, 80.0}};
  cfg.signal.amplitude = 5.0;
  cfg.seed = 77;
  const auto bundle = synth::generate(cfg);
  const auto model = models::SignalModel::analytic(cfg.signal);
  const auto mask = lambda_est::derive_support(model, bundle.observed, 0.05);

  const double truth = metrics::peak_retention(bundle.true_signal, bundle.observed, mask);
  // An "estimate" equal to the truth plus 2% reports within 5%.
  Grid est = bundle.true_signal;
  for (double& v : est.values()) v *= 1.02;
  const double got = metrics::peak_retention(est, bundle.observed, mask);
  CHECK(std::fabs(got - truth) / truth < 0.05);
}

TEST_CASE("sum_to_2d: reduces trailing axes") {
  Grid g({2, 3, 4}, {{"H", 0.0, 1.0}, {"K", 0.0, 1.0}, {"omega", 0.0, 1.0}});
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0;
  const Grid s = metrics::sum_to_2d(g);
  CHECK(s.shape() == std::vector<std::size_t>{2, 3});
  for (double v : s.values()) CHECK(v == doctest::Approx(4.0));
}

TEST_CASE("compute_report: full row with ground truth") {
  const Grid obs = random_grid(16, 16, 41, 1.0, 3.0);
  Grid pred = obs;
  for (double& v : pred.values()) v += 0.01;
  const Grid sig_true = random_grid(16, 16, 42, 0.0, 2.0);
  Grid sig_est = sig_true;
  for (double& v : sig_est.values()) v *= 1.01;
  metrics::MetricsInputs in;
  in.predicted = &pred;
  in.observed = &obs;
  in.est_signal = &sig_est;
  in.true_signal = &sig_true;
  in.est_background = &pred;
  in.true_background = &obs;
  const auto rep = metrics::compute_report(in, 2, 0.005);
  CHECK(rep.rmse == doctest::Approx(0.01));
  CHECK(rep.mae == doctest::Approx(0.01));
  CHECK(rep.msle_sig.has_value());
  CHECK(rep.mae_bkg.has_value());
  CHECK(*rep.mae_bkg == doctest::Approx(0.01));
  CHECK(rep.r == 2);
  CHECK(rep.lambda == 0.005);
}
