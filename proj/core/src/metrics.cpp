#include "inrsep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

namespace inrsep::metrics {

namespace {

void require_same_shape(const Grid& a, const Grid& b, const char* who) {
  if (a.shape() != b.shape()) throw ShapeError(std::string(who) + ": shape mismatch");
}

double l2_norm(const Grid& g) {
  double acc = 0.0;
  for (double v : g.values()) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace

double rmse(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double mae(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "mae");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double relative_error(const Grid& a, const Grid& b) {
  require_same_shape(a, b, "relative_error");
  const double denom = l2_norm(b);
  if (denom == 0.0) throw DataError("relative_error: reference norm is zero");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc) / denom;
}

double psnr(const Grid& a, const Grid& b, std::optional<double> peak) {
  require_same_shape(a, b, "psnr");
  const double p = peak.value_or(*std::max_element(b.values().begin(), b.values().end()));
  if (!(p > 0.0)) throw DataError("psnr: peak must be positive");
  const double e = rmse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(p / e);
}

Grid sum_to_2d(const Grid& grid) {
  if (grid.ndim() < 2) throw DataError("sum_to_2d: need at least two axes");
  if (grid.ndim() == 2) return grid;
  const std::size_t n0 = grid.shape()[0];
  const std::size_t n1 = grid.shape()[1];
  std::size_t rest = 1;
  for (std::size_t a = 2; a < grid.ndim(); ++a) rest *= grid.shape()[a];
  Grid out({n0, n1}, {grid.axes()[0], grid.axes()[1]});
  for (std::size_t i = 0; i < n0 * n1; ++i) {
    double acc = 0.0;
    const double* src = &grid.values()[i * rest];
    for (std::size_t k = 0; k < rest; ++k) acc += src[k];
    out[i] = acc;
  }
  return out;
}

double ssim(const Grid& a_in, const Grid& b_in) {
  require_same_shape(a_in, b_in, "ssim");
  const Grid a = sum_to_2d(a_in);
  const Grid b = sum_to_2d(b_in);
  const std::size_t H = a.shape()[0], W = a.shape()[1];
  constexpr std::size_t win = 7;
  if (H < win || W < win) throw DataError("ssim: window larger than slice");

  const auto [bmin_it, bmax_it] = std::minmax_element(b.values().begin(), b.values().end());
  double range = *bmax_it - *bmin_it;
  if (range == 0.0) {
    // Degenerate flat reference: identical grids are a perfect match,
    // otherwise fall back to the estimate's span.
    if (a.values() == b.values()) return 1.0;
    const auto [amin_it, amax_it] = std::minmax_element(a.values().begin(), a.values().end());
    range = *amax_it - *amin_it;
    if (range == 0.0) range = 1.0;
  }
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);

  const double n = static_cast<double>(win * win);
  const double cov_norm = n / (n - 1.0);  // unbiased
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + win <= H; ++i) {
    for (std::size_t j = 0; j + win <= W; ++j) {
      double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t di = 0; di < win; ++di) {
        const double* ra = &a.values()[(i + di) * W + j];
        const double* rb = &b.values()[(i + di) * W + j];
        for (std::size_t dj = 0; dj < win; ++dj) {
          sa += ra[dj];
          sb += rb[dj];
          saa += ra[dj] * ra[dj];
          sbb += rb[dj] * rb[dj];
          sab += ra[dj] * rb[dj];
        }
      }
      const double ma = sa / n, mb = sb / n;
      const double va = cov_norm * (saa / n - ma * ma);
      const double vb = cov_norm * (sbb / n - mb * mb);
      const double vab = cov_norm * (sab / n - ma * mb);
      acc += ((2.0 * ma * mb + c1) * (2.0 * vab + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

double msle_sig(const Grid& est_signal, const Grid& true_signal) {
  require_same_shape(est_signal, true_signal, "msle_sig");
  double acc = 0.0;
  for (std::size_t i = 0; i < est_signal.size(); ++i) {
    if (est_signal[i] < 0.0 || true_signal[i] < 0.0) {
      throw DataError("msle_sig: inputs must be nonnegative");
    }
    const double d = std::log1p(est_signal[i]) - std::log1p(true_signal[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(est_signal.size());
}

Chi2Result chi2(const Grid& observed, const Grid& predicted, std::optional<double> floor) {
  require_same_shape(observed, predicted, "chi2");
  const double pmax = *std::max_element(predicted.values().begin(), predicted.values().end());
  const double f = floor.value_or(1e-6 * pmax);
  Chi2Result out;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double p = predicted[i];
    if (p < f) continue;
    const double d = observed[i] - p;
    stat += d * d / std::max(p, f);
    ++out.included_cells;
  }
  if (out.included_cells == 0) throw DataError("chi2: no cells above the floor");
  out.statistic = stat;
  out.dof = out.included_cells > 1 ? out.included_cells - 1 : 1;
  if (stat <= 0.0) {
    out.p_value = 1.0;
  } else {
    out.p_value = boost::math::gamma_q(static_cast<double>(out.dof) / 2.0, stat / 2.0);
  }
  return out;
}

MetricsReport compute_report(const MetricsInputs& inputs, std::size_t r, double lambda) {
  if (inputs.predicted == nullptr || inputs.observed == nullptr) {
    throw DataError("compute_report: predicted and observed grids are required");
  }
  MetricsReport rep;
  rep.r = r;
  rep.lambda = lambda;
  rep.rmse = rmse(*inputs.predicted, *inputs.observed);
  rep.psnr = psnr(*inputs.predicted, *inputs.observed);
  rep.ssim = ssim(*inputs.predicted, *inputs.observed);
  rep.mae = mae(*inputs.predicted, *inputs.observed);
  rep.re = relative_error(*inputs.predicted, *inputs.observed);
  const Chi2Result c = chi2(*inputs.observed, *inputs.predicted);
  rep.chi2 = c.statistic;
  rep.chi2_pval = c.p_value;
  if (inputs.est_signal != nullptr && inputs.true_signal != nullptr) {
    rep.msle_sig = msle_sig(*inputs.est_signal, *inputs.true_signal);
  }
  if (inputs.est_background != nullptr && inputs.true_background != nullptr) {
    rep.mae_bkg = mae(*inputs.est_background, *inputs.true_background);
  }
  return rep;
}

std::vector<double> radon_projection(const Grid& slice2d, double alpha_degrees) {
  if (slice2d.ndim() != 2) throw DataError("radon_projection: need a 2-D slice");
  const std::size_t H = slice2d.shape()[0], W = slice2d.shape()[1];
  if (alpha_degrees == 0.0) {
    std::vector<double> profile(W, 0.0);
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) profile[j] += slice2d[i * W + j];
    }
    return profile;
  }
  if (alpha_degrees == 45.0) {
    if (H != W) throw DataError("radon_projection: 45-degree projection needs a square slice");
    // Bin index = i - j + (n-1), i.e. sums along the main-diagonal direction.
    std::vector<double> profile(2 * H - 1, 0.0);
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        profile[i - j + (W - 1)] += slice2d[i * W + j];
      }
    }
    return profile;
  }
  throw DataError("radon_projection: unsupported angle (0 and 45 degrees only)");
}

std::vector<std::pair<double, double>> dft_1d(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phi = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(j) /
                         static_cast<double>(n);
      re += x[j] * std::cos(phi);
      im += x[j] * std::sin(phi);
    }
    out[k] = {re, im};
  }
  return out;
}

std::vector<double> fourier_central_slice(const Grid& slice2d) {
  if (slice2d.ndim() != 2) throw DataError("fourier_central_slice: need a 2-D slice");
  const std::size_t H = slice2d.shape()[0], W = slice2d.shape()[1];
  // Row xi_H = 0 of the 2-D DFT only involves the sum over the first axis,
  // but compute it as a genuine 2-D transform row: for each output column k,
  // sum_{i,j} g[i,j] * exp(-2*pi*I*(0*i/H + k*j/W)).
  std::vector<double> out(W, 0.0);
  for (std::size_t k = 0; k < W; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < H; ++i) {
      const double* row = &slice2d.values()[i * W];
      for (std::size_t j = 0; j < W; ++j) {
        const double phi = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(j) /
                           static_cast<double>(W);
        re += row[j] * std::cos(phi);
        im += row[j] * std::sin(phi);
      }
    }
    out[k] = std::hypot(re, im);
  }
  return out;
}

std::vector<double> diagonal_slice(const Grid& slice2d) {
  if (slice2d.ndim() != 2) throw DataError("diagonal_slice: need a 2-D slice");
  const std::size_t H = slice2d.shape()[0], W = slice2d.shape()[1];
  if (H != W) throw DataError("diagonal_slice: slice must be square");
  std::vector<double> out(H);
  for (std::size_t i = 0; i < H; ++i) out[i] = slice2d[i * W + i];
  return out;
}

PixelDiffResult pixel_diff_histogram(const Grid& a, const Grid& b, std::size_t bins) {
  require_same_shape(a, b, "pixel_diff_histogram");
  if (bins < 1) throw DataError("pixel_diff_histogram: bins must be >= 1");
  PixelDiffResult out;
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const auto [lo_it, hi_it] = std::minmax_element(diff.begin(), diff.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) hi = lo + 1.0;  // all differences identical: one occupied bin
  out.counts.assign(bins, 0);
  out.bin_edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    out.bin_edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  for (double d : diff) {
    std::size_t k = static_cast<std::size_t>((d - lo) / (hi - lo) * static_cast<double>(bins));
    if (k >= bins) k = bins - 1;
    ++out.counts[k];
  }
  out.scatter.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.scatter.emplace_back(b[i], a[i]);
  return out;
}

double peak_retention(const Grid& separated, const Grid& raw,
                      const lambda_est::SupportMask& support) {
  require_same_shape(separated, raw, "peak_retention");
  if (separated.shape() != support.shape) throw ShapeError("peak_retention: mask shape mismatch");
  if (support.count_inside() == 0) throw DataError("peak_retention: no peaks found");

  // Connected components of the mask under face adjacency.
  const std::size_t cells = separated.size();
  std::vector<int> label(cells, -1);
  int next_label = 0;
  std::deque<std::size_t> queue;
  double retention = std::numeric_limits<double>::infinity();
  for (std::size_t seed = 0; seed < cells; ++seed) {
    if (!support.inside[seed] || label[seed] >= 0) continue;
    double max_sep = -std::numeric_limits<double>::infinity();
    double max_raw = -std::numeric_limits<double>::infinity();
    label[seed] = next_label;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      max_sep = std::max(max_sep, separated[cur]);
      max_raw = std::max(max_raw, raw[cur]);
      const auto idx = separated.unflatten(cur);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (int dir = -1; dir <= 1; dir += 2) {
          const long j = static_cast<long>(idx[a]) + dir;
          if (j < 0 || j >= static_cast<long>(separated.shape()[a])) continue;
          auto nidx = idx;
          nidx[a] = static_cast<std::size_t>(j);
          const std::size_t nf = separated.flat_index(nidx);
          if (support.inside[nf] && label[nf] < 0) {
            label[nf] = next_label;
            queue.push_back(nf);
          }
        }
      }
    }
    ++next_label;
    if (max_raw <= 0.0) throw DataError("peak_retention: nonpositive raw peak");
    retention = std::min(retention, max_sep / max_raw);
  }
  return retention;
}

}  // namespace inrsep::metrics
