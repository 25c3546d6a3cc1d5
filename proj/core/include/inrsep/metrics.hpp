#pragma once

#include <optional>

#include "inrsep/grid.hpp"
#include "inrsep/lambda_estimator.hpp"

namespace inrsep::metrics {

// Scalar metrics. Argument order matters for the asymmetric ones and is
// part of each signature: (estimate, reference).

double rmse(const Grid& a, const Grid& b);
double mae(const Grid& a, const Grid& b);
// Relative error ||a-b||_2 / ||b||_2; errors when ||b||_2 == 0.
double relative_error(const Grid& a, const Grid& b);

// 20*log10(peak/rmse); +inf sentinel when rmse == 0. peak defaults to
// max(b) when not supplied and must be positive.
double psnr(const Grid& a, const Grid& b, std::optional<double> peak = std::nullopt);

// Structural similarity with a 7x7 uniform window, k1=0.01, k2=0.03,
// dynamic range max(b)-min(b), unbiased covariance, averaged over fully
// valid windows. N-dimensional inputs are summed down to their first two
// axes first.
double ssim(const Grid& a, const Grid& b);

// Mean squared log error between nonnegative intensity grids.
double msle_sig(const Grid& est_signal, const Grid& true_signal);

struct Chi2Result {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t included_cells = 0;
  std::size_t dof = 0;
};

// Pearson statistic sum((obs-pred)^2 / pred) over cells with pred >= floor,
// dof = included - 1, p-value from the upper tail of the chi-squared
// distribution. floor defaults to 1e-6 * max(pred).
Chi2Result chi2(const Grid& observed, const Grid& predicted,
                std::optional<double> floor = std::nullopt);

// One Tables-style row of reconstruction statistics.
struct MetricsReport {
  double rmse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double mae = 0.0;
  double re = 0.0;
  std::optional<double> msle_sig;  // present when a true signal is supplied
  std::optional<double> mae_bkg;   // present when a true background is supplied
  double chi2 = 0.0;
  double chi2_pval = 1.0;
  std::size_t r = 0;
  double lambda = 0.0;
};

struct MetricsInputs {
  const Grid* predicted = nullptr;  // reconstructed total
  const Grid* observed = nullptr;   // raw measurement / reference
  const Grid* est_signal = nullptr;
  const Grid* true_signal = nullptr;
  const Grid* est_background = nullptr;
  const Grid* true_background = nullptr;
};

MetricsReport compute_report(const MetricsInputs& inputs, std::size_t r, double lambda);

// Sum an N-d grid down to its first two axes (visualization convention).
Grid sum_to_2d(const Grid& grid);

// ---- Projection / Fourier / slice diagnostics ------------------------------

// Axis-aligned (alpha=0: sum over the first axis, profile over the second)
// or diagonal (alpha=45: sums over i-j = const bins) line integrals of a 2-D
// slice. Other angles are unsupported.
std::vector<double> radon_projection(const Grid& slice2d, double alpha_degrees = 0.0);

// Magnitudes of the xi_H = 0 row of the 2-D DFT of the slice. Exact O(n^2)
// transform; slice sizes here are small.
std::vector<double> fourier_central_slice(const Grid& slice2d);

// Complex DFT of a real vector (exposed for the projection-slice check).
std::vector<std::pair<double, double>> dft_1d(std::span<const double> x);

// Values along i == j of a square 2-D slice.
std::vector<double> diagonal_slice(const Grid& slice2d);

struct PixelDiffResult {
  std::vector<std::size_t> counts;   // histogram of a-b
  std::vector<double> bin_edges;     // counts.size() + 1 edges
  std::vector<std::pair<double, double>> scatter;  // (b_i, a_i)
};

PixelDiffResult pixel_diff_histogram(const Grid& a, const Grid& b, std::size_t bins);

// Minimum over connected components of the support mask of
// max(separated)/max(raw) within the component.
double peak_retention(const Grid& separated, const Grid& raw,
                      const lambda_est::SupportMask& support);

}  // namespace inrsep::metrics
