#pragma once

#include "inrsep/separation.hpp"

namespace inrsep::lambda_est {

// Boolean signal-support mask over a grid, plus a record of how it was
// derived.
struct SupportMask {
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> inside;  // 1 = inside the signal support
  double tau = 0.0;
  std::string source;

  std::size_t count_inside() const;
  std::size_t count_outside() const;
};

// Threshold rule: inside = { x : S_sim(x) > tau * max S_sim }. Errors when
// the signal model is identically zero on the grid.
SupportMask derive_support(const models::SignalModel& model, const Grid& geometry, double tau);

struct SingleFitOptions {
  std::size_t epochs = 200;
  std::size_t batch_size = 1024;
  double lr = 3e-4;
  std::uint64_t seed = 7;
  std::size_t hidden_width = 128;  // BkgdNet-style single hidden layer
  double w0 = 30.0;
};

struct SingleFitResult {
  Grid approx;
  Grid residual;  // observed - approx
  std::vector<double> loss_trace;
};

// Plain-MSE fit of a single SIREN to the observed grid. The reconstruction
// residual approximates the noise component through the network's
// low-frequency bias.
SingleFitResult fit_single_inr(const Grid& observed, const SingleFitOptions& options);

// Separable Gaussian low-pass filter: reflect padding about the edge node,
// kernel truncated at 4 sigma, weights normalized to unit sum.
Grid gaussian_lpf(const Grid& grid, double sigma_cells);

struct LambdaOptions {
  double sigma_lpf = 5.0;
  SingleFitOptions fit;
};

struct LambdaEstimate {
  double lambda_star = 0.0;
  double numerator = 0.0;    // ||(observed - f_approx)|_off-support||_2
  double denominator = 0.0;  // ||LPF(observed)|_off-support||_2
};

// Algebraic core of the estimate: ratio of masked L2 norms. Pure in its
// inputs; exposed separately so its invariants are testable without a fit.
LambdaEstimate lambda_from_parts(const Grid& residual, const Grid& lpf_observed,
                                 const SupportMask& mask);

// Full estimator: single-INR fit for the residual, Gaussian LPF for the
// background magnitude, both restricted to the support complement.
LambdaEstimate estimate_lambda(const Grid& observed, const SupportMask& mask,
                               const LambdaOptions& options);

}  // namespace inrsep::lambda_est
