#pragma once

#include <span>

#include "inrsep/grid.hpp"

namespace inrsep::models {

// Parameters of the analytic ideal-signal model. Coordinates are
// (q_1..q_{d-1}, omega): momentum components in r.l.u., energy in meV.
//
// The intensity is a Gaussian ridge of width sigma_omega centered on a
// cosine-band dispersion surface. With m = d-1 momentum components the
// closed form used throughout this repository is
//
//   gamma(q) = (1/m) * sum_i cos(2*pi*q_i)
//   nu(q)    = prod_i cos(2*pi*q_i)
//   A(q)     = J - Jp * (1 - nu(q))
//   B(q)     = J * gamma(q)
//   omega_disp(q) = 2 * sqrt(max(A(q)^2 - B(q)^2, 0))
//   S(q, omega)   = amplitude * exp(-(omega - omega_disp(q))^2 / (2*sigma_omega^2))
//
// The band is symmetric under any permutation of the momentum components
// and evaluates to exactly `amplitude` on the dispersion surface. It is a
// repository constant chosen for its shape, not a physics claim.
struct AnalyticSignalParams {
  double J = 32.0;           // meV
  double Jp = -2.6;          // meV
  double amplitude = 1.0;    // intensity
  double sigma_omega = 4.0;  // meV
};

enum class SignalModelKind : std::uint8_t { kAnalytic = 0, kGridded = 1 };

// Evaluable ideal signal S_sim. Either the analytic band above, or a lookup
// into a backing grid with multilinear interpolation and zero extension
// outside the grid's physical ranges.
class SignalModel {
 public:
  static SignalModel analytic(AnalyticSignalParams params);
  static SignalModel gridded(Grid backing);

  SignalModelKind kind() const { return kind_; }
  const AnalyticSignalParams& analytic_params() const { return params_; }
  const Grid& backing() const { return backing_; }

  double dispersion(std::span<const double> momentum) const;
  // coords in physical units; last component is omega for the analytic kind.
  double eval(std::span<const double> coords) const;

 private:
  SignalModelKind kind_ = SignalModelKind::kAnalytic;
  AnalyticSignalParams params_;
  Grid backing_;
};

}  // namespace inrsep::models
