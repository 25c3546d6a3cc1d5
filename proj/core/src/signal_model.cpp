#include "inrsep/signal_model.hpp"

#include <cmath>

namespace inrsep::models {

SignalModel SignalModel::analytic(AnalyticSignalParams params) {
  if (!(params.sigma_omega > 0.0)) throw DataError("SignalModel: sigma_omega must be positive");
  if (params.amplitude < 0.0) throw DataError("SignalModel: amplitude must be nonnegative");
  SignalModel m;
  m.kind_ = SignalModelKind::kAnalytic;
  m.params_ = params;
  return m;
}

SignalModel SignalModel::gridded(Grid backing) {
  if (backing.size() == 0) throw DataError("SignalModel: empty backing grid");
  SignalModel m;
  m.kind_ = SignalModelKind::kGridded;
  m.backing_ = std::move(backing);
  return m;
}

double SignalModel::dispersion(std::span<const double> momentum) const {
  const std::size_t m = momentum.size();
  if (m == 0) throw DataError("SignalModel: dispersion needs at least one momentum component");
  double gamma = 0.0;
  double nu = 1.0;
  for (double q : momentum) {
    const double c = std::cos(2.0 * M_PI * q);
    gamma += c;
    nu *= c;
  }
  gamma /= static_cast<double>(m);
  const double a = params_.J - params_.Jp * (1.0 - nu);
  const double b = params_.J * gamma;
  const double disc = a * a - b * b;
  return 2.0 * std::sqrt(disc > 0.0 ? disc : 0.0);
}

double SignalModel::eval(std::span<const double> coords) const {
  if (kind_ == SignalModelKind::kAnalytic) {
    if (coords.size() < 2) throw DataError("SignalModel: analytic eval needs (q..., omega)");
    const double omega = coords.back();
    const double wd = dispersion(coords.subspan(0, coords.size() - 1));
    const double z = (omega - wd) / params_.sigma_omega;
    return params_.amplitude * std::exp(-0.5 * z * z);
  }

  // Gridded kind: multilinear interpolation, zero outside the grid ranges.
  const Grid& g = backing_;
  if (coords.size() != g.ndim()) throw DataError("SignalModel: coordinate rank mismatch");
  const std::size_t d = g.ndim();
  std::vector<std::size_t> base(d);
  std::vector<double> frac(d);
  for (std::size_t a = 0; a < d; ++a) {
    const Axis& ax = g.axes()[a];
    const double x = coords[a];
    if (x < ax.lo || x > ax.hi) return 0.0;
    const std::size_t n = g.shape()[a];
    if (n == 1) {
      base[a] = 0;
      frac[a] = 0.0;
      continue;
    }
    const double t = (x - ax.lo) / g.step(a);
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= n - 1) i = n - 2;
    base[a] = i;
    frac[a] = t - static_cast<double>(i);
  }
  // Accumulate over the 2^d corners of the containing cell.
  double out = 0.0;
  const std::size_t corners = std::size_t{1} << d;
  std::vector<std::size_t> idx(d);
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool hi = (c >> a) & 1u;
      if (g.shape()[a] == 1) {
        if (hi) { w = 0.0; break; }
        idx[a] = 0;
        continue;
      }
      idx[a] = base[a] + (hi ? 1 : 0);
      w *= hi ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) out += w * g[g.flat_index(idx)];
  }
  return out < 0.0 ? 0.0 : out;
}

}  // namespace inrsep::models
