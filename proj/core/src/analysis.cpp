#include "kappadyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kappadyn {

namespace {

NegativityMetrics metrics_of_real_part(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                                       double theta_rel) {
  if (state.field.size() != grid.size()) throw ConfigError("field size does not match the grid");
  if (!(theta_rel >= 0.0)) throw ConfigError("theta_rel must be non-negative");

  const double hk = state.params.hbar * state.params.kappa;
  const double scale = (state.rep == Representation::unified && hk > 0.0)
                           ? 1.0 / std::sqrt(2.0 * std::numbers::pi * hk)
                           : 1.0;

  double max_re = 0.0;
  for (const cplx& v : state.field) max_re = std::max(max_re, std::abs(v.real()));

  const double theta = theta_rel * max_re * scale;
  double neg = 0.0, pos = 0.0;
  long count = 0;
  for (const cplx& v : state.field) {
    const double w = v.real() * scale;
    if (w < 0.0) {
      neg += w;
      if (w < -theta) ++count;
    } else {
      pos += w;
    }
  }
  const double cell = grid.dx * grid.dp;
  return NegativityMetrics{neg * cell, pos * cell, static_cast<double>(count) * cell, theta};
}

}  // namespace

NegativityMetrics negativity(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                             double theta_rel) {
  double max_re = 0.0, max_im = 0.0;
  for (const cplx& v : state.field) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  if (max_im > 1e-4 * std::max(max_re, 1e-300)) {
    throw NumericsError("field imaginary residue exceeds 1e-4 of the real maximum");
  }
  return metrics_of_real_part(state, grid, theta_rel);
}

NegativityMetrics negativity_of_real_part(const PhaseSpaceState& state,
                                          const PhaseSpaceGrid& grid, double theta_rel) {
  return metrics_of_real_part(state, grid, theta_rel);
}

EvolutionVerdict classify(const TrajectoryRecord& trajectory, double tol, double floor) {
  if (trajectory.samples() == 0) throw ConfigError("trajectory has no samples");
  if (trajectory.n_minus.size() != trajectory.samples() ||
      trajectory.n_plus.size() != trajectory.samples() ||
      trajectory.negative_area.size() != trajectory.samples()) {
    throw ConfigError("trajectory lacks complete negativity series");
  }
  if (!(tol > 0.0) || !(floor > 0.0)) throw ConfigError("tolerance and floor must be positive");

  const auto drift = [&](const std::vector<double>& series) {
    const double ref = series.front();
    const double denom = std::max(std::abs(ref), floor);
    double worst = 0.0;
    for (double v : series) worst = std::max(worst, std::abs(v - ref) / denom);
    return worst;
  };

  EvolutionVerdict verdict{};
  verdict.drift_n_minus = drift(trajectory.n_minus);
  verdict.drift_n_plus = drift(trajectory.n_plus);
  verdict.drift_negative_area = drift(trajectory.negative_area);
  verdict.tolerance = tol;
  verdict.floor = floor;
  const bool quantum = verdict.drift_n_minus > tol || verdict.drift_n_plus > tol ||
                       verdict.drift_negative_area > tol;
  verdict.label = quantum ? EvolutionVerdict::Label::MandatoryQuantum
                          : EvolutionVerdict::Label::ClassicallyImplementable;
  return verdict;
}

EhrenfestResiduals ehrenfest_residuals(const TrajectoryRecord& trajectory,
                                       const PhysicalParams& params, const Potential&) {
  const std::size_t n = trajectory.samples();
  if (n < 3) throw ConfigError("ehrenfest residuals require at least 3 samples");
  if (trajectory.u_prime_mean.size() != n) {
    throw ConfigError("trajectory lacks the recorded force series");
  }
  const double h = trajectory.times[1] - trajectory.times[0];
  if (!(h > 0.0)) throw ConfigError("sample times must increase");
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs(trajectory.times[i + 1] - trajectory.times[i] - h) > 1e-9 * h) {
      throw ConfigError("ehrenfest residuals require uniform sample spacing");
    }
  }

  // d/dt by finite differences: central on the interior, second-order
  // one-sided at the two endpoints.
  const auto ddt = [&](const std::vector<double>& f, std::size_t i) {
    if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    if (i == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return (f[i + 1] - f[i - 1]) / (2.0 * h);
  };

  EhrenfestResiduals res;
  res.times = trajectory.times;
  res.r_x.resize(n);
  res.r_p.resize(n);
  res.one_sided.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    res.r_x[i] = params.mass * ddt(trajectory.x_mean, i) - trajectory.p_mean[i];
    res.r_p[i] = ddt(trajectory.p_mean, i) + trajectory.u_prime_mean[i];
  }
  res.one_sided[0] = 1;
  res.one_sided[n - 1] = 1;
  return res;
}

}  // namespace kappadyn
