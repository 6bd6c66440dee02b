#include "kappadyn/phase_domain.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace kappadyn {

namespace {

// DFT frequency layout {0, ..., n/2-1, -n/2, ..., -1} * 2*pi/(n*d).
std::vector<double> spectral_axis(int n, double d) {
  std::vector<double> out(n);
  const double step = 2.0 * std::numbers::pi / (n * d);
  for (int i = 0; i < n; ++i) {
    const int k = (i < n / 2) ? i : i - n;
    out[i] = k * step;
  }
  return out;
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

void PhysicalParams::validate() const {
  if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in [0,1]");
}

PhaseSpaceGrid build_grid(int nx, int np, double x_min, double x_max, double p_min,
                          double p_max) {
  if (nx < 8 || np < 8) throw ConfigError("grid counts must be at least 8");
  if (nx % 2 != 0 || np % 2 != 0) throw ConfigError("grid counts must be even");
  if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");
  if (!(p_max > p_min)) throw ConfigError("p_max must exceed p_min");

  PhaseSpaceGrid g;
  g.nx = nx;
  g.np = np;
  g.x_min = x_min;
  g.x_max = x_max;
  g.p_min = p_min;
  g.p_max = p_max;
  g.dx = (x_max - x_min) / nx;
  g.dp = (p_max - p_min) / np;
  g.x.resize(nx);
  g.p.resize(np);
  for (int j = 0; j < nx; ++j) g.x[j] = x_min + j * g.dx;
  for (int k = 0; k < np; ++k) g.p[k] = p_min + k * g.dp;
  g.lambda_x = spectral_axis(nx, g.dx);
  g.lambda_p = spectral_axis(np, g.dp);
  return g;
}

Potential Potential::free_particle() {
  Potential p;
  p.family = Family::free;
  return p;
}

Potential Potential::harmonic(double m, double omega) {
  Potential p;
  p.family = Family::harmonic;
  p.m = m;
  p.omega = omega;
  return p;
}

Potential Potential::morse(double D, double a) {
  Potential p;
  p.family = Family::morse;
  p.D = D;
  p.a = a;
  return p;
}

Potential Potential::polynomial(std::vector<double> coeffs) {
  Potential p;
  p.family = Family::polynomial;
  p.coeffs = std::move(coeffs);
  return p;
}

double Potential::value(double x) const {
  switch (family) {
    case Family::free:
      return 0.0;
    case Family::harmonic:
      return 0.5 * m * omega * omega * x * x;
    case Family::morse: {
      const double e = std::exp(-a * x);
      const double w = 1.0 - e;
      return D * w * w;
    }
    case Family::polynomial:
      return horner(coeffs, x);
  }
  return 0.0;
}

double Potential::derivative(double x) const {
  switch (family) {
    case Family::free:
      return 0.0;
    case Family::harmonic:
      return m * omega * omega * x;
    case Family::morse: {
      const double e = std::exp(-a * x);
      return 2.0 * D * a * (1.0 - e) * e;
    }
    case Family::polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + coeffs[i] * double(i);
      return acc;
    }
  }
  return 0.0;
}

bool Potential::is_quadratic() const {
  switch (family) {
    case Family::free:
    case Family::harmonic:
      return true;
    case Family::morse:
      return false;
    case Family::polynomial:
      return coeffs.size() <= 3;
  }
  return false;
}

PotentialSample evaluate_potential(const Potential& pot, double x) {
  if (!std::isfinite(x)) throw ConfigError("potential evaluated at non-finite x");
  PotentialSample s{pot.value(x), pot.derivative(x)};
  if (pot.family == Potential::Family::polynomial &&
      (!std::isfinite(s.U) || !std::isfinite(s.dU))) {
    throw NumericsError("polynomial potential overflow at x = " + std::to_string(x));
  }
  return s;
}

namespace {

std::vector<double> tabulate_kernel(const PhaseSpaceGrid& grid, const Potential& pot,
                                    const PhysicalParams& params, bool classical_limit) {
  params.validate();
  std::vector<double> K(grid.size());
  const double hbar = params.hbar;
  const double kappa = params.kappa;
  for (int j = 0; j < grid.nx; ++j) {
    const double xj = grid.x[j];
    const double dU = pot.derivative(xj);
    for (int k = 0; k < grid.np; ++k) {
      const double lp = grid.lambda_p[k];
      double v;
      if (classical_limit) {
        v = -hbar * lp * dU;
      } else {
        const double s = 0.5 * hbar * kappa * lp;
        v = (pot.value(xj - s) - pot.value(xj + s)) / kappa;
      }
      if (!std::isfinite(v)) {
        throw NumericsError("non-finite potential kernel at site (j=" + std::to_string(j) +
                            ", k=" + std::to_string(k) + "), x = " + std::to_string(xj) +
                            ", lambda_p = " + std::to_string(lp));
      }
      K[static_cast<std::size_t>(j) * grid.np + k] = v;
    }
  }
  return K;
}

}  // namespace

std::vector<double> kappa_potential_kernel(const PhaseSpaceGrid& grid, const Potential& pot,
                                           const PhysicalParams& params) {
  const bool classical = params.kappa < kSmallKappaThreshold;
  return tabulate_kernel(grid, pot, params, classical);
}

std::vector<double> classical_force_kernel(const PhaseSpaceGrid& grid, const Potential& pot,
                                           const PhysicalParams& params) {
  return tabulate_kernel(grid, pot, params, true);
}

}  // namespace kappadyn
