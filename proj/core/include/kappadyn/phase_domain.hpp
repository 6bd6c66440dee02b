#pragma once

#include <vector>

#include "kappadyn/errors.hpp"

namespace kappadyn {

// Below this value the interpolation parameter is treated as exactly classical:
// the finite-difference potential kernel switches to its analytic limit to avoid
// catastrophic cancellation in the 1/kappa quotient.
inline constexpr double kSmallKappaThreshold = 1e-6;

struct PhysicalParams {
  double hbar = 1.0;
  double mass = 1.0;
  double kappa = 1.0;  // 1 = quantum, 0 = classical, in between interpolates

  // Throws ConfigError unless hbar > 0, mass > 0 and kappa in [0, 1].
  void validate() const;
};

// Uniform rectangular phase-space lattice with the conjugate spectral
// frequencies in standard DFT layout: {0, 1, ..., n/2-1, -n/2, ..., -1} * 2*pi/(n*d).
struct PhaseSpaceGrid {
  int nx = 0;
  int np = 0;
  double x_min = 0.0, x_max = 0.0;
  double p_min = 0.0, p_max = 0.0;
  double dx = 0.0, dp = 0.0;
  std::vector<double> x;         // x[j] = x_min + j*dx
  std::vector<double> p;         // p[k] = p_min + k*dp
  std::vector<double> lambda_x;  // conjugate to x
  std::vector<double> lambda_p;  // conjugate to p

  std::size_t size() const { return static_cast<std::size_t>(nx) * np; }
};

// Counts must be even and >= 8; extents must be increasing.
PhaseSpaceGrid build_grid(int nx, int np, double x_min, double x_max, double p_min,
                          double p_max);

// Potential families with closed-form derivatives. U' is always the exact
// analytic derivative, never a finite difference.
struct Potential {
  enum class Family { free, harmonic, morse, polynomial };

  Family family = Family::free;
  double m = 1.0;               // harmonic
  double omega = 1.0;           // harmonic
  double D = 0.0;               // morse depth
  double a = 0.0;               // morse range
  std::vector<double> coeffs;   // polynomial, ascending powers

  static Potential free_particle();
  static Potential harmonic(double m, double omega);
  static Potential morse(double D, double a);
  static Potential polynomial(std::vector<double> coeffs);

  double value(double x) const;
  double derivative(double x) const;
  bool is_quadratic() const;
};

struct PotentialSample {
  double U;
  double dU;
};

// Polynomial overflow (non-finite result) throws NumericsError.
PotentialSample evaluate_potential(const Potential& pot, double x);

// Tabulates the split-step potential kernel K(x, lambda_p) on the lattice,
// row-major [j*np + k]. For kappa >= the small-kappa threshold:
//   K = (U(x - s) - U(x + s)) / kappa,  s = hbar*kappa*lambda_p/2.
// Below the threshold the analytic classical limit -hbar*lambda_p*U'(x) is
// tabulated instead. The kernel is odd in lambda_p and kappa-independent for
// quadratic potentials. Non-finite samples throw NumericsError naming the site.
std::vector<double> kappa_potential_kernel(const PhaseSpaceGrid& grid, const Potential& pot,
                                           const PhysicalParams& params);

// The same tabulation with the classical limit forced; used by the classical
// advection engines independently of the stored kappa.
std::vector<double> classical_force_kernel(const PhaseSpaceGrid& grid, const Potential& pot,
                                           const PhysicalParams& params);

}  // namespace kappadyn
