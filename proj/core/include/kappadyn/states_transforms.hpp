#pragma once

#include <complex>
#include <vector>

#include "kappadyn/phase_domain.hpp"

namespace kappadyn {

using cplx = std::complex<double>;

// Pure state over the x axis of a grid. Normalized: sum |phi|^2 dx = 1 within 1e-10.
struct ConfigurationState {
  std::vector<cplx> amplitudes;
  PhysicalParams params;

  void validate(const PhaseSpaceGrid& grid) const;
};

// rho(x, x') over the x axis squared, row-major [u*nx + v].
// Hermitian with unit trace; kept for construction and verification paths,
// production propagation never materializes it.
struct DensityMatrix {
  int n = 0;
  std::vector<cplx> rho;
  PhysicalParams params;

  static DensityMatrix from_pure(const ConfigurationState& phi, const PhaseSpaceGrid& grid);
  void validate(const PhaseSpaceGrid& grid) const;
};

enum class Representation {
  wigner,   // field is W(x, p)
  unified,  // field is sqrt(2*pi*hbar*kappa) * W(x, p)
};

// Complex field over the full lattice, row-major [j*np + k].
struct PhaseSpaceState {
  std::vector<cplx> field;
  PhysicalParams params;
  Representation rep = Representation::wigner;
  double time = 0.0;
};

// Wigner transform of a pure state: y-offset Fourier transform of the pair
// correlation phi(x - y/2) phi*(x + y/2), with phi extended by zero outside the
// box. Periodic wrap is wrong here: it folds both correlation arms onto the
// packet for boundary rows and creates ghost images. Rejects kappa = 0.
PhaseSpaceState wigner_from_pure(const ConfigurationState& phi, const PhaseSpaceGrid& grid);

// Multiplies or divides by sqrt(2*pi*hbar*kappa). Rejects kappa = 0.
PhaseSpaceState convert(const PhaseSpaceState& state, Representation target);

struct NormPurity {
  double norm;      // integral |Psi|^2 dx dp in the unified scaling
  double purity;    // 2*pi*hbar*kappa * integral W^2; equals norm by the scaling
  double integral;  // integral W dx dp
};

NormPurity norm_and_purity(const PhaseSpaceState& state, const PhaseSpaceGrid& grid);

// One-variable observable factor, applied at a shifted argument.
struct Observable1D {
  enum class Kind { identity, coordinate, square, potential, potential_derivative, polynomial };

  Kind kind = Kind::identity;
  Potential pot;                // potential / potential_derivative composition
  std::vector<double> coeffs;   // polynomial, ascending powers

  static Observable1D identity();
  static Observable1D coordinate();
  static Observable1D square();
  static Observable1D potential(Potential p);
  static Observable1D potential_derivative(Potential p);
  static Observable1D polynomial(std::vector<double> coeffs);

  double eval(double v) const;
};

// Ordered product G(x_q) F(p_q) with x_q = x - hbar*kappa*lambda_p/2 and
// p_q = p + hbar*kappa*lambda_x/2. F is applied first, then G.
struct ObservableSpec {
  Observable1D G;
  Observable1D F;
};

struct ExpectationResult {
  cplx value;             // raw inner product <Psi| G F |Psi>, not norm-divided
  double alias_fraction;  // spectral weight whose shifted argument leaves the box
};

// Applies F(p_q) diagonally in the (lambda_x, p) representation, then G(x_q)
// diagonally in (x, lambda_p), then the inner product against the state. The
// shifted-argument evaluation is continuous in kappa and degenerates to plain
// diagonal multiplication at kappa = 0.
ExpectationResult expectation(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                              const ObservableSpec& obs);

struct Marginals {
  std::vector<double> x_density;  // integral over p
  std::vector<double> p_density;  // integral over x
};

// Wigner representation only; each marginal integrates to the full integral of W.
Marginals marginals(const PhaseSpaceState& state, const PhaseSpaceGrid& grid);

// Displaced Gaussian (hermite_order 0) or Gaussian x Hermite (hermite_order 1)
// with sigma_p = hbar*kappa/(2*sigma_x), built through the Wigner transform.
// For kappa below the classical threshold the same functional form is built
// directly on phase space with sigma_p = hbar/(2*sigma_x): a classical
// amplitude carries no uncertainty constraint, and the quantum-width choice
// keeps classical and quantum runs starting from the same field.
// Rejects states whose mass outside the box exceeds 1e-10.
PhaseSpaceState gaussian_state(double x0, double p0, double sigma_x,
                               const PhysicalParams& params, const PhaseSpaceGrid& grid,
                               int hermite_order);

// The underlying x-axis amplitude of gaussian_state for kappa > 0; exposed for
// verification against configuration-space expectations.
ConfigurationState gaussian_configuration(double x0, double p0, double sigma_x,
                                          const PhysicalParams& params,
                                          const PhaseSpaceGrid& grid, int hermite_order);

}  // namespace kappadyn
