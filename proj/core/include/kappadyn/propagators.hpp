#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kappadyn/states_transforms.hpp"

namespace kappadyn {

enum class Engine {
  unified,    // interpolated quantum/classical generator at the state's kappa
  kvn,        // classical amplitude advection (Koopman-von Neumann)
  liouville,  // classical density advection
};

enum class Scheme { strang };

struct PropagatorConfig {
  double dt = 0.01;
  long n_steps = 0;
  long record_every = 1;
  Scheme scheme = Scheme::strang;
  Engine engine = Engine::unified;
  long snapshot_stride = 0;        // retain every k-th sample's snapshot; 0 = endpoints only
  double area_theta_rel = 1e-4;    // negative-area threshold, relative to max |W|

  // dt > 0; record_every >= 1 and divides n_steps; snapshot_stride >= 0.
  void validate() const;
};

// Per-sample series plus snapshot handles, aligned with times; samples without
// a retained snapshot hold a null handle. The first and last snapshots are
// always retained; snapshot_stride widens retention to every k-th sample.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> norm;
  std::vector<double> purity;
  std::vector<double> integral;
  std::vector<double> n_minus;
  std::vector<double> n_plus;
  std::vector<double> negative_area;
  std::vector<double> x_mean;
  std::vector<double> p_mean;
  std::vector<double> x2_mean;
  std::vector<double> p2_mean;
  std::vector<double> u_prime_mean;  // <U'(x_q)>, consumed by the Ehrenfest residuals
  std::vector<double> energy;        // <p_q^2/2m + U(x_q)>
  std::vector<std::shared_ptr<const PhaseSpaceState>> snapshots;
  std::vector<std::string> warnings;

  std::size_t samples() const { return times.size(); }
};

// One Strang step: half potential phase in (x, lambda_p), full kinetic phase
// exp(-i p lambda_x dt / m) in (lambda_x, p), half potential phase again.
// The potential kernel is the kappa interpolation kernel at the state's kappa.
PhaseSpaceState step_unified(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                             const Potential& pot, const PhysicalParams& params, double dt);

// Same splitting with the classical force kernel -hbar*lambda_p*U'(x): exact
// x-advection by p*dt/m and p-advection by -U'(x)*dt. Identical to
// step_unified on the small-kappa branch.
PhaseSpaceState step_kvn(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                         const Potential& pot, const PhysicalParams& params, double dt);

// Classical advection of a real density. The input must be real and
// non-negative up to round-off (negative parts below 1e-12 of the maximum are
// tolerated).
PhaseSpaceState step_liouville(const PhaseSpaceState& density, const PhaseSpaceGrid& grid,
                               const Potential& pot, const PhysicalParams& params, double dt);

struct PropagationResult {
  PhaseSpaceState final_state;
  TrajectoryRecord record;
};

// Applies the configured engine n_steps times with half-step fusion between
// recording points; records at t = 0 and every record_every steps. Moments and
// energy are recorded through the shifted-argument expectation route at the
// state's kappa for the unified and kvn engines, and as density-weighted
// diagonal moments for the liouville engine. Emits a boundary-contamination
// warning when the relative field mass in the outermost two rows or columns
// exceeds 1e-10 at a sample.
PropagationResult propagate(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                            const Potential& pot, const PhysicalParams& params,
                            const PropagatorConfig& config);

// Dense verification oracle: exponentiates the exact lattice generator built
// from dense spectral-derivative matrices (scaling-and-squaring) and applies it
// to the state. Grids above 1024 sites are rejected.
PhaseSpaceState dense_oracle(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                             const Potential& pot, const PhysicalParams& params, Engine engine,
                             double t);

}  // namespace kappadyn
