#pragma once

#include <cstdint>

#include "kappadyn/propagators.hpp"

namespace kappadyn {

// Default negative-area threshold, relative to max |W|. The raw integrals use
// no threshold; the site count does. The discrete Wigner construction of a
// smooth positive packet rings at about 1e-5 of the maximum on the flanks, and
// spectral advection adds a 1e-7-level floor, while genuine negative lobes in
// this regime reach a tenth of the maximum; the counted area of such lobes is
// flat in the threshold from 1e-12 up to 1e-4.
inline constexpr double kDefaultAreaThetaRel = 1e-4;

struct NegativityMetrics {
  double n_minus;        // integral of min(W, 0)
  double n_plus;         // integral of max(W, 0)
  double negative_area;  // count of sites with W < -theta, times dx*dp
  double threshold;      // absolute theta used
};

// Operates on the real part of a Wigner-representation field or a real
// density. Rejects fields whose imaginary residue exceeds 1e-4 of the real
// maximum as broken input.
NegativityMetrics negativity(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                             double theta_rel = kDefaultAreaThetaRel);

// Same metrics with no imaginary-residue admission check. Trajectory recording
// uses this for amplitude engines, where the transported phase is physically
// irrelevant and the conserved quantities live on the real part alone.
NegativityMetrics negativity_of_real_part(const PhaseSpaceState& state,
                                          const PhaseSpaceGrid& grid,
                                          double theta_rel = kDefaultAreaThetaRel);

struct EvolutionVerdict {
  enum class Label { ClassicallyImplementable, MandatoryQuantum };

  Label label;
  double drift_n_minus;
  double drift_n_plus;
  double drift_negative_area;
  double tolerance;
  double floor;
};

// Drift of each negativity series: max over samples of
// |m(t) - m(0)| / max(|m(0)|, floor), measured against t = 0. The verdict is
// MandatoryQuantum iff any drift exceeds the tolerance. ClassicallyImplementable
// encodes only the weaker claim that nothing in the negativity series rules
// out a classical realization.
EvolutionVerdict classify(const TrajectoryRecord& trajectory, double tol = 0.05,
                          double floor = 0.01);

struct EhrenfestResiduals {
  std::vector<double> times;
  std::vector<double> r_x;           // m * d<x_q>/dt - <p_q>
  std::vector<double> r_p;           // d<p_q>/dt + <U'(x_q)>
  std::vector<std::uint8_t> one_sided;  // endpoint samples use one-sided stencils
};

// Central differences on the interior, second-order one-sided stencils at the
// endpoints (flagged). Requires at least 3 uniformly spaced samples.
EhrenfestResiduals ehrenfest_residuals(const TrajectoryRecord& trajectory,
                                       const PhysicalParams& params, const Potential& pot);

}  // namespace kappadyn
