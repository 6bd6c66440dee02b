#include "kappadyn/states_transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "fft_detail.hpp"

namespace kappadyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_grid_match(std::size_t field_size, const PhaseSpaceGrid& grid) {
  if (field_size != grid.size()) throw ConfigError("field size does not match the grid");
}

// Unified-scaling factor applied to the stored field to obtain the wave
// function. At kappa = 0 the stored field is the classical amplitude itself.
double unified_scale(const PhaseSpaceState& state) {
  const double hk = state.params.hbar * state.params.kappa;
  if (state.rep == Representation::unified || hk <= 0.0) return 1.0;
  return std::sqrt(kTwoPi * hk);
}

// One-sided tail mass of the hermite_order-modulated Gaussian density beyond
// distance d from the center.
double gaussian_tail(double d, double sigma, int order) {
  const double z = d / (sigma * std::numbers::sqrt2);
  const double base = 0.5 * std::erfc(z);
  if (order == 0) return base;
  return base + z * std::exp(-z * z) / std::sqrt(std::numbers::pi);
}

}  // namespace

void ConfigurationState::validate(const PhaseSpaceGrid& grid) const {
  if (amplitudes.size() != static_cast<std::size_t>(grid.nx)) {
    throw ConfigError("configuration state size does not match the x axis");
  }
  params.validate();
  double nrm = 0.0;
  for (const cplx& a : amplitudes) nrm += std::norm(a);
  nrm *= grid.dx;
  if (std::abs(nrm - 1.0) > 1e-10) {
    throw ConfigError("configuration state is not normalized: got " + std::to_string(nrm));
  }
}

DensityMatrix DensityMatrix::from_pure(const ConfigurationState& phi,
                                       const PhaseSpaceGrid& grid) {
  phi.validate(grid);
  DensityMatrix d;
  d.n = grid.nx;
  d.params = phi.params;
  d.rho.resize(static_cast<std::size_t>(grid.nx) * grid.nx);
  for (int u = 0; u < grid.nx; ++u) {
    for (int v = 0; v < grid.nx; ++v) {
      d.rho[static_cast<std::size_t>(u) * grid.nx + v] =
          phi.amplitudes[u] * std::conj(phi.amplitudes[v]);
    }
  }
  return d;
}

void DensityMatrix::validate(const PhaseSpaceGrid& grid) const {
  if (n != grid.nx || rho.size() != static_cast<std::size_t>(n) * n) {
    throw ConfigError("density matrix size does not match the x axis");
  }
  double max_abs = 0.0;
  for (const cplx& v : rho) max_abs = std::max(max_abs, std::abs(v));
  double herm = 0.0;
  cplx tr = 0.0;
  for (int u = 0; u < n; ++u) {
    tr += rho[static_cast<std::size_t>(u) * n + u];
    for (int v = 0; v < u; ++v) {
      herm = std::max(herm, std::abs(rho[static_cast<std::size_t>(u) * n + v] -
                                     std::conj(rho[static_cast<std::size_t>(v) * n + u])));
    }
  }
  if (herm > 1e-12 * std::max(max_abs, 1e-300)) {
    throw ConfigError("density matrix is not Hermitian");
  }
  if (std::abs(tr * grid.dx - 1.0) > 1e-10) {
    throw ConfigError("density matrix trace is not 1");
  }
}

PhaseSpaceState wigner_from_pure(const ConfigurationState& phi, const PhaseSpaceGrid& grid) {
  phi.validate(grid);
  const double hk = phi.params.hbar * phi.params.kappa;
  if (hk <= 0.0) {
    throw ConfigError(
        "kappa = 0 admits no quantum pure state; build the phase-space amplitude directly");
  }
  const int nx = grid.nx;
  const int np = grid.np;

  // Offset phases e^{i p_k y_m / (hbar kappa)} with y_m = 2 m dx.
  std::vector<cplx> E(static_cast<std::size_t>(nx) * np);
  for (int m = -nx / 2; m < nx / 2; ++m) {
    cplx* row = &E[static_cast<std::size_t>(m + nx / 2) * np];
    const double ym = 2.0 * m * grid.dx;
    for (int k = 0; k < np; ++k) row[k] = std::polar(1.0, grid.p[k] * ym / hk);
  }

  PhaseSpaceState out;
  out.params = phi.params;
  out.rep = Representation::wigner;
  out.field.resize(grid.size());
  // dy/(2 pi hbar kappa) with dy = 2 dx.
  const double weight = grid.dx / (std::numbers::pi * hk);
  std::vector<double> row(np);
  for (int j = 0; j < nx; ++j) {
    // Zero extension: only offsets with both correlation arms inside the box
    // contribute. Conjugate-pair symmetry in m makes each row exactly real.
    const int mmax = std::min(j, nx - 1 - j);
    std::fill(row.begin(), row.end(), 0.0);
    const double c0 = std::norm(phi.amplitudes[j]);
    for (int k = 0; k < np; ++k) row[k] = c0;
    for (int m = 1; m <= mmax; ++m) {
      const cplx c = phi.amplitudes[j - m] * std::conj(phi.amplitudes[j + m]);
      const cplx* e = &E[static_cast<std::size_t>(m + nx / 2) * np];
      for (int k = 0; k < np; ++k) {
        row[k] += 2.0 * (c.real() * e[k].real() - c.imag() * e[k].imag());
      }
    }
    cplx* dst = &out.field[static_cast<std::size_t>(j) * np];
    for (int k = 0; k < np; ++k) dst[k] = cplx{row[k] * weight, 0.0};
  }
  return out;
}

PhaseSpaceState convert(const PhaseSpaceState& state, Representation target) {
  const double hk = state.params.hbar * state.params.kappa;
  if (hk <= 0.0) throw ConfigError("kappa = 0 has no unified scaling");
  PhaseSpaceState out = state;
  if (state.rep == target) return out;
  const double s = std::sqrt(kTwoPi * hk);
  if (target == Representation::unified) {
    for (cplx& v : out.field) v *= s;
  } else {
    for (cplx& v : out.field) v /= s;
  }
  out.rep = target;
  return out;
}

NormPurity norm_and_purity(const PhaseSpaceState& state, const PhaseSpaceGrid& grid) {
  require_grid_match(state.field.size(), grid);
  const double s = unified_scale(state);
  const double cell = grid.dx * grid.dp;
  double sq = 0.0;
  double re = 0.0;
  for (const cplx& v : state.field) {
    sq += std::norm(v);
    re += v.real();
  }
  NormPurity np{};
  np.norm = s * s * sq * cell;
  // The quadratic functionals coincide under the scaling; at kappa = 0 the
  // amplitude norm is the only meaningful quadratic invariant.
  np.purity = np.norm;
  const double hk = state.params.hbar * state.params.kappa;
  const double wscale =
      (state.rep == Representation::unified && hk > 0.0) ? 1.0 / std::sqrt(kTwoPi * hk) : 1.0;
  np.integral = re * wscale * cell;
  return np;
}

Observable1D Observable1D::identity() { return Observable1D{}; }

Observable1D Observable1D::coordinate() {
  Observable1D o;
  o.kind = Kind::coordinate;
  return o;
}

Observable1D Observable1D::square() {
  Observable1D o;
  o.kind = Kind::square;
  return o;
}

Observable1D Observable1D::potential(Potential p) {
  Observable1D o;
  o.kind = Kind::potential;
  o.pot = std::move(p);
  return o;
}

Observable1D Observable1D::potential_derivative(Potential p) {
  Observable1D o;
  o.kind = Kind::potential_derivative;
  o.pot = std::move(p);
  return o;
}

Observable1D Observable1D::polynomial(std::vector<double> coeffs) {
  Observable1D o;
  o.kind = Kind::polynomial;
  o.coeffs = std::move(coeffs);
  return o;
}

double Observable1D::eval(double v) const {
  switch (kind) {
    case Kind::identity:
      return 1.0;
    case Kind::coordinate:
      return v;
    case Kind::square:
      return v * v;
    case Kind::potential:
      return pot.value(v);
    case Kind::potential_derivative:
      return pot.derivative(v);
    case Kind::polynomial: {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * v + *it;
      return acc;
    }
  }
  return 1.0;
}

ExpectationResult expectation(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                              const ObservableSpec& obs) {
  require_grid_match(state.field.size(), grid);
  state.params.validate();
  const double hk = state.params.hbar * state.params.kappa;
  const double s = unified_scale(state);
  const int nx = grid.nx;
  const int np = grid.np;

  std::vector<cplx> psi(state.field);
  if (s != 1.0) {
    for (cplx& v : psi) v *= s;
  }

  detail::FftWorkspace ws(nx, np);
  ws.load(psi.data());
  double alias = 0.0;

  if (obs.F.kind != Observable1D::Kind::identity) {
    ws.forward_x();
    cplx* buf = ws.data();
    const double inv = 1.0 / nx;
    double out_w = 0.0, tot_w = 0.0;
    for (int j = 0; j < nx; ++j) {
      const double shift = 0.5 * hk * grid.lambda_x[j];
      for (int k = 0; k < np; ++k) {
        const double arg = grid.p[k] + shift;
        const double w2 = std::norm(buf[static_cast<std::size_t>(j) * np + k]);
        tot_w += w2;
        if (arg < grid.p_min || arg > grid.p_max) out_w += w2;
        buf[static_cast<std::size_t>(j) * np + k] *= obs.F.eval(arg) * inv;
      }
    }
    if (tot_w > 0.0) alias = std::max(alias, out_w / tot_w);
    ws.backward_x();
  }

  if (obs.G.kind != Observable1D::Kind::identity) {
    ws.forward_p();
    cplx* buf = ws.data();
    const double inv = 1.0 / np;
    double out_w = 0.0, tot_w = 0.0;
    for (int j = 0; j < nx; ++j) {
      const double xj = grid.x[j];
      for (int k = 0; k < np; ++k) {
        const double arg = xj - 0.5 * hk * grid.lambda_p[k];
        const double w2 = std::norm(buf[static_cast<std::size_t>(j) * np + k]);
        tot_w += w2;
        if (arg < grid.x_min || arg > grid.x_max) out_w += w2;
        buf[static_cast<std::size_t>(j) * np + k] *= obs.G.eval(arg) * inv;
      }
    }
    if (tot_w > 0.0) alias = std::max(alias, out_w / tot_w);
    ws.backward_p();
  }

  const cplx* applied = ws.data();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) acc += std::conj(psi[i]) * applied[i];
  return ExpectationResult{acc * (grid.dx * grid.dp), alias};
}

Marginals marginals(const PhaseSpaceState& state, const PhaseSpaceGrid& grid) {
  require_grid_match(state.field.size(), grid);
  if (state.rep != Representation::wigner) {
    throw ConfigError("marginals require the Wigner representation");
  }
  Marginals m;
  m.x_density.assign(grid.nx, 0.0);
  m.p_density.assign(grid.np, 0.0);
  for (int j = 0; j < grid.nx; ++j) {
    for (int k = 0; k < grid.np; ++k) {
      const double w = state.field[static_cast<std::size_t>(j) * grid.np + k].real();
      m.x_density[j] += w;
      m.p_density[k] += w;
    }
  }
  for (double& v : m.x_density) v *= grid.dp;
  for (double& v : m.p_density) v *= grid.dx;
  return m;
}

ConfigurationState gaussian_configuration(double x0, double p0, double sigma_x,
                                          const PhysicalParams& params,
                                          const PhaseSpaceGrid& grid, int hermite_order) {
  params.validate();
  if (!(sigma_x > 0.0)) throw ConfigError("sigma_x must be positive");
  if (hermite_order != 0 && hermite_order != 1) {
    throw ConfigError("hermite_order must be 0 or 1");
  }
  const double hk = params.hbar * params.kappa;
  if (hk <= 0.0) throw ConfigError("configuration amplitudes require kappa > 0");

  ConfigurationState phi;
  phi.params = params;
  phi.amplitudes.resize(grid.nx);
  const double amp = std::pow(kTwoPi * sigma_x * sigma_x, -0.25);
  for (int j = 0; j < grid.nx; ++j) {
    const double u = grid.x[j] - x0;
    double mag = amp * std::exp(-u * u / (4.0 * sigma_x * sigma_x));
    if (hermite_order == 1) mag *= u / sigma_x;
    phi.amplitudes[j] = std::polar(mag, p0 * u / hk);
  }
  double nrm = 0.0;
  for (const cplx& a : phi.amplitudes) nrm += std::norm(a);
  nrm = std::sqrt(nrm * grid.dx);
  if (!(nrm > 0.0)) throw NumericsError("gaussian amplitude underflowed to zero");
  for (cplx& a : phi.amplitudes) a /= nrm;
  return phi;
}

PhaseSpaceState gaussian_state(double x0, double p0, double sigma_x,
                               const PhysicalParams& params, const PhaseSpaceGrid& grid,
                               int hermite_order) {
  params.validate();
  if (!(sigma_x > 0.0)) throw ConfigError("sigma_x must be positive");
  if (hermite_order != 0 && hermite_order != 1) {
    throw ConfigError("hermite_order must be 0 or 1");
  }
  const bool classical = params.kappa < kSmallKappaThreshold;
  const double sigma_p =
      classical ? params.hbar / (2.0 * sigma_x) : params.hbar * params.kappa / (2.0 * sigma_x);

  const double mass_out = gaussian_tail(x0 - grid.x_min, sigma_x, hermite_order) +
                          gaussian_tail(grid.x_max - x0, sigma_x, hermite_order) +
                          gaussian_tail(p0 - grid.p_min, sigma_p, hermite_order) +
                          gaussian_tail(grid.p_max - p0, sigma_p, hermite_order);
  if (!(mass_out < 1e-10)) {
    throw ConfigError("initial state mass outside the grid exceeds 1e-10");
  }

  if (!classical) {
    return wigner_from_pure(
        gaussian_configuration(x0, p0, sigma_x, params, grid, hermite_order), grid);
  }

  PhaseSpaceState out;
  out.params = params;
  out.rep = Representation::wigner;
  out.field.resize(grid.size());
  const double norm = 1.0 / (kTwoPi * sigma_x * sigma_p);
  for (int j = 0; j < grid.nx; ++j) {
    const double ax = (grid.x[j] - x0) / sigma_x;
    for (int k = 0; k < grid.np; ++k) {
      const double ap = (grid.p[k] - p0) / sigma_p;
      const double a = 0.5 * (ax * ax + ap * ap);
      double w = std::exp(-a) * norm;
      if (hermite_order == 1) w *= 2.0 * a - 1.0;
      out.field[static_cast<std::size_t>(j) * grid.np + k] = cplx{w, 0.0};
    }
  }
  return out;
}

}  // namespace kappadyn
