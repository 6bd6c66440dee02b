#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "kappadyn/propagators.hpp"

namespace kappadyn {

namespace {

// DFT matrix matching the engine's spectral convention: F(k, j) = e^{-2 pi i k j / n}.
Eigen::MatrixXcd dft_matrix(int n) {
  Eigen::MatrixXcd f(n, n);
  const double w = -2.0 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) f(k, j) = std::polar(1.0, w * k * j);
  }
  return f;
}

// Dense spectral multiplication operator: F^{-1} diag(d) F.
Eigen::MatrixXcd spectral_diag(const Eigen::MatrixXcd& f, const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  Eigen::MatrixXcd m = f;
  for (int k = 0; k < n; ++k) m.row(k) *= d[k];
  return (f.adjoint() * m) / static_cast<double>(n);
}

}  // namespace

PhaseSpaceState dense_oracle(const PhaseSpaceState& state, const PhaseSpaceGrid& grid,
                             const Potential& pot, const PhysicalParams& params, Engine engine,
                             double t) {
  params.validate();
  if (state.field.size() != grid.size()) throw ConfigError("field size does not match the grid");
  if (grid.size() > 1024) throw ConfigError("dense oracle supports at most 1024 sites");

  const int nx = grid.nx;
  const int np = grid.np;
  const long n = static_cast<long>(grid.size());

  const Eigen::MatrixXcd lx = spectral_diag(dft_matrix(nx), grid.lambda_x);
  const Eigen::MatrixXcd fp = dft_matrix(np);

  const std::vector<double> kernel = engine == Engine::unified
                                         ? kappa_potential_kernel(grid, pot, params)
                                         : classical_force_kernel(grid, pot, params);

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  const double kin = params.hbar / params.mass;
  for (int j = 0; j < nx; ++j) {
    for (int j2 = 0; j2 < nx; ++j2) {
      const cplx l = lx(j, j2);
      for (int k = 0; k < np; ++k) {
        h(static_cast<long>(j) * np + k, static_cast<long>(j2) * np + k) += kin * l * grid.p[k];
      }
    }
  }
  std::vector<double> row(np);
  for (int j = 0; j < nx; ++j) {
    for (int k = 0; k < np; ++k) row[k] = kernel[static_cast<std::size_t>(j) * np + k];
    const Eigen::MatrixXcd block = spectral_diag(fp, row);
    for (int k = 0; k < np; ++k) {
      for (int k2 = 0; k2 < np; ++k2) {
        h(static_cast<long>(j) * np + k, static_cast<long>(j) * np + k2) += block(k, k2);
      }
    }
  }

  const Eigen::MatrixXcd u = (cplx(0.0, -t / params.hbar) * h).exp();
  Eigen::Map<const Eigen::VectorXcd> v(state.field.data(), n);
  const Eigen::VectorXcd out = u * v;

  PhaseSpaceState result = state;
  Eigen::Map<Eigen::VectorXcd>(result.field.data(), n) = out;
  result.time = state.time + t;
  return result;
}

}  // namespace kappadyn
