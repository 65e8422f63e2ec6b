#pragma once

#include "wavekit/safe/assembly.hpp"
#include "wavekit/safe/modes.hpp"

#include <complex>
#include <vector>

namespace wavekit::safe {

struct SolveOptions {
  double propagating_ratio = 1e-4;  ///< keep |Im zeta| / |Re zeta| below this
  /// Linearized problems up to this size are solved densely; larger ones by
  /// shift-invert Arnoldi.
  int dense_limit = 400;
  int krylov_dim = 60;
  /// Minimum number of eigenvalues (nearest zeta = 0) that must converge
  /// before the Arnoldi result is trusted; the subspace grows until it does.
  int min_converged = 20;
  int refine_iterations = 8;
  double max_residual = 1e-6;  ///< modes whose refined residual exceeds this are dropped
};

/// Eigenvalues of the quadratic problem nearest zeta = 0, all of which are
/// trusted (dense path: every eigenvalue).
std::vector<std::complex<double>> quadratic_eigenvalues(const SafeMatrices& mats, double f_hz,
                                                        const SolveOptions& opts = {});

/// Propagating modes at f (Re zeta > 0, nearly real), refined by Rayleigh
/// quotient iteration and sorted by decreasing zeta. Labels are assigned
/// from the mesh attached to `mats`. Safe to call concurrently.
std::vector<ModeSolution> solve_at_frequency(const SafeMatrices& mats, double f_hz, const SolveOptions& opts = {});

/// ||Q(zeta, omega) phi|| / ||omega^2 M phi|| for a reduced real vector.
double eigen_residual(const SafeMatrices& mats, double zeta, double f_hz, const Eigen::VectorXd& phi);

/// d omega / d zeta from the eigenvector: phi^T Q' phi / (2 omega phi^T M phi).
double energy_group_velocity(const SafeMatrices& mats, const ModeSolution& mode);

}  // namespace wavekit::safe
