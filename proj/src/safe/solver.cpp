#include "wavekit/safe/solver.hpp"

#include "wavekit/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wavekit::safe {

namespace {

using cd = std::complex<double>;
using Lu = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

/// Companion linearization in mu = 1 / (zeta - sigma):
///   L [phi; chi] = [chi; -Q(sigma)^-1 (K2 phi + Q'(sigma) chi)].
struct ShiftInvert {
  const SafeMatrices& mats;
  double omega;
  double sigma = 0.0;
  Lu lu;
  SpMat dq;
  int n;

  ShiftInvert(const SafeMatrices& m, double w) : mats(m), omega(w), n(m.size()) {
    // sigma = 0 is singular only if omega is exactly a cut-off; nudge then.
    for (double s : {0.0, 1e-3, -2.7e-3, 1.3e-2}) {
      sigma = s;
      lu.compute(mats.pencil(sigma, omega));
      if (lu.info() == Eigen::Success) break;
    }
    if (lu.info() != Eigen::Success)
      throw NumericalError("eigensolver failure: shifted SAFE operator could not be factorized at f = " +
                           format_double(omega / (2.0 * std::numbers::pi)) + " Hz");
    dq = mats.pencil_derivative(sigma);
  }

  void apply(const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> y) const {
    const Eigen::VectorXd rhs = mats.k2 * x.head(n) + dq * x.tail(n);
    y.head(n) = x.tail(n);
    y.tail(n) = -lu.solve(rhs);
  }

  Eigen::MatrixXd dense() const {
    const Eigen::MatrixXd k2 = Eigen::MatrixXd(mats.k2), d = Eigen::MatrixXd(dq);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    l.topRightCorner(n, n).setIdentity();
    l.bottomLeftCorner(n, n) = -lu.solve(k2);
    l.bottomRightCorner(n, n) = -lu.solve(d);
    return l;
  }
};

struct Ritz {
  cd mu;
  Eigen::VectorXcd phi;  // top half of the linearized eigenvector
};

/// Trusted eigenpairs ordered by decreasing |mu| (increasing |zeta - sigma|).
std::vector<Ritz> linearized_eigenpairs(const ShiftInvert& op, const SolveOptions& opts) {
  const int n2 = 2 * op.n;
  std::vector<Ritz> out;
  if (n2 <= opts.dense_limit) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.dense());
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failure: dense QR iteration did not converge");
    for (int j = 0; j < n2; ++j) out.push_back({es.eigenvalues()(j), es.eigenvectors().col(j).head(op.n)});
    std::sort(out.begin(), out.end(), [](const Ritz& a, const Ritz& b) { return std::abs(a.mu) > std::abs(b.mu); });
    return out;
  }

  int m = std::min(opts.krylov_dim, n2);
  while (true) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n2, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < n2; ++i) v(i, 0) = dist(rng);
    v.col(0).normalize();
    int steps = m;
    double beta = 0.0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd w(n2);
      op.apply(v.col(j), w);
      Eigen::VectorXd c = v.leftCols(j + 1).transpose() * w;
      w.noalias() -= v.leftCols(j + 1) * c;
      const Eigen::VectorXd c2 = v.leftCols(j + 1).transpose() * w;
      w.noalias() -= v.leftCols(j + 1) * c2;
      h.col(j).head(j + 1) = c + c2;
      beta = w.norm();
      h(j + 1, j) = beta;
      if (beta < 1e-13 * h.topLeftCorner(j + 2, j + 1).norm()) {
        steps = j + 1;  // invariant subspace found
        beta = 0.0;
        break;
      }
      v.col(j + 1) = w / beta;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(steps, steps));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failure: Hessenberg QR did not converge");
    struct Cand {
      Ritz r;
      bool converged;
    };
    std::vector<Cand> cands;
    for (int j = 0; j < steps; ++j) {
      const Eigen::VectorXcd y = es.eigenvectors().col(j);
      const cd theta = es.eigenvalues()(j);
      const double res = beta * std::abs(y(steps - 1));
      const bool conv = res < 1e-9 * std::abs(theta);
      cands.push_back({{theta, v.leftCols(steps).cast<cd>().topRows(op.n) * y}, conv});
    }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return std::abs(a.r.mu) > std::abs(b.r.mu); });
    out.clear();
    for (const Cand& c : cands) {
      if (!c.converged) break;
      out.push_back(c.r);
    }
    if (static_cast<int>(out.size()) >= std::min(opts.min_converged, n2) || m >= n2 || steps < m) return out;
    m = std::min(2 * m, n2);
  }
}

/// Real root of phi^T Q(zeta) phi = 0 nearest `guess`; false if none.
bool rayleigh_functional(const SafeMatrices& mats, double omega, const Eigen::VectorXd& phi, double& zeta) {
  const double a = phi.dot(mats.k2 * phi);
  const double b = phi.dot(mats.k1 * phi);
  const double c = phi.dot(mats.k0 * phi) - omega * omega * phi.dot(mats.m * phi);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double qq = -0.5 * (b + std::copysign(sq, b));
  const double r1 = qq / a, r2 = (qq != 0.0) ? c / qq : r1;
  zeta = (std::abs(r1 - zeta) < std::abs(r2 - zeta)) ? r1 : r2;
  return true;
}

Eigen::VectorXd real_direction(const Eigen::VectorXcd& v) {
  const cd s = (v.array() * v.array()).sum();
  const cd rot = std::polar(1.0, -0.5 * std::arg(s));
  Eigen::VectorXd r = (v * rot).real();
  return r / r.norm();
}

using LD = long double;
using VecL = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
using SpL = Eigen::SparseMatrix<LD>;

/// The four SAFE matrices in extended precision (entries are exact copies).
struct ExtendedPencil {
  SpL k0, k1, k2, m;
  explicit ExtendedPencil(const SafeMatrices& s)
      : k0(s.k0.cast<LD>()), k1(s.k1.cast<LD>()), k2(s.k2.cast<LD>()), m(s.m.cast<LD>()) {}

  VecL residual(LD zeta, double omega, const VecL& phi) const {
    const LD w2 = static_cast<LD>(omega) * omega;
    return k0 * phi + zeta * (k1 * phi) + (zeta * zeta) * (k2 * phi) - w2 * (m * phi);
  }
  VecL derivative(LD zeta, const VecL& phi) const { return k1 * phi + (2 * zeta) * (k2 * phi); }
  double relative_residual(LD zeta, double omega, const VecL& phi) const {
    const LD w2 = static_cast<LD>(omega) * omega;
    return static_cast<double>(residual(zeta, omega, phi).norm() / (w2 * (m * phi).norm()));
  }
};

}  // namespace

double eigen_residual(const SafeMatrices& mats, double zeta, double f_hz, const Eigen::VectorXd& phi) {
  return ExtendedPencil(mats).relative_residual(zeta, 2.0 * std::numbers::pi * f_hz, phi.cast<LD>());
}

double energy_group_velocity(const SafeMatrices& mats, const ModeSolution& mode) {
  const double omega = 2.0 * std::numbers::pi * mode.frequency_hz;
  const Eigen::VectorXd& phi = mode.reduced_shape;
  const double num = phi.dot(mats.k1 * phi) + 2.0 * mode.zeta * phi.dot(mats.k2 * phi);
  return num / (2.0 * omega * phi.dot(mats.m * phi));
}

std::vector<std::complex<double>> quadratic_eigenvalues(const SafeMatrices& mats, double f_hz,
                                                        const SolveOptions& opts) {
  if (!(f_hz > 0.0)) throw ValidationError("frequency must be positive");
  const ShiftInvert op(mats, 2.0 * std::numbers::pi * f_hz);
  std::vector<cd> z;
  for (const Ritz& r : linearized_eigenpairs(op, opts))
    if (std::abs(r.mu) > 0.0) z.push_back(op.sigma + 1.0 / r.mu);
  return z;
}

std::vector<ModeSolution> solve_at_frequency(const SafeMatrices& mats, double f_hz, const SolveOptions& opts) {
  if (!(f_hz > 0.0)) throw ValidationError("frequency must be positive");
  const double omega = 2.0 * std::numbers::pi * f_hz;
  const ShiftInvert op(mats, omega);
  const ExtendedPencil ext(mats);

  std::vector<ModeSolution> modes;
  Lu lu;
  bool analyzed = false;
  for (const Ritz& r : linearized_eigenpairs(op, opts)) {
    if (std::abs(r.mu) == 0.0) continue;
    const cd z = op.sigma + 1.0 / r.mu;
    if (!(z.real() > 0.0) || std::abs(z.imag()) >= opts.propagating_ratio * std::abs(z.real())) continue;

    // Bordered Newton iteration on (Q(zeta) phi = 0, phi0^T phi = 1). Residuals
    // and iterates are kept in extended precision; the corrections come from
    // a double-precision factorization of Q(zeta).
    // Deflate accepted modes of the same wavenumber so that both members of a
    // degenerate pair are refined towards distinct shapes.
    Eigen::VectorXd phi0 = real_direction(r.phi);
    for (const ModeSolution& o : modes)
      if (std::abs(o.zeta - z.real()) < 1e-6 * z.real()) {
        const Eigen::VectorXd s = o.reduced_shape.normalized();
        phi0 -= s.dot(phi0) * s;
      }
    if (phi0.norm() < 1e-3) continue;
    phi0.normalize();
    VecL phi = phi0.cast<LD>();
    LD zeta = z.real();
    double zd = z.real();
    if (rayleigh_functional(mats, omega, phi0, zd)) zeta = zd;
    double res = ext.relative_residual(zeta, omega, phi);
    VecL best_phi = phi;
    LD best_zeta = zeta;
    int stall = 0;
    for (int it = 0; it < opts.refine_iterations && res > 1e-12 && stall < 2; ++it) {
      const SpMat q = mats.pencil(static_cast<double>(zeta), omega);
      if (!analyzed) {
        lu.analyzePattern(q);
        analyzed = true;
      }
      lu.factorize(q);
      if (lu.info() != Eigen::Success) break;  // exactly singular: zeta is already an eigenvalue
      const Eigen::VectorXd rv = ext.residual(zeta, omega, phi).cast<double>();
      const Eigen::VectorXd g = ext.derivative(zeta, phi).cast<double>();
      const Eigen::VectorXd a = lu.solve(rv), b = lu.solve(g);
      const double den = phi0.dot(b);
      if (!a.allFinite() || !b.allFinite() || den == 0.0) break;
      const double dz = -phi0.dot(a) / den;
      phi -= (a + dz * b).cast<LD>();
      zeta += dz;
      const double r_new = ext.relative_residual(zeta, omega, phi);
      if (!std::isfinite(r_new)) break;
      ++stall;
      if (r_new < res) {
        stall = 0;
        res = r_new;
        best_phi = phi;
        best_zeta = zeta;
      }
    }
    phi = best_phi;
    zeta = best_zeta;
    if (!(res <= opts.max_residual) || !(zeta > 0.0)) continue;

    Eigen::Index imax;
    phi.cwiseAbs().maxCoeff(&imax);
    phi /= phi(imax);

    ModeSolution m;
    m.frequency_hz = f_hz;
    m.zeta = static_cast<double>(zeta);
    m.phase_velocity = omega / m.zeta;
    m.reduced_shape = phi.cast<double>();
    m.shape = mats.expand(m.reduced_shape);
    m.residual = res;

    bool duplicate = false;
    for (const ModeSolution& o : modes)
      if (std::abs(o.zeta - m.zeta) < 1e-7 * m.zeta && mac(o.shape, m.shape) > 0.9) duplicate = true;
    if (duplicate) continue;
    if (mats.mesh) m.label = classify_mode(m.shape, *mats.mesh);
    modes.push_back(std::move(m));
  }
  std::sort(modes.begin(), modes.end(), [](const ModeSolution& a, const ModeSolution& b) { return a.zeta > b.zeta; });
  return modes;
}

}  // namespace wavekit::safe
