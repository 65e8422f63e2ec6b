#pragma once

#include "wavekit/core.hpp"
#include "wavekit/safe/material.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace wavekit::sim {

/// Time history f(t) of a point force: a raised-cosine pulse of `width_s`
/// starting at `onset_s`.
struct Pulse {
  double width_s = 20e-6;
  double onset_s = 0.0;
  double operator()(double t) const;
};

struct Source {
  Vec3 position_mm = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  ///< unit vector e
  double amplitude_n = 1.0;        ///< f0
  Pulse pulse;
};

struct Receiver {
  Vec3 position_mm = Vec3::Zero();
};

struct Support {
  Vec3 position_mm = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  ///< unit outward normal n
  double k_n_per_m = 1e7;
};

struct SimConfig {
  Vec3 dimensions_mm{100.0, 40.0, 20.0};
  double h_mm = 2.0;
  safe::Material material = safe::aluminum();
  double duration_s = 100e-6;
  double dt_s = 0.0;  ///< 0: cfl_safety * h / (cL sqrt 3)
  double cfl_safety = 0.9;
  std::vector<Source> sources;
  std::vector<Receiver> receivers;
  std::vector<Support> supports;

  double cfl_limit_s() const;  ///< h / (cL sqrt 3)
  double time_step_s() const;
};

void validate(const SimConfig& config);
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& config);
Vec3 vec3_from_json(const nlohmann::json& j);

/// Velocity and displacement histories of one receiver, sampled at
/// t_n = n dt. Columns are x, y, z.
struct ReceiverTraces {
  Vec3 position_mm = Vec3::Zero();
  Eigen::MatrixX3d velocity;
  Eigen::MatrixX3d displacement;
  Eigen::VectorXd projected(const Vec3& direction) const { return displacement * direction; }
};

struct RunResult {
  double dt_s = 0;
  Eigen::Index steps = 0;
  std::vector<ReceiverTraces> receivers;
  Eigen::VectorXd energy;  ///< discrete energy after each step
};

/// Staggered-grid elastodynamics on a traction-free cuboid with optional
/// normal spring supports. Displacement components live on cell edges (u_x on
/// x-edges and so on); normal stresses on nodes, shear stresses on face
/// centres. Potential energy is summed over control volumes, which makes the
/// stiffness operator symmetric and the surfaces traction free. Points,
/// forces and springs act on a surface node through the average of the
/// adjacent edge unknowns of each component; sources and receivers share that
/// stencil.
class Simulation {
 public:
  explicit Simulation(SimConfig config);

  const SimConfig& config() const { return config_; }
  std::array<int, 3> cells() const { return {nx_, ny_, nz_}; }
  std::array<int, 3> nodes() const { return {nx_ + 1, ny_ + 1, nz_ + 1}; }
  double dt() const { return dt_; }
  Eigen::Index steps() const { return steps_; }
  Eigen::Index dofs() const { return static_cast<Eigen::Index>(ux_.size() + uy_.size() + uz_.size()); }

  /// Runs from rest to the configured duration. Throws NumericalError with the
  /// step index when a non-finite value appears.
  RunResult run();

  /// Internal elastic plus spring force -K u for the current displacement
  /// (exposed for tests; operates on flattened [ux, uy, uz]).
  Eigen::VectorXd internal_force(const Eigen::VectorXd& u) const;
  Eigen::VectorXd lumped_mass() const;
  /// Point stencil of component c at a surface node: (dof index, weight) pairs.
  std::vector<std::pair<Eigen::Index, double>> stencil(const Vec3& position_mm, int component) const;

 private:
  struct Node {
    int i, j, k;
  };
  Node surface_node(const Vec3& position_mm, const std::string& what) const;
  Eigen::Index ix(int i, int j, int k) const { return (static_cast<Eigen::Index>(i) * (ny_ + 1) + j) * (nz_ + 1) + k; }
  Eigen::Index iy(int i, int j, int k) const { return (static_cast<Eigen::Index>(i) * ny_ + j) * (nz_ + 1) + k; }
  Eigen::Index iz(int i, int j, int k) const { return (static_cast<Eigen::Index>(i) * (ny_ + 1) + j) * nz_ + k; }
  void add_internal_force(const double* ux, const double* uy, const double* uz, double* fx, double* fy,
                          double* fz) const;

  SimConfig config_;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  double h_ = 0, dt_ = 0;
  Eigen::Index steps_ = 0;
  std::vector<double> ux_, uy_, uz_;
  std::array<Eigen::Matrix3d, 8> normal_stiffness_;  ///< indexed by the mask of defined normal strains
  double mu_ = 0;
  struct PointLoad {
    std::vector<std::pair<Eigen::Index, double>> stencil[3];
  };
  std::vector<PointLoad> source_stencils_, receiver_stencils_, support_stencils_;
};

/// Relative L2 mismatch ||a - b|| / max(||a||, ||b||); 0 when both vanish.
double relative_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Discrete causal convolution truncated to the length of `a`.
Eigen::VectorXd convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace wavekit::sim
