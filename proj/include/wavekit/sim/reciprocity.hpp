#pragma once

#include "wavekit/sim/fdtd.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace wavekit::sim {

struct PointForce {
  Vec3 position_mm = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double amplitude_n = 1.0;
};

/// Source/receiver pair. `counter_direction` is a displacement component at B
/// orthogonal to e_b, used for the non-reciprocal comparison.
struct ReciprocityPair {
  std::string name;
  PointForce a, b;
  Vec3 counter_direction = Vec3::UnitX();
};

/// Outcome of one pair: state a forces A and records B, state b forces B and
/// records A.
struct PairReport {
  std::string name;
  bool with_supports = false;
  bool equal_time_course = true;
  /// relL2(e_a . u_b(A) / f0_b, e_b . u_a(B) / f0_a) after aligning onsets;
  /// only meaningful for equal time courses (NaN otherwise).
  double matched = 0;
  /// relL2(f_a * e_a . u_b(A), f_b * e_b . u_a(B)) with discrete convolution.
  double convolution = 0;
  /// As `matched` (or `convolution` for distinct time courses) but reading
  /// u_a at B along `counter_direction`.
  double counterexample = 0;
  double runtime_s = 0;
  Eigen::VectorXd time_s, ea_ub_at_a, eb_ua_at_b, counter_ua_at_b;

  /// The mismatch of the reciprocal comparison this pair was run for.
  double reciprocal_mismatch() const { return equal_time_course ? matched : convolution; }
};

/// Runs both states concurrently on copies of `base` (its sources and
/// receivers are replaced).
PairReport reciprocity_pair_check(const SimConfig& base, const ReciprocityPair& pair, const Pulse& f_a,
                                  const Pulse& f_b);

struct ReciprocitySetup {
  SimConfig base;  ///< geometry, material, duration and supports
  std::vector<ReciprocityPair> pairs;
  Pulse matched_pulse{20e-6, 0.0};
  Pulse pulse_a{10e-6, 0.0};  ///< distinct time courses for the convolution form
  Pulse pulse_b{25e-6, 0.0};
  bool compare_without_supports = true;  ///< also run every pair with the supports removed
  double threshold = 1e-3;
};

ReciprocitySetup reciprocity_setup_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReciprocitySetup& setup);
/// Default verification setup: 100 x 40 x 20 mm aluminium, h = 2 mm, three
/// pairs, two spring supports of 1e7 N/m.
ReciprocitySetup default_reciprocity_setup();

struct ReciprocityReport {
  std::vector<PairReport> equal;     ///< equal time courses (matched form)
  std::vector<PairReport> distinct;  ///< distinct time courses (convolution form)
  double threshold = 1e-3;

  double max_matched() const;
  double max_convolution() const;
  /// Smallest counterexample / matched ratio over the equal-time-course runs.
  double min_counter_ratio() const;
  bool passed() const { return max_matched() <= threshold && max_convolution() <= threshold; }
};

ReciprocityReport reciprocity_check(const ReciprocitySetup& setup);

nlohmann::json to_json(const ReciprocityReport& report);
/// Writes report.json and one trace CSV per run into `dir`.
void write_report(const ReciprocityReport& report, const std::filesystem::path& dir);

}  // namespace wavekit::sim
