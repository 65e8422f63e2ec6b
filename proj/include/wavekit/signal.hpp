#pragma once

#include "wavekit/dataset.hpp"
#include "wavekit/trace.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <utility>
#include <vector>

namespace wavekit {

enum class FilterKind { highpass, bandpass };

struct FilterSpec {
  FilterKind kind = FilterKind::highpass;
  double low_hz = 10.0;   ///< high-pass cutoff, or lower band edge
  double high_hz = 0.0;   ///< upper band edge (bandpass only)
  int order = 4;          ///< prototype order; a bandpass has 2*order poles
  bool zero_phase = true; ///< forward-backward application

  static FilterSpec highpass(double cutoff_hz, int order = 4) {
    return {FilterKind::highpass, cutoff_hz, 0.0, order, true};
  }
  static FilterSpec bandpass(double low_hz, double high_hz, int order = 4) {
    return {FilterKind::bandpass, low_hz, high_hz, order, true};
  }
};

/// Drift filter applied after double integration.
inline const FilterSpec kDriftFilter = FilterSpec::highpass(10.0, 4);
/// Band around the second vertical bending eigenmode.
inline const FilterSpec kSecondVerticalBendingBand = FilterSpec::bandpass(428.0, 442.0, 4);

inline constexpr double kDefaultTriggerFraction = 0.1;
inline constexpr Eigen::Index kDefaultPreTriggerSamples = 50;

/// Biquad in direct form II transposed, a[0] == 1.
struct Biquad {
  std::array<double, 3> b{1.0, 0.0, 0.0};
  std::array<double, 3> a{1.0, 0.0, 0.0};
};
using SosCascade = std::vector<Biquad>;

/// Throws ValidationError for cutoffs outside (0, Nyquist), unordered band
/// edges or non-positive order.
void validate(const FilterSpec& spec, double sample_rate_hz);

/// Digital Butterworth design by bilinear transform with pre-warping, as
/// second-order sections normalised to unit gain in the pass band.
SosCascade butterworth(const FilterSpec& spec, double sample_rate_hz);

std::complex<double> frequency_response(const SosCascade& sos, double f_hz, double sample_rate_hz);

/// Single forward pass from rest.
Eigen::VectorXd sosfilt(const SosCascade& sos, const Eigen::VectorXd& x);

/// Samples until the impulse response has decayed below `tol` of its peak
/// (and stays there for the remainder of the probe).
Eigen::Index settling_length(const SosCascade& sos, double tol = 1e-6);

/// Forward-backward filtering with odd reflection padding of `padlen`
/// samples and steady-state initial conditions.
Eigen::VectorXd filtfilt(const SosCascade& sos, const Eigen::VectorXd& x, Eigen::Index padlen);

/// Applies `spec` to a trace. Zero-phase specs use filtfilt padded by one
/// settling length (capped at the trace length).
Trace apply_filter(const Trace& trace, const FilterSpec& spec);

/// First index with |force| >= fraction * peak.
Eigen::Index detect_soft_trigger(const Trace& force,
                                 double threshold_fraction = kDefaultTriggerFraction);

/// Shifts a trace so the trigger lands on `pre_samples`; vacated samples are
/// zero, the length is preserved and t0 becomes -pre_samples*dt.
Trace align_to_trigger(const Trace& trace, Eigen::Index trigger_index,
                       Eigen::Index pre_samples = kDefaultPreTriggerSamples);

/// Scales force and accelerations by reference_force / peak_force.
ImpactRecord normalize_record(const ImpactRecord& record, double reference_force);

/// Linear acceleration method:
///   v[n] = v[n-1] + dt (a[n-1] + a[n]) / 2
///   u[n] = u[n-1] + dt v[n-1] + dt^2 (a[n-1]/3 + a[n]/6),  v[0] = u[0] = 0.
template <typename Scalar>
std::pair<BasicTrace<Scalar>, BasicTrace<Scalar>> integrate_to_displacement(
    const BasicTrace<Scalar>& accel) {
  if (accel.quantity != Quantity::acceleration)
    throw ValidationError("integrate_to_displacement: input must be an acceleration trace");
  validate(accel, "acceleration");
  const Eigen::Index n = accel.size();
  const Scalar dt = static_cast<Scalar>(accel.dt);
  BasicTrace<Scalar> v{BasicTrace<Scalar>::Samples::Zero(n), accel.dt, accel.t0, Quantity::velocity};
  BasicTrace<Scalar> u{BasicTrace<Scalar>::Samples::Zero(n), accel.dt, accel.t0, Quantity::displacement};
  const auto& a = accel.samples;
  for (Eigen::Index i = 1; i < n; ++i) {
    v.samples(i) = v.samples(i - 1) + dt * (a(i - 1) / Scalar(2) + a(i) / Scalar(2));
    u.samples(i) = u.samples(i - 1) + dt * v.samples(i - 1) +
                   dt * dt * (a(i - 1) / Scalar(3) + a(i) / Scalar(6));
  }
  return {std::move(v), std::move(u)};
}

/// High-pass drift removal (defaults to the 10 Hz zero-phase filter).
Trace remove_drift(const Trace& displacement, const FilterSpec& spec = kDriftFilter);

/// Zero-phase band-pass extraction of one eigenmode band.
Trace bandpass_mode_filter(const Trace& series,
                           const FilterSpec& spec = kSecondVerticalBendingBand);

}  // namespace wavekit
