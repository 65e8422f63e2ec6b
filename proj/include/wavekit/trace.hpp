#pragma once

#include "wavekit/core.hpp"

#include <Eigen/Dense>

#include <string>

namespace wavekit {

/// Uniformly sampled time series. Storage precision is the template
/// parameter; the on-disk format is float, processing is double.
template <typename Scalar>
struct BasicTrace {
  using Samples = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Samples samples;
  double dt = 0.0;  ///< sample interval, s
  double t0 = 0.0;  ///< time of first sample relative to trigger, s
  Quantity quantity = Quantity::acceleration;

  Eigen::Index size() const { return samples.size(); }
  double duration() const { return dt * static_cast<double>(samples.size() - 1); }
  double time(Eigen::Index n) const { return t0 + dt * static_cast<double>(n); }

  template <typename Other>
  BasicTrace<Other> cast() const {
    return BasicTrace<Other>{samples.template cast<Other>(), dt, t0, quantity};
  }
};

using Trace = BasicTrace<double>;
using TraceF = BasicTrace<float>;

/// Throws ValidationError unless dt > 0 and at least two finite samples.
template <typename Scalar>
void validate(const BasicTrace<Scalar>& trace, const std::string& what = "trace") {
  if (!(trace.dt > 0.0)) throw ValidationError(what + ": dt must be positive");
  if (trace.size() < 2) throw ValidationError(what + ": at least 2 samples required");
  if (!trace.samples.allFinite()) throw ValidationError(what + ": non-finite sample");
}

}  // namespace wavekit
