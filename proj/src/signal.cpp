#include "wavekit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavekit {

using cd = std::complex<double>;

void validate(const FilterSpec& spec, double fs) {
  const double nyquist = 0.5 * fs;
  if (spec.order < 1) throw ValidationError("filter order must be positive");
  if (!(spec.low_hz > 0.0) || !(spec.low_hz < nyquist))
    throw ValidationError("filter cutoff " + format_double(spec.low_hz) +
                          " Hz must lie strictly between 0 and Nyquist (" + format_double(nyquist) + " Hz)");
  if (spec.kind == FilterKind::bandpass) {
    if (!(spec.high_hz < nyquist))
      throw ValidationError("filter cutoff " + format_double(spec.high_hz) +
                            " Hz must lie strictly below Nyquist (" + format_double(nyquist) + " Hz)");
    if (!(spec.high_hz > spec.low_hz))
      throw ValidationError("invalid band: upper edge must exceed lower edge");
  }
}

namespace {

cd bilinear(cd s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

double prewarp(double f, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * f / fs); }

/// Groups digital poles into biquads; `zero_pairs` gives the two zeros of
/// every section (real-valued on the unit circle).
SosCascade assemble(std::vector<cd> poles, std::array<double, 2> zeros) {
  // Conjugate pairs first (upper half plane representative), then real poles.
  std::vector<cd> complex_poles, real_poles;
  for (const cd& p : poles) {
    const bool is_real = std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p));
    if (is_real)
      real_poles.push_back(cd(p.real(), 0.0));
    else if (p.imag() > 0)
      complex_poles.push_back(p);
  }
  SosCascade sos;
  for (const cd& p : complex_poles) {
    Biquad q;
    q.b = {1.0, -(zeros[0] + zeros[1]), zeros[0] * zeros[1]};
    q.a = {1.0, -2.0 * p.real(), std::norm(p)};
    sos.push_back(q);
  }
  for (std::size_t i = 0; i < real_poles.size(); i += 2) {
    Biquad q;
    if (i + 1 < real_poles.size()) {
      const double p1 = real_poles[i].real(), p2 = real_poles[i + 1].real();
      q.b = {1.0, -(zeros[0] + zeros[1]), zeros[0] * zeros[1]};
      q.a = {1.0, -(p1 + p2), p1 * p2};
    } else {
      q.b = {1.0, -zeros[0], 0.0};
      q.a = {1.0, -real_poles[i].real(), 0.0};
    }
    sos.push_back(q);
  }
  return sos;
}

cd section_response(const Biquad& q, cd z) {
  const cd zi = 1.0 / z;
  return (q.b[0] + q.b[1] * zi + q.b[2] * zi * zi) / (q.a[0] + q.a[1] * zi + q.a[2] * zi * zi);
}

void normalize_at(SosCascade& sos, double f_ref, double fs) {
  const cd z = std::polar(1.0, 2.0 * std::numbers::pi * f_ref / fs);
  for (auto& q : sos) {
    const double g = std::abs(section_response(q, z));
    for (double& b : q.b) b /= g;
  }
}

}  // namespace

SosCascade butterworth(const FilterSpec& spec, double fs) {
  validate(spec, fs);
  const int n = spec.order;
  std::vector<cd> proto;
  for (int k = 0; k < n; ++k)
    proto.push_back(std::polar(1.0, std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n)));

  std::vector<cd> poles;
  if (spec.kind == FilterKind::highpass) {
    const double wc = prewarp(spec.low_hz, fs);
    for (const cd& p : proto) poles.push_back(bilinear(wc / p, fs));
    SosCascade sos = assemble(poles, {1.0, 1.0});
    normalize_at(sos, 0.5 * fs * (1.0 - 1e-9), fs);
    return sos;
  }
  const double w1 = prewarp(spec.low_hz, fs);
  const double w2 = prewarp(spec.high_hz, fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;
  for (const cd& p : proto) {
    const cd half = 0.5 * p * bw;
    const cd root = std::sqrt(half * half - w0sq);
    poles.push_back(bilinear(half + root, fs));
    poles.push_back(bilinear(half - root, fs));
  }
  SosCascade sos = assemble(poles, {1.0, -1.0});
  // Digital centre frequency that maps to the analogue geometric centre.
  const double f0 = fs / std::numbers::pi * std::atan(std::sqrt(w0sq) / (2.0 * fs));
  normalize_at(sos, f0, fs);
  return sos;
}

cd frequency_response(const SosCascade& sos, double f, double fs) {
  const cd z = std::polar(1.0, 2.0 * std::numbers::pi * f / fs);
  cd h = 1.0;
  for (const auto& q : sos) h *= section_response(q, z);
  return h;
}

namespace {

void run_sections(const SosCascade& sos, Eigen::VectorXd& x, const std::vector<std::array<double, 2>>* zi,
                  double zi_scale) {
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const auto& q = sos[s];
    double z1 = zi ? (*zi)[s][0] * zi_scale : 0.0;
    double z2 = zi ? (*zi)[s][1] * zi_scale : 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double in = x(i);
      const double out = q.b[0] * in + z1;
      z1 = q.b[1] * in - q.a[1] * out + z2;
      z2 = q.b[2] * in - q.a[2] * out;
      x(i) = out;
    }
  }
}

/// Steady-state section states for a unit step at the cascade input.
std::vector<std::array<double, 2>> step_initial_state(const SosCascade& sos) {
  std::vector<std::array<double, 2>> zi;
  double gain_in = 1.0;
  for (const auto& q : sos) {
    const double dc = (q.b[0] + q.b[1] + q.b[2]) / (q.a[0] + q.a[1] + q.a[2]);
    const double y = dc * gain_in;
    const double z2 = q.b[2] * gain_in - q.a[2] * y;
    const double z1 = q.b[1] * gain_in - q.a[1] * y + z2;
    zi.push_back({z1, z2});
    gain_in = y;
  }
  return zi;
}

}  // namespace

Eigen::VectorXd sosfilt(const SosCascade& sos, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  run_sections(sos, y, nullptr, 0.0);
  return y;
}

Eigen::Index settling_length(const SosCascade& sos, double tol) {
  constexpr Eigen::Index kMaxProbe = 1 << 22;
  Eigen::Index probe = 1024;
  while (true) {
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(probe);
    imp(0) = 1.0;
    run_sections(sos, imp, nullptr, 0.0);
    const double peak = imp.cwiseAbs().maxCoeff();
    Eigen::Index last = 0;
    for (Eigen::Index i = 0; i < probe; ++i)
      if (std::abs(imp(i)) > tol * peak) last = i;
    if (last < probe / 2 || probe >= kMaxProbe) return last + 1;
    probe *= 2;
  }
}

Eigen::VectorXd filtfilt(const SosCascade& sos, const Eigen::VectorXd& x, Eigen::Index padlen) {
  const Eigen::Index n = x.size();
  if (n == 0) return x;
  padlen = std::clamp<Eigen::Index>(padlen, 0, n - 1);
  Eigen::VectorXd ext(n + 2 * padlen);
  for (Eigen::Index i = 0; i < padlen; ++i) ext(i) = 2.0 * x(0) - x(padlen - i);
  ext.segment(padlen, n) = x;
  for (Eigen::Index i = 0; i < padlen; ++i) ext(padlen + n + i) = 2.0 * x(n - 1) - x(n - 2 - i);

  const auto zi = step_initial_state(sos);
  run_sections(sos, ext, &zi, ext(0));
  ext.reverseInPlace();
  run_sections(sos, ext, &zi, ext(0));
  ext.reverseInPlace();
  return ext.segment(padlen, n);
}

Trace apply_filter(const Trace& trace, const FilterSpec& spec) {
  validate(trace, "filter input");
  const double fs = 1.0 / trace.dt;
  const SosCascade sos = butterworth(spec, fs);
  Trace out = trace;
  if (spec.zero_phase)
    out.samples = filtfilt(sos, trace.samples, settling_length(sos));
  else
    out.samples = sosfilt(sos, trace.samples);
  return out;
}

Eigen::Index detect_soft_trigger(const Trace& force, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ValidationError("trigger threshold fraction must lie in (0, 1)");
  if (force.size() == 0) throw ValidationError("no trigger: empty force trace");
  const double peak = force.samples.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw ValidationError("no trigger: force trace is identically zero");
  const double level = fraction * peak;
  for (Eigen::Index i = 0; i < force.size(); ++i)
    if (std::abs(force.samples(i)) >= level) return i;
  return force.size() - 1;  // unreachable: the peak itself satisfies the test
}

Trace align_to_trigger(const Trace& trace, Eigen::Index trigger, Eigen::Index pre) {
  if (trigger < 0 || trigger >= trace.size()) throw ValidationError("trigger index out of range");
  Trace out = trace;
  out.samples.setZero();
  const Eigen::Index shift = pre - trigger;
  for (Eigen::Index i = 0; i < trace.size(); ++i) {
    const Eigen::Index j = i + shift;
    if (j >= 0 && j < trace.size()) out.samples(j) = trace.samples(i);
  }
  out.t0 = -static_cast<double>(pre) * trace.dt;
  return out;
}

ImpactRecord normalize_record(const ImpactRecord& record, double reference_force) {
  const double peak = record.force.samples.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw ValidationError("normalize_record: zero peak force");
  if (!(reference_force > 0.0)) throw ValidationError("normalize_record: reference force must be positive");
  const double scale = reference_force / peak;
  ImpactRecord out = record;
  out.force.samples *= scale;
  for (auto& a : out.accel) a.samples *= scale;
  out.peak_force = reference_force;
  return out;
}

Trace remove_drift(const Trace& displacement, const FilterSpec& spec) {
  return apply_filter(displacement, spec);
}

Trace bandpass_mode_filter(const Trace& series, const FilterSpec& spec) {
  if (spec.kind != FilterKind::bandpass) throw ValidationError("invalid band: bandpass spec required");
  return apply_filter(series, spec);
}

}  // namespace wavekit
