#pragma once
// Analytic dispersion branches for tests that need a known zeta(f).

#include "wavekit/safe/dispersion.hpp"

#include <cmath>
#include <functional>

namespace laws {

// Tabulates zeta(omega) on 10..900 Hz in 5 Hz steps.
inline wavekit::safe::DispersionSet tabulate(int id, wavekit::safe::ModeLabel label,
                                             const std::function<double(double)>& zeta_of_omega,
                                             const std::function<double(double)>& cg_of_omega) {
  wavekit::safe::Branch b;
  b.id = id;
  b.label = label;
  for (double f = 10.0; f <= 900.0 + 1e-9; f += 5.0) {
    wavekit::safe::ModeSolution m;
    const double w = 2 * M_PI * f;
    m.frequency_hz = f;
    m.zeta = zeta_of_omega(w);
    m.phase_velocity = w / m.zeta;
    m.group_velocity = cg_of_omega(w);
    b.points.push_back(m);
  }
  wavekit::safe::DispersionSet set;
  for (const auto& p : b.points) set.frequencies_hz.push_back(p.frequency_hz);
  set.branches.push_back(b);
  return set;
}

// Bending-like branch zeta = a sqrt(omega): c_g = 2 c_p.
inline wavekit::safe::DispersionSet bending(int id = 3, double a = 0.0765) {
  return tabulate(
      id, wavekit::safe::ModeLabel::vertical_bending, [a](double w) { return a * std::sqrt(w); },
      [a](double w) { return 2 * std::sqrt(w) / a; });
}

// Nondispersive branch zeta = omega / c.
inline wavekit::safe::DispersionSet nondispersive(double c, int id = 3) {
  return tabulate(
      id, wavekit::safe::ModeLabel::other, [c](double w) { return w / c; }, [c](double) { return c; });
}

}  // namespace laws
