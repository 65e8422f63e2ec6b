#include "wavekit/sim/reciprocity.hpp"

#include "wavekit/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

namespace wavekit::sim {

namespace {

nlohmann::json vec(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Eigen::VectorXd sampled(const Pulse& p, double amplitude, double dt, Eigen::Index n) {
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = amplitude * p(dt * static_cast<double>(i));
  return f;
}

/// Drops the first `shift` samples and keeps the next `length`.
Eigen::VectorXd advance(const Eigen::VectorXd& x, Eigen::Index shift, Eigen::Index length) {
  return x.segment(std::min(shift, x.size()), std::max<Eigen::Index>(std::min(length, x.size() - shift), 0));
}

RunResult run_state(const SimConfig& base, const PointForce& src, const Pulse& pulse, const Vec3& receiver) {
  SimConfig c = base;
  c.sources = {Source{src.position_mm, src.direction, src.amplitude_n, pulse}};
  c.receivers = {Receiver{receiver}};
  Simulation sim(c);
  return sim.run();
}

PointForce force_from_json(const nlohmann::json& j) {
  return {vec3_from_json(j.at("position_mm")), vec3_from_json(j.at("direction")), j.value("amplitude_n", 1.0)};
}

Pulse pulse_from_json(const nlohmann::json& j, const Pulse& fallback) {
  return {j.value("width_s", fallback.width_s), j.value("onset_s", fallback.onset_s)};
}

nlohmann::json pulse_json(const Pulse& p) { return {{"width_s", p.width_s}, {"onset_s", p.onset_s}}; }

}  // namespace

PairReport reciprocity_pair_check(const SimConfig& base, const ReciprocityPair& pair, const Pulse& f_a,
                                  const Pulse& f_b) {
  if ((pair.a.position_mm - pair.b.position_mm).norm() < 1e-9)
    throw ValidationError("pair " + pair.name + ": A and B must differ");
  if (std::abs(pair.counter_direction.norm() - 1.0) > 1e-9)
    throw ValidationError("pair " + pair.name + ": counter direction must be a unit vector");
  const auto start = std::chrono::steady_clock::now();
  RunResult ra, rb;
  parallel_for(2, [&](std::size_t s) {
    if (s == 0)
      ra = run_state(base, pair.a, f_a, pair.b.position_mm);
    else
      rb = run_state(base, pair.b, f_b, pair.a.position_mm);
  });

  PairReport r;
  r.name = pair.name;
  r.with_supports = !base.supports.empty();
  r.equal_time_course = f_a.width_s == f_b.width_s;
  const Eigen::Index n = ra.steps;
  const double dt = ra.dt_s;
  r.time_s = Eigen::VectorXd::LinSpaced(n, 0.0, dt * static_cast<double>(std::max<Eigen::Index>(n - 1, 0)));
  r.ea_ub_at_a = rb.receivers[0].projected(pair.a.direction) / pair.b.amplitude_n;
  r.eb_ua_at_b = ra.receivers[0].projected(pair.b.direction) / pair.a.amplitude_n;
  r.counter_ua_at_b = ra.receivers[0].projected(pair.counter_direction) / pair.a.amplitude_n;

  const Eigen::VectorXd sa = sampled(f_a, pair.a.amplitude_n, dt, n), sb = sampled(f_b, pair.b.amplitude_n, dt, n);
  const Eigen::VectorXd lhs = convolve(rb.receivers[0].projected(pair.a.direction), sa);
  r.convolution = relative_l2(lhs, convolve(ra.receivers[0].projected(pair.b.direction), sb));
  if (r.equal_time_course) {
    // Different impact times are compared after shifting both onsets to zero,
    // over the samples both runs still cover.
    const auto shift = [&](const Pulse& p) { return static_cast<Eigen::Index>(std::llround(p.onset_s / dt)); };
    const Eigen::Index sa_shift = shift(f_a), sb_shift = shift(f_b);
    const Eigen::Index common = std::max<Eigen::Index>(n - std::max(sa_shift, sb_shift), 0);
    const Eigen::VectorXd x = advance(r.ea_ub_at_a, sb_shift, common);
    r.matched = relative_l2(x, advance(r.eb_ua_at_b, sa_shift, common));
    r.counterexample = relative_l2(x, advance(r.counter_ua_at_b, sa_shift, common));
  } else {
    r.matched = std::numeric_limits<double>::quiet_NaN();
    r.counterexample =
        relative_l2(lhs, convolve(ra.receivers[0].projected(pair.counter_direction), sb));
  }
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ReciprocitySetup default_reciprocity_setup() {
  ReciprocitySetup s;
  s.base.dimensions_mm = {100.0, 40.0, 20.0};
  s.base.h_mm = 2.0;
  s.base.duration_s = 100e-6;
  s.base.supports = {Support{{20.0, 20.0, 0.0}, -Vec3::UnitZ(), 1e7}, Support{{80.0, 20.0, 0.0}, -Vec3::UnitZ(), 1e7}};
  s.pairs = {
      {"top_to_top", {{30.0, 20.0, 20.0}, -Vec3::UnitZ(), 1.0}, {{70.0, 10.0, 20.0}, -Vec3::UnitZ(), 1.0}, Vec3::UnitX()},
      {"end_to_end", {{0.0, 20.0, 10.0}, Vec3::UnitX(), 1.0}, {{100.0, 30.0, 10.0}, -Vec3::UnitX(), 1.0}, Vec3::UnitY()},
      {"side_to_bottom", {{50.0, 0.0, 10.0}, Vec3::UnitY(), 1.0}, {{40.0, 20.0, 0.0}, Vec3::UnitZ(), 1.0}, Vec3::UnitX()},
  };
  return s;
}

ReciprocitySetup reciprocity_setup_from_json(const nlohmann::json& j) {
  try {
    ReciprocitySetup s = default_reciprocity_setup();
    if (j.contains("sim")) s.base = sim_config_from_json(j.at("sim"));
    if (j.contains("pairs")) {
      s.pairs.clear();
      for (const auto& p : j.at("pairs"))
        s.pairs.push_back({p.value("name", "pair" + std::to_string(s.pairs.size() + 1)), force_from_json(p.at("a")),
                           force_from_json(p.at("b")), vec3_from_json(p.at("counter_direction"))});
    }
    if (j.contains("matched_pulse")) s.matched_pulse = pulse_from_json(j.at("matched_pulse"), s.matched_pulse);
    if (j.contains("pulse_a")) s.pulse_a = pulse_from_json(j.at("pulse_a"), s.pulse_a);
    if (j.contains("pulse_b")) s.pulse_b = pulse_from_json(j.at("pulse_b"), s.pulse_b);
    s.compare_without_supports = j.value("compare_without_supports", s.compare_without_supports);
    s.threshold = j.value("threshold", s.threshold);
    if (s.pairs.empty()) throw ValidationError("reciprocity setup: at least one pair required");
    if (!(s.threshold > 0.0)) throw ValidationError("threshold: must be positive");
    validate(s.base);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed reciprocity config: ") + e.what());
  }
}

nlohmann::json to_json(const ReciprocitySetup& s) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : s.pairs)
    pairs.push_back({{"name", p.name},
                     {"a", {{"position_mm", vec(p.a.position_mm)}, {"direction", vec(p.a.direction)},
                            {"amplitude_n", p.a.amplitude_n}}},
                     {"b", {{"position_mm", vec(p.b.position_mm)}, {"direction", vec(p.b.direction)},
                            {"amplitude_n", p.b.amplitude_n}}},
                     {"counter_direction", vec(p.counter_direction)}});
  return {{"sim", to_json(s.base)},
          {"pairs", pairs},
          {"matched_pulse", pulse_json(s.matched_pulse)},
          {"pulse_a", pulse_json(s.pulse_a)},
          {"pulse_b", pulse_json(s.pulse_b)},
          {"compare_without_supports", s.compare_without_supports},
          {"threshold", s.threshold}};
}

double ReciprocityReport::max_matched() const {
  double m = 0.0;
  for (const auto& r : equal) m = std::max(m, r.matched);
  return m;
}

double ReciprocityReport::max_convolution() const {
  double m = 0.0;
  for (const auto& r : distinct) m = std::max(m, r.convolution);
  return m;
}

double ReciprocityReport::min_counter_ratio() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : equal)
    m = std::min(m, r.counterexample / std::max(r.matched, std::numeric_limits<double>::min()));
  return m;
}

ReciprocityReport reciprocity_check(const ReciprocitySetup& setup) {
  ReciprocityReport rep;
  rep.threshold = setup.threshold;
  std::vector<SimConfig> variants{setup.base};
  if (setup.compare_without_supports && !setup.base.supports.empty()) {
    variants.push_back(setup.base);
    variants.back().supports.clear();
  }
  for (const SimConfig& base : variants)
    for (const auto& pair : setup.pairs) {
      rep.equal.push_back(reciprocity_pair_check(base, pair, setup.matched_pulse, setup.matched_pulse));
      rep.distinct.push_back(reciprocity_pair_check(base, pair, setup.pulse_a, setup.pulse_b));
    }
  return rep;
}

namespace {
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json pair_json(const PairReport& r) {
  return {{"name", r.name},
          {"with_supports", r.with_supports},
          {"equal_time_course", r.equal_time_course},
          {"matched_mismatch", number(r.matched)},
          {"convolution_mismatch", number(r.convolution)},
          {"counterexample_mismatch", number(r.counterexample)},
          {"runtime_s", r.runtime_s}};
}

std::string trace_file(const PairReport& r) {
  return r.name + (r.with_supports ? "_supported" : "_free") + (r.equal_time_course ? "_equal" : "_distinct") + ".csv";
}
}  // namespace

nlohmann::json to_json(const ReciprocityReport& rep) {
  nlohmann::json equal = nlohmann::json::array(), distinct = nlohmann::json::array();
  for (const auto& r : rep.equal) equal.push_back(pair_json(r));
  for (const auto& r : rep.distinct) distinct.push_back(pair_json(r));
  return {{"threshold", rep.threshold},
          {"passed", rep.passed()},
          {"max_matched_mismatch", number(rep.max_matched())},
          {"max_convolution_mismatch", number(rep.max_convolution())},
          {"min_counterexample_ratio", number(rep.min_counter_ratio())},
          {"equal_time_course", equal},
          {"distinct_time_course", distinct}};
}

void write_report(const ReciprocityReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw IoError("cannot write " + (dir / "report.json").string());
    out << to_json(rep).dump(2) << '\n';
  }
  for (const auto* list : {&rep.equal, &rep.distinct})
    for (const PairReport& r : *list) {
      const auto path = dir / trace_file(r);
      std::ofstream out(path);
      if (!out) throw IoError("cannot write " + path.string());
      out << "t_s,ea_ub_at_A,eb_ua_at_B,counter_ua_at_B\n";
      for (Eigen::Index i = 0; i < r.time_s.size(); ++i)
        out << format_double(r.time_s(i)) << ',' << format_double(r.ea_ub_at_a(i)) << ','
            << format_double(r.eb_ua_at_b(i)) << ',' << format_double(r.counter_ua_at_b(i)) << '\n';
      if (!out) throw IoError("write failed: " + path.string());
    }
}

}  // namespace wavekit::sim
