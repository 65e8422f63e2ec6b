#include "wavekit/safe/section.hpp"

#include "wavekit/core.hpp"

namespace wavekit::safe {

void validate(const SectionProfile& p) {
  if (p.rects.empty()) throw ValidationError("section profile has no rectangles");
  for (const Rect& r : p.rects)
    if (!(r.width() > 0.0) || !(r.height() > 0.0))
      throw ValidationError("section rectangle '" + r.region + "' has non-positive width or height");
}

SectionProfile i_section(const ISectionParams& p) {
  if (!(p.height_mm > 0) || !(p.web_thickness_mm > 0) || !(p.flange_width_mm > 0) || !(p.flange_thickness_mm > 0))
    throw ValidationError("i-section dimensions must be positive");
  if (!(p.height_mm > 2.0 * p.flange_thickness_mm))
    throw ValidationError("i-section height must exceed twice the flange thickness");
  if (p.web_thickness_mm > p.flange_width_mm)
    throw ValidationError("i-section web thicker than flange width");
  if (p.thinning_depth_mm < 0 || p.thinning_depth_mm >= p.flange_thickness_mm)
    throw ValidationError("thinning depth must lie in [0, flange thickness)");
  const double b = 0.5 * p.flange_width_mm, w = 0.5 * p.web_thickness_mm;
  const double tf = p.flange_thickness_mm, h = p.height_mm;
  SectionProfile s;
  s.rects.push_back({-b, p.thinning_depth_mm, b, tf, "bottom_flange"});
  s.rects.push_back({-w, tf, w, h - tf, "web"});
  s.rects.push_back({-b, h - tf, b, h, "top_flange"});
  return s;
}

ISectionParams i_section_preset() {
  ISectionParams p;
  p.height_mm = 90.0;
  p.web_thickness_mm = 5.0;
  p.flange_width_mm = 75.0;
  p.flange_thickness_mm = 6.0;
  return p;
}

SectionProfile plate_strip(double thickness_mm, double width_mm, bool rollers) {
  SectionProfile s;
  s.rects.push_back({0.0, 0.0, width_mm, thickness_mm, "plate"});
  s.roller_x_edges = rollers;
  validate(s);
  return s;
}

namespace {
double get(const nlohmann::json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}
}  // namespace

SectionProfile section_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.value("kind", "i_section");
    if (kind == "i_section") {
      ISectionParams p = i_section_preset();
      p.height_mm = get(j, "height_mm", p.height_mm);
      p.web_thickness_mm = get(j, "web_thickness_mm", p.web_thickness_mm);
      p.flange_width_mm = get(j, "flange_width_mm", p.flange_width_mm);
      p.flange_thickness_mm = get(j, "flange_thickness_mm", p.flange_thickness_mm);
      p.thinning_depth_mm = get(j, "thinning_depth_mm", 0.0);
      return i_section(p);
    }
    if (kind == "plate_strip")
      return plate_strip(j.at("thickness_mm").get<double>(), j.at("width_mm").get<double>(),
                         j.value("roller_x_edges", false));
    if (kind == "rectangles") {
      SectionProfile s;
      for (const auto& r : j.at("rectangles"))
        s.rects.push_back({r.at("x0").get<double>(), r.at("y0").get<double>(), r.at("x1").get<double>(),
                           r.at("y1").get<double>(), r.value("region", std::string("body"))});
      s.roller_x_edges = j.value("roller_x_edges", false);
      validate(s);
      return s;
    }
    throw ValidationError("unknown section kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed section profile: ") + e.what());
  }
}

nlohmann::json to_json(const SectionProfile& p) {
  nlohmann::json rects = nlohmann::json::array();
  for (const Rect& r : p.rects)
    rects.push_back({{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}, {"region", r.region}});
  return {{"kind", "rectangles"}, {"rectangles", rects}, {"roller_x_edges", p.roller_x_edges}};
}

nlohmann::json to_json(const ISectionParams& p) {
  return {{"kind", "i_section"},
          {"height_mm", p.height_mm},
          {"web_thickness_mm", p.web_thickness_mm},
          {"flange_width_mm", p.flange_width_mm},
          {"flange_thickness_mm", p.flange_thickness_mm},
          {"thinning_depth_mm", p.thinning_depth_mm}};
}

}  // namespace wavekit::safe
