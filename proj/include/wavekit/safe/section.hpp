#pragma once

#include "wavekit/core.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wavekit::safe {

/// Axis-aligned rectangle in the cross-section plane, mm.
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  std::string region = "body";

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Union of rectangles. Sections built from I-section parameters carry the
/// region names "bottom_flange", "web" and "top_flange".
struct SectionProfile {
  std::vector<Rect> rects;
  /// Clamp u_x on the outermost x edges. Used to turn a narrow strip into a
  /// plane-strain plate model.
  bool roller_x_edges = false;
};

struct ISectionParams {
  double height_mm = 0;
  double web_thickness_mm = 0;
  double flange_width_mm = 0;
  double flange_thickness_mm = 0;
  double thinning_depth_mm = 0;  ///< material removed from the outer face of the bottom flange
};

/// Throws ValidationError on non-positive dimensions or an empty union.
void validate(const SectionProfile& p);

SectionProfile i_section(const ISectionParams& p);

/// The default test-beam geometry. Flange dimensions are approximate.
ISectionParams i_section_preset();

/// Rectangular strip of the given thickness (y) and width (x).
SectionProfile plate_strip(double thickness_mm, double width_mm, bool rollers);

/// Accepts {"kind": "i_section", ...ISectionParams fields},
/// {"kind": "plate_strip", "thickness_mm", "width_mm", "roller_x_edges"} or
/// {"kind": "rectangles", "rectangles": [{x0,y0,x1,y1,region}], "roller_x_edges"}.
SectionProfile section_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SectionProfile& p);
nlohmann::json to_json(const ISectionParams& p);

}  // namespace wavekit::safe
