#include "wavekit/pipeline.hpp"

namespace wavekit {

ScanDataset integrate_dataset(const ScanDataset& dataset, const std::optional<FilterSpec>& drift) {
  validate(dataset);
  if (drift) validate(*drift, dataset.sample_rate_hz);
  ScanDataset out = dataset;
  bool any = false;
  for (ScanLine& line : out.lines)
    for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
      const Channel a = acceleration_channel(axis);
      if (!line.has_channel(a)) continue;
      any = true;
      for (std::size_t p = 0; p < line.points.size(); ++p) {
        Trace u = integrate_to_displacement(channel_trace(out, line, p, a)).second;
        if (drift) u = remove_drift(u, *drift);
        set_channel(line, p, displacement_channel(axis), u.samples);
      }
    }
  if (!any) throw ValidationError("integrate: missing acceleration channel (ax, ay or az) in every line");
  return out;
}

ScanDataset mode_filter_dataset(const ScanDataset& dataset, const FilterSpec& band) {
  validate(dataset);
  validate(band, dataset.sample_rate_hz);
  ScanDataset out = dataset;
  bool any = false;
  for (ScanLine& line : out.lines)
    for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
      const Channel c = displacement_channel(axis);
      if (!line.has_channel(c)) continue;
      any = true;
      for (std::size_t p = 0; p < line.points.size(); ++p)
        set_channel(line, p, c, bandpass_mode_filter(channel_trace(out, line, p, c), band).samples);
    }
  if (!any) throw ValidationError("mode filter: dataset has no displacement channel");
  return out;
}

}  // namespace wavekit
