#include "wavekit/dataset_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wavekit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

std::string blob_name(const ScanLine& line) { return "line_" + line.line_id + ".f32"; }

json geometry_json(const GeometryMeta& g) {
  json j{{"section", g.section},
         {"length_mm", g.length_mm},
         {"support_positions_mm", g.support_positions_mm}};
  if (g.defect)
    j["defect"] = {{"z_start_mm", g.defect->z_start_mm},
                   {"length_mm", g.defect->length_mm},
                   {"depth_mm", g.defect->depth_mm}};
  return j;
}

GeometryMeta geometry_from_json(const json& j) {
  GeometryMeta g;
  g.section = j.value("section", std::string("i_section"));
  g.length_mm = j.at("length_mm").get<double>();
  g.support_positions_mm = j.value("support_positions_mm", std::vector<double>{});
  if (j.contains("defect")) {
    const auto& d = j.at("defect");
    g.defect = DefectDescriptor{d.at("z_start_mm").get<double>(), d.at("length_mm").get<double>(),
                                d.at("depth_mm").get<double>()};
  }
  return g;
}

void write_blob(const ScanLine& line, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto n = line.samples_per_trace();
  std::vector<std::uint32_t> row(static_cast<std::size_t>(n));
  for (const auto& p : line.points) {
    for (Eigen::Index c = 0; c < p.channels.rows(); ++c) {
      for (Eigen::Index s = 0; s < n; ++s) {
        const float v = p.channels(c, s);
        std::uint32_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        row[static_cast<std::size_t>(s)] = to_little(bits);
      }
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_dataset(const ScanDataset& ds, const fs::path& dir) {
  validate(ds);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  json lines = json::array();
  for (const auto& line : ds.lines) {
    std::vector<std::string> channels;
    for (Channel c : line.channels) channels.emplace_back(to_string(c));
    std::vector<Eigen::Index> triggers;
    for (const auto& p : line.points) triggers.push_back(p.trigger_index);
    lines.push_back({{"line_id", line.line_id},
                     {"normal_component", std::string(to_string(line.normal_component))},
                     {"transverse_mm", {line.transverse_mm.x(), line.transverse_mm.y()}},
                     {"positions_mm", line.positions_mm},
                     {"trace_file", blob_name(line)},
                     {"channels", channels},
                     {"samples_per_trace", line.samples_per_trace()},
                     {"trigger_indices", triggers}});
    write_blob(line, dir / blob_name(line));
  }
  json manifest{
      {"version", std::to_string(kManifestMajorVersion) + "." + std::to_string(kManifestMinorVersion)},
      {"sample_rate_hz", ds.sample_rate_hz},
      {"t0_s", ds.t0_s},
      {"sensor_position_mm",
       {ds.sensor_position_mm.x(), ds.sensor_position_mm.y(), ds.sensor_position_mm.z()}},
      {"provenance", std::string(to_string(ds.provenance))},
      {"beam_geometry", geometry_json(ds.beam)},
      {"lines", lines}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed for manifest in " + dir.string());
}

ScanDataset read_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("missing manifest: " + manifest_path.string());
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }

  const std::string version = m.at("version").get<std::string>();
  const int major = std::stoi(version.substr(0, version.find('.')));
  if (major != kManifestMajorVersion)
    throw IoError("manifest version mismatch: found " + version + ", supported major " +
                  std::to_string(kManifestMajorVersion));

  ScanDataset ds;
  try {
    ds.sample_rate_hz = m.at("sample_rate_hz").get<double>();
    ds.t0_s = m.value("t0_s", 0.0);
    const auto sp = m.at("sensor_position_mm").get<std::vector<double>>();
    if (sp.size() != 3) throw ValidationError("sensor_position_mm: expected 3 values");
    ds.sensor_position_mm = Vec3(sp[0], sp[1], sp[2]);
    ds.provenance = parse_provenance(m.value("provenance", std::string("measured")));
    ds.beam = geometry_from_json(m.at("beam_geometry"));

    for (const auto& jl : m.at("lines")) {
      ScanLine line;
      line.line_id = jl.at("line_id").get<std::string>();
      line.normal_component = parse_axis(jl.at("normal_component").get<std::string>());
      const auto tr = jl.value("transverse_mm", std::vector<double>{0.0, 0.0});
      line.transverse_mm = Eigen::Vector2d(tr.at(0), tr.at(1));
      line.positions_mm = jl.at("positions_mm").get<std::vector<double>>();
      for (const auto& c : jl.at("channels")) line.channels.push_back(parse_channel(c.get<std::string>()));
      const auto n = jl.at("samples_per_trace").get<Eigen::Index>();
      const auto triggers =
          jl.value("trigger_indices", std::vector<Eigen::Index>(line.positions_mm.size(), 0));
      if (triggers.size() != line.positions_mm.size())
        throw ValidationError("line " + line.line_id + ": trigger_indices count mismatch");

      const fs::path blob = dir / jl.at("trace_file").get<std::string>();
      if (!fs::exists(blob)) throw IoError("missing trace file: " + blob.string());
      const std::uint64_t expected =
          blob_bytes(line.positions_mm.size(), line.channels.size(), static_cast<std::uint64_t>(n));
      const std::uint64_t actual = fs::file_size(blob);
      if (actual != expected)
        throw IoError("truncated or oversized trace file " + blob.string() + ": expected " +
                      std::to_string(expected) + " bytes, found " + std::to_string(actual));

      std::ifstream bin(blob, std::ios::binary);
      if (!bin) throw IoError("cannot open trace file: " + blob.string());
      std::vector<std::uint32_t> row(static_cast<std::size_t>(n));
      const auto nch = static_cast<Eigen::Index>(line.channels.size());
      for (std::size_t p = 0; p < line.positions_mm.size(); ++p) {
        PointRecord rec;
        rec.trigger_index = triggers[p];
        rec.channels.resize(nch, n);
        for (Eigen::Index c = 0; c < nch; ++c) {
          bin.read(reinterpret_cast<char*>(row.data()),
                   static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
          if (!bin) throw IoError("read failed for " + blob.string());
          for (Eigen::Index s = 0; s < n; ++s) {
            const std::uint32_t bits = to_little(row[static_cast<std::size_t>(s)]);
            float v;
            std::memcpy(&v, &bits, sizeof v);
            rec.channels(c, s) = v;
          }
        }
        line.points.push_back(std::move(rec));
      }
      ds.lines.push_back(std::move(line));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }
  validate(ds);
  return ds;
}

}  // namespace wavekit
