#include "fixtures.hpp"

#include "wavekit/dataset.hpp"
#include "wavekit/dataset_io.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

namespace {

using namespace wavekit;
using fixtures::TempDir;

TEST(Dataset, SmallRoundtripWritesManifestAndOneBlob) {
  TempDir dir("ds_small");
  ScanDataset ds = fixtures::random_dataset(1, 3, 64, 1);
  write_dataset(ds, dir.path());
  int blobs = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path()))
    if (e.path().extension() == ".f32") ++blobs;
  EXPECT_EQ(blobs, 1);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_TRUE(read_dataset(dir.path()) == ds);
}

TEST(Dataset, RoundtripIsBitExactOverRandomDatasets) {
  for (unsigned seed = 0; seed < 12; ++seed) {
    std::mt19937 rng(seed);
    const int lines = 1 + static_cast<int>(rng() % 4);
    const int points = 1 + static_cast<int>(rng() % 6);
    const Eigen::Index samples = 12 + static_cast<Eigen::Index>(rng() % 300);
    ScanDataset ds = fixtures::random_dataset(lines, points, samples, seed, 7.5);
    if (seed % 3 == 0) ds.beam.defect = DefectDescriptor{1000.0, 50.0, 1.5};
    if (seed % 2 == 0) {
      for (std::size_t p = 0; p < ds.lines[0].points.size(); ++p)
        set_channel(ds.lines[0], p, Channel::uy, Eigen::VectorXd::Random(samples) * 1e-7);
    }
    TempDir dir("ds_prop");
    write_dataset(ds, dir.path());
    const ScanDataset back = read_dataset(dir.path());
    ASSERT_TRUE(back == ds) << "seed " << seed;
    for (std::size_t l = 0; l < ds.lines.size(); ++l)
      for (std::size_t p = 0; p < ds.lines[l].points.size(); ++p)
        ASSERT_EQ(0, std::memcmp(ds.lines[l].points[p].channels.data(), back.lines[l].points[p].channels.data(),
                                 sizeof(float) * ds.lines[l].points[p].channels.size()));
  }
}

TEST(Dataset, MismatchedTraceLengthsFailValidation) {
  ScanDataset ds = fixtures::random_dataset(1, 3, 64, 2);
  ds.lines[0].points[1].channels.conservativeResize(4, 63);
  try {
    validate(ds);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("trace length mismatch"), std::string::npos);
  }
  TempDir dir("ds_bad");
  EXPECT_THROW(write_dataset(ds, dir.path()), ValidationError);
}

TEST(Dataset, BlobSizeFollowsLayout) {
  EXPECT_EQ(8 * blob_bytes(200, 4, 8192), 8ull * 200 * 4 * 8192 * 4);
  TempDir dir("ds_size");
  ScanDataset ds = fixtures::random_dataset(1, 200, 8192, 3);
  write_dataset(ds, dir.path());
  std::uintmax_t total = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path()))
    if (e.path().extension() == ".f32") total += e.file_size();
  EXPECT_EQ(total, 200ull * 4 * 8192 * 4);
}

TEST(Dataset, BlobIsLittleEndianPointChannelSampleOrder) {
  TempDir dir("ds_layout");
  ScanDataset ds = fixtures::random_dataset(1, 2, 5, 4);
  write_dataset(ds, dir.path());
  nlohmann::json m;
  std::ifstream(dir / "manifest.json") >> m;
  std::ifstream in(dir / m["lines"][0]["trace_file"].get<std::string>(), std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  ASSERT_EQ(bytes.size(), 2u * 4 * 5 * 4);
  // Point 1, channel 2 (ay), sample 3.
  const std::size_t offset = ((1 * 4 + 2) * 5 + 3) * 4;
  std::uint32_t bits = 0;
  for (int b = 3; b >= 0; --b) bits = (bits << 8) | bytes[offset + b];
  float v;
  std::memcpy(&v, &bits, 4);
  EXPECT_EQ(v, ds.lines[0].points[1].channels(2, 3));
}

TEST(Dataset, MissingBlobIsReported) {
  TempDir dir("ds_missing");
  write_dataset(fixtures::random_dataset(1, 3, 16, 5), dir.path());
  for (const auto& e : std::filesystem::directory_iterator(dir.path()))
    if (e.path().extension() == ".f32") std::filesystem::remove(e.path());
  try {
    read_dataset(dir.path());
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing trace file"), std::string::npos);
  }
}

TEST(Dataset, TruncatedBlobReportsExpectedAndActualSize) {
  TempDir dir("ds_short");
  write_dataset(fixtures::random_dataset(1, 3, 16, 6), dir.path());
  const std::uintmax_t expected = blob_bytes(3, 4, 16);
  for (const auto& e : std::filesystem::directory_iterator(dir.path()))
    if (e.path().extension() == ".f32") std::filesystem::resize_file(e.path(), expected - 4);
  try {
    read_dataset(dir.path());
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(std::to_string(expected)), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(expected - 4)), std::string::npos) << msg;
  }
}

TEST(Dataset, UnknownMajorVersionIsRejected) {
  TempDir dir("ds_version");
  write_dataset(fixtures::random_dataset(1, 2, 8, 7), dir.path());
  nlohmann::json m;
  std::ifstream(dir / "manifest.json") >> m;
  m["version"] = "2.0";
  std::ofstream(dir / "manifest.json") << m.dump();
  EXPECT_THROW(read_dataset(dir.path()), IoError);
  m["version"] = "1.7";
  std::ofstream(dir / "manifest.json") << m.dump();
  EXPECT_NO_THROW(read_dataset(dir.path()));
}

TEST(Dataset, ChannelOrderAndForceAreValidated) {
  ScanDataset ds = fixtures::random_dataset(1, 2, 8, 8);
  std::swap(ds.lines[0].channels[1], ds.lines[0].channels[2]);
  EXPECT_THROW(validate(ds), ValidationError);
  ds = fixtures::random_dataset(1, 2, 8, 8);
  ds.lines[0].points[0].channels.row(0).setZero();
  EXPECT_THROW(validate(ds), ValidationError);
  ds = fixtures::random_dataset(1, 3, 8, 8);
  ds.lines[0].positions_mm[2] = ds.lines[0].positions_mm[1];
  EXPECT_THROW(validate(ds), ValidationError);
}

TEST(Dataset, SetChannelKeepsCanonicalOrder) {
  ScanDataset ds = fixtures::random_dataset(1, 2, 8, 9);
  set_channel(ds.lines[0], 1, Channel::uz, Eigen::VectorXd::Constant(8, 2.0));
  set_channel(ds.lines[0], 1, Channel::ux, Eigen::VectorXd::Constant(8, 1.0));
  const std::vector<Channel> expected{Channel::force, Channel::ax, Channel::ay, Channel::az, Channel::ux, Channel::uz};
  EXPECT_EQ(ds.lines[0].channels, expected);
  EXPECT_EQ(channel_trace(ds, ds.lines[0], 1, Channel::ux).samples(3), 1.0);
  EXPECT_EQ(channel_trace(ds, ds.lines[0], 1, Channel::uz).samples(3), 2.0);
  EXPECT_EQ(channel_trace(ds, ds.lines[0], 0, Channel::uz).samples(3), 0.0);
  EXPECT_NO_THROW(validate(ds));
}

}  // namespace
