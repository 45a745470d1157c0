#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "pdfevent/checkpoint.hpp"
#include "pdfevent/error.hpp"

using namespace pdfevent;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "pdfevent_checkpoint_tests";
  fs::create_directories(dir);
  return dir / name;
}

checkpoint::Checkpoint sample() {
  checkpoint::Checkpoint c;
  c.config.in_channels = 3;
  c.config.hidden = {4, 6};
  c.config.kernel_size = 3;
  c.config.out_mode = model::OutMode::segmentation_2class;
  c.config.seed = 0xDEADBEEFCAFEULL;
  c.params = model::init_parameters(c.config);
  c.params.tensors[0].values[0] = -0.0;
  c.params.tensors[0].values[1] = 1e-310;
  return c;
}

std::string bytes_of(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Checkpoint, RoundTripExact) {
  const auto c = sample();
  const auto path = scratch("model.ckpt");
  checkpoint::save(path, c);
  const auto back = checkpoint::load(path);
  EXPECT_EQ(back.config.in_channels, 3u);
  EXPECT_EQ(back.config.hidden, c.config.hidden);
  EXPECT_EQ(back.config.kernel_size, 3u);
  EXPECT_EQ(back.config.out_mode, model::OutMode::segmentation_2class);
  EXPECT_EQ(back.config.seed, c.config.seed);
  ASSERT_EQ(back.params.tensors.size(), c.params.tensors.size());
  for (std::size_t i = 0; i < c.params.tensors.size(); ++i) {
    EXPECT_EQ(back.params.tensors[i].name, c.params.tensors[i].name);
    EXPECT_EQ(back.params.tensors[i].shape, c.params.tensors[i].shape);
    EXPECT_EQ(back.params.tensors[i].values, c.params.tensors[i].values);
  }
  EXPECT_TRUE(std::signbit(back.params.tensors[0].values[0]));
}

TEST(Checkpoint, Deterministic) {
  const auto c = sample();
  checkpoint::save(scratch("a.ckpt"), c);
  checkpoint::save(scratch("b.ckpt"), c);
  EXPECT_EQ(bytes_of(scratch("a.ckpt")), bytes_of(scratch("b.ckpt")));
  EXPECT_EQ(bytes_of(scratch("a.ckpt")).substr(0, 8), "PDFEVCKP");
}

TEST(Checkpoint, BadMagic) {
  checkpoint::save(scratch("magic.ckpt"), sample());
  auto data = bytes_of(scratch("magic.ckpt"));
  data[0] = 'X';
  std::ofstream(scratch("magic.ckpt"), std::ios::binary) << data;
  EXPECT_THROW(checkpoint::load(scratch("magic.ckpt")), Error);
}

TEST(Checkpoint, TruncatedAtEveryLength) {
  checkpoint::save(scratch("full.ckpt"), sample());
  const auto data = bytes_of(scratch("full.ckpt"));
  for (std::size_t cut : {std::size_t{0}, std::size_t{7}, std::size_t{12}, std::size_t{40}, data.size() / 2,
                          data.size() - 1}) {
    std::ofstream(scratch("cut.ckpt"), std::ios::binary) << data.substr(0, cut);
    EXPECT_THROW(checkpoint::load(scratch("cut.ckpt")), Error) << cut;
  }
}

TEST(Checkpoint, TrailingBytesRejected) {
  checkpoint::save(scratch("trail.ckpt"), sample());
  std::ofstream(scratch("trail.ckpt"), std::ios::binary | std::ios::app) << "x";
  EXPECT_THROW(checkpoint::load(scratch("trail.ckpt")), Error);
}

TEST(Checkpoint, MissingFile) {
  try {
    checkpoint::load(scratch("absent.ckpt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Checkpoint, NonFiniteParametersRejectedOnSave) {
  auto c = sample();
  c.params.tensors[1].values[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(checkpoint::save(scratch("nan.ckpt"), c), Error);
}
