#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pdfevent/decode.hpp"
#include "pdfevent/error.hpp"
#include "pdfevent/targets.hpp"

using namespace pdfevent;
using namespace pdfevent::decode;

namespace {

DecodeParams params(double mu, std::optional<double> sigma, std::size_t alpha) {
  DecodeParams p;
  p.mu = mu;
  p.sigma = sigma;
  p.alpha = alpha;
  return p;
}

targets::PdfSpec gaussian(double sigma) {
  targets::PdfSpec s;
  s.sigma = sigma;
  s.width = targets::minimum_width(s);
  s.day_length = 10 * s.width;
  return s;
}

std::vector<double> step_probabilities(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> runs) {
  std::vector<double> y(n, 0.0);
  for (auto [a, b] : runs) std::fill(y.begin() + static_cast<std::ptrdiff_t>(a), y.begin() + static_cast<std::ptrdiff_t>(b), 1.0);
  return y;
}

}  // namespace

TEST(DecodeRegression, ZerosGiveNothing) {
  const std::vector<double> z(50, 0.0);
  const auto out = decode_regression(z, z, params(0.5, std::nullopt, 5));
  EXPECT_TRUE(out.onsets.empty());
  EXPECT_TRUE(out.offsets.empty());
}

TEST(DecodeRegression, EncodedOnsetRecovered) {
  EventSet e;
  e.intervals.push_back({100, 160, std::nullopt});
  const auto t = targets::encode_regression(e, 300, gaussian(5.0));
  const auto out = decode_regression(t.channels[0], t.channels[1], params(0.5, std::nullopt, 10));
  ASSERT_EQ(out.onsets.size(), 1u);
  EXPECT_EQ(out.onsets[0].step, 100);
  EXPECT_DOUBLE_EQ(out.onsets[0].score, *std::max_element(t.channels[0].begin(), t.channels[0].end()));
  ASSERT_EQ(out.offsets.size(), 1u);
  EXPECT_EQ(out.offsets[0].step, 160);
}

TEST(DecodeRegression, CloseOnsetsSuppressed) {
  std::vector<double> y(40, 0.0);
  y[10] = 0.8;
  y[13] = 1.0;
  const auto out = decode_regression(y, std::vector<double>(40, 0.0), params(0.5, std::nullopt, 10));
  ASSERT_EQ(out.onsets.size(), 1u);
  EXPECT_EQ(out.onsets[0].step, 13);
}

TEST(DecodeRegression, ScoresFromRawChannel) {
  std::vector<double> y(60, 0.0);
  y[30] = 2.0;
  y[29] = 1.0;
  y[31] = 1.0;
  const auto out = decode_regression_channel(y, params(0.5, 2.0, 5));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].step, 30);
  EXPECT_EQ(out[0].score, 2.0);
}

TEST(DecodeRegression, LengthMismatch) {
  try {
    decode_regression(std::vector<double>(5, 0.0), std::vector<double>(4, 0.0), params(0.5, std::nullopt, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(DecodeRegression, RoundTripWellSeparated) {
  oracle::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const double sigma = 1.0 + 4.0 * rng.uniform();
    const auto spec = gaussian(sigma);
    const auto w = static_cast<Step>(spec.width);
    EventSet e;
    Step t = static_cast<Step>(rng.below(20));
    const Step n = 2000;
    while (true) {
      const Step on = t + w + 1 + static_cast<Step>(rng.below(50));
      const Step off = on + w + 1 + static_cast<Step>(rng.below(50));
      if (off >= n) break;
      e.intervals.push_back({on, off, std::nullopt});
      t = off;
    }
    const auto target = targets::encode_regression(e, static_cast<std::size_t>(n), spec);
    auto p = params(0.5, std::nullopt, static_cast<std::size_t>(w));
    p.min_height = 0.5 / target.gamma;
    const auto out = decode_regression(target.channels[0], target.channels[1], p);
    ASSERT_EQ(out.onsets.size(), e.intervals.size());
    ASSERT_EQ(out.offsets.size(), e.intervals.size());
    for (std::size_t i = 0; i < e.intervals.size(); ++i) {
      EXPECT_LE(std::llabs(out.onsets[i].step - e.intervals[i].onset), 1);
      EXPECT_LE(std::llabs(out.offsets[i].step - e.intervals[i].offset), 1);
    }
  }
}

TEST(DecodeSegThreshold, ConstantZero) {
  const auto out = decode_seg_threshold(std::vector<double>(20, 0.0), params(0.5, std::nullopt, 1));
  EXPECT_TRUE(out.onsets.empty());
  EXPECT_TRUE(out.offsets.empty());
}

TEST(DecodeSegThreshold, SimpleStep) {
  const std::vector<double> y{0, 0, 1, 1, 0, 0};
  const auto out = decode_seg_threshold(y, params(0.5, std::nullopt, 1));
  const auto I = oracle::windowed_difference(y, 1);
  ASSERT_EQ(out.onsets.size(), 1u);
  ASSERT_EQ(out.offsets.size(), 1u);
  EXPECT_EQ(out.onsets[0].step, 2);
  EXPECT_EQ(out.onsets[0].score, std::abs(I[2]));
  EXPECT_EQ(out.offsets[0].step, 4);
  EXPECT_EQ(out.offsets[0].score, std::abs(I[4]));
}

TEST(DecodeSegThreshold, OscillationGivesOneEventPerCrossingPair) {
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) y.push_back(i % 4 < 2 ? 0.2 : 0.8);
  const auto out = decode_seg_threshold(y, params(0.5, std::nullopt, 1));
  std::size_t ups = 0;
  std::size_t downs = 0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    ups += y[t - 1] < 0.5 && y[t] > 0.5;
    downs += y[t - 1] > 0.5 && y[t] < 0.5;
  }
  EXPECT_EQ(out.onsets.size(), ups);
  EXPECT_EQ(out.offsets.size(), downs);
}

TEST(DecodeSegThreshold, TouchingMuEmitsNothing) {
  const std::vector<double> y{0.2, 0.5, 0.2, 0.5, 0.5, 0.2};
  const auto out = decode_seg_threshold(y, params(0.5, std::nullopt, 1));
  EXPECT_TRUE(out.onsets.empty());
  EXPECT_TRUE(out.offsets.empty());
}

TEST(DecodeSegThreshold, NoSyntheticOnsetAtStart) {
  const auto out = decode_seg_threshold(step_probabilities(10, {{0, 5}}), params(0.5, std::nullopt, 1));
  EXPECT_TRUE(out.onsets.empty());
  ASSERT_EQ(out.offsets.size(), 1u);
  EXPECT_EQ(out.offsets[0].step, 5);
}

TEST(DecodeSegThreshold, AlternatesWhenStartingAndEndingLow) {
  oracle::Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> y(100);
    for (auto& v : y) v = rng.uniform();
    // Flat zero margins wider than the smoothing radius keep both ends low.
    std::fill(y.begin(), y.begin() + 8, 0.0);
    std::fill(y.end() - 8, y.end(), 0.0);
    const auto out = decode_seg_threshold(y, params(0.3 + 0.4 * rng.uniform(), 1.0, 2));
    ASSERT_EQ(out.onsets.size(), out.offsets.size());
    for (std::size_t i = 0; i < out.onsets.size(); ++i) {
      EXPECT_LT(out.onsets[i].step, out.offsets[i].step);
      if (i + 1 < out.onsets.size()) EXPECT_LT(out.offsets[i].step, out.onsets[i + 1].step);
    }
  }
}

TEST(DecodeSegThreshold, RejectsInvalidProbability) {
  try {
    decode_seg_threshold(std::vector<double>{0.1, 1.2}, params(0.5, std::nullopt, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidProbability);
  }
}

TEST(DecodeSegPeaks, ConstantGivesNothing) {
  const auto out = decode_seg_peaks(std::vector<double>(20, 0.7), params(0.5, std::nullopt, 3));
  EXPECT_TRUE(out.onsets.empty());
  EXPECT_TRUE(out.offsets.empty());
}

TEST(DecodeSegPeaks, StepUpAndDown) {
  const auto up = decode_seg_peaks(std::vector<double>{0, 0, 1, 1}, params(0.5, std::nullopt, 1));
  ASSERT_EQ(up.onsets.size(), 1u);
  EXPECT_TRUE(up.onsets[0].step == 1 || up.onsets[0].step == 2);
  EXPECT_EQ(up.onsets[0].score, 1.0);
  EXPECT_TRUE(up.offsets.empty());
  const auto down = decode_seg_peaks(std::vector<double>{1, 1, 0, 0}, params(0.5, std::nullopt, 1));
  ASSERT_EQ(down.offsets.size(), 1u);
  EXPECT_EQ(down.offsets[0].step, up.onsets[0].step);
  EXPECT_EQ(down.offsets[0].score, 1.0);
  EXPECT_TRUE(down.onsets.empty());
}

TEST(DecodeSegPeaks, AgreesWithThresholdOnSteps) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t t = 5 + rng.below(10);
    while (t + 40 < 400) {
      const std::size_t len = 15 + rng.below(20);
      runs.push_back({t, t + len});
      t += len + 15 + rng.below(20);
    }
    const auto y = step_probabilities(400, runs);
    const auto p = params(0.5, std::nullopt, 5);
    const auto a = decode_seg_threshold(y, p);
    const auto b = decode_seg_peaks(y, p);
    EXPECT_EQ(a.onsets.size(), b.onsets.size());
    EXPECT_EQ(a.offsets.size(), b.offsets.size());
  }
}

TEST(Decoders, Deterministic) {
  oracle::Rng rng(12);
  std::vector<double> y(200);
  for (auto& v : y) v = rng.uniform();
  const auto p = params(0.5, 3.0, 4);
  const auto a = decode_seg_peaks(y, p);
  const auto b = decode_seg_peaks(y, p);
  EXPECT_EQ(a.onsets, b.onsets);
  EXPECT_EQ(a.offsets, b.offsets);
  EXPECT_EQ(decode_seg_threshold(y, p).onsets, decode_seg_threshold(y, p).onsets);
  EXPECT_EQ(decode_regression_channel(y, p), decode_regression_channel(y, p));
}

TEST(DecodeParamsValidation, Rejects) {
  EXPECT_THROW(validate(params(1.5, std::nullopt, 1)), Error);
  EXPECT_THROW(validate(params(0.5, std::nullopt, 0)), Error);
  EXPECT_THROW(validate(params(0.5, -1.0, 1)), Error);
  EXPECT_EQ(decoder_from_string("method1"), Decoder::seg_threshold);
  EXPECT_EQ(decoder_from_string("method2"), Decoder::seg_peaks);
}
