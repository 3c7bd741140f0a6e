#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scf/audio.hpp"
#include "scf/rng.hpp"
#include "scf/spectrogram.hpp"
#include "wav_test_util.hpp"

namespace {

using scf::testutil::wav_bytes;
using scf::testutil::WavSpec;

TEST(ParseWav, MinimalMonoClip) {
  scf::AudioClip clip =
      scf::parse_wav(wav_bytes(std::vector<std::int16_t>(160, 0)), "mem");
  EXPECT_EQ(clip.sample_rate, 16000);
  ASSERT_EQ(clip.samples.size(), 160u);
  for (double s : clip.samples) EXPECT_EQ(s, 0.0);
}

TEST(ParseWav, FullScaleMapping) {
  scf::AudioClip clip =
      scf::parse_wav(wav_bytes({-32768, 32767, 16384, -16384, 1}), "mem");
  ASSERT_EQ(clip.samples.size(), 5u);
  EXPECT_DOUBLE_EQ(clip.samples[0], -1.0);
  EXPECT_DOUBLE_EQ(clip.samples[1], 32767.0 / 32768.0);
  EXPECT_DOUBLE_EQ(clip.samples[2], 0.5);
  EXPECT_DOUBLE_EQ(clip.samples[3], -0.5);
  EXPECT_DOUBLE_EQ(clip.samples[4], 1.0 / 32768.0);
}

TEST(ParseWav, SkipsUnknownChunksWithOddPadding) {
  WavSpec spec;
  spec.extra_chunk_id = "LIST";
  spec.extra_chunk_body = "INFOabc";  // 7 bytes, forces a pad byte
  scf::AudioClip clip = scf::parse_wav(wav_bytes({100, -100}, spec), "mem");
  ASSERT_EQ(clip.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(clip.samples[0], 100.0 / 32768.0);
}

TEST(ParseWav, RejectsStereo) {
  WavSpec spec;
  spec.channels = 2;
  try {
    scf::parse_wav(wav_bytes({0, 0}, spec), "mem");
    FAIL() << "stereo accepted";
  } catch (const scf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("2 channels"), std::string::npos)
        << e.what();
  }
}

TEST(ParseWav, RejectsNonPcmEncoding) {
  WavSpec spec;
  spec.format = 3;
  try {
    scf::parse_wav(wav_bytes({0}, spec), "mem");
    FAIL() << "float encoding accepted";
  } catch (const scf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported WAV encoding 3"),
              std::string::npos)
        << e.what();
  }
}

TEST(ParseWav, RejectsNonSixteenBit) {
  WavSpec spec;
  spec.bits = 8;
  try {
    scf::parse_wav(wav_bytes({0}, spec), "mem");
    FAIL() << "8-bit accepted";
  } catch (const scf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("8-bit"), std::string::npos)
        << e.what();
  }
}

TEST(ParseWav, RejectsNonWavBytes) {
  EXPECT_THROW(scf::parse_wav("not audio at all", "mem"), scf::InputError);
  std::string riff = wav_bytes({0});
  riff[9] = 'X';  // breaks the WAVE tag
  EXPECT_THROW(scf::parse_wav(riff, "mem"), scf::InputError);
}

TEST(ParseWav, RejectsMissingChunksAndTruncation) {
  std::string bytes = wav_bytes({1, 2, 3, 4});
  EXPECT_THROW(scf::parse_wav(bytes.substr(0, 30), "mem"), scf::InputError);

  std::string headless = "RIFF";
  scf::testutil::put_u32(headless, 4);
  headless += "WAVE";
  try {
    scf::parse_wav(headless, "mem");
    FAIL() << "chunkless file accepted";
  } catch (const scf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("no fmt chunk"), std::string::npos);
  }
}

TEST(ParseWav, RejectsPartialSample) {
  // hand-build a data chunk with an odd byte count
  std::string fmt;
  scf::testutil::put_u16(fmt, 1);
  scf::testutil::put_u16(fmt, 1);
  scf::testutil::put_u32(fmt, 16000);
  scf::testutil::put_u32(fmt, 32000);
  scf::testutil::put_u16(fmt, 2);
  scf::testutil::put_u16(fmt, 16);
  std::string body = "WAVE";
  body += "fmt ";
  scf::testutil::put_u32(body, static_cast<std::uint32_t>(fmt.size()));
  body += fmt;
  body += "data";
  scf::testutil::put_u32(body, 3);
  body += std::string(3, '\x7');
  body.push_back('\0');
  std::string bytes = "RIFF";
  scf::testutil::put_u32(bytes, static_cast<std::uint32_t>(body.size()));
  bytes += body;
  try {
    scf::parse_wav(bytes, "mem");
    FAIL() << "partial sample accepted";
  } catch (const scf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("partial 16-bit sample"),
              std::string::npos)
        << e.what();
  }
}

TEST(LoadAudio, ReadsFromDisk) {
  std::string path = ::testing::TempDir() + "clip.wav";
  std::vector<std::int16_t> samples{0, 1000, -1000, 32767};
  {
    std::ofstream out(path, std::ios::binary);
    std::string bytes = wav_bytes(samples);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  scf::AudioClip clip = scf::load_audio(path);
  EXPECT_EQ(clip.sample_rate, 16000);
  ASSERT_EQ(clip.samples.size(), 4u);
  EXPECT_DOUBLE_EQ(clip.samples[1], 1000.0 / 32768.0);
  EXPECT_THROW(scf::load_audio(path + ".absent"), scf::InputError);
}

TEST(Spectrogram, OneSecondDefaultGridHas98Frames) {
  scf::SpectrogramConfig cfg;
  cfg.normalization = scf::Normalization::none;
  EXPECT_EQ(cfg.window_samples(), 400);
  EXPECT_EQ(cfg.hop_samples(), 160);
  std::vector<double> samples(16000, 0.25);
  scf::Spectrogram spec = scf::spectrogram(samples, cfg);
  EXPECT_EQ(spec.frames, 98u);
  EXPECT_EQ(spec.bins, 257u);
  EXPECT_EQ(spec.frame_times.size(), 98u);
  EXPECT_NEAR(spec.frame_times[0], (400.0 - 1.0) / 2.0 / 16000.0, 1e-12);
  EXPECT_NEAR(spec.bin_freqs[32], 1000.0, 1e-9);
}

TEST(Spectrogram, FrameCountFormulaOnRandomTriples) {
  scf::Rng rng(606);
  std::uniform_int_distribution<int> w_dist(2, 64);
  std::uniform_int_distribution<int> h_dist(1, 32);
  std::uniform_int_distribution<int> extra(0, 2000);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int w = w_dist(rng);
    int h = h_dist(rng);
    int len = w + extra(rng);
    scf::SpectrogramConfig cfg;
    cfg.sample_rate = 1000;
    cfg.window_ms = w;  // 1 kHz makes milliseconds count samples directly
    cfg.hop_ms = h;
    cfg.transform_size = 64;
    cfg.normalization = scf::Normalization::none;
    std::vector<double> samples(static_cast<std::size_t>(len));
    for (double& s : samples) s = val(rng);
    scf::Spectrogram spec = scf::spectrogram(samples, cfg);
    EXPECT_EQ(spec.frames, static_cast<std::size_t>((len - w) / h + 1))
        << "L=" << len << " W=" << w << " H=" << h;
  }
}

TEST(Spectrogram, PureToneLandsInItsBin) {
  scf::SpectrogramConfig cfg;
  cfg.normalization = scf::Normalization::none;
  std::vector<double> samples(16000);
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] =
        std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) /
                 16000.0);
  scf::Spectrogram spec = scf::spectrogram(samples, cfg);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    std::size_t argmax = 0;
    for (std::size_t b = 1; b < spec.bins; ++b)
      if (spec.at(f, b) > spec.at(f, argmax)) argmax = b;
    EXPECT_EQ(argmax, 32u) << "frame " << f;
  }
}

TEST(Spectrogram, AllZeroClipStaysZeroUnderBothNormalizations) {
  std::vector<double> samples(4000, 0.0);
  scf::SpectrogramConfig cfg;
  cfg.normalization = scf::Normalization::none;
  for (double v : scf::spectrogram(samples, cfg).values) EXPECT_EQ(v, 0.0);
  cfg.normalization = scf::Normalization::per_bin_zscore;
  for (double v : scf::spectrogram(samples, cfg).values) EXPECT_EQ(v, 0.0);
}

TEST(Spectrogram, ZscoreNormalizesEveryNonconstantBin) {
  scf::Rng rng(17);
  std::uniform_real_distribution<double> val(-0.5, 0.5);
  std::vector<double> samples(16000);
  for (double& s : samples) s = val(rng);
  scf::SpectrogramConfig cfg;
  scf::Spectrogram spec = scf::spectrogram(samples, cfg);
  for (std::size_t b = 0; b < spec.bins; ++b) {
    double mean = 0.0;
    for (std::size_t f = 0; f < spec.frames; ++f) mean += spec.at(f, b);
    mean /= static_cast<double>(spec.frames);
    double var = 0.0;
    for (std::size_t f = 0; f < spec.frames; ++f) {
      double d = spec.at(f, b) - mean;
      var += d * d;
    }
    var /= static_cast<double>(spec.frames);
    EXPECT_LT(std::abs(mean), 1e-9) << "bin " << b;
    EXPECT_NEAR(var, 1.0, 1e-6) << "bin " << b;
  }
}

TEST(Spectrogram, HammingWindowIsSymmetric) {
  for (int w : {2, 3, 64, 399, 400}) {
    std::vector<double> win = scf::hamming_window(w);
    ASSERT_EQ(win.size(), static_cast<std::size_t>(w));
    for (int n = 0; n < w; ++n)
      EXPECT_NEAR(win[static_cast<std::size_t>(n)],
                  win[static_cast<std::size_t>(w - 1 - n)], 1e-12);
    EXPECT_NEAR(win[0], 0.08, 1e-12);
  }
}

TEST(Spectrogram, NoiseEnergyGrowsLinearlyWithFrames) {
  scf::SpectrogramConfig cfg;
  cfg.normalization = scf::Normalization::none;
  double min_slope = 1e300, max_slope = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    scf::Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 0.1);
    for (std::size_t len : {16000u, 32000u}) {
      std::vector<double> samples(len);
      for (double& s : samples) s = normal(rng);
      scf::Spectrogram spec = scf::spectrogram(samples, cfg);
      double energy = 0.0;
      for (double v : spec.values) energy += v * v;
      double slope = energy / static_cast<double>(spec.frames);
      min_slope = std::min(min_slope, slope);
      max_slope = std::max(max_slope, slope);
    }
  }
  EXPECT_LT(max_slope / min_slope, 1.1)
      << "per-frame energy drifted more than 10%";
}

TEST(Spectrogram, DeterministicForIdenticalInput) {
  scf::Rng rng(88);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> samples(8000);
  for (double& s : samples) s = val(rng);
  scf::SpectrogramConfig cfg;
  scf::Spectrogram a = scf::spectrogram(samples, cfg);
  scf::Spectrogram b = scf::spectrogram(samples, cfg);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.frame_times, b.frame_times);
}

TEST(Spectrogram, RejectsShortClipsAndBadConfigs) {
  scf::SpectrogramConfig cfg;
  try {
    scf::spectrogram(std::vector<double>(399, 0.0), cfg);
    FAIL() << "short clip accepted";
  } catch (const scf::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("shorter than one window"),
              std::string::npos);
  }

  cfg = scf::SpectrogramConfig{};
  cfg.transform_size = 256;  // below the 400-sample window
  EXPECT_THROW(cfg.validate(), scf::ConfigError);
  cfg = scf::SpectrogramConfig{};
  cfg.hop_ms = 0.01;
  EXPECT_THROW(cfg.validate(), scf::ConfigError);
  cfg = scf::SpectrogramConfig{};
  cfg.window_ms = 0.01;
  EXPECT_THROW(cfg.validate(), scf::ConfigError);
  cfg = scf::SpectrogramConfig{};
  cfg.sample_rate = 0;
  EXPECT_THROW(cfg.validate(), scf::ConfigError);
}

TEST(Spectrogram, NormalizationNamesRoundTrip) {
  EXPECT_EQ(scf::normalization_from_string("per_bin_zscore"),
            scf::Normalization::per_bin_zscore);
  EXPECT_EQ(scf::normalization_from_string("none"), scf::Normalization::none);
  EXPECT_STREQ(scf::to_string(scf::Normalization::per_bin_zscore),
               "per_bin_zscore");
  EXPECT_THROW(scf::normalization_from_string("log"), scf::ConfigError);
}

TEST(SpectrogramDataset, PackagesFramesAsRecords) {
  scf::SpectrogramConfig cfg;
  cfg.sample_rate = 1000;
  cfg.window_ms = 16;
  cfg.hop_ms = 8;
  cfg.transform_size = 16;
  cfg.normalization = scf::Normalization::none;
  std::vector<double> samples(64, 0.5);
  scf::Spectrogram spec = scf::spectrogram(samples, cfg);
  scf::EmbeddingDataset ds = scf::spectrogram_to_dataset(spec, "clipA");
  EXPECT_EQ(ds.dim_audio, spec.bins);
  EXPECT_EQ(ds.dim_visual, 0u);
  ASSERT_EQ(ds.instances.size(), spec.frames);
  EXPECT_EQ(ds.instances[0].clip_id, "clipA#00000");
  EXPECT_EQ(ds.instances[0].group_id, "clipA");
  for (std::size_t b = 0; b < spec.bins; ++b)
    EXPECT_EQ(ds.instances[0].audio[b], static_cast<float>(spec.at(0, b)));
  // survives the dataset format even with no visual half
  scf::EmbeddingDataset back =
      scf::parse_dataset(scf::serialize_dataset(ds), "mem");
  EXPECT_EQ(back, ds);
}

}  // namespace
