#include "checks.hpp"

#include "rcpd/audio.hpp"
#include "rcpd/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace rcpd;

namespace {

double power(const std::vector<double>& x, std::int64_t b, std::int64_t e) {
  double acc = 0.0;
  for (std::int64_t i = b; i < e; ++i) acc += x[i] * x[i];
  return acc / static_cast<double>(e - b);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("rcpd_test_" + name)).string();
}

}  // namespace

TEST_SUITE("audio") {
TEST_CASE("config validation") {
  AudioPipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.stft_window = 200;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.channels_out = 15;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.cov_window = 8;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("mix hits the requested snr") {
  const AudioClip speech = synth_speech(1), noise = synth_street_noise(2);
  const MixResult m = mix_audio(speech, noise, -3.0, 9 * 16000);
  CHECK(m.mix.samples.size() == noise.samples.size());
  std::vector<double> diff(m.mix.samples.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = m.mix.samples[i] - noise.samples[i];
  const double snr = 10 * std::log10(power(diff, m.speech_start, m.speech_end) /
                                     power(noise.samples, m.speech_start, m.speech_end));
  CHECK(std::abs(snr + 3.0) < 0.1);
}

TEST_CASE("mix edge cases") {
  AudioClip speech, noise;
  noise.samples = {0.5, -0.5, 0.5, -0.5, 0.5, -0.5};
  speech.samples = {0.0, 0.0};
  CHECK(mix_audio(speech, noise, -3.0, 2).mix.samples == noise.samples);
  speech.samples = {0.5, -0.5};
  CHECK(mix_audio(speech, noise, 0.0, 2).speech_gain == doctest::Approx(1.0).epsilon(1e-6));
  speech.sample_rate = 8000;
  CHECK_THROWS_AS(mix_audio(speech, noise, 0.0, 2), DataError);
}

TEST_CASE("wav round trip and errors") {
  AudioClip c;
  for (int i = 0; i < 1000; ++i) c.samples.push_back(0.5 * std::sin(0.01 * i));
  const std::string path = temp_path("rt.wav");
  write_wav(path, c);
  const AudioClip back = read_wav(path);
  CHECK(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) CHECK(std::abs(back.samples[i] - c.samples[i]) < 1e-4);
  CHECK_THROWS_WITH_AS(read_wav(temp_path("missing.wav")), doctest::Contains("missing.wav"), DataError);
  std::ofstream(temp_path("junk.wav")) << "not audio";
  CHECK_THROWS_AS(read_wav(temp_path("junk.wav")), DataError);
}

TEST_CASE("stft concentrates a bin-centre tone in one channel") {
  AudioPipelineConfig cfg;
  std::vector<double> tone(4096);
  for (std::size_t i = 0; i < tone.size(); ++i) tone[i] = std::sin(2 * std::numbers::pi * 20.0 * i / 256.0);
  const auto f = stft_features(tone, cfg);
  CHECK(f.size() == (4096 - 256) / 128 + 1);
  for (const Vector& v : f) {
    REQUIRE(v.size() == 16);
    CHECK(v(2) / v.sum() > 0.9);
  }
  for (const Vector& v : stft_features(std::vector<double>(1024, 0.0), cfg)) CHECK(v.isZero(0.0));
  CHECK_THROWS_AS(stft_features(std::vector<double>(100, 0.0), cfg), DataError);
}

TEST_CASE("sliding covariance") {
  const std::vector<Vector> constant(40, Vector::Constant(16, 0.3));
  const auto c = sliding_cov(constant, 32, 1e-6);
  CHECK(c.size() == 9);
  CHECK(c[0].data == 1e-6 * Matrix::Identity(16, 16));

  testing::Rng rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vector> iid;
  for (int i = 0; i < 5000; ++i) {
    Vector v(4);
    for (int j = 0; j < 4; ++j) v(j) = n(rng);
    iid.push_back(v);
  }
  const Spd ops(4);
  Matrix avg = Matrix::Zero(4, 4);
  const auto covs = sliding_cov(iid, 32, 1e-6);
  for (const Point& p : covs) {
    REQUIRE(ops.is_valid(p));
    avg += p.data / static_cast<double>(covs.size());
  }
  CHECK((avg - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.3);
}

TEST_CASE("sliding subspace recovers a rank-one signal") {
  Vector u = Vector::LinSpaced(16, 1.0, 2.0).normalized();
  std::vector<Vector> f;
  for (int i = 0; i < 40; ++i) f.push_back(std::sin(0.7 * i) * u);
  const auto s = sliding_subspace(f, 32, 1);
  const Grassmann ops(16, 1);
  for (const Point& p : s) {
    CHECK(ops.distance(p, Point{u}) < 1e-8);
    CHECK(p.data(0, 0) > 0);
  }
  std::vector<Vector> neg;
  for (const Vector& v : f) neg.push_back(-v);
  CHECK(sliding_subspace(neg, 32, 1)[0].data == s[0].data);
}

TEST_CASE("embedding of the synthetic pair") {
  AudioPipelineConfig cfg;
  const MixResult m = mix_audio(synth_speech(0), synth_street_noise(0), -3.0, 9 * 16000);
  const auto spd = embed_audio(m.mix.samples, cfg, ManifoldKind::spd);
  const Spd sops(16);
  for (const Point& p : spd) REQUIRE(sops.is_valid(p));
  const auto gr = embed_audio(m.mix.samples, cfg, ManifoldKind::grassmann);
  CHECK(gr.size() == spd.size());
  CHECK(frame_of_sample(m.speech_start, cfg.stft_hop) == 1125);
}
}
