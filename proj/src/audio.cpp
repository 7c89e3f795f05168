#include "rcpd/audio.hpp"

#include "rcpd/datagen.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/linalg.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

namespace rcpd {
namespace {

double mean_power(const std::vector<double>& x, std::int64_t begin, std::int64_t end) {
  if (end <= begin) return 0.0;
  double acc = 0.0;
  for (std::int64_t i = begin; i < end; ++i) acc += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return acc / static_cast<double>(end - begin);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void normalize_rms(std::vector<double>& x, double target) {
  const double rms = std::sqrt(mean_power(x, 0, static_cast<std::int64_t>(x.size())));
  if (rms > 0.0) {
    for (double& v : x) v *= target / rms;
  }
}

// Two-pole resonator at `freq` Hz with bandwidth `bw` Hz, unit gain at DC-free peak.
class Resonator {
 public:
  void tune(double freq, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    a1_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double operator()(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0.0, a2_ = 0.0, gain_ = 1.0;
  double y1_ = 0.0, y2_ = 0.0;
};

struct Vowel {
  double f1, f2, f3;
};

constexpr Vowel kVowels[] = {
    {730, 1090, 2440}, {270, 2290, 3010}, {300, 870, 2240}, {530, 1840, 2480}, {570, 840, 2410},
    {660, 1720, 2410}, {440, 1020, 2240}, {390, 1990, 2550},
};

}  // namespace

void AudioPipelineConfig::validate() const {
  if (!is_power_of_two(stft_window)) throw ValidationError("STFT window must be a power of two");
  if (stft_hop < 1) throw ValidationError("STFT hop must be >= 1");
  if (channels_out < 1 || (stft_window / 2) % channels_out != 0) {
    throw ValidationError("channels_out must divide stft_window / 2");
  }
  if (cov_window < channels_out) throw ValidationError("cov_window must be >= channels_out");
  if (subspace_k < 1 || subspace_k >= channels_out) {
    throw ValidationError("subspace_k must satisfy 1 <= k < channels_out");
  }
  if (!(epsilon_reg > 0.0)) throw ValidationError("epsilon_reg must be positive");
}

MixResult mix_audio(const AudioClip& speech, const AudioClip& noise, double snr_db,
                    std::int64_t offset_samples) {
  if (speech.sample_rate != noise.sample_rate) {
    throw DataError("sample-rate mismatch: speech " + std::to_string(speech.sample_rate) +
                    " Hz vs noise " + std::to_string(noise.sample_rate) + " Hz");
  }
  const auto n_noise = static_cast<std::int64_t>(noise.samples.size());
  const auto n_speech = static_cast<std::int64_t>(speech.samples.size());
  if (offset_samples < 0 || offset_samples >= n_noise) {
    throw ValidationError("speech offset lies outside the noise track");
  }
  MixResult out;
  out.speech_start = offset_samples;
  out.speech_end = std::min(n_noise, offset_samples + n_speech);
  out.mix = noise;

  const double p_speech = mean_power(speech.samples, 0, out.speech_end - out.speech_start);
  const double p_noise = mean_power(noise.samples, out.speech_start, out.speech_end);
  if (p_speech == 0.0) return out;  // silent speech: output is the noise
  if (p_noise == 0.0) throw DataError("noise is silent over the speech segment; SNR undefined");
  out.speech_gain = std::sqrt(p_noise / p_speech * std::pow(10.0, snr_db / 10.0));
  for (std::int64_t i = out.speech_start; i < out.speech_end; ++i) {
    out.mix.samples[static_cast<std::size_t>(i)] +=
        out.speech_gain * speech.samples[static_cast<std::size_t>(i - out.speech_start)];
  }
  return out;
}

MixResult mix_audio(const AudioPipelineConfig& cfg) {
  const AudioClip speech = read_wav(cfg.speech_path);
  const AudioClip noise = read_wav(cfg.noise_path);
  const auto offset = static_cast<std::int64_t>(std::llround(cfg.speech_offset_s * noise.sample_rate));
  return mix_audio(speech, noise, cfg.snr_db, offset);
}

std::vector<Vector> stft_features(const std::vector<double>& samples,
                                  const AudioPipelineConfig& cfg) {
  cfg.validate();
  const int n = cfg.stft_window;
  if (static_cast<int>(samples.size()) < n) {
    throw DataError("audio is shorter than one STFT window (" + std::to_string(samples.size()) +
                    " < " + std::to_string(n) + " samples)");
  }
  const int bins = n / 2;
  const int per_channel = bins / cfg.channels_out;
  std::vector<double> window(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }

  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spectrum;
  const std::size_t n_frames = (samples.size() - static_cast<std::size_t>(n)) / cfg.stft_hop + 1;
  std::vector<Vector> out;
  out.reserve(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = f * static_cast<std::size_t>(cfg.stft_hop);
    for (int i = 0; i < n; ++i) {
      frame[static_cast<std::size_t>(i)] = samples[start + static_cast<std::size_t>(i)] * window[static_cast<std::size_t>(i)];
    }
    fft.fwd(spectrum, frame);
    Vector channels = Vector::Zero(cfg.channels_out);
    for (int b = 1; b <= bins; ++b) {
      const double mag = std::abs(spectrum[static_cast<std::size_t>(b)]);
      channels((b - 1) / per_channel) += cfg.magnitude ? mag : mag * mag;
    }
    out.push_back(channels / per_channel);
  }
  return out;
}

std::vector<Point> sliding_cov(const std::vector<Vector>& features, int window,
                               double epsilon_reg, bool center) {
  if (features.empty()) throw DataError("no feature vectors");
  const Eigen::Index dim = features.front().size();
  if (window < 2) throw ValidationError("covariance window must be >= 2");
  if (static_cast<int>(features.size()) < window) {
    throw DataError("fewer feature vectors than the covariance window");
  }
  std::vector<Point> out;
  out.reserve(features.size() - static_cast<std::size_t>(window) + 1);
  Matrix block(dim, window);
  for (std::size_t end = static_cast<std::size_t>(window); end <= features.size(); ++end) {
    for (int j = 0; j < window; ++j) block.col(j) = features[end - static_cast<std::size_t>(window) + static_cast<std::size_t>(j)];
    if (center) {
      // Shifting by one sample first makes constant windows exactly zero.
      const Vector first = block.col(0);
      block.colwise() -= first;
      block.colwise() -= block.rowwise().mean();
    }
    Matrix cov = linalg::symmetrize(block * block.transpose() / static_cast<double>(window - 1));
    const double reg = epsilon_reg * std::max(cov.trace() / static_cast<double>(dim), 1.0);
    cov.diagonal().array() += reg;
    out.push_back(Point{std::move(cov)});
  }
  return out;
}

std::vector<Point> sliding_subspace(const std::vector<Vector>& features, int window, int k,
                                    bool center) {
  if (features.empty()) throw DataError("no feature vectors");
  const Eigen::Index dim = features.front().size();
  if (k < 1 || k > window || k >= dim) throw ValidationError("need 1 <= k <= window and k < dim");
  if (static_cast<int>(features.size()) < window) {
    throw DataError("fewer feature vectors than the subspace window");
  }
  std::vector<Point> out;
  out.reserve(features.size() - static_cast<std::size_t>(window) + 1);
  Matrix block(dim, window);
  for (std::size_t end = static_cast<std::size_t>(window); end <= features.size(); ++end) {
    for (int j = 0; j < window; ++j) block.col(j) = features[end - static_cast<std::size_t>(window) + static_cast<std::size_t>(j)];
    if (center) block.colwise() -= block.rowwise().mean();
    Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeThinU);
    Matrix u = svd.matrixU().leftCols(k);
    out.push_back(Point{linalg::fix_column_signs(linalg::orthonormalize(u))});
  }
  return out;
}

std::vector<Point> embed_audio(const std::vector<double>& samples, const AudioPipelineConfig& cfg,
                               ManifoldKind mode) {
  const std::vector<Vector> features = stft_features(samples, cfg);
  if (mode == ManifoldKind::spd) return sliding_cov(features, cfg.cov_window, cfg.epsilon_reg, cfg.center);
  return sliding_subspace(features, cfg.cov_window, cfg.subspace_k, cfg.center);
}

AudioClip synth_speech(std::uint64_t seed, double seconds, int sample_rate) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto total = static_cast<std::size_t>(seconds * sample_rate);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(total, 0.0);
  const double fs = sample_rate;
  const double nyquist = 0.5 * fs;

  std::size_t pos = static_cast<std::size_t>(0.02 * fs);
  double phase = 0.0;
  while (pos < total) {
    const auto len = static_cast<std::size_t>((0.12 + 0.16 * u01(rng)) * fs);
    const auto gap = static_cast<std::size_t>((0.04 + 0.08 * u01(rng)) * fs);
    const Vowel& v = kVowels[static_cast<std::size_t>(u01(rng) * std::size(kVowels)) % std::size(kVowels)];
    const Vowel& next = kVowels[static_cast<std::size_t>(u01(rng) * std::size(kVowels)) % std::size(kVowels)];
    const double f0_start = 110.0 + 90.0 * u01(rng);
    const double f0_end = f0_start * (0.8 + 0.3 * u01(rng));
    const double amp = 0.6 + 0.4 * u01(rng);
    Resonator r1, r2, r3;
    const auto burst = static_cast<std::size_t>(0.025 * fs);
    for (std::size_t i = 0; i < len && pos + i < total; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(len);
      const double f0 = f0_start + (f0_end - f0_start) * s;
      phase += 2.0 * std::numbers::pi * f0 * (1.0 + 0.004 * normal(rng)) / fs;
      double source = 0.0;
      for (int h = 1; h * f0 < 0.9 * nyquist && h <= 40; ++h) source += std::sin(h * phase) / h;
      if (i < burst) source += 0.5 * normal(rng);  // onset frication
      r1.tune(v.f1 + (next.f1 - v.f1) * s, 80.0, fs);
      r2.tune(v.f2 + (next.f2 - v.f2) * s, 100.0, fs);
      r3.tune(v.f3 + (next.f3 - v.f3) * s, 140.0, fs);
      const double y = r1(source) + 0.7 * r2(source) + 0.4 * r3(source);
      const double env = std::sin(std::numbers::pi * s);
      clip.samples[pos + i] = amp * env * y;
    }
    pos += len + gap;
  }
  normalize_rms(clip.samples, 0.1);
  return clip;
}

AudioClip synth_street_noise(std::uint64_t seed, double seconds, int sample_rate) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto total = static_cast<std::size_t>(seconds * sample_rate);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(total, 0.0);
  const double fs = sample_rate;

  // Pink noise via Kellet's filter bank, plus a leaky-integrated rumble.
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  double rumble = 0.0;
  const double swell_rate = 0.05 + 0.1 * u01(rng);
  const double swell_phase = 2.0 * std::numbers::pi * u01(rng);
  for (std::size_t i = 0; i < total; ++i) {
    const double w = normal(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    const double pink = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
    rumble = 0.995 * rumble + 0.05 * normal(rng);
    const double t = static_cast<double>(i) / fs;
    const double swell = 1.0 + 0.25 * std::sin(2.0 * std::numbers::pi * swell_rate * t + swell_phase);
    clip.samples[i] = swell * (0.2 * pink + rumble);
  }
  normalize_rms(clip.samples, 0.1);
  return clip;
}

}  // namespace rcpd
