#pragma once

#include "rcpd/manifold.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rcpd {

/// Mono PCM audio, samples in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;
};

/// Reads a RIFF/WAVE file with 16-bit integer or 32-bit float samples.
/// Multi-channel input is downmixed by averaging.
AudioClip read_wav(const std::string& path);
/// Writes 16-bit PCM mono.
void write_wav(const std::string& path, const AudioClip& clip);

struct AudioPipelineConfig {
  std::string speech_path;
  std::string noise_path;
  double snr_db = -3.0;
  double speech_offset_s = 9.0;  ///< where the speech starts inside the noise
  int stft_window = 256;
  int stft_hop = 128;
  int channels_out = 16;
  int cov_window = 32;
  int subspace_k = 1;
  double epsilon_reg = 1e-6;  ///< relative to trace / dim
  bool magnitude = true;      ///< false: power spectrum
  bool center = true;         ///< mean-center windows before cov / SVD

  void validate() const;
};

struct MixResult {
  AudioClip mix;
  std::int64_t speech_start = 0;  ///< sample index of the inserted speech
  std::int64_t speech_end = 0;    ///< one past the last speech sample
  double speech_gain = 0.0;
};

/// Inserts `speech` into `noise` at `offset_samples`, scaled so that the
/// speech-to-noise power ratio over the overlap equals snr_db. The result has
/// the noise length. Silent speech yields the noise unchanged.
MixResult mix_audio(const AudioClip& speech, const AudioClip& noise, double snr_db,
                    std::int64_t offset_samples);
/// Loads both files named in the config and mixes them.
MixResult mix_audio(const AudioPipelineConfig& cfg);

/// Per frame: one-sided FFT magnitude (Hann window, DC dropped, bins
/// 1..window/2), averaged over consecutive groups of window/2/channels_out bins.
std::vector<Vector> stft_features(const std::vector<double>& samples,
                                  const AudioPipelineConfig& cfg);

/// Sample covariance of each run of `window` consecutive feature vectors
/// (hop 1), plus epsilon_reg * max(trace/dim, 1) * I.
std::vector<Point> sliding_cov(const std::vector<Vector>& features, int window,
                               double epsilon_reg, bool center = true);

/// Top-k left singular vectors of each (dim x window) block, sign-normalized
/// so the first nonzero entry of every column is positive.
std::vector<Point> sliding_subspace(const std::vector<Vector>& features, int window, int k,
                                    bool center = true);

/// Frame index whose analysis window contains sample `sample`.
inline std::int64_t frame_of_sample(std::int64_t sample, int hop) { return sample / hop; }

/// Stream index of the first sliding window that ends at `frame`.
inline std::int64_t stream_index_of_frame(std::int64_t frame, int window) {
  return frame - (window - 1);
}

/// STFT features followed by sliding covariances (spd) or subspaces (grassmann).
std::vector<Point> embed_audio(const std::vector<double>& samples, const AudioPipelineConfig& cfg,
                               ManifoldKind mode);

/// Deterministic synthetic stand-ins for a speech recording and a street-noise
/// recording. Speech is a sequence of voiced syllables (harmonic source with
/// jittered pitch through time-varying formant resonators); noise is pink
/// noise with low-frequency rumble and slow traffic swells.
AudioClip synth_speech(std::uint64_t seed, double seconds = 4.0, int sample_rate = 16000);
AudioClip synth_street_noise(std::uint64_t seed, double seconds = 15.0, int sample_rate = 16000);

}  // namespace rcpd
