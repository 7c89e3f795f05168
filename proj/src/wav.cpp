#include "rcpd/audio.hpp"
#include "rcpd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace rcpd {
namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void put16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV file '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) { throw DataError(path + ": " + why); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      if (std::memcmp(chunk, "data", 4) == 0) {
        data = bytes.data() + body;  // tolerate truncated data chunks
        data_size = bytes.size() - body;
        break;
      }
      fail("truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) fail("fmt chunk too short");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == 0xfffe && size >= 40) format = le16(chunk + 32);  // WAVE_FORMAT_EXTENSIBLE
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) fail("missing fmt chunk");
  if (data == nullptr) fail("missing data chunk");
  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) fail("only 16-bit PCM and 32-bit float WAV are supported");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = data_size / (bytes_per_sample * channels);
  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + (f * channels + c) * bytes_per_sample;
      if (pcm16) {
        acc += static_cast<std::int16_t>(le16(s)) / 32768.0;
      } else {
        const std::uint32_t raw = le32(s);
        float v;
        std::memcpy(&v, &raw, sizeof(v));
        acc += v;
      }
    }
    clip.samples[f] = acc / channels;
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  os.write("RIFF", 4);
  put32(os, 36 + 2 * n);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put32(os, 16);
  put16(os, 1);
  put16(os, 1);
  put32(os, static_cast<std::uint32_t>(clip.sample_rate));
  put32(os, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put16(os, 2);
  put16(os, 16);
  os.write("data", 4);
  put32(os, 2 * n);
  for (double s : clip.samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 32767.0 / 32768.0) * 32768.0);
    put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  if (!os) throw DataError("failed writing '" + path + "'");
}

}  // namespace rcpd
