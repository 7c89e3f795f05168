#include "rcpd/audio.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ".";
  rcpd::write_wav(dir + "/speech.wav", rcpd::synth_speech(0));
  rcpd::write_wav(dir + "/noise.wav", rcpd::synth_street_noise(0));
  std::cout << "wrote " << dir << "/speech.wav and " << dir << "/noise.wav\n";
}
