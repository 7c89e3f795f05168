#include "cli.hpp"

#include "rcpd/audio.hpp"
#include "rcpd/bench.hpp"
#include "rcpd/stream_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rcpd;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rcpd_cli_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("cli") {
TEST_CASE("simulate writes stream and truth, deterministically") {
  const std::string a = tmp("s1.txt"), b = tmp("s2.txt");
  auto r = run({"simulate", "--manifold", "spd", "--p", "10", "--T", "2000", "--t-r", "1500", "--seed", "7", "-o", a});
  REQUIRE(r.code == 0);
  CHECK(read_matrix_stream_file(a).points.size() == 2000);
  CHECK(slurp(a + ".truth") == "t_r=1500\n");
  REQUIRE(run({"simulate", "--p", "10", "--t-r", "1500", "--seed", "7", "-o", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("simulate rejects bad input") {
  CHECK(run({"simulate", "--t-r", "0", "-o", tmp("x.txt")}).code == 1);
  CHECK(run({"simulate", "--manifold", "grassmann", "--p", "4", "--k", "4", "-o", tmp("x.txt")}).code == 1);
  CHECK(run({"simulate", "--manifold", "torus", "-o", tmp("x.txt")}).code == 1);
  CHECK(run({"simulate", "-o", "/nonexistent/dir/x.txt"}).code == 2);
  CHECK(run({}).code == 1);
}

TEST_CASE("detect writes a trace and reports flags") {
  const std::string s = tmp("d.txt"), trace = tmp("d.csv");
  REQUIRE(run({"simulate", "--p", "5", "--T", "800", "--t-r", "600", "--seed", "3", "-o", s}).code == 0);
  auto r = run({"detect", s, "--xi", "0.5", "--warmup", "300", "-o", trace});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("flags:") != std::string::npos);
  CHECK(r.out.find("t_r=600") != std::string::npos);
  const std::string csv = slurp(trace);
  CHECK(csv.rfind("t,g,flagged\n0,0,0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 801);
}

TEST_CASE("detect on a constant stream never flags") {
  const std::string s = tmp("const.txt");
  std::vector<Point> pts(100, Point{Matrix::Identity(3, 3)});
  write_matrix_stream_file(s, {ManifoldKind::spd, 3, 3, 100}, pts);
  auto r = run({"detect", s, "--xi", "1e-12"});
  CHECK(r.code == 0);
  CHECK(r.out.find("flags: none") != std::string::npos);
}

TEST_CASE("detect errors") {
  const std::string s = tmp("bad.txt");
  std::ofstream(s) << "# manifold=spd p=2 k=2 T=2\n1 0 0 1\n1 0 zz 1\n";
  auto r = run({"detect", s, "--xi", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  const std::string good = tmp("good.txt");
  REQUIRE(run({"simulate", "--p", "3", "--T", "50", "--t-r", "25", "-o", good}).code == 0);
  r = run({"detect", good, "--xi", "1", "--a-param", "inf"});
  CHECK(r.code == 1);
  CHECK(r.err.find("identically zero") != std::string::npos);
  CHECK(run({"detect", good, "--xi", "1", "--a-param", "abc"}).code == 1);
  CHECK(run({"detect", good}).code == 1);
  CHECK(run({"detect", tmp("nope.txt"), "--xi", "1"}).code == 2);
}

TEST_CASE("config file with flag override") {
  const std::string s = tmp("c.txt"), cfg = tmp("c.cfg");
  std::ofstream(cfg) << "# defaults\np = 4\nT = 60\nt-r=30\nseed = 5\n";
  REQUIRE(run({"simulate", "--config", cfg, "--T", "80", "-o", s}).code == 0);
  const MatrixStream m = read_matrix_stream_file(s);
  CHECK(m.header.p == 4);
  CHECK(m.points.size() == 80);
  std::ofstream(cfg) << "bogus-key = 1\n";
  CHECK(run({"simulate", "--config", cfg, "-o", s}).code == 1);
  CHECK(run({"simulate", "--config", tmp("missing.cfg"), "-o", s}).code == 2);
}

TEST_CASE("benchmark writes csv, metadata and summary") {
  const std::string a = tmp("b1.csv"), b = tmp("b2.csv");
  const std::vector<std::string> common{"benchmark", "--p", "3", "--T", "300", "--t-r", "200",
                                        "--warmup", "50", "--runs", "3", "--points", "5", "--seed", "2"};
  auto args = common;
  args.insert(args.end(), {"-o", a});
  auto r = run(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("proposed") != std::string::npos);
  std::ifstream is(a);
  const auto curves = read_bench_csv(is);
  CHECK(curves.size() == 4);
  CHECK(curves[0].points.size() == 5);
  CHECK(fs::exists(a + ".meta.json"));
  args = common;
  args.insert(args.end(), {"-o", b});
  REQUIRE(run(args).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run({"benchmark", "--runs", "0", "-o", a}).code == 1);
}

TEST_CASE("audio on the bundled fixture") {
  const std::string s = tmp("a.txt"), trace = tmp("a.csv");
  auto r = run({"audio", "--fixture", "--mode", "spd", "--snr", "-3", "-o", s, "--trace", trace});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("stream index 1094") != std::string::npos);
  CHECK(read_matrix_stream_file(s).header.p == 16);
  r = run({"audio", "--fixture", "--mode", "grassmann", "--k", "1", "-o", s});
  REQUIRE(r.code == 0);
  const MatrixStream g = read_matrix_stream_file(s);
  CHECK(g.header.manifold == ManifoldKind::grassmann);
  CHECK(g.header.k == 1);
}

TEST_CASE("audio with silent speech raises no flags at the calibrated threshold") {
  AudioClip silence;
  silence.samples.assign(4 * 16000, 0.0);
  const std::string path = tmp("silence.wav");
  write_wav(path, silence);
  auto r = run({"audio", "--speech", path, "--noise", std::string(RCPD_FIXTURE_DIR) + "/noise.wav"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("flags: none") != std::string::npos);
}

TEST_CASE("audio errors carry the path") {
  auto r = run({"audio", "--speech", tmp("none.wav"), "--noise", tmp("none2.wav")});
  CHECK(r.code == 2);
  CHECK(r.err.find("none.wav") != std::string::npos);
  CHECK(run({"audio"}).code == 1);
}
}
