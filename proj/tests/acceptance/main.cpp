// Acceptance run: one PASS/FAIL line per criterion. Optional argument: a
// substring selecting which criteria to run.
#include "checks.hpp"

#include "rcpd/audio.hpp"
#include "rcpd/bench.hpp"
#include "rcpd/centroid.hpp"
#include "rcpd/datagen.hpp"
#include "rcpd/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace rcpd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::vector<std::string> g_csvs;

Outcome geometry_suite() {
  const auto t0 = Clock::now();
  const Spd spd(5);
  const Grassmann gr(6, 2);
  const auto a1 = testing::metric_axioms(spd, 1000, 101);
  const auto a2 = testing::metric_axioms(gr, 1000, 102);
  const auto aff = testing::spd_affine_invariance(5, 1000, 103);
  const auto rep = testing::grassmann_representative_invariance(6, 2, 1000, 104);
  const double secs = seconds_since(t0);
  const bool ok = a1.ok && a2.ok && aff.ok && rep.ok && secs < 30.0;
  std::string detail = fmt("axioms spd/gr worst %.1e/%.1e, affine %.1e, representative %.1e, %.1f s",
                           a1.worst, a2.worst, aff.worst, rep.worst, secs);
  for (const auto* c : {&a1, &a2, &aff, &rep}) {
    if (!c->ok) detail += "; " + c->detail;
  }
  return {ok, detail};
}

Outcome retraction_order() {
  const auto s = testing::retraction_order(Spd(5), 20, 201);
  const auto g = testing::retraction_order(Grassmann(6, 2), 20, 202);
  return {s.ok && g.ok, fmt("min slope spd %.3f, grassmann %.3f (need >= 2.7)", s.worst, g.worst)};
}

Outcome gradient_correctness() {
  const auto fs = testing::gradient_fd(Spd(5), 50, 301);
  const auto fg = testing::gradient_fd(Grassmann(6, 2), 50, 302);
  const auto hs = testing::huber_branches(Spd(5), 303);
  const auto hg = testing::huber_branches(Grassmann(6, 2), 304);
  const bool ok = fs.ok && fg.ok && hs.ok && hg.ok;
  std::string detail = fmt("fd rel err spd %.1e, grassmann %.1e; huber branches worst %.1e/%.1e",
                           fs.worst, fg.worst, hs.worst, hg.worst);
  for (const auto* c : {&fs, &fg, &hs, &hg}) {
    if (!c->ok) detail += "; " + c->detail;
  }
  return {ok, detail};
}

Outcome degeneracy() {
  const auto s = testing::karcher_degeneracy(Spd(5), 1000, 0.05, 401);
  const auto g = testing::karcher_degeneracy(Grassmann(6, 2), 1000, 0.05, 402);
  return {s.ok && g.ok, fmt("max entry difference over 1000 steps: spd %.1e, grassmann %.1e", s.worst,
                            g.worst)};
}

Outcome oracle_equivalence() {
  Rng rng(501);
  const Spd ops(10);
  const Matrix v = random_wishart_scale(10, rng);
  std::vector<Point> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(Point{sample_wishart(rng, v, 12) / 12.0});
  const Point oracle = batch_frechet_mean(ops, kInfinity, samples);
  Point m = samples.front();
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < 200; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) m = sgd_step(ops, {kInfinity, 0.05}, m, samples[i]);
  }
  const double d = ops.distance(m, oracle);
  const double variance = 2.0 * robust_cost(ops, kInfinity, oracle, samples);
  const double spread = std::sqrt(0.05 / (2.0 - 0.05) * variance);
  return {d <= 0.05, fmt("distance to batch oracle %.4f (need <= 0.05); Karcher variance of the "
                         "samples %.2f puts the constant-step noise floor near %.2f",
                         d, variance, spread)};
}

bool csv_monotone(const std::string& path, std::string& why) {
  std::ifstream is(path);
  for (const Curve& c : read_bench_csv(is)) {
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      if (c.points[i].arl < c.points[i - 1].arl || c.points[i].mdd < c.points[i - 1].mdd) {
        why = path + ": " + c.method + " at xi=" + std::to_string(c.points[i].threshold);
        return false;
      }
    }
  }
  return true;
}

Outcome figure1(ManifoldKind kind) {
  const auto t0 = Clock::now();
  BenchConfig cfg;
  ManifoldPtr ops;
  HuberConfig huber;
  if (kind == ManifoldKind::spd) {
    cfg.stream = spd_stream_spec(10, 2000, 1500, 1);
    ops = std::make_shared<Spd>(10);
    huber = {1.0, 0.05};
  } else {
    cfg.stream = grassmann_stream_spec(20, 5, 2000, 1500, 1);
    ops = std::make_shared<Grassmann>(20, 5);
    huber = {0.05, 0.05};
  }
  cfg.n_runs = 200;
  cfg.seed = 1;
  std::vector<Method> methods{proposed_method(huber)};
  for (Method& m : default_baseline_methods()) methods.push_back(std::move(m));
  const std::vector<Curve> curves = run_comparison(*ops, methods, cfg);
  const std::string path = "acceptance_" + to_string(kind) + ".csv";
  {
    std::ofstream os(path);
    write_bench_csv(os, curves);
  }
  g_csvs.push_back(path);
  const DominanceReport r =
      compare_curves(curves.front(), std::vector<Curve>(curves.begin() + 1, curves.end()));
  const double secs = seconds_since(t0);
  const bool ok = r.dominated_levels >= 3 && secs < 600.0;
  return {ok, fmt("proposed MDD <= best baseline at %d of %d matched ARL levels (need >= 3), "
                  "%.0f s, curves in %s",
                  r.dominated_levels, r.matched_levels, secs, path.c_str())};
}

Outcome pre_post_separation() {
  const Spd ops(10);
  int separated = 0;
  const int runs = 200;
  for (int i = 0; i < runs; ++i) {
    const StreamSpec spec = spd_stream_spec(10, 1600, 1500, run_seed(0x5eb, i));
    const auto g = statistic_trajectory(ops, proposed_trackers({1.0, 0.05}), gen_stream(spec));
    double pre = 0.0, post = 0.0;
    for (int t = 1400; t < 1500; ++t) pre += g[t] / 100.0;
    for (int t = 1500; t < 1600; ++t) post = std::max(post, g[t]);
    separated += pre < post;
  }
  return {separated >= 190, fmt("%d of %d runs (need >= 95%%)", separated, runs)};
}

Outcome audio_fixture() {
  const AudioClip speech = read_wav(std::string(RCPD_FIXTURE_DIR) + "/speech.wav");
  const AudioClip noise = read_wav(std::string(RCPD_FIXTURE_DIR) + "/noise.wav");
  AudioPipelineConfig cfg;
  const Spd ops(cfg.channels_out);
  const TrackerPair trackers = proposed_trackers({1.0, 0.03});
  const std::int64_t warmup = 500;
  const double xi = max_statistic(ops, trackers, embed_audio(noise.samples, cfg, ManifoldKind::spd),
                                  warmup + 1);
  int hits = 0;
  const int seeds = 50;
  std::ostringstream misses;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(run_seed(0xa0d10, s));
    std::uniform_real_distribution<double> offset_s(6.0, 10.0);
    const auto offset = static_cast<std::int64_t>(offset_s(rng) * noise.sample_rate);
    const MixResult mix = mix_audio(speech, noise, -3.0, offset);
    const auto g = statistic_trajectory(ops, trackers, embed_audio(mix.mix.samples, cfg, ManifoldKind::spd));
    const std::int64_t insertion = stream_index_of_frame(frame_of_sample(offset, cfg.stft_hop), cfg.cov_window);
    std::int64_t first = -1;
    for (std::size_t t = warmup + 1; t < g.size(); ++t) {
      if (g[t] > xi) {
        first = static_cast<std::int64_t>(t);
        break;
      }
    }
    if (first >= insertion && first <= insertion + 64) {
      ++hits;
    } else {
      misses << ' ' << s << ':' << (first < 0 ? std::string("none") : std::to_string(first - insertion));
    }
  }
  std::string detail = fmt("%d of %d seeds flagged within 64 frames (need >= 80%%), xi %.3f", hits,
                           seeds, xi);
  if (hits < seeds) detail += "; misses (seed:delay)" + misses.str();
  return {hits * 5 >= seeds * 4, detail};
}

Outcome benchmark_monotonicity() {
  if (g_csvs.empty()) return {false, "no benchmark CSV was produced in this run"};
  for (const std::string& path : g_csvs) {
    std::string why;
    if (!csv_monotone(path, why)) return {false, "violation in " + why};
  }
  return {true, fmt("ARL and MDD non-decreasing in xi in %zu CSV files", g_csvs.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry-suite", geometry_suite},
      {"retraction-order", retraction_order},
      {"gradient-correctness", gradient_correctness},
      {"degeneracy", degeneracy},
      {"oracle-equivalence", oracle_equivalence},
      {"fig1-spd", [] { return figure1(ManifoldKind::spd); }},
      {"fig1-grassmann", [] { return figure1(ManifoldKind::grassmann); }},
      {"pre-post-separation", pre_post_separation},
      {"audio-fixture", audio_fixture},
      {"benchmark-monotonicity", benchmark_monotonicity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && name.find(only) == std::string::npos) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
