#include "cli.hpp"

#include "rcpd/audio.hpp"
#include "rcpd/bench.hpp"
#include "rcpd/datagen.hpp"
#include "rcpd/detector.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/grassmann.hpp"
#include "rcpd/spd.hpp"
#include "rcpd/stream_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rcpd::cli {
namespace {

const std::map<std::string, ManifoldKind> kManifolds{{"spd", ManifoldKind::spd},
                                                     {"grassmann", ManifoldKind::grassmann}};
const std::map<std::string, PostAlarmPolicy> kPolicies{{"reset", PostAlarmPolicy::reset},
                                                       {"halt", PostAlarmPolicy::halt}};

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_a_param(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ValidationError("--a-param expects a positive number or 'inf', got '" + text + "'");
  }
  return v;
}

double default_a(ManifoldKind kind) { return kind == ManifoldKind::spd ? 1.0 : 0.05; }

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "t,g,flagged\n";
  for (const TraceRecord& r : trace) os << r.t << ',' << shortest(r.g) << ',' << (r.flagged ? 1 : 0) << '\n';
  if (!os) throw DataError("failed writing '" + path + "'");
}

std::vector<std::int64_t> flagged_times(const std::vector<TraceRecord>& trace) {
  std::vector<std::int64_t> out;
  for (const TraceRecord& r : trace) {
    if (r.flagged) out.push_back(r.t);
  }
  return out;
}

void print_flags(std::ostream& out, const std::vector<std::int64_t>& flags) {
  out << "flags:";
  if (flags.empty()) out << " none";
  for (std::int64_t t : flags) out << ' ' << t;
  out << '\n';
}

void print_first_after(std::ostream& out, const std::vector<std::int64_t>& flags,
                       std::int64_t from, const std::string& label) {
  auto it = std::lower_bound(flags.begin(), flags.end(), from);
  if (it == flags.end()) {
    out << "no flag at or after " << label << '=' << from << '\n';
  } else {
    out << "first flag at or after " << label << '=' << from << ": " << *it << " (delay "
        << *it - from << ")\n";
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string manifold = "spd";
  long p = 0;
  long k = 5;
  std::int64_t length = 2000;
  std::int64_t change_at = 1500;
  bool no_change = false;
  double signal = 20.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const ManifoldKind kind = kManifolds.at(a.manifold);
  const long p = a.p > 0 ? a.p : (kind == ManifoldKind::spd ? 10 : 20);
  std::optional<std::int64_t> change;
  if (!a.no_change) change = a.change_at;
  StreamSpec spec = kind == ManifoldKind::spd
                        ? spd_stream_spec(p, a.length, change, a.seed)
                        : grassmann_stream_spec(p, a.k, a.length, change, a.seed, a.signal);
  spec.validate();
  const std::vector<Point> points = gen_stream(spec);
  const StreamHeader header{kind, p, kind == ManifoldKind::spd ? p : a.k,
                            static_cast<std::int64_t>(points.size())};
  write_matrix_stream_file(a.out, header, points);
  out << "wrote " << points.size() << " records to " << a.out << '\n';
  if (change) {
    write_truth_file(a.out + ".truth", *change);
    out << "wrote t_r=" << *change << " to " << a.out << ".truth\n";
  }
  return kOk;
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
  std::string input;
  std::string trace;
  double alpha = 0.05;
  std::string a_param;
  double xi = 0.0;
  std::int64_t warmup = 0;
  std::string policy = "reset";
  int dead_time = 50;
  bool baseline = false;
  double step_fast = 0.1;
  double step_slow = 0.01;
  std::uint64_t seed = 1;
};

int cmd_detect(const DetectArgs& a, std::ostream& out) {
  const MatrixStream stream = read_matrix_stream_file(a.input);
  if (stream.points.empty()) throw DataError(a.input + ": stream has no records");
  const ManifoldPtr ops = make_manifold(stream.header);
  std::vector<TraceRecord> trace;
  if (a.baseline) {
    BaselineConfig cfg;
    cfg.step_fast = a.step_fast;
    cfg.step_slow = a.step_slow;
    cfg.threshold = a.xi;
    cfg.policy = kPolicies.at(a.policy);
    cfg.dead_time = a.dead_time;
    cfg.warmup = a.warmup;
    trace = run_baseline(*ops, cfg, stream.points);
  } else {
    DetectorConfig cfg;
    cfg.huber = {a.a_param.empty() ? default_a(stream.header.manifold) : parse_a_param(a.a_param),
                 a.alpha};
    cfg.threshold = a.xi;
    cfg.policy = kPolicies.at(a.policy);
    cfg.dead_time = a.dead_time;
    cfg.warmup = a.warmup;
    trace = run_detector(*ops, cfg, stream.points);
  }
  if (!a.trace.empty()) write_trace_csv(a.trace, trace);
  const std::vector<std::int64_t> flags = flagged_times(trace);
  print_flags(out, flags);
  if (auto truth = read_truth_file(a.input + ".truth")) print_first_after(out, flags, *truth, "t_r");
  return kOk;
}

// --------------------------------------------------------------- benchmark

struct BenchArgs {
  std::string manifold = "spd";
  long p = 0;
  long k = 5;
  std::int64_t length = 2000;
  std::int64_t change_at = 1500;
  double signal = 20.0;
  int runs = 200;
  std::uint64_t seed = 1;
  std::int64_t warmup = 500;
  int workers = 0;
  int points = 25;
  double alpha = 0.05;
  std::string a_param;
  std::string out;
};

void print_summary(std::ostream& out, const std::vector<Curve>& curves) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-22s %6s %22s %20s\n", "method", "points", "ARL range",
                "MDD range");
  out << line;
  for (const Curve& c : curves) {
    double arl_lo = std::numeric_limits<double>::infinity(), arl_hi = -arl_lo;
    double mdd_lo = arl_lo, mdd_hi = -arl_lo;
    for (const OperatingPoint& op : c.points) {
      arl_lo = std::min(arl_lo, op.arl);
      arl_hi = std::max(arl_hi, op.arl);
      mdd_lo = std::min(mdd_lo, op.mdd);
      mdd_hi = std::max(mdd_hi, op.mdd);
    }
    std::snprintf(line, sizeof(line), "%-22s %6zu %10.1f - %-9.1f %9.2f - %-8.2f\n",
                  c.method.c_str(), c.points.size(), arl_lo, arl_hi, mdd_lo, mdd_hi);
    out << line;
  }
}

int cmd_benchmark(const BenchArgs& a, std::ostream& out) {
  const ManifoldKind kind = kManifolds.at(a.manifold);
  const long p = a.p > 0 ? a.p : (kind == ManifoldKind::spd ? 10 : 20);
  BenchConfig cfg;
  cfg.stream = kind == ManifoldKind::spd
                   ? spd_stream_spec(p, a.length, a.change_at, a.seed)
                   : grassmann_stream_spec(p, a.k, a.length, a.change_at, a.seed, a.signal);
  cfg.n_runs = a.runs;
  cfg.seed = a.seed;
  cfg.warmup = a.warmup;
  cfg.workers = a.workers;
  const double a_value = a.a_param.empty() ? default_a(kind) : parse_a_param(a.a_param);
  DetectorConfig probe;
  probe.huber = {a_value, a.alpha};
  probe.validate();

  ManifoldPtr ops;
  if (kind == ManifoldKind::spd) {
    ops = std::make_shared<Spd>(p);
  } else {
    ops = std::make_shared<Grassmann>(p, a.k);
  }
  std::vector<Method> methods{proposed_method(probe.huber)};
  for (Method& m : default_baseline_methods()) methods.push_back(std::move(m));

  std::vector<std::vector<double>> grids(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i) {
    grids[i] = auto_threshold_grid(*ops, methods[i], cfg, a.points);
  }
  const std::vector<Curve> curves = run_comparison(*ops, methods, cfg, grids);

  std::ofstream os(a.out);
  if (!os) throw DataError("cannot open '" + a.out + "' for writing");
  write_bench_csv(os, curves);
  os.close();
  if (!os) throw DataError("failed writing '" + a.out + "'");

  const std::vector<Curve> baselines(curves.begin() + 1, curves.end());
  const DominanceReport report = compare_curves(curves.front(), baselines);

  nlohmann::json meta;
  meta["manifold"] = a.manifold;
  meta["p"] = p;
  meta["k"] = kind == ManifoldKind::spd ? p : a.k;
  meta["T"] = a.length;
  meta["t_r"] = a.change_at;
  meta["runs"] = a.runs;
  meta["seed"] = a.seed;
  meta["warmup"] = a.warmup;
  meta["alpha"] = a.alpha;
  meta["A"] = a_value;
  if (kind == ManifoldKind::grassmann) meta["signal"] = a.signal;
  meta["methods"] = nlohmann::json::array();
  for (const Method& m : methods) meta["methods"].push_back(m.label);
  meta["dominance"] = {{"matched_levels", report.matched_levels},
                       {"dominated_levels", report.dominated_levels}};
  std::ofstream ms(a.out + ".meta.json");
  if (!ms) throw DataError("cannot open '" + a.out + ".meta.json' for writing");
  ms << meta.dump(2) << '\n';

  print_summary(out, curves);
  out << "proposed vs best baseline: " << report.dominated_levels << " of "
      << report.matched_levels << " matched ARL levels with MDD <= baseline\n";
  out << "wrote " << a.out << " and " << a.out << ".meta.json\n";
  return kOk;
}

// ------------------------------------------------------------------- audio

struct AudioArgs {
  bool fixture = false;
  std::string fixture_dir = RCPD_FIXTURE_DIR;
  std::string speech;
  std::string noise;
  std::string mode = "spd";
  int k = 1;
  double snr = -3.0;
  double offset = 9.0;
  double alpha = 0.03;
  std::string a_param;
  std::int64_t warmup = 500;
  std::optional<double> xi;
  std::string policy = "reset";
  int dead_time = 50;
  std::string out;
  std::string trace;
  std::uint64_t seed = 1;
};

int cmd_audio(const AudioArgs& a, std::ostream& out) {
  AudioPipelineConfig cfg;
  if (a.fixture) {
    cfg.speech_path = a.fixture_dir + "/speech.wav";
    cfg.noise_path = a.fixture_dir + "/noise.wav";
  }
  if (!a.speech.empty()) cfg.speech_path = a.speech;
  if (!a.noise.empty()) cfg.noise_path = a.noise;
  if (cfg.speech_path.empty() || cfg.noise_path.empty()) {
    throw ValidationError("give --speech and --noise, or --fixture");
  }
  cfg.snr_db = a.snr;
  cfg.speech_offset_s = a.offset;
  cfg.subspace_k = a.k;
  cfg.validate();
  const ManifoldKind kind = kManifolds.at(a.mode);

  const AudioClip speech = read_wav(cfg.speech_path);
  const AudioClip noise = read_wav(cfg.noise_path);
  const auto offset = static_cast<std::int64_t>(std::llround(a.offset * noise.sample_rate));
  const MixResult mix = mix_audio(speech, noise, cfg.snr_db, offset);
  const std::vector<Point> stream = embed_audio(mix.mix.samples, cfg, kind);

  ManifoldPtr ops;
  const long dim = cfg.channels_out;
  if (kind == ManifoldKind::spd) {
    ops = std::make_shared<Spd>(dim);
  } else {
    ops = std::make_shared<Grassmann>(dim, a.k);
  }
  DetectorConfig det;
  det.huber = {a.a_param.empty() ? default_a(kind) : parse_a_param(a.a_param), a.alpha};
  det.policy = kPolicies.at(a.policy);
  det.dead_time = a.dead_time;
  det.warmup = a.warmup;
  det.threshold = 1.0;
  det.validate();
  if (a.warmup + 1 >= static_cast<std::int64_t>(stream.size())) {
    throw ValidationError("--warmup leaves no samples to monitor (stream has " +
                          std::to_string(stream.size()) + ")");
  }
  if (a.xi) {
    det.threshold = *a.xi;
  } else {
    const std::vector<Point> null_stream = embed_audio(noise.samples, cfg, kind);
    det.threshold = max_statistic(*ops, proposed_trackers(det.huber), null_stream, a.warmup + 1);
  }
  const std::vector<TraceRecord> trace = run_detector(*ops, det, stream);

  if (!a.out.empty()) {
    const StreamHeader header{kind, dim, kind == ManifoldKind::spd ? dim : a.k,
                              static_cast<std::int64_t>(stream.size())};
    write_matrix_stream_file(a.out, header, stream);
  }
  if (!a.trace.empty()) write_trace_csv(a.trace, trace);

  const std::int64_t frame = frame_of_sample(mix.speech_start, cfg.stft_hop);
  const std::int64_t index = stream_index_of_frame(frame, cfg.cov_window);
  out << "speech inserted at sample " << mix.speech_start << " (frame " << frame
      << ", stream index " << index << "), gain " << shortest(mix.speech_gain) << '\n';
  out << "xi = " << shortest(det.threshold) << (a.xi ? "" : " (max g on the noise-only stream)")
      << '\n';
  const std::vector<std::int64_t> flags = flagged_times(trace);
  print_flags(out, flags);
  print_first_after(out, flags, index, "insertion index");
  return kOk;
}

// ------------------------------------------------------------------ wiring

template <class T>
void add_policy_options(CLI::App* sub, T& args) {
  sub->add_option("--policy", args.policy, "post-alarm policy")
      ->check(CLI::IsMember({"reset", "halt"}))
      ->capture_default_str();
  sub->add_option("--dead-time", args.dead_time, "samples without flags after a reset")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

std::vector<std::string> strip_config(const std::vector<std::string>& args, std::string& path) {
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file argument");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  return rest;
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DataError(path + ": line " + std::to_string(line_no) + ": empty key");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust Riemannian change-point detection", "rcpd"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");
  app.footer("Any command accepts --config FILE with key=value lines; flags override it.");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic stream");
  simulate->add_option("--manifold", sim.manifold)->check(CLI::IsMember({"spd", "grassmann"}))->capture_default_str();
  simulate->add_option("--p", sim.p, "dimension (default 10 for spd, 20 for grassmann)")->check(CLI::PositiveNumber);
  simulate->add_option("--k", sim.k, "subspace dimension")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--T", sim.length, "stream length")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--t-r", sim.change_at, "change point")->capture_default_str();
  simulate->add_flag("--no-change", sim.no_change, "draw a change-free stream");
  simulate->add_option("--signal", sim.signal, "grassmann mean scale")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("-o,--output", sim.out, "stream file")->required();

  DetectArgs det;
  CLI::App* detect = app.add_subcommand("detect", "run the detector over a stream file");
  detect->add_option("input", det.input, "stream file")->required();
  detect->add_option("-o,--trace", det.trace, "write t,g,flagged CSV");
  detect->add_option("--alpha", det.alpha, "step size")->capture_default_str();
  detect->add_option("--a-param", det.a_param, "Huber threshold A (default 1 spd, 0.05 grassmann)");
  detect->add_option("--xi", det.xi, "alarm threshold")->required();
  detect->add_option("--warmup", det.warmup, "no flags while t <= warmup")->check(CLI::NonNegativeNumber)->capture_default_str();
  add_policy_options(detect, det);
  detect->add_flag("--baseline", det.baseline, "two Karcher trackers instead");
  detect->add_option("--step-fast", det.step_fast)->capture_default_str();
  detect->add_option("--step-slow", det.step_slow)->capture_default_str();
  detect->add_option("--seed", det.seed, "accepted for uniformity; detection is deterministic");

  BenchArgs bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Monte Carlo ARL / MDD comparison");
  benchmark->add_option("--manifold", bench.manifold)->check(CLI::IsMember({"spd", "grassmann"}))->capture_default_str();
  benchmark->add_option("--p", bench.p)->check(CLI::PositiveNumber);
  benchmark->add_option("--k", bench.k)->check(CLI::PositiveNumber)->capture_default_str();
  benchmark->add_option("--T", bench.length)->check(CLI::PositiveNumber)->capture_default_str();
  benchmark->add_option("--t-r", bench.change_at)->capture_default_str();
  benchmark->add_option("--signal", bench.signal)->check(CLI::PositiveNumber)->capture_default_str();
  benchmark->add_option("--runs", bench.runs, "Monte Carlo runs per family")->check(CLI::PositiveNumber)->capture_default_str();
  benchmark->add_option("--seed", bench.seed)->capture_default_str();
  benchmark->add_option("--warmup", bench.warmup)->check(CLI::NonNegativeNumber)->capture_default_str();
  benchmark->add_option("--workers", bench.workers, "0 = all cores")->check(CLI::NonNegativeNumber)->capture_default_str();
  benchmark->add_option("--points", bench.points, "thresholds per curve")->check(CLI::Range(2, 1000))->capture_default_str();
  benchmark->add_option("--alpha", bench.alpha)->capture_default_str();
  benchmark->add_option("--a-param", bench.a_param);
  benchmark->add_option("-o,--output", bench.out, "CSV path")->required();

  AudioArgs aud;
  CLI::App* audio = app.add_subcommand("audio", "speech-in-noise detection from WAV files");
  audio->add_flag("--fixture", aud.fixture, "use the bundled synthetic speech/noise pair");
  audio->add_option("--fixture-dir", aud.fixture_dir)->capture_default_str();
  audio->add_option("--speech", aud.speech, "speech WAV");
  audio->add_option("--noise", aud.noise, "noise WAV");
  audio->add_option("--mode", aud.mode)->check(CLI::IsMember({"spd", "grassmann"}))->capture_default_str();
  audio->add_option("--k", aud.k, "subspace dimension (grassmann)")->check(CLI::PositiveNumber)->capture_default_str();
  audio->add_option("--snr", aud.snr, "dB")->capture_default_str();
  audio->add_option("--offset", aud.offset, "speech start in seconds")->check(CLI::NonNegativeNumber)->capture_default_str();
  audio->add_option("--alpha", aud.alpha)->capture_default_str();
  audio->add_option("--a-param", aud.a_param, "Huber threshold A (default 1 spd, 0.05 grassmann)");
  audio->add_option("--warmup", aud.warmup)->check(CLI::NonNegativeNumber)->capture_default_str();
  audio->add_option("--xi", aud.xi, "alarm threshold (default: calibrated on the noise alone)");
  add_policy_options(audio, aud);
  audio->add_option("-o,--output", aud.out, "write the manifold stream");
  audio->add_option("--trace", aud.trace, "write t,g,flagged CSV");
  audio->add_option("--seed", aud.seed, "accepted for uniformity; the pipeline is deterministic");

  try {
    std::string config_path;
    std::vector<std::string> args = strip_config(raw_args, config_path);
    if (!config_path.empty()) {
      std::vector<std::string> extra = config_tokens(config_path);
      const auto at = args.empty() || args.front().rfind("-", 0) == 0 ? args.begin() : args.begin() + 1;
      args.insert(at, extra.begin(), extra.end());
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kUsage;
    }
    if (app.got_subcommand(simulate)) return cmd_simulate(sim, out);
    if (app.got_subcommand(detect)) return cmd_detect(det, out);
    if (app.got_subcommand(benchmark)) return cmd_benchmark(bench, out);
    return cmd_audio(aud, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace rcpd::cli
