#include "rcpd/bench.hpp"

#include "rcpd/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace rcpd {
namespace {

// Seed families keep the null, change, and pilot streams independent while
// every method sees the same realization for a given run index.
constexpr std::uint64_t kNullFamily = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kChangeFamily = 0xc2b2ae3d27d4eb4fULL;
constexpr std::uint64_t kPilotFamily = 0x165667b19e3779f9ULL;

std::uint64_t family_seed(std::uint64_t base, std::uint64_t family, int run) {
  return run_seed(base ^ family, static_cast<std::uint64_t>(run));
}

template <class Fn>
void parallel_runs(int n_runs, int workers, Fn&& fn) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_runs);
  if (workers <= 1) {
    for (int i = 0; i < n_runs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n_runs; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n_runs;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

StreamSpec null_spec(const StreamSpec& spec) {
  StreamSpec s = spec;
  s.change_at.reset();
  return s;
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("threshold grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("threshold grid must be strictly increasing");
  }
}

// Per-run alarm times for every (method, threshold).
using AlarmTable = std::vector<std::vector<std::int64_t>>;

struct FamilyResult {
  std::vector<AlarmTable> null_alarms;    // [run][method][xi]
  std::vector<AlarmTable> change_alarms;  // [run][method][xi]
  std::vector<AlarmTable> pre_alarms;     // [run][method][xi], alarms in (warmup, t_r)
};

FamilyResult simulate(const Manifold& ops, const std::vector<Method>& methods,
                      const BenchConfig& cfg, const std::vector<std::vector<double>>& grids,
                      bool with_null, bool with_change) {
  FamilyResult out;
  const auto n = static_cast<std::size_t>(cfg.n_runs);
  if (with_null) out.null_alarms.resize(n);
  if (with_change) {
    out.change_alarms.resize(n);
    out.pre_alarms.resize(n);
  }
  const std::int64_t first_scored = cfg.warmup + 1;

  parallel_runs(cfg.n_runs, cfg.workers, [&](int run) {
    const auto r = static_cast<std::size_t>(run);
    if (with_null) {
      StreamSpec spec = null_spec(cfg.stream);
      spec.seed = family_seed(cfg.seed, kNullFamily, run);
      const std::vector<Point> stream = gen_stream(spec);
      AlarmTable table;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto g = statistic_trajectory(ops, methods[m].trackers, stream);
        table.push_back(first_crossings(g, first_scored, grids[m]));
      }
      out.null_alarms[r] = std::move(table);
    }
    if (with_change) {
      StreamSpec spec = cfg.stream;
      spec.seed = family_seed(cfg.seed, kChangeFamily, run);
      const std::vector<Point> stream = gen_stream(spec);
      AlarmTable post;
      AlarmTable pre;
      for (std::size_t m = 0; m < methods.size(); ++m) {
        auto g = statistic_trajectory(ops, methods[m].trackers, stream);
        post.push_back(first_crossings(g, *spec.change_at, grids[m]));
        g.resize(static_cast<std::size_t>(*spec.change_at));
        pre.push_back(first_crossings(g, first_scored, grids[m]));
      }
      out.change_alarms[r] = std::move(post);
      out.pre_alarms[r] = std::move(pre);
    }
  });
  return out;
}

std::vector<OperatingPoint> blank_points(const std::vector<double>& grid, int n_runs) {
  std::vector<OperatingPoint> pts(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pts[i].threshold = grid[i];
    pts[i].n_runs = n_runs;
  }
  return pts;
}

void score_arl(std::vector<OperatingPoint>& pts, const std::vector<AlarmTable>& alarms,
               std::size_t method, std::int64_t length) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double total = 0.0;
    int censored = 0;
    for (const AlarmTable& run : alarms) {
      const std::int64_t t = run[method][i];
      if (t < 0) {
        ++censored;
        total += static_cast<double>(length);
      } else {
        total += static_cast<double>(t);
      }
    }
    pts[i].arl = total / static_cast<double>(alarms.size());
    pts[i].censored_arl = censored;
  }
}

void score_mdd(std::vector<OperatingPoint>& pts, const std::vector<AlarmTable>& post,
               const std::vector<AlarmTable>& pre, std::size_t method, std::int64_t change_at,
               std::int64_t length) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double total = 0.0;
    int censored = 0;
    int false_alarms = 0;
    for (std::size_t r = 0; r < post.size(); ++r) {
      const std::int64_t t = post[r][method][i];
      if (t < 0) {
        ++censored;
        total += static_cast<double>(length - change_at);
      } else {
        total += static_cast<double>(t - change_at);
      }
      if (pre[r][method][i] >= 0) ++false_alarms;
    }
    pts[i].mdd = total / static_cast<double>(post.size());
    pts[i].censored_mdd = censored;
    pts[i].pre_change_false_alarms = false_alarms;
  }
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string format_step(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Method proposed_method(const HuberConfig& huber) {
  return {"proposed", proposed_trackers(huber)};
}

Method baseline_method(double step_fast, double step_slow) {
  return {"baseline_" + format_step(step_fast) + "_" + format_step(step_slow),
          baseline_trackers(step_fast, step_slow)};
}

std::vector<Method> default_baseline_methods() {
  return {baseline_method(0.1, 0.01), baseline_method(0.05, 0.005), baseline_method(0.2, 0.02)};
}

void BenchConfig::validate() const {
  stream.validate();
  if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
  if (warmup < 0) throw ValidationError("warmup must be >= 0");
  if (warmup + 1 >= stream.length) throw ValidationError("warmup leaves no samples to score");
  if (!thresholds.empty()) validate_grid(thresholds);
}

std::vector<std::int64_t> first_crossings(const std::vector<double>& g, std::int64_t from,
                                          const std::vector<double>& thresholds) {
  std::vector<std::int64_t> out(thresholds.size(), -1);
  if (from < 0) from = 0;
  if (from >= static_cast<std::int64_t>(g.size())) return out;
  std::vector<double> running(g.begin() + from, g.end());
  for (std::size_t i = 1; i < running.size(); ++i) running[i] = std::max(running[i], running[i - 1]);
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    const double xi = thresholds[j];
    auto it = std::upper_bound(running.begin(), running.end(), xi);
    if (it != running.end()) out[j] = from + (it - running.begin());
  }
  return out;
}

std::vector<OperatingPoint> estimate_arl(const Manifold& ops, const Method& method,
                                         const BenchConfig& cfg) {
  cfg.validate();
  validate_grid(cfg.thresholds);
  const std::vector<std::vector<double>> grids{cfg.thresholds};
  const FamilyResult res = simulate(ops, {method}, cfg, grids, true, false);
  auto pts = blank_points(cfg.thresholds, cfg.n_runs);
  score_arl(pts, res.null_alarms, 0, cfg.stream.length);
  return pts;
}

std::vector<OperatingPoint> estimate_mdd(const Manifold& ops, const Method& method,
                                         const BenchConfig& cfg) {
  cfg.validate();
  validate_grid(cfg.thresholds);
  if (!cfg.stream.change_at) throw ValidationError("MDD estimation needs a change point");
  const std::vector<std::vector<double>> grids{cfg.thresholds};
  const FamilyResult res = simulate(ops, {method}, cfg, grids, false, true);
  auto pts = blank_points(cfg.thresholds, cfg.n_runs);
  score_mdd(pts, res.change_alarms, res.pre_alarms, 0, *cfg.stream.change_at,
            cfg.stream.length);
  return pts;
}

std::vector<double> auto_threshold_grid(const Manifold& ops, const Method& method,
                                        const BenchConfig& cfg, int points, int pilot_runs) {
  cfg.validate();
  if (points < 2) throw ValidationError("grid needs at least two points");
  const StreamSpec base = null_spec(cfg.stream);
  std::vector<std::vector<double>> per_run(static_cast<std::size_t>(pilot_runs));
  parallel_runs(pilot_runs, cfg.workers, [&](int run) {
    StreamSpec spec = base;
    spec.seed = family_seed(cfg.seed, kPilotFamily, run);
    const auto g = statistic_trajectory(ops, method.trackers, gen_stream(spec));
    per_run[static_cast<std::size_t>(run)].assign(g.begin() + cfg.warmup + 1, g.end());
  });
  std::vector<double> all;
  for (const auto& v : per_run) all.insert(all.end(), v.begin(), v.end());
  const double lo = percentile(all, 0.05);
  double hi = percentile(all, 0.999);
  if (!(hi > lo)) hi = lo + std::max(1e-12, std::abs(lo) * 1e-6);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  }
  return grid;
}

std::vector<Curve> run_comparison(const Manifold& ops, const std::vector<Method>& methods,
                                  const BenchConfig& cfg,
                                  std::vector<std::vector<double>> grids) {
  cfg.validate();
  if (!cfg.stream.change_at) throw ValidationError("comparison needs a change point");
  if (methods.empty()) throw ValidationError("no methods to compare");
  grids.resize(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    if (grids[m].empty()) {
      grids[m] = cfg.thresholds.empty() ? auto_threshold_grid(ops, methods[m], cfg)
                                        : cfg.thresholds;
    }
    validate_grid(grids[m]);
  }
  const FamilyResult res = simulate(ops, methods, cfg, grids, true, true);
  std::vector<Curve> curves;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    Curve c{methods[m].label, to_string(cfg.stream.manifold), blank_points(grids[m], cfg.n_runs)};
    score_arl(c.points, res.null_alarms, m, cfg.stream.length);
    score_mdd(c.points, res.change_alarms, res.pre_alarms, m, *cfg.stream.change_at,
              cfg.stream.length);
    curves.push_back(std::move(c));
  }
  return curves;
}

double interpolate_best_mdd(const std::vector<Curve>& curves, double arl) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const Curve& c : curves) {
    // Collapse equal-ARL points to their lowest MDD, then interpolate.
    std::map<double, double> by_arl;
    for (const auto& p : c.points) {
      auto [it, inserted] = by_arl.emplace(p.arl, p.mdd);
      if (!inserted) it->second = std::min(it->second, p.mdd);
    }
    if (by_arl.empty() || arl < by_arl.begin()->first || arl > by_arl.rbegin()->first) continue;
    auto hi = by_arl.lower_bound(arl);
    double value;
    if (hi->first == arl || hi == by_arl.begin()) {
      value = hi->second;
    } else {
      auto lo = std::prev(hi);
      const double frac = (arl - lo->first) / (hi->first - lo->first);
      value = lo->second + frac * (hi->second - lo->second);
    }
    if (std::isnan(best) || value < best) best = value;
  }
  return best;
}

DominanceReport compare_curves(const Curve& proposed, const std::vector<Curve>& baselines,
                               double max_censored_fraction) {
  DominanceReport report;
  std::vector<double> seen;
  for (const auto& p : proposed.points) {
    const double limit = max_censored_fraction * p.n_runs;
    if (!(p.censored_arl < limit && p.censored_mdd < limit)) continue;
    if (std::find(seen.begin(), seen.end(), p.arl) != seen.end()) continue;
    const double base = interpolate_best_mdd(baselines, p.arl);
    if (std::isnan(base)) continue;
    seen.push_back(p.arl);
    ++report.matched_levels;
    if (p.mdd <= base) ++report.dominated_levels;
  }
  return report;
}

void write_bench_csv(std::ostream& os, const std::vector<Curve>& curves) {
  os << kBenchCsvHeader << '\n';
  for (const Curve& c : curves) {
    for (const auto& p : c.points) {
      os << c.method << ',' << c.manifold << ',' << format_double(p.threshold) << ','
         << format_double(p.arl) << ',' << format_double(p.mdd) << ',' << p.n_runs << ','
         << p.censored_arl << ',' << p.censored_mdd << ',' << p.pre_change_false_alarms << '\n';
    }
  }
}

std::vector<Curve> read_bench_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("benchmark CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBenchCsvHeader) throw DataError("unexpected benchmark CSV header: " + line);
  std::vector<Curve> curves;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) {
      throw DataError("benchmark CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " fields, expected 9");
    }
    OperatingPoint p;
    try {
      p.threshold = std::stod(cells[2]);
      p.arl = std::stod(cells[3]);
      p.mdd = std::stod(cells[4]);
      p.n_runs = std::stoi(cells[5]);
      p.censored_arl = std::stoi(cells[6]);
      p.censored_mdd = std::stoi(cells[7]);
      p.pre_change_false_alarms = std::stoi(cells[8]);
    } catch (const std::exception&) {
      throw DataError("benchmark CSV line " + std::to_string(line_no) + " has a malformed number");
    }
    if (curves.empty() || curves.back().method != cells[0] || curves.back().manifold != cells[1]) {
      curves.push_back(Curve{cells[0], cells[1], {}});
    }
    curves.back().points.push_back(p);
  }
  return curves;
}

}  // namespace rcpd
