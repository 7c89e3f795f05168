#pragma once

#include "rcpd/datagen.hpp"
#include "rcpd/detector.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcpd {

/// One (xi, ARL, MDD) triple with its Monte Carlo bookkeeping.
struct OperatingPoint {
  double threshold = 0.0;
  double arl = 0.0;
  double mdd = 0.0;
  int n_runs = 0;
  int censored_arl = 0;
  int censored_mdd = 0;
  int pre_change_false_alarms = 0;
};

/// A detector variant under evaluation: the two trackers it compares.
struct Method {
  std::string label;
  TrackerPair trackers;
};

Method proposed_method(const HuberConfig& huber);
Method baseline_method(double step_fast, double step_slow);

/// Step-size pairs swept for the baseline.
std::vector<Method> default_baseline_methods();

struct BenchConfig {
  /// Change stream; the null streams use the same spec with the change removed.
  StreamSpec stream;
  std::vector<double> thresholds;  ///< strictly increasing
  int n_runs = 200;
  std::uint64_t seed = 1;
  std::int64_t warmup = 500;
  int workers = 0;  ///< 0 = hardware concurrency

  void validate() const;
};

/// Earliest t >= from with g[t] > xi, for every xi at once (thresholds must
/// be increasing); -1 where g never crosses. Uses the running maximum of g.
std::vector<std::int64_t> first_crossings(const std::vector<double>& g, std::int64_t from,
                                          const std::vector<double>& thresholds);

/// ARL per threshold from change-free streams. Runs with no alarm are censored
/// at the stream length.
std::vector<OperatingPoint> estimate_arl(const Manifold& ops, const Method& method,
                                         const BenchConfig& cfg);

/// MDD per threshold from streams with a change at cfg.stream.change_at.
/// Alarms before the change are tallied separately; runs with no alarm after
/// it are censored at T - t_r.
std::vector<OperatingPoint> estimate_mdd(const Manifold& ops, const Method& method,
                                         const BenchConfig& cfg);

struct Curve {
  std::string method;
  std::string manifold;
  std::vector<OperatingPoint> points;
};

/// Threshold grid spanning the [5th, 99.9th] percentile of the statistic on
/// `pilot_runs` null streams (post-warmup samples only).
std::vector<double> auto_threshold_grid(const Manifold& ops, const Method& method,
                                        const BenchConfig& cfg, int points = 25,
                                        int pilot_runs = 20);

/// Evaluates every method on identical seeded streams. If a method's grid in
/// `grids` is empty it is auto-scaled.
std::vector<Curve> run_comparison(const Manifold& ops, const std::vector<Method>& methods,
                                  const BenchConfig& cfg,
                                  std::vector<std::vector<double>> grids = {});

/// Pointwise best (lowest) MDD of the curves at the given ARL, by linear
/// interpolation on each curve. Returns NaN if no curve covers `arl`.
double interpolate_best_mdd(const std::vector<Curve>& curves, double arl);

struct DominanceReport {
  int matched_levels = 0;     ///< proposed points inside the baseline ARL range
  int dominated_levels = 0;   ///< of those, proposed MDD <= baseline MDD
};

/// Compares the proposed curve against the best baseline at each proposed
/// operating point with < max_censored_fraction censoring.
DominanceReport compare_curves(const Curve& proposed, const std::vector<Curve>& baselines,
                               double max_censored_fraction = 0.2);

inline constexpr const char* kBenchCsvHeader =
    "method,manifold,xi,arl,mdd,n_runs,censored_arl,censored_mdd,pre_change_false_alarms";

void write_bench_csv(std::ostream& os, const std::vector<Curve>& curves);
std::vector<Curve> read_bench_csv(std::istream& is);

}  // namespace rcpd
