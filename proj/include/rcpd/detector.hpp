#pragma once

#include "rcpd/centroid.hpp"
#include "rcpd/manifold.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rcpd {

enum class PostAlarmPolicy {
  halt,   ///< stop updating after the first flag
  reset,  ///< re-initialize both trackers at the flagged sample, then hold off
};

/// Configuration of the robust two-centroid detector. The Karcher tracker
/// always runs with A = infinity; `huber.threshold` applies to the robust one.
struct DetectorConfig {
  HuberConfig huber{1.0, 0.05};
  double threshold = 1.0;  ///< xi
  PostAlarmPolicy policy = PostAlarmPolicy::reset;
  int dead_time = 50;
  std::int64_t warmup = 0;  ///< no flags while t <= warmup

  /// Rejects A = infinity (the statistic would be identically zero).
  void validate() const;
};

/// Two Karcher trackers with different step sizes, flagging when they drift
/// apart.
struct BaselineConfig {
  double step_fast = 0.1;
  double step_slow = 0.01;
  double threshold = 1.0;
  PostAlarmPolicy policy = PostAlarmPolicy::reset;
  int dead_time = 50;
  std::int64_t warmup = 0;

  void validate() const;
};

struct DetectorState {
  Point m;      ///< Karcher tracker (baseline: fast tracker)
  Point m_rho;  ///< robust tracker (baseline: slow tracker)
  std::int64_t t = 0;
  double g = 0.0;
  bool alarm = false;
  bool halted = false;
  std::int64_t hold_until = 0;  ///< no flags while t <= hold_until
  std::int64_t degenerate_samples = 0;
};

using BaselineState = DetectorState;

struct UpdateResult {
  double statistic = 0.0;  ///< g_t before any post-alarm reset
  bool flagged = false;
};

struct TraceRecord {
  std::int64_t t;
  double g;
  bool flagged;
};

DetectorState detector_init(const Manifold& ops, const DetectorConfig& cfg, const Point& x0);
UpdateResult detector_update(const Manifold& ops, DetectorState& state, const DetectorConfig& cfg,
                             const Point& x);

BaselineState baseline_init(const Manifold& ops, const BaselineConfig& cfg, const Point& x0);
UpdateResult baseline_update(const Manifold& ops, BaselineState& state, const BaselineConfig& cfg,
                             const Point& x);

/// Runs the detector over a whole stream: x[0] initializes, x[1..] update.
std::vector<TraceRecord> run_detector(const Manifold& ops, const DetectorConfig& cfg,
                                      std::span<const Point> stream);
std::vector<TraceRecord> run_baseline(const Manifold& ops, const BaselineConfig& cfg,
                                      std::span<const Point> stream);

/// Statistic g_t for t = 0..T-1 with no thresholding and no resets
/// (g_0 = 0). Used by the benchmark to score every threshold in one pass.
struct TrackerPair {
  HuberConfig first;
  HuberConfig second;
};
std::vector<double> statistic_trajectory(const Manifold& ops, const TrackerPair& trackers,
                                         std::span<const Point> stream);

/// Largest g_t over t >= from; a threshold that never fires on `stream`.
double max_statistic(const Manifold& ops, const TrackerPair& trackers,
                     std::span<const Point> stream, std::int64_t from);

TrackerPair proposed_trackers(const HuberConfig& huber);
TrackerPair baseline_trackers(double step_fast, double step_slow);

}  // namespace rcpd
