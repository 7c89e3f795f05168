#include "rcpd/detector.hpp"

#include "rcpd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcpd {
namespace {

void validate_policy(int dead_time, std::int64_t warmup) {
  if (dead_time < 0) throw ValidationError("dead_time must be >= 0");
  if (warmup < 0) throw ValidationError("warmup must be >= 0");
}

// Applies one tracker update, skipping samples whose log map is undefined.
// Returns false if the sample was skipped.
bool guarded_step(const Manifold& ops, const HuberConfig& cfg, Point& tracker, const Point& x) {
  try {
    tracker = sgd_step(ops, cfg, tracker, x);
    return true;
  } catch (const DegeneratePairError&) {
    return false;
  }
}

void note_degenerate(DetectorState& state) {
  ++state.degenerate_samples;
  // Tolerate one isolated event early on, then at most 0.1% of samples.
  if (static_cast<double>(state.degenerate_samples) > 1.0 + 1e-3 * static_cast<double>(state.t)) {
    throw DegeneratePairError("more than 0.1% of samples hit the cut locus (" +
                              std::to_string(state.degenerate_samples) + " of " +
                              std::to_string(state.t) + ")");
  }
}

DetectorState make_state(const Manifold& ops, const Point& x0, std::int64_t warmup) {
  ops.validate(x0);
  DetectorState s;
  s.hold_until = warmup;
  s.m = x0;
  s.m_rho = x0;
  return s;
}

UpdateResult two_tracker_update(const Manifold& ops, DetectorState& state, const HuberConfig& first,
                                const HuberConfig& second, double threshold,
                                PostAlarmPolicy policy, int dead_time, const Point& x) {
  if (state.halted) return {state.g, false};
  ++state.t;
  bool skipped = !guarded_step(ops, first, state.m, x);
  skipped |= !guarded_step(ops, second, state.m_rho, x);
  if (skipped) note_degenerate(state);

  UpdateResult result;
  result.statistic = ops.distance(state.m, state.m_rho);
  state.g = result.statistic;
  result.flagged = result.statistic > threshold && state.t > state.hold_until;
  if (!result.flagged) return result;

  state.alarm = true;
  if (policy == PostAlarmPolicy::halt) {
    state.halted = true;
  } else {
    state.m = x;
    state.m_rho = x;
    state.g = 0.0;
    state.hold_until = state.t + dead_time;
  }
  return result;
}

}  // namespace

void DetectorConfig::validate() const {
  huber.validate();
  if (std::isinf(huber.threshold)) {
    throw ValidationError(
        "A = infinity makes the robust tracker identical to the Karcher tracker, so the "
        "statistic is identically zero; choose a finite A");
  }
  if (!(threshold > 0.0)) throw ValidationError("threshold xi must be > 0");
  validate_policy(dead_time, warmup);
}

void BaselineConfig::validate() const {
  if (!(step_slow > 0.0 && step_fast > step_slow && step_fast <= 1.0)) {
    throw ValidationError("baseline steps must satisfy 1 >= step_fast > step_slow > 0");
  }
  if (!(threshold > 0.0)) throw ValidationError("threshold must be > 0");
  validate_policy(dead_time, warmup);
}

TrackerPair proposed_trackers(const HuberConfig& huber) {
  return {HuberConfig{kInfinity, huber.step}, huber};
}

TrackerPair baseline_trackers(double step_fast, double step_slow) {
  return {HuberConfig{kInfinity, step_fast}, HuberConfig{kInfinity, step_slow}};
}

DetectorState detector_init(const Manifold& ops, const DetectorConfig& cfg, const Point& x0) {
  cfg.validate();
  return make_state(ops, x0, cfg.warmup);
}

UpdateResult detector_update(const Manifold& ops, DetectorState& state, const DetectorConfig& cfg,
                             const Point& x) {
  const TrackerPair pair = proposed_trackers(cfg.huber);
  return two_tracker_update(ops, state, pair.first, pair.second, cfg.threshold, cfg.policy,
                            cfg.dead_time, x);
}

BaselineState baseline_init(const Manifold& ops, const BaselineConfig& cfg, const Point& x0) {
  cfg.validate();
  return make_state(ops, x0, cfg.warmup);
}

UpdateResult baseline_update(const Manifold& ops, BaselineState& state, const BaselineConfig& cfg,
                             const Point& x) {
  const TrackerPair pair = baseline_trackers(cfg.step_fast, cfg.step_slow);
  return two_tracker_update(ops, state, pair.first, pair.second, cfg.threshold, cfg.policy,
                            cfg.dead_time, x);
}

namespace {

template <class Config, class Init, class Update>
std::vector<TraceRecord> run_stream(const Manifold& ops, const Config& cfg,
                                    std::span<const Point> stream, Init init, Update update) {
  std::vector<TraceRecord> trace;
  if (stream.empty()) return trace;
  DetectorState state = init(ops, cfg, stream[0]);
  trace.reserve(stream.size());
  trace.push_back({0, 0.0, false});
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (state.halted) break;
    const UpdateResult r = update(ops, state, cfg, stream[i]);
    trace.push_back({state.t, r.statistic, r.flagged});
  }
  return trace;
}

}  // namespace

std::vector<TraceRecord> run_detector(const Manifold& ops, const DetectorConfig& cfg,
                                      std::span<const Point> stream) {
  return run_stream(ops, cfg, stream, detector_init, detector_update);
}

std::vector<TraceRecord> run_baseline(const Manifold& ops, const BaselineConfig& cfg,
                                      std::span<const Point> stream) {
  return run_stream(ops, cfg, stream, baseline_init, baseline_update);
}

std::vector<double> statistic_trajectory(const Manifold& ops, const TrackerPair& trackers,
                                         std::span<const Point> stream) {
  std::vector<double> g;
  if (stream.empty()) return g;
  DetectorState state = make_state(ops, stream[0], 0);
  g.reserve(stream.size());
  g.push_back(0.0);
  for (std::size_t i = 1; i < stream.size(); ++i) {
    const UpdateResult r = two_tracker_update(ops, state, trackers.first, trackers.second,
                                              kInfinity, PostAlarmPolicy::halt, 0, stream[i]);
    g.push_back(r.statistic);
  }
  return g;
}

double max_statistic(const Manifold& ops, const TrackerPair& trackers,
                     std::span<const Point> stream, std::int64_t from) {
  const std::vector<double> g = statistic_trajectory(ops, trackers, stream);
  if (from < 0 || from >= static_cast<std::int64_t>(g.size())) {
    throw ValidationError("calibration start lies outside the stream");
  }
  return *std::max_element(g.begin() + from, g.end());
}

}  // namespace rcpd
