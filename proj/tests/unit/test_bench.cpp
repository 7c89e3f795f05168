#include "rcpd/bench.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/spd.hpp"

#include <doctest.h>

#include <sstream>

using namespace rcpd;

namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.stream = spd_stream_spec(3, 300, 200, 5);
  cfg.n_runs = 6;
  cfg.warmup = 50;
  cfg.seed = 3;
  cfg.workers = 2;
  return cfg;
}

void check_monotone(const std::vector<OperatingPoint>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].arl >= pts[i - 1].arl);
    CHECK(pts[i].mdd >= pts[i - 1].mdd);
  }
}

}  // namespace

TEST_SUITE("bench") {
TEST_CASE("first crossings use the running maximum") {
  const std::vector<double> g{0, 0.5, 0.2, 0.9, 0.1, 2.0};
  const auto c = first_crossings(g, 2, {0.0, 0.3, 0.95, 5.0});
  CHECK(c == std::vector<std::int64_t>{2, 3, 5, -1});
}

TEST_CASE("arl and mdd edge cases") {
  const Spd ops(3);
  BenchConfig cfg = small_config();
  cfg.thresholds = {0.0, 1e6};
  const Method m = proposed_method({1.0, 0.05});
  const auto arl = estimate_arl(ops, m, cfg);
  CHECK(arl[0].arl == doctest::Approx(cfg.warmup + 1));
  CHECK(arl[0].censored_arl == 0);
  CHECK(arl[1].arl == doctest::Approx(300));
  CHECK(arl[1].censored_arl == cfg.n_runs);
  const auto mdd = estimate_mdd(ops, m, cfg);
  CHECK(mdd[0].mdd == 0.0);
  CHECK(mdd[1].mdd == doctest::Approx(100));
  CHECK(mdd[1].censored_mdd == cfg.n_runs);
}

TEST_CASE("curves are monotone and paired") {
  const Spd ops(3);
  BenchConfig cfg = small_config();
  const Method p = proposed_method({1.0, 0.05});
  const auto curves = run_comparison(ops, {p, p, baseline_method(0.1, 0.01)}, cfg);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].points.size() == 25);
  for (const Curve& c : curves) check_monotone(c.points);
  for (std::size_t i = 0; i < curves[0].points.size(); ++i) {
    CHECK(curves[0].points[i].arl == curves[1].points[i].arl);
    CHECK(curves[0].points[i].mdd == curves[1].points[i].mdd);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const Spd ops(3);
  BenchConfig a = small_config();
  a.thresholds = {0.1, 0.2, 0.4};
  BenchConfig b = a;
  b.workers = 1;
  const Method m = proposed_method({1.0, 0.05});
  const auto x = estimate_mdd(ops, m, a), y = estimate_mdd(ops, m, b);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].mdd == y[i].mdd);
}

TEST_CASE("config validation") {
  BenchConfig cfg = small_config();
  cfg.n_runs = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.thresholds = {0.2, 0.1};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("interpolation and dominance") {
  Curve base{"baseline", "spd", {}};
  base.points = {{1.0, 100, 10, 10, 0, 0, 0}, {2.0, 300, 30, 10, 0, 0, 0}};
  CHECK(interpolate_best_mdd({base}, 200) == doctest::Approx(20));
  CHECK(std::isnan(interpolate_best_mdd({base}, 50)));
  Curve prop{"proposed", "spd", {}};
  prop.points = {{1.0, 150, 10, 10, 0, 0, 0}, {2.0, 250, 30, 10, 0, 0, 0}, {3.0, 400, 40, 10, 0, 0, 0}};
  const DominanceReport r = compare_curves(prop, {base});
  CHECK(r.matched_levels == 2);
  CHECK(r.dominated_levels == 1);
}

TEST_CASE("csv round trip") {
  Curve c{"proposed", "spd", {{0.1, 501.5, 3.25, 200, 0, 1, 2}, {0.30000000000000004, 1e3, 7, 200, 4, 5, 6}}};
  std::stringstream ss;
  write_bench_csv(ss, {c});
  CHECK(ss.str().rfind(std::string(kBenchCsvHeader) + "\n", 0) == 0);
  const auto back = read_bench_csv(ss);
  REQUIRE(back.size() == 1);
  CHECK(back[0].method == "proposed");
  REQUIRE(back[0].points.size() == 2);
  CHECK(back[0].points[1].threshold == 0.30000000000000004);
  CHECK(back[0].points[1].censored_arl == 4);
  CHECK(back[0].points[1].pre_change_false_alarms == 6);
  std::stringstream bad("method,xi\nfoo,1\n");
  CHECK_THROWS_AS(read_bench_csv(bad), DataError);
}
}
