#include "rcpd/bench.hpp"
#include "rcpd/centroid.hpp"
#include "rcpd/datagen.hpp"
#include "rcpd/detector.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/grassmann.hpp"
#include "rcpd/spd.hpp"
#include "rcpd/stream_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

namespace py = pybind11;
using namespace rcpd;

namespace {

std::vector<Point> to_points(const std::vector<Matrix>& xs) {
  std::vector<Point> out;
  out.reserve(xs.size());
  for (const Matrix& x : xs) out.push_back(Point{x});
  return out;
}

std::vector<Matrix> to_matrices(const std::vector<Point>& xs) {
  std::vector<Matrix> out;
  out.reserve(xs.size());
  for (const Point& x : xs) out.push_back(x.data);
  return out;
}

PostAlarmPolicy parse_policy(const std::string& s) {
  if (s == "halt") return PostAlarmPolicy::halt;
  if (s == "reset") return PostAlarmPolicy::reset;
  throw ValidationError("policy must be 'halt' or 'reset', got '" + s + "'");
}

std::string policy_name(PostAlarmPolicy p) { return p == PostAlarmPolicy::halt ? "halt" : "reset"; }

py::dict trace_dict(const std::vector<TraceRecord>& trace) {
  std::vector<std::int64_t> t;
  std::vector<double> g;
  std::vector<bool> flagged;
  for (const TraceRecord& r : trace) {
    t.push_back(r.t);
    g.push_back(r.g);
    flagged.push_back(r.flagged);
  }
  py::dict d;
  d["t"] = t;
  d["g"] = g;
  d["flagged"] = flagged;
  return d;
}

class Detector {
 public:
  Detector(std::shared_ptr<Manifold> ops, DetectorConfig cfg, const Matrix& x0)
      : ops_(std::move(ops)), cfg_(cfg), state_(detector_init(*ops_, cfg_, Point{x0})) {}
  py::tuple update(const Matrix& x) {
    const UpdateResult r = detector_update(*ops_, state_, cfg_, Point{x});
    return py::make_tuple(r.statistic, r.flagged);
  }
  const DetectorState& state() const { return state_; }

 private:
  ManifoldPtr ops_;
  DetectorConfig cfg_;
  DetectorState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust change-point detection on SPD and Grassmann manifolds";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DegeneratePairError>(m, "DegeneratePairError", PyExc_ArithmeticError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);

  py::class_<Manifold, std::shared_ptr<Manifold>>(m, "Manifold")
      .def_property_readonly("kind", [](const Manifold& o) { return to_string(o.kind()); })
      .def_property_readonly("shape", [](const Manifold& o) { return py::make_tuple(o.rows(), o.cols()); })
      .def("distance", [](const Manifold& o, const Matrix& x, const Matrix& y) {
        return o.distance(Point{x}, Point{y});
      })
      .def("log", [](const Manifold& o, const Matrix& x, const Matrix& y) {
        return o.log(Point{x}, Point{y}).data;
      })
      .def("exp", [](const Manifold& o, const Matrix& x, const Matrix& v) {
        return o.exp(Point{x}, Tangent{v}).data;
      })
      .def("retract", [](const Manifold& o, const Matrix& x, const Matrix& v) {
        return o.retract(Point{x}, Tangent{v}).data;
      })
      .def("inner", [](const Manifold& o, const Matrix& x, const Matrix& v, const Matrix& w) {
        return o.inner(Point{x}, Tangent{v}, Tangent{w});
      })
      .def("norm", [](const Manifold& o, const Matrix& x, const Matrix& v) {
        return o.norm(Point{x}, Tangent{v});
      })
      .def("project", [](const Manifold& o, const Matrix& x, const Matrix& a) {
        return o.project(Point{x}, a).data;
      })
      .def("validate", [](const Manifold& o, const Matrix& x) { o.validate(Point{x}); })
      .def("is_valid", [](const Manifold& o, const Matrix& x) { return o.is_valid(Point{x}); })
      .def("__repr__", &Manifold::describe);

  py::class_<Spd, Manifold, std::shared_ptr<Spd>>(m, "Spd").def(py::init<Eigen::Index>(), py::arg("p"));
  py::class_<Grassmann, Manifold, std::shared_ptr<Grassmann>>(m, "Grassmann")
      .def(py::init<Eigen::Index, Eigen::Index>(), py::arg("p"), py::arg("k"))
      .def("principal_angles", [](const Grassmann& o, const Matrix& a, const Matrix& b) {
        return Vector(o.principal_angles(Point{a}, Point{b}));
      });

  py::class_<HuberConfig>(m, "HuberConfig")
      .def(py::init([](double threshold, double step) {
             HuberConfig c{threshold, step};
             c.validate();
             return c;
           }),
           py::arg("threshold") = kInfinity, py::arg("step") = 0.05)
      .def_readwrite("threshold", &HuberConfig::threshold)
      .def_readwrite("step", &HuberConfig::step);

  py::class_<DetectorConfig>(m, "DetectorConfig")
      .def(py::init([](double a, double alpha, double xi, const std::string& policy, int dead_time,
                       std::int64_t warmup) {
             DetectorConfig c{{a, alpha}, xi, parse_policy(policy), dead_time, warmup};
             c.validate();
             return c;
           }),
           py::arg("a") = 1.0, py::arg("alpha") = 0.05, py::arg("xi") = 1.0,
           py::arg("policy") = "reset", py::arg("dead_time") = 50, py::arg("warmup") = 0)
      .def_readwrite("huber", &DetectorConfig::huber)
      .def_readwrite("xi", &DetectorConfig::threshold)
      .def_property("policy", [](const DetectorConfig& c) { return policy_name(c.policy); },
                    [](DetectorConfig& c, const std::string& s) { c.policy = parse_policy(s); })
      .def_readwrite("dead_time", &DetectorConfig::dead_time)
      .def_readwrite("warmup", &DetectorConfig::warmup);

  py::class_<BaselineConfig>(m, "BaselineConfig")
      .def(py::init([](double step_fast, double step_slow, double xi, const std::string& policy,
                       int dead_time, std::int64_t warmup) {
             BaselineConfig c{step_fast, step_slow, xi, parse_policy(policy), dead_time, warmup};
             c.validate();
             return c;
           }),
           py::arg("step_fast") = 0.1, py::arg("step_slow") = 0.01, py::arg("xi") = 1.0,
           py::arg("policy") = "reset", py::arg("dead_time") = 50, py::arg("warmup") = 0)
      .def_readwrite("step_fast", &BaselineConfig::step_fast)
      .def_readwrite("step_slow", &BaselineConfig::step_slow)
      .def_readwrite("xi", &BaselineConfig::threshold);

  py::class_<Detector>(m, "Detector")
      .def(py::init<std::shared_ptr<Manifold>, DetectorConfig, const Matrix&>(), py::arg("manifold"),
           py::arg("config"), py::arg("x0"))
      .def("update", &Detector::update, py::arg("x"), "Returns (g, flagged).")
      .def_property_readonly("t", [](const Detector& d) { return d.state().t; })
      .def_property_readonly("g", [](const Detector& d) { return d.state().g; })
      .def_property_readonly("m", [](const Detector& d) { return d.state().m.data; })
      .def_property_readonly("m_rho", [](const Detector& d) { return d.state().m_rho.data; })
      .def_property_readonly("halted", [](const Detector& d) { return d.state().halted; })
      .def_property_readonly("degenerate_samples",
                             [](const Detector& d) { return d.state().degenerate_samples; });

  m.def("huber_weight", &huber_weight, py::arg("a"), py::arg("d"));
  m.def("karcher_gradient", [](const Manifold& o, const Matrix& mm, const Matrix& x) {
    return karcher_stochastic_gradient(o, Point{mm}, Point{x}).data;
  });
  m.def("robust_gradient", [](const Manifold& o, double a, const Matrix& mm, const Matrix& x) {
    return robust_stochastic_gradient(o, a, Point{mm}, Point{x}).data;
  });
  m.def("sgd_step", [](const Manifold& o, const HuberConfig& c, const Matrix& mm, const Matrix& x) {
    return sgd_step(o, c, Point{mm}, Point{x}).data;
  });
  m.def("robust_cost", [](const Manifold& o, double a, const Matrix& mm, const std::vector<Matrix>& xs) {
    return robust_cost(o, a, Point{mm}, to_points(xs));
  });
  m.def("batch_frechet_mean",
        [](const Manifold& o, double a, const std::vector<Matrix>& xs, double tol, int max_iterations) {
          return batch_frechet_mean(o, a, to_points(xs), {tol, 0.5, max_iterations}).data;
        },
        py::arg("manifold"), py::arg("a"), py::arg("samples"), py::arg("tol") = 1e-10,
        py::arg("max_iterations") = 10000);

  m.def("statistic_trajectory",
        [](const Manifold& o, const std::vector<Matrix>& xs, double a, double alpha) {
          return statistic_trajectory(o, proposed_trackers({a, alpha}), to_points(xs));
        },
        py::arg("manifold"), py::arg("stream"), py::arg("a") = 1.0, py::arg("alpha") = 0.05);
  m.def("run_detector",
        [](const Manifold& o, const DetectorConfig& c, const std::vector<Matrix>& xs) {
          return trace_dict(run_detector(o, c, to_points(xs)));
        },
        py::arg("manifold"), py::arg("config"), py::arg("stream"));

  m.def("spd_stream",
        [](Eigen::Index p, std::int64_t length, std::optional<std::int64_t> change_at, std::uint64_t seed) {
          return to_matrices(gen_stream(spd_stream_spec(p, length, change_at, seed)));
        },
        py::arg("p"), py::arg("length"), py::arg("change_at") = py::none(), py::arg("seed") = 0);
  m.def("grassmann_stream",
        [](Eigen::Index p, Eigen::Index k, std::int64_t length, std::optional<std::int64_t> change_at,
           std::uint64_t seed, double signal) {
          return to_matrices(gen_stream(grassmann_stream_spec(p, k, length, change_at, seed, signal)));
        },
        py::arg("p"), py::arg("k"), py::arg("length"), py::arg("change_at") = py::none(),
        py::arg("seed") = 0, py::arg("signal") = 20.0);

  m.def("read_stream", [](const std::string& path) {
    const MatrixStream s = read_matrix_stream_file(path);
    py::dict d;
    d["manifold"] = to_string(s.header.manifold);
    d["p"] = s.header.p;
    d["k"] = s.header.k;
    d["points"] = to_matrices(s.points);
    return d;
  });
  m.def("write_stream",
        [](const std::string& path, const std::string& manifold, const std::vector<Matrix>& xs) {
          if (manifold != "spd" && manifold != "grassmann")
            throw ValidationError("manifold must be 'spd' or 'grassmann'");
          if (xs.empty()) throw ValidationError("empty stream");
          StreamHeader h;
          h.manifold = manifold == "spd" ? ManifoldKind::spd : ManifoldKind::grassmann;
          h.p = xs.front().rows();
          h.k = xs.front().cols();
          h.length = static_cast<std::int64_t>(xs.size());
          write_matrix_stream_file(path, h, to_points(xs));
        },
        py::arg("path"), py::arg("manifold"), py::arg("points"));

  m.attr("BENCH_CSV_HEADER") = kBenchCsvHeader;
  m.def("read_bench_csv", [](const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path);
    py::list rows;
    for (const Curve& c : read_bench_csv(is)) {
      for (const OperatingPoint& p : c.points) {
        py::dict r;
        r["method"] = c.method;
        r["manifold"] = c.manifold;
        r["xi"] = p.threshold;
        r["arl"] = p.arl;
        r["mdd"] = p.mdd;
        r["n_runs"] = p.n_runs;
        r["censored_arl"] = p.censored_arl;
        r["censored_mdd"] = p.censored_mdd;
        r["pre_change_false_alarms"] = p.pre_change_false_alarms;
        rows.append(r);
      }
    }
    return rows;
  });
  m.def("write_bench_csv", [](const std::string& path, const py::list& rows) {
    std::vector<Curve> curves;
    for (const auto& item : rows) {
      const auto r = item.cast<py::dict>();
      const auto method = r["method"].cast<std::string>();
      const auto manifold = r["manifold"].cast<std::string>();
      if (curves.empty() || curves.back().method != method || curves.back().manifold != manifold)
        curves.push_back({method, manifold, {}});
      OperatingPoint p;
      p.threshold = r["xi"].cast<double>();
      p.arl = r["arl"].cast<double>();
      p.mdd = r["mdd"].cast<double>();
      p.n_runs = r["n_runs"].cast<int>();
      p.censored_arl = r.contains("censored_arl") ? r["censored_arl"].cast<int>() : 0;
      p.censored_mdd = r.contains("censored_mdd") ? r["censored_mdd"].cast<int>() : 0;
      p.pre_change_false_alarms =
          r.contains("pre_change_false_alarms") ? r["pre_change_false_alarms"].cast<int>() : 0;
      curves.back().points.push_back(p);
    }
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path);
    write_bench_csv(os, curves);
  });
}
