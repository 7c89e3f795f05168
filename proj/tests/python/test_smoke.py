import math

import numpy as np
import pytest

import rcpd


def test_spd_geometry():
    ops = rcpd.Spd(3)
    rng = np.random.default_rng(0)
    g = rng.normal(size=(3, 3))
    a = g @ g.T + 3 * np.eye(3)
    b = np.diag([1.0, 2.0, 3.0])
    v = ops.log(a, b)
    assert np.allclose(ops.exp(a, v), b, atol=1e-10)
    assert ops.norm(a, v) == pytest.approx(ops.distance(a, b), rel=1e-12)
    assert ops.distance(a, a) == 0.0
    assert ops.kind == "spd"


def test_grassmann_geometry():
    ops = rcpd.Grassmann(5, 2)
    a = np.eye(5)[:, :2]
    b = np.linalg.qr(np.eye(5)[:, :2] + 0.3 * np.eye(5)[:, 2:4])[0]
    angles = ops.principal_angles(a, b)
    assert ops.distance(a, b) == pytest.approx(np.linalg.norm(angles), rel=1e-12)
    assert np.allclose(ops.exp(a, ops.log(a, b)) @ ops.exp(a, ops.log(a, b)).T, b @ b.T, atol=1e-10)


def test_invalid_point_raises():
    with pytest.raises(rcpd.ValidationError):
        rcpd.Spd(2).validate(np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(ValueError):
        rcpd.HuberConfig(threshold=0.0)


def test_huber_scaling():
    ops = rcpd.Spd(2)
    m = np.eye(2)
    x = np.diag([math.e**2, 1.0])
    h = rcpd.karcher_gradient(ops, m, x)
    d = ops.distance(m, x)
    assert rcpd.huber_weight(1.0, d) == pytest.approx(0.5)
    assert np.allclose(rcpd.robust_gradient(ops, 1.0, m, x), 0.5 * h, atol=1e-15)
    step = rcpd.sgd_step(ops, rcpd.HuberConfig(math.inf, 1.0), m, x)
    assert np.allclose(step, x, atol=1e-10) or ops.distance(step, x) < d


def test_detector_flags_change():
    ops = rcpd.Spd(10)
    stream = rcpd.spd_stream(10, 1000, change_at=500, seed=3)
    g = rcpd.statistic_trajectory(ops, stream, a=1.0, alpha=0.05)
    assert len(g) == 1000 and g[0] == 0.0
    xi = max(g[200:500]) * 1.01
    cfg = rcpd.DetectorConfig(a=1.0, alpha=0.05, xi=xi, policy="halt", warmup=200)
    trace = rcpd.run_detector(ops, cfg, stream)
    flags = [t for t, f in zip(trace["t"], trace["flagged"]) if f]
    assert flags and flags[0] >= 500

    det = rcpd.Detector(ops, cfg, stream[0])
    for x in stream[1:10]:
        gt, flagged = det.update(x)
    assert det.t == 9 and det.g == gt


def test_stream_and_csv_roundtrip(tmp_path):
    pts = rcpd.grassmann_stream(6, 2, 20, change_at=10, seed=1)
    path = str(tmp_path / "s.txt")
    rcpd.write_stream(path, "grassmann", pts)
    back = rcpd.read_stream(path)
    assert back["manifold"] == "grassmann" and back["k"] == 2
    assert all(np.array_equal(a, b) for a, b in zip(pts, back["points"]))

    rows = [
        dict(method="proposed", manifold="spd", xi=xi, arl=100.0 * xi, mdd=5.0 * xi, n_runs=10)
        for xi in (0.5, 1.0, 1.5)
    ]
    csv = str(tmp_path / "bench.csv")
    rcpd.write_bench_csv(csv, rows)
    with open(csv) as f:
        assert f.readline().strip() == rcpd.BENCH_CSV_HEADER
    read = rcpd.read_bench_csv(csv)
    assert [r["xi"] for r in read] == [0.5, 1.0, 1.5]
    assert read[1]["arl"] == 100.0 and read[1]["censored_mdd"] == 0
