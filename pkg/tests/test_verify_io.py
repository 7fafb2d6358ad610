import json

import numpy as np
import pytest

from gsforge import golden, io, verify
from gsforge.parallel import chunked_map, thread_count


def test_d1_d2_exact_on_quadratics():
    x = np.linspace(0, 1, 11)
    f = np.tile(3 * x**2 - x, (4, 1)).T
    assert np.allclose(verify.d1(f, 0.1, 0), np.tile(6 * x - 1, (4, 1)).T, atol=1e-12)
    assert np.allclose(verify.d2(f, 0.1, 0), 6.0, atol=1e-10)


def test_convergence_study():
    hs = [0.1, 0.05, 0.025]
    res = [2 * h**2 for h in hs]
    c = verify.convergence_study(hs, res)
    assert c.order == pytest.approx(2.0) and c.monotone
    with pytest.raises(ValueError):
        verify.convergence_study(hs[:2], res[:2])
    rep = verify.convergence_report("x", hs, [1.0, 2.0, 1.0])
    assert not rep.passed


def test_report_json_round_trip():
    r = verify.ResidualReport("div", 0.01, 1e-8, 1e-9, 2.01, True)
    d = json.loads(r.dumps())
    assert d["pass"] is True
    assert verify.ResidualReport.from_dict(d) == r


def test_gs_operator_rejects_axis():
    with pytest.raises(ValueError):
        verify.gs_operator(np.zeros((5, 5)), np.linspace(0, 1, 5), 0.25, 0.25)


def test_csv_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(7, 5)) * 10.0 ** rng.integers(-30, 30, (7, 5))
    io.write_csv_grid(tmp_path / "f.csv", (np.arange(7.0), np.arange(5.0)), ("x", "y"), {"a": a})
    back = io.read_csv(tmp_path / "f.csv")
    assert list(back) == ["x", "y", "a"]
    assert np.array_equal(back["a"], a.ravel())


def test_json_deterministic_and_inf(tmp_path):
    obj = {"b": np.float64(1 / 3), "a": [np.inf, 1], "c": np.bool_(True)}
    assert io.dumps(obj) == io.dumps(dict(reversed(list(obj.items()))))
    assert json.loads(io.dumps(obj))["a"][0] == "inf"


def test_vtk_conformance(tmp_path):
    n1, n2 = 4, 3
    pts = np.zeros((n1, n2, 3))
    pts[..., 0] = np.arange(n1)[:, None]
    pts[..., 1] = np.arange(n2)[None, :]
    path = io.export_grid(tmp_path / "g", "vtk", (np.arange(float(n1)), np.arange(float(n2))), ("x", "y"),
                          {"s": pts[..., 0] * 10 + pts[..., 1]}, {"v": np.ones((n1, n2, 2))})
    info = io.check_vtk(path)
    assert info == {"dimensions": (4, 3, 1), "arrays": ["s", "v"]}
    lines = path.read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    # first index fastest: second point is (1, 0, 0)
    assert lines[7] == "1.0 0.0 0.0"


def test_export_rejects(tmp_path):
    with pytest.raises(ValueError):
        io.export_grid(tmp_path / "g", "xml", (np.arange(2.0), np.arange(2.0)), ("x", "y"), {"a": np.zeros((2, 2))})
    with pytest.raises(ValueError):
        io.export_grid(tmp_path / "g", "csv", (np.arange(2.0), np.arange(2.0)), ("x", "y"), {})
    with pytest.raises(ValueError):
        io.write_csv(tmp_path / "e.csv", {"a": np.zeros(0)})


def test_thread_count(monkeypatch):
    monkeypatch.delenv("GSFORGE_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("GSFORGE_THREADS", "3")
    assert thread_count() == 3 and thread_count(8) == 3
    monkeypatch.setenv("GSFORGE_THREADS", "zero")
    with pytest.raises(ValueError):
        thread_count()


def test_chunked_map_order_independent_of_threads(monkeypatch):
    rows = np.arange(10000.0)
    monkeypatch.setenv("GSFORGE_THREADS", "4")
    a = np.concatenate(chunked_map(lambda r: r**2, rows, threads=4, chunk=333))
    b = np.concatenate(chunked_map(lambda r: r**2, rows, threads=1, chunk=333))
    assert np.array_equal(a, b)


def test_golden_values_reproduce():
    reports = golden.compare(golden.compute_golden(), golden.load_golden())
    assert all(r.passed for r in reports), [r.equation for r in reports if not r.passed]
