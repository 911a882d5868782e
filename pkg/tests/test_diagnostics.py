import numpy as np
import pytest

from riccati_pde import diagnostics as Dg
from riccati_pde import kernels as K
from riccati_pde import scenarios as S
from riccati_pde.grid import make_grid
from riccati_pde.kernels import BlockKernel, Kernel2D


def test_compare_identical_and_constant(grid64, rng):
    a = Kernel2D(grid64, "physical", rng.standard_normal((64, 64)) + 0j)
    assert Dg.compare(a, a) == (0.0, 0.0)
    c = 0.3 - 0.4j
    sup, mean = Dg.compare(a, a + Kernel2D(grid64, "physical", np.full((64, 64), c)))
    assert sup == pytest.approx(0.5) and mean == pytest.approx(0.5)


def test_compare_blocks_is_euclidean(grid64):
    z = K.zeros(grid64)
    one = Kernel2D(grid64, "physical", np.full((64, 64), 3.0 + 0j))
    two = Kernel2D(grid64, "physical", np.full((64, 64), 4.0 + 0j))
    sup, means = Dg.compare_components(BlockKernel.bisymmetric(z, z), BlockKernel.bisymmetric(one, two))
    assert sup == pytest.approx(5.0)
    assert means == (3.0, 4.0)
    with pytest.raises(ValueError):
        Dg.compare(z, np.zeros((32, 32)))


def test_trace_starts_at_one_and_is_stride_independent():
    grid = make_grid(40, 64)
    prob = S.kdv_problem(grid)
    coarse = Dg.trace_determinant(prob, [0.0, 0.5, 1.0])
    fine = Dg.trace_determinant(prob, np.linspace(0.0, 1.0, 5))
    assert coarse[0].det2 == 1.0 and coarse[0].hs == 0.0
    assert coarse[1].det2 == fine[2].det2 and coarse[2].hs == fine[4].hs
    with pytest.raises(ValueError):
        Dg.trace_determinant(prob, [0.5, 0.1])


def test_odd_trace_records_plain_determinant():
    prob = S.nls_problem(make_grid(20, 64))
    tr = Dg.trace_determinant(prob, Dg.sample_times(0.02, 5))
    assert len(tr) == 5
    assert all(abs(abs(p.det) - 1) <= 1e-10 for p in tr)


def _report(name="toy", comps=None, trace=None):
    grid = make_grid(20, 8)
    rng = np.random.default_rng(0)
    if comps is None:
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        comps = [("g", a, a + 1e-3 * rng.standard_normal((8, 8)))]
    sup, means = Dg.compare_components([c[2] for c in comps], [c[1] for c in comps])
    return Dg.ComparisonReport(
        name, grid, 0.5, 1e-3, sup, means, comps, trace or [], {"riccati": 0.1, "direct": 0.2}
    )


def test_csv_round_trip_is_exact(tmp_path):
    rep = _report()
    Dg.emit_csv(rep, str(tmp_path))
    header, data = Dg.read_solution_csv(str(tmp_path / "solution_toy.csv"))
    assert header == ["x", "y", "re_gR", "im_gR", "re_gD", "im_gD", "abs_diff"]
    gR, gD = rep.components[0][1], rep.components[0][2]
    assert np.array_equal(data[:, 2] + 1j * data[:, 3], gR.ravel())
    assert np.array_equal(data[:, 4] + 1j * data[:, 5], gD.ravel())
    # row-major in x then y
    assert data[1, 0] == data[0, 0] and data[1, 1] > data[0, 1]


def test_empty_trace_has_header_only(tmp_path):
    Dg.emit_csv(_report(), str(tmp_path))
    assert (tmp_path / "trace_toy.csv").read_text() == "t,det2_re,det2_im,det2_abs,hs_norm\n"


def test_summary_and_component_files(tmp_path):
    a, b = np.ones((8, 8)), np.zeros((8, 8))
    rep = _report("rd", comps=[("u", a, b), ("v", b, 2 * a)])
    rep.trace.append(Dg.TracePoint(0.0, 1 + 0j, 0.0))
    paths = Dg.emit_csv(rep, str(tmp_path))
    names = sorted(p.split("/")[-1] for p in paths)
    assert names == ["plot_rd.gp", "solution_rd_u.csv", "solution_rd_v.csv", "summary_rd.txt", "trace_rd.csv"]
    summary = dict(
        line.split("=", 1) for line in (tmp_path / "summary_rd.txt").read_text().splitlines()
    )
    assert float(summary["mean_abs_error"]) == 1.0
    assert float(summary["mean_abs_error_2"]) == 2.0
    assert float(summary["sup_error"]) == pytest.approx(np.sqrt(5))
    for key in ("scenario", "L", "M", "T", "dt", "runtime_riccati_s", "runtime_direct_s"):
        assert key in summary
    assert "solution_rd_u.csv" in (tmp_path / "plot_rd.gp").read_text()


def test_one_dimensional_schema(tmp_path):
    x = np.linspace(0, 1, 8)
    Dg.emit_csv(_report("line", comps=[("g", x + 0j, x + 0j)]), str(tmp_path))
    header, data = Dg.read_solution_csv(str(tmp_path / "solution_line.csv"))
    assert header[0] == "x" and "y" not in header and data.shape == (8, 6)


def test_emit_reports_path_on_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        Dg.emit_csv(_report(), str(blocker / "sub"))


def test_report_invariant():
    with pytest.raises(ValueError):
        Dg.ComparisonReport("bad", make_grid(20, 8), 1.0, 0.1, 0.1, (0.2,), [])
