"""Error metrics, determinant traces and report emission."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels as K
from .grid import FOURIER, Grid1D
from .kernels import BlockKernel, Kernel2D
from .riccati import OddDegreeProblem, QuadraticProblem, solve_aux_quadratic, solve_base_aux_odd

FLOAT_FMT = "%.17g"


@dataclass
class TracePoint:
    t: float
    det2: complex
    hs: float
    det: Optional[complex] = None  # plain determinant of Q^, odd-degree only


@dataclass
class ComparisonReport:
    """Everything a scenario run produces.

    ``components`` holds ``(label, gR, gD)`` array triples, 2D ``(M, M)`` or
    1D ``(M,)``.  ``mean_abs_error`` has one entry per component.
    """

    name: str
    grid: Grid1D
    T: float
    dt: float
    sup_error: float
    mean_abs_error: Tuple[float, ...]
    components: List[Tuple[str, np.ndarray, np.ndarray]]
    trace: List[TracePoint] = field(default_factory=list)
    runtimes: Dict[str, float] = field(default_factory=dict)
    extra: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.sup_error >= max(self.mean_abs_error, default=0.0) - 1e-300:
            raise ValueError("sup error below mean error")

    @property
    def det2_trace(self) -> List[Tuple[float, complex]]:
        return [(p.t, p.det2) for p in self.trace]

    @property
    def hs_trace(self) -> List[Tuple[float, float]]:
        return [(p.t, p.hs) for p in self.trace]

    def scalars(self) -> Dict[str, object]:
        out = {
            "scenario": self.name,
            "L": self.grid.L,
            "M": self.grid.M,
            "T": self.T,
            "dt": self.dt,
            "sup_error": self.sup_error,
            "mean_abs_error": self.mean_abs_error[0],
        }
        for i, v in enumerate(self.mean_abs_error[1:], start=2):
            out[f"mean_abs_error_{i}"] = v
        out["runtime_riccati_s"] = self.runtimes.get("riccati", float("nan"))
        out["runtime_direct_s"] = self.runtimes.get("direct", float("nan"))
        out.update(self.extra)
        return out


# --- metrics ----------------------------------------------------------------


def components(g) -> List[np.ndarray]:
    """Independent components of a solution.

    A bisymmetric block kernel has two (``g11``, ``g12``); a general block
    kernel contributes every block.
    """
    if isinstance(g, Kernel2D):
        return [g.values]
    if isinstance(g, BlockKernel):
        if g.n == 2 and g.is_bisymmetric:
            return [g.blocks[0, 0], g.blocks[0, 1]]
        return [g.blocks[i, j] for i in range(g.n) for j in range(g.n)]
    if isinstance(g, (list, tuple)):
        return [np.asarray(c) for c in g]
    return [np.asarray(g)]


def compare_components(gD, gR) -> Tuple[float, Tuple[float, ...]]:
    """Sup of the pointwise Euclidean error and per-component mean abs errors."""
    cd, cr = components(gD), components(gR)
    if len(cd) != len(cr) or any(a.shape != b.shape for a, b in zip(cd, cr)):
        raise ValueError("solutions have mismatched shapes")
    diffs = [np.abs(a - b) for a, b in zip(cd, cr)]
    sup = float(np.max(np.sqrt(sum(d**2 for d in diffs))))
    return sup, tuple(float(np.mean(d)) for d in diffs)


def compare(gD, gR) -> Tuple[float, float]:
    """``(sup_error, mean_abs_error)``; the mean runs over all components."""
    sup, means = compare_components(gD, gR)
    return sup, float(np.mean(means))


# --- determinant traces -------------------------------------------------------


def sample_times(T: float, n: int) -> np.ndarray:
    return np.linspace(0.0, T, max(2, int(n)))


def trace_determinant(prob, times: Sequence[float]) -> List[TracePoint]:
    """det2 and Hilbert-Schmidt norm of ``Q'`` at each sample time.

    Every point comes from the closed forms, so the trace does not depend on
    how densely it is sampled.  Odd-degree problems are traced in Fourier
    space and also record the plain Fredholm determinant.
    """
    times = list(times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted")
    out = []
    for t in times:
        if isinstance(prob, OddDegreeProblem):
            _, q_hat = solve_base_aux_odd(prob, t)
            qp = q_hat - K.delta(prob.grid, FOURIER)
            lam = K.operator_eigenvalues(qp)
            out.append(
                TracePoint(t, K.det2(qp, lam), K.hs_norm(qp), K.fredholm_det(qp, lam))
            )
        elif isinstance(prob, QuadraticProblem):
            qp = solve_aux_quadratic(prob, t)
            out.append(TracePoint(t, K.det2(qp), K.hs_norm(qp)))
        else:
            raise TypeError(f"cannot trace {type(prob).__name__}")
    return out


# --- emission ---------------------------------------------------------------


def _path(directory: str, name: str) -> str:
    return os.path.join(directory, name)


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _solution_table(grid: Grid1D, gR: np.ndarray, gD: np.ndarray) -> Tuple[str, np.ndarray]:
    gR = np.asarray(gR, dtype=complex)
    gD = np.asarray(gD, dtype=complex)
    diff = np.abs(gR - gD).ravel()
    cols = [gR.real.ravel(), gR.imag.ravel(), gD.real.ravel(), gD.imag.ravel(), diff]
    if gR.ndim == 1:
        return "x,re_gR,im_gR,re_gD,im_gD,abs_diff", np.column_stack([grid.x] + cols)
    X, Y = np.meshgrid(grid.x, grid.x, indexing="ij")  # row-major in x then y
    return "x,y,re_gR,im_gR,re_gD,im_gD,abs_diff", np.column_stack(
        [X.ravel(), Y.ravel()] + cols
    )


def format_rows(data: np.ndarray) -> str:
    return "".join(",".join(FLOAT_FMT % v for v in row) + "\n" for row in data)


def solution_filenames(report: ComparisonReport) -> List[str]:
    if len(report.components) == 1:
        return [f"solution_{report.name}.csv"]
    return [f"solution_{report.name}_{label}.csv" for label, _, _ in report.components]


def emit_csv(report: ComparisonReport, directory: str) -> List[str]:
    """Write solution, trace, summary and plot files; returns their paths."""
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {directory}: {exc}") from exc
    written = []
    for fname, (_, gR, gD) in zip(solution_filenames(report), report.components):
        header, data = _solution_table(report.grid, gR, gD)
        path = _path(directory, fname)
        _write(path, header + "\n" + format_rows(data))
        written.append(path)

    # Odd-degree traces carry the plain determinant of the unitary Q^, which
    # is the quantity plotted for those scenarios; the regularized modulus
    # goes in a trailing column.
    has_det = any(p.det is not None for p in report.trace)
    header = "t,det2_re,det2_im,det2_abs,hs_norm" + (",det2_regularized_abs" if has_det else "")
    rows = []
    for p in report.trace:
        d = p.det if has_det else p.det2
        vals = [p.t, d.real, d.imag, abs(d), p.hs]
        if has_det:
            vals.append(abs(p.det2))
        rows.append(vals)
    path = _path(directory, f"trace_{report.name}.csv")
    _write(path, header + "\n" + (format_rows(np.array(rows)) if rows else ""))
    written.append(path)

    lines = []
    for key, val in report.scalars().items():
        if isinstance(val, float):
            val = FLOAT_FMT % val
        lines.append(f"{key}={val}\n")
    path = _path(directory, f"summary_{report.name}.txt")
    _write(path, "".join(lines))
    written.append(path)

    path = _path(directory, f"plot_{report.name}.gp")
    _write(path, gnuplot_script(report))
    written.append(path)
    return written


def read_solution_csv(path: str) -> Tuple[List[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def gnuplot_script(report: ComparisonReport) -> str:
    """Panel layout: direct solution, Riccati solution, and their difference
    for every component, then the det2 / HS-norm traces."""
    name = report.name
    files = solution_filenames(report)
    one_d = report.components[0][1].ndim == 1
    rows = len(files) + 1
    out = [
        "# gnuplot -p " + f"plot_{name}.gp",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set terminal pngcairo size 1200,{350 * rows}",
        f"set output '{name}.png'",
        f"set multiplot layout {rows},3 title '{name}: T={report.T:g}'",
    ]
    if not one_d:
        out += ["set view map", "set pm3d at b", "unset surface", "set size square"]
    for fname in files:
        for col, title in ((5, "Re g_D"), (3, "Re g_R"), (7, "|g_R - g_D|")):
            out.append(f"set title '{title} ({fname})'")
            if one_d:
                out.append(f"plot '{fname}' using 1:{col - 1} with lines notitle")
            else:
                out.append(f"splot '{fname}' using 1:2:{col} with pm3d notitle")
    if not one_d:
        out += ["unset view", "unset pm3d", "set surface", "set size nosquare"]
    trace = f"trace_{name}.csv"
    out += [
        "set title 'det2 (real, imag)'",
        f"plot '{trace}' using 1:2 with lines, '' using 1:3 with lines",
        "set title '|det2|'",
        f"plot '{trace}' using 1:4 with lines",
        "set title 'HS norm of Q prime'",
        f"plot '{trace}' using 1:5 with lines",
        "unset multiplot",
        "",
    ]
    return "\n".join(out)
