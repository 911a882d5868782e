"""Structural property checks shared by ``run_all`` and the test suite.

Each check returns :class:`PropertyResult` records: a measured value, the
tolerance it is held to, and whether it passed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import kernels as K
from . import riccati as R
from .errors import NearSingular
from .grid import (
    FOURIER,
    PHYSICAL,
    Grid1D,
    ft1,
    ift1,
    make_grid,
    symbol_on_grid,
    x_transform,
    x_transform_inv,
)
from .kernels import Kernel2D
from . import scenarios as S


@dataclass(frozen=True)
class PropertyResult:
    name: str
    value: float
    tol: float
    passed: bool

    @classmethod
    def below(cls, name: str, value: float, tol: float) -> "PropertyResult":
        value = float(value)
        return cls(name, value, tol, bool(value <= tol))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} (tol {self.tol:.1e})"


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def _smooth_kernels(grid: Grid1D):
    a = K.from_function(grid, lambda x, y: np.exp(-(x**2) - 0.5 * (y - 0.3) ** 2) * (1 + 0.5j * x))
    b = K.from_function(grid, lambda x, y: np.exp(-0.7 * (x + 0.2) ** 2 - y**2) / np.cosh(x - y))
    c = K.from_function(grid, lambda x, y: np.exp(-((x - y) ** 2) - 0.1 * (x**2 + y**2)))
    return a, b, c


# --- star algebra -------------------------------------------------------------


def star_algebra(grid: Grid1D = None) -> List[PropertyResult]:
    grid = grid or make_grid(20, 64)
    a, b, c = _smooth_kernels(grid)
    ab = K.star(a, b)
    out = [
        PropertyResult.below(
            "star associativity", _rel(K.star(ab, c).values, K.star(a, K.star(b, c)).values), 1e-12
        ),
        PropertyResult.below(
            "delta is a two-sided identity",
            max(
                _rel(K.star(K.delta(grid), a).values, a.values),
                _rel(K.star(a, K.delta(grid)).values, a.values),
            ),
            1e-14,
        ),
        PropertyResult.below(
            "adjoint antihomomorphism",
            _rel(K.adjoint(ab).values, K.star(K.adjoint(b), K.adjoint(a)).values),
            1e-12,
        ),
        PropertyResult.below(
            "transform homomorphism",
            _rel(K.ft2(ab).values, K.star(K.ft2(a), K.ft2(b)).values),
            1e-8,
        ),
    ]
    return out


def det2_forms(grid: Grid1D = None) -> List[PropertyResult]:
    """Product form against the trace series, with hs_norm scaled below 1."""
    grid = grid or make_grid(20, 64)
    _, b, c = _smooth_kernels(grid)
    out = []
    for name, q in (("det2 forms (non-normal)", b), ("det2 forms (hermitian)", c)):
        q = q * (0.6 / K.hs_norm(q))
        out.append(
            PropertyResult.below(name, abs(K.det2(q) - K.det2_trace_series(q, terms=80)), 1e-9)
        )
    return out


def i_hat_limit() -> PropertyResult:
    ts = np.array([0.0, 1e-3, 0.5, 1.0, 7.25])
    err = max(abs(complex(R.i_hat_values(0.0, t)) - t) for t in ts)
    return PropertyResult.below("I^(0; t) = t", err, 0.0)


def unitarity(name: str, samples: int = 50) -> PropertyResult:
    L, M, T, _ = S.DEFAULTS[name]
    prob = S.nls_problem(make_grid(L, M), fourth_order=name == "nls4")
    worst = 0.0
    for t in np.linspace(0.0, T, samples):
        _, q = R.solve_base_aux_odd(prob, t)
        err = K.hs_norm(K.star(q, K.adjoint(q)) - K.delta(prob.grid, FOURIER))
        worst = max(worst, err)
    return PropertyResult.below(f"q^ q^+ = delta over [0, T] ({name})", worst, 1e-8)


# --- PDE residuals ------------------------------------------------------------


def _conv_rhs(grid: Grid1D, g: np.ndarray) -> np.ndarray:
    # d(-D) g - (b(-D) g) conv g with d = D^2, b = 1; spectral convolution
    lin = ift1(grid, symbol_on_grid(S.HEAT, grid)[grid.reflect_index()] * ft1(grid, g))
    conv = np.fft.ifft(np.fft.fft(g) * np.fft.fft(g)) * grid.dx
    # periodic convolution lands on node a + b, shift back to the centered grid
    return lin - np.roll(conv, -grid.M // 2)


def _fkpp_rhs(grid: Grid1D, g: np.ndarray) -> np.ndarray:
    lin = ift1(grid, symbol_on_grid(S.FKPP_D, grid) * ft1(grid, g))
    return lin - g * grid.dx * np.sum(g)


def scenario_flow(name: str):
    """``(solution(t), rhs(g), g0, T, frame)`` for a scenario at its default grid.

    ``frame`` is ``None`` or ``(to_interaction(t, g), nonlinear(g))``.  The
    odd-degree scenarios use it: their unitary linear flow is stiff on the
    grid's high modes, so derivatives are taken of ``exp(i t h) g`` instead,
    which only sees the nonlinear part.
    """
    L, M, T, _ = S.DEFAULTS[name]
    grid = make_grid(L, M)
    if name in ("rd", "kdv"):
        prob = S.rd_problem(grid) if name == "rd" else S.kdv_problem(grid)
        return (lambda t: R.solve_quadratic(prob, t).g.flat), (
            lambda g: prob.rhs(prob.g0.like(g)).flat
        ), prob.g0.flat, T, None
    if name in ("nls", "nls4"):
        prob = S.nls_problem(grid, fourth_order=name == "nls4")
        h = symbol_on_grid(prob.h, grid)[:, None]

        def to_interaction(t, g):
            return x_transform_inv(grid, np.exp(1j * t * h) * x_transform(grid, g))

        def nonlinear(g):
            k = prob.g0.like(g)
            return -K.star(k, K.star_series(prob.f, K.star(k, K.adjoint(k)))).values

        return (lambda t: R.solve_odd(prob, t).g.values), (
            lambda g: prob.rhs(prob.g0.like(g)).values
        ), prob.g0.values, T, (to_interaction, nonlinear)
    g0 = S.line_data(grid)
    if name == "conv":
        return (lambda t: R.conv_riccati_solution(S.HEAT, S.UNIT, g0, t, grid)), (
            lambda g: _conv_rhs(grid, g)
        ), g0, T, None
    return (lambda t: R.fkpp_solution(S.FKPP_D, g0, t, grid, S.UNIT)), (
        lambda g: _fkpp_rhs(grid, g)
    ), g0, T, None


def pde_residual(name: str, dt: float = 1e-4) -> PropertyResult:
    """Centered difference of two Riccati evaluations against the RHS."""
    sol, rhs, _, T, frame = scenario_flow(name)
    t = T / 2
    g = sol(t)
    if frame is None:
        dgdt = (sol(t + dt) - sol(t - dt)) / (2 * dt)
        res = dgdt - rhs(g)
    else:
        to_i, nonlinear = frame
        dgdt = (to_i(t + dt, sol(t + dt)) - to_i(t - dt, sol(t - dt))) / (2 * dt)
        res = dgdt - to_i(t, nonlinear(g))
    return PropertyResult.below(
        f"PDE residual ({name})", np.max(np.abs(res)) / np.max(np.abs(g)), 1e-3
    )


def short_time_ratio(name: str, t0: float = 1e-2) -> List[PropertyResult]:
    """``|g(t) - g0 - t rhs(g0)|`` should scale like ``t^2``."""
    sol, rhs, g0, _, frame = scenario_flow(name)
    if frame is None:
        f0 = rhs(g0)
        errs = [np.max(np.abs(sol(t) - g0 - t * f0)) for t in (t0, t0 / 2, t0 / 4)]
    else:
        to_i, nonlinear = frame
        f0 = nonlinear(g0)
        errs = [np.max(np.abs(to_i(t, sol(t)) - g0 - t * f0)) for t in (t0, t0 / 2, t0 / 4)]
    out = []
    for i in range(2):
        ratio = errs[i] / errs[i + 1]
        out.append(
            PropertyResult(
                f"O(t^2) ratio {i + 1} ({name})", ratio, 0.8, bool(abs(ratio - 4) <= 0.8)
            )
        )
    return out


def near_singular() -> PropertyResult:
    """Rank-one ``Q'`` with eigenvalue exactly -1 must be refused."""
    grid = make_grid(20, 64)
    phi = np.exp(-grid.x**2)
    w = grid.dx
    qp = Kernel2D(grid, PHYSICAL, -np.outer(phi, phi) / (w * np.sum(phi**2)))
    p = K.from_function(grid, lambda x, y: np.exp(-(x**2) - y**2))
    try:
        R.solve_fredholm_physical(p, qp)
    except NearSingular:
        return PropertyResult("rank-one eigenvalue -1 raises NearSingular", 1.0, 1.0, True)
    return PropertyResult("rank-one eigenvalue -1 raises NearSingular", 0.0, 1.0, False)


def all_properties(log: Callable[[str], None] = None) -> List[PropertyResult]:
    """Run the whole structural suite (roughly half a minute)."""
    results: List[PropertyResult] = []

    def add(items):
        items = items if isinstance(items, list) else [items]
        for r in items:
            results.append(r)
            if log is not None:
                log(r.line())

    add(star_algebra())
    add(det2_forms())
    add(i_hat_limit())
    add(unitarity("nls"))
    add(unitarity("nls4"))
    for name in S.SCENARIOS:
        add(pde_residual(name))
    for name in S.SCENARIOS:
        add(short_time_ratio(name))
    add(near_singular())
    return results
