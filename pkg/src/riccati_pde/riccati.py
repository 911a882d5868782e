"""Solution generator: closed-form linear flows plus one Fredholm solve.

Time is only a parameter here.  For each requested ``t`` the base and
auxiliary equations are evaluated in closed form and the Riccati relation
``P = G Q`` is solved once; nothing is stepped in time.

Quadratic problems (``dG/dt = d G - G (b G)``) are solved in physical space,
odd-degree problems (``dG/dt = -i h G - G f(G G^+)``) in Fourier space.

Convolutional case
------------------
With ``p(y) = int g(z) q(z + y) dz`` the relation is a correlation, so its
transform reads ``p^(k) = g^(-k) q^(k)``.  Starting from ``q(., 0) = delta``
forces ``p(y, 0) = g0(-y)``; the generated equation is

    dg/dt = d(-D) g - (b(-D) g) conv g,

whose transform is the logistic ODE
``dg^/dt = d(-D)^ g^ - b(-D)^ g^^2`` for every mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np
import scipy.linalg as sla

from . import kernels as K
from .errors import NearSingular, PoleEncountered
from .grid import (
    DIFFUSIVE,
    DISPERSIVE,
    FOURIER,
    PHYSICAL,
    Grid1D,
    Symbol,
    ft1,
    ift1,
    symbol_eval,
    symbol_on_grid,
    x_transform,
    x_transform_inv,
    y_transform,
)
from .kernels import AnyKernel, BlockKernel, Kernel2D, StarSeries

DET2_THRESHOLD = 1e-6
COND_THRESHOLD = 1e12
POLE_THRESHOLD = 1e-12
OVERFLOW_GUARD = 1e300

_PHI1_SWITCH = 1e-2
_PHI1_TAYLOR = 1.0 / np.array([np.prod(np.arange(2, n + 2, dtype=float)) for n in range(12)])


def phi1(z):
    """``(exp(z) - 1) / z`` with the removable singularity at 0 filled in."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < _PHI1_SWITCH
    zs = z[small]
    acc = np.zeros_like(zs) + _PHI1_TAYLOR[-1]
    for c in _PHI1_TAYLOR[-2::-1]:
        acc = acc * zs + c
    out[small] = acc
    zl = z[~small]
    out[~small] = np.expm1(zl) / zl
    return out


def i_hat_values(dvals, t: float):
    """``(exp(dvals t) - 1) / dvals``; equals ``t`` where ``dvals == 0``."""
    return t * phi1(np.asarray(dvals) * t)


def i_hat(d: Symbol, k, t: float):
    """``I^(k; t) = (exp(d(2 pi i k) t) - 1) / d(2 pi i k)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return i_hat_values(symbol_eval(d, k), t)


# --- operators acting on the first variable --------------------------------


@dataclass(frozen=True)
class Multiplier:
    """Bounded multiplication operator ``b(x)``."""

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "b(x)"

    def on_grid(self, grid: Grid1D) -> np.ndarray:
        return np.asarray(self.func(grid.x), dtype=complex)


def gaussian_multiplier(sigma: float) -> Multiplier:
    """Zero-mean normal density ``N(x, sigma)``."""
    return Multiplier(
        lambda x: np.exp(-0.5 * (x / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi)),
        name=f"N(x,{sigma})",
    )


Operator = Union[Symbol, Multiplier, None]


def apply_x_operator(op: Operator, values: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Apply ``op`` to the first variable of kernel values (physical space)."""
    if op is None:
        return np.zeros_like(values, dtype=complex)
    if isinstance(op, Multiplier):
        return op.on_grid(grid)[:, None] * values
    mult = symbol_on_grid(op, grid)
    return x_transform_inv(grid, mult[:, None] * x_transform(grid, values))


def _as_block(obj):
    if isinstance(obj, (Symbol, Multiplier)) or obj is None:
        return [[obj]]
    rows = [list(r) for r in obj]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("operator blocks must be square")
    return rows


def _is_bisymmetric(ops) -> bool:
    return len(ops) == 2 and ops[0][0] == ops[1][1] and ops[0][1] == ops[1][0]


def _symbol_matrix(d_ops, grid: Grid1D) -> np.ndarray:
    """``(M, n, n)`` array of symbol values at every grid frequency."""
    n = len(d_ops)
    out = np.zeros((grid.M, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            op = d_ops[i][j]
            if op is None:
                continue
            if not isinstance(op, Symbol):
                raise TypeError("the linear operator d must be built from symbols")
            out[:, i, j] = symbol_on_grid(op, grid)
    return out


def linear_flow_factors(d_ops, grid: Grid1D, t: float):
    """``exp(D t)`` and ``int_0^t exp(D s) ds`` for each frequency.

    Returns two ``(M, n, n)`` arrays.  Bisymmetric 2x2 blocks are
    diagonalized exactly in the sum/difference basis; other block shapes go
    through the augmented matrix exponential
    ``expm([[D t, t I], [0, 0]]) = [[exp(D t), int_0^t exp(D s) ds], ...]``.
    """
    D = _symbol_matrix(d_ops, grid)
    n = D.shape[1]
    if n == 1:
        return np.exp(D * t), i_hat_values(D, t)
    if _is_bisymmetric(d_ops):
        plus = D[:, 0, 0] + D[:, 0, 1]
        minus = D[:, 0, 0] - D[:, 0, 1]
        ep, em = np.exp(plus * t), np.exp(minus * t)
        ip, im = i_hat_values(plus, t), i_hat_values(minus, t)
        E = 0.5 * np.array([[ep + em, ep - em], [ep - em, ep + em]]).transpose(2, 0, 1)
        I = 0.5 * np.array([[ip + im, ip - im], [ip - im, ip + im]]).transpose(2, 0, 1)
        return E, I
    aug = np.zeros((grid.M, 2 * n, 2 * n), dtype=complex)
    aug[:, :n, :n] = D * t
    aug[:, :n, n:] = t * np.eye(n)
    big = sla.expm(aug)
    return big[:, :n, :n], big[:, :n, n:]


def _blocks_of(kernel: AnyKernel) -> np.ndarray:
    if isinstance(kernel, Kernel2D):
        return kernel.values[None, None]
    return kernel.blocks


def _wrap_blocks(template: AnyKernel, space: str, blocks: np.ndarray) -> AnyKernel:
    if isinstance(template, Kernel2D):
        return Kernel2D(template.grid, space, blocks[0, 0])
    return BlockKernel(template.grid, space, blocks)


def _apply_row_matrix(factor: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    """``out[i, j](k, :) = sum_l factor[k, i, l] * blocks[l, j](k, :)``."""
    return np.einsum("kil,ljkc->ijkc", factor, blocks)


# --- quadratic problems ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadraticProblem:
    """``dg/dt = d(D) g - g * (b g)`` with ``g(0) = g0``.

    ``d`` is a :class:`Symbol` or an ``n x n`` nested sequence of them; ``b``
    is a :class:`Symbol`, a :class:`Multiplier`, or an ``n x n`` nested
    sequence of those (``None`` for zero entries).
    """

    d: object
    b: object
    g0: AnyKernel

    def __post_init__(self):
        d_ops, b_ops = _as_block(self.d), _as_block(self.b)
        n = self.g0.n
        if len(d_ops) != n or len(b_ops) != n:
            raise ValueError("operator block size does not match initial data")
        if self.g0.space != PHYSICAL:
            raise ValueError("initial data must be a physical-space kernel")
        for row in d_ops:
            for op in row:
                if op is not None and not isinstance(op, Symbol):
                    raise TypeError("d entries must be Symbols")
        diag_class = {d_ops[i][i].classification for i in range(n)}
        if not diag_class <= {DIFFUSIVE, DISPERSIVE}:
            raise ValueError(
                "d must be of diffusive or dispersive type for Hilbert-Schmidt solutions"
            )
        object.__setattr__(self, "_d_ops", d_ops)
        object.__setattr__(self, "_b_ops", b_ops)

    @property
    def grid(self) -> Grid1D:
        return self.g0.grid

    @property
    def n(self) -> int:
        return self.g0.n

    @property
    def d_ops(self):
        return self._d_ops

    @property
    def b_ops(self):
        return self._b_ops

    @cached_property
    def p0_hat(self) -> np.ndarray:
        return x_transform(self.grid, _blocks_of(self.g0))

    def apply_d(self, g: AnyKernel) -> AnyKernel:
        return _apply_block_ops(self.d_ops, g)

    def apply_b(self, g: AnyKernel) -> AnyKernel:
        return _apply_block_ops(self.b_ops, g)

    def rhs(self, g: AnyKernel) -> AnyKernel:
        """Right-hand side ``d g - g * (b g)`` of the target equation."""
        return self.apply_d(g) - K.star(g, self.apply_b(g))


def _apply_block_ops(ops, g: AnyKernel) -> AnyKernel:
    blocks = _blocks_of(g)
    n = blocks.shape[0]
    out = np.zeros_like(blocks, dtype=complex)
    for i in range(n):
        for l in range(n):
            if ops[i][l] is None:
                continue
            for j in range(n):
                out[i, j] += apply_x_operator(ops[i][l], blocks[l, j], g.grid)
    return _wrap_blocks(g, g.space, out)


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    t: float
    g: AnyKernel
    p: AnyKernel
    q: AnyKernel
    det2: complex
    hs: float
    residual: float
    det: Optional[complex] = None


def solve_base_quadratic(prob: QuadraticProblem, t: float) -> AnyKernel:
    """Base flow ``p(t) = exp(d t) p0``, returned in (x-transformed) Fourier form.

    The result is tagged ``fourier``: rows are indexed by the frequency of
    the first variable; the second variable is also transformed (``ft2``).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    E, _ = linear_flow_factors(prob.d_ops, prob.grid, t)
    if np.max(np.abs(E)) > OVERFLOW_GUARD:
        raise OverflowError("linear flow overflowed; is d really diffusive/dispersive?")
    blocks = _apply_row_matrix(E, prob.p0_hat)
    return _to_fourier(prob.g0, blocks)


def _to_fourier(template, x_hat_blocks):
    return _wrap_blocks(template, FOURIER, y_transform(template.grid, x_hat_blocks))


def _physical_from_x_hat(template, x_hat_blocks):
    return _wrap_blocks(template, PHYSICAL, x_transform_inv(template.grid, x_hat_blocks))


def base_physical(prob: QuadraticProblem, t: float) -> AnyKernel:
    E, _ = linear_flow_factors(prob.d_ops, prob.grid, t)
    if np.max(np.abs(E)) > OVERFLOW_GUARD:
        raise OverflowError("linear flow overflowed; is d really diffusive/dispersive?")
    return _physical_from_x_hat(prob.g0, _apply_row_matrix(E, prob.p0_hat))


def solve_aux_quadratic(prob: QuadraticProblem, t: float) -> AnyKernel:
    """Auxiliary flow ``q'(t) = b int_0^t p(s) ds`` in physical space."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    _, I = linear_flow_factors(prob.d_ops, prob.grid, t)
    integrated = _physical_from_x_hat(prob.g0, _apply_row_matrix(I, prob.p0_hat))
    return prob.apply_b(integrated)


def _condition_number(lu_piv, norm1) -> float:
    lu, _ = lu_piv
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, norm1, norm="1")
    return np.inf if rcond == 0 else 1.0 / rcond


def _fredholm_solve(A: np.ndarray, P: np.ndarray, det2_value: complex):
    """Solve ``G A = P`` through the transposed system; return ``(G, residual)``."""
    if abs(det2_value) < DET2_THRESHOLD:
        raise NearSingular(
            f"|det2| = {abs(det2_value):.3e} below {DET2_THRESHOLD:g}", det2=det2_value
        )
    At = A.T
    lu_piv = sla.lu_factor(At, check_finite=False)
    cond = _condition_number(lu_piv, np.linalg.norm(At, 1))
    if cond > COND_THRESHOLD:
        raise NearSingular(
            f"condition estimate {cond:.3e} above {COND_THRESHOLD:g}",
            det2=det2_value,
            cond=cond,
        )
    G = sla.lu_solve(lu_piv, P.T, check_finite=False).T
    scale = np.linalg.norm(P) or 1.0
    residual = float(np.linalg.norm(G @ A - P) / scale)
    return G, residual


def solve_fredholm_physical(p: AnyKernel, qprime: AnyKernel, det2_value=None):
    """Solve ``p = g + g * q'``; returns ``(g, relative residual)``.

    Raises :class:`NearSingular` when ``|det2(id + Q')|`` is below
    ``DET2_THRESHOLD`` or the system is too badly conditioned.
    """
    K._check_compatible(p, qprime)
    if det2_value is None:
        det2_value = K.det2(qprime)
    A = np.eye(qprime.flat.shape[0]) + K.operator_matrix(qprime)
    G, residual = _fredholm_solve(A, p.flat, det2_value)
    return p.like(G), residual


def solve_quadratic(prob: QuadraticProblem, t: float) -> RiccatiSolution:
    """``g(t)`` from the closed forms for ``p``, ``q'`` and one Fredholm solve."""
    p = base_physical(prob, t)
    qprime = solve_aux_quadratic(prob, t)
    d2 = K.det2(qprime)
    g, residual = solve_fredholm_physical(p, qprime, d2)
    return RiccatiSolution(t, g, p, qprime, d2, K.hs_norm(qprime), residual)


# --- odd-degree problems ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class OddDegreeProblem:
    """``dg/dt = -i h(D) g - g * f(g * g^+)`` with ``f = i sum alpha_m x^m``.

    For ``f(x) = i x`` this is ``i dg/dt = h(D) g + g * g * g^+``.
    """

    h: Symbol
    f: StarSeries
    g0: Kernel2D

    def __post_init__(self):
        if not self.h.even_only:
            raise ValueError("h must contain even-degree terms only")
        if self.g0.space != PHYSICAL:
            raise ValueError("initial data must be a physical-space kernel")

    @property
    def grid(self) -> Grid1D:
        return self.g0.grid

    @cached_property
    def h_values(self) -> np.ndarray:
        return symbol_on_grid(self.h, self.grid)

    @cached_property
    def p0_hat(self) -> Kernel2D:
        return K.ft2(self.g0)

    @cached_property
    def generator(self) -> np.ndarray:
        """Operator matrix of ``f^(p0^ * p0^+) + i h delta`` (Fourier space)."""
        p0 = self.p0_hat
        c0 = K.star(p0, K.adjoint(p0))
        F = K.operator_matrix(K.star_series(self.f, c0))
        return F + 1j * np.diag(self.h_values)

    def rhs(self, g: Kernel2D) -> Kernel2D:
        lin = Kernel2D(g.grid, g.space, apply_x_operator(self.h, g.values, g.grid))
        c = K.star(g, K.adjoint(g))
        return -1j * lin - K.star(g, K.star_series(self.f, c))


def solve_base_aux_odd(prob: OddDegreeProblem, t: float):
    """Closed forms ``(p^(t), q^(t))`` in Fourier space."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    grid = prob.grid
    phase = np.exp(-1j * t * prob.h_values)
    p_hat = Kernel2D(grid, FOURIER, phase[:, None] * prob.p0_hat.values)
    theta = sla.expm(t * prob.generator)
    q_op = phase[:, None] * theta
    q_hat = Kernel2D(grid, FOURIER, q_op / grid.dk)
    return p_hat, q_hat


def solve_fredholm_fourier(p_hat: Kernel2D, q_hat: Kernel2D, det2_value=None):
    """Solve ``p^ = g^ * q^``; returns ``(g^, relative residual)``."""
    K._check_compatible(p_hat, q_hat)
    if det2_value is None:
        det2_value = K.det2(q_hat - K.delta(q_hat.grid, q_hat.space))
    A = K.operator_matrix(q_hat)
    G, residual = _fredholm_solve(A, p_hat.values, det2_value)
    return p_hat.like(G), residual


def solve_odd(prob: OddDegreeProblem, t: float) -> RiccatiSolution:
    p_hat, q_hat = solve_base_aux_odd(prob, t)
    qprime = q_hat - K.delta(prob.grid, FOURIER)
    lam = K.operator_eigenvalues(qprime)
    d2 = K.det2(qprime, lam)
    g_hat, residual = solve_fredholm_fourier(p_hat, q_hat, d2)
    return RiccatiSolution(
        t,
        K.ift2(g_hat),
        p_hat,
        q_hat,
        d2,
        K.hs_norm(qprime),
        residual,
        det=K.fredholm_det(qprime, lam),
    )


# --- scalar special cases on the line ----------------------------------------


def fkpp_qbar(d: Symbol, g0: np.ndarray, grid: Grid1D, t: float, b: Optional[Symbol] = None):
    """``qbar(t) = 1 + b(0) I^(0; t) g0^(0)``."""
    b0 = 1.0 if b is None else complex(b(0.0))
    mass = grid.dx * np.sum(g0)
    return 1.0 + b0 * complex(i_hat_values(complex(d(0.0)), t)) * mass


def fkpp_solution(
    d: Symbol, g0: np.ndarray, t: float, grid: Grid1D, b: Optional[Symbol] = None
) -> np.ndarray:
    """Explicit solution of ``dg/dt = d(D) g - g int b(D) g dz``.

    ``g = p / qbar`` with ``p^(k; t) = exp(d t) g0^`` and the scalar
    ``qbar`` from :func:`fkpp_qbar`.
    """
    g0 = np.asarray(g0, dtype=complex)
    qbar = fkpp_qbar(d, g0, grid, t, b)
    if abs(qbar) < POLE_THRESHOLD:
        raise PoleEncountered(f"qbar({t}) = {qbar:.3e}: the solution blows up")
    p_hat = np.exp(symbol_on_grid(d, grid) * t) * ft1(grid, g0)
    return ift1(grid, p_hat) / qbar


def conv_base_aux(d: Symbol, b: Symbol, g0: np.ndarray, t: float, grid: Grid1D):
    """Transformed base and auxiliary data ``(p^(k; t), q^(k; t))`` of the
    convolutional equation, with ``p(y, 0) = g0(-y)``."""
    g0_hat = ft1(grid, np.asarray(g0, dtype=complex))
    p0_hat = g0_hat[grid.reflect_index()]
    dv = symbol_on_grid(d, grid)
    bv = symbol_on_grid(b, grid)
    return np.exp(dv * t) * p0_hat, 1.0 + bv * i_hat_values(dv, t) * p0_hat


def conv_riccati_solution(
    d: Symbol, b: Symbol, g0: np.ndarray, t: float, grid: Grid1D
) -> np.ndarray:
    """Solution of ``dg/dt = d(-D) g - (b(-D) g) conv g`` via the correlation
    Riccati relation ``p(y) = int g(z) q(z + y) dz``."""
    refl = grid.reflect_index()
    p_hat, q_hat = conv_base_aux(d, b, g0, t, grid)
    q_refl = q_hat[refl]
    bad = np.abs(q_refl) < POLE_THRESHOLD
    if np.any(bad):
        raise PoleEncountered(f"q^ vanishes at {int(bad.sum())} mode(s) at t={t}")
    return ift1(grid, p_hat[refl] / q_refl)
