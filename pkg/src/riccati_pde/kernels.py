"""Star-product algebra on discretized Hilbert--Schmidt kernels.

A kernel ``k(x, y)`` sampled on an ``M x M`` grid acts on functions by the
left-Riemann rule, so its operator matrix is ``values * w`` with ``w`` the
grid spacing of the space it lives in (``dx`` physically, ``1/L`` in
Fourier space).  Under that convention

* ``a * b``            -> ``A @ B * w``
* the identity kernel  -> ``I / w``
* ``exp*(t c)``        -> ``expm(t C w) / w``

and all algebraic identities hold exactly up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla

from .grid import FOURIER, PHYSICAL, Grid1D, ft2_values, ift2_values


@dataclass(frozen=True, eq=False)
class Kernel2D:
    """Complex kernel on ``grid x grid``; ``values[i, j] = k(x_i, y_j)``."""

    grid: Grid1D
    space: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.M, self.grid.M):
            raise ValueError(
                f"kernel values must be {self.grid.M}x{self.grid.M}, got {v.shape}"
            )
        if self.space not in (PHYSICAL, FOURIER):
            raise ValueError(f"unknown space tag {self.space!r}")
        object.__setattr__(self, "values", v)

    n = 1

    @property
    def weight(self) -> float:
        return self.grid.spacing(self.space)

    @property
    def flat(self) -> np.ndarray:
        return self.values

    def like(self, flat: np.ndarray) -> "Kernel2D":
        return Kernel2D(self.grid, self.space, flat)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.like(self.flat + other.flat)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.like(self.flat - other.flat)

    def __neg__(self):
        return self.like(-self.flat)

    def __mul__(self, scalar):
        return self.like(self.flat * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return star(self, other)


@dataclass(frozen=True, eq=False)
class BlockKernel:
    """``n x n`` array of kernels stored as ``blocks[i, j] -> (M, M)``."""

    grid: Grid1D
    space: str
    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks)
        M = self.grid.M
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2:] != (M, M):
            raise ValueError(f"block array must be (n, n, {M}, {M}), got {b.shape}")
        object.__setattr__(self, "blocks", b)

    @classmethod
    def from_kernels(cls, rows: Sequence[Sequence[Kernel2D]]) -> "BlockKernel":
        first = rows[0][0]
        for row in rows:
            for k in row:
                _check_compatible(first, k)
        blocks = np.array([[k.values for k in row] for row in rows])
        return cls(first.grid, first.space, blocks)

    @classmethod
    def bisymmetric(cls, diag: Kernel2D, off: Kernel2D) -> "BlockKernel":
        return cls.from_kernels([[diag, off], [off, diag]])

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def weight(self) -> float:
        return self.grid.spacing(self.space)

    @property
    def is_bisymmetric(self) -> bool:
        b = self.blocks
        return (
            self.n == 2
            and np.array_equal(b[0, 0], b[1, 1])
            and np.array_equal(b[0, 1], b[1, 0])
        )

    @property
    def flat(self) -> np.ndarray:
        n, M = self.n, self.grid.M
        return self.blocks.transpose(0, 2, 1, 3).reshape(n * M, n * M)

    def like(self, flat: np.ndarray) -> "BlockKernel":
        n, M = self.n, self.grid.M
        blocks = np.asarray(flat).reshape(n, M, n, M).transpose(0, 2, 1, 3)
        return BlockKernel(self.grid, self.space, blocks)

    def block(self, i: int, j: int) -> Kernel2D:
        return Kernel2D(self.grid, self.space, self.blocks[i, j])

    __add__ = Kernel2D.__add__
    __sub__ = Kernel2D.__sub__
    __neg__ = Kernel2D.__neg__
    __mul__ = Kernel2D.__mul__
    __rmul__ = Kernel2D.__mul__
    __matmul__ = Kernel2D.__matmul__


AnyKernel = Union[Kernel2D, BlockKernel]


def _check_compatible(a: AnyKernel, b: AnyKernel) -> None:
    if a.grid != b.grid:
        raise ValueError("kernels live on different grids")
    if a.space != b.space:
        raise ValueError(f"space tag mismatch: {a.space} vs {b.space}")
    if a.n != b.n:
        raise ValueError(f"block size mismatch: {a.n} vs {b.n}")


def from_function(grid: Grid1D, func: Callable, space: str = PHYSICAL) -> Kernel2D:
    """Sample ``func(x, y)`` (vectorized) on the grid."""
    nodes = grid.x if space == PHYSICAL else grid.k
    X, Y = np.meshgrid(nodes, nodes, indexing="ij")
    return Kernel2D(grid, space, np.asarray(func(X, Y), dtype=complex))


def zeros(grid: Grid1D, space: str = PHYSICAL, n: int = 1) -> AnyKernel:
    M = grid.M
    if n == 1:
        return Kernel2D(grid, space, np.zeros((M, M), dtype=complex))
    return BlockKernel(grid, space, np.zeros((n, n, M, M), dtype=complex))


def delta(grid: Grid1D, space: str = PHYSICAL, n: int = 1) -> AnyKernel:
    """Identity of the star product, ``I / w`` on the grid."""
    w = grid.spacing(space)
    eye = np.eye(n * grid.M, dtype=complex) / w
    return zeros(grid, space, n).like(eye)


def operator_matrix(a: AnyKernel) -> np.ndarray:
    """Matrix of the integral operator with kernel ``a`` (values times weight)."""
    return a.flat * a.weight


def from_operator(template: AnyKernel, op: np.ndarray) -> AnyKernel:
    return template.like(op / template.weight)


def star(a: AnyKernel, b: AnyKernel) -> AnyKernel:
    """``(a * b)(x, y) = int a(x, z) b(z, y) dz`` by the left-Riemann rule."""
    _check_compatible(a, b)
    return a.like(a.flat @ b.flat * a.weight)


def adjoint(a: AnyKernel) -> AnyKernel:
    """Kernel of the adjoint operator, ``a*(y, x)``."""
    return a.like(a.flat.conj().T)


def ft2(a: Kernel2D) -> Kernel2D:
    if a.space != PHYSICAL:
        raise ValueError("ft2 expects a physical-space kernel")
    return Kernel2D(a.grid, FOURIER, ft2_values(a.grid, a.values))


def ift2(a: Kernel2D) -> Kernel2D:
    if a.space != FOURIER:
        raise ValueError("ift2 expects a Fourier-space kernel")
    return Kernel2D(a.grid, PHYSICAL, ift2_values(a.grid, a.values))


def ft2_block(a: BlockKernel) -> BlockKernel:
    if a.space != PHYSICAL:
        raise ValueError("ft2 expects a physical-space kernel")
    return BlockKernel(a.grid, FOURIER, ft2_values(a.grid, a.blocks))


def ift2_block(a: BlockKernel) -> BlockKernel:
    if a.space != FOURIER:
        raise ValueError("ift2 expects a Fourier-space kernel")
    return BlockKernel(a.grid, PHYSICAL, ift2_values(a.grid, a.blocks))


@dataclass(frozen=True)
class StarSeries:
    """``f(c) = i * sum_m alpha_m c^m`` with real ``alpha_m``.

    ``matrix_func``, when given, evaluates ``sum_m alpha_m X^m`` for a square
    matrix ``X`` exactly (e.g. :func:`scipy.linalg.sinm`); otherwise the
    truncated coefficient list is summed by Horner's rule.
    """

    coeffs: tuple
    matrix_func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    scalar_func: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        c = tuple(self.coeffs)
        if any(np.iscomplexobj(v) and np.imag(v) != 0 for v in c):
            raise ValueError("star-series coefficients must be real")
        object.__setattr__(self, "coeffs", tuple(float(np.real(v)) for v in c))

    @classmethod
    def identity(cls) -> "StarSeries":
        """``f(x) = i x`` (cubic nonlinearity)."""
        return cls((0.0, 1.0), name="x")

    @classmethod
    def sine(cls, terms: int = 25) -> "StarSeries":
        """``f(x) = i sin(x)``."""
        coeffs = [0.0] * (2 * terms)
        fact = 1.0
        for n in range(1, 2 * terms):
            fact *= n
            if n % 2:
                coeffs[n] = (-1) ** (n // 2) / fact
        return cls(tuple(coeffs), matrix_func=sla.sinm, scalar_func=np.sin, name="sin")

    def real_part(self, x):
        """``sum_m alpha_m x^m`` for scalars or arrays."""
        if self.scalar_func is not None:
            return self.scalar_func(x)
        return np.polynomial.polynomial.polyval(x, self.coeffs)


def _series_matrix(f: StarSeries, X: np.ndarray) -> np.ndarray:
    if f.matrix_func is not None:
        return f.matrix_func(X)
    eye = np.eye(X.shape[0], dtype=complex)
    out = f.coeffs[-1] * eye
    for a in reversed(f.coeffs[:-1]):
        out = out @ X + a * eye
    return out


def star_series(f: StarSeries, c: AnyKernel) -> AnyKernel:
    """``i (alpha_0 delta + alpha_1 c + alpha_2 c*c + ...)``."""
    return from_operator(c, 1j * _series_matrix(f, operator_matrix(c)))


def star_exp(c: AnyKernel, t: float = 1.0) -> AnyKernel:
    """Star exponential ``exp*(t c) = delta + t c + (t c)^{*2}/2 + ...``."""
    return from_operator(c, sla.expm(t * operator_matrix(c)))


def star_exp_series(c: AnyKernel, t: float = 1.0, terms: int = 30) -> AnyKernel:
    """Truncated power series for ``exp*``; reference implementation only."""
    X = t * operator_matrix(c)
    out = np.eye(X.shape[0], dtype=complex)
    term = out.copy()
    for m in range(1, terms):
        term = term @ X / m
        out = out + term
    return from_operator(c, out)


def hs_norm(a: AnyKernel) -> float:
    """L2 norm of the kernel (= Hilbert--Schmidt norm of the operator)."""
    return float(a.weight * np.linalg.norm(a.flat))


def operator_eigenvalues(a: AnyKernel) -> np.ndarray:
    return sla.eigvals(operator_matrix(a), check_finite=False)


def det2(qprime: AnyKernel, eigenvalues: Optional[np.ndarray] = None) -> complex:
    """Regularized Fredholm determinant ``det2(id + Q')``.

    Uses the product ``prod (1 + l) exp(-l)`` over the eigenvalues ``l`` of the
    operator matrix, which stays valid when the trace series diverges.
    """
    lam = operator_eigenvalues(qprime) if eigenvalues is None else eigenvalues
    one_plus = 1.0 + lam
    if np.any(one_plus == 0):
        return 0j
    # sum of logs; branch choice cancels in the final exp
    return complex(np.exp(np.sum(np.log(one_plus) - lam)))


def fredholm_det(qprime: AnyKernel, eigenvalues: Optional[np.ndarray] = None) -> complex:
    """Unregularized determinant ``det(id + Q') = prod (1 + l)``."""
    lam = operator_eigenvalues(qprime) if eigenvalues is None else eigenvalues
    one_plus = 1.0 + lam
    if np.any(one_plus == 0):
        return 0j
    return complex(np.exp(np.sum(np.log(one_plus))))


def det2_trace_series(qprime: AnyKernel, terms: int = 40) -> complex:
    """``exp(sum_{l>=2} (-1)^(l-1) tr(Q'^l) / l)`` truncated; converges for
    spectral radius < 1.  Kept as an independent check on :func:`det2`."""
    X = operator_matrix(qprime)
    power = X.copy()
    total = 0j
    for ell in range(2, terms + 1):
        power = power @ X
        total += (-1) ** (ell - 1) * np.trace(power) / ell
    return complex(np.exp(total))
