"""Periodic grids, continuous Fourier transform conventions and symbols.

The unbounded line is truncated to the periodic box ``[-L/2, L/2)`` sampled
at ``M`` nodes.  Kernels ``k(x, y)`` are transformed with

    k^(k, kappa) = int int k(x, y) exp(2 pi i (k x - kappa y)) dx dy,

i.e. a ``+`` sign on the first variable and a ``-`` sign on the second.  With
this choice the transform conjugates integral operators by the unitary 1D
transform, so it maps the star product to the star product, the identity
kernel ``delta(x - y)`` to ``delta(k - kappa)`` and adjoints to adjoints.
Under the ``+`` sign a derivative in the first variable acts as
multiplication by ``-2 pi i k``; use :func:`symbol_on_grid` to get the
Fourier multiplier of a polynomial in ``d/dx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

PHYSICAL = "physical"
FOURIER = "fourier"


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on ``[-L/2, L/2)`` and its dual frequencies.

    Frequencies are kept in natural (monotone) order
    ``k_m = m / L`` for ``m = -M/2, ..., M/2 - 1``.
    """

    L: float
    M: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"domain length must be positive, got L={self.L}")
        M = int(self.M)
        if M != self.M or M < 8 or M & (M - 1):
            raise ValueError(f"M must be a power of two >= 8, got M={self.M}")

    @property
    def dx(self) -> float:
        return self.L / self.M

    @property
    def dk(self) -> float:
        return 1.0 / self.L

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L / 2 + self.dx * np.arange(self.M)

    @cached_property
    def k(self) -> np.ndarray:
        return np.arange(-self.M // 2, self.M // 2) / self.L

    def spacing(self, space: str) -> float:
        """Riemann weight of the star product in the given space."""
        if space == PHYSICAL:
            return self.dx
        if space == FOURIER:
            return self.dk
        raise ValueError(f"unknown space tag {space!r}")

    @cached_property
    def _phase(self) -> np.ndarray:
        # centering correction for the -L/2 grid offset
        return np.exp(2j * np.pi * self.k * self.x[0])

    def reflect_index(self) -> np.ndarray:
        """Index map ``m -> index of -k_m`` (the Nyquist mode maps to itself)."""
        return (-np.arange(self.M)) % self.M


def make_grid(L: float, M: int) -> Grid1D:
    return Grid1D(float(L), M)


# --- transforms -------------------------------------------------------------
#
# Along the first axis  F[m] = dx * sum_j f_j exp(+2 pi i k_m x_j)
# Along the second axis F[m] = dx * sum_j f_j exp(-2 pi i k_m x_j)
# With k_m = (m - M/2)/L and x_j = -L/2 + j dx the sums are DFTs up to the
# centering phase exp(+-2 pi i k_m x_0) and an fftshift into natural order.


def _plus_axis(grid: Grid1D, f: np.ndarray, axis: int) -> np.ndarray:
    F = np.fft.fftshift(np.fft.ifft(f, axis=axis), axes=axis) * grid.M
    return _scale(F, grid._phase * grid.dx, axis)


def _minus_axis(grid: Grid1D, f: np.ndarray, axis: int) -> np.ndarray:
    F = np.fft.fftshift(np.fft.fft(f, axis=axis), axes=axis)
    return _scale(F, np.conj(grid._phase) * grid.dx, axis)


def _plus_axis_inv(grid: Grid1D, F: np.ndarray, axis: int) -> np.ndarray:
    F = _scale(F, np.conj(grid._phase) / (grid.dx * grid.M), axis)
    return np.fft.fft(np.fft.ifftshift(F, axes=axis), axis=axis)


def _minus_axis_inv(grid: Grid1D, F: np.ndarray, axis: int) -> np.ndarray:
    F = _scale(F, grid._phase / grid.dx, axis)
    return np.fft.ifft(np.fft.ifftshift(F, axes=axis), axis=axis)


def _scale(F, w, axis):
    shape = [1] * F.ndim
    shape[axis] = -1
    return F * w.reshape(shape)


def ft1(grid: Grid1D, f: np.ndarray) -> np.ndarray:
    """Continuous 1D transform ``int f(x) exp(2 pi i k x) dx`` on the grid."""
    return _plus_axis(grid, np.asarray(f, dtype=complex), 0)


def ift1(grid: Grid1D, F: np.ndarray) -> np.ndarray:
    return _plus_axis_inv(grid, np.asarray(F, dtype=complex), 0)


def ft2_values(grid: Grid1D, f: np.ndarray) -> np.ndarray:
    """Array-level forward 2D transform (``+`` in x, ``-`` in y)."""
    f = np.asarray(f, dtype=complex)
    return _minus_axis(grid, _plus_axis(grid, f, -2), -1)


def ift2_values(grid: Grid1D, F: np.ndarray) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    return _minus_axis_inv(grid, _plus_axis_inv(grid, F, -2), -1)


def x_transform(grid: Grid1D, f: np.ndarray) -> np.ndarray:
    """Transform only the first variable of a kernel (rows)."""
    return _plus_axis(grid, np.asarray(f, dtype=complex), -2)


def x_transform_inv(grid: Grid1D, F: np.ndarray) -> np.ndarray:
    return _plus_axis_inv(grid, np.asarray(F, dtype=complex), -2)


def y_transform(grid: Grid1D, f: np.ndarray) -> np.ndarray:
    """Transform only the second variable of a kernel (columns)."""
    return _minus_axis(grid, np.asarray(f, dtype=complex), -1)


# --- symbols ----------------------------------------------------------------

DIFFUSIVE = "diffusive"
DISPERSIVE = "dispersive"
OTHER = "other"


@dataclass(frozen=True)
class Symbol:
    """Constant-coefficient polynomial ``c_0 + c_1 D + ... + c_N D^N``.

    ``D`` stands for the derivative in the first variable.  Coefficients may
    be complex (e.g. ``-i h(D)`` in the Schrodinger examples).
    """

    coeffs: tuple = field(default=(0.0,))

    def __post_init__(self):
        c = tuple(complex(v) if np.iscomplexobj(v) else float(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, n: int, coeff=1.0) -> "Symbol":
        return cls((0.0,) * n + (coeff,))

    @classmethod
    def constant(cls, value) -> "Symbol":
        return cls((value,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def even_only(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    @property
    def classification(self) -> str:
        c = self.coeffs
        # Re s(i w) == 0 for every real w
        if all((cn * 1j**n).real == 0 for n, cn in enumerate(c)):
            return DISPERSIVE
        lead = c[-1]
        if (
            self.even_only
            and self.degree >= 2
            and all(np.isreal(v) for v in c)
            and np.sign(np.real(lead)) == (-1) ** (self.degree // 2 + 1)
        ):
            return DIFFUSIVE
        return OTHER

    def __call__(self, z):
        # Horner
        z = np.asarray(z)
        out = np.zeros_like(z, dtype=complex) + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            out = out * z + c
        return out

    def scaled(self, factor) -> "Symbol":
        return Symbol(tuple(factor * c for c in self.coeffs))

    def __add__(self, other: "Symbol") -> "Symbol":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0.0,) * (n - len(self.coeffs))
        b = other.coeffs + (0.0,) * (n - len(other.coeffs))
        return Symbol(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Symbol":
        return self.scaled(-1.0)

    def __sub__(self, other: "Symbol") -> "Symbol":
        return self + (-other)


def symbol_eval(s: Symbol, k):
    """Evaluate ``s`` at ``2 pi i k``."""
    return s(2j * np.pi * np.asarray(k, dtype=float))


def symbol_on_grid(s: Symbol, grid: Grid1D) -> np.ndarray:
    """Fourier multiplier of ``s(d/dx)`` under :func:`ft1` / the x-part of ft2.

    With the ``+`` sign convention ``d/dx`` becomes ``-2 pi i k``.
    """
    return symbol_eval(s, -grid.k)
