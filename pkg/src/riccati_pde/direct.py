"""Time-stepping pseudo-spectral reference solvers.

These integrate the nonlocal equations directly and serve as independent
checks on the Riccati-generated solutions.  They deliberately work with
``numpy.fft`` in its own (``exp(-2 pi i k x)``) convention, where ``d/dx``
is multiplication by ``+2 pi i k``, rather than with :mod:`riccati_pde.grid`.
Only the first variable of a kernel is ever transformed; star products are
Riemann-weighted matrix products in physical space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BlowUp
from .grid import Symbol
from .kernels import Kernel2D, StarSeries

BLOWUP_THRESHOLD = 1e6
MAX_STEPS = 10**8


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    T: float
    scheme: str = "split_step"
    record_every: int = 0
    nonlinear_step: str = "euler"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.T / self.dt > MAX_STEPS:
            raise ValueError(f"T/dt exceeds {MAX_STEPS} steps")
        if self.scheme not in ("split_step", "rk4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.nonlinear_step not in ("euler", "exp", "rk4"):
            raise ValueError(f"unknown nonlinear step {self.nonlinear_step!r}")

    @property
    def steps(self) -> int:
        if self.T == 0:
            return 0
        return max(1, int(np.ceil(self.T / self.dt - 1e-9)))

    @property
    def step_size(self) -> float:
        n = self.steps
        return self.T / n if n else 0.0


def _wavenumbers(L: float, M: int) -> np.ndarray:
    return np.fft.fftfreq(M, d=L / M)


def _multiplier(s: Symbol, L: float, M: int) -> np.ndarray:
    return s(2j * np.pi * _wavenumbers(L, M))


def _check(values: np.ndarray, t: float) -> None:
    peak = np.max(np.abs(values))
    if not np.isfinite(peak) or peak > BLOWUP_THRESHOLD:
        raise BlowUp(f"solution exceeded {BLOWUP_THRESHOLD:g} at t={t:.6g}")


def _record(record, every, n, t, values):
    if record is not None and every and n % every == 0:
        record.append((t, values.copy()))


def _apply_x(mult: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.fft.ifft(mult[:, None] * np.fft.fft(g, axis=0), axis=0)


# --- quadratic equations ---------------------------------------------------


def quadratic_split_step(
    g0: Kernel2D,
    d: Symbol,
    b: Symbol,
    cfg: StepperConfig,
    record: Optional[list] = None,
) -> Kernel2D:
    """Split-step solver for ``dg/dt = d(D) g - g * (b(D) g)``.

    Each step applies the exact linear flow in Fourier space followed by a
    nonlinear substep: explicit Euler (``nonlinear_step="euler"``, first
    order overall) or a Strang-symmetric RK4 substep (``"rk4"``).
    """
    L, M = g0.grid.L, g0.grid.M
    dx = L / M
    dt = cfg.step_size
    real = _real_preserving(g0.values, d, b)
    fwd, inv, freqs = _x_fft(real, L, M)
    lin = d(2j * np.pi * freqs)
    bmult = b(2j * np.pi * freqs)
    g = np.array(g0.values.real if real else g0.values, dtype=float if real else complex)

    def apply(mult, u):
        return inv(mult[:, None] * fwd(u), M)

    def nonlinear(u):
        return -dx * (u @ apply(bmult, u))

    strang = cfg.nonlinear_step == "rk4"
    prop = np.exp((0.5 if strang else 1.0) * dt * lin)
    _record(record, cfg.record_every, 0, 0.0, g)
    for n in range(1, cfg.steps + 1):
        g = apply(prop, g)
        if strang:
            k1 = nonlinear(g)
            k2 = nonlinear(g + 0.5 * dt * k1)
            k3 = nonlinear(g + 0.5 * dt * k2)
            k4 = nonlinear(g + dt * k3)
            g = g + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            g = apply(prop, g)
        else:
            g = g + dt * nonlinear(g)
        _check(g, n * dt)
        _record(record, cfg.record_every, n, n * dt, g)
    return Kernel2D(g0.grid, g0.space, g.astype(complex))


def _real_preserving(values, *symbols) -> bool:
    # real data stays real under real-coefficient symbols
    return not np.any(np.imag(values)) and all(
        not np.any(np.imag(s.coeffs)) for s in symbols
    )


def _x_fft(real: bool, L: float, M: int):
    if real:
        return (
            lambda u: np.fft.rfft(u, axis=0),
            lambda U, n: np.fft.irfft(U, n=n, axis=0),
            np.fft.rfftfreq(M, d=L / M),
        )
    return (
        lambda u: np.fft.fft(u, axis=0),
        lambda U, n: np.fft.ifft(U, n=n, axis=0),
        _wavenumbers(L, M),
    )


def kdv_direct(g0: Kernel2D, cfg: StepperConfig, record: Optional[list] = None) -> Kernel2D:
    """``dg/dt = -D^3 g - g * (D g)`` by exact dispersion + nonlinear substep."""
    return quadratic_split_step(
        g0, Symbol.monomial(3, -1.0), Symbol.monomial(1), cfg, record
    )


# --- odd-degree equations --------------------------------------------------


def nls_direct(
    g0: Kernel2D,
    h: Symbol,
    f: StarSeries,
    cfg: StepperConfig,
    record: Optional[list] = None,
) -> Kernel2D:
    """Strang splitting for ``dg/dt = -i h(D) g - g * f(g * g^+)``.

    The nonlinear flow keeps ``c = g * g^+`` fixed, so with ``c`` frozen it
    is solved exactly by ``g <- g exp(-dt i f(C))``, evaluated through an
    eigendecomposition of the Hermitian operator ``C``
    (``nonlinear_step="exp"``).  ``"euler"`` takes an explicit Euler step
    instead.
    """
    L, M = g0.grid.L, g0.grid.M
    dx = L / M
    dt = cfg.step_size
    half = np.exp(-0.5j * dt * _multiplier(h, L, M))
    g = np.array(g0.values, dtype=complex)
    exact = cfg.nonlinear_step != "euler"

    def nonlinear(u):
        C = dx * dx * (u @ u.conj().T)
        C = 0.5 * (C + C.conj().T)
        lam, V = np.linalg.eigh(C)
        if exact:
            return (u @ V) @ (np.exp(-1j * dt * f.real_part(lam))[:, None] * V.conj().T)
        F = (V * (1j * f.real_part(lam))) @ V.conj().T
        return u - dt * (u @ F)

    _record(record, cfg.record_every, 0, 0.0, g)
    for n in range(1, cfg.steps + 1):
        g = _apply_x(half, g)
        g = nonlinear(g)
        g = _apply_x(half, g)
        _check(g, n * dt)
        _record(record, cfg.record_every, n, n * dt, g)
    return Kernel2D(g0.grid, g0.space, g)


# --- reaction-diffusion system ---------------------------------------------


def _rk4(rhs, state, dt, steps, record=None, every=0, check=None):
    _record(record, every, 0, 0.0, state)
    for n in range(1, steps + 1):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * dt * k1)
        k3 = rhs(state + 0.5 * dt * k2)
        k4 = rhs(state + dt * k3)
        state = state + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if check is not None:
            check(state, n * dt)
        _record(record, every, n, n * dt, state)
    return state


def rd_direct(
    u0: Kernel2D,
    v0: Kernel2D,
    d11: Symbol,
    d12: Symbol,
    b11: np.ndarray,
    b12: Optional[np.ndarray],
    cfg: StepperConfig,
    record: Optional[list] = None,
):
    """Method of lines for the nonlocal reaction-diffusion system.

    ``b11`` and ``b12`` are multiplier samples on the grid (``b12`` may be
    ``None``).  The state is kept as x-transformed ``(u^, v^)`` and advanced by
    classical RK4; star products are evaluated in physical space.
    """
    L, M = u0.grid.L, u0.grid.M
    dx = L / M
    l11 = _multiplier(d11, L, M)[:, None]
    l12 = _multiplier(d12, L, M)[:, None]
    b11 = np.asarray(b11, dtype=complex)[:, None]
    b12 = None if b12 is None else np.asarray(b12, dtype=complex)[:, None]

    def st(a, bw, c):
        # a * (bw c), bw a multiplier on the first variable of c
        return dx * (a @ (bw * c))

    def rhs(state):
        uh, vh = state
        u = np.fft.ifft(uh, axis=0)
        v = np.fft.ifft(vh, axis=0)
        nu = st(u, b11, u) + st(v, b11, v)
        nv = st(u, b11, v) + st(v, b11, u)
        if b12 is not None:
            nu = nu + st(u, b12, v) + st(v, b12, u)
            nv = nv + st(u, b12, u) + st(v, b12, v)
        return np.array(
            [
                l11 * uh + l12 * vh - np.fft.fft(nu, axis=0),
                l11 * vh + l12 * uh - np.fft.fft(nv, axis=0),
            ]
        )

    def check(state, t):
        _check(state, t)

    state = np.array([np.fft.fft(u0.values, axis=0), np.fft.fft(v0.values, axis=0)])
    state = _rk4(rhs, state, cfg.step_size, cfg.steps, record, cfg.record_every, check)
    u = np.fft.ifft(state[0], axis=0)
    v = np.fft.ifft(state[1], axis=0)
    return Kernel2D(u0.grid, u0.space, u), Kernel2D(v0.grid, v0.space, v)


# --- scalar equations on the line -------------------------------------------


def _circulant_index(M: int) -> np.ndarray:
    # x_a - x_b wraps onto node (a - b + M/2) mod M of the [-L/2, L/2) grid
    a = np.arange(M)
    return (a[:, None] - a[None, :] + M // 2) % M


def oned_direct(
    g0: np.ndarray,
    L: float,
    d: Symbol,
    form: str,
    b: Symbol,
    cfg: StepperConfig,
    record: Optional[list] = None,
) -> np.ndarray:
    """RK4 method of lines for the two scalar nonlocal equations.

    ``form="fkpp"``:          ``dg/dt = d(D) g - g int b(D) g dz``
    ``form="convolutional"``: ``dg/dt = d(-D) g - int (b(-D) g)(xi) g(eta - xi) dxi``

    Linear terms are applied spectrally; the integrals use the Riemann rule
    in physical space (the convolution as a periodic circulant sum).
    """
    g0 = np.asarray(g0, dtype=complex)
    M = g0.shape[0]
    dx = L / M
    if form == "fkpp":
        lin = _multiplier(d, L, M)
        bm = _multiplier(b, L, M)

        def nonlocal_term(g):
            return g * (dx * np.sum(np.fft.ifft(bm * np.fft.fft(g))))

    elif form == "convolutional":
        reflected = -2j * np.pi * _wavenumbers(L, M)
        lin = d(reflected)
        bm = b(reflected)
        idx = _circulant_index(M)

        def nonlocal_term(g):
            bg = np.fft.ifft(bm * np.fft.fft(g))
            return dx * (g[idx] @ bg)

    else:
        raise ValueError(f"unknown form {form!r}")

    def rhs(g):
        return np.fft.ifft(lin * np.fft.fft(g)) - nonlocal_term(g)

    return _rk4(rhs, g0, cfg.step_size, cfg.steps, record, cfg.record_every, _check)
