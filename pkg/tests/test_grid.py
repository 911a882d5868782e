import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riccati_pde.grid import (
    DIFFUSIVE,
    DISPERSIVE,
    OTHER,
    Grid1D,
    Symbol,
    ft1,
    ft2_values,
    ift1,
    ift2_values,
    make_grid,
    symbol_on_grid,
    x_transform,
    x_transform_inv,
)


def test_grid_nodes():
    g = make_grid(20, 128)
    assert g.dx == pytest.approx(0.15625)
    assert g.x[0] == -10.0
    assert g.k[0] == -128 / 2 / 20
    assert g.k[g.M // 2] == 0.0


@pytest.mark.parametrize("L,M", [(0, 64), (-1, 64), (20, 100), (20, 4), (float("nan"), 64)])
def test_grid_rejects_bad_parameters(L, M):
    with pytest.raises(ValueError):
        Grid1D(L, M)


def test_gaussian_is_self_dual(grid256):
    X, Y = np.meshgrid(grid256.x, grid256.x, indexing="ij")
    KK, KA = np.meshgrid(grid256.k, grid256.k, indexing="ij")
    F = ft2_values(grid256, np.exp(-np.pi * (X**2 + Y**2)))
    assert np.max(np.abs(F - np.exp(-np.pi * (KK**2 + KA**2)))) <= 1e-8


def test_shift_picks_up_phase(grid256):
    # f(x - a) -> exp(2 pi i k a) f^(k) under the + sign
    a = 1.25
    F0 = ft1(grid256, np.exp(-np.pi * grid256.x**2))
    Fa = ft1(grid256, np.exp(-np.pi * (grid256.x - a) ** 2))
    assert np.max(np.abs(Fa - np.exp(2j * np.pi * grid256.k * a) * F0)) <= 1e-10


def test_derivative_symbol(grid256):
    x = grid256.x
    f = np.exp(-(x**2))
    df = ift1(grid256, symbol_on_grid(Symbol.monomial(1), grid256) * ft1(grid256, f))
    d3f = ift1(grid256, symbol_on_grid(Symbol.monomial(3), grid256) * ft1(grid256, f))
    assert np.max(np.abs(df - (-2 * x * f))) <= 1e-10
    assert np.max(np.abs(d3f - (-8 * x**3 + 12 * x) * f)) <= 1e-9


def test_parseval(grid64, rng):
    f = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    F = ft2_values(grid64, f)
    phys = grid64.dx * np.linalg.norm(f)
    spectral = grid64.dk * np.linalg.norm(F)
    assert spectral == pytest.approx(phys, rel=1e-10)


def test_real_kernels_have_conjugate_symmetric_spectra(grid64, rng):
    F = ft2_values(grid64, rng.standard_normal((64, 64)))
    r = grid64.reflect_index()
    # the Nyquist row/column has no partner on the grid
    inner = slice(1, None)
    lhs = F[r][:, r][inner, inner]
    assert np.max(np.abs(lhs - F[inner, inner].conj())) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([8, 16, 32, 64]), st.floats(1.0, 50.0))
def test_round_trip(seed, M, L):
    g = make_grid(L, M)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    assert np.max(np.abs(ift2_values(g, ft2_values(g, f)) - f)) <= 1e-12 * np.max(np.abs(f))
    assert np.max(np.abs(x_transform_inv(g, x_transform(g, f)) - f)) <= 1e-12 * np.max(np.abs(f))


def test_symbol_classification():
    assert Symbol.monomial(2).classification == DIFFUSIVE
    assert Symbol((1.0, 0.0, 1.0)).classification == DIFFUSIVE
    assert Symbol.monomial(4, -1.0).classification == DIFFUSIVE
    assert Symbol.monomial(4).classification == OTHER
    assert Symbol.monomial(3, -1.0).classification == DISPERSIVE
    assert Symbol.monomial(2, -1j).classification == DISPERSIVE
    assert Symbol.monomial(2, -1.0).classification == OTHER


def test_symbol_arithmetic():
    s = Symbol((1.0, 2.0)) + Symbol.monomial(2, 3.0)
    assert s.coeffs == (1.0, 2.0, 3.0)
    assert (s - s).coeffs == (0.0,)
    assert s(2.0) == 1 + 4 + 12
    assert Symbol((1.0, 0.0, 0.0)).degree == 0
