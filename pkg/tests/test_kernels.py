import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riccati_pde import kernels as K
from riccati_pde.grid import FOURIER, PHYSICAL, make_grid
from riccati_pde.kernels import BlockKernel, Kernel2D, StarSeries


def gauss(grid, a=1.0):
    return K.from_function(grid, lambda x, y: np.exp(-a * (x**2 + y**2)))


def rank_one(grid, scale=1.0):
    phi = np.exp(-grid.x**2)
    return Kernel2D(grid, PHYSICAL, scale * np.outer(phi, phi)), phi


def test_star_of_gaussians(grid256):
    out = K.star(gauss(grid256), gauss(grid256))
    X, Y = np.meshgrid(grid256.x, grid256.x, indexing="ij")
    assert np.max(np.abs(out.values - np.sqrt(np.pi / 2) * np.exp(-(X**2) - Y**2))) <= 1e-8


def test_hs_norm_of_gaussian(grid256):
    # int int exp(-2 pi (x^2 + y^2)) = 1/2 is the squared norm
    hs = K.hs_norm(gauss(grid256, np.pi))
    assert hs**2 == pytest.approx(0.5, abs=1e-8)
    assert hs == pytest.approx(np.sqrt(0.5), abs=1e-8)
    assert K.hs_norm(K.zeros(grid256)) == 0.0


def test_hs_norm_is_the_same_in_both_spaces(grid64, rng):
    a = Kernel2D(grid64, PHYSICAL, rng.standard_normal((64, 64)))
    assert K.hs_norm(K.ft2(a)) == pytest.approx(K.hs_norm(a), rel=1e-10)


@pytest.mark.parametrize("space", [PHYSICAL, FOURIER])
def test_delta_is_identity(grid64, rng, space):
    a = Kernel2D(grid64, space, rng.standard_normal((64, 64)) + 0j)
    d = K.delta(grid64, space)
    assert np.allclose(K.star(d, a).values, a.values, rtol=1e-14, atol=0)
    assert np.allclose(K.star(a, d).values, a.values, rtol=1e-14, atol=0)


def test_delta_transforms_to_delta(grid64):
    d = K.ft2(K.delta(grid64))
    assert np.max(np.abs(d.values - K.delta(grid64, FOURIER).values)) <= 1e-10


def test_star_rejects_mixed_spaces(grid64):
    with pytest.raises(ValueError):
        K.star(K.delta(grid64), K.delta(grid64, FOURIER))
    with pytest.raises(ValueError):
        K.star(K.delta(grid64), K.delta(make_grid(10, 64)))
    with pytest.raises(ValueError):
        K.ift2(K.delta(grid64))


def test_kernel_shape_validation(grid64):
    with pytest.raises(ValueError):
        Kernel2D(grid64, PHYSICAL, np.zeros((64, 32)))
    with pytest.raises(ValueError):
        Kernel2D(grid64, "momentum", np.zeros((64, 64)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_algebra_laws_on_random_kernels(seed):
    g = make_grid(5.0, 16)
    rng = np.random.default_rng(seed)

    def rand():
        return Kernel2D(g, PHYSICAL, rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))

    a, b, c = rand(), rand(), rand()
    lhs = K.star(K.star(a, b), c).values
    rhs = K.star(a, K.star(b, c)).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))
    adj = K.adjoint(K.star(a, b)).values
    assert np.max(np.abs(adj - K.star(K.adjoint(b), K.adjoint(a)).values)) <= 1e-12 * np.max(
        np.abs(adj)
    )
    # ft2 is a discrete homomorphism, not just an approximate one
    lhs = K.ft2(K.star(a, b)).values
    assert np.max(np.abs(lhs - K.star(K.ft2(a), K.ft2(b)).values)) <= 1e-11 * np.max(np.abs(lhs))


def test_rank_one_det2(grid64):
    # Q' = s phi phi^T has the single eigenvalue lam = s ||phi||^2
    q, phi = rank_one(grid64, 0.3)
    lam = 0.3 * grid64.dx * np.sum(phi**2)
    assert K.det2(q) == pytest.approx((1 + lam) * np.exp(-lam), abs=1e-13)
    assert K.fredholm_det(q) == pytest.approx(1 + lam, abs=1e-13)
    assert K.det2_trace_series(q * (0.9 / lam), terms=400) == pytest.approx(
        1.9 * np.exp(-0.9), abs=1e-9
    )


def test_det2_detects_eigenvalue_minus_one(grid64):
    q, phi = rank_one(grid64)
    q = q * (-1.0 / (grid64.dx * np.sum(phi**2)))
    assert abs(K.det2(q)) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 0.9))
def test_det2_product_matches_trace_series(seed, size):
    g = make_grid(4.0, 16)
    rng = np.random.default_rng(seed)
    q = Kernel2D(g, PHYSICAL, rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))
    q = q * (size / K.hs_norm(q))
    assert abs(K.det2(q) - K.det2_trace_series(q, terms=200)) <= 1e-9


def test_star_exp_rank_one(grid64):
    # exp*(t c) = delta + (e^{t lam} - 1)/lam * c for c = phi phi^T
    c, phi = rank_one(grid64)
    lam = grid64.dx * np.sum(phi**2)
    t = 0.7
    expected = K.delta(grid64).values + (np.expm1(t * lam) / lam) * c.values
    assert np.max(np.abs(K.star_exp(c, t).values - expected)) <= 1e-12 * np.max(np.abs(expected))
    assert np.max(np.abs(K.star_exp_series(c, t).values - expected)) <= 1e-10 * np.max(
        np.abs(expected)
    )


def test_star_sine_rank_one(grid64):
    c, phi = rank_one(grid64, 1.7)
    lam = 1.7 * grid64.dx * np.sum(phi**2)
    out = K.star_series(StarSeries.sine(), c).values
    assert np.max(np.abs(out - 1j * np.sin(lam) / lam * c.values)) <= 1e-12
    # the truncated Horner series agrees with scipy's sinm
    horner = StarSeries(StarSeries.sine().coeffs)
    assert np.max(np.abs(K.star_series(horner, c).values - out)) <= 1e-12


def test_star_series_is_skew_on_hermitian_input(grid64, rng):
    a = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    c = Kernel2D(grid64, PHYSICAL, 0.01 * (a + a.conj().T))
    for f in (StarSeries.identity(), StarSeries.sine()):
        fc = K.star_series(f, c)
        assert np.max(np.abs(K.adjoint(fc).values + fc.values)) <= 1e-12


def test_star_series_rejects_complex_coefficients():
    with pytest.raises(ValueError):
        StarSeries((0.0, 1j))


def test_block_flat_round_trip(grid64, rng):
    blocks = rng.standard_normal((2, 2, 64, 64))
    bk = BlockKernel(grid64, PHYSICAL, blocks)
    assert np.array_equal(bk.like(bk.flat).blocks, blocks)
    assert bk.flat[3, 64 + 5] == blocks[0, 1, 3, 5]


def test_bisymmetric_products_stay_bisymmetric(grid64, rng):
    def rand():
        return Kernel2D(grid64, PHYSICAL, rng.standard_normal((64, 64)))

    a = BlockKernel.bisymmetric(rand(), rand())
    b = BlockKernel.bisymmetric(rand(), rand())
    assert a.is_bisymmetric
    prod = K.star(a, b)
    assert np.allclose(prod.blocks[0, 0], prod.blocks[1, 1], atol=1e-12)
    assert np.allclose(prod.blocks[0, 1], prod.blocks[1, 0], atol=1e-12)
