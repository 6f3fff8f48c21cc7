import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from multicorr import _backend, _pykernels

from oracles import YY


def _hermitian(rng, n, batch):
    x = rng.normal(size=(batch, n, n)) + 1j * rng.normal(size=(batch, n, n))
    return x + np.conj(np.swapaxes(x, 1, 2))


def _density(rng, batch, rank=4):
    x = rng.normal(size=(batch, 4, rank)) + 1j * rng.normal(size=(batch, 4, rank))
    rho = x @ np.conj(np.swapaxes(x, 1, 2))
    return rho / np.trace(rho, axis1=1, axis2=2)[:, None, None]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_eigh_matches_lapack(kernels, rng, n):
    h = _hermitian(rng, n, 30)
    w, v = kernels.jacobi_eigh(h)
    assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-12)
    eye = np.eye(n)
    assert np.abs(np.conj(np.swapaxes(v, 1, 2)) @ v - eye).max() < 1e-12
    recon = v @ (w[:, :, None] * np.conj(np.swapaxes(v, 1, 2)))
    assert np.abs(recon - h).max() < 1e-12


def test_eigh_single_matrix_and_degenerate(kernels):
    w, v = kernels.jacobi_eigh(np.eye(4))
    assert np.array_equal(w, np.ones(4))
    w, _ = kernels.jacobi_eigh(np.zeros((4, 4)))
    assert np.array_equal(w, np.zeros(4))
    proj = np.full((4, 4), 0.25)
    w, _ = kernels.jacobi_eigh(proj)
    assert np.allclose(w, [0, 0, 0, 1], atol=1e-15)


def test_eigh_rejects_bad_shape(kernels):
    with pytest.raises(ValueError):
        kernels.jacobi_eigh(np.zeros((2, 3, 4)))


def test_singular_values_match_lapack(kernels, rng):
    b = rng.normal(size=(40, 4, 4)) + 1j * rng.normal(size=(40, 4, 4))
    b[:10, :, 3] = b[:10, :, 0] * (0.3 - 0.2j)  # rank-deficient
    sv = kernels.singular_values(b)
    assert np.allclose(sv, np.linalg.svd(b, compute_uv=False), atol=1e-12)
    assert np.all(sv[:10, 3] < 1e-13)


def test_concurrence_bell_and_product(kernels):
    bell = np.zeros(4, complex)
    bell[[0, 3]] = 1 / np.sqrt(2)
    prod = np.zeros(4, complex)
    prod[0] = 1
    assert kernels.concurrence_batch(np.outer(bell, bell.conj())) == pytest.approx(1.0, abs=1e-14)
    assert kernels.concurrence_batch(np.outer(prod, prod.conj())) == pytest.approx(0.0, abs=1e-14)
    assert kernels.concurrence_batch(np.eye(4) / 4) == 0.0


def test_concurrence_pure_two_qubit_closed_form(kernels, rng):
    amps = rng.normal(size=(200, 4)) + 1j * rng.normal(size=(200, 4))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    rho = amps[:, :, None] * np.conj(amps[:, None, :])
    expected = 2 * np.abs(amps[:, 0] * amps[:, 3] - amps[:, 1] * amps[:, 2])
    assert np.abs(kernels.concurrence_batch(rho) - expected).max() < 1e-10


def test_concurrence_against_eigvals_oracle(kernels, rng):
    rho = np.concatenate([_density(rng, 50), _density(rng, 50, rank=2), _density(rng, 50, rank=1)])
    got = kernels.concurrence_batch(rho)
    for r, c in zip(rho, got):
        lam = np.linalg.eigvals(r @ YY @ r.conj() @ YY).real
        s = np.sort(np.sqrt(np.clip(lam, 0, None)))[::-1]
        assert c == pytest.approx(max(s[0] - s[1:].sum(), 0.0), abs=1e-7)


def test_concurrence_needs_4x4(kernels):
    with pytest.raises(ValueError):
        kernels.concurrence_batch(np.eye(2) / 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_correlation_core_backends_agree(rng, n):
    if _backend.BACKEND != "cython":
        pytest.skip("only the python backend is available")
    from multicorr import _ckernels

    psi = rng.normal(size=(64, 2 ** n)) + 1j * rng.normal(size=(64, 2 ** n))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    t_py, c_py = _pykernels.correlation_core(psi, n)
    t_c, c_c = _ckernels.correlation_core(psi, n)
    assert np.abs(t_py - t_c).max() < 1e-13
    assert np.abs(c_py - c_c).max() < 1e-12


def test_correlation_core_empty_batch(kernels):
    tau, c2 = kernels.correlation_core(np.zeros((0, 16), complex), 4)
    assert tau.shape == (0, 4) and c2.shape == (0, 4, 4)


def test_correlation_core_rejects_wrong_length(kernels):
    with pytest.raises(ValueError):
        kernels.correlation_core(np.zeros((1, 8), complex), 4)


_complex = st.complex_numbers(min_magnitude=0, max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=150, deadline=None)
@given(arrays(np.complex128, (4, 4), elements=_complex))
def test_eigh_hypothesis(x):
    h = x + x.conj().T
    for module in _all_kernels():
        w, v = module.jacobi_eigh(h)
        scale = max(1.0, np.abs(h).max())
        assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-12 * scale)
        assert np.abs(v.conj().T @ v - np.eye(4)).max() < 1e-12


def _all_kernels():
    mods = [_pykernels]
    try:
        from multicorr import _ckernels

        mods.append(_ckernels)
    except ImportError:
        pass
    return mods


def test_singular_values_with_tiny_cross_terms(kernels):
    # column overlaps near 1e-160 once underflowed in |z| and broke unitarity
    b = np.zeros((4, 4), complex)
    b[0, 0] = b[3, 3] = 0.365493269556032
    b[2, 0] = 0.10779544644420481 - 0.09979406085682377j
    b[3, 1] = -0.10779544644420481 + 0.09979406085682374j
    b[1, 2] = 1e-160
    sv = kernels.singular_values(b)
    assert np.abs(sv - np.linalg.svd(b, compute_uv=False)).max() <= 1e-15
