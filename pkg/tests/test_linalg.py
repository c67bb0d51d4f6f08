import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rebitlab import linalg
from rebitlab.linalg import ConvergenceError, eig_sym, psd_sqrt
from rebitlab.states import SIGMA_YY


def random_symmetric(rng, n, complex_=False):
    x = rng.standard_normal((n, 4, 4))
    if complex_:
        x = x + 1j * rng.standard_normal((n, 4, 4))
    return 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))


def random_psd(rng, n):
    x = rng.standard_normal((n, 4, 4))
    # random rank so that exact zeros in the spectrum are exercised
    x[: n // 2, :, 2:] = 0.0
    return x @ np.swapaxes(x, -1, -2)


def test_identity():
    dec = eig_sym(np.eye(4))
    np.testing.assert_array_equal(dec.eigenvalues, np.ones(4))
    v = dec.eigenvectors
    np.testing.assert_allclose(v.T @ v, np.eye(4), atol=1e-15)


def test_diagonal_sorted_descending():
    dec = eig_sym(np.diag([0.1, 0.4, 0.2, 0.3]))
    np.testing.assert_allclose(dec.eigenvalues, [0.4, 0.3, 0.2, 0.1], atol=0)


def test_sigma_yy_spectrum():
    np.testing.assert_allclose(eig_sym(SIGMA_YY).eigenvalues, [1, 1, -1, -1], atol=1e-15)


def test_input_not_modified():
    m = np.array([[2.0, 1.0, 0, 0], [1.0, 2.0, 0, 0], [0, 0, 1.0, 0.5], [0, 0, 0.5, 3.0]])
    before = m.copy()
    eig_sym(m)
    eig_sym(m[None])
    np.testing.assert_array_equal(m, before)


@pytest.mark.parametrize("complex_", [False, True])
def test_random_reconstruction_and_orthonormality(complex_):
    rng = np.random.default_rng(11)
    m = random_symmetric(rng, 10_000, complex_)
    dec = eig_sym(m)
    resid = linalg.frobenius_norm(dec.reconstruct() - m) / linalg.frobenius_norm(m)
    assert resid.max() <= 1e-10
    v = dec.eigenvectors
    gram = np.conj(np.swapaxes(v, -1, -2)) @ v
    assert linalg.frobenius_norm(gram - np.eye(4)).max() <= 1e-10
    assert np.all(np.diff(dec.eigenvalues, axis=-1) <= 0)
    # independent route: LAPACK
    np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(m)[:, ::-1], atol=1e-12)


def test_batch_composition_does_not_change_results():
    rng = np.random.default_rng(3)
    m = random_symmetric(rng, 50)
    alone = eig_sym(m[7])
    together = eig_sym(m)
    np.testing.assert_array_equal(alone.eigenvalues, together.eigenvalues[7])
    np.testing.assert_array_equal(alone.eigenvectors, together.eigenvectors[7])


def test_deterministic():
    m = random_symmetric(np.random.default_rng(5), 20, complex_=True)
    a, b = eig_sym(m), eig_sym(m)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


def test_nonconvergence_reports_residual():
    m = random_symmetric(np.random.default_rng(0), 3)
    with pytest.raises(ConvergenceError) as info:
        eig_sym(m, max_sweeps=1)
    assert info.value.residual > 0
    assert "residual" in str(info.value)


def test_conjugation_invariance_of_spectrum():
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    m = random_symmetric(rng, 2000)
    a = eig_sym(m).eigenvalues
    b = eig_sym(q @ m @ q.T).eigenvalues
    assert np.abs(a - b).max() <= 1e-10 * max(1.0, np.abs(a).max())


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.eye(4)), np.eye(4), atol=1e-15)
    s = psd_sqrt(np.diag([4.0, 1.0, 0.0, 0.0]) / 5)
    np.testing.assert_allclose(s, np.diag([2.0, 1.0, 0.0, 0.0]) / np.sqrt(5), atol=1e-15)


def test_psd_sqrt_family_state():
    # rho_m(1/4) = I/4 - Y/8 has spectrum (3/8, 3/8, 1/8, 1/8) in the Y eigenbasis
    rho = 0.25 * np.eye(4) - 0.125 * SIGMA_YY
    s = psd_sqrt(rho)
    w = eig_sym(s).eigenvalues
    np.testing.assert_allclose(w, [0.6123724356957945, 0.6123724356957945, 0.3535533905932738, 0.3535533905932738], atol=1e-14)
    np.testing.assert_allclose(s @ s, rho, atol=1e-14)


def test_psd_sqrt_random():
    rng = np.random.default_rng(21)
    m = random_psd(rng, 10_000)
    s = psd_sqrt(m)
    assert linalg.frobenius_norm(s @ s - m).max() <= 1e-9
    assert eig_sym(s).eigenvalues.min() >= -1e-10


def test_psd_sqrt_clamps_roundoff_and_rejects_negative():
    m = np.diag([0.5, 0.5, 0.0, -1e-12])
    np.testing.assert_allclose(psd_sqrt(m), np.diag([np.sqrt(0.5)] * 2 + [0, 0]), atol=1e-15)
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([0.5, 0.5, 0.1, -1e-6]))


def test_trace_and_products():
    assert linalg.trace(np.eye(4) / 4) == pytest.approx(1.0)
    assert linalg.trace(linalg.matmul(np.eye(4) / 4, np.eye(4) / 4)) == pytest.approx(0.25)
    v = np.array([0.5, 0.5, 0.5, 0.5])
    p = np.outer(v, v)
    assert linalg.trace(linalg.matmul(p, p)) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10, allow_nan=False)))
def test_hypothesis_reconstruction(x):
    m = 0.5 * (x + x.T)
    dec = eig_sym(m)
    norm = linalg.frobenius_norm(m)
    assert linalg.frobenius_norm(dec.reconstruct() - m) <= 1e-10 * max(norm, 1e-300) + 1e-300
