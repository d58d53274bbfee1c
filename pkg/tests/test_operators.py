import numpy as np
import pytest
import scipy.linalg

from thermoq import (
    ValidationError,
    gibbs_state,
    ket,
    ketbra,
    partial_trace,
    tensor,
    trace_distance,
    validate_state,
)
from thermoq.operators import (
    as_operator,
    dagger,
    evolve_unitary,
    is_hermitian,
    require_hermitian,
    write_matrix_csv,
)

from conftest import random_density


def test_tensor_matches_kron_with_fast_second_factor():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 1], [1, 0]], dtype=complex)
    t = tensor(a, b)
    assert t.shape == (4, 4)
    # index = 2*i_a + i_b, second factor fastest
    assert t[2 * 0 + 1, 2 * 1 + 0] == a[0, 1] * b[1, 0]
    np.testing.assert_allclose(t, np.kron(a, b))
    # three factors associate
    c = np.eye(3)
    np.testing.assert_allclose(tensor(a, b, c), np.kron(np.kron(a, b), c))


def test_ket_and_ketbra():
    v = ket(4, 2)
    assert v.shape == (4,)
    assert v[2] == 1.0 and abs(v).sum() == 1.0
    m = ketbra(3, 0, 2)
    assert m[0, 2] == 1.0
    assert np.count_nonzero(m) == 1


def test_partial_trace_recovers_product_factors(rng):
    a = random_density(2, rng)
    b = random_density(3, rng)
    joint = np.kron(a, b)
    np.testing.assert_allclose(partial_trace(joint, keep=0, dims=(2, 3)), a, atol=1e-14)
    np.testing.assert_allclose(partial_trace(joint, keep=1, dims=(2, 3)), b, atol=1e-14)


def test_partial_trace_preserves_trace(rng):
    rho = random_density(6, rng)
    red = partial_trace(rho, keep=0, dims=(2, 3))
    assert abs(np.trace(red) - 1.0) < 1e-13


def test_gibbs_state_qubit_ratio():
    e, beta = 1.3, 0.7
    rho = gibbs_state(np.diag([0.0, e]), beta)
    # population ratio e^{-beta E}, trace one
    assert abs(np.trace(rho) - 1.0) < 1e-14
    assert abs(rho[1, 1] / rho[0, 0] - np.exp(-beta * e)) < 1e-13
    # beta = 0 gives the maximally mixed state
    np.testing.assert_allclose(gibbs_state(np.diag([0.0, e]), 0.0), np.eye(2) / 2)


def test_trace_distance_bounds():
    p0 = ketbra(2, 0, 0)
    p1 = ketbra(2, 1, 1)
    assert abs(trace_distance(p0, p1) - 1.0) < 1e-14
    assert trace_distance(p0, p0) == 0.0
    # diagonal states: half the l1 distance of the spectra
    a = np.diag([0.7, 0.3])
    b = np.diag([0.4, 0.6])
    assert abs(trace_distance(a, b) - 0.3) < 1e-14


def test_evolve_unitary_matches_expm(rng):
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (h + h.conj().T) / 2
    rho = random_density(4, rng)
    t = 0.37
    u = scipy.linalg.expm(-1j * h * t)
    expected = u @ rho @ u.conj().T
    np.testing.assert_allclose(evolve_unitary(rho, h, t), expected, atol=1e-12)


def test_validate_state_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        validate_state(np.diag([0.9, 0.2]))  # trace 1.1
    with pytest.raises(ValidationError):
        validate_state(np.array([[1.0, 0.5], [0.0, 0.0]]))  # not hermitian
    with pytest.raises(ValidationError):
        validate_state(np.diag([1.5, -0.5]))  # negative eigenvalue
    # tiny numerical negativity is tolerated
    eps = 1e-12
    out = validate_state(np.diag([1.0 + eps, -eps]))
    assert out.dtype == complex


def test_require_hermitian():
    require_hermitian(np.diag([1.0, 2.0]))
    with pytest.raises(ValidationError):
        require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]), name="test op")
    assert is_hermitian(np.eye(3))
    assert not is_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_as_operator_and_dagger():
    m = as_operator([[0, 1j], [0, 0]])
    assert m.dtype == complex
    np.testing.assert_allclose(dagger(m), np.array([[0, 0], [-1j, 0]]))
    with pytest.raises(ValidationError):
        as_operator([1.0, 2.0])  # not square


def test_write_matrix_csv_roundtrip(tmp_path, rng):
    rho = random_density(3, rng)
    path = tmp_path / "rho.csv"
    with open(path, "w") as fh:
        write_matrix_csv(rho, fh)
    text = path.read_text()
    rows = [r for r in text.strip().splitlines() if not r.startswith("#")]
    parsed = np.array([[float(x) for x in r.split(",")] for r in rows])
    rebuilt = parsed[:, 0::2] + 1j * parsed[:, 1::2]
    np.testing.assert_allclose(rebuilt, rho, atol=1e-15)
