"""Dense complex operator algebra for small Hilbert spaces.

Everything here works on plain numpy arrays of complex dtype and shape
``(dim, dim)``.  States are density operators: Hermitian, unit trace,
positive semidefinite.  Dimensions in this package never exceed 8
(machine times one bath qubit), so all routines stay dense.

Basis conventions for the concrete machines live in
:mod:`thermoq.collision` and :mod:`thermoq.qutrit`; this module is
model-agnostic.
"""

from __future__ import annotations

from functools import reduce
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ValidationError

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
POSITIVITY_ATOL = -1e-10


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(a)).T


def is_hermitian(a, atol: float = HERMITIAN_ATOL) -> bool:
    m = as_operator(a)
    return bool(np.max(np.abs(m - dagger(m))) <= atol)


def require_hermitian(a, name: str = "operator", atol: float = HERMITIAN_ATOL) -> np.ndarray:
    m = as_operator(a)
    dev = float(np.max(np.abs(m - dagger(m))))
    if dev > atol:
        raise ValidationError(f"{name} is not Hermitian (max |A - A^dag| = {dev:.3e})")
    return m


def tensor(*ops) -> np.ndarray:
    """Kronecker product of one or more operators; the first factor varies slowest."""
    if not ops:
        raise ValidationError("tensor() needs at least one operator")
    return reduce(np.kron, (as_operator(op) for op in ops))


def ket(dim: int, index: int) -> np.ndarray:
    """Computational basis column vector |index> in a dim-dimensional space."""
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def ketbra(dim: int, i: int, j: int) -> np.ndarray:
    """Matrix unit |i><j|."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    if not (0 <= i < dim and 0 <= j < dim):
        raise ValidationError(f"basis indices ({i}, {j}) out of range for dimension {dim}")
    return m


def partial_trace(rho, keep, dims: Sequence[int]) -> np.ndarray:
    """Trace out all tensor factors except ``keep``.

    Args:
        rho: operator on the full product space.
        keep: factor index or iterable of factor indices to retain,
            counted in tensor order (factor 0 varies slowest).
        dims: dimension of every tensor factor, in order.

    Returns:
        The reduced operator on the retained factors, in their original order.
    """
    m = as_operator(rho)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValidationError(f"invalid factor dimensions {dims}")
    total = int(np.prod(dims))
    if m.shape[0] != total:
        raise ValidationError(
            f"dimension mismatch: operator is {m.shape[0]}-dimensional, factors give {total}"
        )
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep or any(k < 0 or k >= len(dims) for k in keep):
        raise ValidationError(f"keep selector {keep} out of range for {len(dims)} factors")

    n = len(dims)
    t = m.reshape(dims + dims)
    for ax in sorted((i for i in range(n) if i not in keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + n)
        n -= 1
    kept = int(np.prod([dims[k] for k in keep]))
    return t.reshape(kept, kept)


def evolve_unitary(rho, h, t: float) -> np.ndarray:
    """Conjugate ``rho`` by exp(-i h t), with the exponential built from the
    eigendecomposition of the (validated Hermitian) generator."""
    m = as_operator(rho)
    ham = require_hermitian(h, name="hamiltonian")
    if ham.shape != m.shape:
        raise ValidationError(f"state/hamiltonian shape mismatch: {m.shape} vs {ham.shape}")
    w, v = np.linalg.eigh(ham)
    u = (v * np.exp(-1j * w * t)) @ dagger(v)
    return u @ m @ dagger(u)


def gibbs_state(h, beta: float) -> np.ndarray:
    """Thermal state exp(-beta h)/Z.  ``beta = 0`` gives the maximally mixed state."""
    ham = require_hermitian(h, name="hamiltonian")
    if not np.isfinite(beta) or beta < 0:
        raise ValidationError(f"inverse temperature must be finite and >= 0, got {beta}")
    w, v = np.linalg.eigh(ham)
    # shift by the ground energy so the exponentials never overflow
    weights = np.exp(-beta * (w - w.min()))
    weights /= weights.sum()
    return (v * weights) @ dagger(v)


def trace_distance(a, b) -> float:
    """Half the trace norm of the difference of two Hermitian operators."""
    d = as_operator(a) - as_operator(b)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + dagger(d))))))


def validate_state(
    rho,
    *,
    trace_atol: float = TRACE_ATOL,
    hermitian_atol: float = HERMITIAN_ATOL,
    positivity_atol: float = POSITIVITY_ATOL,
    name: str = "state",
) -> np.ndarray:
    """Check density-operator invariants and return the validated array.

    Positivity is judged against ``positivity_atol`` (a small negative number);
    integrators relax it mid-trajectory.
    """
    m = as_operator(rho)
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > trace_atol:
        raise ValidationError(f"{name} trace deviates from 1 by {abs(tr - 1.0):.3e}")
    herm = float(np.max(np.abs(m - dagger(m))))
    if herm > hermitian_atol:
        raise ValidationError(f"{name} is not Hermitian (max deviation {herm:.3e})")
    mineig = float(np.min(np.linalg.eigvalsh(0.5 * (m + dagger(m)))))
    if mineig < positivity_atol:
        raise ValidationError(f"{name} has negative eigenvalue {mineig:.3e}")
    return m


def write_matrix_csv(a, fh: IO[str]) -> None:
    """Debug dump: one CSV row per matrix row, entries as adjacent re,im pairs."""
    m = as_operator(a)
    for row in m:
        cells: Iterable[str] = (f"{z.real:.16e},{z.imag:.16e}" for z in row)
        fh.write(",".join(cells) + "\n")
