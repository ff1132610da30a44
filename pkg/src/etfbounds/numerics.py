"""Small complex linear-algebra kernel shared by the rest of the package.

Kets are 1-D complex numpy arrays, operators are 2-D complex arrays.
Nothing here is clever; it exists so every module validates states the
same way and uses the same tolerances.
"""

import os

import numpy as np

DEFAULT_TOL = 1e-8
IDENTITY_TOL = 1e-10


class InvalidStateError(ValueError):
    """Raised when an operator fails density-matrix validation."""


def default_tol():
    """Validation tolerance, overridable through the ``ETF_TOL`` variable."""
    value = os.environ.get("ETF_TOL")
    if value is None or value.strip() == "":
        return DEFAULT_TOL
    tol = float(value)
    if not np.isfinite(tol) or tol <= 0:
        raise ValueError(f"ETF_TOL must be a positive number, got {value!r}")
    return tol


def as_ket(v):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def inner(u, v):
    """<u|v>, conjugate-linear in the first argument."""
    u = as_ket(u)
    v = as_ket(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    return complex(np.vdot(u, v))


def conjugate_ket(v):
    """Return the ket with complex-conjugated components."""
    return np.conj(as_ket(v))


def kron(a, b):
    """Tensor product of two matrices (or two kets)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def projector(v):
    v = as_ket(v)
    return np.outer(v, v.conj())


def hermitize(m):
    return 0.5 * (m + m.conj().T)


def density_residuals(rho):
    """Return (hermiticity, min eigenvalue, trace deviation) of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    min_eig = float(np.linalg.eigvalsh(hermitize(rho))[0])
    trace_dev = float(abs(np.trace(rho) - 1.0))
    return herm, min_eig, trace_dev


def is_density(rho, tol=None):
    tol = default_tol() if tol is None else tol
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        return False
    if not np.all(np.isfinite(rho)):
        return False
    herm, min_eig, trace_dev = density_residuals(rho)
    return herm <= tol and min_eig >= -tol and trace_dev <= tol


def check_density(rho, tol=None):
    """Validate ``rho`` and return it as a complex array.

    Raises
    ------
    InvalidStateError
        If ``rho`` is not square, not Hermitian, not positive semidefinite,
        or not of unit trace within ``tol``.
    """
    tol = default_tol() if tol is None else tol
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    herm, min_eig, trace_dev = density_residuals(rho)
    if herm > tol:
        raise InvalidStateError(f"not Hermitian (residual {herm:.3g})")
    if min_eig < -tol:
        raise InvalidStateError(f"not positive semidefinite (min eigenvalue {min_eig:.3g})")
    if trace_dev > tol:
        raise InvalidStateError(f"trace differs from 1 by {trace_dev:.3g}")
    return rho


def purity(rho, tol=None):
    """tr(rho^2) of a validated density matrix."""
    rho = check_density(rho, tol)
    # tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def maximally_mixed(d):
    return np.eye(d, dtype=complex) / d


def complex_gaussian(rng, shape):
    """Standard complex Gaussians (x + iy)/sqrt(2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_density(d, rank=None, seed=0):
    """Ginibre-ensemble density matrix rho = G G^dag / tr(G G^dag).

    Parameters
    ----------
    d : int
        Dimension.
    rank : int, optional
        Number of columns of G, between 1 and d. Defaults to d.
    seed : int or numpy Generator
        Seed for ``numpy.random.default_rng``; a Generator is used as is.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in 1..{d}, got {rank}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = complex_gaussian(rng, (d, rank))
    rho = g @ g.conj().T
    rho = hermitize(rho)
    return rho / np.trace(rho).real


def random_ket(d, seed=0):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    v = complex_gaussian(rng, d)
    return v / np.linalg.norm(v)


def _orthogonalize(v, basis):
    # basis rows are orthonormal; remove their components from row v
    if basis.shape[0] == 0:
        return v
    return v - (basis.conj() @ v) @ basis


def complete_to_unitary(rows, tol=None, seed=0):
    """Extend d orthonormal rows of length n by n - d further rows.

    Random row vectors are projected onto the orthogonal complement of
    everything collected so far, normalized and orthogonalized a second
    time. Stacking ``rows`` above the result gives an n x n unitary.

    Returns
    -------
    ndarray, shape (n - d, n)
    """
    tol = default_tol() if tol is None else tol
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    d, n = rows.shape
    if d >= n:
        raise ValueError(f"need fewer rows than columns to complete, got {d}x{n}")
    gram_residual = np.max(np.abs(rows @ rows.conj().T - np.eye(d)))
    if gram_residual > tol:
        raise ValueError(f"rows are not orthonormal (residual {gram_residual:.3g})")

    rng = np.random.default_rng(seed)
    basis = rows.copy()
    extra = []
    while len(extra) < n - d:
        v = complex_gaussian(rng, n)
        v = _orthogonalize(v, basis)
        norm = np.linalg.norm(v)
        if norm < 1e-6:
            continue
        v = v / norm
        v = _orthogonalize(v, basis)
        v = v / np.linalg.norm(v)
        extra.append(v)
        basis = np.vstack([basis, v])
    return np.array(extra)


def partial_trace(rho, dims, keep):
    """Reduced state of a bipartite operator on dims = (dA, dB).

    ``keep`` is 0 for subsystem A, 1 for subsystem B. Composite index is
    a * dB + b.
    """
    da, db = dims
    r = np.asarray(rho, dtype=complex).reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ajbj->ab", r)
    if keep == 1:
        return np.einsum("iaib->ab", r)
    raise ValueError("keep must be 0 or 1")
