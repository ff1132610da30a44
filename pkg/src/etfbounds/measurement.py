"""POVMs assigned to equiangular tight frames and their outcome statistics."""

import json
from dataclasses import dataclass, field

import numpy as np

from .frames import EquiangularTightFrame, InvalidFrameError, validate_frame
from .numerics import check_density, default_tol

DIST_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EtfPovm:
    """Rank-one POVM with elements E_j = (d/n)|phi_j><phi_j|."""

    frame: EquiangularTightFrame
    elements: np.ndarray = field(repr=False)

    @property
    def d(self):
        return self.frame.d

    @property
    def n(self):
        return self.frame.n

    def completeness_residual(self):
        total = self.elements.sum(axis=0)
        return float(np.max(np.abs(total - np.eye(self.d))))


def _check_frame(frame, tol):
    report = validate_frame(frame.vectors, tol)
    if not report.passed:
        raise InvalidFrameError(f"invalid frame (max residual {report.max_residual:.3g})", report)


def povm_from_frame(frame, tol=None):
    tol = default_tol() if tol is None else tol
    _check_frame(frame, tol)
    v = frame.vectors
    elements = (frame.d / frame.n) * np.einsum("ja,jb->jab", v, v.conj())
    povm = EtfPovm(frame, elements)
    resid = povm.completeness_residual()
    if resid > tol:
        raise InvalidFrameError(f"POVM elements do not sum to the identity (residual {resid:.3g})")
    return povm


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    probs: np.ndarray
    frame_id: str = ""
    state_id: str = ""
    # largest amount by which a raw probability left [0, 1] before clamping
    clamp_deviation: float = 0.0

    @property
    def n(self):
        return self.probs.size

    def max_probability(self):
        return float(self.probs.max())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)


def clamp_probabilities(raw, tol=None):
    """Clip raw probabilities to [0, 1]; return (clipped, pre-clamp deviation)."""
    tol = DIST_TOL if tol is None else tol
    raw = np.asarray(raw, dtype=float)
    dev = float(max(0.0, -raw.min(), raw.max() - 1.0))
    probs = np.clip(raw, 0.0, 1.0)
    if abs(probs.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {probs.sum():.12g}, not 1")
    return probs, dev


def outcome_distribution(povm, rho, tol=None, state_id=""):
    """p_j = (d/n) <phi_j| rho |phi_j>."""
    rho = check_density(rho, tol)
    if rho.shape[0] != povm.d:
        raise ValueError(f"state dimension {rho.shape[0]} does not match frame dimension {povm.d}")
    v = povm.frame.vectors
    raw = (povm.d / povm.n) * np.einsum("ja,ab,jb->j", v.conj(), rho, v).real
    probs, dev = clamp_probabilities(raw)
    return OutcomeDistribution(probs, povm.frame.name, state_id, dev)


def index_of_coincidence(dist):
    p = np.asarray(dist, dtype=float)
    return float(np.dot(p, p))


@dataclass(frozen=True, eq=False)
class PsiFamily:
    """Orthonormal family built from |phi_j> (x) |phi_j^*>, one row per Psi_k."""

    vectors: np.ndarray = field(repr=False)
    omega: complex

    def gram(self):
        return self.vectors.conj() @ self.vectors.T

    def orthonormality_residual(self):
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(g.shape[0]))))


def psi_family(frame, tol=None):
    """Psi_0 = (nS)^(-1/2) sum_j phi_j (x) phi_j^*, and for k = 1..n-1
    Psi_k = (n - nc)^(-1/2) sum_j omega^(k j) phi_j (x) phi_j^*, omega = exp(2 pi i/n).
    """
    tol = default_tol() if tol is None else tol
    _check_frame(frame, tol)
    params = frame.params
    if params.c >= 1:
        raise ValueError("the family needs c < 1; one-dimensional frames are excluded")
    n = frame.n
    v = frame.vectors
    products = np.einsum("ja,jb->jab", v, v.conj()).reshape(n, -1)
    omega = np.exp(2j * np.pi / n)
    phases = omega ** np.outer(np.arange(n), np.arange(n))
    family = phases @ products
    norms = np.full(n, 1.0 / np.sqrt(n - n * float(params.c)))
    norms[0] = 1.0 / np.sqrt(n * float(params.S))
    return PsiFamily(family * norms[:, None], complex(omega))


def overlap_sum(frame):
    """sum_ij |<phi_i|phi_j>|^2, equal to nS for a tight frame."""
    g = frame.vectors.conj() @ frame.vectors.T
    return float(np.sum(np.abs(g) ** 2))


# ----------------------------------------------------------------------------
# density-matrix files


def density_to_dict(rho, dA=None, dB=None, **meta):
    rho = np.asarray(rho, dtype=complex)
    data = {
        "d": int(rho.shape[0]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
    }
    if dA is not None:
        data["dA"] = int(dA)
        data["dB"] = int(dB)
    data.update(meta)
    return data


def density_from_dict(data, tol=None):
    """Return (rho, dA, dB); dA and dB are None for a single system."""
    try:
        d = int(data["d"])
        rho = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state data: {exc}") from exc
    if rho.shape != (d, d):
        raise ValueError(f"state data declares d={d} but holds shape {rho.shape}")
    dA = data.get("dA")
    dB = data.get("dB")
    if (dA is None) != (dB is None):
        raise ValueError("bipartite state needs both dA and dB")
    if dA is not None:
        dA, dB = int(dA), int(dB)
        if dA * dB != d:
            raise ValueError(f"dA * dB = {dA * dB} does not match d = {d}")
    return check_density(rho, tol), dA, dB


def save_density(path, rho, dA=None, dB=None, **meta):
    with open(path, "w") as fh:
        json.dump(density_to_dict(rho, dA, dB, **meta), fh, indent=1)
        fh.write("\n")


def load_density(path, tol=None):
    with open(path) as fh:
        return density_from_dict(json.load(fh), tol)

