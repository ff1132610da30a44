"""Equiangular tight frames: parameters, validation, constructions, file I/O.

A frame is stored as an (n, d) complex array whose j-th row is the unit
vector phi_j. The frame matrix with the vectors as columns is the
transpose of that array.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from .numerics import complete_to_unitary, complex_gaussian, default_tol


class InvalidFrameError(ValueError):
    """Raised when vectors do not form an equiangular tight frame."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class FrameParameters:
    """Exact (d, n, S, c) of an ETF; S and c are Fractions."""

    d: int
    n: int
    S: Fraction
    c: Fraction

    @property
    def s(self):
        return float(self.S)

    @property
    def overlap(self):
        return float(self.c)

    @property
    def is_degenerate(self):
        """True for one-dimensional frames with n > 1 (all overlaps equal 1)."""
        return self.d == 1 and self.n > 1


def etf_parameters(d, n):
    """Tightness constant S = n/d and squared overlap c = (n-d)/((n-1)d).

    Requires 1 <= d <= n <= d^2. The one exception is d = 1, where any
    collection of unimodular scalars is trivially equiangular (c = 1);
    such frames arise as Naimark complements of (n-1, n) frames.
    """
    d = int(d)
    n = int(n)
    if d < 1:
        raise ValueError(f"dimension must be positive, got d={d}")
    if n < d:
        raise ValueError(f"an ETF needs n >= d, got d={d}, n={n}")
    if n > d * d and d != 1:
        raise ValueError(f"an ETF needs n <= d^2, got d={d}, n={n}")
    S = Fraction(n, d)
    c = Fraction(0) if n == d else Fraction(n - d, (n - 1) * d)
    return FrameParameters(d, n, S, c)


@dataclass(frozen=True)
class FrameReport:
    d: int
    n: int
    unit_norm_residual: float
    equiangularity_residual: float
    tightness_residual: float
    S0: float
    S1: float
    tol: float
    unit_norm_ok: bool
    equiangular_ok: bool
    tight_ok: bool

    @property
    def passed(self):
        return self.unit_norm_ok and self.equiangular_ok and self.tight_ok

    @property
    def max_residual(self):
        return max(self.unit_norm_residual, self.equiangularity_residual, self.tightness_residual)

    def as_dict(self):
        return {
            "d": self.d,
            "n": self.n,
            "unit_norm_residual": self.unit_norm_residual,
            "equiangularity_residual": self.equiangularity_residual,
            "tightness_residual": self.tightness_residual,
            "S0": self.S0,
            "S1": self.S1,
            "tol": self.tol,
            "unit_norm": "pass" if self.unit_norm_ok else "fail",
            "equiangular": "pass" if self.equiangular_ok else "fail",
            "tight": "pass" if self.tight_ok else "fail",
            "verdict": "pass" if self.passed else "fail",
        }


def _as_vectors(vectors):
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.ndim != 2 or vectors.size == 0:
        raise ValueError(f"frame vectors must form an (n, d) array, got shape {vectors.shape}")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("frame vectors have non-finite entries")
    return vectors


def _residuals(vectors):
    n, d = vectors.shape
    norms = np.linalg.norm(vectors, axis=1)
    unit = float(np.max(np.abs(norms - 1.0)))
    c = 0.0 if n == d else (n - d) / ((n - 1) * d)
    overlaps = np.abs(vectors.conj() @ vectors.T) ** 2
    off = ~np.eye(n, dtype=bool)
    equi = float(np.max(np.abs(overlaps[off] - c))) if n > 1 else 0.0
    frame_op = vectors.T @ vectors.conj()
    tight = float(np.max(np.abs(frame_op - (n / d) * np.eye(d))))
    eigs = np.linalg.eigvalsh(0.5 * (frame_op + frame_op.conj().T))
    return unit, equi, tight, float(eigs[0]), float(eigs[-1])


def validate_frame(vectors, tol=None):
    """Check unit norms, equal overlaps and scalar frame operator.

    Parameters
    ----------
    vectors : array_like, shape (n, d)
        Candidate frame vectors as rows.
    tol : float, optional
        Maximum accepted absolute deviation for each check.

    Returns
    -------
    FrameReport
    """
    tol = default_tol() if tol is None else tol
    vectors = _as_vectors(vectors)
    n, d = vectors.shape
    if n < d:
        raise ValueError(f"a frame needs at least d vectors, got n={n} < d={d}")
    unit, equi, tight, s0, s1 = _residuals(vectors)
    return FrameReport(d, n, unit, equi, tight, s0, s1, tol, unit <= tol, equi <= tol, tight <= tol)


@dataclass(frozen=True, eq=False)
class EquiangularTightFrame:
    params: FrameParameters
    vectors: np.ndarray = field(repr=False)
    name: str = ""

    @property
    def d(self):
        return self.params.d

    @property
    def n(self):
        return self.params.n

    @property
    def matrix(self):
        """d x n frame matrix with the vectors as columns."""
        return self.vectors.T

    def conjugate(self):
        return EquiangularTightFrame(self.params, self.vectors.conj(), self.name + "*")

    def report(self, tol=None):
        return validate_frame(self.vectors, tol)


def make_frame(vectors, tol=None, name=""):
    """Validate ``vectors`` and wrap them as an EquiangularTightFrame."""
    vectors = _as_vectors(vectors)
    n, d = vectors.shape
    report = validate_frame(vectors, tol)
    if not report.passed:
        raise InvalidFrameError(
            f"vectors do not form an ETF (max residual {report.max_residual:.3g})", report
        )
    vectors = vectors.copy()
    vectors.flags.writeable = False
    return EquiangularTightFrame(etf_parameters(d, n), vectors, name)


def orthonormal_basis_frame(d):
    return make_frame(np.eye(d, dtype=complex), name=f"basis-{d}")


def _complement_vectors(vectors, seed=0):
    n, d = vectors.shape
    if n == d:
        raise ValueError("an n = d frame has no Naimark complement")
    rows = np.sqrt(d / n) * vectors.T
    extra = complete_to_unitary(rows, seed=seed)
    out = extra.T * np.sqrt(n / (n - d))
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def naimark_complement(frame, seed=0):
    """ETF of n vectors in dimension n - d obtained from a unitary completion.

    The rows of sqrt(d/n) * Phi are orthonormal; n - d further rows make
    the square matrix unitary and the columns of that new block, once
    normalized, form the complementary frame.
    """
    if frame.n == frame.d:
        raise ValueError("an n = d frame has no Naimark complement")
    out = _complement_vectors(frame.vectors, seed)
    return make_frame(canonicalize_phases(out), name=f"complement({frame.name})")


def simplex_etf(d):
    """n = d + 1 vectors in C^d, complement of the (d+1)-th roots of unity."""
    n = d + 1
    roots = np.exp(2j * np.pi * np.arange(n) / n).reshape(n, 1)
    out = _complement_vectors(roots)
    return make_frame(canonicalize_phases(out), name=f"simplex-{d}")


def canonicalize_phases(vectors, eps=1e-12):
    """Rotate each vector so its first non-negligible entry is real and positive."""
    vectors = np.array(vectors, dtype=complex)
    for j, v in enumerate(vectors):
        big = np.flatnonzero(np.abs(v) > eps)
        if big.size:
            z = v[big[0]]
            vectors[j] = v * (abs(z) / z)
            vectors[j, big[0]] = abs(z)
    return vectors


# ----------------------------------------------------------------------------
# numerical search


@dataclass(frozen=True)
class OptimizeOptions:
    penalty: float = 1.0
    step0: float = 0.1
    success_tol: float = 1e-7
    max_iter: int = 20000
    restarts: int = 10
    min_step: float = 1e-14
    polish: bool = True
    polish_max_nfev: int = 5000


@dataclass
class OptimizeResult:
    success: bool
    frame: EquiangularTightFrame | None
    best_residual: float
    restart: int
    iterations: int
    objective: float
    residuals: list


def _objective(vectors, c, S, penalty):
    n, d = vectors.shape
    gram = vectors.conj() @ vectors.T
    dev = np.abs(gram) ** 2 - c
    np.fill_diagonal(dev, 0.0)
    tight = vectors.T @ vectors.conj() - S * np.eye(d)
    return float(np.sum(dev**2) + penalty * np.sum(np.abs(tight) ** 2)), gram, dev, tight


def _gradient(vectors, gram, dev, tight, penalty):
    # Wirtinger derivative with respect to conj(phi_k), rows stacked
    g1 = 4.0 * (dev * gram.T) @ vectors
    g2 = 2.0 * penalty * vectors @ tight.T
    return 2.0 * (g1 + g2)


def _normalize_rows(v):
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _descend(vectors, c, S, opts):
    step = opts.step0
    f, gram, dev, tight = _objective(vectors, c, S, opts.penalty)
    it = 0
    for it in range(1, opts.max_iter + 1):
        grad = _gradient(vectors, gram, dev, tight, opts.penalty)
        while True:
            trial = _normalize_rows(vectors - step * grad)
            ft, gt, dt, tt = _objective(trial, c, S, opts.penalty)
            if ft < f or step < opts.min_step:
                break
            step *= 0.5
        if step < opts.min_step:
            break
        vectors, f, gram, dev, tight = trial, ft, gt, dt, tt
        step = min(2.0 * step, opts.step0)
        if it % 25 == 0 and _max_residual(vectors) <= opts.success_tol:
            break
    return vectors, f, it


def _polish(vectors, c, S, opts):
    # Levenberg-Marquardt on the residual vector whose squared norm is the
    # descent objective; rows are renormalized inside the residual map
    n, d = vectors.shape
    iu = np.triu_indices(n, 1)
    root = np.sqrt(opts.penalty)

    def unpack(x):
        return _normalize_rows((x[: n * d] + 1j * x[n * d :]).reshape(n, d))

    def residual(x):
        v = unpack(x)
        gram = v.conj() @ v.T
        pairs = np.sqrt(2.0) * (np.abs(gram[iu]) ** 2 - c)
        tight = root * (v.T @ v.conj() - S * np.eye(d))
        return np.concatenate([pairs, tight.real.ravel(), tight.imag.ravel(), padding])

    x0 = np.concatenate([vectors.real.ravel(), vectors.imag.ravel()])
    # 'lm' needs at least as many residuals as variables
    padding = np.zeros(max(0, x0.size - iu[0].size - 2 * d * d))
    sol = least_squares(
        residual, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=opts.polish_max_nfev
    )
    out = unpack(sol.x)
    return out, _objective(out, c, S, opts.penalty)[0], sol.nfev


def _max_residual(vectors):
    unit, equi, tight, _, _ = _residuals(vectors)
    return max(unit, equi, tight)


def optimize_etf(d, n, seed=0, options=None):
    """Search for an (d, n) ETF by projected gradient descent.

    The objective sums squared deviations of the pairwise overlaps from the
    Welch value plus a penalty on ||Phi Phi^dag - (n/d) I||_F^2. Descent
    flattens out well above ``success_tol`` for some pairs (SICs in d=3),
    so every restart is finished by a least-squares solve (Levenberg-Marquardt)
    on the same objective unless ``options.polish`` is off. Each restart
    begins from independent random kets drawn from ``default_rng((seed, r))``.
    The best restart (smallest residual, earliest on ties) is reported; the
    result carries a frame only when that residual is at most
    ``options.success_tol``.
    """
    opts = options or OptimizeOptions()
    params = etf_parameters(d, n)
    c, S = float(params.c), float(params.S)
    best = None
    residuals = []
    for r in range(opts.restarts):
        rng = np.random.default_rng((seed, r))
        start = _normalize_rows(complex_gaussian(rng, (n, d)))
        vectors, f, iters = _descend(start, c, S, opts)
        res = _max_residual(vectors)
        if opts.polish and n > 1 and res > 1e-13:
            polished, fp, _ = _polish(vectors, c, S, opts)
            res_p = _max_residual(polished)
            if res_p < res:
                vectors, f, res = polished, fp, res_p
        residuals.append(res)
        if best is None or res < best[0]:
            best = (res, r, iters, f, vectors)
        if res <= opts.success_tol:
            break
    res, r, iters, f, vectors = best
    if res <= opts.success_tol:
        frame = make_frame(
            canonicalize_phases(vectors),
            tol=max(opts.success_tol, default_tol()),
            name=f"optimized-{d}-{n}-seed{seed}",
        )
        return OptimizeResult(True, frame, res, r, iters, f, residuals)
    return OptimizeResult(False, None, res, r, iters, f, residuals)


# ----------------------------------------------------------------------------
# serialization


def frame_to_dict(frame_or_vectors):
    vectors = getattr(frame_or_vectors, "vectors", frame_or_vectors)
    vectors = canonicalize_phases(_as_vectors(vectors))
    n, d = vectors.shape
    return {
        "d": d,
        "n": n,
        "vectors": [[[float(z.real), float(z.imag)] for z in v] for v in vectors],
    }


def vectors_from_dict(data):
    try:
        d, n = int(data["d"]), int(data["n"])
        vectors = np.array(
            [[complex(re, im) for re, im in row] for row in data["vectors"]], dtype=complex
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed frame data: {exc}") from exc
    if vectors.shape != (n, d):
        raise ValueError(f"frame data declares (d={d}, n={n}) but holds shape {vectors.shape}")
    return vectors


def frame_from_dict(data, tol=None):
    return make_frame(vectors_from_dict(data), tol)


def dumps_frame(frame):
    # repr of a Python float already round-trips; 17 significant digits
    # is the agreed on-disk precision
    data = frame_to_dict(frame)
    body = ",\n    ".join(
        "[" + ", ".join(f"[{re:.17g}, {im:.17g}]" for re, im in row) + "]"
        for row in data["vectors"]
    )
    return f'{{\n  "d": {data["d"]},\n  "n": {data["n"]},\n  "vectors": [\n    {body}\n  ]\n}}\n'


def save_frame(frame, path):
    with open(path, "w") as fh:
        fh.write(dumps_frame(frame))


def load_frame(path, tol=None):
    with open(path) as fh:
        return frame_from_dict(json.load(fh), tol)
