"""Entanglement and steering tests built from ETF measurements.

Bipartite operators use the composite index a * dB + b. The Bob-side
frame of the joint measurement is the complex conjugate of Alice's, so
that the maximally entangled state gives the textbook correlation d/n.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import entropy as ent
from .bounds import NUM_TOL, check_purity, format_alpha, ic_bound, si_ratio
from .measurement import clamp_probabilities
from .numerics import check_density, kron, partial_trace, random_density


@dataclass(frozen=True, eq=False)
class BipartiteState:
    matrix: np.ndarray = field(repr=False)
    dA: int
    dB: int

    def __post_init__(self):
        if self.matrix.shape != (self.dA * self.dB, self.dA * self.dB):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match dA={self.dA}, dB={self.dB}")

    def reduced(self, keep):
        return partial_trace(self.matrix, (self.dA, self.dB), keep)

    @property
    def rho_A(self):
        return self.reduced(0)

    @property
    def rho_B(self):
        return self.reduced(1)


def bipartite(matrix, dA, dB=None, tol=None):
    """Validate ``matrix`` as a state on C^dA (x) C^dB."""
    dB = dA if dB is None else dB
    state = BipartiteState(check_density(matrix, tol), int(dA), int(dB))
    check_density(state.rho_A, tol)
    check_density(state.rho_B, tol)
    return state


def product_state(rho_a, rho_b):
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    return bipartite(kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def max_entangled_state(d):
    """|Phi+> = d^(-1/2) sum_v |v>|v> as a density matrix."""
    if d < 2:
        raise ValueError("a maximally entangled state needs d >= 2")
    psi = np.eye(d, dtype=complex).reshape(d * d) / math.sqrt(d)
    return bipartite(np.outer(psi, psi.conj()), d, d)


def random_separable_state(d, k=1, seed=0, dB=None):
    """sum_m w_m rho_A^(m) (x) rho_B^(m) with Dirichlet(1, ..., 1) weights.

    Each factor is a Ginibre density matrix of random rank 1..dim.
    """
    if k < 1:
        raise ValueError("need at least one product component")
    dB = d if dB is None else dB
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(k))
    total = np.zeros((d * dB, d * dB), dtype=complex)
    for w in weights:
        ra = random_density(d, int(rng.integers(1, d + 1)), rng)
        rb = random_density(dB, int(rng.integers(1, dB + 1)), rng)
        total += w * np.kron(ra, rb)
    total = 0.5 * (total + total.conj().T)
    return bipartite(total / np.trace(total).real, d, dB)


def _elements(povm):
    return np.asarray(getattr(povm, "elements", povm), dtype=complex)


def convolution_povm(povm_a, povm_b, tol=1e-10):
    """M_k = sum_j N_A,j (x) N_B,(k - j mod n)."""
    ea, eb = _elements(povm_a), _elements(povm_b)
    n = ea.shape[0]
    if eb.shape[0] != n:
        raise ValueError(f"outcome counts differ: {n} vs {eb.shape[0]}")
    da, db = ea.shape[1], eb.shape[1]
    out = np.zeros((n, da * db, da * db), dtype=complex)
    for k in range(n):
        for j in range(n):
            out[k] += np.kron(ea[j], eb[(k - j) % n])
    resid = np.max(np.abs(out.sum(axis=0) - np.eye(da * db)))
    if resid > tol:
        raise ValueError(f"convolved elements do not sum to the identity (residual {resid:.3g})")
    return out


def povm_distribution(elements, rho):
    """tr(E_k rho) for a stack of POVM elements."""
    rho = np.asarray(getattr(rho, "matrix", rho), dtype=complex)
    raw = np.einsum("kab,ba->k", _elements(elements), rho).real
    return clamp_probabilities(raw)[0]


def circular_convolution(p, q):
    p, q = np.asarray(p), np.asarray(q)
    n = p.size
    return np.array([sum(p[j] * q[(k - j) % n] for j in range(n)) for k in range(n)])


@dataclass(frozen=True)
class WitnessVerdict:
    criterion: str
    alpha: float | None
    statistic: float
    threshold: float
    violated: bool
    interpretation: str


def _verdict(criterion, alpha, statistic, threshold, below, positive, num_tol):
    # below: the criterion is violated when the statistic drops under the threshold
    margin = threshold - statistic if below else statistic - threshold
    violated = bool(margin > num_tol)
    return WitnessVerdict(
        criterion, alpha, float(statistic), float(threshold), violated,
        positive if violated else "inconclusive",
    )


def _tsallis_window(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    return alpha


def separability_threshold(params, alpha):
    """ln_alpha((n^2 - n)/(d^2 - 2d + n)), shared by the Tsallis and steering tests."""
    return ent.alpha_log(float(si_ratio(params)), alpha)


def separability_tsallis_test(dist_m, alpha, params_a, num_tol=NUM_TOL):
    """Separable states keep H_alpha of the convolved distribution above threshold."""
    alpha = _tsallis_window(alpha)
    stat = ent.tsallis_entropy(dist_m, alpha)
    return _verdict("tsallis_separability", alpha, stat, separability_threshold(params_a, alpha),
                    True, "entangled", num_tol)


def separability_maxprob_test(dist_m, params_a, num_tol=NUM_TOL):
    stat = float(np.max(np.asarray(dist_m, dtype=float)))
    return _verdict("maxprob_separability", None, stat, params_a.d / params_a.n,
                    False, "entangled", num_tol)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    table: np.ndarray

    @property
    def n(self):
        return self.table.shape[0]

    @property
    def marginal_a(self):
        return self.table.sum(axis=1)

    @property
    def marginal_b(self):
        return self.table.sum(axis=0)


def joint_etf_distribution(frame, rho_ab, frame_b=None):
    """p_jk = (d^2/n^2) <phi_j phi_k^*| rho_AB |phi_j phi_k^*>.

    ``frame_b`` defaults to ``frame``; its vectors are conjugated either way.
    """
    frame_b = frame if frame_b is None else frame_b
    state = rho_ab if isinstance(rho_ab, BipartiteState) else None
    rho = np.asarray(getattr(rho_ab, "matrix", rho_ab), dtype=complex)
    da, db = frame.d, frame_b.d
    if rho.shape != (da * db, da * db) or (state is not None and (state.dA, state.dB) != (da, db)):
        raise ValueError(f"state of shape {rho.shape} does not match frame dims ({da}, {db})")
    a = frame.vectors
    b = frame_b.vectors.conj()
    r = rho.reshape(da, db, da, db)
    amp = np.einsum("ja,kb,abcd,jc,kd->jk", a.conj(), b.conj(), r, a, b).real
    scale = (da / frame.n) * (db / frame_b.n)
    table = scale * amp
    flat, _ = clamp_probabilities(table.ravel())
    return JointDistribution(flat.reshape(table.shape))


def correlation_G(joint):
    table = getattr(joint, "table", joint)
    return float(np.trace(table))


def g_separability_bound(params, purity_a, purity_b):
    """Cauchy-Schwarz bound on G for a product state with the given purities."""
    return math.sqrt(ic_bound(params, check_purity(params, purity_a))) * math.sqrt(
        ic_bound(params, check_purity(params, purity_b))
    )


def g_bound_si(params):
    return float(1 / si_ratio(params))


def g_test(joint, params, num_tol=NUM_TOL):
    return _verdict("g_correlation", None, correlation_G(joint), g_bound_si(params),
                    False, "entangled", num_tol)


def detectability_ratio(d, n):
    """G-bound over G(Phi+): (d - 2 + n/d)/(n - 1); 1 when n = d."""
    if not 1 <= d <= n <= d * d:
        raise ValueError(f"need d <= n <= d^2, got d={d}, n={n}")
    if n == d:
        return 1.0
    return (d - 2 + n / d) / (n - 1)


def steering_statistic(joint, alpha):
    """(1 - sum_ij p_ij^alpha q_i^(1-alpha)) / (alpha - 1), q_i = sum_j p_ij.

    Rows with q_i = 0 are skipped. Near alpha = 1 this is the conditional
    Shannon entropy sum_i q_i H(p_.|i).
    """
    alpha = _tsallis_window(alpha)
    table = np.asarray(getattr(joint, "table", joint), dtype=float)
    q = table.sum(axis=1)
    total = 0.0
    if abs(alpha - 1.0) <= ent.SHANNON_WINDOW:
        for qi, row in zip(q, table):
            if qi > 0:
                cond = row[row > 0] / qi
                total -= qi * float(np.sum(cond * np.log(cond)))
        return total
    for qi, row in zip(q, table):
        if qi > 0:
            nz = row[row > 0]
            total += float(np.sum(nz**alpha)) * qi ** (1.0 - alpha)
    return (1.0 - total) / (alpha - 1.0)


def steering_test(joint, alpha, params, num_tol=NUM_TOL):
    alpha = _tsallis_window(alpha)
    return _verdict("steering", alpha, steering_statistic(joint, alpha),
                    separability_threshold(params, alpha), True, "steerable", num_tol)


CSV_HEADER = "criterion,alpha,statistic,threshold,violated"


def verdict_csv_row(v):
    return (
        f"{v.criterion},{format_alpha(v.alpha)},{v.statistic:.17g},{v.threshold:.17g},"
        f"{'true' if v.violated else 'false'}"
    )
