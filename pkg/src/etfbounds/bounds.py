"""Uncertainty bounds for ETF-assigned POVMs and their certification.

Every bound takes the exact frame parameters and the purity tr(rho^2) of
the measured state. State-independent versions are separate functions so
that (n^2 - n)/(d^2 - 2d + n) stays an exact rational until the final log.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import entropy as ent
from .measurement import outcome_distribution, povm_from_frame
from .numerics import purity as state_purity

NUM_TOL = 1e-9
SAT_TOL = 1e-8
PURITY_CLAMP = 1e-12

RENYI_ALPHAS = (2.0, 3.0, 5.0, 10.0, math.inf)
TSALLIS_ALPHAS = (0.5, 1.0, 1.5, 2.0)
DEFAULT_ALPHAS = TSALLIS_ALPHAS + RENYI_ALPHAS[1:]
DEFAULT_FAMILIES = ("ic", "maxprob", "min_entropy", "collision", "renyi", "tsallis")
ALL_FAMILIES = DEFAULT_FAMILIES + ("state_independent", "inefficiency")


def check_purity(params, purity):
    lo = 1.0 / params.d
    if purity < lo - PURITY_CLAMP or purity > 1.0 + PURITY_CLAMP:
        raise ValueError(f"purity {purity!r} outside [1/d, 1] = [{lo:.6g}, 1]")
    return min(max(purity, lo), 1.0)


def _renyi_order(alpha):
    alpha = float(alpha)
    if not alpha >= 2.0:
        raise ValueError(f"Renyi bounds need alpha in [2, inf], got {alpha}")
    return alpha


def _tsallis_order(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"Tsallis bounds need alpha in (0, 2], got {alpha}")
    return alpha


def _ic_numerator(params, purity):
    # S c + (1 - c) tr(rho^2)
    return params.s * params.overlap + (1.0 - params.overlap) * purity


def _sqrt_term(params, purity, excess=None):
    # S + sqrt((n - 1)(1 - c)) sqrt(n tr(rho^2) - S)
    n, S, c = params.n, params.s, params.overlap
    if excess is None:
        excess = n * purity - S
    return S + math.sqrt((n - 1) * (1.0 - c)) * math.sqrt(max(excess, 0.0))


def purity_excess(rho):
    """tr(rho^2) - 1/d evaluated as ||rho - I/d||_F^2.

    The square root in the max-probability bounds amplifies the rounding
    error of the direct difference near the maximally mixed state.
    """
    rho = np.asarray(rho, dtype=complex)
    dev = rho - np.eye(rho.shape[0]) / rho.shape[0]
    return float(np.sum(np.abs(dev) ** 2))


def coincidence_excess(p):
    """n sum p^2 - 1 evaluated as n sum (p - 1/n)^2."""
    p = np.asarray(p, dtype=float)
    return float(p.size * np.sum((p - 1.0 / p.size) ** 2))


def si_ratio(params):
    """(n^2 - n)/(d^2 - 2d + n) as a Fraction; 1 when n = d."""
    d, n = params.d, params.n
    if n == d:
        return Fraction(1)
    return Fraction(n * n - n, d * d - 2 * d + n)


def ic_bound(params, purity):
    """Upper bound (S c + (1 - c) tr rho^2) / S^2 on the index of coincidence."""
    purity = check_purity(params, purity)
    return _ic_numerator(params, purity) / params.s**2


def ic_bound_si(params):
    return float(1 / si_ratio(params))


def max_prob_bound_ic(ic, n, excess=None):
    """(1/n)(1 + sqrt(n - 1) sqrt(n I - 1)) for index of coincidence I.

    ``excess`` optionally supplies n I - 1 computed without cancellation.
    """
    if ic < 1.0 / n - PURITY_CLAMP or ic > 1.0 + PURITY_CLAMP:
        raise ValueError(f"index of coincidence {ic!r} outside [1/n, 1]")
    ic = min(max(ic, 1.0 / n), 1.0)
    if excess is None:
        excess = n * ic - 1.0
    return (1.0 + math.sqrt(n - 1) * math.sqrt(max(excess, 0.0))) / n


def max_prob_bound_purity(params, purity, excess=None):
    """Upper bound on max_j p_j; ``excess`` optionally supplies n tr(rho^2) - S."""
    purity = check_purity(params, purity)
    value = _sqrt_term(params, purity, excess) / (params.n * params.s)
    return min(value, params.d / params.n)


def max_prob_bound_si(params):
    return params.d / params.n


def min_entropy_bound(params, purity, excess=None):
    purity = check_purity(params, purity)
    return math.log(params.n * params.s) - math.log(_sqrt_term(params, purity, excess))


def collision_bound(params, purity):
    purity = check_purity(params, purity)
    return 2.0 * math.log(params.s) - math.log(_ic_numerator(params, purity))


def collision_bound_si(params):
    return math.log(si_ratio(params))


def renyi_bound(params, purity, alpha, excess=None):
    """State-dependent lower bound on R_alpha for alpha in [2, inf]."""
    alpha = _renyi_order(alpha)
    if math.isinf(alpha):
        return min_entropy_bound(params, purity, excess)
    purity = check_purity(params, purity)
    S, n = params.s, params.n
    head = alpha * math.log(S) + (alpha - 2.0) * math.log(n) - math.log(_ic_numerator(params, purity))
    return head / (alpha - 1.0) - (alpha - 2.0) / (alpha - 1.0) * math.log(_sqrt_term(params, purity, excess))


def renyi_bound_si(params, alpha):
    alpha = _renyi_order(alpha)
    d, n = params.d, params.n
    if n == d:
        return 0.0
    if math.isinf(alpha):
        return math.log(Fraction(n, d))
    tail = math.log(Fraction(n - 1, d * d - 2 * d + n))
    return math.log(n) - (alpha - 2.0) * math.log(d) / (alpha - 1.0) + tail / (alpha - 1.0)


def tsallis_bound(params, purity, alpha):
    alpha = _tsallis_order(alpha)
    purity = check_purity(params, purity)
    return ent.alpha_log(params.s**2 / _ic_numerator(params, purity), alpha)


def tsallis_bound_si(params, alpha):
    alpha = _tsallis_order(alpha)
    return ent.alpha_log(float(si_ratio(params)), alpha)


def inefficiency_tsallis_bound(params, purity, alpha, eta):
    """Lower bound on the Tsallis entropy of the eta-distorted distribution."""
    alpha = _tsallis_order(alpha)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return eta**alpha * tsallis_bound(params, purity, alpha) + ent.binary_tsallis(eta, alpha)


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    alpha: float | None
    bound_value: float
    achieved: float
    slack: float
    saturated: bool

    def holds(self, num_tol=NUM_TOL):
        return self.slack >= -num_tol


def _lower(name, alpha, bound, achieved, sat_tol):
    slack = achieved - bound
    return BoundReport(name, alpha, bound, achieved, slack, abs(slack) <= sat_tol)


def _upper(name, alpha, bound, achieved, sat_tol):
    slack = bound - achieved
    return BoundReport(name, alpha, bound, achieved, slack, abs(slack) <= sat_tol)


def certify(frame, rho, alphas=None, families=None, eta=None, sat_tol=SAT_TOL, povm=None):
    """Evaluate the requested bound families on one state.

    Parameters
    ----------
    frame : EquiangularTightFrame
    rho : array_like
        Density matrix of dimension ``frame.d``.
    alphas : iterable of float, optional
        Entropy orders. Each family keeps the orders inside its validity
        window: [2, inf] for Renyi, (0, 2] for Tsallis.
    families : iterable of str, optional
        Subset of ``ALL_FAMILIES``. Defaults to the state-dependent families,
        plus ``"inefficiency"`` when ``eta`` is given.
    eta : float, optional
        Detection efficiency for the inefficiency family.

    Returns
    -------
    list of BoundReport
    """
    alphas = DEFAULT_ALPHAS if alphas is None else tuple(float(a) for a in alphas)
    if families is None:
        families = DEFAULT_FAMILIES + (("inefficiency",) if eta is not None else ())
    families = tuple(families)
    unknown = set(families) - set(ALL_FAMILIES)
    if unknown:
        raise ValueError(f"unknown bound families: {sorted(unknown)}")
    if "inefficiency" in families and eta is None:
        raise ValueError("the inefficiency family needs eta")

    params = frame.params
    povm = povm_from_frame(frame) if povm is None else povm
    p = outcome_distribution(povm, rho).probs
    pur = check_purity(params, state_purity(rho))
    excess = params.n * purity_excess(rho)
    ic = float(np.dot(p, p))
    pmax = float(p.max())
    renyi_alphas = [a for a in alphas if a >= 2.0]
    tsallis_alphas = [a for a in alphas if 0.0 < a <= 2.0]

    rows = []
    if "ic" in families:
        rows.append(_upper("index_of_coincidence", None, ic_bound(params, pur), ic, sat_tol))
    if "maxprob" in families:
        rows.append(_upper("max_prob_ic", None, max_prob_bound_ic(ic, params.n, coincidence_excess(p)), pmax, sat_tol))
        rows.append(_upper("max_prob", None, max_prob_bound_purity(params, pur, excess), pmax, sat_tol))
    if "min_entropy" in families:
        rows.append(_lower("min_entropy", math.inf, min_entropy_bound(params, pur, excess), -math.log(pmax), sat_tol))
    if "collision" in families:
        rows.append(_lower("collision", 2.0, collision_bound(params, pur), -math.log(ic), sat_tol))
    if "renyi" in families:
        for a in renyi_alphas:
            rows.append(_lower("renyi", a, renyi_bound(params, pur, a, excess), ent.renyi_entropy(p, a), sat_tol))
    if "tsallis" in families:
        for a in tsallis_alphas:
            rows.append(_lower("tsallis", a, tsallis_bound(params, pur, a), ent.tsallis_entropy(p, a), sat_tol))
    if "inefficiency" in families:
        distorted = ent.distorted_distribution(p, eta)
        for a in tsallis_alphas:
            rows.append(
                _lower(
                    f"tsallis_eta{eta:g}",
                    a,
                    inefficiency_tsallis_bound(params, pur, a, eta),
                    ent.tsallis_entropy(distorted, a),
                    sat_tol,
                )
            )
    if "state_independent" in families:
        rows.append(_upper("max_prob_si", None, max_prob_bound_si(params), pmax, sat_tol))
        rows.append(_lower("collision_si", 2.0, collision_bound_si(params), -math.log(ic), sat_tol))
        for a in renyi_alphas:
            rows.append(_lower("renyi_si", a, renyi_bound_si(params, a), ent.renyi_entropy(p, a), sat_tol))
        for a in tsallis_alphas:
            rows.append(_lower("tsallis_si", a, tsallis_bound_si(params, a), ent.tsallis_entropy(p, a), sat_tol))
    return rows


CSV_HEADER = "bound_name,alpha,bound_value,achieved,slack,saturated"


def format_alpha(alpha):
    if alpha is None:
        return ""
    if math.isinf(alpha):
        return "inf"
    return f"{alpha:g}"


def report_csv_row(r):
    return (
        f"{r.bound_name},{format_alpha(r.alpha)},{r.bound_value:.17g},{r.achieved:.17g},"
        f"{r.slack:.17g},{'true' if r.saturated else 'false'}"
    )
