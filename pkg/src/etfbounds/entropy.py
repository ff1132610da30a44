"""Renyi and Tsallis entropies in nats, the alpha-logarithm, and the
distribution seen by a detector of efficiency eta.

Orders within ``SHANNON_WINDOW`` of 1 use the Shannon branch. The
min-entropy order is ``math.inf`` and is handled by an exact branch.
"""

import math

import numpy as np

INF = math.inf
SHANNON_WINDOW = 1e-6
PROB_TOL = 1e-9


def _check_alpha(alpha, allow_inf=True):
    alpha = float(alpha)
    if math.isnan(alpha) or alpha <= 0:
        raise ValueError(f"entropy order must be positive, got {alpha}")
    if math.isinf(alpha) and not allow_inf:
        raise ValueError("infinite order is not allowed here")
    return alpha


def _near_one(alpha):
    return abs(alpha - 1.0) <= SHANNON_WINDOW


def check_distribution(p, tol=PROB_TOL):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("a distribution must be a non-empty 1-D array")
    if not np.all(np.isfinite(p)):
        raise ValueError("distribution has non-finite entries")
    if p.min() < -tol:
        raise ValueError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {p.sum():.12g}")
    return np.clip(p, 0.0, None)


def alpha_log(xi, alpha):
    """ln_alpha(xi) = (xi^(1-alpha) - 1) / (1 - alpha), ln(xi) at alpha = 1."""
    alpha = _check_alpha(alpha, allow_inf=False)
    if xi <= 0:
        raise ValueError(f"alpha-logarithm needs a positive argument, got {xi}")
    if _near_one(alpha):
        return math.log(xi)
    return math.expm1((1.0 - alpha) * math.log(xi)) / (1.0 - alpha)


def shannon_entropy(p):
    p = check_distribution(p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def _power_sum(p, alpha):
    nz = p[p > 0]
    return float(np.sum(nz**alpha))


def renyi_entropy(p, alpha):
    """R_alpha(p) = ln(sum_j p_j^alpha) / (1 - alpha).

    Shannon entropy near alpha = 1 and -ln(max p) for alpha = inf.
    """
    alpha = _check_alpha(alpha)
    p = check_distribution(p)
    if math.isinf(alpha):
        return -math.log(p.max())
    if _near_one(alpha):
        return shannon_entropy(p)
    return math.log(_power_sum(p, alpha)) / (1.0 - alpha)


def tsallis_entropy(p, alpha):
    alpha = _check_alpha(alpha, allow_inf=False)
    p = check_distribution(p)
    if _near_one(alpha):
        return shannon_entropy(p)
    return (_power_sum(p, alpha) - 1.0) / (1.0 - alpha)


def binary_tsallis(eta, alpha):
    """h_alpha(eta) = (eta^alpha + (1-eta)^alpha - 1) / (1 - alpha)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return tsallis_entropy(np.array([eta, 1.0 - eta]), alpha)


def distorted_distribution(p, eta):
    """Scale outcomes by eta and append the no-click probability 1 - eta."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    p = check_distribution(p)
    return np.append(eta * p, 1.0 - eta)


def index_of_coincidence(p):
    p = check_distribution(p)
    return float(np.dot(p, p))
