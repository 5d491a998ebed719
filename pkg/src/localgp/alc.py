"""Reduction-in-variance criterion for greedy local design.

Adding a candidate x_cand to a j-point design shrinks the predictive
bracket K(x,x) - k(x)' K^-1 k(x) at the reference location x_ref by

    ( k_ref' K^-1 k_cand - K(x_cand, x_ref) )^2 / v(x_cand),

where v(x_cand) = K(x_cand,x_cand) - k_cand' K^-1 k_cand is the
conditional variance of the candidate.  This is the exact bracket
difference between the j- and (j+1)-point fits (all Y-independent and
scale-free factors dropped: only the argmax over candidates matters),
and costs O(j^2) per candidate once K^-1 is available.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .gp import GpState, degeneracy_tol
from .kernels import corr, corr_cross, corr_vec

INADMISSIBLE = -np.inf


class InadmissibleCandidateError(ValueError):
    """Candidate is numerically dependent on the current design."""


@dataclass
class AlcScratch:
    """Per-candidate auxiliary quantities (exposed mainly for testing)."""

    kxprime: np.ndarray   # correlations of the candidate to the design
    g: np.ndarray         # K^-1 kxprime / v
    v: float              # conditional variance of the candidate
    kx: np.ndarray        # correlations of the reference point to the design


def _scratch(state: GpState, x_cand, x_ref) -> AlcScratch:
    kxprime = corr_vec(state.X, np.asarray(x_cand, dtype=float), state.params)
    w = state.Kinv @ kxprime
    v = (1.0 + state.params.eta) - float(kxprime @ w)
    kx = corr_vec(state.X, np.asarray(x_ref, dtype=float), state.params)
    g = w / v if v != 0.0 else np.full_like(w, np.nan)
    return AlcScratch(kxprime=kxprime, g=g, v=v, kx=kx)


def alc_reduction(state: GpState, x_cand, x_ref) -> float:
    """Reduction in the predictive bracket at x_ref from adding x_cand.

    Raises ``InadmissibleCandidateError`` for degenerate candidates
    (v below tolerance); such points must never be selected.
    """
    if not state.params.isotropic:
        raise ValueError("local design criterion requires an isotropic lengthscale")
    x_cand = np.asarray(x_cand, dtype=float).ravel()
    x_ref = np.asarray(x_ref, dtype=float).ravel()
    val = alc_point(
        state.X, state.Kinv, x_cand, x_ref,
        float(state.params.theta), state.params.eta,
    )
    if val == INADMISSIBLE:
        raise InadmissibleCandidateError(
            f"candidate conditional variance below {degeneracy_tol(state.params.eta):.3e}"
        )
    return float(val)


def alc_batch(state: GpState, candidates, x_ref, kx=None) -> np.ndarray:
    """Vectorized ``alc_reduction`` over candidate rows.

    Inadmissible candidates are flagged with -inf, which orders them
    below every admissible value in an argmax.  ``kx`` may carry the
    precomputed reference correlations k_j(x_ref).
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    x_ref = np.asarray(x_ref, dtype=float).ravel()
    eta = state.params.eta
    Kc = corr_cross(state.X, candidates, state.params)
    W = state.Kinv @ Kc
    v = (1.0 + eta) - np.einsum("jm,jm->m", Kc, W)
    if kx is None:
        kx = corr_vec(state.X, x_ref, state.params)
    tnum = kx @ W - corr_cross(candidates, x_ref[None, :], state.params)[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        red = np.where(v > degeneracy_tol(eta), tnum * tnum / v, INADMISSIBLE)
    return red


@njit(cache=True)
def alc_point(X, Kinv, x_cand, x_ref, theta, eta):
    """Scalar criterion evaluation; -inf flags an inadmissible candidate.

    Plain-loop form so Numba can compile it; this is the innermost call
    of the continuous ray search.
    """
    j, p = X.shape
    kc = np.empty(j)
    for i in range(j):
        d2 = 0.0
        for q in range(p):
            diff = X[i, q] - x_cand[q]
            d2 += diff * diff
        kc[i] = math.exp(-d2 / theta)
    v = 1.0 + eta
    tnum = 0.0
    for i in range(j):
        wi = 0.0
        for q in range(j):
            wi += Kinv[i, q] * kc[q]
        v -= kc[i] * wi
        d2 = 0.0
        for q in range(p):
            diff = X[i, q] - x_ref[q]
            d2 += diff * diff
        tnum += math.exp(-d2 / theta) * wi
    if v <= 1e-10 * (1.0 + eta):
        return -np.inf
    d2 = 0.0
    for q in range(p):
        diff = x_cand[q] - x_ref[q]
        d2 += diff * diff
    tnum -= math.exp(-d2 / theta)
    return tnum * tnum / v
