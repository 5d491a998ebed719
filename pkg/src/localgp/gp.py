"""Exact Gaussian process computations on small designs.

A ``GpState`` holds a j-point design together with the explicit inverse of
its correlation matrix, the log determinant, and the quadratic form
psi = Y' K^-1 Y.  Keeping K^-1 explicit (rather than only a factorization)
is deliberate: the variance-reduction criterion and the incremental
j -> j+1 update both consume K^-1 directly.

Predictive equations (zero-mean GP, scale-integrated-out posterior):

    mu(x)     = k(x)' K^-1 Y
    sigma2(x) = psi * [K(x,x) - k(x)' K^-1 k(x)] / j      with K(x,x) = 1 + eta
    Y(x)      ~ Student-t with df = j, so Var = sigma2 * j/(j-2) for j > 2.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.stats import t as student_t

from .kernels import KernelParams, corr_matrix, corr_vec

# Below this, the rank-one update of K^-1 has no reliable digits left.
DEGENERACY_TOL_FACTOR = 1e-10


class FactorizationError(ValueError):
    """Correlation matrix could not be factorized (not positive definite)."""


class DegenerateExtensionError(ValueError):
    """New point is numerically dependent on the current design."""


def degeneracy_tol(eta: float) -> float:
    return DEGENERACY_TOL_FACTOR * (1.0 + eta)


@dataclass
class GpState:
    """Design, responses, explicit K^-1, log|K|, psi, and kernel params."""

    X: np.ndarray
    Y: np.ndarray
    Kinv: np.ndarray
    logdet: float
    psi: float
    params: KernelParams

    @property
    def size(self) -> int:
        return self.X.shape[0]


@dataclass
class Prediction:
    """Student-t predictive summary at one location."""

    mean: float
    scale: float
    df: int
    variance: float | None
    interval95: tuple[float, float]


@lru_cache(maxsize=None)
def _t975(df: int) -> float:
    return float(student_t.ppf(0.975, df))


def _has_duplicate_rows(X: np.ndarray) -> bool:
    if X.shape[0] < 2:
        return False
    order = np.lexsort(X.T)
    Xs = X[order]
    return bool(np.any(np.all(Xs[1:] == Xs[:-1], axis=1)))


def build_state(X, Y, params: KernelParams) -> GpState:
    """Assemble and factorize the correlation matrix of a design.

    On a failed factorization the nugget is escalated once to
    max(eta, 1e-8) and the attempt repeated; a second failure raises
    ``FactorizationError`` with condition diagnostics.
    """
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=float)))
    Y = np.ascontiguousarray(np.asarray(Y, dtype=float).ravel())
    if X.shape[0] < 1 or X.shape[0] != Y.shape[0]:
        raise ValueError(f"design/response shape mismatch: {X.shape} vs {Y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise ValueError("design and responses must be finite")
    if params.eta == 0.0 and _has_duplicate_rows(X):
        raise FactorizationError(
            "duplicate design rows with zero nugget make K exactly singular"
        )

    try:
        return _factorize(X, Y, params)
    except FactorizationError:
        escalated = params.with_eta(max(params.eta, 1e-8))
        if escalated.eta == params.eta:
            raise
        state = _factorize(X, Y, escalated)
        state.nugget_escalated = True  # type: ignore[attr-defined]
        return state


def _factorize(X, Y, params: KernelParams) -> GpState:
    K = corr_matrix(X, params)
    try:
        cf = cho_factor(K, lower=True)
    except np.linalg.LinAlgError as err:
        cond = np.linalg.cond(K)
        raise FactorizationError(
            f"correlation matrix not positive definite "
            f"(j={K.shape[0]}, cond~{cond:.3e}, eta={params.eta:g}): {err}"
        ) from err
    diag = np.diag(cf[0])
    if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
        raise FactorizationError(
            f"correlation matrix factorization degenerate "
            f"(j={K.shape[0]}, eta={params.eta:g})"
        )
    Kinv = cho_solve(cf, np.eye(K.shape[0]))
    Kinv = np.ascontiguousarray((Kinv + Kinv.T) / 2.0)
    logdet = 2.0 * float(np.sum(np.log(diag)))
    psi = float(Y @ Kinv @ Y)
    return GpState(X=X, Y=Y, Kinv=Kinv, logdet=logdet, psi=psi, params=params)


def log_marg_lik(state: GpState) -> float:
    """Log marginal likelihood of the responses given the correlation.

    log Gamma(j/2) - (j/2) log(2 pi) - log|K|/2 - (j/2) log(psi/2).
    """
    from scipy.special import gammaln

    j = state.size
    return float(
        gammaln(j / 2.0)
        - (j / 2.0) * np.log(2.0 * np.pi)
        - 0.5 * state.logdet
        - (j / 2.0) * np.log(state.psi / 2.0)
    )


def predict(state: GpState, x) -> Prediction:
    """Predictive mean, scale and 95% Student-t interval at one point."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != state.X.shape[1]:
        raise ValueError(f"query dimension {x.shape[0]} != design dimension {state.X.shape[1]}")
    k = corr_vec(state.X, x, state.params)
    w = state.Kinv @ k
    j = state.size
    bracket = (1.0 + state.params.eta) - float(k @ w)
    mean = float(w @ state.Y)
    scale = state.psi * max(bracket, 0.0) / j
    variance = scale * j / (j - 2) if j > 2 else None
    half = _t975(j) * np.sqrt(scale)
    return Prediction(
        mean=mean,
        scale=scale,
        df=j,
        variance=variance,
        interval95=(mean - half, mean + half),
    )


def predict_batch(state: GpState, Xref) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized predictive means and scales over many locations.

    Returns (means, scales); identical values to per-point ``predict``.
    """
    from .kernels import corr_cross

    Xref = np.atleast_2d(np.asarray(Xref, dtype=float))
    Kc = corr_cross(state.X, Xref, state.params)
    W = state.Kinv @ Kc
    j = state.size
    brackets = (1.0 + state.params.eta) - np.einsum("jm,jm->m", Kc, W)
    means = W.T @ state.Y
    scales = state.psi * np.maximum(brackets, 0.0) / j
    return means, scales


def extend_state(state: GpState, x_new, y_new: float) -> GpState:
    """Grow a state by one design point in O(j^2) via the partitioned
    inverse; equals a full rebuild on the stacked design.

    Raises ``DegenerateExtensionError`` when the conditional variance
    v = K(x,x) - k' K^-1 k of the new point falls below tolerance.
    """
    x_new = np.asarray(x_new, dtype=float).ravel()
    eta = state.params.eta
    k = corr_vec(state.X, x_new, state.params)
    w = state.Kinv @ k
    v = (1.0 + eta) - float(k @ w)
    if v <= degeneracy_tol(eta):
        raise DegenerateExtensionError(
            f"conditional variance {v:.3e} below tolerance {degeneracy_tol(eta):.3e}"
        )
    j = state.size
    Kinv = np.empty((j + 1, j + 1))
    Kinv[:j, :j] = state.Kinv + np.outer(w, w) / v
    Kinv[:j, j] = -w / v
    Kinv[j, :j] = -w / v
    Kinv[j, j] = 1.0 / v
    resid = float(w @ state.Y) - float(y_new)
    return GpState(
        X=np.vstack([state.X, x_new[None, :]]),
        Y=np.append(state.Y, y_new),
        Kinv=np.ascontiguousarray(Kinv),
        logdet=state.logdet + float(np.log(v)),
        psi=state.psi + resid * resid / v,
        params=state.params,
    )
