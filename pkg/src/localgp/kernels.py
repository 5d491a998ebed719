"""Gaussian correlation functions and squared-distance primitives.

Correlation between inputs decays as exp(-d2/theta) where d2 is the
squared Euclidean distance, either with a single lengthscale theta
(isotropic) or one lengthscale per coordinate (separable).  A nugget eta
is added on the diagonal of correlation matrices only: two distinct rows
with identical coordinates still correlate at 1, which is what keeps the
matrix semantics of K consistent (and is why ``same_index`` is a row
identity flag, not a coordinate test).
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class KernelParams:
    """Lengthscale(s) and nugget of the Gaussian correlation family.

    theta is a positive scalar (isotropic) or a positive p-vector
    (separable); eta is a nonnegative nugget applied to same-row pairs.
    """

    theta: float | np.ndarray
    eta: float = 0.0

    def __post_init__(self):
        th = self.theta
        if np.ndim(th) > 0:
            th = np.asarray(th, dtype=float)
            object.__setattr__(self, "theta", th)
            if th.ndim != 1 or th.size == 0 or np.any(th <= 0) or not np.all(np.isfinite(th)):
                raise ValueError(f"lengthscales must be positive and finite, got {th}")
        else:
            if not (th > 0 and np.isfinite(th)):
                raise ValueError(f"lengthscale must be positive and finite, got {th}")
        if not (self.eta >= 0 and np.isfinite(self.eta)):
            raise ValueError(f"nugget must be nonnegative and finite, got {self.eta}")

    @property
    def isotropic(self) -> bool:
        return np.ndim(self.theta) == 0

    def with_theta(self, theta) -> "KernelParams":
        return KernelParams(theta, self.eta)

    def with_eta(self, eta: float) -> "KernelParams":
        return KernelParams(self.theta, eta)


def sq_dist(x, x2) -> float:
    """Squared Euclidean distance between two p-vectors."""
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    d = x - x2
    return float(d @ d)


def iso_corr(x, x2, params: KernelParams, same_index: bool = False) -> float:
    """Isotropic Gaussian correlation exp(-|x-x2|^2/theta), plus the
    nugget when both arguments refer to the same training row."""
    if not params.isotropic:
        raise ValueError("iso_corr requires a scalar lengthscale")
    k = float(np.exp(-sq_dist(x, x2) / params.theta))
    return k + params.eta if same_index else k


def sep_corr(x, x2, theta_vec, eta: float = 0.0, same_index: bool = False) -> float:
    """Separable Gaussian correlation exp(-sum_k (x_k-x2_k)^2/theta_k)."""
    theta_vec = np.asarray(theta_vec, dtype=float)
    if np.any(theta_vec <= 0):
        raise ValueError(f"lengthscales must be positive, got {theta_vec}")
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x.shape != x2.shape or x.shape != theta_vec.shape:
        raise ValueError("dimension mismatch between inputs and lengthscales")
    k = float(np.exp(-np.sum((x - x2) ** 2 / theta_vec)))
    return k + eta if same_index else k


def corr(x, x2, params: KernelParams, same_index: bool = False) -> float:
    """Single evaluation interface: dispatches on the lengthscale shape."""
    if params.isotropic:
        return iso_corr(x, x2, params, same_index)
    return sep_corr(x, x2, params.theta, params.eta, same_index)


def _scaled(X, params: KernelParams):
    # Separable correlation == isotropic correlation on inputs divided by
    # sqrt(theta_k); funnels both families through one pairwise kernel.
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if params.isotropic:
        return X / np.sqrt(params.theta)
    return X / np.sqrt(params.theta)[None, :]


def corr_matrix(X, params: KernelParams) -> np.ndarray:
    """j x j correlation matrix of a design, nugget on the diagonal."""
    Z = _scaled(X, params)
    K = np.exp(-cdist(Z, Z, "sqeuclidean"))
    if params.eta != 0.0:
        K[np.diag_indices_from(K)] += params.eta
    return K


def corr_cross(X, X2, params: KernelParams) -> np.ndarray:
    """j x m cross-correlation matrix between two point sets (no nugget)."""
    Z = _scaled(X, params)
    Z2 = _scaled(X2, params)
    return np.exp(-cdist(Z, Z2, "sqeuclidean"))


def corr_vec(X, x, params: KernelParams) -> np.ndarray:
    """Correlations of one point x against the rows of X (no nugget)."""
    x = np.asarray(x, dtype=float)
    return corr_cross(X, x[None, :], params)[:, 0]
