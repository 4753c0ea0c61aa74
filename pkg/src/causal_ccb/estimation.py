"""Per-node parameter estimation and confidence radii.

Two estimators are provided: the maximum-likelihood estimator for GLM nodes
(a damped Newton solve of the score equation) and incremental ridge
regression for linear nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .links import LinkFunction, extend_link_range
from .model import ModelConstants

MLE_MAX_ITER = 200
MLE_TOL = 1e-8


class MLEConvergenceError(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(f"MLE did not converge after {iterations} iterations (residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


@dataclass
class NodeDataset:
    """Regression rows ``(V, x)`` for one node.

    ``V`` has the constant node's coordinate first (always 1).  Optional
    integer ``weights`` let identical rows be stored once.
    """

    V: np.ndarray
    x: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.V = np.atleast_2d(np.asarray(self.V, dtype=float))
        self.x = np.asarray(self.x, dtype=float).ravel()
        if self.V.shape[0] != self.x.shape[0]:
            raise ValueError("V and x must have the same number of rows")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).ravel()
            if self.weights.shape != self.x.shape:
                raise ValueError("weights must match rows")

    @classmethod
    def empty(cls, d: int) -> "NodeDataset":
        return cls(np.zeros((0, d)), np.zeros(0))

    @property
    def dim(self) -> int:
        return self.V.shape[1]

    def __len__(self) -> int:
        return self.x.shape[0]

    def compressed(self) -> "NodeDataset":
        """Merge identical ``(V, x)`` rows into weighted rows."""
        if len(self) == 0:
            return self
        w = self.weights if self.weights is not None else np.ones(len(self))
        key = np.concatenate([self.V, self.x[:, None]], axis=1)
        uniq, inv = np.unique(key, axis=0, return_inverse=True)
        counts = np.bincount(inv.ravel(), weights=w, minlength=uniq.shape[0])
        return NodeDataset(uniq[:, :-1], uniq[:, -1], counts)


@dataclass
class EllipsoidEstimate:
    """Center, Gram matrix and radius of a confidence ellipsoid."""

    theta_hat: np.ndarray
    M: np.ndarray
    rho: float | None = None
    converged: bool = True
    residual: float = 0.0
    iterations: int = 0

    def __post_init__(self) -> None:
        self.theta_hat = np.asarray(self.theta_hat, dtype=float)
        self.M = np.asarray(self.M, dtype=float)
        if self.M.shape != (self.theta_hat.size, self.theta_hat.size):
            raise ValueError("theta_hat and M dimensions disagree")
        if self.rho is not None and (not np.isfinite(self.rho) or self.rho < 0):
            raise ValueError("rho must be finite and non-negative")

    def with_rho(self, rho: float) -> "EllipsoidEstimate":
        return EllipsoidEstimate(self.theta_hat, self.M, rho, self.converged, self.residual, self.iterations)

    def contains(self, theta: np.ndarray) -> bool:
        d = np.asarray(theta, dtype=float) - self.theta_hat
        return float(d @ self.M @ d) <= (self.rho or 0.0) ** 2 + 1e-12


def _score_parts(V, x, w, theta, link):
    z = V @ theta
    f = link(z)
    g = V.T @ (w * (x - f))
    return z, f, g


def pseudo_likelihood(data: NodeDataset, link: LinkFunction, theta: np.ndarray) -> float:
    """Concave objective whose gradient is the MLE score."""
    w = data.weights if data.weights is not None else np.ones(len(data))
    z = data.V @ theta
    return float(np.sum(w * (data.x * z - link.antiderivative(z))))


def mle_estimate(
    data: NodeDataset,
    link: LinkFunction,
    theta0: np.ndarray | None = None,
    tol: float = MLE_TOL,
    max_iter: int = MLE_MAX_ITER,
    raise_on_failure: bool = False,
) -> EllipsoidEstimate:
    """Solve ``sum_i (x_i - f(V_i . theta)) V_i = 0`` by damped Newton.

    Newton directions use a least-norm solve so rank-deficient data converge
    to the stationary point of smallest norm (when started from zero).  Each
    step is halved until the pseudo-likelihood does not decrease.  The
    returned Gram matrix is ``sum_i V_i V_i^T``; ``rho`` is left unset.
    """
    d = data.dim
    if len(data) == 0:
        return EllipsoidEstimate(np.zeros(d), np.zeros((d, d)))
    if link.kind == "tabulated":
        raise ValueError("GLM estimation rejects tabulated links")
    if link.kind == "logistic" and not link.extended:
        link = extend_link_range(link, max(d - 1, 0))
    data = data.compressed()
    V, x, w = data.V, data.x, data.weights
    M = (V * w[:, None]).T @ V
    theta = np.zeros(d) if theta0 is None else np.asarray(theta0, dtype=float).copy()
    if link.kind == "identity":
        theta = np.linalg.lstsq(M, V.T @ (w * x), rcond=None)[0]
        # one refinement pass against rounding error
        _, _, g = _score_parts(V, x, w, theta, link)
        theta = theta + np.linalg.lstsq(M, g, rcond=None)[0]
        _, _, g = _score_parts(V, x, w, theta, link)
        res = float(np.max(np.abs(g))) if g.size else 0.0
        return EllipsoidEstimate(theta, M, None, res <= tol, res, 1)
    obj = pseudo_likelihood(data, link, theta)
    res = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        z, _, g = _score_parts(V, x, w, theta, link)
        res = float(np.max(np.abs(g)))
        if res <= tol:
            break
        H = (V * (w * link.deriv(z))[:, None]).T @ V
        step = np.linalg.lstsq(H, g, rcond=None)[0]
        alpha = 1.0
        while True:
            cand = theta + alpha * step
            new = pseudo_likelihood(data, link, cand)
            # near the optimum the objective only moves by rounding error
            if new >= obj - 1e-12 * (1.0 + abs(obj)) or alpha < 1e-12:
                break
            alpha *= 0.5
        theta, obj = cand, new
    else:
        _, _, g = _score_parts(V, x, w, theta, link)
        res = float(np.max(np.abs(g)))
    ok = res <= tol
    if not ok and raise_on_failure:
        raise MLEConvergenceError(res, it)
    return EllipsoidEstimate(theta, M, None, ok, res, it)


@dataclass
class RegressionState:
    """Ridge regression state with ``M = I + sum V V^T``."""

    M: np.ndarray
    b: np.ndarray
    theta_hat: np.ndarray

    @classmethod
    def initial(cls, d: int) -> "RegressionState":
        return cls(np.eye(d), np.zeros(d), np.zeros(d))

    @property
    def dim(self) -> int:
        return self.b.size


def ridge_update(state: RegressionState, V: np.ndarray, x: float) -> RegressionState:
    """Add one observation and re-solve ``theta = M^{-1} b``."""
    V = np.asarray(V, dtype=float).ravel()
    if V.size != state.dim:
        raise ValueError("dimension mismatch")
    M = state.M + np.outer(V, V)
    b = state.b + float(x) * V
    return RegressionState(M, b, np.linalg.solve(M, b))


def ridge_batch(Vs: np.ndarray, xs: np.ndarray) -> RegressionState:
    """Direct recomputation of the ridge state from all rows."""
    Vs = np.atleast_2d(np.asarray(Vs, dtype=float))
    M = np.eye(Vs.shape[1]) + Vs.T @ Vs
    b = Vs.T @ np.asarray(xs, dtype=float)
    return RegressionState(M, b, np.linalg.solve(M, b))


def confidence_radius_ofu(kappa: float, delta: float) -> float:
    """``(3 / kappa) sqrt(ln(1 / delta))``."""
    if not kappa > 0 or not 0 < delta < 1:
        raise ValueError("need kappa > 0 and 0 < delta < 1")
    return 3.0 / kappa * math.sqrt(math.log(1.0 / delta))


def confidence_radius_lr(n: int, t: int, delta: float) -> float:
    """``sqrt(n ln(1 + t n) + 2 ln(1 / delta)) + sqrt(n)``."""
    if n < 1 or t < 0 or not 0 < delta <= 1:
        raise ValueError("need n >= 1, t >= 0 and 0 < delta <= 1")
    return math.sqrt(n * math.log1p(t * n) + 2.0 * math.log(1.0 / delta)) + math.sqrt(n)


def second_init_length(n: int, constants: ModelConstants, delta: float) -> int:
    """Length of the null-intervention phase that follows discovery."""
    if not 0 < delta <= 1:
        raise ValueError("need 0 < delta <= 1")
    c = constants
    log_inv = math.log(1.0 / delta)
    R = math.ceil(512 * n * c.L2_max**2 / c.kappa**4 * (n**2 + log_inv))
    return math.ceil(max(c.c_lm / c.zeta**2 * log_inv, (8 * n**2 - 6) * R / c.zeta))


def theta_prime(
    parents: list[int],
    weights: list[float],
    regressors: list[int],
    means: np.ndarray,
) -> np.ndarray:
    """Target weights for a regression on ``regressors`` (constant first).

    True parents outside the regressor set are dropped and their
    contribution ``theta * E[parent]`` moves onto the constant coordinate;
    regressors that are not parents get weight zero.
    """
    out = np.zeros(len(regressors))
    pos = {r: k for k, r in enumerate(regressors)}
    for p, w in zip(parents, weights):
        if p in pos:
            out[pos[p]] += w
        else:
            out[0] += w * means[p]
    return out
