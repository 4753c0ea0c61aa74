"""Optimistic pair oracle over an estimated causal model.

Each estimated node carries an ellipsoid ``{theta : ||theta - theta_hat||_M
<= rho}``.  For a regressor vector ``v >= 0`` the node's optimistic score is

    max over coordinate subsets s of  theta_hat_s . v_s + rho ||v_s||_{M^-1}

clipped to ``[0, 1]``.  Maximizing over subsets bounds ``max theta+ . v``
over the ellipsoid, so it is a valid upper confidence value for every
non-negative weight vector in the ellipsoid; unlike the plain
``theta_hat . v + rho ||v||`` it is also non-decreasing in ``v`` and in
``rho``, which makes the propagated reward monotone.  Above
``SUBSET_LIMIT`` regressors the plain form is used.

Linear nodes propagate expected values in topological order; GLM nodes
are propagated by Monte Carlo with common random numbers across actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .discovery import AncestorRelation
from .estimation import EllipsoidEstimate
from .links import LinkFunction
from .model import ActionSet, Intervention

SUBSET_LIMIT = 12
MC_PATHS = 10_000


@lru_cache(maxsize=None)
def subset_masks(d: int) -> np.ndarray:
    """All ``2^d`` coordinate subsets as a float ``(2^d, d)`` 0/1 array."""
    k = np.arange(1 << d)
    return ((k[:, None] >> np.arange(d)[None, :]) & 1).astype(float)


def safe_inverse(M: np.ndarray) -> np.ndarray:
    """Inverse of a PSD matrix (stack); null directions get huge variance."""
    if M.size == 0:
        return M.copy()
    w, U = np.linalg.eigh(M)
    floor = 1e-10 * max(1.0, float(np.max(np.abs(M))))
    if np.all(w > floor):
        return np.linalg.inv(M)
    w = np.maximum(w, floor)
    return (U / w[..., None, :]) @ np.swapaxes(U, -1, -2)


def ucb_values(
    theta: np.ndarray,
    Minv: np.ndarray,
    rho,
    V: np.ndarray,
    return_subset: bool = False,
    clip: bool = True,
    fixed: np.ndarray | None = None,
):
    """Optimistic node scores for a batch.

    ``theta``: ``(B, d)``, ``Minv``: ``(B, d, d)``, ``rho``: scalar or
    ``(B,)``, ``V``: ``(B, m, d)``.  Returns ``(B, m)`` scores, clipped to
    ``[0, 1]`` unless ``clip`` is false (GLM scores feed a link first).

    Each score is the best of ``theta_s . v_s + rho ||v_s||`` over coordinate
    subsets ``s``, i.e. over the corners of the box ``[0, v]``.  Coordinates
    flagged in ``fixed`` (shape broadcastable to ``V``) hold exact values,
    such as the constant node or a clamped parent, and are never dropped.
    """
    hi = 1.0 if clip else np.inf
    B, m, d = V.shape
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (B,))
    if d == 0:
        out = np.zeros((B, m))
        return (out, np.zeros((B, m), dtype=int)) if return_subset else out
    if d > SUBSET_LIMIT:
        lin = np.einsum("bmd,bd->bm", V, theta)
        q = np.einsum("bmd,bde,bme->bm", V, Minv, V)
        val = lin + rho[:, None] * np.sqrt(np.maximum(q, 0.0))
        out = np.clip(val, 0.0, hi)
        full = np.full((B, m), (1 << min(d, 62)) - 1)
        return (out, full) if return_subset else out
    if d == 1 and not return_subset:
        v = V[..., 0]
        val = v * theta[:, 0][:, None] + rho[:, None] * np.abs(v) * np.sqrt(np.maximum(Minv[:, 0, 0], 0.0))[:, None]
        return np.clip(val, 0.0, hi)
    S = subset_masks(d)
    lin = (V * theta[:, None, :]) @ S.T
    O = V[:, :, :, None] * Minv[:, None, :, :] * V[:, :, None, :]
    q = np.sum((O @ S.T) * S.T, axis=-2)
    val = lin + rho[:, None, None] * np.sqrt(np.maximum(q, 0.0))
    if fixed is not None:
        dropped = np.broadcast_to(fixed, V.shape).astype(float) @ (1.0 - S).T
        val = np.where(dropped > 0, -np.inf, val)
    best = np.argmax(val, axis=2)
    out = np.clip(np.take_along_axis(val, best[..., None], axis=2)[..., 0], 0.0, hi)
    return (out, best) if return_subset else out


def witness(theta: np.ndarray, Minv: np.ndarray, rho: float, v: np.ndarray, subset: int) -> np.ndarray:
    """Ellipsoid point attaining the optimistic score on ``subset``."""
    d = theta.size
    if d > SUBSET_LIMIT:
        vs = v
    else:
        vs = v * subset_masks(d)[subset]
    nv = float(np.sqrt(max(vs @ Minv @ vs, 0.0)))
    if nv == 0.0 or rho == 0.0:
        return theta.copy()
    return theta + rho * (Minv @ vs) / nv


@dataclass
class EstimatedModel:
    """Estimated graph (acyclic ancestor relation) plus per-node ellipsoids.

    ``regressors[node]`` lists the constant node followed by the node's
    estimated ancestors; estimates are indexed the same way.
    """

    relation: AncestorRelation
    estimates: Mapping[str, EllipsoidEstimate]
    links: Mapping[str, LinkFunction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        rel = self.relation
        for b, s in rel.anc.items():
            if b in s:
                raise ValueError("estimated relation must be acyclic")
        self.order = rel.topological_order()
        xs = rel.x_nodes
        self.regressors = {
            node: [xs[0]] + sorted(rel.anc[node], key=xs.index) for node in rel.nodes
        }
        for node in rel.nodes:
            est = self.estimates.get(node)
            if est is None:
                raise ValueError(f"missing estimate for {node}")
            if est.theta_hat.size != len(self.regressors[node]):
                raise ValueError(f"estimate for {node} has the wrong dimension")
        self.links = {node: self.links.get(node, LinkFunction.identity()) for node in rel.nodes}
        self.linear = all(link.kind == "identity" for link in self.links.values())
        self._pos = {name: i for i, name in enumerate(xs + (rel.y,))}

    @property
    def node_names(self) -> tuple[str, ...]:
        return self.relation.x_nodes + (self.relation.y,)

    def _clamps(self, actions: Sequence[Intervention]) -> tuple[np.ndarray, np.ndarray]:
        A = len(actions)
        mask = np.zeros((A, len(self._pos)), dtype=bool)
        vals = np.zeros((A, len(self._pos)))
        for a, act in enumerate(actions):
            for name, v in act.assignments:
                if name not in self._pos or self._pos[name] in (0, len(self._pos) - 1):
                    raise ValueError(f"cannot intervene on {name!r}")
                mask[a, self._pos[name]] = True
                vals[a, self._pos[name]] = v
        return mask, vals

    def _minv(self, node: str) -> np.ndarray:
        return safe_inverse(self.estimates[node].M)

    def _node_scores(
        self, node, P, rho_scale: float, fixed_theta=None, subsets: bool = False, clip: bool = True, exact=None
    ):
        idx = [self._pos[r] for r in self.regressors[node]]
        V = P[:, idx]
        fixed = np.zeros(V.shape, dtype=bool) if exact is None else exact[:, idx].copy()
        fixed[:, 0] = True
        hi = 1.0 if clip and self.links[node].kind == "identity" else np.inf
        if fixed_theta is not None:
            th = np.clip(np.asarray(fixed_theta[node], dtype=float), 0.0, 1.0)
            if th.size != len(idx):
                raise ValueError(f"theta for {node} has the wrong dimension")
            val = np.clip(V @ th, 0.0, hi)
            return (val, None) if subsets else val
        est = self.estimates[node]
        rho = (est.rho or 0.0) * rho_scale
        res = ucb_values(
            est.theta_hat[None], self._minv(node)[None], rho, V[None], return_subset=subsets, clip=hi == 1.0, fixed=fixed[None]
        )
        if subsets:
            return res[0][0], res[1][0]
        return res[0]

    def _apply_link(self, node, score):
        link = self.links[node]
        return score if link.kind == "identity" else link(score)

    def _propagate_linear(self, actions, rho_scale=1.0, fixed_theta=None, keep_subsets=False, raw_y=False):
        mask, vals = self._clamps(actions)
        P = np.zeros(mask.shape)
        P[:, 0] = 1.0
        subsets = {}
        for node in self.order:
            j = self._pos[node]
            last = raw_y and node == self.relation.y
            out = self._node_scores(node, P, rho_scale, fixed_theta, keep_subsets, clip=not last, exact=mask)
            if keep_subsets:
                out, subsets[node] = out
            P[:, j] = np.where(mask[:, j], vals[:, j], out)
        return (P, subsets) if keep_subsets else P

    def _propagate_mc(self, actions, paths, seed, rho_scale=1.0, fixed_theta=None):
        mask, vals = self._clamps(actions)
        rng = np.random.default_rng(seed)
        gamma = rng.random((paths, len(self._pos)))
        out = np.zeros(len(actions))
        for a in range(len(actions)):
            X = np.zeros((paths, len(self._pos)))
            X[:, 0] = 1.0
            for node in self.order:
                j = self._pos[node]
                if mask[a, j]:
                    X[:, j] = vals[a, j]
                    continue
                idx = [self._pos[r] for r in self.regressors[node]]
                pats, inv = np.unique(X[:, idx], axis=0, return_inverse=True)
                Pm = np.zeros((pats.shape[0], len(self._pos)))
                Pm[:, idx] = pats
                # sampled parent values are exact
                score = self._node_scores(node, Pm, rho_scale, fixed_theta, exact=np.ones(Pm.shape, dtype=bool))
                prob = np.clip(self._apply_link(node, score), 0.0, 1.0)[inv.ravel()]
                if node == self.relation.y:
                    X[:, j] = prob
                else:
                    X[:, j] = (gamma[:, j] < prob).astype(float)
            out[a] = X[:, -1].mean()
        return out

    def values(
        self,
        actions: Sequence[Intervention],
        rho_scale: float = 1.0,
        fixed_theta: Mapping[str, np.ndarray] | None = None,
        paths: int = MC_PATHS,
        seed: int = 0,
        raw: bool = False,
    ) -> np.ndarray:
        """Optimistic (or fixed-theta) reward of every action.

        With ``raw`` the reward node's score is left unclipped above (inner
        nodes are still clipped); this ranks actions whose clipped values tie.
        """
        if self.linear:
            return self._propagate_linear(actions, rho_scale, fixed_theta, raw_y=raw)[:, -1]
        return self._propagate_mc(actions, paths, seed, rho_scale, fixed_theta)


def tie_break(values: np.ndarray, raw: np.ndarray, u: np.ndarray | float | None = None) -> np.ndarray | int:
    """Index of the maximum of ``values`` (last axis), ties ranked by ``raw``.

    Candidates still tied after ranking are resolved by list order, or
    uniformly at random when a uniform draw ``u`` in [0, 1) is supplied
    (one per leading index).
    """
    top = values.max(axis=-1, keepdims=True)
    key = np.where(values >= top, raw, -np.inf)
    if u is None:
        out = np.argmax(key, axis=-1)
    else:
        best = key >= key.max(axis=-1, keepdims=True)
        count = best.sum(axis=-1)
        pick = np.minimum((np.asarray(u) * count).astype(np.int64), count - 1)
        out = np.argmax(np.cumsum(best, axis=-1) > pick[..., None], axis=-1)
    return int(out) if np.ndim(out) == 0 else out


def reward_under(
    model: EstimatedModel,
    theta: Mapping[str, np.ndarray],
    a: Intervention,
    paths: int = MC_PATHS,
    seed: int = 0,
) -> float:
    """``E[Y | a]`` on the estimated graph with weights ``theta`` (clipped)."""
    return float(model.values([a], fixed_theta=theta, paths=paths, seed=seed)[0])


def optimistic_action(
    model: EstimatedModel,
    actions: ActionSet | Sequence[Intervention],
    paths: int = MC_PATHS,
    seed: int = 0,
) -> tuple[Intervention, dict[str, np.ndarray], float]:
    """Action with the largest optimistic reward, its witness weights, value.

    Actions tied at the (clipped) maximum are ranked by their unclipped
    reward score, then by list order.
    """
    acts = list(actions)
    if not acts:
        raise ValueError("empty action set")
    vals = model.values(acts, paths=paths, seed=seed)
    best = tie_break(vals, model.values(acts, paths=paths, seed=seed, raw=True) if model.linear else vals)
    if model.linear:
        P, subsets = model._propagate_linear([acts[best]], keep_subsets=True)
        pos = model._pos
        tilde = {}
        for node in model.order:
            est = model.estimates[node]
            v = P[0, [pos[r] for r in model.regressors[node]]]
            tilde[node] = witness(est.theta_hat, model._minv(node), est.rho or 0.0, v, int(subsets[node][0]))
    else:
        tilde = {node: model.estimates[node].theta_hat.copy() for node in model.order}
    return acts[best], tilde, float(vals[best])
