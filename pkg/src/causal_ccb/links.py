"""Link functions for binary generalized linear causal models.

A link maps the linear score ``theta . pa`` of a node to its activation
probability.  Three kinds are supported:

* ``identity``  -- the binary linear model (BLM).
* ``logistic``  -- ``1 / (1 + exp(-(scale * x + offset)))``.
* ``tabulated`` -- a full conditional probability table indexed by the parent
  bit pattern.  Used only by the non-GLM benchmark instances.

Logistic links can be extended to have range equal to the whole real line by
splicing logarithmic tails onto the sigmoid (see :func:`extend_link_range`).
The maximum-likelihood solver needs this so its estimating equation always
has a root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

LINK_KINDS = ("identity", "logistic", "tabulated")


@dataclass(frozen=True)
class Splice:
    """Tail parameters: splice point and the core value/derivatives there."""

    x: float
    f: float
    d1: float
    d2: float


@dataclass(frozen=True)
class LinkFunction:
    kind: str = "identity"
    scale: float = 1.0
    offset: float = 0.0
    table: tuple[float, ...] | None = None
    upper: Splice | None = None
    lower: Splice | None = None

    def __post_init__(self) -> None:
        if self.kind not in LINK_KINDS:
            raise ValueError(f"unknown link kind {self.kind!r}")
        if self.kind == "logistic" and not self.scale > 0:
            raise ValueError("logistic scale must be positive")
        if self.kind == "tabulated":
            if self.table is None:
                raise ValueError("tabulated link needs a table")
            t = np.asarray(self.table, dtype=float)
            if np.any(t < 0) or np.any(t > 1):
                raise ValueError("table probabilities must lie in [0, 1]")
            n_rows = len(self.table)
            if n_rows & (n_rows - 1):
                raise ValueError("table length must be a power of two")

    # -- constructors -------------------------------------------------------
    @classmethod
    def identity(cls) -> "LinkFunction":
        return cls("identity")

    @classmethod
    def logistic(cls, scale: float = 1.0, offset: float = 0.0) -> "LinkFunction":
        return cls("logistic", scale=float(scale), offset=float(offset))

    @classmethod
    def tabulated(cls, table) -> "LinkFunction":
        return cls("tabulated", table=tuple(float(p) for p in table))

    @property
    def is_glm(self) -> bool:
        return self.kind != "tabulated"

    @property
    def extended(self) -> bool:
        return self.upper is not None or self.lower is not None

    @property
    def n_parents(self) -> int:
        """Number of parents a tabulated link is keyed on."""
        if self.table is None:
            raise ValueError("only tabulated links carry a parent count")
        return int(round(math.log2(len(self.table))))

    # -- bounds -------------------------------------------------------------
    @property
    def L1(self) -> float:
        """Upper bound on the first derivative."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "logistic":
            return self.scale / 4.0
        raise ValueError("derivative bounds undefined for tabulated links")

    @property
    def L2(self) -> float:
        """Upper bound on the absolute second derivative."""
        if self.kind == "identity":
            return 0.0
        if self.kind == "logistic":
            return self.scale**2 / (6.0 * math.sqrt(3.0))
        raise ValueError("derivative bounds undefined for tabulated links")

    # -- core (unextended) pieces -------------------------------------------
    def _core(self, x: np.ndarray, order: int) -> np.ndarray:
        if self.kind == "identity":
            if order == 0:
                return x.copy()
            if order == 1:
                return np.ones_like(x)
            if order == 2:
                return np.zeros_like(x)
            return 0.5 * x * x
        z = self.scale * x + self.offset
        if order == 3:
            return np.logaddexp(0.0, z) / self.scale
        th = np.tanh(0.5 * z)
        if order == 0:
            return 0.5 * (1.0 + th)
        # s (1 - s) = sech^2(z/2) / 4 keeps its relative precision in the tails
        with np.errstate(over="ignore"):
            var = 0.25 / np.cosh(0.5 * z) ** 2
        if order == 1:
            return self.scale * var
        return -(self.scale**2) * var * th

    def _eval(self, x, order: int):
        if self.kind == "tabulated":
            raise ValueError("tabulated links are evaluated by parent pattern")
        shape = np.shape(x)
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        out = self._core(xa, order)
        if self.upper is not None:
            up = self.upper
            m = xa > up.x
            if np.any(m):
                A = up.d1**2 / up.d2
                k = -up.d1 / up.d2
                y = xa[m] - up.x + k
                if order == 0:
                    val = up.f - A * np.log(y / k)
                elif order == 1:
                    val = -A / y
                elif order == 2:
                    val = A / y**2
                else:
                    base = self._core(np.asarray(up.x), 3)
                    val = base + up.f * (xa[m] - up.x) - A * (y * np.log(y / k) - y + k)
                out[m] = val
        if self.lower is not None:
            lo = self.lower
            m = xa < lo.x
            if np.any(m):
                B = lo.d1**2 / lo.d2
                k = lo.d1 / lo.d2
                w = lo.x - xa[m] + k
                if order == 0:
                    val = lo.f - B * np.log(w / k)
                elif order == 1:
                    val = B / w
                elif order == 2:
                    val = B / w**2
                else:
                    base = self._core(np.asarray(lo.x), 3)
                    val = base - (lo.f * (lo.x - xa[m]) - B * (w * np.log(w / k) - w + k))
                out[m] = val
        if shape == ():
            return float(out[0])
        return out.reshape(shape)

    def __call__(self, x):
        return self._eval(x, 0)

    def deriv(self, x):
        return self._eval(x, 1)

    def deriv2(self, x):
        return self._eval(x, 2)

    def antiderivative(self, x):
        """A primitive ``m`` with ``m' = f``, used by the pseudo-likelihood."""
        return self._eval(x, 3)

    def table_prob(self, pattern_index) -> np.ndarray:
        if self.table is None:
            raise ValueError("not a tabulated link")
        return np.asarray(self.table, dtype=float)[pattern_index]

    def min_slope(self, lo: float, hi: float) -> float:
        """Smallest derivative on ``[lo, hi]`` (a kappa for that domain)."""
        if self.kind == "identity":
            return 1.0
        grid = np.linspace(lo, hi, 2049)
        return float(np.min(self.deriv(grid)))


def _find_splice(link: LinkFunction, start: float, step: float, sign: int) -> float:
    x = start
    for _ in range(100_000):
        if sign * link._core(np.asarray(x), 2) > 0:
            return x
        x += step
    raise ValueError("no splice point with the required curvature sign")


def extend_link_range(f: LinkFunction, pa_count: int, grid_step: float = 0.5) -> LinkFunction:
    """Return ``f`` with logarithmic tails so its range becomes the real line.

    The upper tail starts at ``x* = 2 * pa_count`` (or the first grid point
    above it with negative curvature) and the lower tail at
    ``x* = -pa_count`` (first grid point below it with positive curvature).
    Both tails match value, slope and curvature at their splice points, and
    the function is unchanged on ``[-pa_count, 2 * pa_count]``.
    """
    if f.kind == "identity":
        return f
    if f.kind != "logistic":
        raise ValueError("only GLM links can be extended")
    if f.extended:
        return f
    base = replace(f, upper=None, lower=None)
    xu = _find_splice(base, 2.0 * pa_count, grid_step, -1)
    up = Splice(
        xu,
        float(base._core(np.asarray(xu), 0)),
        float(base._core(np.asarray(xu), 1)),
        float(base._core(np.asarray(xu), 2)),
    )
    xl = _find_splice(base, -float(pa_count), -grid_step, +1)
    lo = Splice(
        xl,
        float(base._core(np.asarray(xl), 0)),
        float(base._core(np.asarray(xl), 1)),
        float(base._core(np.asarray(xl), 2)),
    )
    return replace(base, upper=up, lower=lo)


def link_from_config(cfg) -> LinkFunction:
    """Build a link from a config value: a kind name or a mapping."""
    if cfg is None:
        return LinkFunction.identity()
    if isinstance(cfg, str):
        if cfg == "identity":
            return LinkFunction.identity()
        if cfg == "logistic":
            return LinkFunction.logistic()
        raise ValueError(f"unknown link {cfg!r}")
    if isinstance(cfg, dict):
        kind = cfg.get("kind", "identity")
        if kind == "identity":
            return LinkFunction.identity()
        if kind == "logistic":
            return LinkFunction.logistic(cfg.get("scale", 1.0), cfg.get("offset", 0.0))
        if kind in ("table", "tabulated"):
            rows = cfg["rows"]
            if isinstance(rows, dict):
                keys = sorted(rows, key=lambda s: int(str(s), 2) if str(s) else 0)
                d = len(str(keys[0])) if keys else 0
                table = [0.0] * (1 << d)
                for k in keys:
                    table[int(str(k), 2) if str(k) else 0] = float(rows[k])
                if len(rows) != (1 << d):
                    raise ValueError("table must list every parent pattern")
                return LinkFunction.tabulated(table)
            return LinkFunction.tabulated(rows)
        raise ValueError(f"unknown link kind {kind!r}")
    raise ValueError(f"cannot parse link {cfg!r}")


def link_to_config(link: LinkFunction):
    if link.kind == "identity":
        return "identity"
    if link.kind == "logistic":
        return {"kind": "logistic", "scale": link.scale, "offset": link.offset}
    d = link.n_parents
    rows = {format(i, f"0{d}b") if d else "": p for i, p in enumerate(link.table)}
    return {"kind": "table", "rows": rows}
