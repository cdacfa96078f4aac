"""Univariate input laws and the independent random vector built from them.

Every law exposes a vectorised ``cdf``, its support, the points where the CDF
has a kink or jump (quadrature breakpoints), and a sampler that draws from an
explicit :class:`numpy.random.Generator`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import WlpError

__all__ = [
    "DEFAULT_EPS",
    "Distribution",
    "Uniform",
    "Exponential",
    "Constant",
    "Table",
    "RandomVector",
    "Domain",
    "cdf",
    "effective_domain",
    "from_config",
    "load_config",
    "variable_streams",
]

DEFAULT_EPS = 1e-12


class Domain(NamedTuple):
    lo: float
    hi: float


class Distribution:
    def cdf(self, y):
        raise NotImplementedError

    def sf(self, y):
        """Survival ``1 - F(y)``."""
        return 1.0 - self.cdf(y)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def support(self) -> Domain:
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        return tuple(v for v in self.support if math.isfinite(v))

    def atoms(self) -> tuple:
        """Locations where the CDF jumps."""
        return ()

    def quantile_range(self, eps: float) -> Domain:
        """Finite ``[lo, hi]`` with ``F(lo) <= eps`` and ``F(hi) >= 1 - eps``."""
        return self.support

    def mean(self) -> float:
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise WlpError(f"uniform needs finite lo < hi, got ({self.lo}, {self.hi})")

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        return np.clip((y - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size)

    @property
    def support(self):
        return Domain(float(self.lo), float(self.hi))

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def to_config(self):
        return {"type": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise WlpError(f"exponential rate must be positive, got {self.rate}")

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(y > 0, -np.expm1(-self.rate * np.maximum(y, 0.0)), 0.0)

    def sf(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y > 0, np.exp(-self.rate * np.maximum(y, 0.0)), 1.0)

    def sample(self, rng, size):
        return rng.exponential(1.0 / self.rate, size)

    @property
    def support(self):
        return Domain(0.0, math.inf)

    def quantile_range(self, eps):
        return Domain(0.0, -math.log(eps) / self.rate)

    def mean(self):
        return 1.0 / self.rate

    def to_config(self):
        return {"type": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Constant(Distribution):
    """Degenerate law at ``value``: ``F(y) = 1`` iff ``y >= value``."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise WlpError("constant lifetimes/values must be finite")

    def cdf(self, y):
        return (np.asarray(y, dtype=float) >= self.value).astype(float)

    def sample(self, rng, size):
        return np.full(size, float(self.value))

    @property
    def support(self):
        return Domain(float(self.value), float(self.value))

    def atoms(self):
        return (float(self.value),)

    def mean(self):
        return float(self.value)

    def to_config(self):
        return {"type": "constant", "value": self.value}


@dataclass(frozen=True, eq=False)
class Table(Distribution):
    """Piecewise-linear CDF through ``(x, F)`` points.

    ``F`` is 0 left of the first point, so ``F(x_0) > 0`` is an atom at ``x_0``.
    """

    points: tuple

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 1:
            raise WlpError("table distribution needs a list of [x, F] pairs")
        x, f = pts[:, 0], pts[:, 1]
        if not np.all(np.isfinite(pts)):
            raise WlpError("table points must be finite")
        if np.any(np.diff(x) <= 0):
            raise WlpError("table x values must be strictly increasing")
        if np.any(np.diff(f) < 0) or f[0] < 0 or f[-1] != 1.0:
            raise WlpError("table F values must be nondecreasing, start >= 0 and end at 1")
        object.__setattr__(self, "points", tuple(map(tuple, pts.tolist())))
        object.__setattr__(self, "_x", x)
        object.__setattr__(self, "_f", f)

    def __eq__(self, other):
        return isinstance(other, Table) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        out = np.interp(y, self._x, self._f, left=0.0, right=1.0)
        return np.where(y < self._x[0], 0.0, out)

    def sample(self, rng, size):
        u = rng.random(size)
        x, f = self._x, self._f
        idx = np.searchsorted(f, u, side="left")
        out = np.full(size, x[0])
        inner = idx > 0
        i = idx[inner]
        frac = (u[inner] - f[i - 1]) / (f[i] - f[i - 1])
        out[inner] = x[i - 1] + frac * (x[i] - x[i - 1])
        return out

    @property
    def support(self):
        return Domain(float(self._x[0]), float(self._x[-1]))

    def breakpoints(self):
        return tuple(self._x.tolist())

    def atoms(self):
        return (float(self._x[0]),) if self._f[0] > 0 else ()

    def mean(self):
        x, f = self._x, self._f
        return float(x[0] * f[0] + np.sum(0.5 * (x[1:] + x[:-1]) * np.diff(f)))

    def to_config(self):
        return {"type": "table", "points": [list(p) for p in self.points]}


def cdf(d: Distribution, y):
    out = d.cdf(y)
    return float(out) if np.ndim(out) == 0 else out


class RandomVector(tuple):
    """Mutually independent laws for ``X_1..X_n`` (position ``i-1`` holds ``X_i``)."""

    def __new__(cls, laws: Sequence[Distribution]):
        laws = tuple(laws)
        if not all(isinstance(d, Distribution) for d in laws):
            raise WlpError("random vector entries must be distributions")
        return super().__new__(cls, laws)

    @property
    def n(self) -> int:
        return len(self)

    def cdfs(self, ys) -> np.ndarray:
        """Matrix ``F_i(y_j)`` with one row per variable."""
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        if not self:
            return np.empty((0, ys.size))
        return np.vstack([d.cdf(ys) for d in self])

    def breakpoints(self) -> tuple:
        return tuple(sorted({p for d in self for p in d.breakpoints()}))

    def atoms(self) -> tuple:
        return tuple(sorted({p for d in self for p in d.atoms()}))

    @property
    def support(self) -> Domain:
        return Domain(min(d.support.lo for d in self), max(d.support.hi for d in self))

    def to_config(self) -> list:
        return [d.to_config() for d in self]


def effective_domain(rv: RandomVector, eps: float = DEFAULT_EPS) -> Domain:
    """Smallest finite ``[lo, hi]`` holding all but ``eps`` of every input's mass."""
    if not 0 < eps < 0.5:
        raise WlpError("eps must lie in (0, 0.5)")
    if not rv:
        raise WlpError("empty random vector")
    ranges = [d.quantile_range(eps) for d in rv]
    return Domain(min(r.lo for r in ranges), max(r.hi for r in ranges))


_FAMILIES = {
    "uniform": lambda c: Uniform(float(c.get("lo", 0.0)), float(c.get("hi", 1.0))),
    "exponential": lambda c: Exponential(float(c["rate"])),
    "constant": lambda c: Constant(float(c["value"])),
    "table": lambda c: Table(tuple(map(tuple, c["points"]))),
}


def from_config(config) -> RandomVector:
    """Build a random vector from the JSON config (a list, one entry per variable)."""
    if isinstance(config, str):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as exc:
            raise WlpError(f"invalid distribution JSON: {exc}") from None
    if not isinstance(config, list):
        raise WlpError("distribution config must be a JSON list")
    laws = []
    for i, entry in enumerate(config, start=1):
        try:
            laws.append(_FAMILIES[entry["type"]](entry))
        except KeyError as exc:
            raise WlpError(f"distribution {i}: missing or unknown field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise WlpError(f"distribution {i}: {exc}") from None
    return RandomVector(laws)


def load_config(path: str) -> RandomVector:
    with open(path) as fh:
        return from_config(fh.read())


def variable_streams(seed: int, n: int) -> list[np.random.Generator]:
    """One independent PCG64 stream per variable, derived from a single seed."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(s)) for s in children]
