"""Expectations ``E[g(Y_p)]``, moments, and the uniform-input closed forms.

Two numerical routes integrate against ``dg``: the survival integral
``g(lo) + int (1 - F_p) dg`` and the per-subset sum
``g(lo) + sum_S int_lo^{alpha[S]} prod_{i not in S} F_i prod_{i in S} (1 - F_i) dg``.
For inputs uniform on [0, 1] the raw moments reduce to incomplete beta
functions with integer parameters, evaluated here in exact rational
arithmetic. Sugeno and Choquet integrals of fuzzy measures live here too.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cdf import _check, survival_at
from .dist import DEFAULT_EPS, Domain, RandomVector, effective_domain
from .exceptions import HypothesisViolation, WlpError
from .expr import UNIT_INTERVAL, VertexTable
from .quadrature import DEFAULT_ATOL, adaptive_quad, stieltjes_expectation
from .setfunc import FuzzyMeasure, SetFunction, mobius_transform, popcounts, subset_weights

__all__ = [
    "GSpec",
    "Identity",
    "Power",
    "CenteredPower",
    "Exp",
    "Step",
    "TAIL_TOLERANCE",
    "integration_domain",
    "expectation",
    "raw_moment",
    "central_moment",
    "mgf",
    "incomplete_beta",
    "uniform_raw_moment",
    "sugeno_integral",
    "sugeno_expectation",
    "choquet_integral",
    "choquet_expectation",
]

TAIL_TOLERANCE = 1e-9


class GSpec:
    """A function ``g`` of bounded variation given with its derivative.

    ``atoms`` holds ``(location, jump)`` pairs for point masses of ``dg``.
    """

    atoms: tuple = ()

    def g(self, y):
        raise NotImplementedError

    def dg(self, y):
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(GSpec):
    def g(self, y):
        return np.asarray(y, dtype=float)

    def dg(self, y):
        return np.ones_like(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class Power(GSpec):
    r: int

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise WlpError(f"moment order must be a positive integer, got {self.r}")

    def g(self, y):
        return np.asarray(y, dtype=float) ** self.r

    def dg(self, y):
        return self.r * np.asarray(y, dtype=float) ** (self.r - 1)


@dataclass(frozen=True)
class CenteredPower(GSpec):
    r: int
    center: float

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise WlpError(f"moment order must be a positive integer, got {self.r}")

    def g(self, y):
        return (np.asarray(y, dtype=float) - self.center) ** self.r

    def dg(self, y):
        return self.r * (np.asarray(y, dtype=float) - self.center) ** (self.r - 1)


@dataclass(frozen=True)
class Exp(GSpec):
    t: float

    def g(self, y):
        with np.errstate(over="ignore"):
            return np.exp(self.t * np.asarray(y, dtype=float))

    def dg(self, y):
        with np.errstate(over="ignore"):
            return self.t * np.exp(self.t * np.asarray(y, dtype=float))


@dataclass(frozen=True)
class Step(GSpec):
    """``g(y) = H(z - y)``: 1 for ``y <= z``, 0 above, so ``E[g(Y)] = F(z)``."""

    z: float
    atoms: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", ((float(self.z), -1.0),))

    def g(self, y):
        return (np.asarray(y, dtype=float) <= self.z).astype(float)

    def dg(self, y):
        return np.zeros_like(np.asarray(y, dtype=float))


def integration_domain(table: VertexTable, rv: RandomVector, eps: float = DEFAULT_EPS) -> Domain:
    """Effective domain of the inputs widened to cover every finite vertex value."""
    dom = effective_domain(rv, eps) if len(rv) else None
    finite = table.alpha[np.isfinite(table.alpha)]
    los = [v for v in ([dom.lo] if dom else []) + finite.tolist()]
    his = [v for v in ([dom.hi] if dom else []) + finite.tolist()]
    if not los:
        raise WlpError("cannot determine a finite integration domain")
    return Domain(min(los), max(his))


_MIN_EPS = 1e-300


def _tail_violation(rv, g, hi):
    gh = abs(float(g.g(np.array([hi]))[0]))
    for i, d in enumerate(rv, start=1):
        sf = float(d.sf(hi))
        tail = gh * sf if sf else 0.0
        if not tail <= TAIL_TOLERANCE:
            return i, tail
    return None


def _truncated_domain(table, rv, g, eps):
    # Push the upper truncation point out until g(y)(1 - F_i(y)) is negligible.
    while True:
        dom = integration_domain(table, rv, eps)
        bad = _tail_violation(rv, g, dom.hi)
        if bad is None:
            return dom
        if eps * 1e-3 < _MIN_EPS:
            i, tail = bad
            raise HypothesisViolation(
                f"g(y)(1 - F_{i}(y)) = {tail:.3g} at y = {dom.hi:g} and does not vanish "
                "further out; E[g(Y)] is not covered by the integration formulas here",
                index=i,
            )
        eps *= 1e-3


def _breakpoints(table, rv, g, dom):
    pts = set(rv.breakpoints()) | set(table.alpha[np.isfinite(table.alpha)].tolist())
    pts |= {z for z, _ in g.atoms}
    return sorted(p for p in pts if dom.lo < p < dom.hi)


def expectation(
    table: VertexTable,
    rv: RandomVector,
    g: GSpec,
    route: str = "survival",
    eps: float = DEFAULT_EPS,
    atol: float = DEFAULT_ATOL,
) -> float:
    """``E[g(Y_p)]`` by the survival integral or by the per-subset sum.

    Both routes integrate over the same truncated domain and replace
    ``g(-inf)`` by ``g(lo)``. The upper truncation point starts at the
    ``eps``-quantile range and moves out until ``|g(y)| (1 - F_i(y))`` is
    below ``TAIL_TOLERANCE`` for every input; :class:`HypothesisViolation`
    names the input whose tail never gets there.
    """
    _check(table, rv)
    dom = _truncated_domain(table, rv, g, eps)
    points = _breakpoints(table, rv, g, dom)
    if route == "survival":
        return stieltjes_expectation(
            lambda y: survival_at(table, rv, y), g.g, g.dg, dom, points, g.atoms, atol
        )
    if route != "subset":
        raise WlpError(f"unknown expectation route {route!r}")
    return _subset_sum(table, rv, g, dom, points, atol)


def _subset_sum(table, rv, g, dom, points, atol):
    upper = np.clip(table.alpha, dom.lo, dom.hi)
    levels = [u for u in np.unique(upper) if u > dom.lo]
    parts = [float(g.g(np.array([dom.lo]))[0])]
    budget = atol / max(1, len(levels))
    for u in levels:
        group = upper == u

        def integrand(y, group=group):
            return subset_weights(1.0 - rv.cdfs(y))[group].sum(axis=0) * g.dg(y)

        value, _ = adaptive_quad(integrand, dom.lo, u, points, budget)
        parts.append(value)
    for z, size in g.atoms:
        if dom.lo <= z <= dom.hi:
            w = subset_weights(1.0 - rv.cdfs([z]))[:, 0]
            parts.append(size * math.fsum(w[z < table.alpha]))
    return math.fsum(parts)


def raw_moment(table, rv, r: int, route: str = "survival", **kw) -> float:
    return expectation(table, rv, Power(r), route, **kw)


def central_moment(table, rv, r: int, center: float | None = None, route: str = "survival", **kw) -> float:
    """``E[(Y_p - center)^r]``; ``center`` defaults to ``E[Y_p]``, computed first."""
    if center is None:
        center = expectation(table, rv, Identity(), route, **kw)
    return expectation(table, rv, CenteredPower(r, center), route, **kw)


def mgf(table, rv, t: float, route: str = "survival", **kw) -> float:
    return expectation(table, rv, Exp(t), route, **kw)


# ---------------------------------------------------------------------------
# Uniform inputs on [0, 1]
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _incomplete_beta_exact(z: Fraction, u: int, v: int) -> Fraction:
    # B_z(u, v) = sum_{i=0}^{v-1} C(v-1, i) (-1)^i z^{u+i} / (u+i)
    if z == 0:
        return Fraction(0)
    if z == 1:
        return Fraction(math.factorial(u - 1) * math.factorial(v - 1), math.factorial(u + v - 1))
    total = Fraction(0)
    zi = z**u
    for i in range(v):
        term = Fraction(math.comb(v - 1, i), u + i) * zi
        total += -term if i % 2 else term
        zi *= z
    return total


def _exact(z) -> Fraction:
    return z if isinstance(z, Fraction) else Fraction(float(z))


def incomplete_beta(z: float, u: int, v: int) -> float:
    """``B_z(u, v) = int_0^z t^(u-1) (1-t)^(v-1) dt`` for integer ``u, v >= 1``.

    Evaluated exactly (rational arithmetic on the binary value of ``z``) and
    rounded once at the end.
    """
    if int(u) != u or int(v) != v or u < 1 or v < 1:
        raise WlpError(f"incomplete beta needs integer u, v >= 1, got ({u}, {v})")
    if not 0.0 <= float(z) <= 1.0:
        raise WlpError(f"incomplete beta needs z in [0, 1], got {z}")
    return float(_incomplete_beta_exact(_exact(z), int(u), int(v)))


def _uniform_raw_moment_exact(table: VertexTable, r: int) -> Fraction:
    if table.lattice != UNIT_INTERVAL:
        raise WlpError("uniform closed forms need the lattice [0, 1]")
    if int(r) != r or r < 1:
        raise WlpError(f"moment order must be a positive integer, got {r}")
    n = table.n
    groups = Counter(zip(table.alpha.tolist(), popcounts(n).tolist()))
    total = Fraction(0)
    for (z, k), count in sorted(groups.items()):
        total += count * _incomplete_beta_exact(_exact(z), n - k + r, k + 1)
    return r * total


def uniform_raw_moment(table: VertexTable, r: int) -> float:
    """``E[Y_p^r]`` for i.i.d. uniform(0, 1) inputs: ``r sum_S B_{alpha[S]}(n-|S|+r, |S|+1)``."""
    return float(_uniform_raw_moment_exact(table, r))


# ---------------------------------------------------------------------------
# Sugeno and Choquet integrals
# ---------------------------------------------------------------------------


def _measure(mu) -> FuzzyMeasure:
    if isinstance(mu, FuzzyMeasure):
        if (mu.a, mu.b) != (0.0, 1.0):
            raise WlpError("Sugeno/Choquet integrals here use [0, 1]-valued measures")
        return mu
    if isinstance(mu, SetFunction):
        return FuzzyMeasure(mu.n, mu.values)
    values = np.asarray(mu, dtype=float)
    return FuzzyMeasure(values.size.bit_length() - 1, values)


def _unit_points(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise WlpError(f"measure is on {n} elements, point has {x.shape[-1]} coordinates")
    if np.any((x < 0) | (x > 1)) or np.isnan(x).any():
        raise WlpError("integrand values must lie in [0, 1]")
    return x


def _subset_minima(x, n):
    # mins[S] = min_{i in S} x_i, with the empty minimum equal to the top 1.
    mins = [np.ones(x.shape[:-1])]
    for i in range(n):
        mins = mins + [np.minimum(m, x[..., i]) for m in mins]
    return mins


def sugeno_integral(mu, x):
    """``max_S min(mu(S), min_{i in S} x_i)``; ``x`` may hold one point per row."""
    mu = _measure(mu)
    x = _unit_points(x, mu.n)
    out = np.zeros(x.shape[:-1])
    for value, m in zip(mu.values, _subset_minima(x, mu.n)):
        np.maximum(out, np.minimum(value, m), out=out)
    return float(out) if x.ndim == 1 else out


def choquet_integral(mu, x):
    """``sum_S m_mu(S) min_{i in S} x_i`` with ``m_mu`` the Möbius transform."""
    mu = _measure(mu)
    x = _unit_points(x, mu.n)
    m = mobius_transform(mu.values)
    out = np.zeros(x.shape[:-1])
    for coeff, mins in zip(m[1:], _subset_minima(x, mu.n)[1:]):
        out += coeff * mins
    return float(out) if x.ndim == 1 else out


def sugeno_expectation(mu) -> float:
    """Mean of the Sugeno integral over i.i.d. uniform(0, 1) inputs."""
    mu = _measure(mu)
    return uniform_raw_moment(VertexTable(mu.n, mu.values, UNIT_INTERVAL), 1)


def choquet_expectation(mu) -> float:
    """``sum_S mu(S) (n-|S|)! |S|! / (n+1)!``: mean of the Choquet integral on uniforms."""
    mu = _measure(mu)
    n = mu.n
    total = Fraction(0)
    for value, k in zip(mu.values.tolist(), popcounts(n).tolist()):
        if value:
            total += Fraction(value) * math.factorial(n - k) * math.factorial(k)
    return float(total / math.factorial(n + 1))
