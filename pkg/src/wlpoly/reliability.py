"""Lifetimes of coherent systems built from series (min) and parallel (max) blocks."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cdf import survival_at
from .dist import Exponential, RandomVector
from .exceptions import WlpError
from .expr import Const, LatticeInterval, Var, VertexTable, WlpExpr, join, meet, vertex_table
from .moments import Identity, expectation
from .setfunc import multilinear_extension

__all__ = [
    "LIFETIME_LATTICE",
    "CLOSED_FORM_MAX_N",
    "SystemModel",
    "ExponentialRates",
    "system_reliability",
    "reliability_curve",
    "mttf_exponential",
    "mean_lifetime_numeric",
]

log = logging.getLogger(__name__)

LIFETIME_LATTICE = LatticeInterval(0.0, math.inf)
# The closed-form MTTF enumerates all pairs T <= S (3^n terms).
CLOSED_FORM_MAX_N = 14


@dataclass(frozen=True)
class SystemModel:
    structure: WlpExpr
    components: RandomVector

    def __post_init__(self):
        comps = RandomVector(self.components)
        object.__setattr__(self, "components", comps)
        if self.structure.arity() > len(comps):
            raise WlpError(
                f"structure uses {self.structure.arity()} components, {len(comps)} lifetimes given"
            )
        if comps and comps.support.lo < 0:
            raise WlpError("component lifetimes must be nonnegative")
        if any(c < 0 for c in self.structure.constants()):
            raise WlpError("constant lifetimes must be nonnegative")

    @property
    def table(self) -> VertexTable:
        return vertex_table(self.structure, LIFETIME_LATTICE, n=len(self.components))


@dataclass(frozen=True)
class ExponentialRates:
    lambdas: tuple

    def __post_init__(self):
        lambdas = tuple(float(v) for v in self.lambdas)
        if not all(math.isfinite(v) and v > 0 for v in lambdas):
            raise WlpError(f"failure rates must be positive, got {lambdas}")
        object.__setattr__(self, "lambdas", lambdas)

    def lambda_of(self, mask: int) -> float:
        return math.fsum(v for i, v in enumerate(self.lambdas) if mask >> i & 1)

    def random_vector(self) -> RandomVector:
        return RandomVector([Exponential(v) for v in self.lambdas])


def system_reliability(model: SystemModel, t):
    """``R_p(t) = Pr[Y_p > t]`` as the multilinear extension of ``v_{p,t}`` at ``r_i(t)``."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise WlpError("reliability is defined for t > 0")
    table = model.table
    out = np.empty(ts.shape)
    for j, tj in enumerate(ts.ravel()):
        v = (tj < table.alpha).astype(float)
        r = 1.0 - model.components.cdfs([tj])[:, 0]
        out.flat[j] = multilinear_extension(v, r)
    return float(out[0]) if np.ndim(t) == 0 else out


def reliability_curve(model: SystemModel, ts) -> np.ndarray:
    """Vectorised ``R_p`` on a grid (via the CDF module); ``t = 0`` is allowed here."""
    return survival_at(model.table, model.components, np.asarray(ts, dtype=float))


def mttf_exponential(table: VertexTable, rates: ExponentialRates | Sequence[float]) -> float:
    """Mean time to failure when every component lifetime is exponential.

    ``alpha[empty] + sum_{S != empty} sum_{T <= S} (-1)^{|S|-|T|}
    (1 - exp(-lambda(S) alpha[T])) / lambda(S)``, reading an infinite
    ``alpha[T]`` as a numerator of 1.
    """
    if not isinstance(rates, ExponentialRates):
        rates = ExponentialRates(tuple(rates))
    n = table.n
    if len(rates.lambdas) != n:
        raise WlpError(f"{len(rates.lambdas)} rates for a structure of {n} components")
    if table.lattice.a != 0 or not math.isfinite(table.alpha[0]):
        raise WlpError("closed-form MTTF needs the lattice [0, inf] and a finite alpha[empty]")
    if n > CLOSED_FORM_MAX_N:
        log.info("n=%d exceeds %d; computing MTTF by quadrature", n, CLOSED_FORM_MAX_N)
        return mean_lifetime_numeric(SystemModel(_table_expr(table), rates.random_vector()))
    alpha = table.alpha
    terms = [float(alpha[0])]
    for s in range(1, 1 << n):
        lam = rates.lambda_of(s)
        parity = bin(s).count("1") & 1
        t = s
        while True:
            a = alpha[t]
            numer = 1.0 if math.isinf(a) else -math.expm1(-lam * a)
            sign = -1.0 if (bin(t).count("1") & 1) != parity else 1.0
            terms.append(sign * numer / lam)
            if t == 0:
                break
            t = (t - 1) & s
    return math.fsum(terms)


def _table_expr(table):
    # max over S of (alpha[S] & min_{i in S} x_i), as an expression.
    parts = []
    for s, a in enumerate(table.alpha.tolist()):
        vars_ = [Var(i + 1) for i in range(table.n) if s >> i & 1]
        if math.isinf(a):
            if vars_:
                parts.append(meet(*vars_))
        elif a > 0:
            parts.append(meet(Const(a), *vars_))
    return join(*parts) if parts else Const(0.0)


def mean_lifetime_numeric(model: SystemModel, **kw) -> float:
    """``int_0^inf R_p(t) dt`` by adaptive quadrature over the effective domain."""
    return expectation(model.table, model.components, Identity(), "survival", **kw)
