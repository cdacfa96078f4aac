"""Independent checks for the closed forms.

* :func:`simulate` draws the inputs and evaluates the expression directly.
* :func:`recursive_expectation` isolates one variable at a time with the
  median decomposition, transforming ``g`` on a grid at every step.
* :func:`gS_sequence_expectation` builds, per subset ``S``, the measure
  ``prod F_k / (1 - F_k) dg`` factor by factor and integrates it.
* :func:`naive_mobius` is the direct double loop over ``T <= S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dist import DEFAULT_EPS, RandomVector, variable_streams
from .exceptions import ArityError, WlpError
from .expr import UNIT_INTERVAL, LatticeInterval, VertexTable, WlpExpr, evaluate, vertex_table
from .moments import GSpec, integration_domain
from .quadrature import DEFAULT_ATOL, adaptive_quad
from .setfunc import SetFunction

__all__ = [
    "ORACLE_MAX_ARITY",
    "NAIVE_MOBIUS_MAX_N",
    "SimulationPlan",
    "SimulationSummary",
    "simulate",
    "draw",
    "ks_distance",
    "recursive_expectation",
    "gS_sequence_expectation",
    "naive_mobius",
]

ORACLE_MAX_ARITY = 8
NAIVE_MOBIUS_MAX_N = 12
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimulationPlan:
    samples: int
    seed: int
    model: object  # WlpExpr or VertexTable
    rv: RandomVector
    grid: tuple = ()

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise WlpError("samples must be a positive integer")
        if not 0 <= int(self.seed) < 1 << 64:
            raise WlpError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "rv", RandomVector(self.rv))
        n = self.model.n if isinstance(self.model, VertexTable) else self.model.arity()
        if n > len(self.rv):
            raise ArityError(f"model uses {n} variables, {len(self.rv)} distributions given")


@dataclass(frozen=True)
class SimulationSummary:
    samples: int
    seed: int
    mean: float
    se: float
    moments: tuple
    ecdf_y: tuple
    ecdf_F: tuple
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "mean": self.mean,
            "se": self.se,
            "moments": list(self.moments),
            "ecdf": {"y": list(self.ecdf_y), "F": list(self.ecdf_F)},
        }


def _evaluator(model):
    if isinstance(model, VertexTable):
        return model.evaluate
    return lambda x: evaluate(model, x)


def draw(plan: SimulationPlan):
    """Yield successive blocks of ``Y_p`` samples.

    Each variable has its own stream, so the first ``N`` draws do not depend
    on the total sample count.
    """
    streams = variable_streams(int(plan.seed), len(plan.rv))
    f = _evaluator(plan.model)
    left = int(plan.samples)
    while left:
        size = min(_CHUNK, left)
        x = np.column_stack([d.sample(s, size) for d, s in zip(plan.rv, streams)])
        yield f(x)
        left -= size


def simulate(plan: SimulationPlan, max_moment: int = 4, keep_values: bool = False) -> SimulationSummary:
    """Monte Carlo summary: mean, standard error, raw moments, ECDF on a grid."""
    blocks = list(draw(plan))
    values = np.concatenate(blocks)
    n = values.size
    sums = [math.fsum(np.sum(b**k) for b in blocks) for k in range(1, max_moment + 1)]
    raw = [s / n for s in sums]
    mean = raw[0]
    var = math.fsum(np.sum((b - mean) ** 2) for b in blocks) / max(n - 1, 1)
    grid = np.asarray(plan.grid, dtype=float)
    if grid.size == 0:
        grid = np.linspace(values.min(), values.max(), 21)
    ordered = np.sort(values)
    ecdf = np.searchsorted(ordered, grid, side="right") / n
    return SimulationSummary(
        samples=n,
        seed=int(plan.seed),
        mean=mean,
        se=math.sqrt(var / n),
        moments=tuple(raw),
        ecdf_y=tuple(grid.tolist()),
        ecdf_F=tuple(ecdf.tolist()),
        values=values if keep_values else None,
    )


def ks_distance(values, cdf: Callable, atoms: Sequence[float] = ()) -> float:
    """Exact sup-distance between the empirical CDF of ``values`` and ``cdf``.

    Both functions are checked at, and just left of, every sample value and
    every listed jump location of ``cdf``; between those points the ECDF is
    flat and ``cdf`` is monotone, so the supremum is attained there.
    """
    ordered = np.sort(np.asarray(values, dtype=float))
    n = ordered.size
    pts = np.unique(np.concatenate([ordered, np.asarray(atoms, dtype=float)]))
    right = np.searchsorted(ordered, pts, side="right") / n
    left = np.searchsorted(ordered, pts, side="left") / n
    f_right = np.asarray(cdf(pts), dtype=float)
    f_left = np.asarray(cdf(np.nextafter(pts, -np.inf)), dtype=float)
    return float(max(np.max(np.abs(right - f_right)), np.max(np.abs(left - f_left))))


# ---------------------------------------------------------------------------
# Recursive decomposition
# ---------------------------------------------------------------------------


def _prepare(expr, rv, g, lattice, eps):
    rv = RandomVector(rv)
    n = len(rv)
    if n > ORACLE_MAX_ARITY:
        raise ArityError(f"recursive oracles are limited to {ORACLE_MAX_ARITY} variables")
    table = vertex_table(expr, lattice, n=n) if isinstance(expr, WlpExpr) else expr
    if table.n != n:
        raise ArityError(f"table has n={table.n}, {n} distributions given")
    dom = integration_domain(table, rv, eps)
    breaks = set(rv.breakpoints()) | set(table.alpha[np.isfinite(table.alpha)].tolist())
    breaks |= {z for z, _ in g.atoms}
    breaks = sorted({dom.lo, dom.hi} | {b for b in breaks if dom.lo < b < dom.hi})
    return table, rv, dom, breaks


def _grid(breaks, points):
    total = breaks[-1] - breaks[0]
    pieces = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        m = max(8, int(math.ceil(points * (hi - lo) / total)))
        pieces.append(np.linspace(lo, hi, m + 1)[:-1])
    pieces.append(np.array([breaks[-1]]))
    return np.concatenate(pieces)


def _split(expr, rv, lattice, grid, gvals, k, point, leaves):
    n = len(rv)
    if k == n:
        c = evaluate(expr, point) if isinstance(expr, WlpExpr) else expr.evaluate(point)
        c = min(max(c, grid[0]), grid[-1])
        leaves.append(float(np.interp(c, grid, gvals)))
        return
    mid = 0.5 * (grid[1:] + grid[:-1])
    fk = np.asarray(rv[k].cdf(mid), dtype=float)
    # g_a(x) = int_lo^x F_k dg (midpoint Stieltjes sums), g_b = g - g_a
    ga = np.concatenate([[0.0], np.cumsum(fk * np.diff(gvals))])
    gb = gvals - ga
    for value, gnext in ((lattice.a, ga), (lattice.b, gb)):
        point[k] = value
        _split(expr, rv, lattice, grid, gnext, k + 1, point, leaves)
    point[k] = np.nan


def recursive_expectation(
    expr: WlpExpr | VertexTable,
    rv: RandomVector,
    g: GSpec,
    lattice: LatticeInterval = UNIT_INTERVAL,
    grid_points: int = 4096,
    eps: float = DEFAULT_EPS,
) -> float:
    """``E[g(Y_p)]`` by splitting ``E[g(Y_p)] = E[g_a(Y_{p_k^a})] + E[g_b(Y_{p_k^b})]``.

    Variables are isolated in index order until every one is pinned to ``a``
    or ``b``; the transformed ``g`` is then read at the resulting constant.
    Transforms use midpoint Stieltjes sums on a grid with at least
    ``grid_points`` cells, refined once and Richardson-extrapolated.
    """
    if g.atoms:
        raise WlpError("the grid oracle needs g without jumps")
    table, rv, dom, breaks = _prepare(expr, rv, g, lattice, eps)
    target = expr if isinstance(expr, WlpExpr) else table
    estimates = []
    for points in (grid_points, 2 * grid_points):
        grid = _grid(breaks, points)
        leaves = []
        _split(target, rv, table.lattice, grid, np.asarray(g.g(grid), dtype=float), 0,
               np.full(len(rv), np.nan), leaves)
        estimates.append(math.fsum(leaves))
    coarse, fine = estimates
    return (4.0 * fine - coarse) / 3.0


def gS_sequence_expectation(
    expr: WlpExpr | VertexTable,
    rv: RandomVector,
    g: GSpec,
    lattice: LatticeInterval = UNIT_INTERVAL,
    eps: float = DEFAULT_EPS,
    atol: float = DEFAULT_ATOL,
) -> float:
    """``sum_S g_S^n(p(e_S))`` with ``d g_S^k = F_k d g_S^{k-1}`` (k not in S)
    or ``(1 - F_k) d g_S^{k-1}`` (k in S)."""
    table, rv, dom, breaks = _prepare(expr, rv, g, lattice, eps)
    n = len(rv)
    full = (1 << n) - 1
    budget = atol / (1 << n)
    total = []
    for s in range(1 << n):
        density = g.dg
        weight = lambda y: np.ones_like(np.asarray(y, dtype=float))  # noqa: E731
        for k in range(n):
            law, inside = rv[k], bool(s >> k & 1)

            def step(y, prev=weight, law=law, inside=inside):
                f = law.cdf(y)
                return prev(y) * ((1.0 - f) if inside else f)

            weight = step
        upper = min(max(table.alpha[s], dom.lo), dom.hi)
        base = float(g.g(np.array([dom.lo]))[0]) if s == full else 0.0
        value, _ = adaptive_quad(lambda y: weight(y) * density(y), dom.lo, upper, breaks, budget)
        total.append(base + value)
        for z, size in g.atoms:
            if dom.lo <= z <= dom.hi and z < table.alpha[s]:
                total.append(size * float(weight(np.array([z]))[0]))
    return math.fsum(total)


def naive_mobius(v: SetFunction) -> SetFunction:
    """``m(S) = sum_{T <= S} (-1)^{|S|-|T|} v(T)`` by enumerating every pair."""
    if v.n > NAIVE_MOBIUS_MAX_N:
        raise ArityError(f"naive Möbius transform is limited to n <= {NAIVE_MOBIUS_MAX_N}")
    values = v.values.tolist()
    out = []
    for s in range(1 << v.n):
        acc = 0.0
        for t in range(1 << v.n):
            if t & s == t:
                sign = -1.0 if bin(s ^ t).count("1") & 1 else 1.0
                acc += sign * values[t]
        out.append(acc)
    return SetFunction(v.n, out)
