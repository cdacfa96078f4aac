"""Random instance generators shared by the test modules."""

import math

import numpy as np

from wlpoly.dist import Constant, Exponential, RandomVector, Table, Uniform
from wlpoly.expr import Const, LatticeInterval, Var, join, meet


def random_wlp(rng, n, n_consts=None, const_range=(0.0, 1.0), repeats=0):
    """Random expression using every variable x1..xn at least once."""
    if n_consts is None:
        n_consts = int(rng.integers(0, 3))
    leaves = [Var(i) for i in range(1, n + 1)]
    leaves += [Var(int(rng.integers(1, n + 1))) for _ in range(repeats)]
    leaves += [Const(round(float(rng.uniform(*const_range)), 3)) for _ in range(n_consts)]
    leaves = [leaves[i] for i in rng.permutation(len(leaves))]
    while len(leaves) > 1:
        k = min(len(leaves), int(rng.integers(2, 4)))
        picked, leaves = leaves[:k], leaves[k:]
        node = meet(*picked) if rng.random() < 0.5 else join(*picked)
        leaves.insert(int(rng.integers(0, len(leaves) + 1)), node)
    return leaves[0]


def random_series_parallel(rng, n):
    """Each component exactly once, series = min, parallel = max."""
    return random_wlp(rng, n, n_consts=0)


def random_law(rng, kinds=("uniform", "exponential", "constant", "table")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "uniform":
        lo = round(float(rng.uniform(0, 1.5)), 3)
        return Uniform(lo, lo + round(float(rng.uniform(0.1, 1.0)), 3))
    if kind == "exponential":
        return Exponential(round(float(rng.uniform(0.5, 3.0)), 3))
    if kind == "constant":
        return Constant(round(float(rng.uniform(0, 2)), 3))
    xs = np.sort(rng.choice(np.arange(0, 2.001, 0.125), size=int(rng.integers(2, 6)), replace=False))
    fs = np.sort(rng.uniform(0, 1, size=len(xs)))
    fs[-1] = 1.0
    if rng.random() < 0.5:
        fs[0] = 0.0
    return Table(tuple(zip(xs.tolist(), fs.tolist())))


def random_rv(rng, n, kinds=("uniform", "exponential", "constant", "table")):
    return RandomVector([random_law(rng, kinds) for _ in range(n)])


def lattice_for(rv, expr=None):
    """Tightest convenient lattice containing the supports and constants."""
    consts = expr.constants() if expr is not None else ()
    hi = max([rv.support.hi, *consts, 2.0])
    return LatticeInterval(0.0, math.inf if math.isinf(hi) else hi)
