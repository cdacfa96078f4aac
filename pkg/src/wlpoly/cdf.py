"""Closed-form CDF of ``Y_p = p(X_1, ..., X_n)`` for independent inputs.

Four equivalent routes are offered: the disjunctive and conjunctive subset
sums (multilinear extension of the threshold set functions at the input
survival/CDF values) and their Möbius-coefficient forms.
"""

from __future__ import annotations

import enum

import numpy as np

from .dist import RandomVector
from .exceptions import ArityError, WlpError
from .expr import VertexTable
from .setfunc import mobius_transform, monomial_weights, subset_weights, threshold_matrix

__all__ = [
    "CdfMethod",
    "cdf_at",
    "survival_at",
    "cdf_lattice",
    "cdf_grid",
    "CdfCache",
]

# Upper bound on 2^n * (number of y values) handled in one vectorised block.
_BLOCK = 1 << 21


class CdfMethod(str, enum.Enum):
    DISJUNCTIVE = "disjunctive"
    CONJUNCTIVE = "conjunctive"
    MOBIUS_DISJUNCTIVE = "mobius-disjunctive"
    MOBIUS_CONJUNCTIVE = "mobius-conjunctive"


def _check(table, rv):
    if len(rv) != table.n:
        raise ArityError(f"vertex table has n={table.n} but {len(rv)} distributions were given")
    if rv and not table.lattice.contains(list(rv.support)):
        a, b = table.lattice
        raise WlpError(f"input supports {tuple(rv.support)} exceed the lattice [{a}, {b}]")


def _blocks(ys, n):
    step = max(1, _BLOCK >> n)
    for start in range(0, ys.size, step):
        yield slice(start, start + step)


def _survival_block(alpha, beta, F, ys, method):
    if method is CdfMethod.DISJUNCTIVE:
        v = threshold_matrix(alpha, ys)
        return (v * subset_weights(1.0 - F)).sum(axis=0)
    if method is CdfMethod.CONJUNCTIVE:
        v_star = threshold_matrix(beta, ys, strict=False)
        return 1.0 - (v_star * subset_weights(F)).sum(axis=0)
    if method is CdfMethod.MOBIUS_DISJUNCTIVE:
        m = mobius_transform(threshold_matrix(alpha, ys).astype(float))
        return (m * monomial_weights(1.0 - F)).sum(axis=0)
    if method is CdfMethod.MOBIUS_CONJUNCTIVE:
        m = mobius_transform(threshold_matrix(beta, ys, strict=False).astype(float))
        return 1.0 - (m * monomial_weights(F)).sum(axis=0)
    raise WlpError(f"unknown CDF method {method!r}")


def _pin_bounds(out, ys, alpha):
    # Y_p lies in [alpha[empty], alpha[full]] surely; keep the bounds exact.
    out[ys < alpha[0]] = 1.0
    out[ys >= alpha[-1]] = 0.0
    return out


def survival_at(table: VertexTable, rv: RandomVector, y, method=CdfMethod.DISJUNCTIVE):
    """``Pr[Y_p > y]``; scalar in, scalar out, array in, array out."""
    _check(table, rv)
    method = CdfMethod(method)
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty(ys.shape)
    flat = ys.ravel()
    res = out.reshape(-1)
    beta = table.beta
    for sl in _blocks(flat, table.n):
        F = rv.cdfs(flat[sl])
        res[sl] = _survival_block(table.alpha, beta, F, flat[sl], method)
    np.clip(out, 0.0, 1.0, out=out)
    _pin_bounds(out, ys, table.alpha)
    return float(out[0]) if np.ndim(y) == 0 else out


def cdf_at(table: VertexTable, rv: RandomVector, y, method=CdfMethod.DISJUNCTIVE):
    """``F_p(y) = Pr[Y_p <= y]`` with the right-continuous convention ``H(0) = 1``."""
    s = survival_at(table, rv, y, method)
    return 1.0 - s


def cdf_lattice(table: VertexTable, rv: RandomVector, y):
    """CDF of an ordinary lattice polynomial (no effective constants).

    ``1 - sum over {S : p(e_S) = b}`` of the subset weights of the input
    survival probabilities.
    """
    _check(table, rv)
    if not table.is_lattice_polynomial():
        raise WlpError("table is not {a, b}-valued with alpha[empty] = a")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    top = table.alpha == table.lattice.b
    out = np.empty(ys.shape)
    flat, res = ys.ravel(), out.reshape(-1)
    for sl in _blocks(flat, table.n):
        F = rv.cdfs(flat[sl])
        res[sl] = 1.0 - subset_weights(1.0 - F)[top].sum(axis=0)
    return float(out[0]) if np.ndim(y) == 0 else out


class CdfCache:
    """Möbius coefficients precomputed on each interval where ``v_{p,y}`` is constant.

    ``v_{p,y}`` only changes when ``y`` crosses a vertex value, so a grid of
    queries needs at most ``#distinct(alpha) + 1`` Möbius transforms.
    """

    def __init__(self, table: VertexTable, rv: RandomVector):
        _check(table, rv)
        self.table = table
        self.rv = rv
        self.levels = np.unique(table.alpha)
        # Interval j holds y with levels[j-1] <= y < levels[j]; v_{p,y}(S) = [alpha[S] >= levels[j]].
        v = (table.alpha[:, None] >= self.levels[None, :]).astype(float)
        v = np.hstack([v, np.zeros((v.shape[0], 1))])
        self.coeffs = mobius_transform(v)

    def survival(self, y):
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        flat = ys.ravel()
        idx = np.searchsorted(self.levels, flat, side="right")
        out = np.empty(flat.shape)
        for sl in _blocks(flat, self.table.n):
            F = self.rv.cdfs(flat[sl])
            m = self.coeffs[:, idx[sl]]
            out[sl] = (m * monomial_weights(1.0 - F)).sum(axis=0)
        out = _pin_bounds(np.clip(out, 0.0, 1.0), flat, self.table.alpha).reshape(ys.shape)
        return float(out[0]) if np.ndim(y) == 0 else out

    def cdf(self, y):
        return 1.0 - self.survival(y)


def cdf_grid(table, rv, ys, method=CdfMethod.DISJUNCTIVE):
    """CDF over an array of ``y`` values; Möbius-disjunctive uses :class:`CdfCache`."""
    method = CdfMethod(method)
    if method is CdfMethod.MOBIUS_DISJUNCTIVE:
        return CdfCache(table, rv).cdf(np.asarray(ys, dtype=float))
    return cdf_at(table, rv, np.asarray(ys, dtype=float), method)
