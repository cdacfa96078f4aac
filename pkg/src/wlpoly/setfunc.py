"""Set functions on the subsets of ``[n]``, stored densely by bitmask.

Bit ``i-1`` of a mask stands for element ``i``; masks are always visited in
increasing order so every sum below has a fixed, reproducible order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import WlpError

__all__ = [
    "COMPENSATED_FROM",
    "SetFunction",
    "FuzzyMeasure",
    "popcounts",
    "mobius_transform",
    "zeta_transform",
    "subset_weights",
    "monomial_weights",
    "multilinear_extension",
    "threshold_setfunctions",
    "threshold_matrix",
    "is_fuzzy_measure",
]

# Ground-set size from which transforms and sums switch to compensated arithmetic.
COMPENSATED_FROM = 16


def popcounts(n: int) -> np.ndarray:
    """``|S|`` for every mask ``S`` of ``[n]``."""
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


@dataclass(frozen=True, eq=False)
class SetFunction:
    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if self.n < 0 or values.shape != (1 << self.n,):
            raise WlpError(f"a set function on n={self.n} needs exactly {1 << self.n} values")
        if not np.all(np.isfinite(values)):
            raise WlpError("set function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, n, func):
        """Build from ``func(frozenset_of_elements)`` with elements in ``1..n``."""
        values = [
            func(frozenset(i + 1 for i in range(n) if mask >> i & 1)) for mask in range(1 << n)
        ]
        return cls(n, values)

    def __getitem__(self, mask):
        return float(self.values[mask])

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return (
            isinstance(other, SetFunction)
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        try:
            return cls(int(data["n"]), data["values"])
        except (KeyError, TypeError) as exc:
            raise WlpError(f"malformed set function JSON: {exc}") from None


class FuzzyMeasure(SetFunction):
    """Nondecreasing set function with ``mu(empty) = a`` and ``mu([n]) = b``."""

    def __init__(self, n, values, a=0.0, b=1.0):
        super().__init__(n, values)
        object.__setattr__(self, "a", float(a))
        object.__setattr__(self, "b", float(b))
        if not is_fuzzy_measure(self, self.a, self.b):
            raise WlpError(
                f"not a fuzzy measure on [{self.a}, {self.b}]: needs mu(empty)=a, "
                "mu([n])=b and monotonicity under inclusion"
            )

    @classmethod
    def from_json(cls, text, a=0.0, b=1.0):
        sf = SetFunction.from_json(text)
        return cls(sf.n, sf.values, a, b)


def _as_array(v):
    return v.values if isinstance(v, SetFunction) else np.asarray(v, dtype=float)


def _butterfly(arr, n, sign, compensated):
    # In-place subset-sum over axis 0: for every bit, arr[S | bit] += sign * arr[S].
    tail = arr.shape[1:]
    if not compensated:
        for i in range(n):
            view = arr.reshape((-1, 2, 1 << i) + tail)
            view[:, 1] += sign * view[:, 0]
        return arr
    lo = np.zeros_like(arr)
    for i in range(n):
        hv = arr.reshape((-1, 2, 1 << i) + tail)
        lv = lo.reshape((-1, 2, 1 << i) + tail)
        a, b = hv[:, 1].copy(), sign * hv[:, 0]
        s = a + b
        bb = s - a
        err = (a - (s - bb)) + (b - bb)
        hv[:, 1] = s
        lv[:, 1] += sign * lv[:, 0] + err
    return arr + lo


def mobius_transform(v, compensated: bool | None = None):
    """Möbius transform ``m(S) = sum_{T <= S} (-1)^{|S|-|T|} v(T)``.

    Computed with the O(n 2^n) butterfly. Accepts a :class:`SetFunction` or an
    array whose first axis is indexed by mask (extra axes are transformed
    independently).
    """
    arr = np.array(_as_array(v), dtype=float)
    n = int(arr.shape[0]).bit_length() - 1
    if arr.shape[0] != 1 << n:
        raise WlpError("first axis length must be a power of two")
    if compensated is None:
        compensated = n >= COMPENSATED_FROM
    out = _butterfly(arr, n, -1.0, compensated)
    return SetFunction(n, out) if isinstance(v, SetFunction) else out


def zeta_transform(m, compensated: bool | None = None):
    """Inverse of :func:`mobius_transform`: ``v(S) = sum_{T <= S} m(T)``."""
    arr = np.array(_as_array(m), dtype=float)
    n = int(arr.shape[0]).bit_length() - 1
    if arr.shape[0] != 1 << n:
        raise WlpError("first axis length must be a power of two")
    if compensated is None:
        compensated = n >= COMPENSATED_FROM
    out = _butterfly(arr, n, 1.0, compensated)
    return SetFunction(n, out) if isinstance(m, SetFunction) else out


def subset_weights(x) -> np.ndarray:
    """``prod_{i in S} x_i prod_{i not in S} (1 - x_i)`` for every mask ``S``.

    ``x`` has shape ``(n,)`` or ``(n, m)``; the result has ``2^n`` rows.
    Each product multiplies its factors in index order.
    """
    x = np.asarray(x, dtype=float)
    w = np.ones((1,) + x.shape[1:])
    for xi in x:
        w = np.concatenate([w * (1.0 - xi), w * xi])
    return w


def monomial_weights(x) -> np.ndarray:
    """``prod_{i in S} x_i`` for every mask ``S`` (same layout as :func:`subset_weights`)."""
    x = np.asarray(x, dtype=float)
    w = np.ones((1,) + x.shape[1:])
    for xi in x:
        w = np.concatenate([w, w * xi])
    return w


def _masked_sum(coeffs, weights):
    terms = coeffs * weights
    if terms.shape[0] < 1 << COMPENSATED_FROM:
        return terms.sum(axis=0)
    if terms.ndim == 1:
        return math.fsum(terms)
    return np.array([math.fsum(col) for col in terms.reshape(terms.shape[0], -1).T]).reshape(
        terms.shape[1:]
    )


def multilinear_extension(v, x, form: str = "product"):
    """Owen's multilinear extension of ``v`` at ``x`` in ``[0, 1]^n``.

    ``form="product"`` sums ``v(S)`` against the subset weights;
    ``form="mobius"`` sums the Möbius coefficients against monomials.
    """
    values = _as_array(v)
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if values.shape[0] != 1 << n:
        raise WlpError(f"point has {n} coordinates, set function has {values.shape[0]} values")
    if np.any((x < 0) | (x > 1)) or np.isnan(x).any():
        raise WlpError("multilinear extension is defined on [0, 1]^n")
    if form == "product":
        coeffs, weights = values, subset_weights(x)
    elif form == "mobius":
        coeffs, weights = mobius_transform(values), monomial_weights(x)
    else:
        raise WlpError(f"unknown form {form!r}")
    if weights.ndim > 1 and coeffs.ndim == 1:
        coeffs = coeffs.reshape((-1,) + (1,) * (weights.ndim - 1))
    out = _masked_sum(coeffs, weights)
    return float(out) if np.ndim(out) == 0 else out


def threshold_matrix(alpha, ys, strict: bool = True) -> np.ndarray:
    """Boolean matrix ``[S, j]``: ``ys[j] < alpha[S]`` (strict) or ``ys[j] >= alpha[S]``."""
    alpha = np.asarray(alpha, dtype=float)[:, None]
    ys = np.atleast_1d(np.asarray(ys, dtype=float))[None, :]
    return ys < alpha if strict else ys >= alpha


def threshold_setfunctions(table, y: float) -> tuple[SetFunction, SetFunction]:
    """The 0/1 set functions ``v_{p,y}`` and ``v*_{p,y}`` of a vertex table.

    ``v_{p,y}(S) = 1`` iff ``y < alpha[S]`` and ``v*_{p,y}(S) = 1`` iff
    ``y >= alpha[[n] \\ S]``, with the Heaviside convention ``H(0) = 1``.
    """
    alpha = table.alpha
    v = (y < alpha).astype(float)
    v_star = (y >= table.beta).astype(float)
    return SetFunction(table.n, v), SetFunction(table.n, v_star)


def is_fuzzy_measure(v, a: float = 0.0, b: float = 1.0) -> bool:
    values = _as_array(v)
    n = values.shape[0].bit_length() - 1
    if values.shape[0] != 1 << n:
        return False
    if values[0] != a or values[-1] != b:
        return False
    masks = np.arange(1 << n)
    for i in range(n):
        lower = masks[(masks >> i) & 1 == 0]
        if np.any(values[lower] > values[lower | (1 << i)]):
            return False
    return True
