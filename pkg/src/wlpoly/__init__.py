"""Distributions, moments and reliability of weighted lattice polynomials
(min/max/constant expressions) of independent random variables."""

from .cdf import CdfMethod, cdf_at, cdf_grid, cdf_lattice, survival_at
from .dist import Constant, Exponential, RandomVector, Table, Uniform, effective_domain
from .exceptions import (
    ArityError,
    HypothesisViolation,
    LatticeBoundsError,
    NumericalError,
    QuadratureError,
    WlpError,
    WlpSyntaxError,
)
from .expr import (
    UNIT_INTERVAL,
    Const,
    Join,
    LatticeInterval,
    Meet,
    Var,
    VertexTable,
    WlpExpr,
    evaluate,
    join,
    median_decompose,
    meet,
    parse,
    pin,
    vertex_table,
)
from .moments import (
    CenteredPower,
    Exp,
    Identity,
    Power,
    Step,
    central_moment,
    choquet_expectation,
    choquet_integral,
    expectation,
    incomplete_beta,
    mgf,
    raw_moment,
    sugeno_expectation,
    sugeno_integral,
    uniform_raw_moment,
)
from .reliability import (
    LIFETIME_LATTICE,
    ExponentialRates,
    SystemModel,
    mean_lifetime_numeric,
    mttf_exponential,
    system_reliability,
)
from .setfunc import (
    FuzzyMeasure,
    SetFunction,
    is_fuzzy_measure,
    mobius_transform,
    multilinear_extension,
    threshold_setfunctions,
    zeta_transform,
)

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "cdf_at",
    "cdf_grid",
    "cdf_lattice",
    "CdfMethod",
    "CenteredPower",
    "central_moment",
    "choquet_expectation",
    "choquet_integral",
    "Const",
    "Constant",
    "effective_domain",
    "evaluate",
    "Exp",
    "expectation",
    "Exponential",
    "ExponentialRates",
    "FuzzyMeasure",
    "HypothesisViolation",
    "Identity",
    "incomplete_beta",
    "is_fuzzy_measure",
    "Join",
    "join",
    "LatticeBoundsError",
    "LatticeInterval",
    "LIFETIME_LATTICE",
    "mean_lifetime_numeric",
    "median_decompose",
    "Meet",
    "meet",
    "mgf",
    "mobius_transform",
    "mttf_exponential",
    "multilinear_extension",
    "NumericalError",
    "parse",
    "pin",
    "Power",
    "QuadratureError",
    "RandomVector",
    "raw_moment",
    "SetFunction",
    "Step",
    "sugeno_expectation",
    "sugeno_integral",
    "survival_at",
    "system_reliability",
    "SystemModel",
    "Table",
    "threshold_setfunctions",
    "Uniform",
    "uniform_raw_moment",
    "UNIT_INTERVAL",
    "Var",
    "vertex_table",
    "VertexTable",
    "WlpError",
    "WlpExpr",
    "WlpSyntaxError",
    "zeta_transform",
]
