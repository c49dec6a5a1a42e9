"""Copulas, multivariate measures of concordance, and the identities between them."""

from .copula import (
    Copula,
    ContractViolation,
    DimensionCapError,
    Empirical,
    En,
    M,
    MarginalOf,
    Mixture,
    Pi,
    Product,
    SymmetryApplied,
    apply_symmetry,
    canonical,
    enumerate_marginals,
    evaluate,
    marginal,
    permute,
    reflect,
    survival,
    survival_copula,
)
from .estimation import EstimatorConfig, EvalResult, InputError, empirical_copula, pseudo_observations, sample
from .grammar import parse_copula
from .measures import (
    BLOMQVIST,
    GINI,
    KENDALL,
    SPEARMAN,
    TABLE_FAMILIES,
    MeasureFamily,
    alpha,
    big_r,
    kappa,
    parse_family,
    scarsini,
    transition_constant,
)
from .symmetry import Symmetry

__version__ = "0.1.0"
