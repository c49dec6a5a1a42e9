"""Numerical certification suites for the axioms and the marginal identities.

Each suite returns a list of ``Check`` rows.  Agreement between two evaluated
quantities uses a gate chosen from the least exact route involved: ``exact_tol``
for exact values, ``quad_tol`` for Simpson quadrature, and ``sigmas`` combined
standard errors (plus ``exact_tol``) for Monte Carlo.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .copula import Copula, En, M, Mixture, Pi, apply_symmetry, marginal, permute, reflect
from .estimation import EXACT, MONTE_CARLO, QUADRATURE, EstimatorConfig, EvalResult, linear_combination
from .identities import (
    asymptotic_limit,
    extended_transition_check,
    gamma_star,
    independent_extension,
    marginal_concordance_sum,
    reflected_comonotone_value,
    reflected_first,
    reflection_reduction_rhs,
    stepdown_value,
    ubeda_coefficients_closed_form,
    ubeda_coefficients_pairwise,
    ubeda_coefficients_solve,
    ubeda_identity_rhs,
)
from .measures import (
    BLOMQVIST,
    SPEARMAN,
    TABLE_FAMILIES,
    Kind,
    MeasureFamily,
    big_r,
    kappa,
    scarsini,
    transition_constant,
)
from .symmetry import Symmetry, all_reflections

SUITES = ("axioms", "theorems", "ubeda", "asymptotics")
DEFAULT_FAMILIES = TABLE_FAMILIES + (scarsini(),)


@dataclass(frozen=True)
class Gate:
    exact_tol: float = 1e-12
    quad_tol: float = 1e-6
    sigmas: float = 5.0

    def tolerance(self, *results) -> float:
        rs = [r for r in results if isinstance(r, EvalResult)]
        methods = {r.method for r in rs}
        if MONTE_CARLO in methods:
            se = float(np.sqrt(sum((r.std_error or 0.0) ** 2 for r in rs)))
            return self.sigmas * se + self.exact_tol
        if QUADRATURE in methods:
            return self.quad_tol
        return self.exact_tol


@dataclass
class Check:
    name: str
    value: float
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    passed: Optional[bool] = None
    method: str = EXACT
    std_error: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "method": self.method,
            "std_error": self.std_error,
        }


def _as_result(x) -> EvalResult:
    return x if isinstance(x, EvalResult) else EvalResult(float(x))


def compare(name: str, actual, expected, gate: Gate = Gate()) -> Check:
    """Gate ``actual`` against ``expected``; either may be an ``EvalResult`` or a number."""
    a, e = _as_result(actual), _as_result(expected)
    tol = gate.tolerance(a, e)
    diff = a - e
    passed = abs(diff.value) <= tol
    return Check(name, a.value, e.value, tol, bool(passed), diff.method, diff.std_error)


def info(name: str, result) -> Check:
    r = _as_result(result)
    return Check(name, r.value, method=r.method, std_error=r.std_error)


def _fixtures(n: int) -> list[tuple[str, Copula]]:
    return [
        (f"Pi({n})", Pi(n)),
        (f"M({n})", M(n)),
        (f"En({n},0.5)", En(n, 0.5)),
        (f"refl(1)*M({n})", reflect(M(n), 1)),
    ]


def axioms(
    families: Sequence[MeasureFamily] = DEFAULT_FAMILIES,
    config: EstimatorConfig = EstimatorConfig(),
    gate: Gate = Gate(),
    dims: Iterable[int] = (2, 3, 4, 5),
    permutations: int = 3,
) -> list[Check]:
    rng = np.random.default_rng(config.seed)
    out: list[Check] = []
    for fam in families:
        for n in dims:
            out.append(compare(f"A1[{fam}] kappa(M({n})) = 1", kappa(fam, M(n), config), 1.0, gate))
            out.append(compare(f"A1[{fam}] kappa(Pi({n})) = 0", kappa(fam, Pi(n), config), 0.0, gate))
            perms = [tuple(int(v) + 1 for v in rng.permutation(n)) for _ in range(permutations)]
            for label, C in _fixtures(n):
                base = kappa(fam, C, config)
                for perm in perms:
                    out.append(compare(
                        f"A4[{fam}] kappa(perm{perm}*{label}) = kappa({label})",
                        kappa(fam, permute(C, perm), config), base, gate,
                    ))
                dual = apply_symmetry(Symmetry.full_reflection(n), C)
                out.append(compare(f"A5[{fam}] kappa(sigma*{label}) = kappa({label})",
                                   kappa(fam, dual, config), base, gate))
                rsp = linear_combination((1.0, kappa(fam, apply_symmetry(rho, C), config))
                                         for rho in all_reflections(n))
                out.append(compare(f"A6[{fam}] sum_rho kappa(rho*{label}) = 0", rsp, 0.0, gate))
                lhs = base + kappa(fam, reflect(C, 1), config)
                if n >= 3:
                    rhs = float(transition_constant(fam, n - 1)) * kappa(fam, marginal(C, (1,)), config)
                else:
                    rhs = EvalResult(0.0)
                out.append(compare(f"A7[{fam}] kappa({label}) + kappa(refl(1)*{label}) = r_{n-1} kappa(C_1)",
                                   lhs, rhs, gate))
        for label, C in (("En(3,0.6)", En(3, 0.6)), ("refl(1)*M(3)", reflect(M(3), 1))):
            base = kappa(fam, C, config)
            for _ in range(20):
                perm = tuple(int(v) + 1 for v in rng.permutation(3))
                out.append(compare(f"A4[{fam}] kappa(perm{perm}*{label}) = kappa({label})",
                                   kappa(fam, permute(C, perm), config), base, gate))
        lo, hi = kappa(fam, En(2, 0.2), config), kappa(fam, En(2, 0.8), config)
        slack = gate.tolerance(lo, hi)
        out.append(Check(f"A2[{fam}] kappa(En(2,0.2)) <= kappa(En(2,0.8))", lo.value, hi.value,
                         slack, bool(lo.value <= hi.value + slack), (hi - lo).method, (hi - lo).std_error))
        for t in (1e-2, 1e-4):
            mix = kappa(fam, Mixture(t, Pi(3), M(3)), config)
            # every family here is at most quadratic in t with coefficients bounded by 4
            tol = gate.tolerance(mix) + 4 * t
            out.append(Check(f"A3[{fam}] kappa(mix({t},Pi(3),M(3))) -> 0", mix.value, 0.0, tol,
                             bool(abs(mix.value) <= tol), mix.method, mix.std_error))
        for label, C in _fixtures(2):
            out.append(compare(f"RSP2[{fam}] kappa(refl(1)*{label}) = -kappa({label})",
                               kappa(fam, reflect(C, 1), config), -kappa(fam, C, config), gate))
    return out


def theorems(
    families: Sequence[MeasureFamily] = DEFAULT_FAMILIES,
    config: EstimatorConfig = EstimatorConfig(),
    gate: Gate = Gate(),
) -> list[Check]:
    out: list[Check] = []
    for fam in families:
        out.append(compare(f"T1c[{fam}] r_2 = 2/3", float(transition_constant(fam, 2)), 2 / 3, gate))
        for n in (3, 4, 5):
            r = float(transition_constant(fam, n - 1))
            for i in range(1, n + 1):
                out.append(compare(f"T1b[{fam}] 1 + kappa(refl({i})*M({n})) = r_{n-1}",
                                   1.0 + kappa(fam, reflect(M(n), i), config), r, gate))
        for i, j in itertools.permutations(range(1, 4), 2):
            out.append(compare(f"T1c[{fam}] kappa(refl({i})*M(3)) = -1/3",
                               kappa(fam, reflect(M(3), i), config), -1 / 3, gate))
            out.append(compare(f"T1c[{fam}] kappa(refl({i},{j})*M(3)) = -1/3",
                               kappa(fam, reflect(M(3), i, j), config), -1 / 3, gate))
        for n in (3, 4):
            by_len: dict[int, EvalResult] = {}
            for rho in all_reflections(n):
                xi = Symmetry(tuple(range(n, 0, -1))).compose(rho)
                value = kappa(fam, apply_symmetry(xi, M(n)), config)
                s = rho.length
                ref = by_len.setdefault(s, value)
                out.append(compare(f"T2[{fam}] n={n} |xi|={s} class constant", value, ref, gate))
            for s in range(n + 1):
                out.append(compare(f"T2[{fam}] n={n} |xi|={s} matches |xi|={n - s}",
                                   by_len[s], by_len[n - s], gate))
        for n in (3, 4):
            for label, C in ((f"M({n})", M(n)), (f"En({n},0.6)", En(n, 0.6))):
                for k in range(1, n + 1):
                    direct = kappa(fam, reflected_first(C, k), config)
                    out.append(compare(f"RR[{fam}] {label} k={k}", direct,
                                       reflection_reduction_rhs(fam, C, k, config), gate))
                    lhs, rhs = extended_transition_check(fam, C, k, config)
                    out.append(compare(f"ETP[{fam}] {label} k={k}", lhs, rhs, gate))
        for label, A in (("M(2)", M(2)), ("En(2,0.8)", En(2, 0.8))):
            for k in (1, 2):
                out.append(compare(f"SD[{fam}] kappa(Pi^{k} (x) {label})",
                                   kappa(fam, independent_extension(k, A), config),
                                   stepdown_value(fam, k, A, config), gate))
        for n in (2, 3):
            for k in (1, 2):
                out.append(compare(f"SD[{fam}] kappa(Pi^{k} (x) M({n})) = R/2^k",
                                   kappa(fam, independent_extension(k, M(n)), config),
                                   float(big_r(fam, n + k - 1, k) / 2**k), gate))
    return out


def ubeda_fixtures() -> list[tuple[str, Copula]]:
    return [
        ("refl(1)*M(3)", reflect(M(3), 1)),
        ("En(3,0.5)", En(3, 0.5)),
        ("mix(0.3,Pi(3),M(3))", Mixture(0.3, Pi(3), M(3))),
        ("perm(2,3,1)*prod(Pi(1),En(2,0.9))", permute(independent_extension(1, En(2, 0.9)), (2, 3, 1))),
        ("prod(Pi(1),En(4,0.9))", independent_extension(1, En(4, 0.9))),
        ("Pi(5)", Pi(5)),
    ]


def ubeda(
    families: Sequence[MeasureFamily] = DEFAULT_FAMILIES,
    config: EstimatorConfig = EstimatorConfig(),
    gate: Gate = Gate(),
    m_max: int = 6,
) -> list[Check]:
    out: list[Check] = []
    table = gamma_star(9)
    for k, expected in zip(table, (1, -2, 16, -272, 7936)):
        out.append(compare(f"gamma*_{k}", table[k], expected, Gate(exact_tol=0.0)))
    for fam in families:
        for m in range(1, m_max + 1):
            solved = ubeda_coefficients_solve(fam, m)
            closed = ubeda_coefficients_closed_form(fam, m)
            for k in range(1, m + 1):
                name = f"a[{fam}]_{2 * m + 1},{2 * k}"
                if m <= 4:
                    out.append(info(name, float(closed[k])))
                out.append(compare(f"{name} solve = closed form", float(solved[k]), float(closed[k]), gate))
        closed = ubeda_coefficients_closed_form(fam, 4)
        display = {1: (Fraction(-17, 8), 7), 2: (Fraction(1, 2), 5), 3: (Fraction(-1, 4), 3), 4: (Fraction(1, 2), 1)}
        for k, (c, j) in display.items():
            out.append(compare(f"kappa9[{fam}] a_9,{2 * k} = {c} R_8,{j}",
                               float(closed[k]), float(c * big_r(fam, 8, j)), Gate(exact_tol=0.0)))
        for label, C in ubeda_fixtures():
            lhs = kappa(fam, C, config)
            out.append(compare(f"U[{fam}] kappa({label}) = Ubeda rhs", lhs, ubeda_identity_rhs(fam, C, config), gate))
            if fam.kind is Kind.SCARSINI:
                alt = ubeda_coefficients_pairwise(fam, (C.dim - 1) // 2)
                out.append(compare(f"U[{fam}] kappa({label}) = pairwise rhs", lhs,
                                   ubeda_identity_rhs(fam, C, config, alt), gate))
        C = independent_extension(1, En(4, 0.9))
        out.append(compare(f"U[{fam}] Ubeda rhs on Pi^1 (x) En(4,0.9) = stepdown",
                           ubeda_identity_rhs(fam, C, config), stepdown_value(fam, 1, En(4, 0.9), config), gate))
        out.append(compare(f"U[{fam}] kappa3(refl(1)*M(3)) = (1/3) K_2",
                           kappa(fam, reflect(M(3), 1), config),
                           marginal_concordance_sum(fam, reflect(M(3), 1), 2, config) * (1 / 3), gate))
    return out


def asymptotics(
    families: Sequence[MeasureFamily] = DEFAULT_FAMILIES,
    config: EstimatorConfig = EstimatorConfig(),
    gate: Gate = Gate(),
    far: int = 2000,
) -> list[Check]:
    out: list[Check] = []
    for fam in families:
        for n in range(3, 13):
            out.append(info(f"AS[{fam}] r_{n - 1} - 1 (n={n})", float(transition_constant(fam, n - 1) - 1)))
            out.append(compare(f"AS[{fam}] kappa_{n}(refl(1)*M) via R = r_{n-1} - 1",
                               float(reflected_comonotone_value(fam, n, 1)),
                               float(transition_constant(fam, n - 1) - 1), gate))
        exact_route = fam.kind in (Kind.SPEARMAN, Kind.BLOMQVIST) or (
            fam.kind is Kind.SCARSINI and fam.base in (Kind.SPEARMAN, Kind.BLOMQVIST)
        )
        if exact_route:
            for n in range(3, 13):
                out.append(compare(f"AS[{fam}] kappa(refl(1)*M({n})) = r_{n-1} - 1",
                                   kappa(fam, reflect(M(n), 1), config),
                                   float(transition_constant(fam, n - 1) - 1), gate))
        for s in range(4):
            limit = float(asymptotic_limit(fam, s))
            checkpoints = sorted({n for n in (20 * 2**j for j in range(12)) if n < far} | {far})
            errs = [abs(float(reflected_comonotone_value(fam, n, s)) - limit) for n in checkpoints]
            out.append(compare(f"AS[{fam}] kappa_{far}(s={s}) -> (r-1)^{s}",
                               float(reflected_comonotone_value(fam, far, s)), limit, Gate(exact_tol=0.05)))
            tail = all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
            out.append(Check(f"AS[{fam}] s={s} error decreasing on n=20..{far}", errs[-1], 0.0, None, tail))
    return out


def run_suite(
    name: str,
    families: Sequence[MeasureFamily] = DEFAULT_FAMILIES,
    config: EstimatorConfig = EstimatorConfig(),
    gate: Gate = Gate(),
) -> list[Check]:
    suites: dict[str, Callable[..., list[Check]]] = {
        "axioms": axioms,
        "theorems": theorems,
        "ubeda": ubeda,
        "asymptotics": asymptotics,
    }
    if name == "all":
        return [c for s in SUITES for c in suites[s](families, config, gate)]
    if name not in suites:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return suites[name](families, config, gate)


def all_passed(checks: Iterable[Check]) -> bool:
    return all(c.passed is not False for c in checks)
