from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from mvconcord.copula import En, M, Mixture, Pi, Product, SymmetryApplied
from mvconcord.estimation import EstimatorConfig
from mvconcord.symmetry import Symmetry

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# smaller budgets for the bulk of the suite; acceptance tests use the defaults
FAST = EstimatorConfig(mc_samples=200_000, diag_quadrature_points=1025)


@pytest.fixture
def fast_config() -> EstimatorConfig:
    return FAST


@st.composite
def symmetries(draw, n: int | None = None) -> Symmetry:
    n = n if n is not None else draw(st.integers(1, 5))
    perm = draw(st.permutations(range(1, n + 1)))
    reflected = draw(st.sets(st.integers(1, n)))
    return Symmetry(tuple(perm), frozenset(reflected))


@st.composite
def base_copulas(draw, n: int):
    kind = draw(st.sampled_from(["pi", "m", "en", "mix", "prod"] if n >= 3 else ["pi", "m", "en", "mix"]))
    theta = draw(st.floats(-1.0, 1.0))
    if kind == "pi":
        return Pi(n)
    if kind == "m":
        return M(n)
    if kind == "en":
        return En(n, theta)
    if kind == "mix":
        w = draw(st.floats(0.0, 1.0))
        return Mixture(w, En(n, theta), M(n))
    split = draw(st.integers(1, n - 2))
    left = Pi(1) if split == 1 else En(split, theta)
    return Product(left, M(n - split))


@st.composite
def copulas(draw, n: int | None = None):
    """A base copula with up to two symmetry layers."""
    n = n if n is not None else draw(st.integers(2, 4))
    C = draw(base_copulas(n))
    for _ in range(draw(st.integers(0, 2))):
        C = SymmetryApplied(draw(symmetries(n)), C)
    return C


def points(n: int, count: int = 256, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).random((count, n))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, title, _ in CRITERIA:
        key = f"{label} {title}"
        if key in RESULTS:
            ok, detail = RESULTS[key]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label:>2} {title}: {detail}")
