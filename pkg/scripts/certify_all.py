"""Run every certification suite and print a per-suite pass count."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from mvconcord.certify import DEFAULT_FAMILIES, SUITES, Gate, run_suite
from mvconcord.estimation import EstimatorConfig
from mvconcord.measures import parse_family


@dataclass
class Experiment:
    families: tuple[str, ...] = tuple(str(f) for f in DEFAULT_FAMILIES)
    mc_samples: int = 200_000
    seed: int = 42
    sigmas: float = 5.0
    show_failures: bool = True


def run(exp: Experiment) -> bool:
    fams = tuple(parse_family(f) for f in exp.families)
    config = EstimatorConfig(mc_samples=exp.mc_samples, seed=exp.seed)
    gate = Gate(sigmas=exp.sigmas)
    ok = True
    for suite in SUITES:
        t0 = time.perf_counter()
        checks = run_suite(suite, fams, config, gate)
        gated = [c for c in checks if c.passed is not None]
        bad = [c for c in gated if not c.passed]
        ok &= not bad
        print(f"{suite:12s} {len(gated) - len(bad):5d}/{len(gated):<5d} passed  ({time.perf_counter() - t0:.1f}s)")
        if exp.show_failures:
            for c in bad:
                print(f"    FAIL {c.name}: {c.value!r} vs {c.expected!r} (tol {c.tolerance!r})")
    return ok


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", action="append", help="repeatable; defaults to all families")
    p.add_argument("--samples", type=int, default=Experiment.mc_samples)
    p.add_argument("--seed", type=int, default=Experiment.seed)
    p.add_argument("--sigmas", type=float, default=Experiment.sigmas)
    a = p.parse_args()
    exp = Experiment(mc_samples=a.samples, seed=a.seed, sigmas=a.sigmas)
    if a.family:
        exp.families = tuple(a.family)
    return 0 if run(exp) else 1


if __name__ == "__main__":
    raise SystemExit(main())
