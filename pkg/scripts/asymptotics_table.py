"""Tabulate transition constants and kappa of partially reflected comonotone copulas.

For ``s`` reversed coordinates the value converges to ``(lim r_n - 1)^s``. Columns
show exact values as floats; the last row gives the limit.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from mvconcord.certify import DEFAULT_FAMILIES
from mvconcord.identities import asymptotic_limit, reflected_comonotone_value
from mvconcord.measures import limit_transition_constant, parse_family, transition_constant


@dataclass
class Experiment:
    families: tuple[str, ...] = tuple(str(f) for f in DEFAULT_FAMILIES)
    dims: tuple[int, ...] = (3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 20, 50, 200, 1000)
    max_s: int = 3


def run(exp: Experiment) -> None:
    for name in exp.families:
        fam = parse_family(name)
        head = f"{'n':>6s} {'r_n':>12s}" + "".join(f" {'s=' + str(s):>12s}" for s in range(1, exp.max_s + 1))
        print(f"\n{fam}\n{head}")
        for n in exp.dims:
            vals = [reflected_comonotone_value(fam, n, s) for s in range(1, exp.max_s + 1) if s < n]
            cells = "".join(f" {float(v):12.6f}" for v in vals)
            print(f"{n:6d} {float(transition_constant(fam, n)):12.6f}{cells}")
        limits = "".join(f" {float(asymptotic_limit(fam, s)):12.6f}" for s in range(1, exp.max_s + 1))
        print(f"{'limit':>6s} {float(limit_transition_constant(fam)):12.6f}{limits}")


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", action="append")
    p.add_argument("--max-s", type=int, default=Experiment.max_s)
    p.add_argument("--dims", type=int, nargs="+")
    a = p.parse_args()
    exp = Experiment(max_s=a.max_s)
    if a.family:
        exp.families = tuple(a.family)
    if a.dims:
        exp.dims = tuple(a.dims)
    run(exp)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
