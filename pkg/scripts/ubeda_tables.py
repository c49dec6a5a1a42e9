"""Print the odd-dimension marginal-sum coefficients for each family as exact fractions.

Both the triangular solve and the closed form are shown; they must agree.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from mvconcord.certify import DEFAULT_FAMILIES
from mvconcord.identities import (
    gamma_star,
    ubeda_coefficients_closed_form,
    ubeda_coefficients_pairwise,
    ubeda_coefficients_solve,
)
from mvconcord.measures import Kind, parse_family


@dataclass
class Experiment:
    families: tuple[str, ...] = tuple(str(f) for f in DEFAULT_FAMILIES)
    max_m: int = 5


def run(exp: Experiment) -> bool:
    print("gamma*:", ", ".join(f"{k}:{v}" for k, v in zip(range(1, 2 * exp.max_m + 2, 2), gamma_star(2 * exp.max_m + 1).as_list())))
    agree = True
    for name in exp.families:
        fam = parse_family(name)
        print(f"\n{fam}")
        for m in range(1, exp.max_m + 1):
            solved = ubeda_coefficients_solve(fam, m).as_list()
            closed = ubeda_coefficients_closed_form(fam, m).as_list()
            agree &= solved == closed
            mark = "" if solved == closed else "  MISMATCH"
            print(f"  n={2 * m + 1:2d}  " + "  ".join(f"a{2 * k}={c}" for k, c in enumerate(closed, 1)) + mark)
            if fam.kind is Kind.SCARSINI:
                alt = ubeda_coefficients_pairwise(fam, m).as_list()
                print(f"        pairwise alternative  " + "  ".join(f"a{2 * k}={c}" for k, c in enumerate(alt, 1)))
    return agree


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", action="append")
    p.add_argument("--max-m", type=int, default=Experiment.max_m)
    a = p.parse_args()
    exp = Experiment(max_m=a.max_m)
    if a.family:
        exp.families = tuple(a.family)
    return 0 if run(exp) else 1


if __name__ == "__main__":
    raise SystemExit(main())
