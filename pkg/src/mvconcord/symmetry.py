"""Symmetries of the unit cube I^n (signed permutations).

A symmetry ``xi`` is stored in its canonical factorization ``tau o sigma_S``:
first the coordinates in ``S`` are reflected (``x_i -> 1 - x_i``), then the
coordinates are permuted so that output coordinate ``i`` is input coordinate
``perm[i]``.  All indices in the public API are 1-based, matching the usual
notation ``sigma_1, ..., sigma_n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True)
class Symmetry:
    """Signed permutation ``x -> (x_{k_1} or 1 - x_{k_1}, ..., x_{k_n} or ...)``.

    Attributes:
        perm: 1-based tuple ``(k_1, ..., k_n)``; output ``i`` reads input ``k_i``.
        reflected: 1-based input coordinates that are reflected.
    """

    perm: tuple[int, ...]
    reflected: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        perm = tuple(int(k) for k in self.perm)
        n = len(perm)
        if n < 1 or sorted(perm) != list(range(1, n + 1)):
            raise ValueError(f"perm must be a permutation of 1..{n}, got {self.perm}")
        reflected = frozenset(int(i) for i in self.reflected)
        if any(i < 1 or i > n for i in reflected):
            raise ValueError(f"reflected indices must lie in 1..{n}, got {sorted(reflected)}")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "reflected", reflected)

    # constructors

    @classmethod
    def identity(cls, n: int) -> "Symmetry":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reflection(cls, n: int, *indices: int) -> "Symmetry":
        """Product of elementary reflections ``sigma_i`` for ``i`` in ``indices``."""
        return cls(tuple(range(1, n + 1)), frozenset(indices))

    @classmethod
    def full_reflection(cls, n: int) -> "Symmetry":
        """``sigma = sigma_1 ... sigma_n``."""
        return cls.reflection(n, *range(1, n + 1))

    @classmethod
    def permutation(cls, perm: Iterable[int]) -> "Symmetry":
        return cls(tuple(perm))

    # structure

    @property
    def dim(self) -> int:
        return len(self.perm)

    @property
    def length(self) -> int:
        """Number of reflected coordinates ``|xi|``."""
        return len(self.reflected)

    @property
    def flips(self) -> tuple[bool, ...]:
        """Per output coordinate: whether it is a reflected copy of its source."""
        return tuple(k in self.reflected for k in self.perm)

    @property
    def is_permutation(self) -> bool:
        return not self.reflected

    @property
    def is_reflection(self) -> bool:
        return self.perm == tuple(range(1, self.dim + 1))

    @classmethod
    def _from_signed(cls, perm: tuple[int, ...], flips: tuple[bool, ...]) -> "Symmetry":
        return cls(perm, frozenset(k for k, f in zip(perm, flips) if f))

    def compose(self, other: "Symmetry") -> "Symmetry":
        """Map composition ``self o other`` (apply ``other`` first)."""
        if other.dim != self.dim:
            raise ValueError(f"cannot compose symmetries of dimension {self.dim} and {other.dim}")
        f_self, f_other = self.flips, other.flips
        perm = tuple(other.perm[k - 1] for k in self.perm)
        flips = tuple(f_self[i] != f_other[k - 1] for i, k in enumerate(self.perm))
        return Symmetry._from_signed(perm, flips)

    __matmul__ = compose

    def inverse(self) -> "Symmetry":
        n = self.dim
        perm = [0] * n
        flips = [False] * n
        for i, (k, f) in enumerate(zip(self.perm, self.flips), start=1):
            perm[k - 1] = i
            flips[k - 1] = f
        return Symmetry._from_signed(tuple(perm), tuple(flips))

    # action on points

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply the map to points stored along the last axis of ``x``."""
        x = np.asarray(x, dtype=float)
        idx = np.asarray(self.perm) - 1
        out = x[..., idx]
        flips = np.asarray(self.flips)
        return np.where(flips, 1.0 - out, out)

    def __repr__(self) -> str:
        parts = []
        if not self.is_reflection:
            parts.append("perm" + str(self.perm))
        if self.reflected:
            parts.append("refl(" + ",".join(map(str, sorted(self.reflected))) + ")")
        return "Symmetry[" + ("*".join(parts) or f"id{self.dim}") + "]"


def all_reflections(n: int) -> Iterator[Symmetry]:
    """The 2^n reflections of I^n, ordered by reflected subset size then lexicographically."""
    for size in range(n + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            yield Symmetry.reflection(n, *subset)


def all_permutations(n: int) -> Iterator[Symmetry]:
    for perm in itertools.permutations(range(1, n + 1)):
        yield Symmetry(perm)
