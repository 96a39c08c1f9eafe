"""Closed-form dimension thresholds and variety degrees, in exact integers."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, prod

from .errors import InvalidInput
from .hilbert import SpaceSpec, as_space


def s_max(space) -> int:
    """Largest dimension of a completely entangled subspace, D - sum(d_j - 1) - 1."""
    space = as_space(space)
    return space.D - space.excess - 1


def segre_degree(space) -> int:
    """(sum(d_j - 1))! / prod((d_j - 1)!)."""
    space = as_space(space)
    return factorial(space.excess) // prod(factorial(d - 1) for d in space.dims)


def schmidt_smax(d1: int, d2: int, r: int) -> int:
    """Largest dimension of a d1 x d2 subspace void of Schmidt rank <= r."""
    if not 1 <= r < min(d1, d2):
        raise InvalidInput(f"need 1 <= r < min(d1, d2), got r={r}")
    return (d1 - r) * (d2 - r)


def determinantal_degree(d1: int, d2: int, r: int) -> int:
    """Degree of the variety of d1 x d2 matrices with rank <= r (d2 >= d1 > r >= 1)."""
    if not (d2 >= d1 > r >= 1):
        raise InvalidInput(f"need d2 >= d1 > r >= 1, got d1={d1}, d2={d2}, r={r}")
    num = 1
    den = 1
    for j in range(d1 - r):
        num *= factorial(d2 + j) * factorial(j)
        den *= factorial(r + j) * factorial(d2 - r + j)
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def locc_threshold(space, c: int = 1) -> int:
    """Generic maximum number of locally unambiguously distinguishable states with c copies."""
    if c < 1:
        raise InvalidInput("copies must be >= 1")
    return 1 + c * as_space(space).excess


def min_copies(space, n: int) -> int:
    """Fewest separated copies for which n generic states are distinguishable."""
    if n < 2:
        raise InvalidInput("need n >= 2")
    e = as_space(space).excess
    return -(-(n - 1) // e)


def product_count_formula(space, s: int):
    """Generic number of product states in an s-dimensional subspace: 0, the Segre degree, or 'infinite'."""
    sm = s_max(space)
    if s <= sm:
        return 0
    if s == sm + 1:
        return segre_degree(space)
    return "infinite"


def low_rank_count_formula(d1: int, d2: int, r: int, s: int):
    """Generic number of Schmidt rank <= r states in an s-dimensional subspace of d1 x d2."""
    d1, d2 = sorted((d1, d2))
    sm = schmidt_smax(d1, d2, r)
    if s <= sm:
        return 0
    if s == sm + 1:
        return determinantal_degree(d1, d2, r)
    return "infinite"


@dataclass(frozen=True)
class ThresholdReport:
    space: SpaceSpec
    s_max: int
    segre_degree: int
    copies: tuple[int, ...] = field(default=(1,))
    n_values: tuple[int, ...] = field(default=())

    @classmethod
    def for_space(cls, space, copies=(1,), n_values=()) -> "ThresholdReport":
        space = as_space(space)
        return cls(space, s_max(space), segre_degree(space), tuple(copies), tuple(n_values))

    def locc_threshold(self, c: int) -> int:
        return locc_threshold(self.space, c)

    def min_copies(self, n: int) -> int:
        return min_copies(self.space, n)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.space.dims),
            "D": self.space.D,
            "excess": self.space.excess,
            "s_max": self.s_max,
            "segre_degree": self.segre_degree,
            "locc_threshold": {str(c): self.locc_threshold(c) for c in self.copies},
            "min_copies": {str(n): self.min_copies(n) for n in self.n_values},
        }
