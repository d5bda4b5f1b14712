"""Rate regions described by subset-sum constraints ``sum_{i in A} R_i <= c_A``.

Every region lives in the nonnegative orthant and is down-closed, so two regions
can be compared by maximizing each subset sum with the exact LP solver.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .lp import LPProblem, lp_max
from .netgraph import MinCutProfile, session_subsets

MAX_CORNER_DIM = 3
BUTTERFLY_VARIANTS = ("bf1", "single_source", "single_dest", "bf2")


class DimensionTooHigh(ValueError):
    pass


class ZeroCut(ValueError):
    pass


class SingleSourceOnly(ValueError):
    """The min-cut outer bound is only valid for single-source networks."""


def _pos(x) -> Fraction:
    return max(Fraction(x), Fraction(0))


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RateRegion:
    m: int
    constraints: Mapping[frozenset[int], Fraction]

    def __post_init__(self):
        for a, c in self.constraints.items():
            if not a or not a <= frozenset(range(1, self.m + 1)):
                raise ValueError(f"bad constraint subset {sorted(a)}")
            if c < 0:
                raise ValueError("constraint bounds must be nonnegative")

    @classmethod
    def from_bounds(cls, m: int, bounds: Mapping[Iterable[int], object]) -> RateRegion:
        return cls(m, {frozenset(a): Fraction(c) for a, c in bounds.items()})

    def bound(self, a: Iterable[int]) -> Fraction | None:
        return self.constraints.get(frozenset(a))

    def contains(self, point: Sequence) -> bool:
        pt = [Fraction(x) for x in point]
        if len(pt) != self.m or any(x < 0 for x in pt):
            return False
        return all(sum(pt[i - 1] for i in a) <= c for a, c in self.constraints.items())

    def on_boundary(self, point: Sequence) -> bool:
        """Inside and at least one constraint tight."""
        pt = [Fraction(x) for x in point]
        return self.contains(pt) and any(sum(pt[i - 1] for i in a) == c for a, c in self.constraints.items())

    def _lp(self) -> LPProblem:
        names = [f"R{i}" for i in range(1, self.m + 1)]
        prob = LPProblem(names)
        for a, c in self.constraints.items():
            prob.add({f"R{i}": 1 for i in a}, "<=", c)
        return prob

    def max_sum(self, a: Iterable[int]) -> Fraction:
        """Largest value of ``sum_{i in a} R_i`` over the region."""
        prob = self._lp()
        prob.maximize({f"R{i}": 1 for i in a})
        return lp_max(prob).value

    def tightened(self) -> dict[frozenset[int], Fraction]:
        return {a: self.max_sum(a) for a in session_subsets(self.m)}

    def is_subset_of(self, other: RateRegion) -> bool:
        if other.m != self.m:
            raise ValueError("dimension mismatch")
        return all(self.max_sum(a) <= c for a, c in other.constraints.items())

    def equals(self, other: RateRegion) -> bool:
        return self.is_subset_of(other) and other.is_subset_of(self)

    def scaled(self, factor) -> RateRegion:
        f = _pos(factor)
        return RateRegion(self.m, {a: c * f for a, c in self.constraints.items()})

    def symmetric_rate(self) -> Fraction:
        """Largest ``R`` with ``R_1 = ... = R_m = R`` in the region."""
        if not self.constraints:
            raise ValueError("region is unbounded")
        return min(c / len(a) for a, c in self.constraints.items())

    def to_dict(self) -> dict:
        items = sorted(self.constraints.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {"m": self.m,
                "constraints": [{"subset": sorted(a), "bound": _fmt(c)} for a, c in items]}

    @classmethod
    def from_dict(cls, data: Mapping) -> RateRegion:
        return cls(int(data["m"]), {frozenset(c["subset"]): Fraction(c["bound"]) for c in data["constraints"]})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# min-cut driven regions


@dataclass(frozen=True)
class StarProfile:
    m: int
    values: Mapping[frozenset[int], int]

    def __getitem__(self, j: Iterable[int]) -> int:
        return self.values[frozenset(j)]

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.values[s] for s in session_subsets(self.m))

    def to_profile(self) -> MinCutProfile:
        """Rebuild ``M_A`` as the sum of ``M*_J`` over every ``J`` meeting ``A``."""
        return MinCutProfile(self.m, {a: sum(v for j, v in self.values.items() if j & a)
                                      for a in session_subsets(self.m)})


def star_mincuts(profile: MinCutProfile) -> StarProfile:
    """Invert the partition identity ``M_A = sum_{J meets A} M*_J``.

    With ``F(B) = M_[m] - M_{[m] minus B}`` (and ``M_{} = 0``) one gets
    ``F(B) = sum_{nonempty J within B} M*_J``, which is peeled off by subset size.
    """
    full = frozenset(range(1, profile.m + 1))

    def cut(a: frozenset[int]) -> int:
        return profile.values[a] if a else 0

    star: dict[frozenset[int], int] = {}
    for j in session_subsets(profile.m):
        f = cut(full) - cut(full - j)
        star[j] = f - sum(star[b] for b in star if b < j)
    return StarProfile(profile.m, star)


def is_separable_profile(star: StarProfile) -> bool:
    return all(v >= 0 for v in star.values.values())


def secure_outer_bound(profile: MinCutProfile, k: int) -> RateRegion:
    if not profile.single_source:
        raise SingleSourceOnly("the min-cut outer bound does not hold with several sources")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return RateRegion(profile.m, {a: _pos(v - k) for a, v in profile.values.items()})


def unsecure_region(profile: MinCutProfile) -> RateRegion:
    return RateRegion(profile.m, {a: Fraction(v) for a, v in profile.values.items()})


def two_phase_region(unsecure: RateRegion, k: int, min_single_cut: int) -> RateRegion:
    """Every bound scaled by ``max(0, 1 - k/M)`` where ``M`` is the smallest single cut."""
    if min_single_cut <= 0:
        raise ZeroCut("smallest single-destination cut is zero")
    return unsecure.scaled(1 - Fraction(k, min_single_cut))


# ---------------------------------------------------------------------------
# vertices


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square rational system, or ``None`` if singular."""
    n = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [aug[i][n] for i in range(n)]


def corner_points(region: RateRegion) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{R >= 0} ∩ region``, sorted lexicographically."""
    m = region.m
    if m > MAX_CORNER_DIM:
        raise DimensionTooHigh(f"corner extraction supports m <= {MAX_CORNER_DIM}, got {m}")
    planes: list[tuple[list[Fraction], Fraction]] = []
    for i in range(1, m + 1):
        planes.append(([Fraction(int(j == i)) for j in range(1, m + 1)], Fraction(0)))
    for a, c in region.constraints.items():
        planes.append(([Fraction(int(j in a)) for j in range(1, m + 1)], c))
    found = set()
    for combo in itertools.combinations(planes, m):
        sol = _solve_exact([p[0] for p in combo], [p[1] for p in combo])
        if sol is not None and region.contains(sol):
            found.add(tuple(sol))
    return sorted(found)


def corners_csv(region: RateRegion) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"R{i}" for i in range(1, region.m + 1)])
    for pt in corner_points(region):
        w.writerow([_fmt(x) for x in pt])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# butterfly closed forms (arbitrary capacities c1..c7, one wiretapped edge)


def butterfly_regions(c: Sequence, variant: str) -> tuple[RateRegion, RateRegion | None]:
    """Unsecure and secure regions of the four butterfly variants.

    The secure part is ``None`` where no positive secure rate exists.
    """
    if len(c) != 7:
        raise ValueError("need seven capacities")
    c1, c2, c3, c4, c5, c6, c7 = (Fraction(x) for x in c)
    if min(c1, c2, c3, c4, c5, c6, c7) < 0:
        raise ValueError("capacities must be nonnegative")
    s1, s2, s12 = frozenset({1}), frozenset({2}), frozenset({1, 2})
    if variant == "bf1":
        uns = {s1: min(c1, c3, c7), s2: min(c2, c3, c6), s12: c3 + min(c4, c5)}
        return RateRegion(2, uns), None
    if variant == "single_source":
        uns = {s1: c5 + min(c1 + c2, c3, c7),
               s2: c4 + min(c1 + c2, c3, c6),
               s12: c4 + c5 + min(c1 + c2, c3, c6 + c7)}
        sec = {s1: min(c5, c1 + c2, c3, c7), s2: min(c4, c1 + c2, c3, c6)}
        return RateRegion(2, uns), RateRegion(2, sec)
    if variant == "single_dest":
        uns = {s1: c4 + min(c1, c3, c6 + c7),
               s2: c5 + min(c2, c3, c6 + c7),
               s12: c4 + c5 + min(c1 + c2, c3, c6 + c7)}
        sec = {s1: min(c1, c4), s2: min(c2, c5), s12: min(c3, c6 + c7)}
        return RateRegion(2, uns), RateRegion(2, sec)
    if variant == "bf2":
        uns = {s1: c4 + min(c1, c3, c7), s2: c5 + min(c2, c3, c6), s12: c4 + c5 + c3}
        sec = {s1: min(c4, c1, c3, c7), s2: min(c5, c2, c3, c6), s12: c3}
        return RateRegion(2, uns), RateRegion(2, sec)
    raise ValueError(f"unknown butterfly variant {variant!r}; expected one of {BUTTERFLY_VARIANTS}")


def format_subset(a: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(a)) + "}"


def describe(region: RateRegion) -> list[str]:
    items = sorted(region.constraints.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    return [" + ".join(f"R{i}" for i in sorted(a)) + f" <= {_fmt(c)}" for a, c in items]
