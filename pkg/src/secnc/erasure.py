"""Secure capacity regions of small erasure networks, evaluated as exact LPs.

Three two-session topologies are covered.  In the Y network the sources
``S1``, ``S2`` feed a relay over links 1 and 2 and the relay reaches both
destinations over link 3.  The RY network reverses it (one source with private
randomness ``D0`` sends over link 3 to a relay that splits onto links 1 and 2).
The X network chains the two: links 1, 2 into the relay, link 3 in the middle,
links 4, 5 out.  Link ``j`` erases toward the legitimate receiver with
probability ``delta_j`` and toward the eavesdropper with ``delta_jE``.

Variables ``k_j`` are key rates generated over link ``j``; ``e`` is randomness
forwarded in the clear over link 3.  Every fraction in the region description
is cleared of its denominators before being handed to the solver, so boundary
values like ``delta_j = 1`` or ``delta_jE = 0`` need no special casing there.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .lp import Infeasible, LPProblem, lp_max

VARIANTS = ("y", "ry", "x")
LINKS = {"y": 3, "ry": 3, "x": 5}
DEFAULT_SWEEP = 101


class DegenerateParams(ValueError):
    """Parameters outside ``[0, 1]`` or missing for the chosen network."""


@dataclass(frozen=True)
class ErasureParams:
    delta: tuple[Fraction, ...]
    delta_e: tuple[Fraction, ...]
    d0: Fraction = Fraction(0)

    def __post_init__(self):
        if len(self.delta) != len(self.delta_e):
            raise DegenerateParams("need one eavesdropper erasure per link")
        for x in (*self.delta, *self.delta_e):
            if not 0 <= x <= 1:
                raise DegenerateParams(f"erasure probability {x} outside [0, 1]")
        if self.d0 < 0:
            raise DegenerateParams("source randomness must be nonnegative")

    @classmethod
    def of(cls, pairs, d0=0) -> ErasureParams:
        """``pairs`` is a sequence of ``(delta_j, delta_jE)``; decimals are read exactly."""
        conv = lambda x: Fraction(str(x)) if isinstance(x, float) else Fraction(x)
        return cls(tuple(conv(a) for a, _ in pairs), tuple(conv(b) for _, b in pairs), conv(d0))

    @property
    def links(self) -> int:
        return len(self.delta)

    def with_blind_eavesdropper(self) -> ErasureParams:
        return ErasureParams(self.delta, tuple(Fraction(1) for _ in self.delta_e), self.d0)


def parse_params(text: str) -> ErasureParams:
    """Read ``param delta1 0.2`` / ``param delta1E 0.05`` / ``param D0 0.4`` lines."""
    vals: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "param":
            raise DegenerateParams(f"line {lineno}: expected 'param <name> <value>'")
        try:
            vals[parts[1]] = Fraction(parts[2])
        except ValueError:
            raise DegenerateParams(f"line {lineno}: bad number {parts[2]!r}") from None
    n = 0
    while f"delta{n + 1}" in vals:
        n += 1
    if n == 0:
        raise DegenerateParams("no delta1 parameter")
    try:
        de = tuple(vals[f"delta{j}E"] for j in range(1, n + 1))
    except KeyError as exc:
        raise DegenerateParams(f"missing parameter {exc.args[0]}") from None
    return ErasureParams(tuple(vals[f"delta{j}"] for j in range(1, n + 1)), de, vals.get("D0", Fraction(0)))


def load_params(path: str | Path) -> ErasureParams:
    return parse_params(Path(path).read_text())


def _number(x: Fraction) -> str:
    """Terminating decimals print as decimals, everything else as ``p/q``."""
    den = x.denominator
    for prime in (2, 5):
        while den % prime == 0:
            den //= prime
    if den != 1:
        return str(x)
    text = f"{float(x):.12f}".rstrip("0").rstrip(".")
    return text if Fraction(text) == x else str(x)


def format_params(p: ErasureParams) -> str:
    lines = []
    for j, (d, de) in enumerate(zip(p.delta, p.delta_e), 1):
        lines += [f"param delta{j} {_number(d)}", f"param delta{j}E {_number(de)}"]
    if p.d0:
        lines.append(f"param D0 {_number(p.d0)}")
    return "\n".join(lines) + "\n"


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    # 0/0 only happens for a dead link with a blind eavesdropper; nothing flows there
    return num / den if den else Fraction(0)


def leak_factor(d: Fraction, de: Fraction) -> Fraction:
    """Fraction of delivered packets the eavesdropper also sees: ``(1-dE)/(1-d dE)``."""
    return _ratio(1 - de, 1 - d * de)


def key_factor(d: Fraction, de: Fraction) -> Fraction:
    """Fraction of sent packets the receiver gets and the eavesdropper misses: ``(1-d)dE/(1-d dE)``."""
    return _ratio((1 - d) * de, 1 - d * de)


class _Builder:
    def __init__(self, p: ErasureParams, names: list[str]):
        self.p = p
        self.prob = LPProblem(names)

    def d(self, j):
        return self.p.delta[j - 1]

    def de(self, j):
        return self.p.delta_e[j - 1]

    def inv_de(self, j, var: str) -> dict[str, Fraction]:
        """``var / delta_jE``; the term vanishes when ``delta_jE = 0`` since ``var`` is then forced to 0."""
        return {var: 1 / self.de(j)} if self.de(j) else {}

    def keys_cover_leak(self, j, rates: list[str], extra: Mapping[str, Fraction] = {}):
        # k_j (+ extra) >= leak_factor * sum(rates)
        coeffs = {f"k{j}": Fraction(1), **extra}
        for r in rates:
            coeffs[r] = coeffs.get(r, 0) - leak_factor(self.d(j), self.de(j))
        self.prob.add(coeffs, ">=", 0)

    def time(self, j, rates: list[str], extra: tuple[str, ...] = ()):
        # sum(rates)/(1-d) + k_j/((1-d) dE) (+ extra/(1-d)) <= 1, multiplied by (1-d)
        coeffs: dict[str, Fraction] = {r: Fraction(1) for r in rates}
        coeffs.update(self.inv_de(j, f"k{j}"))
        for x in extra:
            coeffs[x] = Fraction(1)
        self.prob.add(coeffs, "<=", 1 - self.d(j))
        if not self.de(j):
            self.prob.add({f"k{j}": 1}, "<=", 0)

    def relay_keys(self, j, feeders: Mapping[str, Fraction], const: Fraction = Fraction(0)):
        # k_j <= (const + sum c * var) * key_factor_j
        f = key_factor(self.d(j), self.de(j))
        coeffs = {f"k{j}": Fraction(1)}
        for v, c in feeders.items():
            coeffs[v] = coeffs.get(v, 0) - c * f
        self.prob.add(coeffs, "<=", const * f)


def _feeder(b: _Builder, j: int) -> dict[str, Fraction]:
    return b.inv_de(j, f"k{j}")


def y_program(p: ErasureParams) -> LPProblem:
    if p.links != 3:
        raise DegenerateParams("the Y network has three links")
    b = _Builder(p, ["R1", "R2", "k1", "k2", "k3"])
    for j in (1, 2):
        b.keys_cover_leak(j, [f"R{j}"])
    b.keys_cover_leak(3, ["R1", "R2"])
    for j in (1, 2):
        b.time(j, [f"R{j}"])
    b.time(3, ["R1", "R2"])
    # the relay has no randomness of its own
    b.relay_keys(3, {**_feeder(b, 1), **_feeder(b, 2)})
    return b.prob


def ry_program(p: ErasureParams) -> LPProblem:
    if p.links != 3:
        raise DegenerateParams("the RY network has three links")
    b = _Builder(p, ["R1", "R2", "k1", "k2", "k3", "e"])
    b.keys_cover_leak(3, ["R1", "R2"], {"e": key_factor(b.d(3), b.de(3))})
    for j in (1, 2):
        b.keys_cover_leak(j, [f"R{j}"])
    b.time(3, ["R1", "R2"], ("e",))
    for j in (1, 2):
        b.time(j, [f"R{j}"])
    b.relay_keys(3, {"e": Fraction(-1)}, p.d0)
    for j in (1, 2):
        b.relay_keys(j, {"e": Fraction(1), **_feeder(b, 3)})
    return b.prob


def x_program(p: ErasureParams) -> LPProblem:
    if p.links != 5:
        raise DegenerateParams("the X network has five links")
    b = _Builder(p, ["R1", "R2", "k1", "k2", "k3", "k4", "k5", "e"])
    for j in (1, 2):
        b.keys_cover_leak(j, [f"R{j}"])
    b.keys_cover_leak(3, ["R1", "R2"], {"e": key_factor(b.d(3), b.de(3))})
    for j in (4, 5):
        b.keys_cover_leak(j, [f"R{j - 3}"])
    for j in (1, 2):
        b.time(j, [f"R{j}"])
    for j in (4, 5):
        b.time(j, [f"R{j - 3}"])
    b.time(3, ["R1", "R2"], ("e",))
    b.relay_keys(3, {**_feeder(b, 1), **_feeder(b, 2), "e": Fraction(-1)})
    for j in (4, 5):
        b.relay_keys(j, {"e": Fraction(1), **_feeder(b, 3)})
    return b.prob


PROGRAMS = {"y": y_program, "ry": ry_program, "x": x_program}


@dataclass(frozen=True)
class BoundaryPoint:
    r1: Fraction
    r2: Fraction
    witness: Mapping[str, Fraction]


@dataclass
class ErasureRegion:
    variant: str
    params: ErasureParams
    points: list[BoundaryPoint] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        keys = [f"k{j}" for j in range(1, LINKS[self.variant] + 1)]
        return ["R1", "R2", *keys, "e"]

    def rows(self) -> list[list[Fraction]]:
        return [[pt.r1, pt.r2, *(pt.witness.get(c, Fraction(0)) for c in self.columns[2:])]
                for pt in self.points]

    def to_csv(self, decimals: int | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows():
            w.writerow([_cell(x, decimals) for x in row])
        return buf.getvalue()


def _cell(x: Fraction, decimals: int | None) -> str:
    if decimals is not None:
        return f"{float(x):.{decimals}f}"
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def max_r2(program: LPProblem, r1: Fraction):
    """Largest ``R2`` with ``R1`` pinned, or ``None`` if ``R1`` is infeasible."""
    prob = LPProblem(list(program.variables), list(program.constraints))
    prob.add({"R1": 1}, "==", r1)
    prob.maximize({"R2": 1})
    try:
        return lp_max(prob)
    except Infeasible:
        return None


def max_r1(program: LPProblem) -> Fraction:
    prob = LPProblem(list(program.variables), list(program.constraints))
    prob.maximize({"R1": 1})
    return lp_max(prob).value


def region(variant: str, p: ErasureParams, sweep: int = DEFAULT_SWEEP) -> ErasureRegion:
    """Boundary ``R2(R1)`` on ``sweep`` evenly spaced ``R1`` values from 0 to the largest feasible ``R1``."""
    if variant not in PROGRAMS:
        raise ValueError(f"unknown erasure network {variant!r}; expected one of {VARIANTS}")
    if sweep < 1:
        raise ValueError("sweep needs at least one point")
    program = PROGRAMS[variant](p)
    top = max_r1(program)
    out = ErasureRegion(variant, p)
    steps = max(sweep - 1, 1)
    r1_values = [top * i / steps for i in range(sweep)] if top else [Fraction(0)]
    for r1 in r1_values:
        res = max_r2(program, r1)
        if res is None:
            continue
        out.points.append(BoundaryPoint(r1, res.value, res.witness))
    return out


def y_region(p: ErasureParams, sweep: int = DEFAULT_SWEEP) -> ErasureRegion:
    return region("y", p, sweep)


def ry_region(p: ErasureParams, d0=None, sweep: int = DEFAULT_SWEEP) -> ErasureRegion:
    if d0 is not None:
        p = ErasureParams(p.delta, p.delta_e, Fraction(d0))
    return region("ry", p, sweep)


def x_region(p: ErasureParams, sweep: int = DEFAULT_SWEEP) -> ErasureRegion:
    return region("x", p, sweep)


def time_sharing_bounds(variant: str, p: ErasureParams) -> dict[str, Fraction]:
    """Bounds of the region with a blind eavesdropper: single links and the shared link 3."""
    d = p.delta
    if variant == "x":
        return {"R1": min(1 - d[0], 1 - d[3]), "R2": min(1 - d[1], 1 - d[4]), "R1+R2": 1 - d[2]}
    return {"R1": 1 - d[0], "R2": 1 - d[1], "R1+R2": 1 - d[2]}


# parameter sets shown in the published evaluation plots
REFERENCE_PARAMS = {
    "y": ErasureParams.of([("0.2", "0.05"), ("0.3", "0.05"), ("0.25", "0.05")]),
    "ry": ErasureParams.of([("0.1", "0.1"), ("0.2", "0.05"), ("0.3", "0.15")], "0.4"),
    "x": ErasureParams.of([("0.1", "0.1"), ("0.2", "0.05"), ("0.3", "0.15"), ("0.4", "0.25"), ("0.5", "0.2")]),
}
