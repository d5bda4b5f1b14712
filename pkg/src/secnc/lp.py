"""Exact rational linear programming (two-phase tableau simplex, Bland's rule).

All variables are implicitly nonnegative.  Problems here are tiny (a handful of
variables, a few dozen constraints), so a dense tableau of ``Fraction``s is fine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

Number = Union[int, Fraction]


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, Fraction]
    op: str  # "<=", ">=" or "=="
    rhs: Fraction

    def slack(self, point: Mapping[str, Fraction]) -> Fraction:
        """Signed amount by which ``point`` satisfies the constraint (negative = violated)."""
        lhs = sum((c * point.get(v, 0) for v, c in self.coeffs.items()), Fraction(0))
        if self.op == "<=":
            return self.rhs - lhs
        if self.op == ">=":
            return lhs - self.rhs
        return -abs(lhs - self.rhs)


@dataclass
class LPProblem:
    variables: list[str]
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)

    def add(self, coeffs: Mapping[str, Number], op: str, rhs: Number) -> None:
        if op not in ("<=", ">=", "=="):
            raise ValueError(f"unknown comparison {op!r}")
        unknown = set(coeffs) - set(self.variables)
        if unknown:
            raise ValueError(f"unknown variables {sorted(unknown)}")
        clean = {v: Fraction(c) for v, c in coeffs.items() if c != 0}
        self.constraints.append(Constraint(clean, op, Fraction(rhs)))

    def maximize(self, coeffs: Mapping[str, Number]) -> None:
        self.objective = {v: Fraction(c) for v, c in coeffs.items()}

    def is_feasible_point(self, point: Mapping[str, Fraction]) -> bool:
        if any(point.get(v, 0) < 0 for v in self.variables):
            return False
        return all(c.slack(point) >= 0 for c in self.constraints)


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    witness: dict[str, Fraction]


def _pivot(tab: list[list[Fraction]], row: int, col: int) -> None:
    piv = tab[row][col]
    tab[row] = [x / piv for x in tab[row]]
    pr = tab[row]
    for i, r in enumerate(tab):
        if i != row and r[col] != 0:
            f = r[col]
            tab[i] = [a - f * b for a, b in zip(r, pr)]


def _optimize(tab: list[list[Fraction]], basis: list[int], cost: Sequence[Fraction],
              allowed: Sequence[bool]) -> None:
    ncol = len(cost)
    while True:
        enter = None
        for j in range(ncol):
            if not allowed[j] or j in basis:
                continue
            reduced = cost[j] - sum((cost[basis[i]] * tab[i][j] for i in range(len(tab))), Fraction(0))
            if reduced > 0:
                enter = j
                break
        if enter is None:
            return
        leave, best = None, None
        for i, r in enumerate(tab):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise Unbounded("objective is unbounded")
        _pivot(tab, leave, enter)
        basis[leave] = enter


def lp_max(problem: LPProblem) -> LPResult:
    """Maximize the objective; raises :class:`Infeasible` or :class:`Unbounded`."""
    names = list(problem.variables)
    n = len(names)
    index = {v: i for i, v in enumerate(names)}
    rows: list[tuple[list[Fraction], str, Fraction]] = []
    for c in problem.constraints:
        coef = [Fraction(0)] * n
        for v, a in c.coeffs.items():
            coef[index[v]] += a
        op, rhs = c.op, c.rhs
        if rhs < 0:
            coef = [-a for a in coef]
            rhs = -rhs
            op = {"<=": ">=", ">=": "<=", "==": "=="}[op]
        rows.append((coef, op, rhs))

    n_slack = sum(1 for _, op, _ in rows if op != "==")
    n_art = sum(1 for _, op, _ in rows if op != "<=")
    ncol = n + n_slack + n_art
    tab: list[list[Fraction]] = []
    basis: list[int] = []
    s_col, a_col = n, n + n_slack
    for coef, op, rhs in rows:
        r = coef + [Fraction(0)] * (n_slack + n_art) + [rhs]
        if op == "<=":
            r[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if op == ">=":
                r[s_col] = Fraction(-1)
                s_col += 1
            r[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        tab.append(r)

    is_art = [j >= n + n_slack for j in range(ncol)]
    if n_art:
        cost1 = [Fraction(-1) if is_art[j] else Fraction(0) for j in range(ncol)]
        _optimize(tab, basis, cost1, [True] * ncol)
        if any(is_art[b] and tab[i][-1] != 0 for i, b in enumerate(basis)):
            raise Infeasible("constraints have no common nonnegative solution")
        # drive zero-valued artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab):
            if is_art[basis[i]]:
                col = next((j for j in range(ncol) if not is_art[j] and tab[i][j] != 0), None)
                if col is None:
                    del tab[i]
                    del basis[i]
                    continue
                _pivot(tab, i, col)
                basis[i] = col
            i += 1

    cost2 = [Fraction(0)] * ncol
    for v, a in problem.objective.items():
        cost2[index[v]] = a
    _optimize(tab, basis, cost2, [not a for a in is_art])

    values = [Fraction(0)] * ncol
    for i, b in enumerate(basis):
        values[b] = tab[i][-1]
    witness = {v: values[index[v]] for v in names}
    value = sum((a * witness[v] for v, a in problem.objective.items()), Fraction(0))
    return LPResult(value, witness)
