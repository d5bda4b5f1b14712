from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import lp_vertex_max
from secnc.lp import Infeasible, LPProblem, Unbounded, lp_max


def test_single_bound():
    p = LPProblem(["R"])
    p.add({"R": 1}, "<=", Fraction(3, 7))
    p.maximize({"R": 1})
    res = lp_max(p)
    assert res.value == Fraction(3, 7) and res.witness == {"R": Fraction(3, 7)}


def test_infeasible():
    p = LPProblem(["x"])
    p.add({"x": 1}, "<=", 1)
    p.add({"x": 1}, ">=", 2)
    p.maximize({"x": 1})
    with pytest.raises(Infeasible):
        lp_max(p)


def test_unbounded():
    p = LPProblem(["x", "y"])
    p.add({"x": 1, "y": -1}, "<=", 1)
    p.maximize({"y": 1})
    with pytest.raises(Unbounded):
        lp_max(p)


def test_equality_and_negative_rhs():
    p = LPProblem(["x", "y"])
    p.add({"x": 1, "y": 1}, "==", 4)
    p.add({"x": -1}, "<=", -1)  # x >= 1
    p.maximize({"y": 2, "x": 1})
    res = lp_max(p)
    assert res.value == 7 and p.is_feasible_point(res.witness)


def test_redundant_equalities():
    p = LPProblem(["x", "y"])
    p.add({"x": 1, "y": 1}, "==", 2)
    p.add({"x": 2, "y": 2}, "==", 4)
    p.maximize({"x": 1})
    assert lp_max(p).value == 2


def test_unknown_variable_rejected():
    with pytest.raises(ValueError):
        LPProblem(["x"]).add({"y": 1}, "<=", 1)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    rows = rng.integers(-2, 5, size=(int(rng.integers(n, n + 4)), n))
    rows = np.vstack([rows, np.ones((1, n), dtype=int)])  # keeps the problem bounded
    rhs = rng.integers(0, 9, size=rows.shape[0])
    obj = rng.integers(-3, 5, size=n)
    names = [f"x{i}" for i in range(n)]
    p = LPProblem(names)
    for r, b in zip(rows, rhs):
        p.add({v: int(c) for v, c in zip(names, r)}, "<=", int(b))
    p.maximize({v: int(c) for v, c in zip(names, obj)})
    res = lp_max(p)
    assert p.is_feasible_point(res.witness)
    assert float(res.value) == pytest.approx(lp_vertex_max(obj, rows, rhs), abs=1e-9)
