"""Constructions of secure linear codes.

Every constructor here draws random coefficients, assembles a
:class:`~secnc.code.NetworkCode` and runs the full verifier before returning.
A failed verification triggers a redraw; after ``RETRIES`` failures the field
grows to the next prime above ``2q``.  No constructor returns an unverified code.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .code import NetworkCode, VerificationReport, check_secrecy, decodable_at, verify
from .gf import DEFAULT_Q, Field, FieldTooSmall, mds_expand, next_prime, null_space_of, rank_of, solve_right_of, vandermonde
from .netgraph import Edge, Network, decompose_paths, edge_disjoint_paths, max_flow, min_cut, mincut_profile, session_subsets
from .regions import RateRegion, unsecure_region
from .separation import Partition2, separate_two_dest

RETRIES = 64
MAX_FIELD_GROWTH = 3


class RateTooHigh(ValueError):
    pass


class ConstructionFailed(RuntimeError):
    pass


class NoSecureRate(ValueError):
    pass


class TargetInfeasible(ValueError):
    pass


class TooLarge(ValueError):
    pass


class InfeasibleTarget(ValueError):
    pass


class ZeroSecureRate(ValueError):
    pass


def _with_retries(build, q: int, rng: np.random.Generator):
    """Call ``build(q, rng)`` until it returns a code; grow the field when stuck."""
    for _ in range(MAX_FIELD_GROWTH + 1):
        for _ in range(RETRIES):
            out = build(q, rng)
            if out is not None:
                return out
        q = next_prime(2 * q)
    raise ConstructionFailed(f"no verified code after {RETRIES} draws at each of {MAX_FIELD_GROWTH + 1} field sizes")


def _random_linear_code(net: Network, active: set[int], local_dim: int, q: int,
                        rng: np.random.Generator) -> dict[int, np.ndarray]:
    """Random linear code over a ``local_dim`` symbol space on the ``active`` edges.

    Source edges draw uniform vectors; every other active edge draws a uniform
    combination of the active edges entering its tail.  Inactive edges carry 0.
    """
    vec: dict[int, np.ndarray] = {}
    for e in net.edges_topological:
        if e.id not in active:
            vec[e.id] = np.zeros(local_dim, dtype=np.int64)
        elif e.tail in net.sources:
            vec[e.id] = rng.integers(0, q, size=local_dim)
        else:
            parents = [vec[p.id] for p in net.in_edges(e.tail) if p.id in active]
            if not parents:
                vec[e.id] = np.zeros(local_dim, dtype=np.int64)
            else:
                coeffs = rng.integers(0, q, size=len(parents))
                vec[e.id] = (coeffs @ np.array(parents)) % q
    return vec


def _multicast_support(net: Network, dests: Sequence[int], count: int) -> set[int]:
    """Edges of ``count`` disjoint paths to every destination in ``dests``."""
    active: set[int] = set()
    for i in dests:
        for p in edge_disjoint_paths(net, i, count):
            active.update(p)
    return active


def _embed(local: np.ndarray, columns: Sequence[int], width: int) -> np.ndarray:
    out = np.zeros(width, dtype=np.int64)
    for c, x in zip(columns, local):
        out[c] = (out[c] + x)
    return out


# ---------------------------------------------------------------------------
# secure multicast


def secure_multicast_code(net: Network, dests: Iterable[int], payload: int, k: int,
                          rng: np.random.Generator, q: int = DEFAULT_Q) -> NetworkCode:
    """Multicast ``payload`` symbols to every destination in ``dests`` secure against ``k`` edges.

    The code has a single message block of size ``payload`` (shared by all of
    ``dests``) and ``k`` keys.  Each destination in ``dests`` decodes the whole
    payload; any ``k`` edges reveal nothing about it.
    """
    dests = sorted(set(dests))
    total = payload + k
    for i in dests:
        if min_cut(net, {i}) < total:
            raise RateTooHigh(f"payload {payload} + {k} keys exceeds the cut to destination {i}")
    active = _multicast_support(net, dests, total)
    sinks = [net.session_sink(i) for i in dests]

    def build(q, rng):
        local = _random_linear_code(net, active, total, q, rng)
        code = NetworkCode(q, (payload,), k, {e: tuple(int(x) for x in v) for e, v in local.items()})
        if not all(decodable_at(code, net, d, 1) for d in sinks):
            return None
        if not check_secrecy(code, net, k):
            return None
        return code

    return _with_retries(build, q, rng)


def multicast_decodes_everywhere(code: NetworkCode, net: Network, dests: Iterable[int]) -> bool:
    return all(decodable_at(code, net, net.session_sink(i), 1) for i in dests)


# ---------------------------------------------------------------------------
# two destinations


CORNERS = ("alpha0", "alpha1", "case1")


@dataclass
class TwoDestResult:
    code: NetworkCode
    achieved: tuple[int, int]
    case: str
    partition: Partition2 | None
    transcript: list[str] = field(default_factory=list)
    report: VerificationReport | None = None


def _paths_in(net: Network, ids: frozenset[int], i: int, count: int) -> list[list[int]]:
    return edge_disjoint_paths(net.subnetwork(ids), i, count)


def _route(vectors: dict[int, np.ndarray], path: Sequence[int], v: np.ndarray) -> None:
    for e in path:
        vectors[e] = v


def two_dest_scheme(net: Network, k: int, corner: str = "alpha1", rng: np.random.Generator | None = None,
                    q: int = DEFAULT_Q) -> TwoDestResult:
    """Secure code for two destinations at a corner of the secure capacity region.

    With ``k >= M*_12`` the single nontrivial corner ``(M_1 - k, M_2 - k)`` is
    built (keys shared through the common part, extra keys on private paths).
    Otherwise ``alpha1`` / ``alpha0`` pick which destination gets the
    ``M*_12 - k`` spare symbols of the common part.  A destination whose cut
    does not exceed ``k`` is dropped and gets rate 0.
    """
    if corner not in CORNERS:
        raise ValueError(f"corner must be one of {CORNERS}")
    if net.m != 2 or net.multi_source:
        raise ValueError("two_dest_scheme needs a single source and two destinations")
    rng = rng if rng is not None else np.random.default_rng(0)
    m1, m2, m12 = min_cut(net, {1}), min_cut(net, {2}), min_cut(net, {1, 2})
    if k >= m1 and k >= m2:
        raise NoSecureRate(f"k={k} is at least both single cuts ({m1}, {m2})")
    if k >= m1 or k >= m2:
        keep = 2 if k >= m1 else 1
        rate = (m2 if keep == 2 else m1) - k
        mc = secure_multicast_code(net, [keep], rate, k, rng, q)
        dims = (0, rate) if keep == 2 else (rate, 0)
        code = NetworkCode(mc.q, dims, k, mc.vectors)
        rep = verify(code, net, k)
        if not rep.ok:
            raise ConstructionFailed("secure unicast failed verification")
        return TwoDestResult(code, dims, "dropped", None,
                             [f"destination {3 - keep} dropped (cut <= k); secure unicast of {rate} to D{keep}"], rep)

    part = separate_two_dest(net)
    s1, s2, s12 = part.star
    trans = [f"cuts M1={m1} M2={m2} M12={m12}; star M*1={s1} M*2={s2} M*12={s12}",
             f"g1={sorted(part.g1)} g2={sorted(part.g2)} g3={sorted(part.g3)} unused={sorted(part.unused)}"]
    paths1 = _paths_in(net, part.g1, 1, s1)
    paths2 = _paths_in(net, part.g2, 2, s2)
    g3_sub = net.subnetwork(part.g3)

    if k >= s12:
        if corner != "case1":
            trans.append(f"k >= M*12: requested corner {corner} coincides with the single corner")
        r1, r2 = m1 - k, m2 - k
        width = r1 + r2 + k
        kcol = [r1 + r2 + j for j in range(k)]
        n_extra = k - s12
        trans.append(f"case 1: {s12} keys multicast on g3, {n_extra} keys per private side, rates ({r1}, {r2})")

        def build(q, rng):
            vec: dict[int, np.ndarray] = {e.id: np.zeros(width, dtype=np.int64) for e in net.edges}
            if s12:
                local = _random_linear_code(g3_sub, _multicast_support(g3_sub, [1, 2], s12), s12, q, rng)
                for e, v in local.items():
                    if e in part.g3:
                        vec[e] = _embed(v, kcol[:s12], width)
            u = rng.integers(0, q, size=(r1 + r2, k))
            row = 0
            for i, (paths, r) in enumerate(((paths1, r1), (paths2, r2))):
                offset = 0 if i == 0 else r1
                for j, p in enumerate(paths):
                    v = np.zeros(width, dtype=np.int64)
                    if j < n_extra:
                        v[kcol[s12 + j]] = 1
                    else:
                        v[offset + j - n_extra] = 1
                        v[r1 + r2:] = u[row]
                        row += 1
                    _route(vec, p, v % q)
            code = NetworkCode(q, (r1, r2), k, {e: tuple(int(x) for x in v % q) for e, v in vec.items()})
            rep = verify(code, net, k)
            return (code, u) if rep.ok else None

        code, u = _with_retries(build, q, rng)
        trans.append(f"U = {u.tolist()}")
        return TwoDestResult(code, (r1, r2), "case1", part, trans, verify(code, net, k))

    if corner == "case1":
        raise ValueError(f"corner case1 needs k >= M*12 = {s12}")
    alpha = 1 if corner == "alpha1" else 0
    spare = s12 - k
    p1, p2 = alpha * spare, (1 - alpha) * spare
    r1, r2 = s1 + p1, s2 + p2
    width = r1 + r2 + k
    kcol = [r1 + r2 + j for j in range(k)]
    # the shared part carries the first p1 symbols of W1 and first p2 of W2
    shared_cols = list(range(p1)) + [r1 + j for j in range(p2)] + kcol
    trans.append(f"case 2 ({corner}): g3 multicasts {k} keys + {spare} message symbols; rates ({r1}, {r2})")

    def build(q, rng):
        vec: dict[int, np.ndarray] = {e.id: np.zeros(width, dtype=np.int64) for e in net.edges}
        local = _random_linear_code(g3_sub, _multicast_support(g3_sub, [1, 2], s12), s12, q, rng)
        for e, v in local.items():
            if e in part.g3:
                vec[e] = _embed(v, shared_cols, width)
        u = rng.integers(0, q, size=(s1 + s2, k))
        row = 0
        for offset, start, paths in ((0, p1, paths1), (r1, p2, paths2)):
            for j, p in enumerate(paths):
                v = np.zeros(width, dtype=np.int64)
                v[offset + start + j] = 1
                v[r1 + r2:] = u[row]
                row += 1
                _route(vec, p, v % q)
        code = NetworkCode(q, (r1, r2), k, {e: tuple(int(x) for x in v % q) for e, v in vec.items()})
        rep = verify(code, net, k)
        return (code, u) if rep.ok else None

    code, u = _with_retries(build, q, rng)
    trans.append(f"U = {u.tolist()}")
    return TwoDestResult(code, (r1, r2), corner, part, trans, verify(code, net, k))


def two_dest_corners(m1: int, m2: int, m12: int, k: int) -> set[tuple[int, int]]:
    """Nonzero vertices of ``{R1 <= [M1-k]+, R2 <= [M2-k]+, R1+R2 <= [M12-k]+}`` on the outer boundary."""
    a, b, c = max(m1 - k, 0), max(m2 - k, 0), max(m12 - k, 0)
    return {(min(a, c), min(b, c - min(a, c))), (min(a, c - min(b, c)), min(b, c))}


# ---------------------------------------------------------------------------
# combination networks


@dataclass(frozen=True)
class CombinationNetwork:
    t: int
    memberships: tuple[frozenset[int], ...]

    def __post_init__(self):
        mem = tuple(frozenset(int(x) for x in s) for s in self.memberships)
        object.__setattr__(self, "memberships", mem)
        if self.t < 1:
            raise ValueError("need at least one intermediate node")
        for i, s in enumerate(mem, 1):
            if not s:
                raise ValueError(f"destination {i} has no intermediate node")
            if not s <= frozenset(range(1, self.t + 1)):
                raise ValueError(f"destination {i} lists nodes outside 1..{self.t}")

    @property
    def m(self) -> int:
        return len(self.memberships)

    def to_network(self) -> Network:
        """``S -> I_i`` edges get ids ``0..t-1``; then ``I_i -> D_j`` ordered by ``i``, then ``j``."""
        edges = [("S", f"I{i}") for i in range(1, self.t + 1)]
        for i in range(1, self.t + 1):
            for j, mem in enumerate(self.memberships, 1):
                if i in mem:
                    edges.append((f"I{i}", f"D{j}"))
        nodes = ["S", *(f"I{i}" for i in range(1, self.t + 1)), *(f"D{j}" for j in range(1, self.m + 1))]
        return Network.build(edges, "S", [f"D{j}" for j in range(1, self.m + 1)], nodes)

    def union_size(self, a: Iterable[int]) -> int:
        return len(frozenset().union(*(self.memberships[i - 1] for i in a)))

    def outer_bound(self, k: int) -> RateRegion:
        """Cut-set bound with ``M_A = |union of M_i, i in A|``."""
        return RateRegion(self.m, {a: Fraction(max(self.union_size(a) - k, 0)) for a in session_subsets(self.m)})

    def to_spec(self) -> str:
        lines = [f"t {self.t}"] + ["dest " + " ".join(str(x) for x in sorted(s)) for s in self.memberships]
        return "\n".join(lines) + "\n"


def parse_combination(text: str) -> CombinationNetwork:
    """Parse ``t <count>`` and ``dest <node> <node> ...`` lines (``#`` comments)."""
    t = None
    mem = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *args = line.split()
        if kind == "t" and len(args) == 1:
            t = int(args[0])
        elif kind == "dest" and args:
            mem.append(frozenset(int(a) for a in args))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    if t is None:
        raise ValueError("missing 't' line")
    return CombinationNetwork(t, tuple(mem))


def key_matrix(t: int, k: int, q: int) -> np.ndarray:
    """``k x t`` Vandermonde matrix with evaluation points ``1..t``."""
    if t >= q:
        raise FieldTooSmall(f"need q > t = {t} for distinct nonzero points")
    return vandermonde(k, t, list(range(1, t + 1)), q).a.copy()


def decoding_spaces(cnet: CombinationNetwork, k: int, q: int) -> list[np.ndarray]:
    """Basis (as columns) of the vectors each destination may decode with.

    Destination ``i`` needs vectors annihilated by the key matrix and supported
    on the intermediate nodes it hears.
    """
    v = key_matrix(cnet.t, k, q)
    out = []
    for mem in cnet.memberships:
        blocked = [j for j in range(1, cnet.t + 1) if j not in mem]
        c = np.zeros((len(blocked), cnet.t), dtype=np.int64)
        for r, j in enumerate(blocked):
            c[r, j - 1] = 1
        out.append(null_space_of(np.vstack([v, c]).reshape(-1, cnet.t), q))
    return out


def sum_dimension(spaces: Sequence[np.ndarray], a: Iterable[int], q: int) -> int:
    cols = [spaces[i - 1] for i in a]
    stacked = np.hstack(cols) if cols else np.zeros((0, 0), dtype=np.int64)
    return rank_of(stacked.T, q) if stacked.size else 0


def select_vectors(spaces: Sequence[np.ndarray], target: Sequence[int], q: int,
                   rng: np.random.Generator, tries: int = 32) -> np.ndarray | None:
    """Pick ``target[i]`` vectors from each space so all picks are independent.

    First a greedy pass (largest demand first, basis vectors in order), then
    random combinations.  Returns the picks as columns grouped by destination,
    or ``None`` if nothing was found.
    """
    total = sum(target)
    t = spaces[0].shape[0] if spaces else 0
    if total == 0:
        return np.zeros((t, 0), dtype=np.int64)
    if any(r > s.shape[1] for r, s in zip(target, spaces)):
        return None
    order = sorted(range(len(target)), key=lambda i: (-target[i], i))
    picks: dict[int, list[np.ndarray]] = {i: [] for i in order}
    chosen = np.zeros((0, t), dtype=np.int64)
    for i in order:
        for col in spaces[i].T:
            if len(picks[i]) == target[i]:
                break
            trial = np.vstack([chosen, col])
            if rank_of(trial, q) == trial.shape[0]:
                chosen = trial
                picks[i].append(col)
    if all(len(picks[i]) == target[i] for i in order):
        return np.column_stack([v for i in range(len(target)) for v in picks[i]])
    for _ in range(tries):
        cols = []
        for i, r in enumerate(target):
            if r:
                coef = rng.integers(0, q, size=(spaces[i].shape[1], r))
                cols.append((spaces[i] @ coef) % q)
        d = np.hstack(cols)
        if rank_of(d.T, q) == total:
            return d
    return None


@dataclass
class CombinationResult:
    code: NetworkCode
    network: Network
    decoders: np.ndarray  # t x sum(R): decoding vectors grouped by destination
    transcript: list[str] = field(default_factory=list)
    report: VerificationReport | None = None


def combination_code_from_matrix(cnet: CombinationNetwork, matrix: Sequence[Sequence[int]], q: int,
                                 message_dims: Sequence[int], key_dim: int) -> NetworkCode:
    """Code whose source edges carry the rows of ``matrix``; intermediate nodes forward."""
    net = cnet.to_network()
    rows = [tuple(int(x) % q for x in r) for r in matrix]
    if len(rows) != cnet.t:
        raise ValueError("need one row per intermediate node")
    vec = {}
    for e in net.edges:
        j = int(e.head[1:]) if e.tail == "S" else int(e.tail[1:])
        vec[e.id] = rows[j - 1]
    return NetworkCode(q, tuple(message_dims), key_dim, vec)


def combination_scheme(cnet: CombinationNetwork, k: int, target: Sequence[int],
                       rng: np.random.Generator | None = None, q: int = DEFAULT_Q) -> CombinationResult:
    """Joint key/message code for a combination network.

    Source edge ``j`` sends ``E[j] . W + V[:, j] . K`` where ``V`` is the
    Vandermonde key matrix and ``E`` solves ``D^T E = I`` for the selected
    decoding vectors ``D``.  Intermediate nodes forward.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    target = tuple(int(r) for r in target)
    if len(target) != cnet.m or any(r < 0 for r in target):
        raise ValueError("target must give a nonnegative rate per destination")
    net = cnet.to_network()
    total = sum(target)
    if total == 0:
        code = combination_code_from_matrix(cnet, [[0] * k] * cnet.t, q, target, k)
        return CombinationResult(code, net, np.zeros((cnet.t, 0), dtype=np.int64), ["zero rate: trivial code"],
                                 verify(code, net, k))
    if k >= cnet.t:
        raise TargetInfeasible(f"k={k} >= t={cnet.t}: every source edge can be observed")
    spaces = decoding_spaces(cnet, k, q)
    d = select_vectors(spaces, target, q, rng)
    if d is None:
        raise TargetInfeasible(f"cannot pick {target} independent decoding vectors")
    e = solve_right_of(d.T, np.eye(total, dtype=np.int64), q)  # t x total
    v = key_matrix(cnet.t, k, q)
    matrix = np.hstack([e, v.T]) % q
    code = combination_code_from_matrix(cnet, matrix.tolist(), q, target, k)
    rep = verify(code, net, k)
    if not rep.ok:
        raise ConstructionFailed("combination code failed verification")
    trans = [f"dim N_i = {[s.shape[1] for s in spaces]}",
             f"V = {v.tolist()}", f"D = {d.tolist()}", f"E = {e.tolist()}"]
    return CombinationResult(code, net, d, trans, rep)


def combination_decoder(cnet: CombinationNetwork, net: Network, decoders: np.ndarray, target: Sequence[int],
                        i: int) -> dict[int, list[int]]:
    """Per incoming edge coefficients that destination ``i`` applies to recover ``W_i``."""
    start = sum(target[: i - 1])
    cols = decoders[:, start:start + target[i - 1]]
    out = {}
    for e in net.in_edges(f"D{i}"):
        j = int(e.tail[1:])
        out[e.id] = [int(x) for x in cols[j - 1]]
    return out


def two_dest_dimension_identity(cnet: CombinationNetwork, k: int, q: int = DEFAULT_Q) -> tuple[int, int]:
    """``(dim(N_1 + N_2), [|M_1|-k]+ + [|M_2|-k]+ - [|M_1 & M_2|-k]+)`` for two destinations."""
    if cnet.m != 2:
        raise ValueError("the identity is stated for two destinations")
    spaces = decoding_spaces(cnet, k, q)
    m1, m2 = cnet.memberships
    pos = lambda x: max(x, 0)
    return (sum_dimension(spaces, (1, 2), q),
            pos(len(m1) - k) + pos(len(m2) - k) - pos(len(m1 & m2) - k))


@dataclass
class CombinationRegion:
    region: RateRegion
    sum_dims: dict[frozenset[int], int]
    feasible_maximal: list[tuple[int, ...]]
    certified_vertices: int


def combination_region(cnet: CombinationNetwork, k: int, q: int = DEFAULT_Q,
                       rng: np.random.Generator | None = None) -> CombinationRegion:
    """Convex hull of the integer rate tuples the joint scheme can realize.

    Candidates are integer tuples passing the necessary test
    ``R_A <= dim(sum of N_i, i in A)``; the maximal candidates are realized by
    explicit vector selection (smaller tuples follow by dropping vectors).  The
    hull bound ``c_A`` is the largest ``R_A`` seen, and every vertex of the
    resulting polytope is re-realized to certify it.
    """
    if cnet.m > 5 or cnet.t > 10:
        raise TooLarge("combination_region supports m <= 5 and t <= 10")
    rng = rng if rng is not None else np.random.default_rng(0)
    subsets = session_subsets(cnet.m)
    if k >= cnet.t:
        zero = RateRegion(cnet.m, {a: Fraction(0) for a in subsets})
        return CombinationRegion(zero, {a: 0 for a in subsets}, [(0,) * cnet.m], 1)
    spaces = decoding_spaces(cnet, k, q)
    dims = {a: sum_dimension(spaces, a, q) for a in subsets}
    ranges = [range(dims[frozenset({i})] + 1) for i in range(1, cnet.m + 1)]
    candidates = [r for r in itertools.product(*ranges)
                  if all(sum(r[i - 1] for i in a) <= dims[a] for a in subsets)]
    cand_set = set(candidates)

    def maximal(r):
        return all(tuple(x + (j == i) for j, x in enumerate(r)) not in cand_set for i in range(cnet.m))

    cache: dict[tuple[int, ...], bool] = {}

    def realizable(r) -> bool:
        if r not in cache:
            cache[r] = select_vectors(spaces, r, q, rng) is not None
        return cache[r]

    feasible_max = []
    frontier = [r for r in candidates if maximal(r)]
    seen = set()
    while frontier:
        r = frontier.pop()
        if r in seen:
            continue
        seen.add(r)
        if realizable(r):
            feasible_max.append(r)
        else:
            frontier.extend(tuple(x - (j == i) for j, x in enumerate(r)) for i in range(cnet.m) if r[i] > 0)
    bounds = {a: Fraction(max(sum(r[i - 1] for i in a) for r in feasible_max)) for a in subsets}
    region = RateRegion(cnet.m, bounds)
    verts = polymatroid_vertices(region)
    for vtx in verts:
        if any(x.denominator != 1 for x in vtx):
            raise ConstructionFailed(f"hull vertex {vtx} is fractional")
        vtx = tuple(int(x) for x in vtx)
        if not region.contains(vtx) or not realizable(vtx):
            raise ConstructionFailed(f"hull vertex {vtx} is not realizable")
    return CombinationRegion(region, dims, sorted(feasible_max), len(verts))


def polymatroid_vertices(region: RateRegion) -> set[tuple[Fraction, ...]]:
    """Greedy points of a down-closed region: follow an order of the coordinates
    and give each its marginal gain in the largest reachable subset sum.

    When the subset maxima are submodular these points (for all orders and all
    prefix lengths) include every vertex of the region.
    """
    m = region.m
    best = {frozenset(): Fraction(0)}
    for a in session_subsets(m):
        best[a] = region.max_sum(a)
    pts = set()
    for perm in itertools.permutations(range(1, m + 1)):
        for length in range(m + 1):
            r = [Fraction(0)] * m
            acc = frozenset()
            for i in perm[:length]:
                r[i - 1] = best[acc | {i}] - best[acc]
                acc = acc | {i}
            pts.add(tuple(r))
    return pts


# ---------------------------------------------------------------------------
# two-phase scheme


@dataclass
class TwoPhaseSchedule:
    T: int
    M: int
    k: int
    target: tuple[Fraction, ...]
    key_rounds: list[NetworkCode]
    message_rounds: list[NetworkCode]
    expanded: Network
    paths: list[tuple[int, list[int]]]  # (session, expanded edge ids)
    achieved: tuple[Fraction, ...]
    keys_generated: int
    keys_consumed: int
    transcript: list[str] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.key_rounds) + len(self.message_rounds)


def expand_parallel(net: Network, T: int) -> Network:
    """Replace every edge by ``T`` parallel copies; copy ``c`` of edge ``e`` gets id ``e*T + c``."""
    edges = tuple(Edge(e.id * T + c, e.tail, e.head) for e in sorted(net.edges, key=lambda e: e.id) for c in range(T))
    return Network(net.nodes, edges, net.sources, net.destinations)


def integral_flow(net: Network, target: Sequence[Fraction]) -> tuple[int, dict[int, int], int]:
    """Routing flow for ``target`` scaled to integers.

    Returns ``(T, flow, scale)`` where ``flow[e]`` is the flow on edge ``e``
    multiplied by ``scale`` and ``T`` is the least common multiple of the
    denominators of all edge flows and rates.
    """
    target = [Fraction(x) for x in target]
    scale = lcm(*(x.denominator for x in target)) if target else 1
    caps = {net.session_sink(i): int(x * scale) for i, x in enumerate(target, 1)}
    res = max_flow(net, {net.source: float("inf")}, caps, edge_capacity=scale)
    if res.value != sum(caps.values()):
        raise InfeasibleTarget(f"rates {target} cannot be routed")
    dens = [Fraction(f, scale).denominator for f in res.flow.values()] + [x.denominator for x in target]
    return lcm(*dens) if dens else 1, res.flow, scale


def two_phase_scheme(net: Network, k: int, target_unsecure: Sequence, rng: np.random.Generator | None = None,
                     q: int = DEFAULT_Q) -> TwoPhaseSchedule:
    """Key generation then key-encrypted routing.

    ``k`` rounds each securely multicast ``M - k`` key symbols per network use
    (``M`` is the smallest single-destination cut); the remaining ``M - k``
    rounds route ``T * target`` message symbols over ``T`` parallel uses, each
    padded by an MDS expansion of ``T*k`` fresh keys.  Every round's code is
    verified; the message rounds are verified on the ``T``-fold expanded
    network against ``T*k`` wiretapped edge copies with keys known at the
    destinations.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    if net.multi_source:
        raise ValueError("two-phase scheme needs a single source")
    target = tuple(Fraction(x) for x in target_unsecure)
    if len(target) != net.m or any(x < 0 for x in target):
        raise ValueError("target must give a nonnegative rate per destination")
    profile = mincut_profile(net)
    if not unsecure_region(profile).contains(target):
        raise InfeasibleTarget(f"{target} is outside the unsecure capacity region")
    M = min(profile[{i}] for i in range(1, net.m + 1))
    if k >= M:
        raise ZeroSecureRate(f"k={k} >= smallest single cut {M}")
    T, flow, scale = integral_flow(net, target)
    expanded = expand_parallel(net, T)
    exp_flow = {}
    for e, f in flow.items():
        units = f * T // scale
        for c in range(units):
            exp_flow[e * T + c] = 1
    raw_paths = decompose_paths(expanded, exp_flow, [net.source], net.destinations)
    sink_session = {d: i for i, d in enumerate(net.destinations, 1)}
    paths = sorted(((sink_session[end], p) for end, p in raw_paths), key=lambda x: (x[0], x[1]))
    counts = [T * x for x in target]
    for i in range(1, net.m + 1):
        if sum(1 for s, _ in paths if s == i) != counts[i - 1]:
            raise InfeasibleTarget("flow decomposition does not match the target")
    dims = tuple(int(c) for c in counts)
    total = sum(dims)
    trans = [f"M={M} k={k} T={T} flow scale={scale}", f"paths per session: {list(dims)}"]

    key_rounds = []
    if k:
        for r in range(k):
            key_rounds.append(secure_multicast_code(net, range(1, net.m + 1), M - k, k, rng, q))
    keys_generated = k * T * (M - k)

    pad_dim = min(T * k, total)
    message_rounds = []
    if total:
        for r in range(M - k):
            message_rounds.append(_message_round(expanded, paths, dims, pad_dim, T * k, rng, q))
    keys_consumed = (M - k) * T * k if k else 0
    # (M - k) message rounds out of M, each of T uses delivering T * target
    delivered = [len(message_rounds) * d for d in dims]
    achieved = tuple(Fraction(n, M * T) for n in delivered)
    trans.append(f"key rounds: {len(key_rounds)}, message rounds: {M - k}, pads per round from {pad_dim} keys")
    return TwoPhaseSchedule(T, M, k, target, key_rounds, message_rounds, expanded, paths, achieved,
                            keys_generated, keys_consumed, trans)


def _message_round(expanded: Network, paths, dims: tuple[int, ...], pad_dim: int, budget: int,
                   rng: np.random.Generator, q: int) -> NetworkCode:
    total = sum(dims)

    def build(q, rng):
        field_ = Field(q)
        pads = mds_expand(pad_dim, total, field_).a if pad_dim else np.zeros((0, total), dtype=np.int64)
        # a random invertible mixing of the keys keeps rounds from being identical
        mix = rng.integers(0, q, size=(pad_dim, pad_dim))
        if pad_dim and rank_of(mix, q) < pad_dim:
            return None
        pads = (mix.T @ pads) % q if pad_dim else pads
        width = total + pad_dim
        vec = {e.id: (0,) * width for e in expanded.edges}
        offsets = [sum(dims[:i]) for i in range(len(dims))]
        used = [0] * len(dims)
        for n, (s, p) in enumerate(paths):
            v = [0] * width
            v[offsets[s - 1] + used[s - 1]] = 1
            used[s - 1] += 1
            for j in range(pad_dim):
                v[total + j] = int(pads[j, n])
            for e in p:
                vec[e] = tuple(v)
        code = NetworkCode(q, dims, pad_dim, vec)
        rep = verify(code, expanded, budget, key_side_info=True)
        return code if rep.ok else None

    return _with_retries(build, q, rng)
