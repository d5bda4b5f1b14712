"""Scalar linear network codes and their verifier.

A code assigns every edge a global coding vector over ``[W_1 | ... | W_m | K]``:
the message coordinates of each session followed by ``key_dim`` uniform keys.
The verifier checks local computability, zero-error decoding and perfect
secrecy against any ``k`` wiretapped edges.  Secrecy of a linear code reduces to
``rank(B_Z) == rank([A_Z | B_Z])`` with ``A``/``B`` the message/key columns;
:func:`brute_force_secrecy` checks the same property by enumeration.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .gf import Field, rank_of
from .netgraph import Network

MAX_SEARCH_EDGES, MAX_SEARCH_Q, MAX_SEARCH_KEYS = 6, 5, 2
BRUTE_FORCE_LIMIT = 10**7


class MissingVector(ValueError):
    pass


class TooLarge(ValueError):
    pass


class SearchSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class NetworkCode:
    q: int
    message_dims: tuple[int, ...]
    key_dim: int
    vectors: Mapping[int, tuple[int, ...]]
    # owner session index (1-based) of every key coordinate; only meaningful with several sources
    key_owner: tuple[int, ...] | None = None

    def __post_init__(self):
        Field(self.q)
        object.__setattr__(self, "message_dims", tuple(int(r) for r in self.message_dims))
        if any(r < 0 for r in self.message_dims) or self.key_dim < 0:
            raise ValueError("dimensions must be nonnegative")
        clean = {}
        for e, v in self.vectors.items():
            v = tuple(int(x) % self.q for x in v)
            if len(v) != self.width:
                raise ValueError(f"edge {e}: vector length {len(v)} != {self.width}")
            clean[int(e)] = v
        object.__setattr__(self, "vectors", clean)
        if self.key_owner is not None and len(self.key_owner) != self.key_dim:
            raise ValueError("key_owner must list one owner per key")

    @property
    def m(self) -> int:
        return len(self.message_dims)

    @property
    def message_width(self) -> int:
        return sum(self.message_dims)

    @property
    def width(self) -> int:
        return self.message_width + self.key_dim

    def message_columns(self, i: int) -> range:
        start = sum(self.message_dims[: i - 1])
        return range(start, start + self.message_dims[i - 1])

    def vector(self, e: int) -> tuple[int, ...]:
        try:
            return self.vectors[e]
        except KeyError:
            raise MissingVector(f"edge {e} has no coding vector") from None

    def rows(self, edge_ids: Iterable[int]) -> np.ndarray:
        ids = list(edge_ids)
        if not ids:
            return np.zeros((0, self.width), dtype=np.int64)
        return np.array([self.vector(e) for e in ids], dtype=np.int64)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "message_dims": list(self.message_dims),
            "key_dim": self.key_dim,
            "key_owner": None if self.key_owner is None else list(self.key_owner),
            "vectors": {str(e): list(v) for e, v in sorted(self.vectors.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> NetworkCode:
        owner = data.get("key_owner")
        return cls(int(data["q"]), tuple(data["message_dims"]), int(data["key_dim"]),
                   {int(e): tuple(v) for e, v in data["vectors"].items()},
                   None if owner is None else tuple(owner))


def load_code(path: str | Path) -> NetworkCode:
    return NetworkCode.from_dict(json.loads(Path(path).read_text()))


def zero_code(net: Network, q: int, message_dims: Sequence[int], key_dim: int = 0) -> NetworkCode:
    width = sum(message_dims) + key_dim
    return NetworkCode(q, tuple(message_dims), key_dim, {e.id: (0,) * width for e in net.edges})


# ---------------------------------------------------------------------------
# local computability


def _owned_columns(code: NetworkCode, net: Network, source: str) -> set[int]:
    cols: set[int] = set()
    for i in range(1, code.m + 1):
        if net.session_source(i) == source:
            cols.update(code.message_columns(i))
    for j in range(code.key_dim):
        owner = 1 if code.key_owner is None else code.key_owner[j]
        if net.session_source(owner) == source:
            cols.add(code.message_width + j)
    return cols


def check_local(code: NetworkCode, net: Network) -> bool:
    """Every edge is computable from what its tail node has.

    Source edges may use any coordinate owned by that source; other edges must
    lie in the span of the tail's incoming vectors.
    """
    for e in net.edges:
        code.vector(e.id)
    for e in net.edges:
        v = np.array(code.vector(e.id), dtype=np.int64)
        if e.tail in net.sources:
            if net.multi_source:
                owned = _owned_columns(code, net, e.tail)
                if any(v[c] for c in range(code.width) if c not in owned):
                    return False
            continue
        parents = code.rows(p.id for p in net.in_edges(e.tail))
        if not v.any():
            continue
        if rank_of(np.vstack([parents, v]), code.q) != rank_of(parents, code.q):
            return False
    return True


# ---------------------------------------------------------------------------
# decodability


def _target_rows(code: NetworkCode, i: int) -> np.ndarray:
    cols = list(code.message_columns(i))
    t = np.zeros((len(cols), code.width), dtype=np.int64)
    for r, c in enumerate(cols):
        t[r, c] = 1
    return t


def _received(code: NetworkCode, net: Network, node: str, key_side_info: bool) -> np.ndarray:
    rows = code.rows(e.id for e in net.in_edges(node))
    if key_side_info and code.key_dim:
        keys = np.zeros((code.key_dim, code.width), dtype=np.int64)
        for j in range(code.key_dim):
            keys[j, code.message_width + j] = 1
        rows = np.vstack([rows, keys])
    return rows


def check_decodable(code: NetworkCode, net: Network, i: int, key_side_info: bool = False) -> bool:
    """Destination of session ``i`` can recover ``W_i`` exactly from its incoming symbols.

    ``key_side_info`` lets the destination use all keys as known side information.
    """
    return decodable_at(code, net, net.session_sink(i), i, key_side_info)


def decodable_at(code: NetworkCode, net: Network, node: str, i: int, key_side_info: bool = False) -> bool:
    """Node ``node`` can recover the message block of session ``i``."""
    target = _target_rows(code, i)
    if target.shape[0] == 0:
        return True
    got = _received(code, net, node, key_side_info)
    return rank_of(np.vstack([got, target]), code.q) == rank_of(got, code.q)


def decodable_keys_at(code: NetworkCode, net: Network, node: str, keys: Iterable[int]) -> bool:
    """Node ``node`` can recover each listed key coordinate (0-based within the key block)."""
    keys = list(keys)
    if not keys:
        return True
    target = np.zeros((len(keys), code.width), dtype=np.int64)
    for r, j in enumerate(keys):
        target[r, code.message_width + j] = 1
    got = _received(code, net, node, False)
    return rank_of(np.vstack([got, target]), code.q) == rank_of(got, code.q)


def apply_decoder(code: NetworkCode, net: Network, i: int, coeffs: Mapping[int, Sequence[int]]) -> bool:
    """True iff the given per-edge coefficients applied at the sink produce exactly ``W_i``.

    ``coeffs`` maps an incoming edge id of the sink to one coefficient per
    message coordinate of session ``i``.
    """
    sink_edges = {e.id for e in net.in_edges(net.session_sink(i))}
    if not set(coeffs) <= sink_edges:
        return False
    target = _target_rows(code, i)
    acc = np.zeros_like(target)
    for e, cs in coeffs.items():
        cs = np.array(cs, dtype=np.int64).reshape(-1)
        if cs.size != target.shape[0]:
            return False
        acc = (acc + np.outer(cs, code.vector(e))) % code.q
    return bool((acc == target).all())


# ---------------------------------------------------------------------------
# secrecy


@dataclass(frozen=True)
class SecrecyResult:
    secure: bool
    counterexample: tuple[int, ...] | None
    checked: int
    subset_size: int

    def __bool__(self) -> bool:
        return self.secure


def _leaks(rows: np.ndarray, split: int, q: int) -> bool:
    return rank_of(rows[:, split:], q) != rank_of(rows, q)


def check_secrecy(code: NetworkCode, net: Network, k: int, edges: Sequence[int] | None = None) -> SecrecyResult:
    """Perfect secrecy against every wiretap set of at most ``k`` edges.

    Observing more edges never reveals less, so only sets of exactly
    ``min(k, |E|)`` edges are examined, in lexicographic order of edge id; the
    first leaking set is returned as the counterexample.
    """
    ids = sorted(e.id for e in net.edges) if edges is None else sorted(edges)
    size = min(k, len(ids))
    mat = code.rows(ids)
    pos = {e: r for r, e in enumerate(ids)}
    split = code.message_width
    if split == 0 or size == 0:
        return SecrecyResult(True, None, 0, size)
    # rows with a zero message part never leak on their own; skip quickly when nothing carries messages
    if not mat[:, :split].any():
        return SecrecyResult(True, None, 0, size)
    checked = 0
    for z in itertools.combinations(ids, size):
        checked += 1
        rows = mat[[pos[e] for e in z]]
        if not rows[:, :split].any():
            continue
        if _leaks(rows, split, code.q):
            return SecrecyResult(False, z, checked, size)
    return SecrecyResult(True, None, checked, size)


def _all_vectors(q: int, dim: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((q,) * dim).reshape(dim, -1).T
    return grids.astype(np.int64)


def brute_force_secrecy(code: NetworkCode, net: Network, k: int) -> bool:
    """Exhaustive check that the view of every ``<= k`` edges is independent of the messages.

    For each wiretap set the multiset of observed symbols over all key values is
    computed for every message value; secrecy holds iff these multisets agree.
    """
    q, split = code.q, code.message_width
    if q ** code.width > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{q}^{code.width} joint values exceed the enumeration limit")
    ids = sorted(e.id for e in net.edges)
    messages = _all_vectors(q, split)
    keys = _all_vectors(q, code.key_dim)
    for size in range(1, min(k, len(ids)) + 1):
        for z in itertools.combinations(ids, size):
            rows = code.rows(z)
            a, b = rows[:, :split], rows[:, split:]
            wa = (messages @ a.T) % q           # (nW, |Z|)
            kb = (keys @ b.T) % q               # (nK, |Z|)
            weights = q ** np.arange(size, dtype=np.int64)
            view = ((wa[:, None, :] + kb[None, :, :]) % q) @ weights  # (nW, nK)
            view.sort(axis=1)
            if not (view == view[0]).all():
                return False
    return True


def simulate(code: NetworkCode, messages: Sequence[int], keys: Sequence[int]) -> dict[int, int]:
    """Symbol carried by every edge for one realization of messages and keys."""
    x = np.array(list(messages) + list(keys), dtype=np.int64)
    return {e: int(np.dot(v, x) % code.q) for e, v in code.vectors.items()}


# ---------------------------------------------------------------------------
# full report


@dataclass
class VerificationReport:
    local: bool
    decodable: dict[int, bool]
    secrecy: SecrecyResult
    oracle: bool | None = None

    @property
    def ok(self) -> bool:
        return (self.local and all(self.decodable.values()) and self.secrecy.secure
                and self.oracle is not False)

    def lines(self, net: Network) -> list[str]:
        n, s = len(net.edges), self.secrecy.subset_size
        out = [f"local: {'pass' if self.local else 'fail'}"]
        for i, ok in sorted(self.decodable.items()):
            out.append(f"decodable D{i}: {'pass' if ok else 'fail'}")
        if self.secrecy.secure:
            out.append(f"secure: pass (all C({n},{s}) = {comb(n, s)} subsets)")
        else:
            out.append(f"secure: fail (leaking edge set {list(self.secrecy.counterexample)})")
        if self.oracle is not None:
            agree = self.oracle == self.secrecy.secure
            out.append(f"oracle: {'agrees' if agree else 'DISAGREES'} (brute force says {'secure' if self.oracle else 'leaky'})")
        return out


def verify(code: NetworkCode, net: Network, k: int, key_side_info: bool = False,
           with_oracle: bool = False) -> VerificationReport:
    dec = {i: check_decodable(code, net, i, key_side_info)
           for i in range(1, code.m + 1) if code.message_dims[i - 1] > 0}
    rep = VerificationReport(check_local(code, net), dec, check_secrecy(code, net, k))
    if with_oracle and code.q ** code.width <= BRUTE_FORCE_LIMIT:
        rep.oracle = brute_force_secrecy(code, net, k)
    return rep


# ---------------------------------------------------------------------------
# exhaustive search for tiny networks


@dataclass(frozen=True)
class SearchResult:
    found: bool
    code: NetworkCode | None
    explored: int

    @property
    def verdict(self) -> str:
        return "Found" if self.found else "NoCodeExists"


def _normalize(v: tuple[int, ...], q: int) -> tuple[int, ...]:
    """Scale so the first nonzero entry is 1 (zero vector unchanged)."""
    lead = next((x for x in v if x), 0)
    if lead == 0:
        return v
    inv = pow(lead, q - 2, q)
    return tuple(x * inv % q for x in v)


def _span_options(parents: list[tuple[int, ...]], q: int, width: int) -> list[tuple[int, ...]]:
    if not parents:
        return [(0,) * width]
    out = set()
    for cs in itertools.product(range(q), repeat=len(parents)):
        v = tuple(sum(c * p[j] for c, p in zip(cs, parents)) % q for j in range(width))
        out.add(_normalize(v, q))
    return sorted(out)


def search_no_code(net: Network, target: Sequence[int], k: int, q: int = 3, r_max: int = 2,
                   node_budget: int = 2_000_000) -> SearchResult:
    """Exhaustively look for a scalar linear code achieving ``target`` securely.

    Every source gets ``r_max`` private keys.  Codes are enumerated up to two
    symmetries that preserve both secrecy and decodability: scaling a single
    edge, and an invertible change of basis of one source's keys (so each new
    source edge either reuses keys already seen or introduces the next key).
    Branches are cut as soon as some wiretap set among the assigned edges leaks.
    Only linear scalar codes are covered.
    """
    if len(net.edges) > MAX_SEARCH_EDGES or q > MAX_SEARCH_Q or r_max > MAX_SEARCH_KEYS:
        raise SearchSpaceTooLarge(f"search is limited to <= {MAX_SEARCH_EDGES} edges, "
                                  f"q <= {MAX_SEARCH_Q}, r_max <= {MAX_SEARCH_KEYS}")
    Field(q)
    target = tuple(int(r) for r in target)
    if len(target) != net.m:
        raise ValueError("target length must match the number of sessions")
    sources = list(net.sources)
    owner_of_key = [s_idx + 1 for s_idx in range(len(sources)) for _ in range(r_max)]
    key_dim = r_max * len(sources)
    proto = NetworkCode(q, target, key_dim, {}, tuple(owner_of_key) if net.multi_source else None)
    width, split = proto.width, proto.message_width

    def msg_cols(src: str) -> list[int]:
        return [c for i in range(1, net.m + 1) if net.session_source(i) == src
                for c in proto.message_columns(i)]

    key_cols = {s: [split + idx * r_max + j for j in range(r_max)] for idx, s in enumerate(sources)}
    order = list(net.edges_topological)
    assigned: dict[int, tuple[int, ...]] = {}
    new_keys = {s: 0 for s in sources}
    explored = 0

    def source_options(src: str) -> Iterator[tuple[tuple[int, ...], bool]]:
        mc, kc = msg_cols(src), key_cols[src]
        used = new_keys[src]
        seen = set()
        for mv in itertools.product(range(q), repeat=len(mc)):
            for kv in itertools.product(range(q), repeat=used):
                v = [0] * width
                for c, x in zip(mc, mv):
                    v[c] = x
                for c, x in zip(kc, kv):
                    v[c] = x
                t = _normalize(tuple(v), q)
                if t not in seen:
                    seen.add(t)
                    yield t, False
            if used < r_max:
                v = [0] * width
                for c, x in zip(mc, mv):
                    v[c] = x
                v[kc[used]] = 1
                yield tuple(v), True

    def leaks_with(eid: int) -> bool:
        ids = sorted(assigned)
        size = min(k, len(ids))
        if size == 0 or split == 0:
            return False
        others = [e for e in ids if e != eid]
        for rest in itertools.combinations(others, size - 1):
            rows = np.array([assigned[e] for e in (*rest, eid)], dtype=np.int64)
            if rows[:, :split].any() and _leaks(rows, split, q):
                return True
        return False

    def finish() -> NetworkCode | None:
        code = NetworkCode(q, target, key_dim, dict(assigned), proto.key_owner)
        if all(check_decodable(code, net, i) for i in range(1, net.m + 1)):
            return code
        return None

    def walk(pos: int) -> NetworkCode | None:
        nonlocal explored
        explored += 1
        if explored > node_budget:
            raise SearchSpaceTooLarge(f"explored more than {node_budget} partial codes")
        if pos == len(order):
            return finish()
        e = order[pos]
        if e.tail in net.sources:
            options = list(source_options(e.tail))
        else:
            parents = [assigned[p.id] for p in net.in_edges(e.tail)]
            options = [(v, False) for v in _span_options(parents, q, width)]
        for v, introduces in options:
            assigned[e.id] = v
            if introduces:
                new_keys[e.tail] += 1
            if not leaks_with(e.id):
                found = walk(pos + 1)
                if found is not None:
                    return found
            if introduces:
                new_keys[e.tail] -= 1
            del assigned[e.id]
        return None

    if sum(target) == 0:
        code = zero_code(net, q, target, key_dim)
        return SearchResult(True, NetworkCode(q, target, key_dim, code.vectors, proto.key_owner), 0)
    code = walk(0)
    return SearchResult(code is not None, code, explored)
