"""Unit-capacity DAG networks, max-flow and min-cut profiles.

A network has one source and ``m`` destinations (the regular setting) or, after
:func:`reverse`, ``m`` sources and a single destination.  Sessions are indexed
``1..m`` in both cases; subsets of sessions are ``frozenset``s of those indices.
Edge ids are plain integers, stable under :meth:`Network.subnetwork`.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

MAX_PROFILE_SESSIONS = 8
INF = float("inf")


class ValidationError(ValueError):
    pass


class CyclicGraph(ValidationError):
    pass


class SourceHasIncoming(ValidationError):
    pass


class DestinationHasOutgoing(ValidationError):
    pass


class DuplicateDestination(ValidationError):
    pass


class EmptySubset(ValueError):
    pass


class InsufficientCut(ValueError):
    pass


class GraphFormatError(ValueError):
    pass


class Edge(NamedTuple):
    id: int
    tail: str
    head: str


@dataclass(frozen=True)
class Network:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sources: tuple[str, ...]
    destinations: tuple[str, ...]

    @classmethod
    def build(cls, edges: Iterable[tuple[str, str]], source: str | Sequence[str],
              destinations: Sequence[str], nodes: Sequence[str] = ()) -> Network:
        """Convenience constructor: edge ids follow the order of ``edges``."""
        edge_list = tuple(Edge(i, t, h) for i, (t, h) in enumerate(edges))
        srcs = (source,) if isinstance(source, str) else tuple(source)
        seen = list(dict.fromkeys([*nodes, *srcs, *(x for e in edge_list for x in (e.tail, e.head)), *destinations]))
        net = cls(tuple(seen), edge_list, srcs, tuple(destinations))
        validate(net)
        return net

    # -- structure ---------------------------------------------------------

    @property
    def multi_source(self) -> bool:
        return len(self.sources) > 1

    @property
    def source(self) -> str:
        if len(self.sources) != 1:
            raise ValueError("network has several sources")
        return self.sources[0]

    @property
    def m(self) -> int:
        """Number of unicast sessions."""
        return len(self.sources) if self.multi_source else len(self.destinations)

    def session_source(self, i: int) -> str:
        return self.sources[i - 1] if self.multi_source else self.sources[0]

    def session_sink(self, i: int) -> str:
        return self.destinations[0] if self.multi_source else self.destinations[i - 1]

    @cached_property
    def edge_by_id(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _in(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.head].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def _out(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.tail].append(e)
        return {v: tuple(es) for v, es in out.items()}

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in[v]

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[v]

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        indeg = {v: 0 for v in self.nodes}
        for e in self.edges:
            indeg[e.head] += 1
        ready = deque(v for v in self.nodes if indeg[v] == 0)
        order = []
        while ready:
            v = ready.popleft()
            order.append(v)
            for e in self._out[v]:
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    ready.append(e.head)
        if len(order) != len(self.nodes):
            raise CyclicGraph("graph contains a directed cycle")
        return tuple(order)

    @cached_property
    def edges_topological(self) -> tuple[Edge, ...]:
        """Edges ordered so every edge comes after all edges entering its tail."""
        rank = {v: i for i, v in enumerate(self.topological_order)}
        return tuple(sorted(self.edges, key=lambda e: (rank[e.tail], e.id)))

    def subnetwork(self, edge_ids: Iterable[int]) -> Network:
        keep = set(edge_ids)
        return Network(self.nodes, tuple(e for e in self.edges if e.id in keep),
                       self.sources, self.destinations)


def validate(net: Network) -> None:
    """Raise the matching :class:`ValidationError` if ``net`` breaks the model."""
    nodes = set(net.nodes)
    if len(nodes) != len(net.nodes):
        raise ValidationError("duplicate node names")
    for e in net.edges:
        if e.tail not in nodes or e.head not in nodes:
            raise ValidationError(f"edge {e.id} references an unknown node")
        if e.tail == e.head:
            raise CyclicGraph(f"edge {e.id} is a self loop at {e.tail}")
    if len({e.id for e in net.edges}) != len(net.edges):
        raise ValidationError("duplicate edge ids")
    if not net.sources:
        raise ValidationError("no source declared")
    if not net.destinations:
        raise ValidationError("no destination declared")
    if len(net.sources) > 1 and len(net.destinations) > 1:
        raise ValidationError("several sources and several destinations is not a supported setting")
    for group in (net.sources, net.destinations):
        for v in group:
            if v not in nodes:
                raise ValidationError(f"terminal {v!r} is not a node")
    if len(set(net.destinations)) != len(net.destinations):
        raise DuplicateDestination("a destination is declared twice")
    if len(set(net.sources)) != len(net.sources):
        raise ValidationError("a source is declared twice")
    if set(net.sources) & set(net.destinations):
        raise ValidationError("a node cannot be both source and destination")
    net.topological_order  # raises CyclicGraph
    for s in net.sources:
        if net.in_edges(s):
            raise SourceHasIncoming(f"source {s!r} has incoming edges")
    for d in net.destinations:
        if net.out_edges(d):
            raise DestinationHasOutgoing(f"destination {d!r} has outgoing edges")


# ---------------------------------------------------------------------------
# max flow


@dataclass
class _Arc:
    to: int
    cap: float
    rev: int
    edge_id: int | None


class _FlowGraph:
    """Residual graph for Edmonds-Karp; arcs are scanned in insertion order."""

    def __init__(self, n: int):
        self.adj: list[list[_Arc]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: float, edge_id: int | None = None) -> None:
        self.adj[u].append(_Arc(v, cap, len(self.adj[v]), edge_id))
        self.adj[v].append(_Arc(u, 0, len(self.adj[u]) - 1, None))

    def max_flow(self, s: int, t: int, limit: float = INF) -> int:
        total = 0
        while total < limit:
            prev: list[tuple[int, int] | None] = [None] * len(self.adj)
            prev[s] = (s, -1)
            queue = deque([s])
            while queue and prev[t] is None:
                u = queue.popleft()
                for idx, arc in enumerate(self.adj[u]):
                    if arc.cap > 0 and prev[arc.to] is None:
                        prev[arc.to] = (u, idx)
                        queue.append(arc.to)
            if prev[t] is None:
                break
            push = limit - total
            v = t
            while v != s:
                u, idx = prev[v]
                push = min(push, self.adj[u][idx].cap)
                v = u
            v = t
            while v != s:
                u, idx = prev[v]
                arc = self.adj[u][idx]
                arc.cap -= push
                self.adj[arc.to][arc.rev].cap += push
                v = u
            total += push
        return int(total)


@dataclass
class FlowResult:
    value: int
    flow: dict[int, int]  # edge id -> units carried


def max_flow(net: Network, source_caps: Mapping[str, float], sink_caps: Mapping[str, float],
             edge_capacity: int = 1, limit: float = INF) -> FlowResult:
    """Max flow from a super-source feeding ``source_caps`` to a super-sink fed by ``sink_caps``."""
    index = {v: i for i, v in enumerate(net.nodes)}
    ss, tt = len(index), len(index) + 1
    g = _FlowGraph(len(index) + 2)
    for v, c in source_caps.items():
        if c > 0:
            g.add(ss, index[v], c)
    arcs = []
    for e in sorted(net.edges, key=lambda e: e.id):
        g.add(index[e.tail], index[e.head], edge_capacity, e.id)
        arcs.append((index[e.tail], len(g.adj[index[e.tail]]) - 1, e.id))
    for v, c in sink_caps.items():
        if c > 0:
            g.add(index[v], tt, c)
    value = g.max_flow(ss, tt, limit)
    flow = {}
    for u, idx, eid in arcs:
        used = edge_capacity - g.adj[u][idx].cap
        if used:
            flow[eid] = int(used)
    return FlowResult(value, flow)


def decompose_paths(net: Network, flow: Mapping[int, int], starts: Sequence[str],
                    ends: Iterable[str]) -> list[tuple[str, list[int]]]:
    """Split an acyclic integral flow into unit paths ``(end node, edge ids)``.

    Walks greedily from the start nodes, always leaving a node by its lowest
    edge id that still carries flow.
    """
    remaining = {e: f for e, f in flow.items() if f > 0}
    ends = set(ends)
    paths = []
    for s in starts:
        while True:
            out = [e for e in net.out_edges(s) if remaining.get(e.id, 0) > 0]
            if not out:
                break
            node, path = s, []
            while node not in ends:
                nxt = min((e for e in net.out_edges(node) if remaining.get(e.id, 0) > 0),
                          key=lambda e: e.id, default=None)
                if nxt is None:
                    raise RuntimeError(f"flow conservation broken at {node}")
                remaining[nxt.id] -= 1
                path.append(nxt.id)
                node = nxt.head
            paths.append((node, path))
    if any(remaining.values()):
        raise RuntimeError("flow not fully decomposed")
    return paths


def _subset(a: Iterable[int], m: int) -> frozenset[int]:
    a = frozenset(int(i) for i in a)
    if not a:
        raise EmptySubset("session subset must be nonempty")
    if not a <= frozenset(range(1, m + 1)):
        raise ValueError(f"session subset {sorted(a)} outside 1..{m}")
    return a


def min_cut(net: Network, a: Iterable[int]) -> int:
    """``M_A``: fewest unit edges separating the source side from the sessions in ``a``.

    With several sources the roles flip: the cut separates the chosen sources
    from the single destination.
    """
    a = _subset(a, net.m)
    if net.multi_source:
        srcs = {net.sources[i - 1]: INF for i in a}
        return max_flow(net, srcs, {net.destinations[0]: INF}).value
    sinks = {net.destinations[i - 1]: INF for i in a}
    return max_flow(net, {net.source: INF}, sinks).value


def session_subsets(m: int) -> list[frozenset[int]]:
    """Nonempty subsets of ``1..m`` ordered by size, then lexicographically."""
    return [frozenset(c) for r in range(1, m + 1) for c in itertools.combinations(range(1, m + 1), r)]


@dataclass(frozen=True)
class MinCutProfile:
    m: int
    values: Mapping[frozenset[int], int]
    single_source: bool = True

    @classmethod
    def from_values(cls, m: int, seq: Sequence[int], single_source: bool = True) -> MinCutProfile:
        subsets = session_subsets(m)
        if len(seq) != len(subsets):
            raise ValueError(f"need {len(subsets)} values for m={m}")
        return cls(m, {s: int(v) for s, v in zip(subsets, seq)}, single_source)

    def __getitem__(self, a: Iterable[int]) -> int:
        return self.values[frozenset(a)]

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.values[s] for s in session_subsets(self.m))

    def is_monotone(self) -> bool:
        subs = session_subsets(self.m)
        return all(self.values[a] <= self.values[b] for a in subs for b in subs if a <= b)

    def is_subadditive(self) -> bool:
        subs = session_subsets(self.m)
        return all(self.values[a | b] <= self.values[a] + self.values[b] for a in subs for b in subs)


def mincut_profile(net: Network) -> MinCutProfile:
    if net.m > MAX_PROFILE_SESSIONS:
        raise ValueError(f"{net.m} sessions exceed the profile limit of {MAX_PROFILE_SESSIONS}")
    return MinCutProfile(net.m, {a: min_cut(net, a) for a in session_subsets(net.m)},
                         single_source=not net.multi_source)


def edge_disjoint_paths(net: Network, i: int, count: int) -> list[list[int]]:
    """``count`` edge-disjoint source-to-``D_i`` paths as edge-id lists."""
    if count == 0:
        return []
    src, sink = net.session_source(i), net.session_sink(i)
    res = max_flow(net, {src: INF}, {sink: INF}, limit=count)
    if res.value < count:
        raise InsufficientCut(f"only {res.value} disjoint paths to session {i}, asked for {count}")
    return [p for _, p in decompose_paths(net, res.flow, [src], [sink])]


def reverse(net: Network) -> Network:
    """Flip every edge and swap the roles of sources and destinations."""
    return Network(net.nodes, tuple(Edge(e.id, e.head, e.tail) for e in net.edges),
                   net.destinations, net.sources)


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> Network:
    """Parse the line format ``node``/``edge``/``source``/``dest``; ``#`` starts a comment."""
    nodes: list[str] = []
    edges: list[tuple[str, str]] = []
    sources: list[str] = []
    dests: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        want = {"node": 1, "edge": 2, "source": 1, "dest": 1}.get(kind)
        if want is None:
            raise GraphFormatError(f"line {lineno}: unknown directive {kind!r}")
        if len(args) != want:
            raise GraphFormatError(f"line {lineno}: {kind} takes {want} argument(s)")
        if kind == "node":
            nodes.append(args[0])
        elif kind == "edge":
            edges.append((args[0], args[1]))
        elif kind == "source":
            sources.append(args[0])
        else:
            dests.append(args[0])
    if not sources:
        raise GraphFormatError("no source declared")
    return Network.build(edges, sources, dests, nodes)


def load_graph(path: str | Path) -> Network:
    return parse_graph(Path(path).read_text())


def format_graph(net: Network) -> str:
    lines = [f"node {v}" for v in net.nodes]
    lines += [f"edge {e.tail} {e.head}" for e in sorted(net.edges, key=lambda e: e.id)]
    lines += [f"source {s}" for s in net.sources]
    lines += [f"dest {d}" for d in net.destinations]
    return "\n".join(lines) + "\n"


def random_dag(rng: np.random.Generator, m: int = 2, n_inner: int = 4, n_edges: int = 12,
               parallel: bool = True) -> Network:
    """Random single-source DAG with ``m`` destinations and at most ``n_edges`` edges.

    Inner nodes are ranked; edges only go from lower to higher rank.  Each
    destination is guaranteed at least one incoming edge.
    """
    inner = [f"v{i}" for i in range(n_inner)]
    dests = [f"D{i}" for i in range(1, m + 1)]
    order = ["S", *inner]
    edges: list[tuple[str, str]] = []
    for d in dests:
        edges.append((order[int(rng.integers(len(order)))], d))
    for v in inner:
        edges.append((order[int(rng.integers(order.index(v)))], v))
    while len(edges) < n_edges:
        i = int(rng.integers(len(order)))
        heads = order[i + 1:] + dests
        h = heads[int(rng.integers(len(heads)))]
        pair = (order[i], h)
        if not parallel and pair in edges:
            continue
        edges.append(pair)
    return Network.build(edges, "S", dests, ["S", *inner, *dests])
