"""Edge partition of a two-destination network into private and shared parts.

Any single-source network with two destinations splits into edge-disjoint
subgraphs ``g1``, ``g2``, ``g3`` whose cuts are ``(M*_1, 0)``, ``(0, M*_2)`` and
``(M*_12, M*_12, M*_12)``.  The construction peels off ``M*_1`` paths that no
maximum flow to ``D2`` needs (found by the green/red recoloring below), then
repeats on the remainder with the roles of the destinations swapped.
"""
from __future__ import annotations

from dataclasses import dataclass

from .netgraph import (
    MinCutProfile,
    Network,
    decompose_paths,
    edge_disjoint_paths,
    max_flow,
    min_cut,
    mincut_profile,
)
from .regions import StarProfile, is_separable_profile, star_mincuts


class InternalError(RuntimeError):
    """The partition construction broke an invariant it is supposed to guarantee."""


@dataclass(frozen=True)
class Partition2:
    g1: frozenset[int]
    g2: frozenset[int]
    g3: frozenset[int]
    unused: frozenset[int]
    star: tuple[int, int, int]  # (M*_1, M*_2, M*_12)

    def to_dict(self) -> dict:
        return {"g1": sorted(self.g1), "g2": sorted(self.g2), "g3": sorted(self.g3),
                "unused": sorted(self.unused), "star": list(self.star)}


def _exclusive_green_paths(net: Network, first: int, star_first: int, star_other: int) -> list[list[int]]:
    """Green paths (to a super-sink) that carry no red edge after recoloring.

    ``first`` is the destination the returned paths must end at; red paths are
    a maximum set of disjoint paths to the other destination.
    """
    other = 3 - first
    d_first, d_other = net.destinations[first - 1], net.destinations[other - 1]
    m_first = min_cut(net, {first})
    m_other = min_cut(net, {other})
    flow = max_flow(net, {net.source: float("inf")}, {d_first: m_first, d_other: star_other})
    green = [p for _, p in decompose_paths(net, flow.flow, [net.source], [d_first, d_other])]
    red = edge_disjoint_paths(net, other, m_other)
    red_of = {e: r for r, path in enumerate(red) for e in path}

    cap = max(1, len(net.edges)) ** 2
    for _ in range(cap + 1):
        todo = None
        for p in green:
            reds = [i for i, e in enumerate(p) if e in red_of]
            if reds and reds[0] != 0:
                todo = (p, reds[0])
                break
        if todo is None:
            break
        p, cut = todo
        e = p[cut]
        r = red_of[e]
        g = red[r]
        g_cut = g.index(e)
        for x in g[:g_cut]:
            del red_of[x]
        red[r] = p[:cut] + g[g_cut:]
        for x in p[:cut]:
            red_of[x] = r
    else:
        raise InternalError(f"recoloring did not settle within {cap} rounds")

    exclusive = [p for p in green if not any(e in red_of for e in p)]
    ends = {net.edge_by_id[p[-1]].head for p in exclusive}
    if d_other in ends:
        raise InternalError("an exclusively green path ends at the other destination")
    if len(exclusive) < star_first:
        raise InternalError(f"found {len(exclusive)} exclusively green paths, need {star_first}")
    return exclusive[:star_first]


def _star2(net: Network) -> tuple[int, int, int]:
    m1, m2, m12 = min_cut(net, {1}), min_cut(net, {2}), min_cut(net, {1, 2})
    return m12 - m2, m12 - m1, m1 + m2 - m12


def separate_two_dest(net: Network) -> Partition2:
    """Partition the edges of a two-destination network; the result is re-verified."""
    if net.m != 2 or net.multi_source:
        raise ValueError("separation needs a single source and exactly two destinations")
    s1, s2, s12 = _star2(net)
    all_ids = frozenset(e.id for e in net.edges)

    ga = _exclusive_green_paths(net, 1, s1, s2)
    g1 = frozenset(e for p in ga for e in p)
    rest = net.subnetwork(all_ids - g1)
    gc = _exclusive_green_paths(rest, 2, s2, 0)
    g2 = frozenset(e for p in gc for e in p)
    shared = rest.subnetwork(all_ids - g1 - g2)
    keep = set()
    for i in (1, 2):
        for p in edge_disjoint_paths(shared, i, s12):
            keep.update(p)
    g3 = frozenset(keep)
    part = Partition2(g1, g2, g3, all_ids - g1 - g2 - g3, (s1, s2, s12))
    problems = partition_defects(net, part)
    if problems:
        raise InternalError("; ".join(problems))
    return part


def partition_defects(net: Network, part: Partition2) -> list[str]:
    """Every way in which ``part`` fails the required cut conditions (empty if none)."""
    out = []
    sets = [part.g1, part.g2, part.g3, part.unused]
    all_ids = {e.id for e in net.edges}
    if sum(len(s) for s in sets) != len(all_ids) or set().union(*sets) != all_ids:
        out.append("edge sets do not partition the edge set")
    s1, s2, s12 = part.star
    want = [(part.g1, {frozenset({1}): s1, frozenset({2}): 0}),
            (part.g2, {frozenset({1}): 0, frozenset({2}): s2}),
            (part.g3, {frozenset({1}): s12, frozenset({2}): s12, frozenset({1, 2}): s12})]
    for name, (ids, cuts) in zip(("g1", "g2", "g3"), want):
        sub = net.subnetwork(ids)
        for a, v in cuts.items():
            got = min_cut(sub, a)
            if got != v:
                out.append(f"{name}: cut to {sorted(a)} is {got}, expected {v}")
    return out


def check_separable(profile: MinCutProfile) -> tuple[bool, StarProfile]:
    """Nonnegative star values (necessary for a separating partition)."""
    star = star_mincuts(profile)
    return is_separable_profile(star), star


def profile_star(net: Network) -> StarProfile:
    return star_mincuts(mincut_profile(net))
