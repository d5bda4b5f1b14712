"""Small reference networks used by tests, the CLI and the data directory."""
from __future__ import annotations

from .netgraph import Network, reverse

# Encoding matrix of a secure (1,1,1) code for the three-destination combination
# network below, over GF(7): columns are W1 W2 W3 K1 K2 K3, rows are the six
# source edges in order.
JOINT_CODING_Q = 7
JOINT_CODING_MATRIX = (
    (0, 0, 0, 1, 0, 0),
    (0, 0, 0, 1, 1, 1),
    (0, 0, 0, 1, 2, 4),
    (1, 0, 0, 1, 3, 2),
    (4, 6, 4, 1, 4, 2),
    (2, 4, 2, 1, 5, 4),
)
# Decoders as {source-edge index (1-based): coefficient}.
JOINT_CODING_DECODERS = {
    1: {1: 6, 2: 3, 3: 4, 4: 1},
    2: {1: 6, 2: 4, 5: 3, 6: 1},
    3: {3: 5, 4: 6, 5: 1, 6: 2},
}
JOINT_CODING_MEMBERS = ({1, 2, 3, 4}, {1, 2, 5, 6}, {3, 4, 5, 6})
MIXED_MEMBERS = ({1, 2, 4}, {3, 4, 5, 6}, {2, 3})


def separable_butterfly() -> Network:
    """Two destinations, cuts (3, 3, 4); splits into one private path each plus a
    butterfly-like shared part where node ``i`` combines two keys."""
    return Network.build([
        ("S", "c"), ("c", "D1"),
        ("S", "d"), ("d", "D2"),
        ("S", "A"), ("S", "B"),
        ("A", "D1"), ("B", "D2"),
        ("A", "i"), ("B", "i"),
        ("i", "D1"), ("i", "D2"),
    ], "S", ["D1", "D2"])


def nonseparable_three_dest() -> Network:
    """Three destinations with cuts (1,1,1,2,2,2,2): not separable."""
    return Network.build([
        ("S", "a"), ("S", "b"), ("a", "c"), ("b", "c"),
        ("a", "D1"), ("b", "D2"), ("c", "D3"),
    ], "S", ["D1", "D2", "D3"])


def direct_edge() -> Network:
    """Cuts (2, 3, 3): two relays reach both destinations, plus a direct edge to D2."""
    return Network.build([
        ("S", "a"), ("S", "b"), ("S", "D2"),
        ("a", "D1"), ("a", "D2"), ("b", "D1"), ("b", "D2"),
    ], "S", ["D1", "D2"])


def tree_plus_paths() -> Network:
    """Cuts (2, 2, 3): a relay feeding both destinations plus one direct edge to each."""
    return Network.build([
        ("S", "a"), ("a", "D1"), ("a", "D2"), ("S", "D1"), ("S", "D2"),
    ], "S", ["D1", "D2"])


def key_relay() -> Network:
    """Cuts (1, 2, 2): D1 hangs behind relay ``z`` (two parallel edges), D2 sees ``z`` and ``S``."""
    return Network.build([
        ("S", "z"), ("S", "D2"), ("z", "D1"), ("z", "D1"), ("z", "D2"),
    ], "S", ["D1", "D2"])


def key_relay_reversed() -> Network:
    """:func:`key_relay` with edges flipped: sources D1, D2 and the single destination S."""
    return reverse(key_relay())


def two_source_merge() -> Network:
    """Two sources, one destination, cuts (1, 2, 2): S1 only reaches D through the
    merge node ``a`` that S2 also feeds."""
    return Network.build([
        ("S1", "a"), ("S2", "a"), ("S2", "D"), ("a", "D"),
    ], ["S1", "S2"], ["D"])


def single_edge() -> Network:
    return Network.build([("S", "D")], "S", ["D"])


GALLERY = {
    "separable_butterfly": separable_butterfly,
    "nonseparable_three_dest": nonseparable_three_dest,
    "direct_edge": direct_edge,
    "tree_plus_paths": tree_plus_paths,
    "key_relay": key_relay,
    "key_relay_reversed": key_relay_reversed,
    "two_source_merge": two_source_merge,
    "single_edge": single_edge,
}
