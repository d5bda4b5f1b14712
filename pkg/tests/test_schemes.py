from fractions import Fraction

import numpy as np
import pytest

from networks import realize_two_dest
from secnc import gallery
from secnc.code import apply_decoder, check_decodable, check_local, check_secrecy, decodable_keys_at, verify
from secnc.netgraph import mincut_profile, random_dag
from secnc.regions import secure_outer_bound, two_phase_region, unsecure_region
from secnc.schemes import (
    CombinationNetwork,
    InfeasibleTarget,
    NoSecureRate,
    RateTooHigh,
    TargetInfeasible,
    TooLarge,
    ZeroSecureRate,
    combination_decoder,
    combination_region,
    combination_scheme,
    decoding_spaces,
    expand_parallel,
    parse_combination,
    secure_multicast_code,
    sum_dimension,
    two_dest_corners,
    two_dest_dimension_identity,
    two_dest_scheme,
    two_phase_scheme,
)

F = Fraction


def rng(seed=0):
    return np.random.default_rng(seed)


# secure multicast


def test_multicast_keys_over_shared_part():
    net = gallery.separable_butterfly().subnetwork(range(4, 12))
    code = secure_multicast_code(net, [1, 2], 0, 2, rng())
    for d in ("D1", "D2"):
        assert decodable_keys_at(code, net, d, [0, 1])
    assert check_local(code, net)


def test_plain_multicast_without_keys():
    net = gallery.separable_butterfly().subnetwork(range(4, 12))
    code = secure_multicast_code(net, [1, 2], 2, 0, rng())
    assert code.key_dim == 0 and check_local(code, net)


def test_multicast_one_symbol_against_one_edge():
    net = gallery.separable_butterfly().subnetwork(range(4, 12))
    code = secure_multicast_code(net, [1, 2], 1, 1, rng(3))
    assert check_secrecy(code, net, 1) and check_local(code, net)


def test_multicast_rate_check():
    with pytest.raises(RateTooHigh):
        secure_multicast_code(gallery.tree_plus_paths(), [1, 2], 2, 1, rng())


# two destinations


def test_separable_butterfly_two_keys():
    res = two_dest_scheme(gallery.separable_butterfly(), 2, "case1", rng())
    assert res.achieved == (1, 1) and res.report.ok
    assert res.report.secrecy.subset_size == 2


def test_tree_plus_paths_alpha1():
    net = gallery.tree_plus_paths()
    res = two_dest_scheme(net, 1, "alpha1", rng())
    assert res.achieved == (1, 1)
    assert secure_outer_bound(mincut_profile(net), 1).on_boundary(res.achieved)


def test_no_secure_rate():
    with pytest.raises(NoSecureRate):
        two_dest_scheme(gallery.tree_plus_paths(), 2, "alpha1", rng())


def test_destination_with_small_cut_is_dropped():
    res = two_dest_scheme(gallery.direct_edge(), 2, "alpha1", rng())
    assert res.achieved == (0, 1) and res.case == "dropped" and res.report.ok


def test_case1_needs_large_budget():
    with pytest.raises(ValueError):
        two_dest_scheme(gallery.separable_butterfly(), 1, "case1", rng())


def test_corner_formula():
    assert two_dest_corners(3, 3, 4, 0) == {(3, 1), (1, 3)}
    assert two_dest_corners(3, 3, 4, 2) == {(1, 1)}


@pytest.mark.parametrize("seed", range(12))
def test_random_profiles_reach_both_corners(seed):
    g = rng(seed)
    s1, s2, s12 = (int(x) for x in g.integers(0, 3, size=3))
    s12 += 1
    net = realize_two_dest(s1, s2, s12, g)
    m1, m2, m12 = s1 + s12, s2 + s12, s1 + s2 + s12
    bound = secure_outer_bound(mincut_profile(net), 0)
    for k in range(min(m1, m2)):
        bound = secure_outer_bound(mincut_profile(net), k)
        got = {two_dest_scheme(net, k, c, g).achieved for c in ("alpha0", "alpha1")}
        assert got == two_dest_corners(m1, m2, m12, k)
        assert all(bound.on_boundary(p) for p in got)


@pytest.mark.parametrize("seed", range(10))
def test_random_dags(seed):
    g = rng(100 + seed)
    net = random_dag(g, m=2, n_inner=4, n_edges=14)
    prof = mincut_profile(net)
    m1, m2, m12 = prof.as_tuple()
    for k in range(min(m1, m2)):
        for c in ("alpha0", "alpha1"):
            res = two_dest_scheme(net, k, c, g)
            assert verify(res.code, net, k).ok
            assert res.achieved in two_dest_corners(m1, m2, m12, k)


# combination networks


def test_parse_combination():
    cnet = parse_combination("t 6\n# members\ndest 1 2 4\ndest 3 4 5 6\ndest 2 3\n")
    assert cnet.memberships == tuple(frozenset(s) for s in gallery.MIXED_MEMBERS)
    with pytest.raises(ValueError):
        parse_combination("dest 1 2\n")
    with pytest.raises(ValueError):
        CombinationNetwork(3, (frozenset(),))
    with pytest.raises(ValueError):
        CombinationNetwork(3, (frozenset({4}),))


def test_combination_edge_layout():
    net = CombinationNetwork(3, ({1, 2}, {2, 3})).to_network()
    assert [(e.id, e.tail, e.head) for e in net.edges] == [
        (0, "S", "I1"), (1, "S", "I2"), (2, "S", "I3"),
        (3, "I1", "D1"), (4, "I2", "D1"), (5, "I2", "D2"), (6, "I3", "D2")]


def test_joint_coding_three_keys():
    cnet = CombinationNetwork(6, gallery.JOINT_CODING_MEMBERS)
    res = combination_scheme(cnet, 3, (1, 1, 1), rng())
    assert res.report.ok
    for i in (1, 2, 3):
        assert apply_decoder(res.code, res.network, i, combination_decoder(cnet, res.network, res.decoders, (1, 1, 1), i))


def test_mixed_membership_two_keys():
    cnet = CombinationNetwork(6, gallery.MIXED_MEMBERS)
    spaces = decoding_spaces(cnet, 2, 257)
    assert [s.shape[1] for s in spaces] == [1, 2, 0]
    assert sum_dimension(spaces, (1, 2), 257) == 3
    res = combination_scheme(cnet, 2, (1, 2, 0), rng())
    assert res.report.ok
    with pytest.raises(TargetInfeasible):
        combination_scheme(cnet, 2, (2, 2, 0), rng())


def test_combination_zero_target_and_too_many_keys():
    cnet = CombinationNetwork(3, ({1, 2}, {2, 3}))
    assert combination_scheme(cnet, 1, (0, 0), rng()).report.ok
    with pytest.raises(TargetInfeasible):
        combination_scheme(cnet, 3, (1, 0), rng())
    reg = combination_region(cnet, 3)
    assert all(c == 0 for c in reg.region.constraints.values())


def test_combination_region_two_destinations_small():
    for t in range(1, 5):
        for m1 in range(1, t + 1):
            for m2 in range(1, t + 1):
                for overlap in range(0, min(m1, m2) + 1):
                    if m1 + m2 - overlap > t:
                        continue
                    a = set(range(1, m1 + 1))
                    b = set(range(m1 - overlap + 1, m1 - overlap + m2 + 1))
                    cnet = CombinationNetwork(t, (a, b))
                    for k in range(t + 1):
                        assert combination_region(cnet, k).region.equals(cnet.outer_bound(k))
                        lhs, rhs = two_dest_dimension_identity(cnet, k)
                        assert lhs == rhs


def test_combination_region_size_guard():
    with pytest.raises(TooLarge):
        combination_region(CombinationNetwork(11, ({1},)), 1)


# two-phase


@pytest.mark.parametrize("name", ["direct_edge", "tree_plus_paths"])
def test_two_phase_halves_second_rate(name):
    net = gallery.GALLERY[name]()
    sched = two_phase_scheme(net, 1, (2, 1), rng())
    assert sched.achieved == (1, F(1, 2))
    assert sched.rounds == sched.M == 2
    assert sched.keys_generated == sched.keys_consumed
    for c in sched.message_rounds:
        assert verify(c, sched.expanded, sched.T, key_side_info=True).ok
    for c in sched.key_rounds:
        assert check_secrecy(c, net, 1) and check_local(c, net)


def test_two_phase_fractional_target_needs_expansion():
    net = gallery.tree_plus_paths()
    sched = two_phase_scheme(net, 1, (F(3, 2), F(3, 2)), rng())
    assert sched.T == 2
    assert sched.achieved == (F(3, 4), F(3, 4))
    for c in sched.message_rounds:
        assert verify(c, sched.expanded, 2, key_side_info=True).ok
        assert all(check_decodable(c, sched.expanded, i, True) for i in (1, 2))


def test_two_phase_without_keys():
    sched = two_phase_scheme(gallery.direct_edge(), 0, (2, 1), rng())
    assert sched.achieved == (2, 1) and not sched.key_rounds


def test_two_phase_errors():
    with pytest.raises(ZeroSecureRate):
        two_phase_scheme(gallery.direct_edge(), 2, (1, 1), rng())
    with pytest.raises(InfeasibleTarget):
        two_phase_scheme(gallery.direct_edge(), 1, (2, 2), rng())


def test_two_phase_region_inside_capacity():
    for net in (gallery.direct_edge(), gallery.tree_plus_paths()):
        prof = mincut_profile(net)
        smallest = min(prof[{1}], prof[{2}])
        tp = two_phase_region(unsecure_region(prof), 1, smallest)
        assert tp.is_subset_of(secure_outer_bound(prof, 1))
        assert secure_outer_bound(prof, 1).is_subset_of(unsecure_region(prof))


def test_expand_parallel_ids():
    net = expand_parallel(gallery.single_edge(), 3)
    assert sorted(e.id for e in net.edges) == [0, 1, 2]
    net = expand_parallel(gallery.tree_plus_paths(), 2)
    assert {e.id // 2 for e in net.edges} == set(range(5))
    assert mincut_profile(net).as_tuple() == (4, 4, 6)
