"""End-to-end acceptance checks.  Each test prints one ``PASS``/``FAIL`` line."""
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from networks import random_code, realize_two_dest, sink_coeffs
from oracles import erasure_grid_max_r2
from secnc import erasure, gallery
from secnc.cli import main
from secnc.code import apply_decoder, brute_force_secrecy, check_secrecy, search_no_code, verify
from secnc.netgraph import MinCutProfile, mincut_profile, random_dag
from secnc.regions import (
    butterfly_regions,
    is_separable_profile,
    secure_outer_bound,
    star_mincuts,
    two_phase_region,
    unsecure_region,
)
from secnc.schemes import (
    CombinationNetwork,
    combination_code_from_matrix,
    combination_region,
    two_dest_corners,
    two_dest_dimension_identity,
    two_dest_scheme,
    two_phase_scheme,
)
from secnc.separation import partition_defects, separate_two_dest

F = Fraction


@pytest.fixture
def report(capsys):
    """Print a verdict line past pytest's capture, then fail on a false verdict."""
    def emit(number, label, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {label}: {'PASS' if ok else 'FAIL'}{' ' + detail if detail else ''}")
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_butterfly_two_keys_end_to_end(report, capsys, data_dir):
    start = time.perf_counter()
    code = main(["scheme", "two-dest", str(data_dir / "separable_butterfly.graph"), "-k", "2"])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    res = two_dest_scheme(gallery.separable_butterfly(), 2, "case1", np.random.default_rng(0))
    rep = verify(res.code, gallery.separable_butterfly(), 2)
    ok = (code == 0 and '"1",\n    "1"' in out and res.achieved == (1, 1) and rep.ok
          and rep.secrecy.checked == comb(12, 2) and all(rep.decodable.values()) and elapsed < 1.0)
    report(1, "two-destination butterfly, k=2", ok, f"achieved={res.achieved} time={elapsed:.2f}s")


def test_golden_joint_code(report):
    cnet = CombinationNetwork(6, gallery.JOINT_CODING_MEMBERS)
    net = cnet.to_network()
    code = combination_code_from_matrix(cnet, gallery.JOINT_CODING_MATRIX, gallery.JOINT_CODING_Q, (1, 1, 1), 3)
    rep = verify(code, net, 3)
    decoders = [apply_decoder(code, net, d, sink_coeffs(net, d, gallery.JOINT_CODING_DECODERS[d])) for d in (1, 2, 3)]
    ok = rep.ok and rep.local and rep.secrecy.checked == comb(18, 3) and all(decoders)
    report(2, "golden GF(7) joint code and printed decoders", ok, f"subsets={rep.secrecy.checked}")


def test_star_inversion(report):
    two = star_mincuts(MinCutProfile.from_values(2, (3, 3, 4))).as_tuple()
    three = star_mincuts(mincut_profile(gallery.nonseparable_three_dest()))
    ok = two == (1, 1, 2) and three[{1, 2, 3}] == -1 and not is_separable_profile(three)
    report(3, "star min-cut inversion", ok, f"(3,3,4)->{two} M*123={three[{1, 2, 3}]}")


def test_separation_soundness(report):
    start = time.perf_counter()
    bad = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        net = random_dag(rng, m=2, n_inner=int(rng.integers(1, 7)), n_edges=int(rng.integers(4, 21)))
        assert len(net.edges) <= 20
        bad += bool(partition_defects(net, separate_two_dest(net)))
    elapsed = time.perf_counter() - start
    report(4, "two-destination separation soundness", bad == 0 and elapsed < 30,
           f"defective={bad}/50 time={elapsed:.1f}s")


def test_secrecy_checker_matches_enumeration(report):
    rng = np.random.default_rng(2024)
    disagree = secure = 0
    for _ in range(500):
        q = int(rng.choice([2, 3]))
        net = random_dag(rng, m=int(rng.integers(1, 3)), n_inner=2, n_edges=int(rng.integers(2, 6)))
        assert len(net.edges) <= 5
        code = random_code(rng, net, q)
        k = int(rng.integers(1, 4))
        fast = check_secrecy(code, net, k).secure
        disagree += fast != brute_force_secrecy(code, net, k)
        secure += fast
    report(5, "rank criterion vs enumeration", disagree == 0, f"disagreements=0/500 secure={secure}"
           if disagree == 0 else f"disagreements={disagree}/500")


def test_two_destination_corners(report):
    rng = np.random.default_rng(77)
    misses = []
    for _ in range(25):
        s1, s2 = (int(x) for x in rng.integers(0, 3, size=2))
        s12 = int(rng.integers(1, 4))
        m1, m2, m12 = s1 + s12, s2 + s12, s1 + s2 + s12
        k = int(rng.integers(0, min(m1, m2)))
        net = realize_two_dest(s1, s2, s12, rng)
        bound = secure_outer_bound(mincut_profile(net), k)
        got = set()
        for corner in ("alpha0", "alpha1"):
            res = two_dest_scheme(net, k, corner, rng)
            if verify(res.code, net, k).ok:
                got.add(res.achieved)
        want = two_dest_corners(m1, m2, m12, k)
        if got != want or not all(bound.on_boundary(p) for p in got):
            misses.append((m1, m2, m12, k))
    report(6, "two-destination corner points", not misses, f"profiles=25 misses={misses}")


def _class_members(a, b, c, t, perm):
    first = set(range(1, a + c + 1))
    second = set(range(a + 1, a + b + c + 1))
    relabel = {i + 1: int(perm[i]) + 1 for i in range(t)}
    return {relabel[i] for i in first}, {relabel[i] for i in second}


def test_two_destination_combination_capacity(report):
    rng = np.random.default_rng(5)
    checked, bad = 0, []
    for t in range(1, 8):
        for a in range(t + 1):
            for b in range(t + 1 - a):
                for c in range(t + 1 - a - b):
                    if a + c == 0 or b + c == 0:
                        continue
                    for perm in (np.arange(t), rng.permutation(t)):
                        cnet = CombinationNetwork(t, _class_members(a, b, c, t, perm))
                        for k in range(t + 1):
                            checked += 1
                            same = combination_region(cnet, k, rng=rng).region.equals(cnet.outer_bound(k))
                            lhs, rhs = two_dest_dimension_identity(cnet, k)
                            if not same or lhs != rhs:
                                bad.append((t, a, b, c, k))
    report(7, "two-destination combination capacity", not bad, f"instances={checked} mismatches={bad[:5]}")


def test_many_destination_combination_bound(report):
    rng = np.random.default_rng(11)
    total = equal = outside = 0
    for _ in range(120):
        m = int(rng.choice([3, 4]))
        t = int(rng.integers(3, 9))
        members = []
        for _ in range(m):
            size = int(rng.integers(1, t + 1))
            members.append({int(x) + 1 for x in rng.choice(t, size=size, replace=False)})
        cnet = CombinationNetwork(t, tuple(members))
        k = int(rng.integers(0, t))
        reg = combination_region(cnet, k, rng=rng).region
        bound = cnet.outer_bound(k)
        total += 1
        outside += not reg.is_subset_of(bound)
        equal += reg.equals(bound)
    report(8, "many-destination combination bound", outside == 0 and total >= 100,
           f"networks={total} outside={outside} equal={equal}/{total} ({100 * equal / total:.0f}%)")


def test_two_phase_exact_and_contained(report):
    details, ok = [], True
    for name in ("direct_edge", "tree_plus_paths"):
        net = gallery.GALLERY[name]()
        prof = mincut_profile(net)
        target = (2, 1)
        sched = two_phase_scheme(net, 1, target, np.random.default_rng(0))
        expected = tuple((1 - F(1, sched.M)) * F(r) for r in target)
        rounds_ok = all(verify(c, sched.expanded, sched.T, key_side_info=True).ok for c in sched.message_rounds)
        rounds_ok &= all(check_secrecy(c, net, 1).secure for c in sched.key_rounds)
        smallest = min(prof[{1}], prof[{2}])
        inside = two_phase_region(unsecure_region(prof), 1, smallest).is_subset_of(secure_outer_bound(prof, 1))
        ok &= sched.achieved == expected and rounds_ok and inside
        details.append(f"{name}={tuple(str(x) for x in sched.achieved)}")
    report(9, "two-phase exactness and containment", ok, " ".join(details))


def test_search_triptych(report):
    start = time.perf_counter()
    relay = gallery.key_relay()
    first = search_no_code(relay, (0, 1), 1, q=3, r_max=1)
    first_ok = first.found and verify(first.code, relay, 1, with_oracle=True).oracle is True
    rev = gallery.key_relay_reversed()
    second = search_no_code(rev, (1, 0), 1, q=3, r_max=2)
    second_ok = second.verdict == "Found" and verify(second.code, rev, 1).ok
    third_ok = all(search_no_code(gallery.two_source_merge(), (1, 0), 1, q=q, r_max=2).verdict == "NoCodeExists"
                   for q in (2, 3, 5))
    elapsed = time.perf_counter() - start
    report(10, "non-reversibility search", first_ok and second_ok and third_ok and elapsed < 60,
           f"relay={first.verdict} reversed={second.verdict} merge_no_code={third_ok} time={elapsed:.1f}s")


def test_butterfly_ratios(report):
    ones = [1] * 7
    got = {}
    for variant in ("bf1", "single_source", "single_dest", "bf2"):
        uns, sec = butterfly_regions(ones, variant)
        got[variant] = (uns.symmetric_rate(), None if sec is None else sec.symmetric_rate())
    ok = (got["single_source"] == (F(3, 2), 1) and got["single_dest"][1] == F(1, 2)
          and got["bf2"][1] == F(1, 2) and got["bf1"][1] is None)
    losses = {v: 1 - (s or 0) / u for v, (u, s) in got.items()}
    ok &= losses["single_source"] == F(1, 3) and losses["bf1"] == 1
    ok &= all(losses[v] == 1 - F(1, 2) / got[v][0] for v in ("single_dest", "bf2"))
    report(11, "butterfly secure/unsecure ratios", ok,
           " ".join(f"{v}={str(u)}/{s if s is None else str(s)}" for v, (u, s) in got.items()))


def test_erasure_regions(report):
    ok, notes = True, []
    for variant in erasure.VARIANTS:
        p = erasure.REFERENCE_PARAMS[variant]
        blind = p.with_blind_eavesdropper()
        b = erasure.time_sharing_bounds(variant, blind)
        reg = erasure.region(variant, blind, 21)
        collapse = reg.points[-1].r1 == min(b["R1"], b["R1+R2"]) and all(
            pt.r2 == min(b["R2"], b["R1+R2"] - pt.r1) for pt in reg.points)
        steps = 1000
        reg = erasure.region(variant, p, 21)
        r2s = [pt.r2 for pt in reg.points]
        monotone = all(x >= y for x, y in zip(r2s, r2s[1:]))
        hi = float(max(r2s)) * 1.5 + 1e-6
        worst = 0.0
        for pt in reg.points:
            g = erasure_grid_max_r2(variant, p.delta, p.delta_e, p.d0, float(pt.r1), steps=steps, hi=hi)
            worst = max(worst, float("inf") if g is None else abs(g - float(pt.r2)))
        within = worst <= hi / steps + 1e-12
        ok &= collapse and monotone and within
        notes.append(f"{variant}:collapse={collapse},monotone={monotone},gap={worst:.1e}")
    report(12, "erasure linear programs", ok, " ".join(notes))
