from fractions import Fraction
from random import Random

import pytest

from toricgit.errors import FacetMismatch
from toricgit.klyachko import (
    FiltrationSheaf,
    Subspace,
    direct_sum,
    line_bundle,
    structure_sheaf,
    subsheaf,
)
from toricgit.polytope import HPolytope
from toricgit.stability import (
    SEMISTABLE,
    STABLE,
    UNSTABLE,
    candidate_subspaces,
    check_stability,
    max_line_slope,
    slope,
)

from util import random_sheaf, random_subspace

P2_O1 = HPolytope(2, [((1, 0), 0), ((0, 1), 0), ((-1, -1), 1)])
SEGMENT = HPolytope(1, [((1,), 1), ((-1,), 1)])

L1 = Subspace.span(2, [(1, 0)])
L2 = Subspace.span(2, [(0, 1)])
L3 = Subspace.span(2, [(1, 1)])
E2 = Subspace.full(2)
TANGENT = FiltrationSheaf(2, (((-1, L1), (0, E2)),
                              ((-1, L2), (0, E2)),
                              ((-1, L3), (0, E2))))


def test_slope_structure_sheaf_zero():
    assert slope(structure_sheaf(3), P2_O1) == 0


def test_slope_tangent_shape():
    assert slope(TANGENT, P2_O1) == Fraction(3, 2)


def test_slope_rank_one_is_minus_degree():
    # O(-D) has slope -deg(D)
    om_d = line_bundle(3, {0: -2, 2: -1})   # D = 2 D_0 + D_2
    assert slope(om_d, P2_O1) == -3


def test_slope_facet_mismatch():
    with pytest.raises(FacetMismatch):
        slope(structure_sheaf(2), P2_O1)


def test_candidates_rank_one_empty():
    fam = candidate_subspaces(structure_sheaf(3))
    assert fam.subspaces == () and fam.reached_fixpoint


def test_candidates_three_lines():
    fam = candidate_subspaces(TANGENT)
    assert set(fam.subspaces) == {L1, L2, L3}
    assert fam.reached_fixpoint


def test_candidates_full_jump_empty():
    # both summands jump at the same index: the only jump subspace is E
    s = direct_sum(line_bundle(2, {0: 1}), line_bundle(2, {0: 1}))
    assert candidate_subspaces(s).subspaces == ()


def test_tangent_shape_stable_certified():
    verdict = check_stability(TANGENT, P2_O1)
    assert verdict.status == STABLE
    assert verdict.certainty == "Certified"
    assert verdict.slope == Fraction(3, 2)
    # best candidate line slope is 1 < 3/2
    assert verdict.slope_table[0][1] == 1


def test_line_max_profile_value():
    val, witness, fixpoint = max_line_slope(TANGENT, P2_O1)
    assert val == 1 and witness.dim == 1 and fixpoint
    assert slope(subsheaf(TANGENT, witness), P2_O1) == 1


def test_split_unstable_witness_is_bigger_summand():
    oa = line_bundle(2, {0: 3})   # slope 3 on the segment
    ob = line_bundle(2, {0: 1})   # slope 1
    verdict = check_stability(direct_sum(oa, ob), SEGMENT)
    assert verdict.status == UNSTABLE
    assert verdict.witness == Subspace.span(2, [(1, 0)])
    assert verdict.witness_slope == 3
    assert verdict.slope == 2


def test_split_verdicts_match_degree_sign():
    for a, b in [(2, -1), (0, 0), (-3, -3), (1, 2)]:
        s = direct_sum(line_bundle(2, {0: a}), line_bundle(2, {0: b}))
        verdict = check_stability(s, SEGMENT)
        if a == b:
            assert verdict.status == SEMISTABLE
        else:
            assert verdict.status == UNSTABLE
        assert verdict.certainty == "Certified"


def test_polystable_not_stable():
    s = direct_sum(line_bundle(2, {0: 2}), line_bundle(2, {0: 2}))
    verdict = check_stability(s, SEGMENT)
    assert verdict.status == SEMISTABLE
    assert verdict.certainty == "Certified"


def test_rank_one_always_stable():
    verdict = check_stability(line_bundle(3, {1: 7}), P2_O1)
    assert (verdict.status, verdict.certainty) == (STABLE, "Certified")


def test_verdict_invariant_under_dilation():
    rng = Random(50)
    for _ in range(10):
        s = random_sheaf(rng, 2, 3)
        v1 = check_stability(s, P2_O1)
        v2 = check_stability(s, P2_O1.dilate(3))
        assert v1.status == v2.status
        assert v2.slope == 3 * v1.slope  # k^{n-1} scaling


def test_slope_gap_invariant_under_jump_shift():
    # shifting all jumps at one facet by delta shifts every slope alike
    rng = Random(51)
    for _ in range(10):
        s = random_sheaf(rng, 2, 3)
        delta = rng.randint(-2, 2)
        shifted = FiltrationSheaf(
            s.rank,
            (tuple((i + delta, v) for i, v in s.filtrations[0]),) + s.filtrations[1:])
        w = random_subspace(rng, 2, 1)
        gap = slope(s, P2_O1) - slope(subsheaf(s, w), P2_O1)
        gap_shifted = slope(shifted, P2_O1) - slope(subsheaf(shifted, w), P2_O1)
        assert gap == gap_shifted
        assert check_stability(s, P2_O1).status == check_stability(shifted, P2_O1).status


def test_line_profile_max_dominates_random_lines():
    rng = Random(52)
    for _ in range(25):
        s = random_sheaf(rng, 2, 3)
        best, _, _ = max_line_slope(s, P2_O1)
        for _ in range(100):
            line = random_subspace(rng, 2, 1)
            assert slope(subsheaf(s, line), P2_O1) <= best


def test_unstable_witness_verifies_exactly():
    rng = Random(53)
    for _ in range(20):
        s = random_sheaf(rng, rng.randint(2, 3), 3)
        verdict = check_stability(s, P2_O1, cap=400, random_trials=100)
        if verdict.status == UNSTABLE:
            assert slope(subsheaf(s, verdict.witness), P2_O1) == verdict.witness_slope
            assert verdict.witness_slope > verdict.slope


def test_cap_exceeded_downgrades_to_heuristic():
    # generic planes in rank 3 can spin up a meet/join closure past any cap
    rng = Random(54)
    square = HPolytope(2, [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])
    while True:
        s = random_sheaf(rng, 3, 4)
        verdict = check_stability(s, square, cap=40, random_trials=20)
        if verdict.cap_exceeded:
            assert verdict.certainty == "Heuristic"
            break


def test_verdict_serialization():
    verdict = check_stability(TANGENT, P2_O1)
    data = verdict.to_json_dict()
    assert data["status"] == "Stable" and data["ground_field"] == "QQ"
    assert data["slope"] == "3/2"
    assert isinstance(data["seed"], int)
