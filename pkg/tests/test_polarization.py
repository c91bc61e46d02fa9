import itertools
import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarlouvain.errors import (
    ContractViolation,
    DegenerateDialogueError,
    DegeneratePolarizationError,
    MembershipError,
    UndefinedScoreError,
)
from polarlouvain.operators import GROUPINGS, OVERLAPS, OperatorConfig
from polarlouvain.partition import Partition
from polarlouvain.polarization import (
    MIXED,
    MembershipProfile,
    PairwiseCapacityMatrix,
    build_dialogue_matrix,
    build_risk_matrix,
    convex_combine,
    dialogue_measure,
    jdj_pol,
    load_membership,
    mu_value,
    pair_risk,
    partition_cohesion,
    risk_measure,
    write_membership,
)

from helpers import (
    EIGHT_DIALOGUE_PATTERN,
    EIGHT_RISK_PATTERN,
    FOUR_DIALOGUE_TABLE,
    FOUR_RISK_TABLE,
    SEVEN_PRINTED,
    SEVEN_PRINTED_TOTAL,
    all_subsets,
    eight_profile,
    four_profile,
    load_schema,
    seven_profile,
)

MAX_PRODUCT = OperatorConfig("max", "product")
ALL_CONFIGS = [OperatorConfig(g, o) for g, o in itertools.product(sorted(GROUPINGS), sorted(OVERLAPS))]


@st.composite
def profiles(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    unit = st.floats(0.0, 1.0, allow_nan=False)
    a = draw(st.lists(unit, min_size=n, max_size=n))
    b = draw(st.lists(unit, min_size=n, max_size=n))
    return MembershipProfile(np.array(a), np.array(b))


# -- pair risk and total risk -----------------------------------------------------


def test_opposite_crisp_pair_has_full_risk():
    prof = MembershipProfile([1.0, 0.0], [0.0, 1.0])
    assert pair_risk(0, 1, prof, MAX_PRODUCT) == 1.0


def test_same_pole_crisp_pair_has_no_risk():
    prof = MembershipProfile([1.0, 1.0], [0.0, 0.0])
    assert pair_risk(0, 1, prof, MAX_PRODUCT) == 0.0


def test_seven_node_pair_one_five():
    prof = seven_profile()
    assert pair_risk(0, 4, prof, MAX_PRODUCT) == pytest.approx(0.021758, abs=1e-12)
    assert 1 - pair_risk(0, 4, prof, MAX_PRODUCT) == pytest.approx(0.978, abs=5e-4)


def test_pair_risk_rejects_equal_nodes():
    with pytest.raises(ContractViolation):
        pair_risk(1, 1, four_profile(), MAX_PRODUCT)


def test_total_risk_of_four_crisp_nodes():
    assert jdj_pol(range(4), four_profile(), MAX_PRODUCT) == 4.0
    assert jdj_pol([2], four_profile(), MAX_PRODUCT) == 0.0


def test_total_risk_of_seven_nodes():
    # Independently: sum over unordered pairs of max(a_i*b_j, a_j*b_i).
    prof = seven_profile()
    oracle = math.fsum(
        max(prof.eta_a[i] * prof.eta_b[j], prof.eta_a[j] * prof.eta_b[i])
        for i, j in itertools.combinations(range(7), 2)
    )
    assert oracle == pytest.approx(9.712843, abs=1e-6)
    assert jdj_pol(range(7), prof, MAX_PRODUCT) == pytest.approx(oracle, abs=1e-12)
    # The dialogue counterpart carries half of the printed ordered normalizer.
    dialogue_total = 21 - oracle
    assert dialogue_total == pytest.approx(SEVEN_PRINTED_TOTAL / 2, abs=0.003)


# -- risk and dialogue matrices -----------------------------------------------------


def subset_value(m, labels):
    return mu_value(m, [x - 1 for x in labels])


def test_four_node_risk_measure_table():
    m = risk_measure(four_profile(), MAX_PRODUCT)
    for subset, expected in FOUR_RISK_TABLE.items():
        assert subset_value(m, subset) == expected


def test_four_node_dialogue_measure_table():
    m = dialogue_measure(four_profile(), MAX_PRODUCT)
    for subset, expected in FOUR_DIALOGUE_TABLE.items():
        assert subset_value(m, subset) == expected


def test_eight_node_risk_matrix_pattern():
    p = build_risk_matrix(eight_profile(), MAX_PRODUCT)
    np.testing.assert_array_equal(p.entries, EIGHT_RISK_PATTERN / 32)
    assert p.normalizer == 32


def test_eight_node_dialogue_matrix_pattern():
    p = build_dialogue_matrix(eight_profile(), MAX_PRODUCT)
    np.testing.assert_array_equal(p.entries, EIGHT_DIALOGUE_PATTERN / 24)
    assert p.normalizer == 24


def test_seven_node_dialogue_matrix_matches_printed_entries():
    p = build_dialogue_matrix(seven_profile(), MAX_PRODUCT)
    assert p.normalizer == pytest.approx(SEVEN_PRINTED_TOTAL, abs=0.005)
    np.testing.assert_allclose(p.entries * p.normalizer, SEVEN_PRINTED, atol=1e-3)


def test_single_pole_population_is_degenerate():
    prof = MembershipProfile([1.0] * 5, [0.0] * 5)
    with pytest.raises(DegeneratePolarizationError):
        build_risk_matrix(prof, MAX_PRODUCT)


def test_fully_conflicting_pair_has_no_dialogue():
    with pytest.raises(DegenerateDialogueError):
        build_dialogue_matrix(MembershipProfile([1.0, 0.0], [0.0, 1.0]), MAX_PRODUCT)


def test_matrix_contract_checks():
    with pytest.raises(ContractViolation):
        PairwiseCapacityMatrix(np.array([[0.0, 0.6], [0.4, 0.0]]), "risk")
    with pytest.raises(ContractViolation):
        PairwiseCapacityMatrix(np.array([[0.0, 0.25], [0.25, 0.0]]), "risk")
    with pytest.raises(ContractViolation):
        PairwiseCapacityMatrix(np.array([[0.5, 0.0], [0.0, 0.5]]), "risk")


def test_measure_values_on_named_subsets():
    risk = risk_measure(four_profile(), MAX_PRODUCT)
    dialogue = dialogue_measure(four_profile(), MAX_PRODUCT)
    assert subset_value(risk, (1, 2, 4)) == 0.5
    assert subset_value(dialogue, (2, 3, 4)) == 0.5
    assert mu_value(risk, []) == 0.0
    assert risk(frozenset({0, 1})) == 0.25


@settings(max_examples=60, deadline=None)
@given(profiles(), st.sampled_from(ALL_CONFIGS), st.data())
def test_monotone_in_the_subset(prof, cfg, data):
    n = prof.n
    small = data.draw(st.sets(st.integers(0, n - 1)))
    big = small | data.draw(st.sets(st.integers(0, n - 1)))
    assert jdj_pol(small, prof, cfg) <= jdj_pol(big, prof, cfg) + 1e-12
    try:
        m = dialogue_measure(prof, cfg)
    except DegenerateDialogueError:
        return
    assert mu_value(m, small) <= mu_value(m, big) + 1e-12


@settings(max_examples=40, deadline=None)
@given(profiles(2, 8), st.sampled_from(ALL_CONFIGS))
def test_measure_equals_pair_sum_on_every_subset(prof, cfg):
    try:
        m = dialogue_measure(prof, cfg)
    except DegenerateDialogueError:
        return
    p = m.matrix.entries
    for s in all_subsets(prof.n):
        oracle = sum(p[i, j] for i in s for j in s)
        assert abs(mu_value(m, s) - oracle) <= 1e-12


def test_measure_equals_pair_sum_on_sampled_subsets_of_larger_sets():
    rng = np.random.default_rng(7)
    prof = MembershipProfile(rng.random(40), rng.random(40))
    m = dialogue_measure(prof, MAX_PRODUCT)
    p = m.matrix.entries
    for _ in range(200):
        s = np.flatnonzero(rng.random(40) < 0.4)
        assert abs(mu_value(m, s) - sum(p[i, j] for i in s for j in s)) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(profiles(), st.sampled_from(ALL_CONFIGS))
def test_built_matrices_are_normalized_and_symmetric(prof, cfg):
    for build in (build_risk_matrix, build_dialogue_matrix):
        try:
            p = build(prof, cfg)
        except (DegeneratePolarizationError, DegenerateDialogueError):
            continue
        assert abs(math.fsum(p.entries.ravel()) - 1.0) <= 1e-12
        assert np.array_equal(p.entries, p.entries.T)
        assert np.all(np.diag(p.entries) == 0)


@settings(max_examples=80, deadline=None)
@given(profiles(), st.sampled_from(ALL_CONFIGS))
def test_swapping_the_poles_changes_nothing(prof, cfg):
    other = prof.swapped()
    n = prof.n
    for i, j in itertools.permutations(range(n), 2):
        assert pair_risk(i, j, prof, cfg) == pair_risk(i, j, other, cfg)
    assert jdj_pol(range(n), prof, cfg) == jdj_pol(range(n), other, cfg)
    for build in (build_risk_matrix, build_dialogue_matrix):
        try:
            p = build(prof, cfg)
        except (DegeneratePolarizationError, DegenerateDialogueError):
            continue
        np.testing.assert_array_equal(p.entries, build(other, cfg).entries)


# -- convex combinations ---------------------------------------------------------------


def test_combination_with_unit_weight_keeps_first_measure():
    risk = risk_measure(four_profile(), MAX_PRODUCT)
    dialogue = dialogue_measure(four_profile(), MAX_PRODUCT)
    same = convex_combine([risk, dialogue], [1.0, 0.0])
    np.testing.assert_array_equal(same.matrix.entries, risk.matrix.entries)


def test_even_combination_of_risk_and_dialogue():
    risk = risk_measure(four_profile(), MAX_PRODUCT)
    dialogue = dialogue_measure(four_profile(), MAX_PRODUCT)
    mixed = convex_combine([risk, dialogue], [0.5, 0.5])
    assert mu_value(mixed, [0, 2]) == 0.25
    assert mixed.kind == MIXED


def test_combination_rejects_bad_weights():
    risk = risk_measure(four_profile(), MAX_PRODUCT)
    with pytest.raises(ContractViolation):
        convex_combine([risk, risk], [0.7, 0.7])
    with pytest.raises(ContractViolation):
        convex_combine([risk, risk], [1.5, -0.5])


def test_combination_identity_on_random_probes():
    rng = np.random.default_rng(11)
    measures = []
    for _ in range(3):
        measures.append(dialogue_measure(MembershipProfile(rng.random(12), rng.random(12)), MAX_PRODUCT))
    w = rng.dirichlet(np.ones(3))
    w[-1] = 1.0 - w[:-1].sum()
    combined = convex_combine(measures, w)
    for _ in range(100):
        s = np.flatnonzero(rng.random(12) < 0.5)
        assert abs(combined(s) - sum(wk * m(s) for wk, m in zip(w, measures))) <= 1e-12


# -- cohesion score -----------------------------------------------------------------------


def test_identical_crisp_community_scores_zero():
    prof = MembershipProfile([1.0] * 4, [0.0] * 4)
    report = partition_cohesion(Partition.from_assignment([0] * 4), prof, MAX_PRODUCT, "all-pairs")
    assert report.pol == 0.0
    assert report.communities[0].normalized == 0.0


def test_zero_risk_community_is_flagged_in_positive_pairs_mode():
    prof = MembershipProfile([1.0] * 4, [0.0] * 4)
    report = partition_cohesion(Partition.from_assignment([0] * 4), prof, MAX_PRODUCT)
    assert report.communities[0].flagged
    assert report.pol == 0.0


def test_half_and_half_community_scores_one():
    report = partition_cohesion(Partition.from_assignment([0] * 4), four_profile(), MAX_PRODUCT)
    c = report.communities[0]
    assert (c.jdj, c.pairs, c.normalized) == (4.0, 4, 1.0)
    assert report.pol == 1.0
    assert report.pol_by_mode["all-pairs"] == pytest.approx(4 / 6)


def test_all_singletons_is_undefined():
    with pytest.raises(UndefinedScoreError):
        partition_cohesion(Partition.singletons(4), four_profile(), MAX_PRODUCT)


def test_size_weighted_mean_skips_singletons():
    # Community {1,2} has one risky pair (score 1); {3,4,5} holds no risk.
    prof = MembershipProfile([1, 0, 1, 1, 1], [0, 1, 0, 0, 0])
    report = partition_cohesion(Partition.from_assignment([0, 0, 1, 1, 1]), prof, MAX_PRODUCT, "all-pairs")
    assert report.jdj_vector() == [1.0, 0.0]
    assert report.pol == pytest.approx(2 / 5)
    with_single = partition_cohesion(Partition.from_assignment([0, 0, 1, 1, 2]), prof, MAX_PRODUCT, "all-pairs")
    assert [c.size for c in with_single.communities] == [2, 2]
    assert with_single.pol == pytest.approx(0.5)


def test_report_serialization_validates():
    report = partition_cohesion(Partition.from_assignment([0, 0, 1, 1]), four_profile(), MAX_PRODUCT)
    doc = json.loads(json.dumps(report.to_dict()))
    jsonschema.validate(doc, load_schema("cohesion"))
    assert set(doc) >= {"mode", "communities", "pol"}


# -- membership files ------------------------------------------------------------------------


def test_membership_roundtrip_and_reordering(tmp_path):
    prof = MembershipProfile([0.1, 0.9, 0.5], [0.8, 0.2, 0.5], ("x", "y", "z"))
    path = tmp_path / "m.csv"
    write_membership(prof, path)
    back = load_membership(path, ["z", "x", "y"])
    np.testing.assert_array_equal(back.eta_a, [0.5, 0.1, 0.9])
    assert back.node_ids == ("z", "x", "y")


def test_membership_mismatch_lists_offenders(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("node,eta_a,eta_b\na,1,0\nb,0,1\nq,0,1\n")
    with pytest.raises(MembershipError, match="missing membership for node\\(s\\): c") as info:
        load_membership(path, ["a", "b", "c"])
    assert info.value.missing == ("c",)
    assert info.value.extra == ("q",)


@pytest.mark.parametrize("text", [
    "id,a,b\n1,0,1\n",
    "node,eta_a,eta_b\n1,0,1.5\n",
    "node,eta_a,eta_b\n1,0,1\n1,1,0\n",
    "node,eta_a,eta_b\n1,zero,1\n",
])
def test_membership_rejects_bad_files(tmp_path, text):
    path = tmp_path / "m.csv"
    path.write_text(text)
    with pytest.raises(MembershipError):
        load_membership(path)
