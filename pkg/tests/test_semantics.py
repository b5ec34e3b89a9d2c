from __future__ import annotations

import dataclasses
from itertools import combinations

import numpy as np
import pytest

from helpers import build_scholarship, build_two_numeric

from udet.errors import ContradictoryPremises, InfeasibleConstraints
from udet.model import (
    LOWER_BETTER,
    BoundConstraint,
    CriterionSpec,
    Fact,
    PinConstraint,
    PreferencePremise,
    validate,
)
from udet.semantics import (
    EPS_SCORE,
    EXACT_THRESHOLD,
    GRID,
    SINGLETON,
    admissible_set,
    compatible_answers,
    default_grid_subdivisions,
    entails_preference,
    exact_thresholds,
    normalize,
    score,
    ties_everywhere,
    winner_statistics,
    winners_at,
)
from udet.trilemma import GeneratorConfig, generate_instance


def alpha_criterion(alpha: float, attrs=("gpa", "need"), name="alpha") -> CriterionSpec:
    return CriterionSpec(name, ((attrs[0], alpha), (attrs[1], 1.0 - alpha)))


# --- normalization ----------------------------------------------------------

def test_normalize_scholarship_values():
    m = normalize(build_scholarship())
    assert m.entry("A", "gpa") == 1.0
    assert m.entry("B", "gpa") == 0.0
    assert m.entry("A", "need") == 0.0
    assert m.entry("B", "need") == 1.0


def test_normalize_tie_gives_half():
    inst = build_scholarship(facts=(
        Fact("A", "gpa", 9.0), Fact("A", "need", "moderate"),
        Fact("B", "gpa", 9.0), Fact("B", "need", "severe")))
    m = normalize(inst)
    assert m.entry("A", "gpa") == 0.5
    assert m.entry("B", "gpa") == 0.5


def test_normalize_lower_better_flips():
    inst = build_two_numeric("flip", {"A": (1.0, 5.0), "B": (3.0, 5.0)})
    attrs = (dataclasses.replace(inst.attributes[0], direction=LOWER_BETTER),
             inst.attributes[1])
    inst = dataclasses.replace(inst, attributes=attrs)
    m = normalize(inst)
    assert m.entry("A", "x") == 1.0  # cheapest wins a lower_better attribute
    assert m.entry("B", "x") == 0.0


def test_normalize_ordinal_uses_present_values_only():
    # levels low < moderate < severe; only moderate/severe present
    m = normalize(build_scholarship())
    assert m.entry("A", "need") == 0.0
    assert m.entry("B", "need") == 1.0


def test_normalized_matrix_is_tight():
    for index in range(40):
        inst = generate_instance(GeneratorConfig(seed=3), index)
        values = normalize(inst).values
        assert np.all(values >= 0.0) and np.all(values <= 1.0)
        for j in range(values.shape[1]):
            col = values[:, j]
            if np.all(col == 0.5):
                continue
            assert col.min() == 0.0 and col.max() == 1.0


# --- scoring and winners ----------------------------------------------------

def test_score_merit_and_need():
    inst = build_scholarship()
    m = normalize(inst)
    merit, need = inst.criteria
    assert score(m, merit, "A") == 1.0
    assert score(m, merit, "B") == 0.0
    assert score(m, need, "A") == 0.0
    assert score(m, need, "B") == 1.0


def test_score_half_alpha_ties():
    # algebraic oracle: alpha*1 == (1-alpha)*1 exactly at alpha = 0.5
    m = normalize(build_scholarship())
    theta = alpha_criterion(0.5)
    assert score(m, theta, "A") == score(m, theta, "B") == 0.5
    # confirm by sweeping the grid on both sides of the crossing
    for alpha in np.linspace(0.0, 1.0, 21):
        sa = score(m, alpha_criterion(float(alpha)), "A")
        sb = score(m, alpha_criterion(float(alpha)), "B")
        assert (sa > sb) == (alpha > 0.5)
        assert (sa < sb) == (alpha < 0.5)


def test_winners_at_examples():
    inst = build_scholarship()
    m = normalize(inst)
    merit, need = inst.criteria
    assert winners_at(m, merit).winners == ("A",)
    assert winners_at(m, need).winners == ("B",)
    assert winners_at(m, alpha_criterion(0.5)).winners == ("A", "B")
    assert winners_at(m, alpha_criterion(0.5)).unique is None


# --- admissible sets --------------------------------------------------------

def test_admissible_unconstrained_two_attrs_is_exact():
    adm = admissible_set(build_scholarship())
    assert adm.kind == EXACT_THRESHOLD
    assert adm.alpha_interval == (0.0, 1.0)


def test_admissible_pin_is_singleton():
    inst = build_scholarship(constraints=(PinConstraint("merit_first"),))
    adm = admissible_set(inst)
    assert adm.kind == SINGLETON
    assert np.array_equal(adm.vectors, np.array([[1.0, 0.0]]))


def test_admissible_grid_counts():
    # compositions of 10 into 3 parts: C(12, 2) = 66, verified by enumeration
    inst = build_two_numeric("three", {"A": (1, 2), "B": (2, 1), "C": (0, 0)})
    attrs = inst.attributes + (dataclasses.replace(inst.attributes[0], name="z"),)
    facts = inst.facts + tuple(Fact(c, "z", float(i)) for i, c in enumerate("ABC"))
    inst = dataclasses.replace(inst, attributes=attrs, facts=facts)
    adm = admissible_set(inst, grid_G=10)
    assert adm.kind == GRID
    assert adm.size == 66
    brute = [(i, j, 10 - i - j) for i in range(11) for j in range(11 - i)]
    assert adm.size == len(brute)
    assert np.allclose(adm.vectors.sum(axis=1), 1.0)
    assert np.all(adm.vectors >= 0.0)


def test_admissible_bounds_filter_grid():
    inst = build_two_numeric("b", {"A": (1, 2), "B": (2, 1)})
    adm = admissible_set(inst, grid_G=10, mode="grid")
    assert adm.size == 11
    bounded = dataclasses.replace(
        inst, constraints=(BoundConstraint("x", ">=", 0.7),))
    adm = admissible_set(bounded, grid_G=10, mode="grid")
    assert adm.size == 4  # x weight in {0.7, 0.8, 0.9, 1.0}
    assert np.all(adm.vectors[:, 0] >= 0.7 - 1e-9)


def test_admissible_exact_interval_with_bounds():
    inst = build_scholarship(constraints=(BoundConstraint("gpa", ">=", 0.7),))
    adm = admissible_set(inst)
    assert adm.kind == EXACT_THRESHOLD
    assert adm.alpha_interval == (0.7, 1.0)
    # a bound on the second attribute translates to an alpha bound, flipped
    inst = build_scholarship(constraints=(BoundConstraint("need", ">=", 0.6),))
    assert admissible_set(inst).alpha_interval == (0.0, pytest.approx(0.4))


def test_admissible_infeasible_raises():
    inst = build_scholarship(constraints=(
        BoundConstraint("gpa", ">=", 0.7), BoundConstraint("need", ">=", 0.7)))
    with pytest.raises(InfeasibleConstraints):
        admissible_set(inst)
    three = build_two_numeric("t", {"A": (1, 2), "B": (2, 1)})
    attrs = three.attributes + (dataclasses.replace(three.attributes[0], name="z"),)
    facts = three.facts + (Fact("A", "z", 0.0), Fact("B", "z", 1.0))
    three = dataclasses.replace(three, attributes=attrs, facts=facts,
                                constraints=(BoundConstraint("x", ">=", 0.8),
                                             BoundConstraint("y", ">=", 0.8)))
    with pytest.raises(InfeasibleConstraints):
        admissible_set(three, grid_G=20)


def test_pinned_vector_must_satisfy_bounds():
    inst = build_scholarship(constraints=(
        PinConstraint("merit_first"), BoundConstraint("gpa", "<=", 0.5)))
    with pytest.raises(InfeasibleConstraints):
        admissible_set(inst)


def test_single_attribute_grid_is_one_point():
    inst = build_two_numeric("one", {"A": (1, 0), "B": (2, 0)})
    inst = dataclasses.replace(inst, attributes=inst.attributes[:1],
                               facts=tuple(f for f in inst.facts if f.attribute == "x"))
    adm = admissible_set(inst)
    assert adm.kind == GRID
    assert adm.size == 1
    assert adm.vectors[0, 0] == 1.0


def test_default_grid_subdivisions_formula():
    from math import comb
    for k in (2, 3, 4, 5, 6):
        g = default_grid_subdivisions(k)
        assert comb(g + k - 1, k - 1) <= 100_000
        assert comb(g + k, k - 1) > 100_000
    assert default_grid_subdivisions(1) == 1


# --- compatible answers -----------------------------------------------------

def test_scholarship_compatible_and_underdetermined(scholarship):
    adm = admissible_set(scholarship)
    sem = compatible_answers(scholarship, adm)
    assert sem.compatible == ("A", "B")
    assert sem.underdetermined is True
    assert sem.entailed is None
    assert sem.preference_closure == ()


def test_pinned_scholarship_entails_winner():
    inst = build_scholarship(constraints=(PinConstraint("merit_first"),))
    sem = compatible_answers(inst, admissible_set(inst))
    assert sem.compatible == ("A",)
    assert sem.underdetermined is False
    assert sem.entailed == "A"


def test_dominance_excludes_dominated():
    # A weakly dominates B everywhere and strictly on x
    inst = build_two_numeric("dom", {"A": (9.5, 5.0), "B": (8.7, 5.0)})
    adm = admissible_set(inst)
    sem = compatible_answers(inst, adm)
    assert sem.compatible == ("A",)
    assert sem.entailed == "A"
    # brute-force oracle over a dense alpha grid: B is never a unique winner
    m = normalize(inst)
    for alpha in np.linspace(0, 1, 2001):
        sa = alpha * m.entry("A", "x") + (1 - alpha) * m.entry("A", "y")
        sb = alpha * m.entry("B", "x") + (1 - alpha) * m.entry("B", "y")
        assert not (sb > sa + EPS_SCORE)


def test_all_tie_instance_uses_weak_fallback():
    inst = build_two_numeric("tie", {"A": (5.0, 5.0), "B": (5.0, 5.0)})
    sem = compatible_answers(inst, admissible_set(inst))
    assert sem.compatible == ("A", "B")
    assert sem.underdetermined is True


def test_preference_filtering_and_closure():
    inst = build_two_numeric(
        "chain", {"A": (10.0, 0.0), "B": (5.0, 5.0), "C": (0.0, 10.0)},
        preferences=(PreferencePremise("A", "B"), PreferencePremise("B", "C")))
    assert validate(inst) == []
    adm = admissible_set(inst)
    sem = compatible_answers(inst, adm)
    assert sem.compatible == ("A",)
    assert sem.entailed == "A"
    assert ("A", "C") in sem.preference_closure  # transitive edge
    assert entails_preference(inst, adm, "A", "C") is True
    assert entails_preference(inst, adm, "C", "A") is False


def test_entails_preference_examples(scholarship):
    adm = admissible_set(scholarship)
    assert entails_preference(scholarship, adm, "A", "B") is False
    assert entails_preference(scholarship, adm, "B", "A") is False
    pinned = build_scholarship(constraints=(PinConstraint("merit_first"),))
    assert entails_preference(pinned, admissible_set(pinned), "A", "B") is True
    with pytest.raises(ValueError):
        entails_preference(scholarship, adm, "A", "A")


def test_contradictory_premises_direct_conflict():
    inst = build_two_numeric("clash", {"A": (10.0, 10.0), "B": (0.0, 0.0)},
                             preferences=(PreferencePremise("B", "A"),))
    with pytest.raises(ContradictoryPremises):
        compatible_answers(inst, admissible_set(inst))


def test_contradictory_premises_empty_filter():
    # A weakly dominates B (tie on y), so only A is achievable; preferring B
    # empties the compatible set without a direct unanimity conflict.
    inst = build_two_numeric("empty", {"A": (9.5, 5.0), "B": (8.7, 5.0)},
                             preferences=(PreferencePremise("B", "A"),))
    with pytest.raises(ContradictoryPremises):
        compatible_answers(inst, admissible_set(inst))


def test_compatible_never_empty_without_contradiction():
    config = GeneratorConfig(seed=5)
    for index in range(150):
        inst = generate_instance(config, index)
        sem = compatible_answers(inst, admissible_set(inst))
        assert len(sem.compatible) >= 1
        if sem.entailed is not None:
            assert sem.entailed in sem.compatible
        assert sem.underdetermined == (len(sem.compatible) > 1)


# --- exact threshold vs grid ------------------------------------------------

def test_exact_thresholds_scholarship(scholarship):
    assert exact_thresholds(normalize(scholarship)) == [0.5]


def test_exact_and_grid_agree_on_scholarship(scholarship):
    exact = compatible_answers(scholarship, admissible_set(scholarship))
    grid = compatible_answers(scholarship,
                              admissible_set(scholarship, grid_G=1000, mode="grid"))
    assert exact.compatible == grid.compatible
    assert exact.entailed == grid.entailed


def test_exact_grid_disagreement_confined_to_crossings():
    rng_cfg = GeneratorConfig(seed=99, attribute_range=(2, 2), criteria_range=(0, 0),
                              pin_probability=0.0, bound_probability=0.0,
                              preference_probability=0.0)
    for index in range(120):
        inst = generate_instance(rng_cfg, index)
        exact = compatible_answers(inst, admissible_set(inst))
        grid = compatible_answers(inst, admissible_set(inst, grid_G=1000, mode="grid"))
        diff = set(exact.compatible) ^ set(grid.compatible)
        if not diff:
            continue
        thresholds = exact_thresholds(normalize(inst))
        m = normalize(inst).values
        for cand in diff:
            i = inst.candidates.index(cand)
            alphas = np.linspace(0.0, 1.0, 10001)
            scores = np.outer(alphas, m[:, 0]) + np.outer(1 - alphas, m[:, 1])
            others = np.delete(scores, i, axis=1)
            unique = scores[:, i] > others.max(axis=1) + EPS_SCORE
            for alpha in alphas[unique]:
                assert any(abs(alpha - t) <= 1.0 / 1000 + 1e-4 for t in thresholds), (
                    f"{inst.id}: {cand} unique at {alpha} far from {thresholds}")


def test_single_crossing_regions_are_contiguous():
    config = GeneratorConfig(seed=17, attribute_range=(2, 2), criteria_range=(0, 0),
                             pin_probability=0.0, bound_probability=0.0,
                             preference_probability=0.0)
    for index in range(60):
        inst = generate_instance(config, index)
        m = normalize(inst).values
        alphas = np.linspace(0.0, 1.0, 2001)
        scores = np.outer(alphas, m[:, 0]) + np.outer(1 - alphas, m[:, 1])
        for i in range(len(inst.candidates)):
            others = np.delete(scores, i, axis=1)
            unique = scores[:, i] > others.max(axis=1) + EPS_SCORE
            runs = np.flatnonzero(np.diff(unique.astype(int)) != 0)
            assert len(runs) <= 2, "unique-winner region must be one interval"


# --- invariance properties --------------------------------------------------

def test_affine_invariance_sample():
    config = GeneratorConfig(seed=23)
    for index in range(60):
        inst = generate_instance(config, index)
        scaled_facts = []
        numeric = {a.name for a in inst.attributes if a.kind == "numeric"}
        for f in inst.facts:
            if f.attribute in numeric:
                scaled_facts.append(dataclasses.replace(f, value=3.0 * f.value + 7.0))
            else:
                scaled_facts.append(f)
        scaled = dataclasses.replace(inst, facts=tuple(scaled_facts))
        adm, adm2 = admissible_set(inst), admissible_set(scaled)
        sem, sem2 = compatible_answers(inst, adm), compatible_answers(scaled, adm2)
        assert sem.compatible == sem2.compatible
        assert sem.entailed == sem2.entailed
        m, m2 = normalize(inst), normalize(scaled)
        for crit in inst.criteria:
            assert winners_at(m, crit).winners == winners_at(m2, crit).winners


def test_ties_everywhere_helper():
    inst = build_two_numeric("tiecheck", {"A": (5.0, 5.0), "B": (5.0, 5.0)})
    adm = admissible_set(inst)
    assert ties_everywhere(normalize(inst), adm, "A", "B") is True
    inst2 = build_two_numeric("tiecheck2", {"A": (5.0, 1.0), "B": (5.0, 2.0)})
    assert ties_everywhere(normalize(inst2), admissible_set(inst2), "A", "B") is False


def test_winner_statistics_exact_matches_dense_grid(scholarship):
    m = normalize(scholarship)
    exact = winner_statistics(m, admissible_set(scholarship))
    dense = winner_statistics(m, admissible_set(scholarship, grid_G=4096, mode="grid"))
    assert np.array_equal(exact.ever_unique, dense.ever_unique)
    assert np.array_equal(exact.in_winner_set, dense.in_winner_set)
    assert np.array_equal(exact.beats_all, dense.beats_all)
    assert np.array_equal(exact.tie_all, dense.tie_all)
