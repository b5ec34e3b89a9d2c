"""Exhaustive response enumeration and mechanical trilemma checking.

For one instance this enumerates every structured response, evaluates all of
them, and reports whether any simultaneously satisfies strong correctness,
strict non-bias, and decisive utility while the instance is underdetermined
(the conjectured impossibility), along with the three pairwise implication
forms.  A seeded generator produces random instances for property suites.
The check quantifies over the structured response space only; that
closed-world caveat is part of the report's meaning.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ResponseSpaceTooLarge
from .model import (
    HIGHER_BETTER,
    LOWER_BETTER,
    NUMERIC,
    ORDINAL,
    AttributeSchema,
    BoundConstraint,
    CriterionSpec,
    Fact,
    Instance,
    OrdinalScale,
    PinConstraint,
    PreferencePremise,
    validate,
)
from .responses import (
    Clarify,
    Conditional,
    Decisive,
    Equivalence,
    Refuse,
    Response,
    ResponseEvaluator,
    Verdict,
)
from .semantics import (
    AdmissibleSet,
    SemanticsResult,
    admissible_set,
    compatible_answers,
    normalize,
    winner_statistics,
    winners_at,
)

# 2**12 criterion subsets keeps enumeration at desk scale.
MAX_ENUMERATED_CRITERIA = 12

REFUSE_REASON = "cannot determine the best candidate without a selection criterion"


@dataclass(frozen=True)
class ResponseSpace:
    """Every structured response for one instance, in deterministic order."""

    responses: tuple[Response, ...]

    def __len__(self) -> int:
        return len(self.responses)


PAIRWISE_FORMS = (
    ("c_strong & nb_strict -> !u_decisive",
     lambda v: v.c_strong and v.nb_strict, lambda v: not v.u_decisive),
    ("nb_strict & u_decisive -> !c_strong",
     lambda v: v.nb_strict and v.u_decisive, lambda v: not v.c_strong),
    ("c_strong & u_decisive -> !nb_strict",
     lambda v: v.c_strong and v.u_decisive, lambda v: not v.nb_strict),
)


@dataclass(frozen=True)
class PairwiseCheck:
    """One pairwise implication, asserted only under underdetermination.

    `witnesses` are the responses satisfying the antecedent; `violations`
    are witnesses whose verdict falsifies the consequent while the instance
    is underdetermined.  `holds` is true iff `violations` is empty.
    """

    name: str
    witnesses: tuple[Response, ...]
    holds: bool
    violations: tuple[Response, ...]


@dataclass(frozen=True)
class TrilemmaReport:
    """Outcome of checking one instance's full response space."""

    instance_id: str
    underdetermined: bool
    counterexamples: tuple[Response, ...]
    pairwise: tuple[PairwiseCheck, ...]
    conflict_free_witness: Response | None
    responses_evaluated: int


def clarify_for(instance: Instance) -> Clarify:
    """The canonical clarification: name each attribute's missing weight."""
    return Clarify(tuple(f"weight for {a}" for a in instance.attribute_names))


def enumerate_responses(instance: Instance,
                        semantics: SemanticsResult) -> ResponseSpace:
    """All structured responses for the instance, deterministically ordered.

    Order: Decisive by candidate (undisclosed criterion first, then each
    declared criterion), Conditional over nonempty subsets of the criteria
    that have a unique winner (by subset size, then declaration order),
    Equivalence over candidate pairs, one Clarify, one Refuse.

    Raises ResponseSpaceTooLarge when more than MAX_ENUMERATED_CRITERIA
    criteria are declared.
    """
    if len(instance.criteria) > MAX_ENUMERATED_CRITERIA:
        raise ResponseSpaceTooLarge(
            f"{len(instance.criteria)} criteria declared; "
            f"enumeration is capped at {MAX_ENUMERATED_CRITERIA}")
    matrix = normalize(instance)
    unique_winner: dict[str, str] = {}
    for crit in instance.criteria:
        outcome = winners_at(matrix, crit)
        if outcome.unique is not None:
            unique_winner[crit.name] = outcome.unique

    out: list[Response] = []
    for cand in instance.candidates:
        out.append(Decisive(cand))
        for crit in instance.criteria:
            out.append(Decisive(cand, declared_theta=crit.name))
    decided = [c.name for c in instance.criteria if c.name in unique_winner]
    for size in range(1, len(decided) + 1):
        for subset in combinations(decided, size):
            out.append(Conditional(tuple((name, unique_winner[name])
                                         for name in subset)))
    for a, b in combinations(instance.candidates, 2):
        out.append(Equivalence((a, b)))
    out.append(clarify_for(instance))
    out.append(Refuse(REFUSE_REASON))
    return ResponseSpace(tuple(out))


def response_space_bound(instance: Instance) -> int:
    """Upper bound on the response-space size for this instance."""
    n, m = len(instance.candidates), len(instance.criteria)
    return n * (1 + m) + 2 ** m + (n * (n - 1)) // 2 + 2


def report_from_verdicts(instance_id: str, semantics: SemanticsResult,
                         responses: tuple[Response, ...],
                         verdicts: tuple[Verdict, ...]) -> TrilemmaReport:
    """Assemble a TrilemmaReport from an already-evaluated verdict table."""
    under = semantics.underdetermined
    counterexamples = tuple(
        r for r, v in zip(responses, verdicts)
        if under and v.c_strong and v.nb_strict and v.u_decisive)
    pairwise = []
    for name, antecedent, consequent in PAIRWISE_FORMS:
        witnesses = tuple(r for r, v in zip(responses, verdicts) if antecedent(v))
        violations = tuple(
            r for r, v in zip(responses, verdicts)
            if under and antecedent(v) and not consequent(v))
        pairwise.append(PairwiseCheck(name, witnesses, not violations, violations))
    witness = None if under else Decisive(semantics.entailed)
    return TrilemmaReport(
        instance_id=instance_id,
        underdetermined=under,
        counterexamples=counterexamples,
        pairwise=tuple(pairwise),
        conflict_free_witness=witness,
        responses_evaluated=len(responses),
    )


def check_trilemma(instance: Instance, grid_G: int | None = None,
                   adm: AdmissibleSet | None = None) -> TrilemmaReport:
    """Evaluate every enumerated response and report the trilemma outcome.

    Propagates InfeasibleConstraints and ContradictoryPremises from the
    semantics layer.  Deterministic for a fixed (instance, grid_G).
    """
    if adm is None:
        adm = admissible_set(instance, grid_G)
    matrix = normalize(instance)
    stats = winner_statistics(matrix, adm)
    semantics = compatible_answers(instance, adm, stats=stats)
    space = enumerate_responses(instance, semantics)
    evaluator = ResponseEvaluator(instance, semantics, adm, stats=stats)
    verdicts = tuple(evaluator.evaluate(r) for r in space.responses)
    return report_from_verdicts(instance.id, semantics, space.responses, verdicts)


@dataclass(frozen=True)
class GeneratorConfig:
    """Shape of randomly generated instances.

    Ranges are inclusive.  Pin and bound constraints are mutually exclusive
    per instance and at most one bound is emitted, which keeps every
    generated constraint set feasible by construction.  With
    `preference_probability` an explicit preference premise is added from a
    strictly dominating candidate to a dominated one, which can never
    contradict the score orderings.
    """

    seed: int = 0
    candidate_range: tuple[int, int] = (2, 4)
    attribute_range: tuple[int, int] = (2, 4)
    criteria_range: tuple[int, int] = (0, 3)
    pin_probability: float = 0.15
    bound_probability: float = 0.2
    decision_probability: float = 0.2
    preference_probability: float = 0.15

    def check(self) -> None:
        for label, (lo, hi), floor in (
                ("candidate_range", self.candidate_range, 2),
                ("attribute_range", self.attribute_range, 1),
                ("criteria_range", self.criteria_range, 0)):
            if lo > hi or lo < floor:
                raise ValueError(f"{label} must be a nonempty range with low >= {floor}")
        for label, p in (("pin_probability", self.pin_probability),
                         ("bound_probability", self.bound_probability),
                         ("decision_probability", self.decision_probability),
                         ("preference_probability", self.preference_probability)):
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{label} must be in [0, 1]")


_SEED_MASK = (1 << 64) - 1

# Raw numeric facts are tenths in [0, 10]; criterion weights are twentieths.
_VALUE_STEPS = 100
_WEIGHT_STEPS = 20


def generate_instance(config: GeneratorConfig, index: int) -> Instance:
    """Deterministically generate the `index`-th instance for `config.seed`.

    Numeric fact values are drawn uniformly from {0.0, 0.1, ..., 10.0};
    criterion weights are multiples of 1/20 summing to 1; ordinal attributes
    get their own 3-5 level scale.  Generated instances always validate.
    """
    config.check()
    if index < 0:
        raise ValueError("index must be non-negative")
    seed = config.seed & _SEED_MASK
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                       spawn_key=(index,)))

    n_cand = int(rng.integers(config.candidate_range[0], config.candidate_range[1] + 1))
    n_attr = int(rng.integers(config.attribute_range[0], config.attribute_range[1] + 1))
    n_crit = int(rng.integers(config.criteria_range[0], config.criteria_range[1] + 1))

    candidates = tuple(f"c{i + 1}" for i in range(n_cand))
    scales: list[OrdinalScale] = []
    attributes: list[AttributeSchema] = []
    for j in range(n_attr):
        name = f"a{j + 1}"
        direction = HIGHER_BETTER if rng.random() < 0.75 else LOWER_BETTER
        if rng.random() < 0.7:
            attributes.append(AttributeSchema(name, NUMERIC, direction))
        else:
            n_levels = int(rng.integers(3, 6))
            scale = OrdinalScale(f"scale_{name}",
                                 tuple(f"lv{r}" for r in range(n_levels)))
            scales.append(scale)
            attributes.append(AttributeSchema(name, ORDINAL, direction, scale.name))

    facts: list[Fact] = []
    for cand in candidates:
        for attr in attributes:
            if attr.kind == NUMERIC:
                value: float | str = float(rng.integers(0, _VALUE_STEPS + 1)) / 10.0
            else:
                scale = next(s for s in scales if s.name == attr.scale)
                value = scale.levels[int(rng.integers(0, len(scale.levels)))]
            facts.append(Fact(cand, attr.name, value))

    attr_names = tuple(a.name for a in attributes)
    criteria: list[CriterionSpec] = []
    for i in range(n_crit):
        parts = rng.multinomial(_WEIGHT_STEPS, [1.0 / n_attr] * n_attr)
        weights = tuple((a, float(p) / _WEIGHT_STEPS)
                        for a, p in zip(attr_names, parts))
        criteria.append(CriterionSpec(f"crit{i + 1}", weights))

    constraints: list[PinConstraint | BoundConstraint] = []
    if criteria and rng.random() < config.pin_probability:
        constraints.append(
            PinConstraint(criteria[int(rng.integers(0, len(criteria)))].name))
    elif rng.random() < config.bound_probability:
        attr = attr_names[int(rng.integers(0, n_attr))]
        op = "<=" if rng.random() < 0.5 else ">="
        value = float(rng.integers(0, 11)) / 10.0
        constraints.append(BoundConstraint(attr, op, value))

    instance = Instance(
        id=f"gen_{seed}_{index}",
        question="Which candidate should be selected?",
        candidates=candidates,
        scales=tuple(scales),
        attributes=tuple(attributes),
        facts=tuple(facts),
        criteria=tuple(criteria),
        constraints=tuple(constraints),
        preferences=(),
        decisiveness_required=bool(rng.random() < config.decision_probability),
    )

    if rng.random() < config.preference_probability:
        pair = _dominating_pair(instance, rng)
        if pair is not None:
            instance = dataclasses.replace(
                instance, preferences=(PreferencePremise(*pair),))
    return instance


def _dominating_pair(instance: Instance, rng: np.random.Generator) -> tuple[str, str] | None:
    """Pick (winner, loser) where the winner strictly dominates on normalized
    scores; such a premise can never conflict with score unanimity."""
    values = normalize(instance).values
    cands = instance.candidates
    pairs: list[tuple[str, str]] = []
    for i in range(len(cands)):
        for j in range(len(cands)):
            if i == j:
                continue
            if np.all(values[i] >= values[j]) and np.any(values[i] > values[j]):
                pairs.append((cands[i], cands[j]))
    if not pairs:
        return None
    return pairs[int(rng.integers(0, len(pairs)))]


def generate_batch(config: GeneratorConfig, count: int) -> list[Instance]:
    """The first `count` instances for `config`, in index order."""
    return [generate_instance(config, i) for i in range(count)]


def _selfcheck_generated(config: GeneratorConfig, count: int) -> None:
    """Debug helper: assert every generated instance validates."""
    for i in range(count):
        problems = validate(generate_instance(config, i))
        if problems:
            raise AssertionError(f"instance {i}: {problems[0]}")
