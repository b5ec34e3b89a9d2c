"""Structured response forms and the predicate evaluator.

Five response forms (decisive, conditional, equivalence, clarification,
refusal) are scored against an instance's semantics, yielding a Verdict of
correctness, non-bias, and utility predicates plus the graded assistive
score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import UndeclaredReference
from .model import Instance
from .semantics import (
    EPS_SCORE,
    AdmissibleSet,
    ScoreMatrix,
    SemanticsResult,
    WinnerStats,
    normalize,
    winner_statistics,
    _weight_row,
)


@dataclass(frozen=True)
class Decisive:
    """Asserts one candidate unconditionally; may disclose the criterion used."""

    candidate: str
    declared_theta: str | None = None


@dataclass(frozen=True)
class Conditional:
    """One answer per named criterion: ``if <criterion>, select <candidate>``."""

    branches: tuple[tuple[str, str], ...]  # (criterion name, candidate)

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches",
                           tuple((str(c), str(a)) for c, a in self.branches))


@dataclass(frozen=True)
class Equivalence:
    """Claims the listed candidates are equally good."""

    candidates: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates",
                           tuple(sorted(set(map(str, self.candidates)))))


@dataclass(frozen=True)
class Clarify:
    """Asks for the missing information instead of answering."""

    missing: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "missing", tuple(map(str, self.missing)))


@dataclass(frozen=True)
class Refuse:
    """Declines to answer, with a reason."""

    reason: str


Response = Decisive | Conditional | Equivalence | Clarify | Refuse


@dataclass(frozen=True)
class Verdict:
    """Predicate outcomes for one response on one instance.

    Internal invariants: c_strong implies c_cond, nb_strict implies
    nb_transparent, and u_decisive forces u_assistive == 1.0.
    """

    c_strong: bool
    c_cond: bool
    nb_strict: bool
    nb_transparent: bool
    u_decisive: bool
    u_assistive: float
    hidden_theta: bool

    def triple(self) -> tuple[bool, bool, bool]:
        """(c_strong, nb_strict, u_decisive) — the three trilemma predicates."""
        return (self.c_strong, self.nb_strict, self.u_decisive)

    def invariants_ok(self) -> bool:
        if self.c_strong and not self.c_cond:
            return False
        if self.nb_strict and not self.nb_transparent:
            return False
        if self.u_decisive and self.u_assistive != 1.0:
            return False
        return 0.0 <= self.u_assistive <= 1.0

    def as_dict(self) -> dict:
        return {
            "c_strong": self.c_strong,
            "c_cond": self.c_cond,
            "nb_strict": self.nb_strict,
            "nb_transparent": self.nb_transparent,
            "u_decisive": self.u_decisive,
            "u_assistive": self.u_assistive,
            "hidden_theta": self.hidden_theta,
        }


# Rubric weights for (relevance, informativeness, actionability, decisiveness).
RUBRIC_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


def rubric_components(response: Response) -> tuple[int, int, int, int]:
    """Structural (R, I, A, D) bits behind the assistive-utility rubric.

    R: every well-formed response is relevant.  I: informative unless the
    response is a refusal that names nothing missing.  A: actionable when the
    response names an answer or the specific information to supply.  D: only
    a decisive answer decides.
    """
    relevance = 1
    informative = 0 if isinstance(response, Refuse) else 1
    if isinstance(response, Decisive) or isinstance(response, Conditional):
        actionable = 1
    elif isinstance(response, Clarify) and response.missing:
        actionable = 1
    else:
        actionable = 0
    decisive = 1 if isinstance(response, Decisive) else 0
    return (relevance, informative, actionable, decisive)


def u_assistive_score(response: Response, semantics: SemanticsResult | None = None,
                      weights: tuple[float, float, float, float] = RUBRIC_WEIGHTS) -> float:
    """Graded usefulness in [0, 1] from the structural rubric.

    Decisive 1.0, Conditional 0.75, Clarify 0.75, Equivalence 0.5, bare
    Refuse 0.25 under the default equal weights; always positive, so a
    non-decisive response retains assistive value.
    """
    bits = rubric_components(response)
    return sum(w * b for w, b in zip(weights, bits))


def _check_structure(instance: Instance, response: Response) -> None:
    cands = set(instance.candidates)
    crits = {c.name for c in instance.criteria}
    if isinstance(response, Decisive):
        if response.candidate not in cands:
            raise UndeclaredReference(f"unknown candidate '{response.candidate}'")
        if response.declared_theta is not None and response.declared_theta not in crits:
            raise UndeclaredReference(f"unknown criterion '{response.declared_theta}'")
    elif isinstance(response, Conditional):
        if not response.branches:
            raise ValueError("a conditional response needs at least one branch")
        seen: set[str] = set()
        for crit, cand in response.branches:
            if crit in seen:
                raise ValueError(f"duplicate branch criterion '{crit}'")
            seen.add(crit)
            if crit not in crits:
                raise UndeclaredReference(f"unknown criterion '{crit}'")
            if cand not in cands:
                raise UndeclaredReference(f"unknown candidate '{cand}'")
    elif isinstance(response, Equivalence):
        if len(response.candidates) < 2:
            raise ValueError("an equivalence claim needs at least two candidates")
        for cand in response.candidates:
            if cand not in cands:
                raise UndeclaredReference(f"unknown candidate '{cand}'")
    elif isinstance(response, Clarify):
        if not response.missing:
            raise ValueError("a clarification must list what is missing")
    elif isinstance(response, Refuse):
        pass
    else:
        raise TypeError(f"not a response: {response!r}")


class ResponseEvaluator:
    """Evaluates responses against one instance's computed semantics.

    Precomputes the normalized matrix, winner statistics over the admissible
    set, and per-criterion winner sets, so evaluating a whole response space
    costs one admissible-set scan.
    """

    def __init__(self, instance: Instance, semantics: SemanticsResult,
                 adm: AdmissibleSet, stats: WinnerStats | None = None):
        self.instance = instance
        self.semantics = semantics
        self.adm = adm
        self.matrix: ScoreMatrix = normalize(instance)
        self.stats = stats if stats is not None else winner_statistics(self.matrix, adm)
        self._closure = set(semantics.preference_closure)
        self._theta_scores: dict[str, np.ndarray] = {}
        self._theta_winners: dict[str, frozenset[str]] = {}
        for crit in instance.criteria:
            row = _weight_row(self.matrix.attributes, crit)
            scores = _kernels.score_grid(row[None, :], self.matrix.values)[0]
            top = scores.max()
            winners = frozenset(c for i, c in enumerate(self.matrix.candidates)
                                if scores[i] >= top - EPS_SCORE)
            self._theta_scores[crit.name] = scores
            self._theta_winners[crit.name] = winners

    def winners_for(self, criterion: str) -> frozenset[str]:
        return self._theta_winners[criterion]

    def _tie_at(self, criterion: str, a: str, b: str) -> bool:
        scores = self._theta_scores[criterion]
        i = self.matrix.candidates.index(a)
        j = self.matrix.candidates.index(b)
        return bool(abs(scores[i] - scores[j]) <= EPS_SCORE)

    def _ordered_by_closure(self, a: str, b: str) -> bool:
        return (a, b) in self._closure or (b, a) in self._closure

    def evaluate(self, response: Response) -> Verdict:
        _check_structure(self.instance, response)
        u_ass = u_assistive_score(response, self.semantics)

        if isinstance(response, Decisive):
            a, theta = response.candidate, response.declared_theta
            c_strong = self.semantics.entailed == a
            wins_under_theta = (theta is not None and
                                self._theta_winners[theta] == frozenset((a,)))
            named_under_theta = theta is not None and a in self._theta_winners[theta]
            c_cond = c_strong or wins_under_theta or (
                theta is None and
                any(ws == frozenset((a,)) for ws in self._theta_winners.values()))
            return Verdict(
                c_strong=c_strong,
                c_cond=c_cond,
                nb_strict=c_strong,
                nb_transparent=c_strong or named_under_theta,
                u_decisive=True,
                u_assistive=u_ass,
                hidden_theta=theta is None,
            )

        if isinstance(response, Conditional):
            branch_ok = all(self._theta_winners[crit] == frozenset((cand,))
                            for crit, cand in response.branches)
            branch_crits = {crit for crit, _ in response.branches}
            branch_answers = {cand for _, cand in response.branches}
            silently_excluded = False
            for crit in self.instance.criteria:
                if crit.name in branch_crits:
                    continue
                winners = self._theta_winners[crit.name]
                if len(winners) == 1 and next(iter(winners)) not in branch_answers:
                    silently_excluded = True
                    break
            return Verdict(
                c_strong=branch_ok,
                c_cond=branch_ok,
                nb_strict=branch_ok and not silently_excluded,
                nb_transparent=branch_ok,
                u_decisive=False,
                u_assistive=u_ass,
                hidden_theta=False,
            )

        if isinstance(response, Equivalence):
            members = response.candidates
            pairs = [(members[i], members[j])
                     for i in range(len(members)) for j in range(i + 1, len(members))]
            idx = self.matrix.candidates.index
            ties = all(bool(self.stats.tie_all[idx(a), idx(b)]) for a, b in pairs)
            unordered = not any(self._ordered_by_closure(a, b) for a, b in pairs)
            c_strong = ties and unordered
            c_cond = c_strong or any(
                all(self._tie_at(name, a, b) for a, b in pairs)
                for name in self._theta_winners)
            return Verdict(
                c_strong=c_strong,
                c_cond=c_cond,
                nb_strict=c_strong,
                nb_transparent=c_strong,
                u_decisive=False,
                u_assistive=u_ass,
                hidden_theta=False,
            )

        # Clarify and Refuse assert nothing, so they are vacuously correct
        # and unbiased, and never decisive.
        return Verdict(
            c_strong=True,
            c_cond=True,
            nb_strict=True,
            nb_transparent=True,
            u_decisive=False,
            u_assistive=u_ass,
            hidden_theta=False,
        )


def evaluate(instance: Instance, semantics: SemanticsResult, adm: AdmissibleSet,
             response: Response) -> Verdict:
    """Evaluate one response; see ResponseEvaluator for batch evaluation."""
    return ResponseEvaluator(instance, semantics, adm).evaluate(response)
