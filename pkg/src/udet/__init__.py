"""Executable semantics for decision instances under criterion underdetermination.

Parse `.udet` instance files, compute the premise-compatible answer set and
whether the instance is underdetermined, evaluate structured responses
against correctness / non-bias / utility predicates, check the resulting
trilemma by exhaustive enumeration, and run the recommended response policy.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .corpus import CorpusEntry, ExpectedSummary, load_corpus
from .dsl import ParseError, SourceDocument, parse_instance, serialize_instance
from .errors import (
    ContradictoryPremises,
    CorpusCorrupt,
    InfeasibleConstraints,
    NoUsableBranch,
    ResponseSpaceTooLarge,
    UdetError,
    UndeclaredReference,
)
from .model import (
    EPS_WEIGHT,
    AttributeSchema,
    BoundConstraint,
    CriterionSpec,
    Fact,
    Instance,
    OrdinalScale,
    PinConstraint,
    PreferencePremise,
    Violation,
    WeightConstraint,
    validate,
)
from .policy import PolicyDecision, decide, uniform_criterion, with_default_criterion
from .responses import (
    Clarify,
    Conditional,
    Decisive,
    Equivalence,
    Refuse,
    Response,
    ResponseEvaluator,
    Verdict,
    evaluate,
    u_assistive_score,
)
from .semantics import (
    EPS_SCORE,
    AdmissibleSet,
    ScoreMatrix,
    SemanticsResult,
    WinnerOutcome,
    WinnerStats,
    admissible_set,
    compatible_answers,
    default_grid_subdivisions,
    entails_preference,
    normalize,
    score,
    winner_statistics,
    winners_at,
)
from .trilemma import (
    GeneratorConfig,
    PairwiseCheck,
    ResponseSpace,
    TrilemmaReport,
    check_trilemma,
    enumerate_responses,
    generate_instance,
)

__all__ = [
    "__version__",
    "AttributeSchema", "BoundConstraint", "CriterionSpec", "Fact", "Instance",
    "OrdinalScale", "PinConstraint", "PreferencePremise", "Violation",
    "WeightConstraint", "validate", "EPS_WEIGHT",
    "ParseError", "SourceDocument", "parse_instance", "serialize_instance",
    "EPS_SCORE", "AdmissibleSet", "ScoreMatrix", "SemanticsResult",
    "WinnerOutcome", "WinnerStats", "admissible_set", "compatible_answers",
    "default_grid_subdivisions", "entails_preference", "normalize", "score",
    "winner_statistics", "winners_at",
    "Clarify", "Conditional", "Decisive", "Equivalence", "Refuse", "Response",
    "ResponseEvaluator", "Verdict", "evaluate", "u_assistive_score",
    "GeneratorConfig", "PairwiseCheck", "ResponseSpace", "TrilemmaReport",
    "check_trilemma", "enumerate_responses", "generate_instance",
    "PolicyDecision", "decide", "uniform_criterion", "with_default_criterion",
    "CorpusEntry", "ExpectedSummary", "load_corpus",
    "UdetError", "ContradictoryPremises", "CorpusCorrupt",
    "InfeasibleConstraints", "NoUsableBranch", "ResponseSpaceTooLarge",
    "UndeclaredReference",
]
