"""Shared builders for the test suite."""

from __future__ import annotations

from udet.model import (
    HIGHER_BETTER,
    LOWER_BETTER,
    NUMERIC,
    ORDINAL,
    AttributeSchema,
    CriterionSpec,
    Fact,
    Instance,
    OrdinalScale,
)

NEED_SCALE = OrdinalScale("need_scale", ("low", "moderate", "severe"))


def build_scholarship(**overrides) -> Instance:
    """Hand-built twin of the bundled scholarship instance."""
    fields = dict(
        id="scholarship",
        question="Who should receive the scholarship?",
        candidates=("A", "B"),
        scales=(NEED_SCALE,),
        attributes=(
            AttributeSchema("gpa", NUMERIC, HIGHER_BETTER),
            AttributeSchema("need", ORDINAL, HIGHER_BETTER, "need_scale"),
        ),
        facts=(
            Fact("A", "gpa", 9.5),
            Fact("A", "need", "moderate"),
            Fact("B", "gpa", 8.7),
            Fact("B", "need", "severe"),
        ),
        criteria=(
            CriterionSpec("merit_first", (("gpa", 1.0), ("need", 0.0))),
            CriterionSpec("need_first", (("gpa", 0.0), ("need", 1.0))),
        ),
    )
    fields.update(overrides)
    return Instance(**fields)


def build_two_numeric(id: str, values: dict[str, tuple[float, float]],
                      **overrides) -> Instance:
    """Two numeric higher-better attributes x/y; `values[cand] = (x, y)`."""
    fields = dict(
        id=id,
        question="Which candidate should be selected?",
        candidates=tuple(values),
        attributes=(
            AttributeSchema("x", NUMERIC, HIGHER_BETTER),
            AttributeSchema("y", NUMERIC, HIGHER_BETTER),
        ),
        facts=tuple(
            Fact(cand, attr, value)
            for cand, pair in values.items()
            for attr, value in zip(("x", "y"), pair)
        ),
    )
    fields.update(overrides)
    return Instance(**fields)
