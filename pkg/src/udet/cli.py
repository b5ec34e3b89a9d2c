"""Command-line surface: analyze, check, policy, sweep, corpus export.

Reports are byte-deterministic for identical inputs and flags: orderings are
fixed, numbers render with at most 12 significant digits, and timestamps
appear only under ``--timestamps``.  Exit codes: 0 success, 1 parse or
validation error, 2 semantic error (infeasible constraints, contradictory
premises), 3 trilemma counterexample found.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, corpus
from .dsl import ParseError, SourceDocument, format_number, parse_instance
from .errors import ContradictoryPremises, InfeasibleConstraints
from .model import EPS_WEIGHT, Instance, ORDINAL
from .policy import PolicyDecision, decide
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
    EPS_SCORE,
    AdmissibleSet,
    SemanticsResult,
    admissible_set,
    compatible_answers,
    exact_thresholds,
    normalize,
    winner_statistics,
)
from .trilemma import (
    GeneratorConfig,
    TrilemmaReport,
    check_trilemma,
    enumerate_responses,
    generate_instance,
    report_from_verdicts,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SEMANTIC = 2
EXIT_COUNTEREXAMPLE = 3

JSON_SCHEMA_VERSION = 1


def render_response(response: Response) -> str:
    if isinstance(response, Decisive):
        if response.declared_theta is None:
            return f"decisive({response.candidate})"
        return f"decisive({response.candidate}; theta={response.declared_theta})"
    if isinstance(response, Conditional):
        body = ", ".join(f"{crit}->{cand}" for crit, cand in response.branches)
        return f"conditional({body})"
    if isinstance(response, Equivalence):
        return f"equivalence({', '.join(response.candidates)})"
    if isinstance(response, Clarify):
        return f"clarify({'; '.join(response.missing)})"
    return f"refuse({response.reason})"


def response_to_json(response: Response) -> dict:
    if isinstance(response, Decisive):
        return {"form": "decisive", "candidate": response.candidate,
                "declared_theta": response.declared_theta}
    if isinstance(response, Conditional):
        return {"form": "conditional",
                "branches": [[c, a] for c, a in response.branches]}
    if isinstance(response, Equivalence):
        return {"form": "equivalence", "candidates": list(response.candidates)}
    if isinstance(response, Clarify):
        return {"form": "clarify", "missing": list(response.missing)}
    return {"form": "refuse", "reason": response.reason}


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _parameters(adm: AdmissibleSet, timestamps: bool) -> dict:
    params = {
        "enumeration": adm.kind,
        "grid": adm.grid_subdivisions,
        "epsilon_score": EPS_SCORE,
        "epsilon_weight": EPS_WEIGHT,
        "tool_version": __version__,
    }
    if timestamps:
        params["timestamp"] = datetime.now(timezone.utc).isoformat()
    return params


def _instance_json(instance: Instance) -> dict:
    return {
        "id": instance.id,
        "question": instance.question,
        "candidates": list(instance.candidates),
        "scales": [{"name": s.name, "levels": list(s.levels)} for s in instance.scales],
        "attributes": [
            {"name": a.name, "kind": a.kind, "direction": a.direction,
             **({"scale": a.scale} if a.kind == ORDINAL else {})}
            for a in instance.attributes
        ],
        "facts": [{"candidate": f.candidate, "attribute": f.attribute, "value": f.value}
                  for f in instance.facts],
        "criteria": [{"name": c.name, "weights": {a: w for a, w in c.weights}}
                     for c in instance.criteria],
        "constraints": [
            {"kind": "pin", "criterion": c.criterion} if hasattr(c, "criterion")
            else {"kind": "bound", "attribute": c.attribute, "op": c.op, "value": c.value}
            for c in instance.constraints
        ],
        "preferences": [[p.winner, p.loser] for p in instance.preferences],
        "decisiveness_required": instance.decisiveness_required,
    }


def _semantics_json(semantics: SemanticsResult) -> dict:
    return {
        "compatible": list(semantics.compatible),
        "underdetermined": semantics.underdetermined,
        "entailed": semantics.entailed,
        "preference_closure": [[a, b] for a, b in semantics.preference_closure],
    }


def _trilemma_json(report: TrilemmaReport) -> dict:
    return {
        "underdetermined": report.underdetermined,
        "responses_evaluated": report.responses_evaluated,
        "counterexamples": [response_to_json(r) for r in report.counterexamples],
        "pairwise": [
            {"name": p.name, "witnesses": len(p.witnesses), "holds": p.holds,
             "violations": [response_to_json(r) for r in p.violations]}
            for p in report.pairwise
        ],
        "conflict_free_witness": (None if report.conflict_free_witness is None
                                  else response_to_json(report.conflict_free_witness)),
    }


def _emit(doc: dict, out) -> None:
    out.write(json.dumps(doc, indent=2))
    out.write("\n")


def _load(path: str, stderr) -> Instance | None:
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        stderr.write(f"error: cannot read {path}: {exc}\n")
        return None
    try:
        return parse_instance(SourceDocument(text, path))
    except ParseError as exc:
        stderr.write(f"{exc.origin}:{exc.line}:{exc.column}: {exc.message}\n")
        if exc.snippet:
            stderr.write(f"  near: {exc.snippet}\n")
        return None


def _verdict_row(response: Response, verdict: Verdict) -> str:
    cells = [
        render_response(response).ljust(52),
        _bool(verdict.c_strong).ljust(6),
        _bool(verdict.c_cond).ljust(6),
        _bool(verdict.nb_strict).ljust(6),
        _bool(verdict.nb_transparent).ljust(6),
        _bool(verdict.u_decisive).ljust(6),
        format_number(verdict.u_assistive).ljust(6),
        _bool(verdict.hidden_theta),
    ]
    return "  " + " ".join(cells).rstrip()


def _analysis(instance: Instance, grid: int | None):
    adm = admissible_set(instance, grid_G=grid)
    matrix = normalize(instance)
    stats = winner_statistics(matrix, adm)
    semantics = compatible_answers(instance, adm, stats=stats)
    space = enumerate_responses(instance, semantics)
    evaluator = ResponseEvaluator(instance, semantics, adm, stats=stats)
    verdicts = tuple(evaluator.evaluate(r) for r in space.responses)
    report = report_from_verdicts(instance.id, semantics, space.responses, verdicts)
    decision = decide(instance, semantics, adm)
    return adm, semantics, space, verdicts, report, decision


def cmd_analyze(args, stdout, stderr) -> int:
    instance = _load(args.path, stderr)
    if instance is None:
        return EXIT_PARSE
    if args.require_decision:
        instance = dataclasses.replace(instance, decisiveness_required=True)
    try:
        adm, semantics, space, verdicts, report, decision = _analysis(instance, args.grid)
    except (InfeasibleConstraints, ContradictoryPremises) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_SEMANTIC

    if args.format == "json":
        doc = {
            "schema_version": JSON_SCHEMA_VERSION,
            "parameters": _parameters(adm, args.timestamps),
            "instance": _instance_json(instance),
            "semantics": _semantics_json(semantics),
            "verdicts": [
                {"response": response_to_json(r), "verdict": v.as_dict()}
                for r, v in zip(space.responses, verdicts)
            ],
            "policy": {
                "branch": decision.branch,
                "response": response_to_json(decision.response),
                "rationale": decision.rationale,
            },
            "trilemma": _trilemma_json(report),
        }
        _emit(doc, stdout)
        return EXIT_OK

    w = stdout.write
    w(f"instance {instance.id}\n")
    if instance.question:
        w(f"question: {instance.question}\n")
    w(f"candidates: {', '.join(instance.candidates)}\n")
    attrs = ", ".join(
        f"{a.name} ({a.kind}{'/' + a.scale if a.kind == ORDINAL else ''}, {a.direction})"
        for a in instance.attributes)
    w(f"attributes: {attrs}\n")
    grid_txt = "-" if adm.grid_subdivisions is None else str(adm.grid_subdivisions)
    w(f"parameters: enumeration={adm.kind} grid={grid_txt} "
      f"eps_score={format_number(EPS_SCORE)} eps_weight={format_number(EPS_WEIGHT)} "
      f"version={__version__}\n")
    if args.timestamps:
        w(f"timestamp: {datetime.now(timezone.utc).isoformat()}\n")
    w("semantics:\n")
    w(f"  compatible: {', '.join(semantics.compatible)}\n")
    w(f"  underdetermined: {_bool(semantics.underdetermined)}\n")
    w(f"  entailed: {semantics.entailed or '-'}\n")
    closure = "; ".join(f"{a} > {b}" for a, b in semantics.preference_closure) or "-"
    w(f"  preference closure: {closure}\n")
    w("verdicts:\n")
    header = ["response".ljust(52), "C".ljust(6), "Ccond".ljust(6), "NB".ljust(6),
              "NBt".ljust(6), "Udec".ljust(6), "Uass".ljust(6), "hidden"]
    w("  " + " ".join(header).rstrip() + "\n")
    for response, verdict in zip(space.responses, verdicts):
        w(_verdict_row(response, verdict) + "\n")
    w("policy:\n")
    w(f"  branch: {decision.branch}\n")
    w(f"  response: {render_response(decision.response)}\n")
    w(f"  rationale: {decision.rationale}\n")
    w("trilemma:\n")
    w(f"  underdetermined: {_bool(report.underdetermined)}\n")
    w(f"  responses evaluated: {report.responses_evaluated}\n")
    w(f"  counterexamples: {len(report.counterexamples)}\n")
    for check in report.pairwise:
        w(f"  {check.name}: {'holds' if check.holds else 'VIOLATED'} "
          f"(witnesses {len(check.witnesses)})\n")
    witness = (render_response(report.conflict_free_witness)
               if report.conflict_free_witness else "-")
    w(f"  conflict-free witness: {witness}\n")
    return EXIT_OK


def _report_line(report: TrilemmaReport) -> str:
    witness = (render_response(report.conflict_free_witness)
               if report.conflict_free_witness else "-")
    return (f"{report.instance_id}: D={1 if report.underdetermined else 0} "
            f"responses={report.responses_evaluated} "
            f"counterexamples={len(report.counterexamples)} witness={witness}")


def _report_json(report: TrilemmaReport) -> dict:
    return {"instance": report.instance_id, **_trilemma_json(report)}


def cmd_check(args, stdout, stderr) -> int:
    instances: list[Instance] = []
    if args.random is not None:
        if args.random < 1:
            stderr.write("error: --random needs a positive count\n")
            return EXIT_PARSE
        config = GeneratorConfig(seed=args.seed)
        instances = [generate_instance(config, i) for i in range(args.random)]
    elif args.paths:
        for path in args.paths:
            instance = _load(path, stderr)
            if instance is None:
                return EXIT_PARSE
            instances.append(instance)
    else:
        stderr.write("error: give instance files or --random N\n")
        return EXIT_PARSE

    reports: list[TrilemmaReport] = []
    try:
        for instance in instances:
            reports.append(check_trilemma(instance, grid_G=args.grid))
    except (InfeasibleConstraints, ContradictoryPremises) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_SEMANTIC

    total_responses = sum(r.responses_evaluated for r in reports)
    total_counter = sum(len(r.counterexamples) for r in reports)
    determined = sum(1 for r in reports if not r.underdetermined)
    witnessed = sum(1 for r in reports
                    if not r.underdetermined and r.conflict_free_witness is not None)

    if args.format == "json":
        doc = {
            "schema_version": JSON_SCHEMA_VERSION,
            "reports": [_report_json(r) for r in reports],
            "summary": {
                "instances": len(reports),
                "responses": total_responses,
                "counterexamples": total_counter,
                "determined": determined,
                "determined_with_witness": witnessed,
            },
        }
        _emit(doc, stdout)
    else:
        for report in reports:
            stdout.write(_report_line(report) + "\n")
            if args.paths and args.random is None:
                for check in report.pairwise:
                    stdout.write(
                        f"  {check.name}: {'holds' if check.holds else 'VIOLATED'} "
                        f"(witnesses {len(check.witnesses)})\n")
        stdout.write(
            f"checked {len(reports)} instance(s), evaluated {total_responses} "
            f"response(s), counterexamples {total_counter}\n")

    return EXIT_COUNTEREXAMPLE if total_counter else EXIT_OK


def cmd_policy(args, stdout, stderr) -> int:
    instance = _load(args.path, stderr)
    if instance is None:
        return EXIT_PARSE
    if args.require_decision:
        instance = dataclasses.replace(instance, decisiveness_required=True)
    try:
        adm = admissible_set(instance, grid_G=args.grid)
        semantics = compatible_answers(instance, adm)
        decision: PolicyDecision = decide(instance, semantics, adm)
    except (InfeasibleConstraints, ContradictoryPremises) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_SEMANTIC
    if args.format == "json":
        _emit({
            "schema_version": JSON_SCHEMA_VERSION,
            "instance": instance.id,
            "policy": {
                "branch": decision.branch,
                "response": response_to_json(decision.response),
                "rationale": decision.rationale,
            },
        }, stdout)
    else:
        stdout.write(f"branch: {decision.branch}\n")
        stdout.write(f"response: {render_response(decision.response)}\n")
        stdout.write(f"rationale: {decision.rationale}\n")
    return EXIT_OK


def _project_two(instance: Instance, first: str, second: str) -> Instance:
    """Sub-instance over two attributes: their facts and scales, no overlays."""
    keep = {first, second}
    attributes = tuple(sorted((a for a in instance.attributes if a.name in keep),
                              key=lambda a: (a.name != first)))
    scale_names = {a.scale for a in attributes if a.scale}
    return Instance(
        id=instance.id,
        question=instance.question,
        candidates=instance.candidates,
        scales=tuple(s for s in instance.scales if s.name in scale_names),
        attributes=attributes,
        facts=tuple(f for c in instance.candidates for f in instance.facts
                    if f.candidate == c and f.attribute in keep),
        criteria=(),
        constraints=(),
        preferences=(),
        decisiveness_required=False,
    )


def cmd_sweep(args, stdout, stderr) -> int:
    instance = _load(args.path, stderr)
    if instance is None:
        return EXIT_PARSE
    declared = instance.attribute_names
    pair = tuple(args.attributes)
    if not pair:
        if len(declared) != 2:
            stderr.write("error: instance has more than 2 attributes; "
                         "name the attribute pair to project onto\n")
            return EXIT_SEMANTIC
        pair = declared
    if len(pair) != 2 or pair[0] == pair[1]:
        stderr.write("error: exactly two distinct attribute names required\n")
        return EXIT_SEMANTIC
    for name in pair:
        if name not in declared:
            stderr.write(f"error: unknown attribute '{name}'\n")
            return EXIT_SEMANTIC

    projection = _project_two(instance, pair[0], pair[1])
    matrix = normalize(projection)
    thresholds = exact_thresholds(matrix, 0.0, 1.0)
    regions = _sweep_regions(matrix, thresholds)

    if args.format == "json":
        _emit({
            "schema_version": JSON_SCHEMA_VERSION,
            "instance": instance.id,
            "attribute_pair": list(pair),
            "thresholds": thresholds,
            "regions": [
                {"lo": lo, "hi": hi, "lo_closed": lc, "hi_closed": hc,
                 "winners": list(ws)}
                for lo, lc, hi, hc, ws in regions
            ],
        }, stdout)
        return EXIT_OK

    stdout.write(f"alpha = weight of '{pair[0]}' (1 - alpha on '{pair[1]}')\n")
    stdout.write(_render_regions(regions, matrix.candidates) + "\n")
    return EXIT_OK


def _winners_at_alpha(matrix, alpha: float) -> tuple[str, ...]:
    scores = alpha * matrix.values[:, 0] + (1.0 - alpha) * matrix.values[:, 1]
    top = scores.max()
    return tuple(c for i, c in enumerate(matrix.candidates)
                 if scores[i] >= top - EPS_SCORE)


def _sweep_regions(matrix, thresholds: list[float]):
    """Coalesced winner regions over alpha in [0, 1].

    Returns (lo, lo_closed, hi, hi_closed, winners) tuples.  Items alternate
    boundary points and open segments; runs with identical winner sets merge.
    """
    points = [0.0] + thresholds + [1.0]
    items: list[tuple[float, float, bool, tuple[str, ...]]] = []
    for i, p in enumerate(points):
        items.append((p, p, True, _winners_at_alpha(matrix, p)))
        if i + 1 < len(points):
            mid = (p + points[i + 1]) / 2.0
            items.append((p, points[i + 1], False, _winners_at_alpha(matrix, mid)))
    regions = []
    i = 0
    while i < len(items):
        lo, hi, is_point, winners = items[i]
        lo_closed = is_point
        hi_closed = is_point
        j = i + 1
        while j < len(items) and items[j][3] == winners:
            hi = items[j][1]
            hi_closed = items[j][2]
            j += 1
        regions.append((lo, lo_closed, hi, hi_closed, winners))
        i = j
    return regions


def _render_regions(regions, candidates: tuple[str, ...]) -> str:
    parts = []
    for lo, lo_closed, hi, hi_closed, winners in regions:
        if len(winners) == 1:
            label = winners[0]
        elif set(winners) == set(candidates):
            label = "tie"
        else:
            label = f"tie ({', '.join(winners)})"
        if lo == hi:
            parts.append(f"α = {format_number(lo)}: {label}")
        else:
            left = "[" if lo_closed else "("
            right = "]" if hi_closed else ")"
            parts.append(
                f"α ∈ {left}{format_number(lo)}, {format_number(hi)}{right}: {label}")
    return "; ".join(parts)


def cmd_corpus(args, stdout, stderr) -> int:
    entries = corpus.load_corpus()
    if args.corpus_command == "export":
        target = Path(args.directory)
        target.mkdir(parents=True, exist_ok=True)
        written = []
        for entry in entries:
            path = target / f"{entry.id}.udet"
            path.write_text(entry.source, encoding="utf-8")
            written.append(str(path))
        if args.format == "json":
            _emit({"schema_version": JSON_SCHEMA_VERSION, "exported": written}, stdout)
        else:
            for path in written:
                stdout.write(path + "\n")
        return EXIT_OK
    stderr.write("error: unknown corpus subcommand\n")
    return EXIT_PARSE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udet",
        description="Analyze decision instances whose premises may not "
                    "determine a unique answer.")
    parser.add_argument("--version", action="version", version=f"udet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, grid: bool = True) -> None:
        p.add_argument("--format", choices=("text", "json"), default="text")
        if grid:
            p.add_argument("--grid", type=int, default=None, metavar="G",
                           help="override simplex grid subdivisions")
        p.add_argument("--timestamps", action="store_true",
                       help="include a wall-clock timestamp in reports")

    p_analyze = sub.add_parser("analyze", help="full semantic and verdict report")
    p_analyze.add_argument("path")
    p_analyze.add_argument("--require-decision", action="store_true",
                           help="treat the instance as requiring a decision")
    common(p_analyze)

    p_check = sub.add_parser("check", help="verify the trilemma by enumeration")
    p_check.add_argument("paths", nargs="*")
    p_check.add_argument("--random", type=int, default=None, metavar="N",
                         help="check N generated instances instead of files")
    p_check.add_argument("--seed", type=int, default=0)
    common(p_check)

    p_policy = sub.add_parser("policy", help="run the response policy")
    p_policy.add_argument("path")
    p_policy.add_argument("--require-decision", action="store_true")
    common(p_policy)

    p_sweep = sub.add_parser("sweep", help="winner regions over a 2-attribute weight")
    p_sweep.add_argument("path")
    p_sweep.add_argument("attributes", nargs="*", metavar="ATTR",
                         help="attribute pair for the projection")
    common(p_sweep, grid=False)

    p_corpus = sub.add_parser("corpus", help="bundled example instances")
    corpus_sub = p_corpus.add_subparsers(dest="corpus_command", required=True)
    p_export = corpus_sub.add_parser("export", help="write corpus files to a directory")
    p_export.add_argument("directory")
    common(p_export, grid=False)

    return parser


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "analyze":
        return cmd_analyze(args, stdout, stderr)
    if args.command == "check":
        return cmd_check(args, stdout, stderr)
    if args.command == "policy":
        return cmd_policy(args, stdout, stderr)
    if args.command == "sweep":
        return cmd_sweep(args, stdout, stderr)
    if args.command == "corpus":
        return cmd_corpus(args, stdout, stderr)
    stderr.write(f"error: unknown command {args.command!r}\n")  # pragma: no cover
    return EXIT_PARSE  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
