"""Command-line entry point: ``rsumset group-info | verify | extremal``.

Exit codes: 0 PASS, 2 FAIL, 3 PARTIAL, 4 usage error, 5 precondition not met
(for example ``verify thm1`` on a non-nilpotent group).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .catalog import UnknownGroupError, get_group, listing
from .errors import GroupDefinitionError, OrderCapError, PreconditionError
from .fields import field
from .groups import FiniteGroup, load_cayley
from .harness import (
    JOBS_ENV,
    extremal_scan,
    verify_balister_wheeler,
    verify_cauchy_davenport,
    verify_hall,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
)
from .morphisms import enumerate_automorphisms
from .nullstellensatz import verify_field_lemma
from .plan import Pruning, SearchPlan
from .reports import ReportDocument, group_descriptor

EXIT_PASS, EXIT_FAIL, EXIT_PARTIAL, EXIT_USAGE, EXIT_PRECONDITION = 0, 2, 3, 4, 5
EXIT_BY_STATUS = {"PASS": EXIT_PASS, "FAIL": EXIT_FAIL, "PARTIAL": EXIT_PARTIAL}

THEOREMS = ("cd", "thm1", "thm2", "thm3", "bw", "field-lemma", "hall")
BOUNDS = ("cauchy_davenport", "anr_restricted", "eh_diagonal", "balister_wheeler")
MODE_FLAGS = {"exhaustive": "exhaustive", "capped": "size_capped", "sampled": "sampled"}

log = logging.getLogger("rsumset")


class UsageError(Exception):
    pass


def _add_group_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--group", help="catalog name, e.g. Z9, Z3xZ3, Heis3, F21")
    g.add_argument("--group-file", type=Path, help="JSON Cayley-table document")


def _add_plan_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="exhaustive")
    p.add_argument("--max-a", type=int, default=None, help="largest |A| (capped mode)")
    p.add_argument("--max-b", type=int, default=None, help="largest |B| (capped mode)")
    p.add_argument("--samples", type=int, default=0, help="instance count in sampled mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prune", choices=("none", "inversion", "auto", "both"), default="none")
    p.add_argument("--jobs", type=int, default=None, help=f"worker threads (default ${JOBS_ENV} or 1)")


def _add_output_flags(p: argparse.ArgumentParser, formats=("json", "text")) -> None:
    p.add_argument("--format", choices=formats, default="json")
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall-clock times in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsumset", description="Restricted sumset bound verification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("group-info", help="summarize a group")
    _add_group_flags(info)
    info.add_argument("name", nargs="?", help="catalog name (alternative to --group)")
    info.add_argument("--format", choices=("json", "text"), default="text")
    info.add_argument("--list", action="store_true", help="list catalog names and exit")

    ver = sub.add_parser("verify", help="check one bound or structure result")
    ver.add_argument("theorem", choices=THEOREMS)
    _add_group_flags(ver)
    _add_plan_flags(ver)
    ver.add_argument("--p", type=int, default=None, help="field characteristic (field-lemma)")
    ver.add_argument("--alpha", type=int, default=1, help="field degree (field-lemma)")
    ver.add_argument("--max-size", type=int, default=3, help="largest |A| = |B| (field-lemma)")
    _add_output_flags(ver, ("json", "text", "csv"))

    ext = sub.add_parser("extremal", help="list instances meeting a bound with equality")
    _add_group_flags(ext)
    ext.add_argument("--bound", choices=BOUNDS, default="eh_diagonal")
    ext.add_argument("--limit", type=int, default=None)
    _add_plan_flags(ext)
    _add_output_flags(ext, ("json", "text", "csv"))
    return parser


def resolve_group(args) -> FiniteGroup:
    name = getattr(args, "group", None) or getattr(args, "name", None)
    if getattr(args, "group_file", None) is not None:
        try:
            return load_cayley(args.group_file)
        except OSError as exc:
            raise UsageError(f"cannot read {args.group_file}: {exc}") from exc
    if not name:
        raise UsageError("a group is required (--group NAME or --group-file PATH)")
    return get_group(name)


def build_plan(args, g: FiniteGroup) -> SearchPlan:
    mode = MODE_FLAGS[args.mode]
    caps = (args.max_a, args.max_b)
    if mode == "size_capped" and caps == (None, None):
        raise UsageError("capped mode needs --max-a and/or --max-b")
    if mode == "sampled" and args.samples < 1:
        raise UsageError("sampled mode needs --samples N with N >= 1")
    try:
        return SearchPlan(group=g.name or g.content_hash, mode=mode, size_caps=caps,
                          sample_count=args.samples if mode == "sampled" else 0,
                          seed=args.seed, pruning=Pruning.from_flag(args.prune))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_group_info(args) -> int:
    if args.list:
        print("\n".join(listing()))
        return EXIT_PASS
    g = resolve_group(args)
    info = dict(group_descriptor(g))
    info.update(
        p=g.least_prime_factor if g.order > 1 else None,
        abelian=g.is_abelian,
        nilpotent=g.is_nilpotent,
        solvable=g.is_solvable,
        center_size=len(g.center),
    )
    try:
        info["automorphisms"] = len(enumerate_automorphisms(g))
    except OrderCapError:
        info["automorphisms"] = None
    if args.format == "json":
        print(json.dumps(info, indent=2, sort_keys=True))
    else:
        width = max(map(len, info))
        for k, v in info.items():
            print(f"{k.ljust(width)}  {v}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    if args.theorem == "field-lemma":
        if args.p is None:
            raise UsageError("field-lemma needs --p")
        try:
            f = field(args.p, args.alpha)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        report = verify_field_lemma(f, args.max_size, seed=args.seed)
        doc = ReportDocument(group={"name": f"F{args.p}^{args.alpha}", "order": f.order, "hash": ""},
                             plan=report.plan.to_dict(), results=[report.to_dict(timing=args.timing)])
        if args.timing:
            doc.timing = {report.theorem: round(report.wall_time, 6)}
    else:
        g = resolve_group(args)
        plan = build_plan(args, g)
        runners = {
            "cd": lambda: verify_cauchy_davenport(g, plan, jobs=args.jobs),
            "thm1": lambda: verify_theorem1(g, plan, jobs=args.jobs),
            "thm2": lambda: verify_theorem2(g, plan, jobs=args.jobs),
            "thm3": lambda: verify_theorem3(g, plan, jobs=args.jobs),
            "bw": lambda: verify_balister_wheeler(g, plan, jobs=args.jobs),
            "hall": lambda: verify_hall(g, plan),
        }
        report = runners[args.theorem]()
        doc = ReportDocument.from_reports(g, [report], timing=args.timing)
    _emit(doc.render(args.format), args.out)
    return EXIT_BY_STATUS[doc.status]


def cmd_extremal(args) -> int:
    g = resolve_group(args)
    plan = build_plan(args, g)
    entries = extremal_scan(g, plan, args.bound, limit=args.limit)
    doc = ReportDocument(group=group_descriptor(g), plan=plan.to_dict(), extremal=entries)
    _emit(doc.render(args.format), args.out)
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; remap so 2 keeps meaning FAIL
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", None) is None and hasattr(args, "jobs"):
        args.jobs = int(os.environ.get(JOBS_ENV, "1") or 1)
    handlers = {"group-info": cmd_group_info, "verify": cmd_verify, "extremal": cmd_extremal}
    try:
        return handlers[args.command](args)
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (UsageError, UnknownGroupError, GroupDefinitionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
