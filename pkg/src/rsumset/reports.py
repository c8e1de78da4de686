"""Versioned report documents and their JSON, text and CSV renderings.

A document records the tool version, the group (name plus content hash), the
plan that was run and one result block per theorem.  Timing is stored only
when requested, so two runs of the same plan serialize to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .groups import FiniteGroup
from .plan import SearchPlan, VerificationReport

SCHEMA_VERSION = 1


def group_descriptor(g: FiniteGroup) -> dict:
    return {"name": g.name, "order": g.order, "hash": g.content_hash}


@dataclass
class ReportDocument:
    group: dict
    plan: dict | None = None
    results: list[dict] = field(default_factory=list)
    extremal: list[dict] | None = None
    timing: dict | None = None
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__

    @classmethod
    def from_reports(
        cls, g: FiniteGroup, reports: list[VerificationReport], *, timing: bool = False
    ) -> ReportDocument:
        doc = cls(
            group=group_descriptor(g),
            plan=reports[0].plan.to_dict() if reports else None,
            results=[r.to_dict(timing=timing) for r in reports],
        )
        if timing:
            doc.timing = {r.theorem: round(r.wall_time, 6) for r in reports}
        return doc

    @property
    def status(self) -> str:
        statuses = {r["status"] for r in self.results}
        for s in ("FAIL", "PARTIAL"):
            if s in statuses:
                return s
        return "PASS"

    def reports(self) -> list[VerificationReport]:
        return [VerificationReport.from_dict(r) for r in self.results]

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "group": self.group,
            "plan": self.plan,
            "results": self.results,
        }
        if self.extremal is not None:
            d["extremal"] = self.extremal
        if self.timing is not None:
            d["timing"] = self.timing
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ReportDocument:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        return cls(
            group=d["group"],
            plan=d.get("plan"),
            results=d.get("results", []),
            extremal=d.get("extremal"),
            timing=d.get("timing"),
            schema_version=d["schema_version"],
            tool_version=d["tool_version"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReportDocument:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        g = self.group
        lines = [f"group {g['name']} (order {g['order']}, hash {g['hash'][:12]})"]
        if self.results:
            rows = [("theorem", "status", "instances", "violations")]
            for r in self.results:
                rows.append((r["theorem"], r["status"], str(r["instances_checked"]), str(len(r["violations"]))))
            widths = [max(len(row[i]) for row in rows) for i in range(4)]
            for row in rows:
                lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
            for r in self.results:
                for v in r["violations"][:10]:
                    lines.append(f"  violation [{r['theorem']}] {json.dumps(v, sort_keys=True)}")
                for note in r["notes"]:
                    lines.append(f"  note [{r['theorem']}] {note}")
        if self.extremal is not None:
            lines.append(f"extremal instances: {len(self.extremal)}")
            for e in self.extremal:
                b = f" B={e['b']}" if "b" in e else ""
                lines.append(f"  A={e['a']}{b} lhs={e['lhs']} verdict={e['structure']['verdict']}")
        if self.timing:
            for k, v in sorted(self.timing.items()):
                lines.append(f"time {k}: {v:.3f}s")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.extremal is not None:
            w.writerow(["bound", "a", "b", "sigma", "lhs", "rhs", "verdict", "commutative", "progression"])
            for e in self.extremal:
                s = e["structure"]
                w.writerow([
                    e["bound"], " ".join(map(str, e["a"])), " ".join(map(str, e.get("b", []))),
                    " ".join(map(str, e.get("sigma", []))), e["lhs"], e["rhs"], s["verdict"],
                    s["commutative"], "" if s.get("progression") is None else " ".join(map(str, s["progression"])),
                ])
        else:
            w.writerow(["theorem", "status", "instances_checked", "violations"])
            for r in self.results:
                w.writerow([r["theorem"], r["status"], r["instances_checked"], len(r["violations"])])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "text":
            return self.to_text()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def plan_from_document(doc: ReportDocument) -> SearchPlan | None:
    return SearchPlan.from_dict(doc.plan) if doc.plan else None
