"""Search plans and verification reports (plain data, JSON round-trippable)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Any

MODES = ("exhaustive", "size_capped", "sampled")

PASS, FAIL, PARTIAL = "PASS", "FAIL", "PARTIAL"


@dataclass(frozen=True)
class Pruning:
    use_inversion_symmetry: bool = False
    use_automorphism_orbits: bool = False

    @classmethod
    def from_flag(cls, flag: str) -> Pruning:
        table = {
            "none": cls(),
            "inversion": cls(True, False),
            "auto": cls(False, True),
            "both": cls(True, True),
        }
        if flag not in table:
            raise ValueError(f"unknown pruning flag {flag!r}")
        return table[flag]


@dataclass(frozen=True)
class SearchPlan:
    group: str
    mode: str = "exhaustive"
    size_caps: tuple[int | None, int | None] = (None, None)
    sample_count: int = 0
    seed: int = 0
    pruning: Pruning = field(default_factory=Pruning)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "sampled" and self.sample_count < 1:
            raise ValueError("sampled mode needs sample_count >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "size_caps", tuple(self.size_caps))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["size_caps"] = list(self.size_caps)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> SearchPlan:
        d = dict(d)
        d["pruning"] = Pruning(**d.get("pruning", {}))
        d["size_caps"] = tuple(d.get("size_caps", (None, None)))
        return cls(**d)

    def with_(self, **kw) -> SearchPlan:
        return replace(self, **kw)


@dataclass
class Violation:
    a: list[int]
    lhs: int
    rhs: int
    b: list[int] | None = None
    sigma: list[int] | None = None
    kind: str | None = None
    structure: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None and v != {}}

    @classmethod
    def from_dict(cls, d: dict) -> Violation:
        return cls(**d)


@dataclass
class VerificationReport:
    plan: SearchPlan
    theorem: str
    instances_checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    wall_time: float = 0.0
    partial: bool = False
    counters: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.violations:
            return FAIL
        if self.partial:
            return PARTIAL
        return PASS

    def merge(self, other: VerificationReport) -> VerificationReport:
        """Combine two chunk reports of the same theorem (associative)."""
        if other.theorem != self.theorem:
            raise ValueError("cannot merge reports of different theorems")
        counters = dict(self.counters)
        for k, v in other.counters.items():
            if isinstance(v, (int, float)) and isinstance(counters.get(k, 0), (int, float)):
                counters[k] = counters.get(k, 0) + v
            elif k not in counters:
                counters[k] = v
        return VerificationReport(
            plan=self.plan,
            theorem=self.theorem,
            instances_checked=self.instances_checked + other.instances_checked,
            violations=self.violations + other.violations,
            wall_time=self.wall_time + other.wall_time,
            partial=self.partial or other.partial,
            counters=counters,
            notes=self.notes + [n for n in other.notes if n not in self.notes],
        )

    def to_dict(self, *, timing: bool = False) -> dict:
        d = {
            "theorem": self.theorem,
            "status": self.status,
            "plan": self.plan.to_dict(),
            "instances_checked": self.instances_checked,
            "violations": [v.to_dict() for v in self.violations],
            "counters": self.counters,
            "notes": self.notes,
        }
        if timing:
            d["wall_time"] = round(self.wall_time, 6)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> VerificationReport:
        return cls(
            plan=SearchPlan.from_dict(d["plan"]),
            theorem=d["theorem"],
            instances_checked=d["instances_checked"],
            violations=[Violation.from_dict(v) for v in d["violations"]],
            wall_time=d.get("wall_time", 0.0),
            partial=d["status"] == PARTIAL,
            counters=d.get("counters", {}),
            notes=d.get("notes", []),
        )
