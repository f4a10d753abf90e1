"""Diagnostics and verdict reports shared by both engines."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

ERROR = "Error"
WARNING = "Warning"

PRE_VIOLATION = "PreViolation"
RACE_VIOLATION = "RaceViolation"
MUST_EVENTUALLY = "MustEventuallyViolation"
TAG_MAPPING = "TagMappingMismatch"
HANDLE_LIFECYCLE = "HandleLifecycle"

KINDS = (PRE_VIOLATION, RACE_VIOLATION, MUST_EVENTUALLY, TAG_MAPPING, HANDLE_LIFECYCLE)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    function: str
    instr_index: int
    contract_fn: str
    message: str
    severity: str = ERROR

    def to_json(self) -> dict:
        return asdict(self)

    def __str__(self) -> str:
        return f"{self.severity.lower()}: {self.function}#{self.instr_index}: {self.kind}: {self.message}"


@dataclass
class Report:
    case: str
    mode: str
    engine: str
    diagnostics: list[Diagnostic] = field(default_factory=list)
    # free-form engine facts (trap message, event counters); omitted when empty
    info: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "Error" if any(d.severity == ERROR for d in self.diagnostics) else "NoError"

    @property
    def has_error(self) -> bool:
        return self.verdict == "Error"

    def kinds(self) -> list[str]:
        return [d.kind for d in self.diagnostics]

    def to_json(self) -> dict:
        out = {
            "case": self.case,
            "mode": self.mode,
            "engine": self.engine,
            "verdict": self.verdict,
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }
        if self.info:
            out["info"] = self.info
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    def text(self) -> str:
        head = f"{self.case} [{self.mode}, {self.engine}]: {self.verdict}"
        return "\n".join([head] + [f"  {d}" for d in self.diagnostics])

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        diags = [Diagnostic(**d) for d in data.get("diagnostics", [])]
        return cls(data["case"], data["mode"], data["engine"], diags, data.get("info", {}))
