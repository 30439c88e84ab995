"""Certificates: verdicts paired with the hashes of the exact objects
(Groebner bases, echelon bases, generator lists) that back them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from secantcat import __version__

TRUE, FALSE, INCONCLUSIVE = "true", "false", "inconclusive"


@dataclass
class Certificate:
    kind: str
    params: dict
    verdicts: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    reasons: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    work: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    seed: int = 0
    tool_version: str = __version__
    task: dict | None = None

    def set(self, name: str, value, witness: str | None = None, reason: str | None = None):
        """Record a verdict.  ``value`` is a bool or INCONCLUSIVE."""
        if value is True or value == TRUE:
            if not witness:
                raise ValueError(f"verdict {name!r} = true needs a witness hash")
            self.verdicts[name] = TRUE
            self.witnesses[name] = witness
        elif value is False or value == FALSE:
            self.verdicts[name] = FALSE
            if witness:
                self.witnesses[name] = witness
        else:
            if not reason:
                raise ValueError(f"inconclusive verdict {name!r} needs a reason")
            self.verdicts[name] = INCONCLUSIVE
            self.reasons[name] = reason

    def ok(self, name: str) -> bool:
        return self.verdicts.get(name) == TRUE

    @property
    def all_true(self) -> bool:
        return bool(self.verdicts) and all(v == TRUE for v in self.verdicts.values())

    def exit_code(self) -> int:
        return exit_code_for(self.verdicts.values())

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "params": self.params,
            "task": self.task,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "reasons": self.reasons,
            "details": self.details,
            "work": self.work,
            "seed": self.seed,
            "toolVersion": self.tool_version,
        }
        if include_timings:
            out["timings"] = self.timings
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), sort_keys=True, separators=(",", ":"))


def exit_code_for(verdicts) -> int:
    """0 if every verdict is true, 2 if any is false, else 3."""
    verdicts = list(verdicts)
    if any(v == FALSE for v in verdicts):
        return 2
    if any(v != TRUE for v in verdicts):
        return 3
    return 0
